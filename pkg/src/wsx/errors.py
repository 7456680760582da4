"""Exception taxonomy shared across the package.

Every failure mode that callers are expected to catch gets its own class;
anything else is a plain ValueError/RuntimeError from the offending call.
"""


class WsxError(Exception):
    """Base class for package-specific errors."""


class NotConvex(WsxError):
    """A surface kind failed the strict-convexity requirement (curvature <= 0)."""


class ConeViolation(WsxError):
    """Normals of the requested patch spread beyond the admissible cone."""


class OffPatch(WsxError):
    """A midpoint landed outside the represented patch and no continuation applies."""


class Degenerate(WsxError):
    """Parallel normals where the Jacobian formula needs them transversal."""


class StepTooLarge(WsxError):
    """A finite-difference stencil left the patch."""


class DomainExhausted(WsxError):
    """No admissible pair survived the domain restrictions of a scan."""


class UnderResolved(WsxError):
    """Grid too coarse to resolve the requested oscillation."""


class Aliased(WsxError):
    """Data does not decay at the grid boundary; FFT output untrustworthy."""


class SingularityUnderResolved(WsxError):
    """Local refinement around a singular cell failed its self-consistency check."""


class OutOfBand(WsxError):
    """A tangent offset fell outside the stored slice grid."""


class OutOfGrid(WsxError):
    """A geometric region is not covered by the sampled grid."""


class NotConcave(WsxError):
    """Weight failed the sampled concavity precondition."""
