"""Small result records passed between modules and serialized by the harness."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class VerificationRecord:
    """Outcome of a named check: two numbers, their distance, and a verdict.

    ``lhs``/``rhs`` are the two independently computed values, ``rel_error``
    their relative distance (absolute when both sides vanish), ``tol`` the
    tolerance the check was run at.  ``detail`` carries free-form diagnostics
    (raw ratios, per-point errors) for the report writer.
    """

    name: str
    lhs: float
    rhs: float
    rel_error: float
    tol: float
    passed: bool
    detail: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, name: str, lhs: float, rhs: float, tol: float,
                detail: dict | None = None) -> "VerificationRecord":
        scale = max(abs(lhs), abs(rhs))
        err = abs(lhs - rhs) if scale == 0.0 else abs(lhs - rhs) / scale
        return cls(name=name, lhs=float(lhs), rhs=float(rhs), rel_error=float(err),
                   tol=float(tol), passed=bool(err <= tol), detail=detail or {})

    @classmethod
    def bound(cls, name: str, value: float, budget: float,
              detail: dict | None = None) -> "VerificationRecord":
        """Record for one-sided checks: ``value <= budget``."""
        return cls(name=name, lhs=float(value), rhs=float(budget),
                   rel_error=float(value / budget) if budget else float("inf"),
                   tol=1.0, passed=bool(value <= budget), detail=detail or {})

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "rel_error": self.rel_error,
            "tol": self.tol,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class JacobianRecord:
    """Midpoint-map data for one ordered pair of surface nodes."""

    u_index: int
    uprime_index: int
    u2: tuple  # the reflected point, ambient coordinates
    J: float
    Delta: float
    Jtilde: float
    method: str  # "closed-form" | "formula" | "finite-difference"
