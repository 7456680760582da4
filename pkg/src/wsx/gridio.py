"""Uniform-grid containers and the on-disk grid format.

A grid function lives on a uniform rectangular lattice in R^m described by an
origin, per-axis spacing, and shape.  On disk it is a pair of files sharing a
basename: ``<name>.meta.json`` holding

    {"origin": [..], "spacing": [..], "shape": [..], "field": "re" | "re,im"}

and ``<name>.csv`` with the values flattened row-major, one cell per line
(two comma-separated columns when the field is complex).  All numbers are
written with 12 significant digits, which makes repeated runs byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def fmt12(x: float) -> str:
    """Format with 12 significant digits (the package-wide output format)."""
    return f"{x:.12g}"


@dataclass
class GridFunction:
    """Samples of a scalar (possibly complex) field on a uniform grid."""

    values: np.ndarray
    origin: np.ndarray
    spacing: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        self.origin = np.atleast_1d(np.asarray(self.origin, float))
        self.spacing = np.atleast_1d(np.asarray(self.spacing, float))
        if self.values.ndim != self.origin.size:
            raise ValueError("origin rank does not match value array rank")

    # ------------------------------------------------------------- geometry

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple:
        return self.values.shape

    def axis(self, k: int) -> np.ndarray:
        return self.origin[k] + self.spacing[k] * np.arange(self.shape[k])

    def axes(self) -> list[np.ndarray]:
        return [self.axis(k) for k in range(self.ndim)]

    def meshgrid(self):
        return np.meshgrid(*self.axes(), indexing="ij")

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    # ----------------------------------------------------------- numerics

    def riemann(self):
        """Plain cell-sum integral (the natural mate of FFT conventions)."""
        return self.values.sum() * self.cell_volume

    def trapezoid(self):
        out = self.values
        for k in range(self.ndim - 1, -1, -1):
            out = np.trapezoid(out, dx=self.spacing[k], axis=k)
        return out

    def boundary_max(self) -> float:
        """Largest |value| on any boundary face (decay diagnostics)."""
        v = np.abs(self.values)
        worst = 0.0
        for k in range(self.ndim):
            worst = max(worst, float(v.take(0, axis=k).max()),
                        float(v.take(-1, axis=k).max()))
        return worst

    def sample(self, points: np.ndarray, fill: float = 0.0) -> np.ndarray:
        """Multilinear interpolation at arbitrary points; ``fill`` outside."""
        from scipy.interpolate import RegularGridInterpolator
        interp = RegularGridInterpolator(self.axes(), self.values,
                                         bounds_error=False, fill_value=fill)
        return interp(np.atleast_2d(points))

    @classmethod
    def from_callable(cls, fn, origin, spacing, shape, meta=None):
        g = cls(np.zeros(tuple(shape)), origin, spacing, meta or {})
        mesh = np.stack(g.meshgrid(), axis=-1)
        vals = np.asarray(fn(mesh.reshape(-1, g.ndim)))
        g.values = vals.reshape(tuple(shape))
        return g

    # ---------------------------------------------------------------- I/O

    def save(self, basepath) -> None:
        base = Path(basepath)
        complex_field = np.iscomplexobj(self.values)
        meta = {"origin": [float(v) for v in self.origin],
                "spacing": [float(v) for v in self.spacing],
                "shape": list(self.shape),
                "field": "re,im" if complex_field else "re"}
        base.with_suffix(base.suffix + ".meta.json").write_text(
            json.dumps(meta, indent=1) + "\n")
        flat = self.values.reshape(-1)
        with open(base.with_suffix(base.suffix + ".csv"), "w") as fh:
            if complex_field:
                for z in flat:
                    fh.write(f"{fmt12(z.real)},{fmt12(z.imag)}\n")
            else:
                for x in flat:
                    fh.write(fmt12(float(x)) + "\n")

    @classmethod
    def load(cls, basepath) -> "GridFunction":
        base = Path(basepath)
        meta = json.loads(base.with_suffix(base.suffix + ".meta.json").read_text())
        raw = np.loadtxt(base.with_suffix(base.suffix + ".csv"),
                         delimiter=",", ndmin=2)
        if meta["field"] == "re,im":
            vals = (raw[:, 0] + 1j * raw[:, 1]).reshape(meta["shape"])
        else:
            vals = raw[:, 0].reshape(meta["shape"])
        return cls(vals, np.array(meta["origin"]), np.array(meta["spacing"]))


def weight_grid(values, origin, spacing, nonnegative: bool = False) -> GridFunction:
    """A real weight on a grid; verifies the sign claim at construction."""
    g = GridFunction(np.asarray(values, float), origin, spacing,
                     {"nonnegative": nonnegative})
    if nonnegative and g.values.min() < 0.0:
        raise ValueError("weight flagged nonnegative has negative entries")
    return g
