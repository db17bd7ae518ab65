"""Uniform 1D grids, sampled fields, differentiation and quadrature.

All computations use hbar = m = 1. Fields are immutable after
construction and safe to share across threads; every operation here is a
pure function.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from typing import Union

import numpy as np

from .errors import (
    DomainError,
    GridSizeError,
    NormalizationError,
    ParameterError,
)

HBAR = 1.0
MASS = 1.0


@dataclass(frozen=True)
class UnitsConvention:
    """Fixed hbar = m = 1 convention, embedded in serialized summaries."""

    hbar: float = HBAR
    mass: float = MASS

    def as_dict(self) -> dict:
        return {"hbar": self.hbar, "mass": self.mass}


UNITS = UnitsConvention()


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid of n_points samples on [q_min, q_max]."""

    q_min: float
    q_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 3:
            raise GridSizeError(f"grid needs >= 3 points, got {self.n_points}")
        if not np.isfinite(self.q_min) or not np.isfinite(self.q_max):
            raise ParameterError("grid bounds must be finite")
        if not self.q_min < self.q_max:
            raise ParameterError(f"need q_min < q_max, got [{self.q_min}, {self.q_max}]")
        pts = np.linspace(self.q_min, self.q_max, self.n_points)
        pts.setflags(write=False)
        object.__setattr__(self, "_points", pts)

    @classmethod
    def symmetric(cls, half_length: float, n_points: int) -> "SpatialGrid":
        """Grid on [-half_length, half_length]."""
        if half_length <= 0:
            raise ParameterError(f"half_length must be positive, got {half_length}")
        return cls(-half_length, half_length, n_points)

    @property
    def spacing(self) -> float:
        return (self.q_max - self.q_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return self._points

    def subgrid(self, i0: int, i1: int) -> "SpatialGrid":
        """Grid restricted to the index window [i0, i1] (inclusive)."""
        if not (0 <= i0 < i1 <= self.n_points - 1):
            raise ParameterError(f"bad subgrid window [{i0}, {i1}]")
        return SpatialGrid(float(self._points[i0]), float(self._points[i1]), i1 - i0 + 1)

    def contains(self, lo: float, hi: float, tol: float = 1e-12) -> bool:
        return self.q_min <= lo + tol and hi - tol <= self.q_max


def _prepare_values(grid: SpatialGrid, values, dtype, allow_infinite: bool) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype).copy()
    if arr.ndim != 1 or arr.size != grid.n_points:
        raise ParameterError(
            f"values shape {arr.shape} does not match grid with {grid.n_points} points"
        )
    if np.any(np.isnan(arr)):
        raise DomainError("field contains NaN samples")
    if not allow_infinite and not np.all(np.isfinite(arr)):
        raise DomainError("field contains non-finite samples")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RealField:
    """Real samples aligned to a grid.

    edge_width marks how many samples at each end were produced by
    one-sided stencils and carry reduced accuracy (0 for raw data).
    Infinite entries are rejected unless allow_infinite is set; the only
    producer of infinities is the hard-wall potential, which serializes
    them as an explicit sentinel.
    """

    grid: SpatialGrid
    values: np.ndarray
    edge_width: int = 0
    allow_infinite: InitVar[bool] = False

    def __post_init__(self, allow_infinite):
        object.__setattr__(
            self, "values", _prepare_values(self.grid, self.values, float, allow_infinite)
        )

    def __len__(self) -> int:
        return self.grid.n_points


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples aligned to a grid; see RealField for conventions."""

    grid: SpatialGrid
    values: np.ndarray
    edge_width: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "values", _prepare_values(self.grid, self.values, complex, False)
        )

    def __len__(self) -> int:
        return self.grid.n_points


Field = Union[RealField, ComplexField]


def _require_finite(f: Field, op: str) -> None:
    if not np.all(np.isfinite(f.values)):
        raise DomainError(f"{op} requires finite field values")


def _diff_array(v: np.ndarray, h: float, order: int, accuracy: int) -> np.ndarray:
    """Finite differences on a uniform grid.

    Interior stencils are central of the requested accuracy; the outermost
    accuracy//2 points on each side fall back to one-sided second-order
    stencils.
    """
    d = np.empty_like(v)
    if order == 1 and accuracy == 2:
        d[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    elif order == 1 and accuracy == 4:
        d[2:-2] = (-v[4:] + 8.0 * v[3:-1] - 8.0 * v[1:-3] + v[:-4]) / (12.0 * h)
        d[1] = (v[2] - v[0]) / (2.0 * h)
        d[-2] = (v[-1] - v[-3]) / (2.0 * h)
    elif order == 2 and accuracy == 2:
        d[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    elif order == 2 and accuracy == 4:
        d[2:-2] = (
            -v[4:] + 16.0 * v[3:-1] - 30.0 * v[2:-2] + 16.0 * v[1:-3] - v[:-4]
        ) / (12.0 * h * h)
        d[1] = (v[2] - 2.0 * v[1] + v[0]) / (h * h)
        d[-2] = (v[-1] - 2.0 * v[-2] + v[-3]) / (h * h)
    else:
        raise ParameterError(f"unsupported order={order}, accuracy={accuracy}")
    if order == 1:
        d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    else:
        d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h)
        d[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / (h * h)
    return d


def derivative(f: Field, order: int = 1, accuracy: int = 2) -> Field:
    """First or second spatial derivative of a sampled field.

    The returned field's edge_width flags the reduced-accuracy one-sided
    zone at each end.
    """
    if order not in (1, 2):
        raise ParameterError(f"order must be 1 or 2, got {order}")
    if accuracy not in (2, 4):
        raise ParameterError(f"accuracy must be 2 or 4, got {accuracy}")
    n_min = {(1, 2): 3, (2, 2): 5, (1, 4): 5, (2, 4): 6}[(order, accuracy)]
    if f.grid.n_points < n_min:
        raise GridSizeError(
            f"order-{order} accuracy-{accuracy} stencil needs >= {n_min} points, "
            f"grid has {f.grid.n_points}"
        )
    _require_finite(f, "derivative")
    d = _diff_array(f.values, f.grid.spacing, order, accuracy)
    edge = max(f.edge_width, accuracy // 2)
    cls = RealField if isinstance(f, RealField) else ComplexField
    return cls(f.grid, d, edge_width=edge)


def integrate(f: Field) -> float | complex:
    """Composite trapezoid quadrature of a field over its grid."""
    _require_finite(f, "integrate")
    out = np.trapezoid(f.values, dx=f.grid.spacing)
    return complex(out) if isinstance(f, ComplexField) else float(out)


def shannon_entropy(rho: RealField, norm_tol: float = 1e-6) -> float:
    """Differential Shannon entropy -integral(rho * ln rho).

    Samples where rho vanishes contribute zero (the 0*ln 0 convention,
    matching the integrand limit at a compact-support boundary).
    """
    _require_finite(rho, "shannon_entropy")
    v = rho.values
    if np.any(v < 0.0):
        raise DomainError(f"density has negative samples (min {v.min():.3e})")
    total = np.trapezoid(v, dx=rho.grid.spacing)
    if abs(total - 1.0) > norm_tol:
        raise NormalizationError(
            f"density integrates to {total!r}, expected 1 within {norm_tol:g}"
        )
    integrand = np.zeros_like(v)
    pos = v > 0.0
    integrand[pos] = v[pos] * np.log(v[pos])
    return float(-np.trapezoid(integrand, dx=rho.grid.spacing))


def average_potential(potential: RealField, rho: RealField) -> float:
    """Density average integral(U * rho), treating U*0 as 0.

    Accepts potentials with infinite wall samples: those samples must sit
    where rho vanishes (the integrand limit there is zero).
    """
    if potential.grid != rho.grid:
        raise ParameterError("potential and density grids differ")
    _require_finite(rho, "average_potential")
    u, r = potential.values, rho.values
    if np.any(~np.isfinite(u) & (r > 0.0)):
        raise DomainError("potential is infinite where the density is nonzero")
    integrand = np.where(r > 0.0, np.where(np.isfinite(u), u, 0.0) * r, 0.0)
    return float(np.trapezoid(integrand, dx=rho.grid.spacing))
