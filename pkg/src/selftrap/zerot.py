"""Closed-form limit of the self-trapped family as T -> 0.

As the Lagrange parameter vanishes at fixed central potential, the
trapping potential flattens into a box of half-width L0 with hard walls,
and the amplitude becomes the nodeless cosine mode:

    R0(q) = A0 cos(k0 q),   k0 = sqrt(2 U_bar0),   k0 L0 = pi/2,
    A0 = 1/sqrt(L0)         (hbar = m = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .numerics import RealField, SpatialGrid

_REL_TOL = 1e-12


@dataclass(frozen=True)
class ZeroTLimit:
    """Box-limit constants tied together by the ground-mode relations.

    u_bar0 is both the flat box depth and the average potential; k0 the
    mode wave number; L0 the support half-length; A0 the amplitude that
    normalizes A0^2 cos^2 on [-L0, L0].
    """

    u_bar0: float
    k0: float
    L0: float
    A0: float

    def __post_init__(self):
        if not (np.isfinite(self.u_bar0) and self.u_bar0 > 0.0):
            raise ParameterError(f"u_bar0 must be positive, got {self.u_bar0}")
        checks = (
            (self.k0, math.sqrt(2.0 * self.u_bar0)),
            (self.k0 * self.L0, 0.5 * math.pi),
            (self.A0, 1.0 / math.sqrt(self.L0)),
        )
        for got, want in checks:
            if abs(got - want) > _REL_TOL * abs(want):
                raise ParameterError(
                    f"inconsistent zero-T constants: got {got!r}, expected {want!r}"
                )

    @classmethod
    def from_ubar(cls, u_bar0: float) -> "ZeroTLimit":
        if not (np.isfinite(u_bar0) and u_bar0 > 0.0):
            raise ParameterError(f"u_bar0 must be positive, got {u_bar0}")
        k0 = math.sqrt(2.0 * u_bar0)
        L0 = 0.5 * math.pi / k0
        return cls(u_bar0=u_bar0, k0=k0, L0=L0, A0=1.0 / math.sqrt(L0))

    def support_grid(self, n_points: int = 4097) -> SpatialGrid:
        """Uniform grid spanning exactly [-L0, L0]."""
        return SpatialGrid.symmetric(self.L0, n_points)


def zero_t_from_ubar(u_bar0: float) -> ZeroTLimit:
    """Box-limit constants from the average potential alone."""
    return ZeroTLimit.from_ubar(u_bar0)


def _check_support(limit: ZeroTLimit, grid: SpatialGrid) -> None:
    tol = 1e-12 * limit.L0
    if abs(grid.q_min + limit.L0) > tol or abs(grid.q_max - limit.L0) > tol:
        raise ParameterError(
            f"grid [{grid.q_min}, {grid.q_max}] does not span the support "
            f"[-{limit.L0}, {limit.L0}]"
        )


def amplitude_profile(limit: ZeroTLimit, grid: SpatialGrid) -> RealField:
    """Cosine ground-mode amplitude R0 sampled on the support grid."""
    _check_support(limit, grid)
    vals = limit.A0 * np.cos(limit.k0 * grid.points)
    vals[0] = 0.0
    vals[-1] = 0.0
    return RealField(grid, vals)


def box_potential(limit: ZeroTLimit, grid: SpatialGrid) -> RealField:
    """Flat-bottom potential with hard walls at the support edges.

    The two boundary samples are +inf; serialization writes them as the
    literal sentinel ``inf``.
    """
    _check_support(limit, grid)
    vals = np.full(grid.n_points, limit.u_bar0)
    vals[0] = np.inf
    vals[-1] = np.inf
    return RealField(grid, vals, allow_infinite=True)


def density_profile(limit: ZeroTLimit, grid: SpatialGrid) -> RealField:
    """Box-limit density rho0 = R0^2 on the support grid."""
    amp = amplitude_profile(limit, grid)
    return RealField(grid, amp.values * amp.values)
