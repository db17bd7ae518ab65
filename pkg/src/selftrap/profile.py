"""Self-trapped density profiles from constrained entropy maximization.

The density that maximizes Shannon entropy at fixed average curvature
potential has the Gibbs form rho = exp(-U/T)/Z, while U is in turn
generated by rho itself:

    U = -(1/2) R''/R,   R = sqrt(rho)   (hbar = m = 1).

Eliminating rho gives a nonlinear ODE for the potential,

    U'' = U'^2 / (2T) + 4 T U,

whose even solutions with U(0) = U0 > 0, U'(0) = 0 are convex, positive,
and diverge at finite points +-L_m where the amplitude crosses zero: the
density traps itself on a compact support.

Direct integration of the U-form blows up at the support edge. The solver
therefore integrates the scaled amplitude variable

    w(q) = exp((U0 - U(q)) / (2T)),    w'' = 4 T w ln w - 2 U0 w,

with w(0) = 1, w'(0) = 0, which stays smooth through the support edge
(w ln w -> 0 as w -> 0) and turns edge detection into a plain zero
crossing. Then rho = w^2 / integral(w^2) and U = U0 - 2 T ln w. The
blow-up-capped U-form integrator is kept as an equivalence oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DegenerateInputError, ParameterError, SolverError
from .numerics import (
    RealField,
    SpatialGrid,
    average_potential,
    derivative,
    shannon_entropy,
)

# Floor for ln(w) at the resampled support edge; caps U there instead of
# producing an infinity (w vanishes exactly at +-L_m).
_W_FLOOR = 1e-300


@dataclass(frozen=True)
class StepControl:
    """Tolerance bundle for the adaptive stepper."""

    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ParameterError("tolerances must be positive")


@dataclass(frozen=True)
class ProfileParams:
    """Solver inputs: Lagrange parameter T and central potential U0.

    The initial slope U'(0) is fixed to zero; only even self-trapped
    solutions exist under that condition.
    """

    T: float
    U0: float
    initial_slope: float = 0.0
    step_control: StepControl = field(default_factory=StepControl)

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T > 0.0):
            raise ParameterError(f"T must be positive, got {self.T}")
        if not (np.isfinite(self.U0) and self.U0 > 0.0):
            raise ParameterError(f"U0 must be positive, got {self.U0}")
        if self.initial_slope != 0.0:
            raise ParameterError("initial slope must be 0 (even solutions only)")


@dataclass(frozen=True)
class ProfileSolution:
    """Self-trapped profile at one (T, U0) on a symmetric uniform grid."""

    params: ProfileParams
    grid: SpatialGrid
    U: RealField
    R: RealField
    rho: RealField
    L_m: float
    Z: float
    U_bar: float
    entropy: float


@dataclass(frozen=True)
class SweepRecord:
    """One row of a T-sweep at fixed U0."""

    T: float
    L_m: float
    U_bar: float
    entropy: float
    Z: float


def _w_rhs(T: float, U0: float):
    twoU0 = 2.0 * U0
    fourT = 4.0 * T

    def rhs(_q, y):
        w = y[0]
        # continuous extension of w*ln(w) through the zero crossing
        drive = fourT * w * math.log(abs(w)) if w != 0.0 else 0.0
        return (y[1], drive - twoU0 * w)

    return rhs


def _bisect_zero(w_of_q, lo: float, hi: float, w_scale: float, tol: float = 1e-13) -> float:
    """Bisection for the first zero of w on a dense-output bracket."""
    f_lo = w_of_q(lo)
    if f_lo <= 0.0:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = w_of_q(mid)
        if abs(f_mid) <= tol * w_scale:
            return mid
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def integrate_amplitude(params: ProfileParams):
    """Integrate the scaled amplitude outward and locate its first zero.

    Returns (w_dense, L_m) where w_dense evaluates the dense-output
    amplitude on [0, L_m] (vectorized over q).
    """
    T, U0 = params.T, params.U0
    # w is majorized by cos(sqrt(2*U0) q) (the drive term is <= 0 on
    # 0 < w <= 1), so the crossing happens before the quarter period.
    q_cap = 1.05 * 0.5 * math.pi / math.sqrt(2.0 * U0)
    ctrl = params.step_control
    sol = solve_ivp(
        _w_rhs(T, U0),
        (0.0, q_cap),
        [1.0, 0.0],
        method="DOP853",
        rtol=ctrl.rtol,
        atol=ctrl.atol,
        max_step=ctrl.max_step,
        dense_output=True,
        events=_make_crossing_event(),
    )
    if not sol.success:
        raise SolverError(
            f"amplitude integration failed for T={T}, U0={U0}: {sol.message}",
            diagnostics={"T": T, "U0": U0, "message": sol.message},
        )
    if sol.t_events[0].size == 0:
        raise SolverError(
            f"no amplitude zero crossing before q={q_cap:.6g} for T={T}, U0={U0}",
            diagnostics={"T": T, "U0": U0, "q_cap": q_cap},
        )
    q_event = float(sol.t_events[0][0])
    bracket = 10.0 * max(abs(q_event) * 1e-12, 1e-14)
    L_m = _bisect_zero(
        lambda q: float(sol.sol(q)[0]), max(q_event - bracket, 0.0), q_event + bracket, 1.0
    )
    return (lambda q: sol.sol(q)[0]), L_m


def solve_profile(params: ProfileParams, n_points: int = 4097) -> ProfileSolution:
    """Solve for the self-trapped profile at the given (T, U0).

    Integrates the scaled amplitude from the center outward, locates the
    support edge L_m as its first zero, and resamples everything onto a
    uniform symmetric grid of n_points (odd, so q = 0 is a sample).
    """
    if n_points < 5 or n_points % 2 == 0:
        raise ParameterError(f"n_points must be odd and >= 5, got {n_points}")
    T, U0 = params.T, params.U0

    w_dense, L_m = integrate_amplitude(params)

    half = (n_points + 1) // 2
    q_half = np.linspace(0.0, L_m, half)
    w_half = np.maximum(w_dense(q_half), 0.0)
    w_half[-1] = 0.0

    w = np.concatenate([w_half[::-1], w_half[1:]])
    grid = SpatialGrid.symmetric(L_m, n_points)

    norm = float(np.trapezoid(w * w, dx=grid.spacing))
    rho_vals = w * w / norm
    R_vals = w / math.sqrt(norm)
    with np.errstate(divide="ignore"):
        U_vals = U0 - 2.0 * T * np.log(np.maximum(w, _W_FLOOR))

    rho = RealField(grid, rho_vals)
    R = RealField(grid, R_vals)
    U = RealField(grid, U_vals)
    Z = math.exp(-U0 / T) * norm
    U_bar = average_potential(U, rho)
    entropy = shannon_entropy(rho)

    return ProfileSolution(
        params=params,
        grid=grid,
        U=U,
        R=R,
        rho=rho,
        L_m=L_m,
        Z=Z,
        U_bar=U_bar,
        entropy=entropy,
    )


def _make_crossing_event():
    def crossing(_q, y):
        return y[0]

    crossing.terminal = True
    crossing.direction = -1.0
    return crossing


def integrate_potential_direct(
    params: ProfileParams, u_cap_factor: float = 20.0
):
    """Blow-up-capped direct integration of the U-form equation.

    Equivalence oracle for the scaled-amplitude route: integrates
    U'' = U'^2/(2T) + 4 T U from U(0) = U0, U'(0) = 0 until U reaches a
    blow-up cap, and returns (dense_U, q_end) where dense_U maps
    q in [0, q_end] to U(q).

    The cap is the smaller of u_cap_factor * U0 and U0 + 2 T ln(1e12):
    the potential sits 2 T ln(1/s) above U0 at distance s from the
    singularity, so pushing past the second bound would require resolving
    distances below double-precision spacing around the support edge.
    """
    T, U0 = params.T, params.U0
    u_cap = min(u_cap_factor * U0, U0 + 2.0 * T * math.log(1e12))

    def rhs(_q, y):
        return (y[1], y[1] * y[1] / (2.0 * T) + 4.0 * T * y[0])

    def hit_cap(_q, y):
        return y[0] - u_cap

    hit_cap.terminal = True
    hit_cap.direction = 1.0

    q_cap = 1.05 * 0.5 * math.pi / math.sqrt(2.0 * U0)
    ctrl = params.step_control
    sol = solve_ivp(
        rhs,
        (0.0, q_cap),
        [U0, 0.0],
        method="DOP853",
        rtol=ctrl.rtol,
        atol=ctrl.atol,
        dense_output=True,
        events=hit_cap,
    )
    if not sol.success:
        raise SolverError(
            f"direct potential integration failed for T={T}, U0={U0}: {sol.message}",
            diagnostics={"T": T, "U0": U0, "message": sol.message},
        )
    if sol.t_events[0].size == 0:
        raise SolverError(
            f"potential never reached the blow-up cap for T={T}, U0={U0}",
            diagnostics={"T": T, "U0": U0, "u_cap": u_cap},
        )
    q_end = float(sol.t_events[0][0])
    return (lambda q: sol.sol(q)[0]), q_end


def recover_potential(
    rho: RealField, floor_rel: float = 0.15, edge_buffer: int = 5
) -> RealField:
    """Curvature potential -(1/2) R''/R recovered from a density.

    Returns the potential on the contiguous interior window where the
    amplitude R = sqrt(rho) stays above floor_rel * max(R). The curvature
    is differenced on the full above-floor window and the outermost
    edge_buffer points are then dropped, so every returned sample comes
    from a central stencil. For compact-support densities the curvature
    error grows like h^2/s^2 with distance s from the support edge; the
    default floor keeps the window where the recovery is quadratically
    accurate in the grid spacing.
    """
    v = rho.values
    if np.any(v < 0.0):
        raise DegenerateInputError("density has negative samples")
    R_vals = np.sqrt(v)
    top = R_vals.max()
    if top <= 0.0:
        raise DegenerateInputError("density vanishes everywhere")
    above = np.flatnonzero(R_vals > floor_rel * top)
    a0, a1 = int(above[0]), int(above[-1])
    i0, i1 = a0 + edge_buffer, a1 - edge_buffer
    if i1 - i0 + 1 < 7 or a1 - a0 + 1 < 7:
        raise DegenerateInputError(
            "amplitude exceeds the floor on too narrow a window to differentiate"
        )
    R = RealField(rho.grid.subgrid(a0, a1), R_vals[a0 : a1 + 1])
    d2R = derivative(R, order=2)
    U_all = -0.5 * d2R.values / R.values
    window = rho.grid.subgrid(i0, i1)
    return RealField(window, U_all[edge_buffer:-edge_buffer])


def sweep_temperature(
    T_values, U0: float, n_points: int = 4097
) -> list[SweepRecord]:
    """Solve the profile at each T (fixed U0) and tabulate the results."""
    T_list = [float(t) for t in T_values]
    if not T_list:
        raise ParameterError("empty T list")
    records = []
    for T in T_list:
        try:
            sol = solve_profile(ProfileParams(T=T, U0=U0), n_points=n_points)
        except SolverError as err:
            raise SolverError(
                f"sweep failed at T={T}: {err}", diagnostics={"T": T, **err.diagnostics}
            ) from err
        records.append(
            SweepRecord(T=T, L_m=sol.L_m, U_bar=sol.U_bar, entropy=sol.entropy, Z=sol.Z)
        )
    return records


@dataclass(frozen=True)
class StationarityReport:
    """Entropy response of a profile to constrained random perturbations.

    entropy_diffs[i] is H[rho + eps*delta_i] - H[rho]; all must be <= 0
    up to roundoff when rho is the constrained maximizer. first_order and
    first_order_half are central-difference estimates of the first
    variation at eps and eps/2; both vanish to O(eps^2) at stationarity.
    """

    epsilon: float
    entropy_diffs: np.ndarray
    first_order: np.ndarray
    first_order_half: np.ndarray

    @property
    def max_entropy_increase(self) -> float:
        return float(self.entropy_diffs.max())

    @property
    def first_order_ratios(self) -> np.ndarray:
        """|first variation| shrink factors from eps to eps/2."""
        denom_ok = np.abs(self.first_order_half) > 1e-14
        return np.abs(self.first_order[denom_ok]) / np.abs(
            self.first_order_half[denom_ok]
        )


def maxent_stationarity_check(
    sol: ProfileSolution,
    n_perturbations: int = 50,
    epsilon: float = 1e-3,
    seed: int = 42,
    max_retries: int = 5,
) -> StationarityReport:
    """Verify that the profile density is entropy-stationary.

    Draws random smooth perturbations (low-order polynomials windowed by
    rho itself, so they vanish at the support edge), projects each onto
    the two linear constraints (zero total mass change, zero change of the
    average potential at fixed U), and measures the entropy response.
    """
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    grid = sol.grid
    q = grid.points
    h = grid.spacing
    rho = sol.rho.values
    U = sol.U.values
    scale = q / sol.L_m

    def quad(f: np.ndarray) -> float:
        return float(np.trapezoid(f, dx=h))

    def entropy_of(values: np.ndarray) -> float:
        out = np.zeros_like(values)
        pos = values > 0.0
        out[pos] = values[pos] * np.log(values[pos])
        return -quad(out)

    # fixed even projection basis; the 2x2 system below is solvable
    # whenever U is non-constant over the support
    e1 = rho
    e2 = scale * scale * rho
    U_masked = np.where(rho > 0.0, U, 0.0)
    A = np.array(
        [[quad(e1), quad(e2)], [quad(U_masked * e1), quad(U_masked * e2)]]
    )

    rng = np.random.default_rng(seed)
    H0 = entropy_of(rho)
    diffs = np.empty(n_perturbations)
    first = np.empty(n_perturbations)
    first_half = np.empty(n_perturbations)

    for i in range(n_perturbations):
        delta = None
        for _ in range(max_retries):
            coeffs = rng.uniform(-1.0, 1.0, size=5)
            g = np.polynomial.polynomial.polyval(scale, coeffs)
            cand = g * rho
            b = np.array([quad(cand), quad(U_masked * cand)])
            try:
                ab = np.linalg.solve(A, b)
            except np.linalg.LinAlgError:
                continue
            cand = cand - ab[0] * e1 - ab[1] * e2
            with np.errstate(invalid="ignore", divide="ignore"):
                g_eff = np.where(rho > 0.0, cand / np.maximum(rho, 1e-300), 0.0)
            peak = np.abs(g_eff).max()
            if peak < 1e-6:
                continue
            delta = cand / peak
            break
        if delta is None:
            raise SolverError(
                "could not draw a non-degenerate constrained perturbation",
                diagnostics={"perturbation_index": i},
            )

        def response(eps: float) -> tuple[float, float]:
            return entropy_of(rho + eps * delta), entropy_of(rho - eps * delta)

        Hp, Hm = response(epsilon)
        diffs[i] = Hp - H0
        first[i] = (Hp - Hm) / (2.0 * epsilon)
        Hp2, Hm2 = response(0.5 * epsilon)
        first_half[i] = (Hp2 - Hm2) / epsilon

    return StationarityReport(
        epsilon=epsilon,
        entropy_diffs=diffs,
        first_order=first,
        first_order_half=first_half,
    )
