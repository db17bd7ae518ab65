"""End-to-end verification suite for the package's quantitative claims.

Each criterion is a self-contained check returning a CriterionResult; the
CLI ``verify`` command and the acceptance tests both run these. Checks
assert physics and serialization contracts at fixed tolerances; every
measured quantity lands in the details dict for inspection.
"""

from __future__ import annotations

import filecmp
import math
import shutil
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import (
    EvolutionConfig,
    MovingPacket,
    density_peak,
    density_width,
    energy_decomposition,
    evolve,
    gaussian_packet,
    momentum_complex,
    schrodinger_residual,
    support_interior_mask,
)
from .numerics import RealField, SpatialGrid
from .profile import (
    ProfileParams,
    integrate_amplitude,
    integrate_potential_direct,
    maxent_stationarity_check,
    solve_profile,
    sweep_temperature,
)
from .zerot import zero_t_from_ubar

L0_REFERENCE = 0.5 * math.pi / math.sqrt(2.0)  # half-length at unit box depth


@dataclass
class CriterionResult:
    name: str
    passed: bool
    runtime_s: float
    details: dict = field(default_factory=dict)
    notes: str = ""


def _result(name, passed, t0, details, notes=""):
    return CriterionResult(
        name=name,
        passed=bool(passed),
        runtime_s=time.perf_counter() - t0,
        details=details,
        notes=notes,
    )


def check_profile_shape(seed: int = 42) -> CriterionResult:
    """Convex positive potential, concave amplitude, normalized density,
    vanishing edge amplitude for the T=1, U0=1 profile."""
    t0 = time.perf_counter()
    sol = solve_profile(ProfileParams(T=1.0, U0=1.0))
    U, R, rho = sol.U.values, sol.R.values, sol.rho.values
    d2U = np.diff(U, 2)
    d2R = np.diff(R, 2)
    norm = float(np.trapezoid(rho, dx=sol.grid.spacing))
    details = {
        "L_m": sol.L_m,
        "min_U_interior": float(U[1:-1].min()),
        "min_d2U": float(d2U.min()),
        "max_d2R": float(d2R.max()),
        "norm_error": abs(norm - 1.0),
        "edge_amplitude": float(max(abs(R[0]), abs(R[-1]))),
    }
    ok = (
        details["min_U_interior"] > 0.0
        and details["min_d2U"] >= 0.0
        and details["max_d2R"] <= 0.0
        and details["norm_error"] <= 1e-8
        and details["edge_amplitude"] <= 1e-10
    )
    res = _result("profile-shape", ok, t0, details)
    res.passed = res.passed and res.runtime_s < 1.0
    return res


def check_form_equivalence(seed: int = 42) -> CriterionResult:
    """Scaled-amplitude route vs blow-up-capped direct potential
    integration, relative 1e-6 wherever U < 10*U0."""
    t0 = time.perf_counter()
    worst = 0.0
    per_case = {}
    for T in (0.1, 1.0, 5.0):
        for U0 in (0.5, 1.0, 2.0):
            params = ProfileParams(T=T, U0=U0)
            w_dense, L_m = integrate_amplitude(params)
            dense_U, q_end = integrate_potential_direct(params)
            qs = np.linspace(0.0, q_end, 2000, endpoint=False)
            U_direct = dense_U(qs)
            sel = U_direct < 10.0 * U0
            w = np.maximum(w_dense(qs[sel]), 1e-300)
            U_w = U0 - 2.0 * T * np.log(w)
            rel = float(np.abs((U_w - U_direct[sel]) / U_direct[sel]).max())
            per_case[f"T={T},U0={U0}"] = rel
            worst = max(worst, rel)
    res = _result(
        "form-equivalence",
        worst <= 1e-6,
        t0,
        {"max_rel_difference": worst, "per_case": per_case},
    )
    res.passed = res.passed and res.runtime_s < 10.0
    return res


def check_sweep_trends(seed: int = 42) -> CriterionResult:
    """Monotone support shrinkage and average-potential growth across a
    log-spaced T sweep, plus the small-T support target."""
    t0 = time.perf_counter()
    T_values = np.geomspace(0.05, 10.0, 20)
    records = sweep_temperature(T_values, U0=1.0)
    L = [r.L_m for r in records]
    U = [r.U_bar for r in records]
    L_dec = all(a > b for a, b in zip(L, L[1:]))
    U_inc = all(a < b for a, b in zip(U, U[1:]))
    rel_to_box = abs(L[0] - L0_REFERENCE) / L0_REFERENCE
    details = {
        "L_m_strictly_decreasing": L_dec,
        "U_bar_strictly_increasing": U_inc,
        "L_m_at_T_min": L[0],
        "box_half_length": L0_REFERENCE,
        "rel_deviation_at_T_min": rel_to_box,
    }
    res = _result(
        "sweep-trends", L_dec and U_inc and rel_to_box <= 0.02, t0, details
    )
    res.passed = res.passed and res.runtime_s < 30.0
    return res


def check_zero_t_convergence(seed: int = 42) -> CriterionResult:
    """Profile density converges monotonically to the box-limit cosine
    density as T decreases at fixed U0 = 1."""
    t0 = time.perf_counter()
    lim = zero_t_from_ubar(1.0)
    errs = []
    for T in (0.5, 0.2, 0.1, 0.05):
        sol = solve_profile(ProfileParams(T=T, U0=1.0))
        q = sol.grid.points
        rho0 = np.where(
            np.abs(q) <= lim.L0, (lim.A0 * np.cos(lim.k0 * q)) ** 2, 0.0
        )
        errs.append(float(np.abs(sol.rho.values - rho0).max()))
    mono = all(a > b for a, b in zip(errs, errs[1:]))
    res = _result(
        "zero-t-convergence",
        mono,
        t0,
        {"T_values": [0.5, 0.2, 0.1, 0.05], "max_abs_errors": errs},
    )
    res.passed = res.passed and res.runtime_s < 10.0
    return res


def check_closed_form_observables(seed: int = 42) -> CriterionResult:
    """Energy, momentum, kinetic-momentum relation and cross-term
    cancellation for the unit-depth packet at v_c = 2."""
    t0 = time.perf_counter()
    packet = MovingPacket(zero_t_from_ubar(1.0), 2.0)
    psi = packet.sample(packet.support_grid(0.0, 32769))
    dec = energy_decomposition(psi)
    p = momentum_complex(psi)
    details = {
        "E_total": dec.total,
        "E_error": abs(dec.total - 3.0),
        "U_bar": dec.u_bar,
        "K_bar": dec.k_bar,
        "p_avg": p.real,
        "p_error": abs(p.real - 2.0),
        "p_imag": abs(p.imag),
        "K_vs_p2_over_2": abs(dec.k_bar - p.real**2 / 2.0),
        "cross_magnitude": dec.cross_magnitude,
    }
    ok = (
        details["E_error"] <= 1e-8
        and details["p_error"] <= 1e-8
        and details["K_vs_p2_over_2"] <= 1e-10
        and details["cross_magnitude"] <= 1e-8
    )
    res = _result("closed-form-observables", ok, t0, details)
    res.passed = res.passed and res.runtime_s < 1.0
    return res


def check_residual_convergence(seed: int = 42) -> CriterionResult:
    """Interior residual of the analytic packet against the free
    evolution equation shrinks at second order under grid halving."""
    t0 = time.perf_counter()
    packet = MovingPacket(zero_t_from_ubar(1.0), 2.0)
    lo, hi = packet.support(0.0)
    maxima = []
    for n in (2049, 4097, 8193):
        grid = SpatialGrid(lo - 0.5, hi + 0.5, n)
        res_field = schrodinger_residual(packet, grid, t=0.0, accuracy=2)
        mask = support_interior_mask(grid, lo, hi, 5)
        maxima.append(float(res_field.values[mask].max()))
    ratios = [a / b for a, b in zip(maxima, maxima[1:])]
    res = _result(
        "residual-convergence",
        all(r >= 3.5 for r in ratios),
        t0,
        {"max_interior_residuals": maxima, "halving_ratios": ratios},
    )
    res.passed = res.passed and res.runtime_s < 5.0
    return res


def check_transport(seed: int = 42) -> CriterionResult:
    """Evolved packet at v_c = 2: norm conservation, shape-report
    capture, and peak tracking against q = v_c t.

    The peak clause fails for physical reasons: on the full line the
    truncated-cosine packet is a superposition of plane waves at p - k0
    and p + k0 whose envelopes separate at group-velocity difference
    2 k0, so the density develops ripples and bifurcates instead of
    translating rigidly. Two independent schemes (Crank-Nicolson and
    split-step Fourier) agree on this deformation to 5e-4, so it is not
    an artifact of the stepper. The shape error is therefore reported,
    and the peak offsets recorded here measure the physical deformation.
    """
    t0 = time.perf_counter()
    packet = MovingPacket(zero_t_from_ubar(1.0), 2.0)
    L0 = packet.limit.L0
    t_final = L0 / packet.v_c
    grid = SpatialGrid(-3.0, 3.6, 8192)
    config = EvolutionConfig(
        embedding_grid=grid,
        dt=1e-4,
        t_final=t_final,
        snapshot_stride=1000,
        reference=packet,
    )
    out = evolve(packet.sample(grid, 0.0), config)
    h = grid.spacing
    peak_offsets = []
    for t, snap in zip(out.times, out.snapshots):
        rho = RealField(grid, np.abs(snap.values) ** 2)
        peak_offsets.append(abs(density_peak(rho) - packet.v_c * t))
    norm_ok = float(out.report.norm_drifts.max()) <= 1e-10
    peaks_ok = all(off <= h for off in peak_offsets)
    shape_reported = out.report.shape_errors is not None and not out.report.truncated
    details = {
        "norm_drift_max": float(out.report.norm_drifts.max()),
        "peak_offsets_in_spacings": [off / h for off in peak_offsets],
        "peak_within_one_spacing": peaks_ok,
        "shape_errors": [float(e) for e in out.report.shape_errors],
        "interior_fraction": out.report.interior_fraction,
        "grid_spacing": h,
    }
    notes = "" if peaks_ok else (
        "peak tracking fails physically: free full-line evolution splits "
        "the kinked packet into p-k0 / p+k0 lobes (verified against an "
        "independent split-step integrator); shape deviation is measured, "
        "not asserted"
    )
    res = _result(
        "transport", norm_ok and peaks_ok and shape_reported, t0, details, notes
    )
    res.passed = res.passed and res.runtime_s < 60.0
    return res


def check_spreading_oracle(seed: int = 42) -> CriterionResult:
    """Free Gaussian control packet spreads per the closed-form width law
    within 1%, validating the stepper independently."""
    t0 = time.perf_counter()
    sigma0 = 0.5
    t_final = L0_REFERENCE / 2.0
    grid = SpatialGrid(-8.0, 8.0, 8192)
    config = EvolutionConfig(
        embedding_grid=grid, dt=1e-4, t_final=t_final, snapshot_stride=1000
    )
    out = evolve(gaussian_packet(grid, sigma0), config)
    rels = []
    for t, snap in zip(out.times, out.snapshots):
        w = density_width(RealField(grid, np.abs(snap.values) ** 2))
        w_ref = sigma0 * math.sqrt(1.0 + (t / (2.0 * sigma0**2)) ** 2)
        rels.append(abs(w - w_ref) / w_ref)
    details = {
        "max_rel_width_error": max(rels),
        "final_width_rel_error": rels[-1],
        "norm_drift_max": float(out.report.norm_drifts.max()),
    }
    res = _result("spreading-oracle", max(rels) <= 0.01, t0, details)
    res.passed = res.passed and res.runtime_s < 60.0
    return res


def check_entropy_stationarity(seed: int = 42) -> CriterionResult:
    """Constrained random perturbations never raise the profile entropy,
    and the first-variation estimate shrinks ~4x when eps halves."""
    t0 = time.perf_counter()
    sol = solve_profile(ProfileParams(T=1.0, U0=1.0))
    rep = maxent_stationarity_check(
        sol, n_perturbations=50, epsilon=1e-3, seed=seed
    )
    ratios = rep.first_order_ratios
    median_ratio = float(np.median(ratios)) if ratios.size else math.nan
    details = {
        "max_entropy_increase": rep.max_entropy_increase,
        "median_first_order_ratio": median_ratio,
        "n_perturbations": len(rep.entropy_diffs),
    }
    ok = (
        rep.max_entropy_increase <= 1e-10
        and ratios.size > 0
        and 3.0 <= median_ratio <= 5.0
    )
    res = _result("entropy-stationarity", ok, t0, details)
    res.passed = res.passed and res.runtime_s < 10.0
    return res


def check_serialization_determinism(seed: int = 42) -> CriterionResult:
    """Identical config + seed produce byte-identical artifacts for every
    data command."""
    from .cli import RunConfig, execute

    t0 = time.perf_counter()
    configs = [
        RunConfig(command="solve", T=1.0, u0=1.0, points=513, seed=seed),
        RunConfig(command="sweep", u0=1.0, t_list="0.5:2:log:3", points=513, seed=seed),
        RunConfig(command="zerot", ubar0=1.0, points=513, seed=seed),
        RunConfig(
            command="evolve",
            ubar0=1.0,
            vc=2.0,
            t_final=0.02,
            dt=1e-3,
            points=1024,
            stride=10,
            seed=seed,
        ),
    ]
    mismatches = []
    for cfg in configs:
        dirs = [Path(tempfile.mkdtemp(prefix="selftrap-det-")) for _ in range(2)]
        try:
            for d in dirs:
                execute(cfg.replace(output_dir=str(d)))
            names = sorted(p.name for p in dirs[0].iterdir())
            names_b = sorted(p.name for p in dirs[1].iterdir())
            if names != names_b:
                mismatches.append(f"{cfg.command}: file sets differ")
                continue
            for name in names:
                if not filecmp.cmp(dirs[0] / name, dirs[1] / name, shallow=False):
                    mismatches.append(f"{cfg.command}/{name}")
        finally:
            for d in dirs:
                shutil.rmtree(d, ignore_errors=True)
    res = _result(
        "serialization-determinism",
        not mismatches,
        t0,
        {"mismatched_outputs": mismatches},
    )
    return res


ALL_CRITERIA = [
    ("profile-shape", check_profile_shape),
    ("form-equivalence", check_form_equivalence),
    ("sweep-trends", check_sweep_trends),
    ("zero-t-convergence", check_zero_t_convergence),
    ("closed-form-observables", check_closed_form_observables),
    ("residual-convergence", check_residual_convergence),
    ("transport", check_transport),
    ("spreading-oracle", check_spreading_oracle),
    ("entropy-stationarity", check_entropy_stationarity),
    ("serialization-determinism", check_serialization_determinism),
]


def run_all(seed: int = 42) -> list[CriterionResult]:
    return [func(seed=seed) for _, func in ALL_CRITERIA]
