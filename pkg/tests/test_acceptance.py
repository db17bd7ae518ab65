"""Acceptance suite: every verification criterion at its stated tolerance.

Each test prints one PASS/FAIL line. The transport criterion is split in
two: unitarity and shape reporting pass, while the peak-tracking clause
is asserted faithfully and fails for physical reasons (full-line free
evolution bifurcates the kinked compact-support packet into its p-k0 and
p+k0 components; the deformation is confirmed by two independent
integrators and is reported in the ShapeReport rather than suppressed).
"""

import pytest

from selftrap import verification as V

SEED = 42


def _report(name: str, result) -> None:
    status = "PASS" if result.passed else "FAIL"
    print(f"ACCEPTANCE {name}: {status} ({result.runtime_s:.2f}s)")
    for key, value in result.details.items():
        print(f"    {key}: {value}")


@pytest.fixture(scope="module")
def transport_result():
    return V.check_transport(seed=SEED)


def test_criterion_01_profile_shape():
    res = V.check_profile_shape(seed=SEED)
    _report("criterion-01 profile-shape", res)
    assert res.passed, res.details


def test_criterion_02_form_equivalence():
    res = V.check_form_equivalence(seed=SEED)
    _report("criterion-02 form-equivalence", res)
    assert res.passed, res.details


def test_criterion_03_sweep_trends():
    res = V.check_sweep_trends(seed=SEED)
    _report("criterion-03 sweep-trends", res)
    assert res.passed, res.details


def test_criterion_04_zero_t_convergence():
    res = V.check_zero_t_convergence(seed=SEED)
    _report("criterion-04 zero-t-convergence", res)
    assert res.passed, res.details


def test_criterion_05_closed_form_observables():
    res = V.check_closed_form_observables(seed=SEED)
    _report("criterion-05 closed-form-observables", res)
    assert res.passed, res.details


def test_criterion_06_residual_convergence():
    res = V.check_residual_convergence(seed=SEED)
    _report("criterion-06 residual-convergence", res)
    assert res.passed, res.details


def test_criterion_07_transport_norm_and_shape_report(transport_result):
    res = transport_result
    norm_ok = res.details["norm_drift_max"] <= 1e-10
    shape_ok = len(res.details["shape_errors"]) > 0
    status = "PASS" if (norm_ok and shape_ok) else "FAIL"
    print(
        f"ACCEPTANCE criterion-07 transport (norm + shape report): {status} "
        f"(norm_drift_max={res.details['norm_drift_max']:.3e}, "
        f"shape_error_final={res.details['shape_errors'][-1]:.3e}, "
        f"interior_fraction={res.details['interior_fraction']:.4f})"
    )
    assert norm_ok and shape_ok
    assert res.runtime_s < 60.0


def test_criterion_07_transport_peak_tracking(transport_result):
    res = transport_result
    offsets = res.details["peak_offsets_in_spacings"]
    status = "PASS" if res.details["peak_within_one_spacing"] else "FAIL"
    print(f"ACCEPTANCE criterion-07 transport (peak tracking): {status}")
    print(f"    peak offsets in grid spacings: {[f'{o:.1f}' for o in offsets]}")
    if res.notes:
        print(f"    note: {res.notes}")
    assert res.details["peak_within_one_spacing"], (
        "density peak strays from q = v_c t by up to "
        f"{max(offsets):.0f} grid spacings: the truncated-cosine packet is a "
        "superposition of plane waves at p-k0 and p+k0 whose envelopes "
        "separate at group-velocity difference 2*k0 under full-line free "
        "evolution, so rigid translation of the argmax is not physically "
        "attainable; the deformation is measured and reported in the "
        "ShapeReport (cross-checked against an independent split-step "
        "Fourier integrator)"
    )


def test_criterion_08_spreading_oracle():
    res = V.check_spreading_oracle(seed=SEED)
    _report("criterion-08 spreading-oracle", res)
    assert res.passed, res.details


def test_criterion_09_entropy_stationarity():
    res = V.check_entropy_stationarity(seed=SEED)
    _report("criterion-09 entropy-stationarity", res)
    assert res.passed, res.details


def test_criterion_10_serialization_determinism():
    res = V.check_serialization_determinism(seed=SEED)
    _report("criterion-10 serialization-determinism", res)
    assert res.passed, res.details
