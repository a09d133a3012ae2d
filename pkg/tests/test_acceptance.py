"""Acceptance criteria 1-8 at their stated tolerances.

Each test prints one ``PASS``/``FAIL`` line and the lines are repeated in
the pytest terminal summary.  Criteria 5 and 7 depend on a nonzero
projected holonomy, which the fixed-mixing-angle frame cannot produce; they
are expected to report FAIL (analysis in the README).
"""

import math
import time

import numpy as np
import pytest

from conftest import record_verdict
from lambda_holonomy.experiments import (
    AGREEMENT_TOL,
    MIN_MAX_PD,
    REFERENCE_MAX_PD,
    ExperimentConfig,
    alpha_scan,
    rows_to_csv,
    scan_gate,
)
from lambda_holonomy.holonomy import CircleLoop, LissajousLoop, discretize, loop_commutator_norm, wilson_loop
from lambda_holonomy.lambda_gauge import (
    AbelianTestConnection,
    FrameConnection,
    LambdaParams,
    LargeDetuningConnection,
    MagneticField,
    curvature,
    frame_matrix,
    gamma_angle,
    reconstruct_hamiltonian,
    sphere_flux,
    spinhalf_curvature,
    spinhalf_curvature_fd,
)
from lambda_holonomy.numerics import dagger, frobenius, unitarity_residual

DEFAULT = ExperimentConfig()
GAMMA = gamma_angle(DEFAULT.params)


@pytest.fixture(scope="module")
def default_scan():
    start = time.perf_counter()
    rows = alpha_scan(DEFAULT)
    return rows, time.perf_counter() - start


def test_criterion_1_frame_validity():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    n = 10_000
    theta = rng.uniform(0, math.pi / 2, n)
    phi = rng.uniform(0, 2 * math.pi, n)
    gamma = rng.uniform(0, math.pi / 4, n)
    frames = frame_matrix(theta, phi, gamma)
    unit = float(np.max(unitarity_residual(frames)))
    params = [LambdaParams(d, w) for d, w in zip(rng.uniform(0, 2000, 50), rng.uniform(0.1, 5, 50))]
    off = 0.0
    for p in params:
        t, f = rng.uniform(0, math.pi / 2, 200), rng.uniform(0, 2 * math.pi, 200)
        g = frame_matrix(t, f, gamma_angle(p))
        d = dagger(g) @ reconstruct_hamiltonian(p, t, f) @ g
        off = max(off, float(np.max(np.abs(d - np.einsum("...ii->...i", d)[..., None] * np.eye(3)))))
    elapsed = time.perf_counter() - start
    ok = unit <= 1e-13 and off <= 1e-12 and elapsed < 1.0
    record_verdict("1", ok, f"unitarity {unit:.2e} (<=1e-13), off-diagonal {off:.2e} (<=1e-12), "
                            f"{elapsed:.2f} s (<1 s)")
    assert ok


def test_criterion_2_vanishing_curvature():
    start = time.perf_counter()
    theta, phi = np.meshgrid(np.linspace(0, math.pi / 2, 100), np.linspace(0, 2 * math.pi, 100),
                             indexing="ij")
    sup = float(np.max(frobenius(curvature(LargeDetuningConnection(), theta, phi))))
    elapsed = time.perf_counter() - start
    ok = sup <= 1e-9 and elapsed < 5.0
    record_verdict("2", ok, f"sup |F| = {sup:.2e} (<=1e-9), {elapsed:.2f} s (<5 s)")
    assert ok


def test_criterion_3_abelian_benchmark():
    start = time.perf_counter()
    errors = []
    for theta0 in (math.pi / 6, math.pi / 4, math.pi / 3):
        u = wilson_loop(discretize(CircleLoop(theta0), 100_000), AbelianTestConnection(),
                        estimate_error=False).matrix
        expected = math.pi * (1 - math.cos(2 * theta0))
        for phase in np.angle(np.diag(u)):
            errors.append(min(abs(math.remainder(s * phase - expected, 2 * math.pi)) for s in (1, -1)))
    # Order measured on a loop where the midpoint rule is not exact: the
    # diagonal connection is constant along any theta circle.
    spec = LissajousLoop(0.8, 0.3)
    ref = wilson_loop(discretize(spec, 400_000), AbelianTestConnection(), estimate_error=False).matrix
    ns = [250, 2500, 25_000]
    errs = [frobenius(wilson_loop(discretize(spec, n), AbelianTestConnection(),
                                  estimate_error=False).matrix - ref) for n in ns]
    slope = -np.polyfit(np.log(ns), np.log(errs), 1)[0]
    elapsed = time.perf_counter() - start
    ok = max(errors) <= 1e-6 and abs(slope - 2) <= 0.2 and elapsed < 10.0
    record_verdict("3", ok, f"max phase error {max(errors):.2e} (<=1e-6), order {slope:.3f} (2+-0.2), "
                            f"{elapsed:.2f} s (<10 s)")
    assert ok


def test_criterion_4_monopole():
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    worst = 0.0
    count = 0
    while count < 100:
        b = rng.normal(size=3)
        if abs(b[2]) > 0.8 * np.linalg.norm(b):
            continue
        count += 1
        for branch in ("+", "-"):
            field = MagneticField(*b)
            closed = spinhalf_curvature(field, branch)
            fd = spinhalf_curvature_fd(field, branch)
            worst = max(worst, float(np.abs(fd - closed).max() / np.abs(closed).max()))
    flux = sphere_flux("-")
    flux_err = abs(flux - 2 * math.pi) / (2 * math.pi)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and flux_err <= 5e-3 and elapsed < 10.0
    record_verdict("4", ok, f"curl rel diff {worst:.2e} (<=1e-6), flux {flux:.5f} "
                            f"rel err {flux_err:.1e} (<=5e-3), {elapsed:.2f} s (<10 s)")
    assert ok


def test_criterion_5_pure_gauge_identity():
    loops = [CircleLoop(0.3), CircleLoop(math.pi / 2), DEFAULT.loop1, DEFAULT.loop2,
             LissajousLoop(1.0, 0.0), LissajousLoop(0.35, 0.8, phase_offset=1.0)]
    full = FrameConnection(GAMMA)
    dev = max(float(frobenius(wilson_loop(discretize(s, 10_000), full, projected=False,
                                          estimate_error=False).matrix - np.eye(3))) for s in loops)
    h1, h2 = (wilson_loop(discretize(s, DEFAULT.wilson_steps), full) for s in (DEFAULT.loop1, DEFAULT.loop2))
    comm = loop_commutator_norm(h1, h2)
    ok = dev <= 1e-6 and comm > 0.1
    record_verdict("5", ok, f"unprojected |U - I| = {dev:.2e} (<=1e-6), "
                            f"projected commutator {comm:.2e} (>0.1)")
    assert ok


def test_criterion_6_two_method_equivalence(default_scan):
    rows, elapsed = default_scan
    gate = scan_gate(rows)
    ok = gate.agreement_ok and elapsed < 300.0
    record_verdict("6", ok, f"max |pd_hol - pd_tdse| = {gate.max_abs_diff:.2e} (<={AGREEMENT_TOL}), "
                            f"norm drift {gate.max_norm_drift:.2e} (<=1e-8), leakage "
                            f"{gate.max_leakage:.2e} (<=0.01), {elapsed:.0f} s (<300 s)")
    assert ok


def test_criterion_7_non_abelian_magnitude(default_scan):
    rows, _ = default_scan
    gate = scan_gate(rows)
    record_verdict("7", gate.magnitude_ok,
                   f"max P_d = {gate.max_pd_holonomy:.3e} (>={MIN_MAX_PD}); "
                   f"reference maximum ~{REFERENCE_MAX_PD:.2f}")
    assert gate.magnitude_ok


def test_criterion_8_determinism(default_scan):
    rows, _ = default_scan
    first = rows_to_csv(rows).encode()
    again = rows_to_csv(alpha_scan(ExperimentConfig(seed=DEFAULT.seed, workers=4))).encode()
    ok = first == again
    record_verdict("8", ok, f"byte-identical CSV over two runs ({len(first)} bytes)")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
