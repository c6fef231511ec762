"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and when the module is run directly.
"""
import subprocess
import sys
import time

import numpy as np
import pytest

from mclab.arveson import a_infinity, classify, truncated_multishift, rho
from mclab.suites import run_suite

RESULTS = []


def record(number, title, checks):
    """``checks``: list of (label, value, bound) with pass meaning value <= bound."""
    ok = all(v <= b for _, v, b in checks)
    detail = "; ".join(f"{label} {v:.2e} <= {b:g}" for label, v, b in checks)
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def suite_check(name, trials=None, seed=0, expect_trials=None):
    rep = run_suite(name, trials=trials, seed=seed)
    if expect_trials is not None:
        assert rep.trials == expect_trials, f"{name}: {rep.trials} trials accepted, expected {expect_trials}"
    return (name, rep.maxResidual, rep.tolerance)


def test_criterion_01_defect_identities():
    record(1, "defect identities of the fractional transform (200 pairs)",
           [suite_check("defect-identities", 200, expect_trials=200)])


def test_criterion_02_sign_symmetry():
    record(2, "sign symmetry Psi_{-A}(-W) = -Psi_A(W) (100 pairs)",
           [suite_check("sign-symmetry", 100, expect_trials=100)])


def test_criterion_03_composition_intertwining():
    rep = run_suite("composition-intertwining", trials=220)
    # every planted violation must be detected (a missed one reports an infinite residual)
    assert rep.trials == 200 and rep.skipped == 20
    record(3, "composition intertwining (200 accepted triples, 20 planted violations skipped)",
           [("composition-intertwining", rep.maxResidual, rep.tolerance)])


def test_criterion_04_ball_automorphism():
    record(4, "phi_lambda as fractional transform, sphere to sphere, involution",
           [suite_check("ball-fractional-form", 500), suite_check("ball-sphere", 100),
            suite_check("ball-involution", 500)])


def test_criterion_05_automorphism_coincidence():
    record(5, "theta of phi_lambda(T) coincides with theta_T o phi_lambda; Omega, Omega_* unitary",
           [suite_check("automorphism-charfn", 100), suite_check("automorphism-unitaries", 100)])


def test_criterion_06_unitary_coincidence():
    record(6, "rho and theta under T (1 (x) omega) (100 pairs, 20 Hermitian X each)",
           [suite_check("unitary-rho", 100), suite_check("unitary-charfn", 100)])


def test_criterion_07_truncated_identities():
    # oracles first: both-sides recomputation and the degree-2N compression gap
    record(7, "truncated identities L L* + rho^{N+1}(I) = I (N<=6) and L* L + M M* = I (N<=5)",
           [suite_check("partial-sum-oracle"), suite_check("partial-sum-identity"),
            suite_check("multiplier-exactness"), suite_check("multiplier-identity", 100)])


def test_criterion_08_spectrum_charfn():
    rep = run_suite("spectrum-charfn", trials=100)
    assert rep.trials >= 90, "too many instances fell inside the ambiguity band"
    record(8, f"right spectrum vs non-surjective theta_T(lambda) ({rep.trials} planted instances, "
              f"{rep.skipped} ambiguous)", [("disagreements", rep.maxResidual, 0)])


def test_criterion_09_class_preservation():
    rep = run_suite("class-preservation", trials=100)
    assert rep.trials >= 95
    record(9, "pure/C1/c.n.c. flags preserved by automorphisms; A_inf eigenspace angles",
           [("flag disagreements", rep.maxResidual, 0), suite_check("kernel-invariance", 50)])


def test_criterion_10_model_space():
    record(10, "functional model of 50 nilpotent pure tuples: unitarity, intertwining, word traces",
           [suite_check("model-space", 50), suite_check("model-word-traces", 50)])


def test_criterion_11_spherical_preservation():
    record(11, "phi_lambda(Z) spherical for 50 diagonal spherical tuples",
           [suite_check("spherical-preservation", 50)])


def test_criterion_12_multishift():
    worst, steps_off = 0.0, 0
    for n in (1, 2, 3):
        for N in range(0, 5):
            S = truncated_multishift(n, N)
            P0 = np.zeros((S.dim, S.dim))
            P0[0, 0] = 1
            worst = max(worst, np.linalg.norm(np.eye(S.dim) - rho(S, np.eye(S.dim)) - P0, 2))
            rep = classify(S)
            steps_off += (rep.isPure is not True) + (a_infinity(S).zeroStep != N + 1)
    record(12, "truncated multishift: I - SS* = P_0, pure, A_inf iteration vanishes at step N+1",
           [("I - SS* - P_0", worst, 1e-14), ("impure or wrong zero step", steps_off, 0)])


def _verify_all():
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "mclab.cli", "verify", "--suite", "all", "--no-timing"],
                          capture_output=True)
    return proc, time.perf_counter() - start


def test_criterion_13_end_to_end():
    first, elapsed = _verify_all()
    second, _ = _verify_all()
    record(13, f"verify --suite all: exit {first.returncode}, {len(first.stdout.splitlines())} reports, "
               f"{elapsed:.1f} s, reproducible={first.stdout == second.stdout}",
           [("exit code", first.returncode, 0), ("seconds", elapsed, 300),
            ("byte differences between runs", float(first.stdout != second.stdout), 0)])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
