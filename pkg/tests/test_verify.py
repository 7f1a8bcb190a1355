"""Tests for the verification checks and the common-period arithmetic."""

from fractions import Fraction

import numpy as np
import pytest

from sectionlab import (
    GluedMetric,
    IdentityDiffeo,
    NonPositiveRadius,
    VerificationReport,
    all_or_none_check,
    leaf_equidistance_check,
    radial_geodesic_check,
    rational_closure,
    run_all_checks,
    semicircle_bump,
)
from sectionlab.verify import CheckResult, gluing_check, leaf_equidistance_cross_check

from oracles import lcm_brute

RNG = np.random.default_rng(5)


def default_metric():
    return GluedMetric(semicircle_bump(0.3))


# --- individual checks ---------------------------------------------------------


def test_all_or_none_small_run_passes():
    res = all_or_none_check(default_metric(), n_geodesics=12, s_max=4.0, seed=3)
    assert res.passed
    assert res.residual == 0.0
    assert res.params["seed"] == 3


def test_all_or_none_flat_disk():
    res = all_or_none_check(GluedMetric(IdentityDiffeo()), n_geodesics=8, s_max=3.0, seed=1)
    assert res.passed


def test_radial_geodesic_check_passes():
    res = radial_geodesic_check(default_metric(), n_samples=12, s_max=6.0)
    assert res.passed
    assert res.residual < 1e-8


def test_leaf_equidistance():
    res = leaf_equidistance_check(default_metric(), t_a=0.2, t_b=0.7, n_theta=16)
    assert res.passed and res.residual < 1e-12


def test_leaf_equidistance_random_pairs():
    m = default_metric()
    for _ in range(5):
        a, b = sorted(RNG.uniform(0.05, 1.0, 2))
        if b - a < 0.05:
            continue
        res = leaf_equidistance_check(m, t_a=float(a), t_b=float(b), n_theta=8)
        assert res.passed


def test_leaf_equidistance_cross_seam():
    res = leaf_equidistance_cross_check(default_metric(), 0.9, 0.9, n_theta=16)
    assert res.passed
    # 0.1 on each side of the seam
    assert res.params["t_chart1"] == 0.9


def test_gluing_check_pass_and_tampered_fail():
    assert gluing_check(default_metric()).passed
    tampered = GluedMetric(semicircle_bump(0.3), psi1_scale=1.01)
    res = gluing_check(tampered)
    assert not res.passed
    assert res.residual > 1e-3


def test_run_all_checks_report():
    report = run_all_checks(default_metric(), seed=0, n_geodesics=6, s_max=3.0)
    assert report.all_passed
    names = [c.name for c in report.checks]
    assert names == [
        "gluing_compatibility",
        "all_or_none",
        "radial_geodesics",
        "leaf_equidistance",
        "leaf_equidistance_cross",
    ]
    text = report.summary_text()
    assert "PASS" in text and "FAIL" not in text
    csv_text = report.to_csv_text(["x = 1"])
    assert csv_text.splitlines()[1] == "check,passed,residual"


def test_report_rejects_duplicate_names():
    report = VerificationReport()
    entry = CheckResult("x", True, 0.0, {})
    report.add(entry)
    with pytest.raises(ValueError):
        report.add(entry)


# --- rational closure ------------------------------------------------------------


def test_rational_closure_trivial():
    assert rational_closure(1, 1) == Fraction(1)


def test_rational_closure_integers():
    assert rational_closure(2, 3) == Fraction(6)
    assert rational_closure(2, 3) == lcm_brute(2, 3)


def test_rational_closure_fractions():
    assert rational_closure(Fraction(1, 2), Fraction(1, 3)) == Fraction(1)
    assert rational_closure((1, 2), (1, 3)) == Fraction(1)
    assert rational_closure(Fraction(3, 4), Fraction(5, 6)) == Fraction(15, 2)


def test_rational_closure_symmetric():
    for _ in range(50):
        p1, q1, p2, q2 = (int(x) for x in RNG.integers(1, 40, 4))
        r, s = Fraction(p1, q1), Fraction(p2, q2)
        assert rational_closure(r, s) == rational_closure(s, r)


def test_rational_closure_scaling():
    for _ in range(50):
        p1, q1, p2, q2, pc, qc = (int(x) for x in RNG.integers(1, 30, 6))
        r, s, c = Fraction(p1, q1), Fraction(p2, q2), Fraction(pc, qc)
        assert rational_closure(c * r, c * s) == c * rational_closure(r, s)


def test_rational_closure_divides_products():
    # the returned value is a common multiple, and the least one
    for _ in range(50):
        p1, q1, p2, q2 = (int(x) for x in RNG.integers(1, 25, 4))
        r, s = Fraction(p1, q1), Fraction(p2, q2)
        ell = rational_closure(r, s)
        assert (ell / r).denominator == 1
        assert (ell / s).denominator == 1
        for div in (2, 3, 5):
            smaller = ell / div
            assert (smaller / r).denominator != 1 or (smaller / s).denominator != 1


def test_rational_closure_irrational_flag():
    assert rational_closure(1, 1, irrational_ratio=True) is None


def test_rational_closure_rejects_nonpositive():
    with pytest.raises(NonPositiveRadius):
        rational_closure(0, 1)
    with pytest.raises(NonPositiveRadius):
        rational_closure(2, Fraction(-1, 3))
