"""Numerical certification of the foliation properties of the glued metric.

The defining property checked here is the all-or-none law: a geodesic is
orthogonal to the concentric leaves at either all or none of its points.  In
the (t, theta) chart a geodesic meets a leaf orthogonally exactly where
vtheta = 0, and uniqueness of geodesics forces any such point onto a radial
curve, so the coordinate-level statement is that sign(vtheta) is constant
along every non-radial geodesic and vtheta vanishes identically along radial
ones.

The module also provides the exact common-period arithmetic for two circular
motions with rational circumference ratio (and the `never closes` answer for
an irrational ratio).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circle import TWO_PI, circle_distance
from .geodesics import (
    GeodesicState,
    _rhs,
    integrate,
    integrate_ensemble,
    unit_speed_state,
)
from .metric import GluedMetric


class NonPositiveRadius(ValueError):
    """Common-period arithmetic requires strictly positive radii."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    params: dict
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    def add(self, check: CheckResult) -> None:
        if any(c.name == check.name for c in self.checks):
            raise ValueError(f"duplicate check name {check.name!r}")
        self.checks.append(check)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_csv_text(self, header_lines=()) -> str:
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["check", "passed", "residual"])
        for c in self.checks:
            writer.writerow([c.name, int(c.passed), repr(c.residual)])
        return buf.getvalue()

    def summary_text(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"{status}  {c.name:<26s} residual={c.residual:.3e}  {c.detail}")
        return "\n".join(lines)


def _sample_nonradial_states(
    metric: GluedMetric, n: int, rng: np.random.Generator
) -> list[GeodesicState]:
    """Random unit-speed clearly-non-radial states.

    The direction is resampled until both the coordinate angular velocity
    |vtheta| and the metric angular speed phi*|vtheta| are at least 0.1,
    which keeps the angular-momentum barrier well above the center guard.
    """
    states = []
    while len(states) < n:
        chart = int(rng.integers(1, 3))
        t = float(rng.uniform(0.3, 0.9))
        theta = float(rng.uniform(0.0, TWO_PI))
        phi = metric.warp(chart, t, theta)
        chi = float(rng.uniform(0.0, TWO_PI))
        if abs(math.sin(chi)) < 0.1 * max(1.0, phi):
            continue
        states.append(unit_speed_state(metric, chart, t, theta, chi))
    return states


def all_or_none_check(
    metric: GluedMetric,
    n_geodesics: int = 100,
    s_max: float = 20.0,
    ds: float = 1e-3,
    seed: int = 0,
) -> CheckResult:
    """Sign of vtheta never changes along non-radial geodesics.

    Integrates n_geodesics random non-radial unit-speed states (coordinate
    angular velocity at least 0.1 in magnitude) to s_max and counts sign
    changes of vtheta across every step and chart transition.  The rim
    transition multiplies vtheta by a positive factor, so a flip could only
    come from the flow itself; zero flips is the coordinate-level
    all-or-none statement.
    """
    rng = np.random.default_rng(seed)
    states = _sample_nonradial_states(metric, n_geodesics, rng)
    params = {"n_geodesics": n_geodesics, "s_max": s_max, "ds": ds, "seed": seed}
    try:
        result = integrate_ensemble(metric, states, ds=ds, s_max=s_max)
    except Exception as exc:  # guard trips are report entries, not crashes
        return CheckResult(
            name="all_or_none",
            passed=False,
            residual=math.inf,
            params=params,
            detail=f"integration aborted: {exc}",
        )
    flips = int(np.sum(result.sign_flips))
    min_abs = float(np.min(result.min_abs_vtheta))
    return CheckResult(
        name="all_or_none",
        passed=flips == 0,
        residual=float(flips),
        params=params,
        detail=f"sign flips={flips}, min |vtheta| along runs={min_abs:.3e}",
    )


def radial_geodesic_check(
    metric: GluedMetric,
    n_samples: int = 36,
    s_max: float = 6.0,
    ds: float = 1e-3,
) -> CheckResult:
    """Radial curves are geodesics and stay orthogonal to every leaf.

    The geodesic equation for a radial state reduces to t'' = 0 because every
    symbol sourcing radial or angular acceleration carries a factor of
    vtheta; this reduction is asserted exactly on the right-hand side, then
    confirmed by integration: theta must not drift between events while each
    trajectory runs through several chart transitions.
    """
    worst_drift = 0.0
    min_crossings = math.inf
    worst_rhs = 0.0
    for i in range(n_samples):
        theta = TWO_PI * i / n_samples
        for chart, t_probe in ((1, 0.5), (2, 0.5), (1, 0.9)):
            rhs = _rhs(metric, chart, t_probe, theta, 1.0, 0.0)
            worst_rhs = max(worst_rhs, abs(rhs[1]), abs(rhs[2]), abs(rhs[3]))
        traj = integrate(metric, GeodesicState(1, 0.5, theta, 1.0, 0.0), ds=ds, s_max=s_max)
        min_crossings = min(min_crossings, len(traj.crossings))
        events = sorted([c.s for c in traj.crossings] + [p.s for p in traj.center_passages])
        seg_start = traj.states[0].theta
        ev_idx = 0
        for st in traj.states[1:]:
            while ev_idx < len(events) and events[ev_idx] <= st.s:
                seg_start = st.theta
                ev_idx += 1
            worst_drift = max(worst_drift, circle_distance(st.theta, seg_start))
    passed = worst_drift < 1e-8 and worst_rhs == 0.0 and min_crossings >= 3
    return CheckResult(
        name="radial_geodesics",
        passed=bool(passed),
        residual=worst_drift,
        params={"n_samples": n_samples, "s_max": s_max, "ds": ds},
        detail=(
            f"max |dtheta| between events={worst_drift:.3e}, "
            f"min transitions={int(min_crossings)}, radial rhs residual={worst_rhs:.1e}"
        ),
    )


def leaf_equidistance_check(
    metric: GluedMetric,
    t_a: float = 0.2,
    t_b: float = 0.7,
    n_theta: int = 64,
    n_quad: int = 128,
) -> CheckResult:
    """Radial distance between two leaves is |t_b - t_a| at every angle.

    The radial metric coefficient is identically 1, so the radial arclength
    integral between the leaves must equal the coordinate gap; the quadrature
    here measures it the pedestrian way from queried metric components.
    """
    if not 0.0 < t_a < t_b <= 1.0:
        raise ValueError("need 0 < t_a < t_b <= 1")
    thetas = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    ts = np.linspace(t_a, t_b, n_quad)
    worst = 0.0
    for chart in (1, 2):
        for theta in thetas:
            g_tt = np.array(
                [metric.metric_components(chart, float(t), float(theta)).g_tt for t in ts]
            )
            dist = float(np.trapezoid(np.sqrt(g_tt), ts))
            worst = max(worst, abs(dist - (t_b - t_a)))
    return CheckResult(
        name="leaf_equidistance",
        passed=worst < 1e-12,
        residual=worst,
        params={"t_a": t_a, "t_b": t_b, "n_theta": n_theta, "n_quad": n_quad},
        detail=f"max |distance - (t_b - t_a)| = {worst:.3e}",
    )


def leaf_equidistance_cross_check(
    metric: GluedMetric,
    t_chart1: float = 0.9,
    u_chart2: float = 0.9,
    n_theta: int = 64,
    n_quad: int = 64,
) -> CheckResult:
    """Cross-seam distance along radial lines: (1 - t) plus (1 - u)."""
    expected = (1.0 - t_chart1) + (1.0 - u_chart2)
    thetas = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    worst = 0.0
    for theta in thetas:
        total = 0.0
        for chart, lo in ((1, t_chart1), (2, u_chart2)):
            ts = np.linspace(lo, 1.0, n_quad)
            th = float(theta) if chart == 1 else float(metric.f(theta))
            g_tt = np.array(
                [metric.metric_components(chart, float(t), th).g_tt for t in ts]
            )
            total += float(np.trapezoid(np.sqrt(g_tt), ts))
        worst = max(worst, abs(total - expected))
    return CheckResult(
        name="leaf_equidistance_cross",
        passed=worst < 1e-12,
        residual=worst,
        params={"t_chart1": t_chart1, "u_chart2": u_chart2, "n_theta": n_theta},
        detail=f"cross-seam radial distance defect = {worst:.3e}",
    )


def gluing_check(metric: GluedMetric, n_theta: int = 720, n_t: int = 64) -> CheckResult:
    residual = metric.gluing_residual(n_theta=n_theta, n_t=n_t)
    return CheckResult(
        name="gluing_compatibility",
        passed=residual < 1e-14,
        residual=residual,
        params={"n_theta": n_theta, "n_t": n_t},
        detail=f"max seam defect over plateau grid = {residual:.3e}",
    )


def run_all_checks(
    metric: GluedMetric,
    seed: int = 0,
    n_geodesics: int = 100,
    s_max: float = 20.0,
    ds: float = 1e-3,
) -> VerificationReport:
    """Run every metric-level check once; deterministic given the seed."""
    report = VerificationReport()
    report.add(gluing_check(metric))
    report.add(all_or_none_check(metric, n_geodesics=n_geodesics, s_max=s_max, ds=ds, seed=seed))
    report.add(radial_geodesic_check(metric, ds=ds))
    report.add(leaf_equidistance_check(metric))
    report.add(leaf_equidistance_cross_check(metric))
    return report


# ----------------------------------------------------------------------------
# common-period arithmetic


def _as_fraction(x) -> Fraction:
    if isinstance(x, tuple):
        return Fraction(x[0], x[1])
    return Fraction(x)


def rational_closure(r, s, irrational_ratio: bool = False) -> Fraction | None:
    """Least common period of two circular motions, in units of 2*pi.

    Two points moving at unit speed around circles of radii r and s return to
    their simultaneous start after arclength L = 2*pi * lcm(r, s), where the
    least common multiple of positive rationals p1/q1, p2/q2 is
    lcm(p1*q2, p2*q1) / (q1*q2), computed in exact integer arithmetic.  With
    the irrational-ratio flag there is no common multiple at all.

    Returns L / (2*pi) as an exact Fraction, or None for `never closes`.
    """
    if irrational_ratio:
        return None
    r = _as_fraction(r)
    s = _as_fraction(s)
    if r <= 0 or s <= 0:
        raise NonPositiveRadius(f"radii must be positive, got r={r}, s={s}")
    p1, q1 = r.numerator, r.denominator
    p2, q2 = s.numerator, s.denominator
    return Fraction(math.lcm(p1 * q2, p2 * q1), q1 * q2)
