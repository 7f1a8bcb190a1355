"""Section tracing: exact piecewise-radial itineraries and numerical geodesics.

A section through a disk center is piecewise radial: a radius leg out of the
starting center, then alternating full diameters of the two disks, with the
rim identification applied at every boundary crossing.  The exact tracer
walks this itinerary in closed form; the numerical integrator solves the
geodesic equation of the glued metric

    t'' = phi * phi_t * vtheta^2
    theta'' = -(2 phi_t / phi) vt vtheta - (phi_theta / phi) vtheta^2

with fixed-step fourth-order Runge-Kutta and two event types located by sign
change plus bisection: rim crossings at t = 1 and center passages at t = 0
(the latter admissible only for radial states; analytically a non-radial
geodesic never reaches the center).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle import CircleDiffeo, antipode, circle_distance, line_distance, normalize
from .dynamics import DEFAULT_K_MAX, DEFAULT_TOL, Period, TransitionMap
from .metric import GluedMetric

DEFAULT_DS = 1e-3
DEFAULT_S_MAX = 20.0
DEFAULT_RADIAL_TOL = 1e-9
DEFAULT_T_GUARD = 1e-6
# event bisection resolution in arclength, and iteration budget
_EVENT_S_TOL = 1e-12
_EVENT_MAX_ITER = 200
_MAX_EVENTS = 100000


class CenterSingularity(RuntimeError):
    """A non-radial state reached the center guard band (step size too large)."""


class EventBisectionFailure(RuntimeError):
    """Event location did not converge within the iteration budget."""


class HorizonTooShort(ValueError):
    """The traced legs do not cover the detected period (need 2k+1 legs)."""


class NotClosed(ValueError):
    """A comparison was requested for a section that did not close."""


@dataclass(frozen=True)
class GeodesicState:
    chart: int
    t: float
    theta: float
    vt: float
    vtheta: float
    s: float = 0.0


@dataclass(frozen=True)
class RimCrossing:
    s: float
    chart_from: int
    theta1: float  # chart-1 boundary angle
    theta2: float  # chart-2 boundary angle, the image under the rim map


@dataclass(frozen=True)
class CenterEvent:
    s: float
    chart: int
    theta_in: float  # boundary angle of the incoming ray
    direction: float  # angle of motion after the passage (antipode of theta_in)


@dataclass
class Trajectory:
    """Integration output: recorded states plus located events."""

    states: list[GeodesicState]
    crossings: list[RimCrossing] = field(default_factory=list)
    center_passages: list[CenterEvent] = field(default_factory=list)

    def __iter__(self):
        return iter(self.states)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def final(self) -> GeodesicState:
        return self.states[-1]

    def to_records_text(self, header_lines=()) -> str:
        """Line-delimited records: s, chart, t, theta, vt, vtheta."""
        lines = [f"# {line}" for line in header_lines]
        lines.append("s,chart,t,theta,vt,vtheta")
        for st in self.states:
            lines.append(
                f"{st.s!r},{st.chart},{st.t!r},{st.theta!r},{st.vt!r},{st.vtheta!r}"
            )
        return "\n".join(lines) + "\n"


def unit_speed_state(
    metric: GluedMetric, chart: int, t: float, theta: float, direction: float
) -> GeodesicState:
    """State of unit speed whose velocity makes angle `direction` with the
    radial direction in the orthonormal frame (so vt = cos, phi*vtheta = sin)."""
    phi = metric.warp(chart, t, theta)
    return GeodesicState(chart, t, theta, math.cos(direction), math.sin(direction) / phi)


def speed_error(metric: GluedMetric, st: GeodesicState) -> float:
    phi = metric.warp(st.chart, st.t, st.theta)
    return abs(st.vt * st.vt + (phi * st.vtheta) ** 2 - 1.0)


# ----------------------------------------------------------------------------
# scalar stepping


def _rhs(metric, chart, t, th, vt, vth):
    if vth == 0.0:
        return vt, 0.0, 0.0, 0.0
    phi, phi_t, phi_th = metric.warp_with_partials(chart, t, th)
    a = vth * vth
    return vt, vth, phi * phi_t * a, -(2.0 * phi_t / phi) * vt * vth - (phi_th / phi) * a


def _rk4(metric, chart, t, th, vt, vth, h):
    k1 = _rhs(metric, chart, t, th, vt, vth)
    k2 = _rhs(
        metric,
        chart,
        t + 0.5 * h * k1[0],
        th + 0.5 * h * k1[1],
        vt + 0.5 * h * k1[2],
        vth + 0.5 * h * k1[3],
    )
    k3 = _rhs(
        metric,
        chart,
        t + 0.5 * h * k2[0],
        th + 0.5 * h * k2[1],
        vt + 0.5 * h * k2[2],
        vth + 0.5 * h * k2[3],
    )
    k4 = _rhs(
        metric, chart, t + h * k3[0], th + h * k3[1], vt + h * k3[2], vth + h * k3[3]
    )
    c = h / 6.0
    return (
        t + c * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        th + c * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        vt + c * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        vth + c * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    )


def _cross_rim(metric, chart, th, vt, vth):
    """Chart transition at t = 1.

    Angles map through the rim identification; the radial velocity flips
    because the two chart radii point in opposite directions across the seam
    (collar coordinate u = 2 - t); the angular velocity follows the chain
    rule dtheta2 = F'(theta1) dtheta1, which is exactly what keeps the speed
    unchanged under the plateau compatibility rule.
    """
    f = metric.f
    if chart == 1:
        th1 = normalize(th)
        th2 = f(th1)
        return (2, th2, -vt, vth * f.derivative(th1)), (th1, th2)
    th2 = normalize(th)
    th1 = f.inverse(th2)
    return (1, th1, -vt, vth / f.derivative(th1)), (th1, th2)


def _locate_rim(metric, chart, t, th, vt, vth, h):
    """Bisect the step fraction to place t = 1 within 1e-12 of arclength."""
    lo, hi = 0.0, h
    state_hi = _rk4(metric, chart, t, th, vt, vth, h)
    iters = 0
    while hi - lo > _EVENT_S_TOL:
        iters += 1
        if iters > _EVENT_MAX_ITER:
            raise EventBisectionFailure(
                f"rim crossing not localized after {_EVENT_MAX_ITER} bisections"
            )
        mid = 0.5 * (lo + hi)
        cand = _rk4(metric, chart, t, th, vt, vth, mid)
        if cand[0] < 1.0:
            lo = mid
        else:
            hi = mid
            state_hi = cand
    return hi, state_hi


def integrate(
    metric: GluedMetric,
    init: GeodesicState,
    ds: float = DEFAULT_DS,
    s_max: float = DEFAULT_S_MAX,
    radial_tol: float = DEFAULT_RADIAL_TOL,
    t_guard: float = DEFAULT_T_GUARD,
) -> Trajectory:
    """Integrate a unit-speed geodesic with chart-transition events.

    The initial state must satisfy unit speed to 1e-9.  States with
    |vtheta| < radial_tol are snapped to exactly radial at entry; only radial
    states may pass through a center (angle jumps to the antipode, radial
    velocity flips).  A non-radial state entering t < t_guard raises
    CenterSingularity, which signals an under-resolved close approach.
    """
    if ds <= 0:
        raise ValueError("ds must be positive")
    err = speed_error(metric, init)
    if err > 1e-9:
        raise ValueError(f"initial state violates unit speed by {err:.3e}")
    chart, t, th = init.chart, init.t, init.theta
    vt, vth = init.vt, init.vtheta
    if abs(vth) < radial_tol:
        vth = 0.0
        vt = math.copysign(1.0, vt) if vt != 0.0 else 1.0
    s = init.s
    s_end = init.s + s_max
    traj = Trajectory(states=[GeodesicState(chart, t, th, vt, vth, s)])
    n_events = 0
    while s < s_end - 1e-15:
        h = min(ds, s_end - s)
        nt, nth, nvt, nvth = _rk4(metric, chart, t, th, vt, vth, h)
        if nt >= 1.0:
            # rim crossing inside this step
            if vth == 0.0:
                hs = (1.0 - t) / vt
                th_at, vt_at, vth_at = th, vt, vth
            else:
                hs, (_t_at, th_at, vt_at, vth_at) = _locate_rim(
                    metric, chart, t, th, vt, vth, h
                )
            s += hs
            (chart, th, vt, vth), (th1, th2) = _cross_rim(metric, chart, th_at, vt_at, vth_at)
            t = 1.0
            n_events += 1
            traj.crossings.append(RimCrossing(s, 3 - chart, th1, th2))
            traj.states.append(GeodesicState(chart, t, th, vt, vth, s))
        elif vth == 0.0 and nt <= 0.0:
            # center passage, exact for radial motion
            hs = t / -vt
            s += hs
            theta_in = normalize(th)
            th = antipode(th)
            vt = -vt
            t = 0.0
            n_events += 1
            traj.center_passages.append(CenterEvent(s, chart, theta_in, th))
            traj.states.append(GeodesicState(chart, t, th, vt, vth, s))
        elif vth != 0.0 and nt < t_guard:
            raise CenterSingularity(
                f"non-radial state reached t={nt:.3e} < guard {t_guard:g} at s={s + h:.6f}; "
                "reduce ds or start farther from the center"
            )
        else:
            t, th, vt, vth = nt, nth, nvt, nvth
            s += h
            traj.states.append(GeodesicState(chart, t, th, vt, vth, s))
        if n_events > _MAX_EVENTS:
            raise EventBisectionFailure("event budget exhausted")
    return traj


# ----------------------------------------------------------------------------
# ensemble integration (vectorized over independent trajectories)


@dataclass
class EnsembleResult:
    final_states: list[GeodesicState]
    sign_flips: np.ndarray  # per-trajectory count of vtheta sign changes
    min_abs_vtheta: np.ndarray  # over the whole trajectory, non-radial members
    crossings: np.ndarray  # rim crossings per trajectory
    center_passages: np.ndarray
    max_theta_drift: np.ndarray  # radial members: |theta - theta at last event|


def integrate_ensemble(
    metric: GluedMetric,
    inits: list[GeodesicState],
    ds: float = DEFAULT_DS,
    s_max: float = DEFAULT_S_MAX,
    radial_tol: float = DEFAULT_RADIAL_TOL,
    t_guard: float = DEFAULT_T_GUARD,
) -> EnsembleResult:
    """Integrate many independent geodesics in lockstep.

    Identical stepping rules to `integrate`; trajectories desynchronize in s
    only at events (an element that crosses the rim resumes from the event
    arclength).  Full paths are not stored; per-trajectory monitors are
    accumulated online.
    """
    n = len(inits)
    chart = np.array([st.chart for st in inits], dtype=np.int8)
    t = np.array([st.t for st in inits], dtype=float)
    th = np.array([st.theta for st in inits], dtype=float)
    vt = np.array([st.vt for st in inits], dtype=float)
    vth = np.array([st.vtheta for st in inits], dtype=float)
    for st in inits:
        err = speed_error(metric, st)
        if err > 1e-9:
            raise ValueError(f"ensemble state violates unit speed by {err:.3e}")
    snap = np.abs(vth) < radial_tol
    vth[snap] = 0.0
    vt[snap] = np.copysign(1.0, vt[snap])
    s = np.array([st.s for st in inits], dtype=float)
    s_end = s + s_max

    sign0 = np.sign(vth)
    flips = np.zeros(n, dtype=int)
    min_abs = np.where(sign0 == 0.0, np.inf, np.abs(vth))
    crossings = np.zeros(n, dtype=int)
    centers = np.zeros(n, dtype=int)
    theta_ref = th.copy()  # reset at every event; radial drift monitor
    max_drift = np.zeros(n, dtype=float)

    def rk4_vec(ch, t0, th0, vt0, vth0, h):
        def rhs(tt, hh, vv, ww):
            phi, phi_t, phi_th = metric.warp_with_partials_vec(ch, tt, hh)
            nonrad = ww != 0.0
            with np.errstate(divide="ignore", invalid="ignore"):
                dvt = phi * phi_t * ww * ww
                dvth = -(2.0 * phi_t / phi) * vv * ww - (phi_th / phi) * ww * ww
            return vv, ww, np.where(nonrad, dvt, 0.0), np.where(nonrad, dvth, 0.0)

        k1 = rhs(t0, th0, vt0, vth0)
        k2 = rhs(
            t0 + 0.5 * h * k1[0], th0 + 0.5 * h * k1[1], vt0 + 0.5 * h * k1[2], vth0 + 0.5 * h * k1[3]
        )
        k3 = rhs(
            t0 + 0.5 * h * k2[0], th0 + 0.5 * h * k2[1], vt0 + 0.5 * h * k2[2], vth0 + 0.5 * h * k2[3]
        )
        k4 = rhs(t0 + h * k3[0], th0 + h * k3[1], vt0 + h * k3[2], vth0 + h * k3[3])
        c = h / 6.0
        return (
            t0 + c * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            th0 + c * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
            vt0 + c * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]),
            vth0 + c * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]),
        )

    active = s < s_end - 1e-15
    while np.any(active):
        h = np.where(active, np.minimum(ds, s_end - s), 0.0)
        nt, nth, nvt, nvth = rk4_vec(chart, t, th, vt, vth, h)

        crossed = active & (nt >= 1.0)
        radial = vth == 0.0
        centered = active & radial & (nt <= 0.0)
        singular = active & ~radial & (nt < t_guard)
        if np.any(singular):
            i = int(np.argmax(singular))
            raise CenterSingularity(
                f"ensemble member {i} (non-radial) reached t={nt[i]:.3e} < guard {t_guard:g}"
            )
        ok = active & ~crossed & ~centered
        t[ok], th[ok], vt[ok], vth[ok] = nt[ok], nth[ok], nvt[ok], nvth[ok]
        s[ok] += h[ok]

        for i in np.flatnonzero(crossed):
            if vth[i] == 0.0:
                hs = (1.0 - t[i]) / vt[i]
                th_at, vt_at, vth_at = th[i], vt[i], vth[i]
            else:
                hs, (_t1, th_at, vt_at, vth_at) = _locate_rim(
                    metric, int(chart[i]), t[i], th[i], vt[i], vth[i], h[i]
                )
            s[i] += hs
            (chart_i, th_i, vt_i, vth_i), _pair = _cross_rim(
                metric, int(chart[i]), th_at, vt_at, vth_at
            )
            chart[i], th[i], vt[i], vth[i] = chart_i, th_i, vt_i, vth_i
            t[i] = 1.0
            crossings[i] += 1
            theta_ref[i] = th[i]
        for i in np.flatnonzero(centered):
            hs = t[i] / -vt[i]
            s[i] += hs
            th[i] = antipode(th[i])
            vt[i] = -vt[i]
            t[i] = 0.0
            centers[i] += 1
            theta_ref[i] = th[i]

        watch = active & (sign0 != 0.0)
        flips += (watch & (np.sign(vth) != sign0)).astype(int)
        np.minimum(min_abs, np.where(sign0 == 0.0, np.inf, np.abs(vth)), out=min_abs)
        drift = circle_distance(th, theta_ref)
        max_drift = np.where(active & radial, np.maximum(max_drift, drift), max_drift)

        active = s < s_end - 1e-15

    finals = [
        GeodesicState(int(chart[i]), float(t[i]), float(th[i]), float(vt[i]), float(vth[i]), float(s[i]))
        for i in range(n)
    ]
    return EnsembleResult(
        final_states=finals,
        sign_flips=flips,
        min_abs_vtheta=min_abs,
        crossings=crossings,
        center_passages=centers,
        max_theta_drift=max_drift,
    )


# ----------------------------------------------------------------------------
# exact piecewise-radial tracer


@dataclass(frozen=True)
class Leg:
    index: int
    chart: int
    kind: str  # "radius" | "diameter"
    entry: float | None  # boundary angle where the leg starts (None: center start)
    exit: float  # boundary angle where the leg ends
    length: int  # 1 for the radius leg, 2 for a diameter


@dataclass(frozen=True)
class TraceCrossing:
    index: int
    theta1: float  # chart-1 boundary angle
    theta2: float  # its image on the chart-2 boundary


@dataclass(frozen=True)
class TracePassage:
    chart: int
    leg_index: int
    direction: float  # angle of motion at the center (exit ray)

    @property
    def line(self) -> float:
        return self.direction % math.pi


@dataclass
class SectionTrace:
    """Exact itinerary of a section started radially at a chart-1 center."""

    start: float
    legs: list[Leg]
    crossings: list[TraceCrossing]
    center_passages: list[TracePassage]
    orbit: list[float]  # start, T(start), T^2(start), ...
    max_legs: int
    k_max: int
    tol: float

    def to_json_dict(self) -> dict:
        return {
            "start": self.start,
            "max_legs": self.max_legs,
            "k_max": self.k_max,
            "tol": self.tol,
            "legs": [
                {
                    "index": leg.index,
                    "chart": leg.chart,
                    "kind": leg.kind,
                    "entry": leg.entry,
                    "exit": leg.exit,
                    "length": leg.length,
                }
                for leg in self.legs
            ],
            "crossings": [
                {"index": c.index, "theta1": c.theta1, "theta2": c.theta2}
                for c in self.crossings
            ],
            "center_passages": [
                {
                    "chart": p.chart,
                    "leg_index": p.leg_index,
                    "direction": p.direction,
                    "line": p.line,
                }
                for p in self.center_passages
            ],
            "orbit": list(self.orbit),
        }


def trace_section(
    f: CircleDiffeo,
    theta0: float,
    max_legs: int = 102,
    k_max: int = DEFAULT_K_MAX,
    tol: float = DEFAULT_TOL,
) -> SectionTrace:
    """Walk the exact itinerary of the section leaving the chart-1 center
    toward boundary angle theta0.

    Legs are the radius out of the start center followed by alternating full
    diameters; the recorded orbit is exactly theta0, T(theta0), ... with T
    the round-trip transition map, extended to k_max iterations even when
    the leg budget stops earlier (so closure beyond the traced legs is still
    detectable and reported as a horizon problem).
    """
    if max_legs < 2:
        raise ValueError("max_legs must be >= 2")
    theta0 = normalize(theta0)
    T = TransitionMap(f)
    legs: list[Leg] = [Leg(0, 1, "radius", None, theta0, 1)]
    crossings: list[TraceCrossing] = []
    passages: list[TracePassage] = []
    orbit = [theta0]
    x = theta0
    closed = False
    while len(legs) < max_legs and not closed:
        # outward at chart-1 boundary angle x: cross and run the chart-2 diameter
        y = f(x)
        crossings.append(TraceCrossing(len(crossings), x, y))
        exit2 = antipode(y)
        legs.append(Leg(len(legs), 2, "diameter", y, exit2, 2))
        passages.append(TracePassage(2, legs[-1].index, exit2))
        if len(legs) >= max_legs:
            break
        # outward at chart-2 boundary angle exit2: cross back and run chart 1
        w = f.inverse(exit2)
        crossings.append(TraceCrossing(len(crossings), w, exit2))
        x_next = antipode(w)
        legs.append(Leg(len(legs), 1, "diameter", w, x_next, 2))
        passages.append(TracePassage(1, legs[-1].index, x_next))
        orbit.append(x_next)
        x = x_next
        if circle_distance(x, theta0) < tol:
            closed = True
    if not closed:
        # extend the orbit bookkeeping to the full search horizon
        while len(orbit) <= k_max:
            x = T(x)
            orbit.append(x)
            if circle_distance(x, theta0) < tol:
                break
    return SectionTrace(
        start=theta0,
        legs=legs,
        crossings=crossings,
        center_passages=passages,
        orbit=orbit,
        max_legs=max_legs,
        k_max=k_max,
        tol=tol,
    )


@dataclass(frozen=True)
class InjectivityWitness:
    chart: int
    leg_a: int
    leg_b: int
    line_a: float
    line_b: float
    separation: float


@dataclass(frozen=True)
class SectionVerdict:
    closed: bool
    period: Period
    length: float  # 4k for closed sections, inf otherwise
    injective: bool
    witness: InjectivityWitness | None


def section_verdict(trace: SectionTrace, tol: float | None = None) -> SectionVerdict:
    """Closure, length and injectivity of a traced section.

    A closed period-k section consists of k diameters in each disk, and the
    radial coordinate is arclength (g_tt = 1), so its length is exactly 4k.
    Injectivity fails exactly when some center is passed along two distinct
    lines; re-traversal of the same line (period-1 closure) does not count.
    """
    if tol is None:
        tol = trace.tol
    theta0 = trace.orbit[0]
    k = None
    for m in range(1, len(trace.orbit)):
        if circle_distance(trace.orbit[m], theta0) < tol:
            k = m
            break
    traced_iterations = sum(1 for leg in trace.legs if leg.chart == 1 and leg.kind == "diameter")
    if k is not None and traced_iterations < k:
        raise HorizonTooShort(
            f"period {k} detected but only {len(trace.legs)} legs traced; "
            f"need max_legs >= {2 * k + 1}"
        )
    closed = k is not None
    period = Period.finite(k) if closed else Period.not_found(len(trace.orbit) - 1)
    length = float(4 * k) if closed else math.inf

    witness = None
    for chart in (1, 2):
        group = [p for p in trace.center_passages if p.chart == chart]
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                sep = line_distance(group[i].direction, group[j].direction)
                if sep >= tol:
                    cand = InjectivityWitness(
                        chart=chart,
                        leg_a=group[i].leg_index,
                        leg_b=group[j].leg_index,
                        line_a=group[i].line,
                        line_b=group[j].line,
                        separation=sep,
                    )
                    if witness is None or cand.leg_b < witness.leg_b:
                        witness = cand
                    break
            if witness is not None:
                break
    return SectionVerdict(
        closed=closed,
        period=period,
        length=length,
        injective=witness is None,
        witness=witness,
    )


@dataclass(frozen=True)
class SectionComparison:
    theta_a: float
    theta_b: float
    period_a: int
    period_b: int
    length_a: float
    length_b: float
    non_isometric: bool


def compare_sections(
    f: CircleDiffeo,
    theta_a: float,
    theta_b: float,
    max_legs: int = 200,
    k_max: int = DEFAULT_K_MAX,
    tol: float = DEFAULT_TOL,
) -> SectionComparison:
    """Compare two closed sections by period and length.

    Distinct periods certify non-isometric sections: closed geodesics of
    lengths 4k_a and 4k_b are isometric only when the lengths agree.  Raises
    NotClosed when either trace fails to close within its horizon.
    """
    verdicts = []
    for theta in (theta_a, theta_b):
        trace = trace_section(f, theta, max_legs=max_legs, k_max=k_max, tol=tol)
        v = section_verdict(trace, tol)
        if not v.closed:
            raise NotClosed(f"section at theta={theta!r} did not close within {k_max} returns")
        verdicts.append(v)
    va, vb = verdicts
    return SectionComparison(
        theta_a=normalize(theta_a),
        theta_b=normalize(theta_b),
        period_a=va.period.k,
        period_b=vb.period.k,
        length_a=va.length,
        length_b=vb.length,
        non_isometric=va.period.k != vb.period.k,
    )
