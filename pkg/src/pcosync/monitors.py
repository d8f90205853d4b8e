"""Trace checks derived from the convergence theory, plus Monte Carlo
estimates of its existence constants.

Every check returns a :class:`CheckResult` whose ``margin`` is signed:
negative means violated. Checks whose preconditions do not hold on the
trace are reported as ``"skipped"`` with a reason.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .engine import NetworkConfig, StopRule, Trace, run
from .phase import EPS_GEOM, TWO_PI, CircularArc, diameter, shortest_arc, wrap
from .prc import check_assumption1
from .topology import Topology, is_rooted

EPS_SYNC = 1e-6

CHECKS = ("diameter_monotone", "firing_gaps", "arc_containment", "round_contraction")

__all__ = [
    "EPS_SYNC",
    "CHECKS",
    "CheckResult",
    "MonitorReport",
    "diameter_series",
    "check_diameter_monotone",
    "check_firing_gaps",
    "check_arc_containment",
    "check_round_contraction",
    "detect_sync",
    "monitor",
    "random_phases",
    "ContractionEstimate",
    "estimate_contraction_epsilon",
    "FirstFireEstimate",
    "estimate_first_fire_delay",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    margin: Optional[float] = None
    time: Optional[float] = None
    reason: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def failed(self) -> bool:
        return self.status == "fail"


@dataclass
class MonitorReport:
    checks: list[CheckResult]
    diameter_series: list[tuple[float, float]]
    sync_time: Optional[float] = None

    @property
    def ok(self) -> bool:
        return not any(c.failed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "checks": [asdict(c) for c in self.checks],
            "sync_time": self.sync_time,
            "diameter_series": [list(p) for p in self.diameter_series],
        }


def _skip(name: str, reason: str) -> CheckResult:
    return CheckResult(name, "skipped", reason=reason)


def _verdict(name: str, margins: list[tuple[float, float]], tol: float = 0.0, strict: bool = False) -> CheckResult:
    if not margins:
        return _skip(name, "nothing to check on this trace")
    m, t = min(margins)
    ok = m > tol if strict else m >= -tol
    return CheckResult(name, "pass" if ok else "fail", float(m), float(t))


def _precondition(trace: Trace) -> Optional[str]:
    d0 = diameter(trace.config.initial_phases)
    if not d0 < math.pi:
        return f"initial diameter {d0:.6g} is not below pi"
    for i, p in enumerate(trace.config.profiles):
        # weak form: zero coupling is a legitimate (non-contracting) profile
        if not check_assumption1(p, strict=False):
            return f"profile of oscillator {i} overshoots"
    return None


def diameter_series(trace: Trace) -> list[tuple[float, float]]:
    """Diameter at t = 0 and right after every event; constant in between."""
    out = [(0.0, diameter(trace.config.initial_phases))]
    out.extend((e.t, diameter(e.post)) for e in trace.events)
    return out


def check_diameter_monotone(trace: Trace, eps: float = EPS_GEOM) -> CheckResult:
    """Diameter never grows at events and stays put between them."""
    name = "diameter_monotone"
    reason = _precondition(trace)
    if reason:
        return _skip(name, reason)
    margins = []
    prev = diameter(trace.config.initial_phases)
    for e in trace.events:
        d_pre, d_post = diameter(e.pre), diameter(e.post)
        margins.append((-abs(d_pre - prev), e.t))
        margins.append((d_pre - d_post, e.t))
        prev = d_post
    if not margins:
        margins.append((0.0, 0.0))
    return _verdict(name, margins, eps)


def check_firing_gaps(trace: Trace, period: Optional[float] = None) -> CheckResult:
    """Consecutive firings of one oscillator are more than T/2 and less than
    3T/2 apart, and every window of length 3T/2 inside the trace contains a
    firing of every oscillator.
    """
    name = "firing_gaps"
    reason = _precondition(trace)
    if reason:
        return _skip(name, reason)
    T = trace.config.period if period is None else period
    margins = []
    for i in range(trace.config.n):
        times = trace.firing_times(i)
        for a, b in zip(times, times[1:]):
            margins.append((min(b - a - T / 2, 1.5 * T - (b - a)), b))
        if trace.t_end >= 1.5 * T:
            later = [t for t in times if t > 0.0]
            first = later[0] if later else math.inf
            margins.append((1.5 * T - first, min(first, trace.t_end)))
            last = times[-1] if times else 0.0
            margins.append((1.5 * T - (trace.t_end - last), trace.t_end))
    return _verdict(name, margins, strict=True)


def _containment_margin(outer: CircularArc, inner: CircularArc, eps: float) -> float:
    if outer.length >= TWO_PI - eps:
        return math.inf
    off = outer.offset_of(inner.start, eps)
    return min(off, outer.length - (off + inner.length))


def check_arc_containment(trace: Trace, omega: Optional[float] = None, eps: float = EPS_GEOM) -> CheckResult:
    """The shortest containing arc only shrinks: at events it nests inside the
    pre-event arc, and between checkpoints it nests inside the rigidly rotated
    earlier arc.
    """
    name = "arc_containment"
    reason = _precondition(trace)
    if reason:
        return _skip(name, reason)
    omega = trace.config.omega if omega is None else omega
    # (time, phases, is_post_event_of_same_instant)
    points = [(0.0, trace.config.initial_phases)]
    points.extend((t, ph) for t, ph in trace.samples)
    checkpoints = sorted(
        [(t, 0, ph) for t, ph in points] + [(e.t, 1, e) for e in trace.events],
        key=lambda x: (x[0], x[1]))
    margins = []
    prev_t, prev_arc = 0.0, shortest_arc(trace.config.initial_phases, eps)
    for t, kind, item in checkpoints:
        if kind == 0:
            arc = shortest_arc(item, eps)
            margins.append((_containment_margin(prev_arc.rotated(omega * (t - prev_t)), arc, eps), t))
        else:
            pre = shortest_arc(item.pre, eps)
            margins.append((_containment_margin(prev_arc.rotated(omega * (t - prev_t)), pre, eps), t))
            arc = shortest_arc(item.post, eps)
            margins.append((_containment_margin(pre, arc, eps), t))
        prev_t, prev_arc = t, arc
    return _verdict(name, margins, eps)


def check_round_contraction(trace: Trace, topology: Optional[Topology] = None,
                            period: Optional[float] = None, *, window: Optional[float] = None,
                            eps_sync: float = EPS_SYNC) -> CheckResult:
    """Diameter strictly drops over each window of length ``3T(N-1)/2``.

    Windows starting with diameter at or below ``eps_sync`` are not checked.
    ``window`` overrides the window length.
    """
    name = "round_contraction"
    topology = trace.config.topology if topology is None else topology
    T = trace.config.period if period is None else period
    reason = _precondition(trace)
    if reason:
        return _skip(name, reason)
    if not is_rooted(topology):
        return _skip(name, "topology is not rooted")
    d0 = diameter(trace.config.initial_phases)
    if d0 <= 0.0:
        return _skip(name, "initial phases are already synchronized")
    w = 1.5 * T * (trace.config.n - 1) if window is None else window
    if trace.t_end < w:
        return _skip(name, f"trace shorter than one window ({w:.6g})")
    margins = []
    prev = d0
    for k in range(1, int(math.floor(trace.t_end / w + 1e-12)) + 1):
        d = trace.diameter_at(min(k * w, trace.t_end))
        if prev > eps_sync:
            margins.append((prev - d, k * w))
        prev = d
    if not margins:
        return _skip(name, "diameter already below the sync tolerance")
    return _verdict(name, margins, strict=True)


def detect_sync(trace: Trace, epsilon: float) -> Optional[float]:
    """Earliest time after which the diameter stays below ``epsilon`` until the
    end of the trace, or ``None``.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    series = diameter_series(trace)
    last_bad = None
    for k, (_, d) in enumerate(series):
        if d >= epsilon:
            last_bad = k
    if last_bad is None:
        return 0.0
    if last_bad == len(series) - 1:
        return None
    return series[last_bad + 1][0]


def monitor(trace: Trace, checks: Sequence[str] = CHECKS, *, sync_epsilon: float = 1e-3,
            eps_geom: float = EPS_GEOM, eps_sync: float = EPS_SYNC) -> MonitorReport:
    """Run the named checks on ``trace``."""
    runners = {
        "diameter_monotone": lambda: check_diameter_monotone(trace, eps_geom),
        "firing_gaps": lambda: check_firing_gaps(trace),
        "arc_containment": lambda: check_arc_containment(trace, eps=eps_geom),
        "round_contraction": lambda: check_round_contraction(trace, eps_sync=eps_sync),
    }
    unknown = set(checks) - set(runners)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    return MonitorReport([runners[c]() for c in checks], diameter_series(trace),
                         detect_sync(trace, sync_epsilon))


def random_phases(rng: np.random.Generator, n: int, d: float) -> np.ndarray:
    """Random phases whose diameter is exactly ``d`` (for ``n >= 2``, ``d < pi``)."""
    offsets = np.empty(n)
    offsets[0], offsets[1] = 0.0, d
    offsets[2:] = rng.uniform(0.0, d, n - 2)
    rng.shuffle(offsets)
    base = rng.uniform(0.0, TWO_PI)
    return np.array([wrap(base + o) for o in offsets])


@dataclass(frozen=True)
class ContractionEstimate:
    """Smallest observed drop ``d(0) - d(window)`` over the samples."""

    epsilon: float
    window: float
    samples: int
    worst_initial_phases: tuple[float, ...]


def estimate_contraction_epsilon(config: NetworkConfig, d1: float, d2: float, samples: int,
                                 *, seed=None, window: Optional[float] = None) -> ContractionEstimate:
    """Monte Carlo lower bound on the diameter drop over one contraction window.

    Initial diameters are drawn uniformly from ``[d1, d2]``; the template's
    own initial phases are ignored.
    """
    if not 0 < d1 <= d2 < math.pi:
        raise ValueError("need 0 < d1 <= d2 < pi")
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    w = 1.5 * config.period * (config.n - 1) if window is None else window
    worst, worst_phases = math.inf, ()
    for _ in range(samples):
        phases = random_phases(rng, config.n, rng.uniform(d1, d2))
        trace = run(config.with_phases(phases), StopRule(t_max=w))
        drop = diameter(phases) - trace.diameter_at(w)
        if drop < worst:
            worst, worst_phases = drop, tuple(float(p) for p in phases)
    return ContractionEstimate(float(worst), w, samples, worst_phases)


@dataclass(frozen=True)
class FirstFireEstimate:
    """Smallest observed first-firing time of the designated oscillator.

    ``lead_epsilon`` is the leader band used for the firing-order check, and
    ``ordering_violations`` counts samples where an oscillator lagging the
    leader by at least ``delta`` fired before one inside the band.
    """

    tau: float
    accepted: int
    rejected: int
    lead_epsilon: float
    ordering_checked: int
    ordering_violations: int


def estimate_first_fire_delay(config: NetworkConfig, delta: float, d_star: float, samples: int,
                              *, oscillator: int = 0, seed=None) -> FirstFireEstimate:
    """Monte Carlo lower bound on how soon an oscillator that starts at least
    ``delta`` below 2pi can fire, for initial diameters below ``d_star``.

    Draws violating ``theta_i(0) <= 2pi - delta`` are rejected. The same
    traces are then used to check that oscillators within ``lead_epsilon`` of
    the leading phase all fire before any oscillator ``delta`` behind it,
    with ``lead_epsilon = min(omega * tau, pi) / 2``.
    """
    if not (delta > 0 and 0 < d_star < math.pi):
        raise ValueError("need delta > 0 and 0 < d_star < pi")
    rng = np.random.default_rng(seed)
    horizon = 1.5 * config.period
    first_fires = []
    rejected = 0
    for _ in range(samples):
        phases = random_phases(rng, config.n, rng.uniform(0.0, d_star))
        if phases[oscillator] > TWO_PI - delta:
            rejected += 1
            continue
        trace = run(config.with_phases(phases), StopRule(t_max=horizon))
        firsts = []
        for i in range(config.n):
            times = trace.firing_times(i)
            firsts.append(times[0] if times else math.inf)
        first_fires.append((phases, firsts))
    if not first_fires:
        return FirstFireEstimate(math.nan, 0, rejected, math.nan, 0, 0)
    tau = min(f[oscillator] for _, f in first_fires)
    lead = min(config.omega * tau, math.pi) / 2
    checked = violations = 0
    for phases, firsts in first_fires:
        top = phases.max()
        leaders = [i for i in range(config.n) if phases[i] > top - lead]
        laggards = [j for j in range(config.n) if phases[j] <= top - delta]
        if not laggards:
            continue
        checked += 1
        if max(firsts[i] for i in leaders) >= min(firsts[j] for j in laggards):
            violations += 1
    return FirstFireEstimate(float(tau), len(first_fires), rejected, float(lead), checked, violations)
