"""Exact event-driven simulation of a pulse-coupled oscillator network.

Between events every phase grows at the common rate ``omega``, so the next
event time is known in closed form. At an event each oscillator ``i`` that
hears ``k_i`` firing in-neighbours moves to ``ptc_i^k_i(theta_i) mod 2pi``;
the firing oscillators themselves restart at exactly 0.
"""
from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exceptions import ContractViolationError, InvalidArgumentError
from .phase import TWO_PI, as_phase_vector, diameter
from .prc import OscillatorProfile
from .topology import Topology

logger = logging.getLogger(__name__)

EPS_FIRE = 1e-9

__all__ = [
    "EPS_FIRE",
    "NetworkConfig",
    "NetworkState",
    "EventRecord",
    "StopRule",
    "Trace",
    "next_event",
    "apply_event",
    "run",
    "simulate_fixed_step",
]


@dataclass(frozen=True)
class NetworkConfig:
    omega: float
    profiles: tuple[OscillatorProfile, ...]
    topology: Topology
    initial_phases: tuple[float, ...]

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise InvalidArgumentError(f"omega must be positive, got {self.omega!r}")
        profiles = tuple(self.profiles)
        phases = tuple(float(x) for x in as_phase_vector(self.initial_phases))
        n = self.topology.n
        if len(profiles) != n or len(phases) != n:
            raise InvalidArgumentError(
                f"network of {n} nodes needs {n} profiles and phases, "
                f"got {len(profiles)} and {len(phases)}")
        object.__setattr__(self, "profiles", profiles)
        object.__setattr__(self, "initial_phases", phases)

    @classmethod
    def homogeneous(cls, omega: float, profile: OscillatorProfile, topology: Topology,
                    initial_phases: Sequence[float]) -> "NetworkConfig":
        return cls(omega, (profile,) * topology.n, topology, tuple(initial_phases))

    @property
    def n(self) -> int:
        return self.topology.n

    @property
    def period(self) -> float:
        return TWO_PI / self.omega

    def with_phases(self, phases: Sequence[float]) -> "NetworkConfig":
        return NetworkConfig(self.omega, self.profiles, self.topology, tuple(phases))


@dataclass(frozen=True)
class NetworkState:
    t: float
    phases: tuple[float, ...]


@dataclass(frozen=True)
class EventRecord:
    """One event instant.

    ``firing`` holds 0-based indices; ``pulse_counts[i]`` is the number of
    firing oscillators in the in-neighbourhood of ``i`` (itself included).
    """

    t: float
    firing: tuple[int, ...]
    pre: tuple[float, ...]
    post: tuple[float, ...]
    pulse_counts: tuple[int, ...]


@dataclass(frozen=True)
class StopRule:
    """When to stop a run. At least one criterion must be set.

    ``sync_diameter`` stops as soon as the post-event diameter drops below it.
    ``max_events`` defaults to ``10 * n * ceil(t_max / T)``.
    """

    t_max: Optional[float] = None
    sync_diameter: Optional[float] = None
    max_events: Optional[int] = None

    def __post_init__(self):
        if self.t_max is None and self.sync_diameter is None and self.max_events is None:
            raise InvalidArgumentError("stop rule needs t_max, sync_diameter or max_events")
        if self.t_max is not None and not (self.t_max >= 0 and math.isfinite(self.t_max)):
            raise InvalidArgumentError("t_max must be finite and non-negative")

    def budget(self, config: NetworkConfig) -> int:
        if self.max_events is not None:
            return self.max_events
        if self.t_max is None:
            return 10_000 * config.n
        return 10 * config.n * max(1, math.ceil(self.t_max / config.period))


@dataclass
class Trace:
    """Full event history of a run.

    ``termination`` is ``"t_max"``, ``"sync"`` or ``"event_budget"``; ``t_end``
    is the last instant the trace describes.
    """

    config: NetworkConfig
    events: list[EventRecord]
    t_end: float
    termination: str
    samples: list[tuple[float, tuple[float, ...]]] = field(default_factory=list)

    @property
    def event_times(self) -> list[float]:
        return [e.t for e in self.events]

    def firing_times(self, i: int) -> list[float]:
        return [e.t for e in self.events if i in e.firing]

    def phases_at(self, t: float) -> np.ndarray:
        """Phases at time ``t`` with the left-continuous convention.

        At an event instant this returns the pre-event phases.
        """
        if t < 0 or t > self.t_end:
            raise InvalidArgumentError(f"time {t} outside the trace [0, {self.t_end}]")
        k = bisect.bisect_left(self.event_times, t)
        if k == 0:
            return np.asarray(self.config.initial_phases) + self.config.omega * t
        e = self.events[k - 1]
        return np.asarray(e.post) + self.config.omega * (t - e.t)

    def diameter_at(self, t: float) -> float:
        return diameter(self.phases_at(t))

    def sample(self, dt: float) -> list[tuple[float, tuple[float, ...]]]:
        """Exact phase samples on the grid ``0, dt, 2dt, ...`` up to ``t_end``."""
        if not dt > 0:
            raise InvalidArgumentError("sampling interval must be positive")
        out = []
        k = 0
        while True:
            t = k * dt
            if t > self.t_end:
                break
            out.append((t, tuple(float(x) for x in self.phases_at(t))))
            k += 1
        return out


def next_event(state: NetworkState, omega: float, eps_fire: float = EPS_FIRE) -> tuple[float, tuple[int, ...]]:
    """Time of the next event after ``state`` and the oscillators firing then.

    Oscillators already sitting at 2pi fire immediately.
    """
    if not state.phases:
        raise InvalidArgumentError("empty network state")
    lead = max(state.phases)
    dt = max(TWO_PI - lead, 0.0) / omega
    advance = omega * dt
    firing = tuple(i for i, p in enumerate(state.phases) if p + advance >= TWO_PI - eps_fire)
    return state.t + dt, firing


def _jump(profile: OscillatorProfile, theta: float, k: int) -> float:
    for _ in range(k):
        theta = profile.ptc(theta)
        if not 0.0 <= theta <= TWO_PI:
            # only reachable for profiles that fail certification
            theta %= TWO_PI
    if theta >= TWO_PI:
        # cannot be forced to fire by a pulse
        theta = math.nextafter(TWO_PI, 0.0)
    return theta


def apply_event(state: NetworkState, firing: Sequence[int], config: NetworkConfig,
                eps_fire: float = EPS_FIRE) -> tuple[NetworkState, EventRecord]:
    """Resolve the event at ``state.t`` triggered by ``firing``."""
    fire = tuple(sorted(set(firing)))
    if not fire:
        raise ContractViolationError("an event needs at least one firing oscillator")
    n = config.n
    for i in fire:
        if not 0 <= i < n:
            raise ContractViolationError(f"firing index {i} outside the network")
        if state.phases[i] < TWO_PI - eps_fire:
            raise ContractViolationError(
                f"oscillator {i} at phase {state.phases[i]!r} has not reached 2pi")
    fire_set = set(fire)
    counts = []
    post = []
    for i, theta in enumerate(state.phases):
        k = len(fire_set & config.topology.in_neighbors(i))
        counts.append(k)
        if i in fire_set:
            post.append(0.0)
        elif k == 0:
            post.append(theta)
        else:
            post.append(_jump(config.profiles[i], theta, k))
    pre = tuple(min(p, TWO_PI) for p in state.phases)
    record = EventRecord(state.t, fire, pre, tuple(post), tuple(counts))
    return NetworkState(state.t, tuple(post)), record


def run(config: NetworkConfig, stop: StopRule, *, sample_dt: Optional[float] = None,
        eps_fire: float = EPS_FIRE) -> Trace:
    """Simulate ``config`` until ``stop`` triggers and return the trace.

    The result is a deterministic function of its arguments.
    """
    omega = config.omega
    t_max = math.inf if stop.t_max is None else stop.t_max
    budget = stop.budget(config)
    state = NetworkState(0.0, config.initial_phases)
    events: list[EventRecord] = []
    termination = "t_max"
    t_end = t_max

    if stop.sync_diameter is not None and diameter(state.phases) < stop.sync_diameter:
        termination, t_end = "sync", 0.0
    else:
        while True:
            t_next, firing = next_event(state, omega, eps_fire)
            if t_next > t_max:
                break
            if len(events) >= budget:
                termination, t_end = "event_budget", state.t
                logger.warning("event budget of %d exhausted at t=%g", budget, state.t)
                break
            dt = t_next - state.t
            flowed = NetworkState(t_next, tuple(p + omega * dt for p in state.phases))
            state, record = apply_event(flowed, firing, config, eps_fire)
            events.append(record)
            if stop.sync_diameter is not None and diameter(state.phases) < stop.sync_diameter:
                termination, t_end = "sync", state.t
                break

    trace = Trace(config, events, t_end, termination)
    if sample_dt is not None and math.isfinite(t_end):
        trace.samples = trace.sample(sample_dt)
    return trace


try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        return lambda f: f


@njit(cache=False)
def _steps_until_crossing(theta, inc, max_steps):
    # plain explicit stepping; returns steps taken, theta updated in place
    n = theta.shape[0]
    for s in range(1, max_steps + 1):
        crossed = False
        for i in range(n):
            theta[i] += inc
            if theta[i] >= 2.0 * np.pi:
                crossed = True
        if crossed:
            return s
    return max_steps


def simulate_fixed_step(config: NetworkConfig, h: float, t_max: float,
                        max_events: Optional[int] = None) -> Trace:
    """Brute-force reference integrator.

    Phases advance by ``omega * h`` per step and an oscillator fires at the
    first step boundary where it has reached 2pi. Oscillators crossing in the
    same step fire together. Only meant for cross-checking :func:`run`.
    """
    if not h > 0:
        raise InvalidArgumentError("step size must be positive")
    budget = StopRule(t_max=t_max, max_events=max_events).budget(config)
    inc = config.omega * h
    total_steps = int(math.floor(t_max / h + 1e-9))
    theta = np.array(config.initial_phases, dtype=float)
    step = 0
    events: list[EventRecord] = []
    termination = "t_max"
    while True:
        if np.any(theta >= TWO_PI):
            if len(events) >= budget:
                termination = "event_budget"
                break
            t = step * h
            fire = set(np.flatnonzero(theta >= TWO_PI).tolist())
            pre = tuple(min(float(p), TWO_PI) for p in theta)
            counts, post = [], []
            for i in range(config.n):
                k = len(fire & config.topology.in_neighbors(i))
                counts.append(k)
                if i in fire:
                    post.append(0.0)
                else:
                    post.append(_jump(config.profiles[i], float(theta[i]), k))
            theta = np.array(post)
            events.append(EventRecord(t, tuple(sorted(fire)), pre, tuple(post), tuple(counts)))
        if step >= total_steps:
            break
        step += int(_steps_until_crossing(theta, inc, total_steps - step))
    t_end = step * h if termination == "event_budget" else t_max
    return Trace(config, events, t_end, termination)
