"""Phase response curves (PRC) and the phase transition curves they induce.

A pulse received at phase ``theta`` moves an oscillator to
``ptc(theta) = theta + gain * prc(theta)``. ``k`` simultaneous pulses apply
the transition curve ``k`` times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .exceptions import AssumptionViolationError, InvalidArgumentError
from .phase import TWO_PI

PI = math.pi

KINDS = ("sawtooth", "triangle", "negative_sine", "tabulated")
DEFAULT_GRID = 10_001
ENDPOINT_TOL = 1e-12

__all__ = [
    "KINDS",
    "DEFAULT_GRID",
    "PhaseResponseCurve",
    "OscillatorProfile",
    "Violation",
    "CertificationReport",
    "eval_prc",
    "eval_ptc",
    "eval_ptc_iter",
    "check_assumption1",
    "is_delay_advance",
]


@dataclass(frozen=True)
class PhaseResponseCurve:
    """Phase response curve on ``[0, 2pi]``.

    Kinds
    -----
    sawtooth
        ``-theta`` on ``[0, pi)`` and ``2pi - theta`` on ``(pi, 2pi]``.
    triangle
        ``-theta`` on ``[0, pi/2)``, ``theta - pi`` on ``[pi/2, 3pi/2]``,
        ``2pi - theta`` on ``(3pi/2, 2pi]``.
    negative_sine
        ``-sin(theta)``.
    tabulated
        Linear interpolation through ``breakpoints``, which must be strictly
        increasing in angle, start at 0, end at 2pi and vanish at both ends.

    ``value_at_pi`` overrides the curve at exactly ``theta = pi``. It defaults
    to 0 for the built-in kinds (the sawtooth jump is resolved there) and to
    plain interpolation for tabulated curves.
    """

    kind: str
    breakpoints: tuple[tuple[float, float], ...] = ()
    value_at_pi: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown PRC kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "tabulated":
            bp = tuple((float(a), float(v)) for a, v in self.breakpoints)
            if len(bp) < 2:
                raise InvalidArgumentError("tabulated PRC needs at least two breakpoints")
            angles = [a for a, _ in bp]
            if any(b <= a for a, b in zip(angles, angles[1:])):
                raise InvalidArgumentError("tabulated breakpoints must be strictly increasing")
            if angles[0] != 0.0 or not math.isclose(angles[-1], TWO_PI, rel_tol=0, abs_tol=1e-12):
                raise InvalidArgumentError("tabulated breakpoints must span [0, 2pi]")
            if bp[0][1] != 0.0 or bp[-1][1] != 0.0:
                raise InvalidArgumentError("tabulated PRC must vanish at 0 and 2pi")
            object.__setattr__(self, "breakpoints", bp)
        elif self.breakpoints:
            raise InvalidArgumentError("breakpoints are only meaningful for tabulated PRCs")
        if self.value_at_pi is None and self.kind != "tabulated":
            object.__setattr__(self, "value_at_pi", 0.0)

    @classmethod
    def zero(cls) -> "PhaseResponseCurve":
        """The identically-zero curve (uncoupled oscillators)."""
        return cls("tabulated", ((0.0, 0.0), (TWO_PI, 0.0)))

    def interior_breakpoints(self) -> tuple[float, ...]:
        """Angles in ``(0, 2pi)`` where the curve changes formula."""
        if self.kind == "sawtooth":
            return (PI,)
        if self.kind == "triangle":
            return (PI / 2, 1.5 * PI)
        if self.kind == "tabulated":
            return tuple(a for a, _ in self.breakpoints[1:-1])
        return ()

    def __call__(self, theta):
        """Vectorised evaluation; ``theta`` must lie in ``[0, 2pi]``."""
        th = np.asarray(theta, dtype=float)
        if self.kind == "sawtooth":
            out = np.where(th < PI, -th, TWO_PI - th)
        elif self.kind == "triangle":
            out = np.where(th < PI / 2, -th, np.where(th <= 1.5 * PI, th - PI, TWO_PI - th))
        elif self.kind == "negative_sine":
            out = -np.sin(th)
        else:
            a, v = zip(*self.breakpoints)
            out = np.interp(th, a, v)
        out = np.where((th == 0.0) | (th == TWO_PI), 0.0, out)
        if self.value_at_pi is not None:
            out = np.where(th == PI, self.value_at_pi, out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class OscillatorProfile:
    """A phase response curve together with its coupling gain."""

    prc: PhaseResponseCurve
    gain: float

    def __post_init__(self):
        if not (math.isfinite(self.gain) and self.gain > 0):
            raise InvalidArgumentError(f"gain must be positive, got {self.gain!r}")

    def ptc(self, theta):
        """Raw transition curve ``theta + gain * prc(theta)``, unchecked."""
        if np.ndim(theta):
            th = np.asarray(theta, dtype=float)
            return th + self.gain * self.prc(th)
        theta = float(theta)
        return theta + self.gain * self.prc(theta)


def _check_phase(theta: float) -> float:
    theta = float(theta)
    if not (0.0 <= theta <= TWO_PI):
        raise InvalidArgumentError(f"phase {theta!r} outside [0, 2pi]")
    return theta


def eval_prc(prc: PhaseResponseCurve, theta: float) -> float:
    return prc(_check_phase(theta))


def eval_ptc(profile: OscillatorProfile, theta: float) -> float:
    """Post-pulse phase, not reduced modulo 2pi.

    Raises AssumptionViolationError when the result leaves ``[0, 2pi]``.
    """
    theta = _check_phase(theta)
    out = profile.ptc(theta)
    if not (0.0 <= out <= TWO_PI):
        raise AssumptionViolationError(
            f"ptc({theta!r}) = {out!r} leaves [0, 2pi] for gain {profile.gain}")
    return out


def eval_ptc_iter(profile: OscillatorProfile, theta: float, k: int) -> float:
    """``k``-fold composition of the transition curve; ``k = 0`` is the identity."""
    if k < 0:
        raise InvalidArgumentError("iteration count must be non-negative")
    theta = _check_phase(theta)
    for _ in range(k):
        theta = eval_ptc(profile, theta)
    return theta


@dataclass(frozen=True)
class Violation:
    theta: float
    value: float
    margin: float


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of a grid check.

    ``margin`` is the smallest signed margin seen over all samples; negative
    values mark violations, all of which are listed in ``violations``.
    """

    passed: bool
    margin: float
    samples: int
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    def __bool__(self):
        return self.passed

    @property
    def first_violation(self) -> Optional[Violation]:
        return self.violations[0] if self.violations else None


def _grid(prc: PhaseResponseCurve, grid_size: int) -> np.ndarray:
    if grid_size < 2:
        raise InvalidArgumentError("grid_size must be at least 2")
    g = np.linspace(0.0, TWO_PI, grid_size + 2)[1:-1]
    g = np.union1d(g, [a for a in prc.interior_breakpoints() if a != PI])
    return g[g != PI]


def _report(theta: np.ndarray, value: np.ndarray, margin: np.ndarray,
            extra: tuple[Violation, ...] = (), strict: bool = True) -> CertificationReport:
    bad = np.flatnonzero(margin <= 0.0 if strict else margin < 0.0)
    violations = extra + tuple(Violation(float(theta[i]), float(value[i]), float(margin[i])) for i in bad)
    worst = min([float(margin.min())] + [v.margin for v in extra])
    return CertificationReport(not violations, worst, int(theta.size), violations)


@lru_cache(maxsize=256)
def check_assumption1(profile: OscillatorProfile, grid_size: int = DEFAULT_GRID,
                      strict: bool = True) -> CertificationReport:
    """Grid-certify that pulses never overshoot.

    Checks ``0 < ptc(theta) < theta`` on ``(0, pi)``, ``theta < ptc(theta) < 2pi``
    on ``(pi, 2pi)`` and the fixed points ``ptc(0) = 0``, ``ptc(2pi) = 2pi``.
    With ``strict=False`` the inequalities may hold with equality, which
    admits uncoupled oscillators. This is a sampling check, not a proof.
    """
    th = _grid(profile.prc, grid_size)
    psi = profile.ptc(th)
    low = th < PI
    margin = np.where(low, np.minimum(psi, th - psi), np.minimum(psi - th, TWO_PI - psi))
    # fixed points are checked to within rounding, not strictly
    ends = []
    for a in (0.0, TWO_PI):
        err = abs(profile.ptc(a) - a)
        if err > ENDPOINT_TOL:
            ends.append(Violation(a, profile.ptc(a), ENDPOINT_TOL - err))
    return _report(th, psi, margin, tuple(ends), strict)


def is_delay_advance(prc: PhaseResponseCurve, grid_size: int = DEFAULT_GRID) -> CertificationReport:
    """Grid-check ``prc < 0`` on ``(0, pi)`` and ``prc > 0`` on ``(pi, 2pi)``."""
    th = _grid(prc, grid_size)
    phi = np.asarray(prc(th))
    margin = np.where(th < PI, -phi, phi)
    return _report(th, phi, margin)
