"""Circle geometry for phase vectors.

Phases are radians on ``[0, 2pi]``. For every geometric query the value
``2pi`` is the same point as ``0``; only the engine distinguishes them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import InvalidArgumentError

TWO_PI = 2.0 * math.pi
EPS_GEOM = 1e-12

__all__ = [
    "TWO_PI",
    "EPS_GEOM",
    "CircularArc",
    "wrap",
    "as_phase_vector",
    "circular_distance",
    "diameter",
    "shortest_arc",
    "arc_contains",
    "sync_error",
]


def wrap(angle: float) -> float:
    """Reduce ``angle`` modulo 2pi into ``[0, 2pi)``."""
    angle = float(angle)
    if not math.isfinite(angle):
        raise InvalidArgumentError(f"angle must be finite, got {angle!r}")
    r = angle % TWO_PI
    # tiny negative inputs round up to exactly 2pi
    if r >= TWO_PI:
        r = 0.0
    return r


def as_phase_vector(phases: Iterable[float], *, allow_empty: bool = False) -> np.ndarray:
    """Validate phases and return them as a float array.

    Every entry must be finite and lie in ``[0, 2pi]``.
    """
    v = np.asarray(list(phases) if not isinstance(phases, np.ndarray) else phases, dtype=float)
    if v.ndim != 1:
        raise InvalidArgumentError("phase vector must be one-dimensional")
    if v.size == 0 and not allow_empty:
        raise InvalidArgumentError("phase vector must be non-empty")
    if not np.all(np.isfinite(v)):
        raise InvalidArgumentError("phases must be finite")
    if np.any(v < 0.0) or np.any(v > TWO_PI):
        raise InvalidArgumentError("phases must lie in [0, 2pi]")
    return v


def _on_circle(v: np.ndarray) -> np.ndarray:
    out = np.mod(v, TWO_PI)
    out[out >= TWO_PI] = 0.0
    return out


def circular_distance(a: float, b: float) -> float:
    """Length of the shorter of the two arcs between angles ``a`` and ``b``."""
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class CircularArc:
    """Closed arc running counterclockwise from ``start`` for ``length`` radians.

    ``lower`` and ``upper`` hold the (0-based) indices of the phases sitting on
    the start and end point respectively.
    """

    start: float
    length: float
    lower: tuple[int, ...] = ()
    upper: tuple[int, ...] = ()

    @property
    def end(self) -> float:
        return wrap(self.start + self.length)

    def rotated(self, angle: float) -> "CircularArc":
        return CircularArc(wrap(self.start + angle), self.length, self.lower, self.upper)

    def offset_of(self, angle: float, eps: float = EPS_GEOM) -> float:
        """Counterclockwise offset of ``angle`` from ``start``.

        Points just clockwise of ``start`` (within ``eps``) get a small negative
        offset instead of one close to 2pi.
        """
        off = (angle - self.start) % TWO_PI
        if off > TWO_PI - eps:
            off -= TWO_PI
        return off

    def contains_point(self, angle: float, eps: float = EPS_GEOM) -> bool:
        if self.length >= TWO_PI - eps:
            return True
        off = self.offset_of(angle, eps)
        return -eps <= off <= self.length + eps


def diameter(phases: Sequence[float]) -> float:
    """Length of the shortest arc containing every phase point.

    Computed as 2pi minus the widest gap between circularly consecutive points.
    """
    v = np.asarray(phases, dtype=float)
    if v.size == 0:
        raise InvalidArgumentError("diameter of an empty phase vector")
    if v.size == 1:
        return 0.0
    s = np.sort(_on_circle(v))
    gaps = np.empty(s.size)
    gaps[:-1] = np.diff(s)
    gaps[-1] = s[0] + TWO_PI - s[-1]
    d = TWO_PI - float(gaps.max())
    return max(d, 0.0)


def _signed_start(angle: float) -> float:
    # tie-break key: start angle expressed in (-pi, pi]
    return angle - TWO_PI if angle > math.pi else angle


def shortest_arc(phases: Sequence[float], eps: float = EPS_GEOM) -> CircularArc:
    """Shortest arc containing every phase, with its endpoint index sets.

    When several arcs are equally short the one whose start angle, written in
    ``(-pi, pi]``, is smallest wins. Arcs no longer than ``eps`` count as a
    single point: every index is on both ends.
    """
    v = np.asarray(phases, dtype=float)
    if v.size == 0:
        raise InvalidArgumentError("shortest arc of an empty phase vector")
    pts = _on_circle(v)
    n = pts.size
    order = np.argsort(pts, kind="stable")
    s = pts[order]
    if n == 1 or np.all(s == s[0]):
        idx = tuple(range(n))
        return CircularArc(float(s[0]), 0.0, idx, idx)

    gaps = np.empty(n)
    gaps[:-1] = np.diff(s)
    gaps[-1] = s[0] + TWO_PI - s[-1]
    widest = gaps.max()
    # the arc starts right after a widest gap
    candidates = [float(s[(k + 1) % n]) for k in np.flatnonzero(gaps >= widest - eps)]
    start = min(candidates, key=_signed_start)
    length = max(TWO_PI - float(widest), 0.0)
    end = start + length
    if length <= eps:
        idx = tuple(range(n))
        return CircularArc(start, length, idx, idx)

    lower, upper = [], []
    for i, p in enumerate(pts):
        d_lo = circular_distance(p, start)
        d_hi = circular_distance(p, end)
        if d_lo <= eps and d_lo <= d_hi:
            lower.append(i)
        elif d_hi <= eps:
            upper.append(i)
    return CircularArc(start, length, tuple(lower), tuple(upper))


def arc_contains(outer: CircularArc, inner: CircularArc, eps: float = EPS_GEOM) -> bool:
    """True iff every point of ``inner`` lies on ``outer`` (up to ``eps``)."""
    if outer.length >= TWO_PI - eps:
        return True
    if inner.length > outer.length + eps:
        return False
    off = outer.offset_of(inner.start, eps)
    return -eps <= off and off + inner.length <= outer.length + eps


def sync_error(phases: Sequence[float]) -> float:
    """Largest chord ``|exp(i a) - exp(i b)|`` over all pairs of phases."""
    v = np.asarray(phases, dtype=float)
    if v.size == 0:
        raise InvalidArgumentError("sync error of an empty phase vector")
    z = np.exp(1j * _on_circle(v))
    return float(np.abs(z[:, None] - z[None, :]).max())
