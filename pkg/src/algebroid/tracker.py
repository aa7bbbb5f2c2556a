"""Paths in the base plane and analytic continuation along them.

Continuation tracks the whole fiber at once: a first-order predictor from
the implicit derivative dw/dz = -Psi_z/Psi_W, a Newton corrector on
Psi(., z) = 0, and nearest-neighbor matching between predicted and
corrected roots. The adaptive step keeps per-step root movement below a
quarter of the current minimal pairwise root separation, which is what
prevents two sheets from silently swapping.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .config import DEFAULT, Tolerances
from .errors import (
    PathTooCloseToCritical,
    StepUnderflow,
    TrackingCollision,
)
from .surface import DefiningEquation, fiber_at, match_to_fiber

__all__ = [
    "Line",
    "Arc",
    "BasePath",
    "SurfacePoint",
    "TrackResult",
    "continue_branch",
    "continue_fiber",
    "loop_path",
    "reverse",
    "safe_line",
    "anchored_loop",
    "polyline",
    "germ_at",
    "SegmentTracker",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Line:
    z_from: complex
    z_to: complex

    @property
    def start(self) -> complex:
        return self.z_from

    @property
    def end(self) -> complex:
        return self.z_to

    @property
    def length(self) -> float:
        return abs(self.z_to - self.z_from)

    def at(self, t: float) -> complex:
        return self.z_from + t * (self.z_to - self.z_from)

    def deriv(self, t: float) -> complex:
        return self.z_to - self.z_from

    def reversed(self) -> "Line":
        return Line(self.z_to, self.z_from)

    def min_dist_to(self, p: complex) -> float:
        w = self.z_to - self.z_from
        n2 = abs(w) ** 2
        if n2 == 0.0:
            return abs(p - self.z_from)
        t = ((p - self.z_from) * w.conjugate()).real / n2
        t = min(1.0, max(0.0, t))
        return abs(p - self.at(t))


@dataclass(frozen=True)
class Arc:
    """Circular arc; theta runs monotonically and may sweep several turns."""

    center: complex
    radius: float
    theta_from: float
    theta_to: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("arc radius must be positive")

    @property
    def start(self) -> complex:
        return self.at(0.0)

    @property
    def end(self) -> complex:
        return self.at(1.0)

    @property
    def length(self) -> float:
        return self.radius * abs(self.theta_to - self.theta_from)

    def at(self, t: float) -> complex:
        theta = self.theta_from + t * (self.theta_to - self.theta_from)
        return self.center + self.radius * cmath.exp(1j * theta)

    def deriv(self, t: float) -> complex:
        theta = self.theta_from + t * (self.theta_to - self.theta_from)
        return 1j * self.radius * (self.theta_to - self.theta_from) * cmath.exp(1j * theta)

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.theta_to, self.theta_from)

    def min_dist_to(self, p: complex) -> float:
        rel = p - self.center
        rho = abs(rel)
        sweep = abs(self.theta_to - self.theta_from)
        if sweep >= _TWO_PI:
            return abs(rho - self.radius)
        phi = math.atan2(rel.imag, rel.real)
        lo = min(self.theta_from, self.theta_to)
        frac = (phi - lo) % _TWO_PI
        if frac <= sweep:
            return abs(rho - self.radius)
        return min(abs(p - self.start), abs(p - self.end))


Segment = Line | Arc


@dataclass(frozen=True)
class BasePath:
    segments: tuple[Segment, ...]

    def __init__(self, segments: Sequence[Segment] = ()):
        segments = tuple(segments)
        scale = 1.0
        for s in segments:
            scale = max(scale, abs(s.start), abs(s.end))
        for a, b in zip(segments, segments[1:]):
            if abs(b.start - a.end) > 1e-9 * scale:
                raise ValueError(
                    f"consecutive segments do not share endpoints: {a.end} vs {b.start}"
                )
        object.__setattr__(self, "segments", segments)

    @property
    def start_z(self) -> Optional[complex]:
        return self.segments[0].start if self.segments else None

    @property
    def end_z(self) -> Optional[complex]:
        return self.segments[-1].end if self.segments else None

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    def is_closed(self, rel_tol: float = 1e-9) -> bool:
        if not self.segments:
            return True
        scale = max(1.0, abs(self.start_z))
        return abs(self.end_z - self.start_z) <= rel_tol * scale

    def min_dist_to(self, p: complex) -> float:
        if not self.segments:
            return float("inf")
        return min(s.min_dist_to(p) for s in self.segments)

    def __add__(self, other: "BasePath") -> "BasePath":
        return BasePath(self.segments + other.segments)


def reverse(path: BasePath) -> BasePath:
    """Opposite path: segment order and orientations reversed; an involution."""
    return BasePath(tuple(s.reversed() for s in reversed(path.segments)))


def polyline(*points: complex) -> BasePath:
    return BasePath(tuple(Line(a, b) for a, b in zip(points, points[1:])))


def loop_path(center: complex, radius: float, turns: int, anchor: Optional[complex] = None) -> BasePath:
    """Closed path winding `turns` times about center.

    The anchor is connected to the circle by a straight spoke unless it
    already lies on the circle; anchor=None starts at center + radius.
    """
    if radius <= 0:
        raise ValueError("loop radius must be positive")
    if turns == 0:
        raise ValueError("loop must wind at least once (turns != 0)")
    if anchor is None:
        anchor = center + radius
    rel = anchor - center
    if abs(rel) == 0:
        raise ValueError("anchor coincides with the loop center")
    theta0 = math.atan2(rel.imag, rel.real)
    arc = Arc(center, radius, theta0, theta0 + _TWO_PI * turns)
    if abs(abs(rel) - radius) <= 1e-9 * radius:
        return BasePath((arc,))
    return BasePath((Line(anchor, arc.start), arc, Line(arc.end, anchor)))


@dataclass(frozen=True)
class SurfacePoint:
    """Numeric germ: a point (z, w) with Psi(w, z) = 0 and Psi_W(w, z) != 0."""

    z: complex
    w: complex
    sheet_hint: Optional[int] = None


@dataclass(frozen=True)
class TrackResult:
    endpoint: SurfacePoint
    samples: tuple[tuple[float, complex, complex], ...]
    step_count: int
    min_root_separation: float


def germ_at(eq: DefiningEquation, z: complex, w: complex, tol: Tolerances = DEFAULT) -> SurfacePoint:
    """Polish and validate a germ; rejects irregular (critical) germs."""
    refined = _newton_root(eq, w, z, tol)
    if refined is None:
        raise TrackingCollision(f"({w}, {z}) does not polish to a root of the equation")
    dw = eq.psi_w(refined, z)
    k = eq.k
    dscale = k * max(1.0, abs(refined)) ** (k - 1)
    for j, a in enumerate(eq.a_values(z)[:-1] if k > 1 else []):
        dscale += (k - 1 - j) * abs(a) * max(1.0, abs(refined)) ** (k - 2 - j)
    if abs(dw) <= 1e-8 * max(1.0, dscale):
        raise TrackingCollision(f"germ at ({refined}, {z}) is not regular: Psi_W too small")
    return SurfacePoint(z, refined)


def _newton_root(eq: DefiningEquation, w: complex, z: complex, tol: Tolerances,
                 max_iter: int = 30) -> Optional[complex]:
    for _ in range(max_iter):
        p = eq.psi(w, z)
        dp = eq.psi_w(w, z)
        if dp == 0:
            return None
        step = p / dp
        w = w - step
        if abs(step) <= 1e-15 * (1.0 + abs(w)):
            break
    if abs(eq.psi(w, z)) <= tol.eps_root * eq.residual_scale(w, z):
        return w
    return None


def _min_pairwise(ws: Sequence[complex]) -> float:
    n = len(ws)
    if n < 2:
        return float("inf")
    best = float("inf")
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(ws[i] - ws[j])
            if d < best:
                best = d
    return best


class SegmentTracker:
    """Continues a fiber monotonically along one segment."""

    __slots__ = ("eq", "seg", "tol", "t", "fiber", "h", "h_min", "steps",
                 "min_sep_seen", "on_step")

    def __init__(self, eq: DefiningEquation, seg: Segment, fiber: Sequence[complex],
                 tol: Tolerances, h_min: float, h0: float = 0.25,
                 on_step: Optional[Callable] = None):
        self.eq = eq
        self.seg = seg
        self.tol = tol
        self.t = 0.0
        self.fiber = list(fiber)
        self.h = h0
        self.h_min = h_min
        self.steps = 0
        self.min_sep_seen = _min_pairwise(fiber)
        self.on_step = on_step

    def clone(self) -> "SegmentTracker":
        c = SegmentTracker(self.eq, self.seg, self.fiber, self.tol, self.h_min, self.h)
        c.t = self.t
        c.steps = self.steps
        c.min_sep_seen = self.min_sep_seen
        return c

    def advance_to(self, t_target: float):
        if t_target < self.t - 1e-15:
            raise ValueError("SegmentTracker only advances forward")
        eq, seg, tol = self.eq, self.seg, self.tol
        while self.t < t_target - 1e-15:
            h = min(self.h, t_target - self.t)
            accepted = False
            while True:
                z0 = seg.at(self.t)
                z1 = seg.at(self.t + h)
                dz = z1 - z0
                min_sep0 = _min_pairwise(self.fiber)
                scale = 1.0 + max(abs(w) for w in self.fiber)
                if min_sep0 < tol.delta_sep * scale:
                    raise TrackingCollision(
                        f"tracked roots collided near z={z0} (separation {min_sep0:.3e})"
                    )
                cap = min(0.25 * min_sep0, 0.5 * scale)
                preds = []
                feasible = True
                move = 0.0
                for w in self.fiber:
                    dw = eq.psi_w(w, z0)
                    if dw == 0:
                        feasible = False
                        break
                    d = -eq.psi_z(w, z0) / dw
                    preds.append(w + d * dz)
                    move = max(move, abs(d * dz))
                if feasible and move > cap:
                    feasible = False
                if feasible:
                    corrected = []
                    for p in preds:
                        c = _newton_root(eq, p, z1, tol)
                        if c is None:
                            feasible = False
                            break
                        corrected.append(c)
                if feasible:
                    min_sep1 = _min_pairwise(corrected)
                    drift = max(
                        (abs(c - p) for c, p in zip(corrected, preds)), default=0.0
                    )
                    if drift > 0.25 * min(min_sep0, min_sep1):
                        feasible = False
                if feasible:
                    self.t += h
                    self.fiber = corrected
                    self.steps += 1
                    self.min_sep_seen = min(self.min_sep_seen, min_sep1)
                    if self.on_step is not None:
                        self.on_step(self.t, z1, self.fiber)
                    if move < 0.1 * cap:
                        self.h = min(0.5, h * 1.5)
                    else:
                        self.h = h
                    accepted = True
                    break
                if h <= self.h_min:
                    raise StepUnderflow(
                        f"continuation step underflow near z={seg.at(self.t)}"
                    )
                h *= 0.5
                self.h = h
            if not accepted:  # pragma: no cover - loop always exits via break/raise
                break


def ensure_path_clear(path: BasePath, critical_locs: Sequence[complex], margin: float):
    for c in critical_locs:
        d = path.min_dist_to(c)
        if d < margin:
            raise PathTooCloseToCritical(
                f"path passes within {d:.3e} of critical point {c} (margin {margin:.3e})"
            )


def _path_margin(eq: DefiningEquation, tol: Tolerances, delta_path: Optional[float]) -> float:
    crit = eq.critical(tol)
    if delta_path is not None:
        return delta_path
    return tol.delta_path_factor * crit.scale


def _run_path(eq: DefiningEquation, fiber: Sequence[complex], path: BasePath,
              tol: Tolerances, delta_path: Optional[float],
              on_step: Optional[Callable] = None):
    """Continue a whole fiber through every segment of a path."""
    margin = _path_margin(eq, tol, delta_path)
    ensure_path_clear(path, eq.critical(tol).locations, margin)
    total_len = path.length
    steps = 0
    min_sep = _min_pairwise(fiber)
    done_len = 0.0
    current = list(fiber)
    for seg in path.segments:
        seg_w = seg.length / total_len if total_len > 0 else 1.0 / len(path.segments)
        base = done_len

        cb = None
        if on_step is not None:
            cb = lambda t, z, f, base=base, seg_w=seg_w: on_step(base + t * seg_w, z, f)
        trk = SegmentTracker(
            eq, seg, current, tol,
            h_min=tol.h_min_frac, on_step=cb,
        )
        trk.advance_to(1.0)
        current = trk.fiber
        steps += trk.steps
        min_sep = min(min_sep, trk.min_sep_seen)
        done_len += seg_w
    return current, steps, min_sep


def continue_fiber(eq: DefiningEquation, fiber: Sequence[complex], path: BasePath,
                   tol: Tolerances = DEFAULT, delta_path: Optional[float] = None) -> list[complex]:
    """End fiber in position order (position j continues the j-th start root)."""
    end, _, _ = _run_path(eq, fiber, path, tol, delta_path)
    return end


def continue_branch(eq: DefiningEquation, start: SurfacePoint, path: BasePath,
                    tol: Tolerances = DEFAULT, delta_path: Optional[float] = None) -> TrackResult:
    """Analytic continuation of the start germ along the path."""
    start = germ_at(eq, start.z, start.w, tol)
    if not path.segments:
        return TrackResult(start, ((0.0, start.z, start.w),), 0, float("inf"))
    if abs(path.start_z - start.z) > 1e-9 * (1.0 + abs(start.z)):
        raise ValueError(f"path starts at {path.start_z}, germ sits at {start.z}")
    fiber0 = fiber_at(eq, start.z, tol)
    pos = match_to_fiber(start.w, fiber0, tol)
    roots = list(fiber0.roots)
    roots[pos] = start.w  # keep the polished germ value

    samples = [(0.0, start.z, start.w)]

    def record(t, z, fiber):
        samples.append((t, z, fiber[pos]))

    end, steps, min_sep = _run_path(eq, roots, path, tol, delta_path, on_step=record)
    endpoint = SurfacePoint(path.end_z, end[pos])
    return TrackResult(endpoint, tuple(samples), steps, min_sep)


# --- deterministic path construction ----------------------------------------


def _detour_candidates(z0: complex, z1: complex, margin: float, rng=None):
    span = abs(z1 - z0)
    unit = (z1 - z0) / span if span > 0 else 1.0
    normal = 1j * unit
    mid = 0.5 * (z0 + z1)
    for f in (0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0):
        yield mid + normal * f * max(span, 4.0 * margin)
    if rng is not None:
        for _ in range(16):
            ang = rng.uniform(0.0, _TWO_PI)
            rad = rng.uniform(1.0, 3.0) * max(span, 4.0 * margin)
            yield mid + rad * cmath.exp(1j * ang)


def safe_line(z0: complex, z1: complex, critical_locs: Sequence[complex],
              margin: float, rng=None) -> BasePath:
    """Straight line from z0 to z1, detouring via one waypoint when the
    segment violates the critical-point margin."""
    direct = Line(z0, z1)
    if all(direct.min_dist_to(c) >= margin for c in critical_locs):
        return BasePath((direct,))
    for wp in _detour_candidates(z0, z1, margin, rng):
        legs = (Line(z0, wp), Line(wp, z1))
        if all(l.min_dist_to(c) >= margin for l in legs for c in critical_locs):
            return BasePath(legs)
    raise PathTooCloseToCritical(
        f"could not route a path from {z0} to {z1} clear of the critical set"
    )


def anchored_loop(center: complex, radius: float, base: complex,
                  critical_locs: Sequence[complex], margin: float, rng=None) -> BasePath:
    """Spoke from base to the circle about center, the full circle, and back."""
    rel = base - center
    if abs(rel) == 0:
        raise ValueError("loop base coincides with the encircled point")
    theta0 = math.atan2(rel.imag, rel.real)
    arc = Arc(center, radius, theta0, theta0 + _TWO_PI)
    others = [c for c in critical_locs if abs(c - center) > 1e-12 * max(1.0, abs(center))]
    if abs(abs(rel) - radius) <= 1e-9 * radius:
        return BasePath((arc,))
    spoke_in = safe_line(base, arc.start, others, margin, rng)
    spoke_out = reverse(BasePath(spoke_in.segments))
    # splice so consecutive endpoints agree exactly
    segs = spoke_in.segments + (arc,)
    out_first = spoke_out.segments[0]
    if isinstance(out_first, Line):
        segs = segs + (Line(arc.end, out_first.z_to),) + spoke_out.segments[1:]
    else:  # pragma: no cover - spokes are always lines
        segs = segs + spoke_out.segments
    return BasePath(segs)
