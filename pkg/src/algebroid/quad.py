"""Definite integrals on the Riemann surface and path-independence audits.

The integrand w(z) dz is evaluated on the tracked branch; each segment is
integrated by 16-point Gauss-Legendre quadrature with adaptive bisection
until the whole-piece and two-half estimates agree. Because admissible
paths keep a margin from the critical set, the integrand is analytic and
the per-piece rule converges spectrally.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import EndpointGermMismatch, LiftNotClosed, QuadratureStall
from .surface import DefiningEquation, fiber_at, match_to_fiber
from .tracker import (
    BasePath,
    SegmentTracker,
    SurfacePoint,
    ensure_path_clear,
    germ_at,
    loop_path,
    safe_line,
)
from .tracker import _path_margin  # shared margin policy

__all__ = [
    "SurfaceIntegralResult",
    "IntegralElement",
    "AuditReport",
    "ResidueCheck",
    "surface_integral",
    "closed_loop_integral",
    "residue_theorem_check",
    "c_ab",
    "path_independence_audit",
    "integral_element_continuation_check",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = tuple(float(x) for x in _GL_X)
_GL_W = tuple(float(w) for w in _GL_W)
_MAX_DEPTH = 30


@dataclass(frozen=True)
class SurfaceIntegralResult:
    value: complex
    error_estimate: float
    endpoint: SurfacePoint
    closed_on_surface: bool


@dataclass(frozen=True)
class IntegralElement:
    """Integral function element data: c_ab plus its base and target germs."""

    base: SurfacePoint
    target: SurfacePoint
    c_ab: complex


@dataclass(frozen=True)
class ResidueCheck:
    center: complex
    cycle: tuple[int, ...]
    m: int
    loop_value: complex
    residue: complex
    expected: complex  # 2*pi*i * residue
    discrepancy: float


@dataclass(frozen=True)
class AuditReport:
    c_values: tuple[complex, ...]
    pairs: tuple[tuple[int, int, float], ...]
    max_discrepancy: float
    verdict: str  # "independent" | "dependent"
    enclosed_residue_data: tuple[ResidueCheck, ...]


def _eval_piece(state: SegmentTracker, t0: float, t1: float, pos: int):
    tr = state.clone()
    seg = tr.seg
    half = 0.5 * (t1 - t0)
    mid = 0.5 * (t1 + t0)
    acc = 0j
    for x, wt in zip(_GL_X, _GL_W):
        tt = mid + half * x
        tr.advance_to(tt)
        acc += wt * tr.fiber[pos] * seg.deriv(tt)
    tr.advance_to(t1)
    return acc * half, tr


def _bisect(state0: SegmentTracker, t0: float, t1: float, whole: complex,
            pos: int, tol_abs: float, tol_rel: float, depth: int):
    tm = 0.5 * (t0 + t1)
    left, st_m = _eval_piece(state0, t0, tm, pos)
    right, st_end = _eval_piece(st_m, tm, t1, pos)
    halves = left + right
    err = abs(whole - halves)
    if err <= tol_abs * (t1 - t0) + tol_rel * abs(halves):
        return halves, err, st_end
    if depth >= _MAX_DEPTH:
        raise QuadratureStall(
            f"adaptive bisection stalled on [{t0}, {t1}] (err {err:.3e})"
        )
    lv, le, st_after_left = _bisect(state0, t0, tm, left, pos, tol_abs, tol_rel, depth + 1)
    rv, re_, st_end = _bisect(st_after_left, tm, t1, right, pos, tol_abs, tol_rel, depth + 1)
    return lv + rv, le + re_, st_end


def surface_integral(eq: DefiningEquation, start: SurfacePoint, path: BasePath,
                     tol: Tolerances = DEFAULT,
                     delta_path: Optional[float] = None) -> SurfaceIntegralResult:
    """Integral of w(z) dz along the lift of the path from the start germ."""
    start = germ_at(eq, start.z, start.w, tol)
    if not path.segments:
        return SurfaceIntegralResult(0j, 0.0, start, True)
    if abs(path.start_z - start.z) > 1e-9 * (1.0 + abs(start.z)):
        raise ValueError(f"path starts at {path.start_z}, germ sits at {start.z}")
    margin = _path_margin(eq, tol, delta_path)
    ensure_path_clear(path, eq.critical(tol).locations, margin)

    fiber0 = fiber_at(eq, start.z, tol)
    pos = match_to_fiber(start.w, fiber0, tol)
    fiber = list(fiber0.roots)
    fiber[pos] = start.w

    total_len = path.length
    total = 0j
    err = 0.0
    for seg in path.segments:
        frac = seg.length / total_len if total_len > 0 else 1.0 / len(path.segments)
        st0 = SegmentTracker(eq, seg, fiber, tol, h_min=tol.h_min_frac)
        whole, _ = _eval_piece(st0, 0.0, 1.0, pos)
        val, e, st_end = _bisect(
            st0, 0.0, 1.0, whole, pos,
            tol_abs=tol.quad_tol * max(frac, 1e-3),
            tol_rel=tol.quad_tol,
            depth=0,
        )
        total += val
        err += e
        fiber = st_end.fiber

    end_w = fiber[pos]
    endpoint = SurfacePoint(path.end_z, end_w)
    closed = False
    if path.is_closed():
        end_fiber = fiber_at(eq, path.start_z, tol)
        closed = match_to_fiber(end_w, end_fiber, tol) == match_to_fiber(
            start.w, end_fiber, tol
        )
    return SurfaceIntegralResult(total, err, endpoint, closed)


def closed_loop_integral(eq: DefiningEquation, start: SurfacePoint, loop: BasePath,
                         tol: Tolerances = DEFAULT,
                         delta_path: Optional[float] = None) -> SurfaceIntegralResult:
    """Integral over a closed base loop; the lift must close on the surface."""
    if not loop.is_closed():
        raise ValueError("closed_loop_integral requires a closed base path")
    res = surface_integral(eq, start, loop, tol, delta_path)
    if not res.closed_on_surface:
        end_fiber = fiber_at(eq, loop.start_z, tol)
        raise LiftNotClosed(
            "the lift of the loop ends on a different sheet; iterate the loop "
            "to its cycle length to close it on the surface",
            value=res.value,
            end_sheet=match_to_fiber(res.endpoint.w, end_fiber, tol),
        )
    return res


def residue_theorem_check(eq: DefiningEquation, a: complex,
                          epsilon: Optional[float] = None,
                          tol: Tolerances = DEFAULT) -> list[ResidueCheck]:
    """Per cycle at a: the m-turn loop integral against 2*pi*i times the residue."""
    from . import puiseux

    epsilon = puiseux.default_radius(eq, a, tol) if epsilon is None else epsilon
    anchor = a + epsilon
    fiber0 = fiber_at(eq, anchor, tol)
    checks = []
    for cycle in puiseux.cycle_structure(eq, a, epsilon, tol):
        m = len(cycle)
        exp = puiseux.puiseux_expand(eq, a, cycle, epsilon=epsilon, tol=tol)
        loop = loop_path(a, epsilon, m, anchor=anchor)
        start = SurfacePoint(anchor, fiber0.roots[cycle[0]])
        res = closed_loop_integral(eq, start, loop, tol, delta_path=0.5 * epsilon)
        expected = 2j * math.pi * exp.residue
        checks.append(
            ResidueCheck(
                center=a,
                cycle=cycle,
                m=m,
                loop_value=res.value,
                residue=exp.residue,
                expected=expected,
                discrepancy=abs(res.value - expected),
            )
        )
    return checks


def c_ab(eq: DefiningEquation, base: SurfacePoint, target: SurfacePoint,
         path: BasePath, tol: Tolerances = DEFAULT,
         delta_path: Optional[float] = None) -> IntegralElement:
    """Definite integral from the base germ to the target germ along a path."""
    base = germ_at(eq, base.z, base.w, tol)
    target = germ_at(eq, target.z, target.w, tol)
    if not path.segments:
        same_z = abs(base.z - target.z) <= 1e-9 * (1.0 + abs(base.z))
        if not same_z:
            raise ValueError("empty path but distinct base and target points")
        fiber = fiber_at(eq, base.z, tol)
        if match_to_fiber(base.w, fiber, tol) != match_to_fiber(target.w, fiber, tol):
            raise EndpointGermMismatch("empty path cannot connect different sheets")
        return IntegralElement(base, target, 0j)
    if abs(path.end_z - target.z) > 1e-9 * (1.0 + abs(target.z)):
        raise ValueError(f"path ends at {path.end_z}, target sits at {target.z}")
    res = surface_integral(eq, base, path, tol, delta_path)
    fiber = fiber_at(eq, target.z, tol)
    got = match_to_fiber(res.endpoint.w, fiber, tol)
    want = match_to_fiber(target.w, fiber, tol)
    if got != want:
        raise EndpointGermMismatch(
            f"lift reaches z={target.z} on sheet {got}, target germ is sheet {want}"
        )
    return IntegralElement(base, target, res.value)


def path_independence_audit(eq: DefiningEquation, base: SurfacePoint,
                            target: SurfacePoint, paths: Sequence[BasePath],
                            tol: Tolerances = DEFAULT) -> AuditReport:
    """Pairwise c_ab comparison plus residue/period diagnostics."""
    values = tuple(c_ab(eq, base, target, p, tol).c_ab for p in paths)
    pairs = []
    max_disc = 0.0
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            d = abs(values[i] - values[j])
            pairs.append((i, j, d))
            max_disc = max(max_disc, d)
    verdict = "independent" if max_disc < tol.audit_tol else "dependent"
    residue_data = []
    for cp in eq.critical(tol).points:
        residue_data.extend(residue_theorem_check(eq, cp.location, tol=tol))
    return AuditReport(values, tuple(pairs), max_disc, verdict, tuple(residue_data))


def integral_element_continuation_check(
    eq: DefiningEquation,
    element: IntegralElement,
    probe: SurfacePoint,
    path_target_to_probe: Optional[BasePath] = None,
    path_base_to_probe: Optional[BasePath] = None,
    tol: Tolerances = DEFAULT,
) -> float:
    """Direct-continuation defect of the integral element at a probe germ.

    Compares c_ab + integral from the target germ to the probe against the
    integral recomputed through the base. Zero (up to quadrature error) when
    closed loops formed by the two routes have zero period.
    """
    probe = germ_at(eq, probe.z, probe.w, tol)
    margin = _path_margin(eq, tol, None)
    crit = eq.critical(tol).locations
    if path_target_to_probe is None:
        if abs(element.target.z - probe.z) <= 1e-12 * (1.0 + abs(probe.z)):
            path_target_to_probe = BasePath(())
        else:
            path_target_to_probe = safe_line(element.target.z, probe.z, crit, margin)
    if path_base_to_probe is None:
        path_base_to_probe = safe_line(element.base.z, probe.z, crit, margin)
    hop = c_ab(eq, element.target, probe, path_target_to_probe, tol)
    through_base = c_ab(eq, element.base, probe, path_base_to_probe, tol)
    return abs(element.c_ab + hop.c_ab - through_base.c_ab)
