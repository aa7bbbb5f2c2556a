"""Surface integrals, the loop-residue identity, and path audits."""

import cmath
import math

import numpy as np
import pytest

from algebroid.config import DEFAULT
from algebroid.errors import EndpointGermMismatch, LiftNotClosed
from algebroid.exactalg import GaussianRational
from algebroid.quad import (
    c_ab,
    closed_loop_integral,
    integral_element_continuation_check,
    path_independence_audit,
    residue_theorem_check,
    surface_integral,
)
from algebroid.surface import fiber_at
from algebroid.tracker import (
    Arc,
    BasePath,
    Line,
    SurfacePoint,
    loop_path,
    polyline,
    reverse,
)

TWO_PI_I = 2j * math.pi


def test_line_integral_principal_sqrt(sqrt_z):
    # oracle: antiderivative (2/3) z^(3/2); value (2/3)(8 - 1) = 14/3
    res = surface_integral(sqrt_z, SurfacePoint(1, 1), BasePath((Line(1, 4),)))
    assert res.value == pytest.approx(14.0 / 3.0, abs=1e-10)
    assert res.endpoint.w == pytest.approx(2.0, abs=1e-9)
    assert res.error_estimate >= 0


def test_gamma2_loop_vanishes(sqrt_z):
    eps = 0.25
    start = SurfacePoint(eps, math.sqrt(eps))
    loop = loop_path(0, eps, 2, anchor=eps)
    res = surface_integral(sqrt_z, start, loop, delta_path=0.5 * eps)
    assert abs(res.value) < 1e-9
    assert res.closed_on_surface


def test_recip_unit_circle_classical_residue(recip_z):
    res = surface_integral(recip_z, SurfacePoint(1, 1), loop_path(0, 1.0, 1))
    assert res.value == pytest.approx(TWO_PI_I, abs=1e-10)


def test_closed_loop_lift_not_closed(sqrt_z):
    with pytest.raises(LiftNotClosed):
        closed_loop_integral(sqrt_z, SurfacePoint(1, 1), loop_path(0, 1.0, 1))


def test_closed_loop_no_singular_element(sqrt_z):
    loop = loop_path(5.0 + 0j, 1.0, 1)
    start = SurfacePoint(6.0, math.sqrt(6.0))
    res = closed_loop_integral(sqrt_z, start, loop)
    assert abs(res.value) < 1e-10


def test_closed_loop_period_at_infinity(circle_eq):
    # sqrt(1+z^2) = z + 1/(2z) + ... for large z: one turn gives pi*i
    loop = loop_path(0, 3.0, 1)
    start = SurfacePoint(3.0, math.sqrt(10.0))
    res = closed_loop_integral(circle_eq, start, loop)
    assert res.value == pytest.approx(1j * math.pi, abs=1e-8)


def test_residue_theorem_check_sqrt(sqrt_z):
    checks = residue_theorem_check(sqrt_z, 0j)
    assert len(checks) == 1
    c = checks[0]
    assert abs(c.loop_value) < 1e-9
    assert abs(c.expected) < 1e-9
    assert c.discrepancy < 1e-9


def test_residue_theorem_check_recip(recip_z):
    c = residue_theorem_check(recip_z, 0j)[0]
    assert c.loop_value == pytest.approx(TWO_PI_I, abs=1e-10)
    assert c.expected == pytest.approx(TWO_PI_I, abs=1e-10)
    assert c.discrepancy < 1e-10


def test_residue_theorem_check_circle(circle_eq):
    c = residue_theorem_check(circle_eq, 1j)[0]
    assert abs(c.loop_value) < 1e-8
    assert c.discrepancy < 1e-8


def test_c_ab_straight_line(sqrt_z):
    el = c_ab(sqrt_z, SurfacePoint(1, 1), SurfacePoint(4, 2), BasePath((Line(1, 4),)))
    assert el.c_ab == pytest.approx(14.0 / 3.0, abs=1e-10)


def test_c_ab_empty_path(sqrt_z):
    el = c_ab(sqrt_z, SurfacePoint(1, 1), SurfacePoint(1, 1), BasePath(()))
    assert el.c_ab == 0


def test_c_ab_monodromy_detour(sqrt_z):
    # one turn about 0 (lands on the negative branch), then the line 1 -> 4:
    # -4/3 + (-14/3) = -6
    path = loop_path(0, 1.0, 1, anchor=1.0 + 0j) + BasePath((Line(1, 4),))
    el = c_ab(sqrt_z, SurfacePoint(1, 1), SurfacePoint(4, -2), path)
    assert el.c_ab == pytest.approx(-6.0, abs=1e-9)


def test_c_ab_rejects_wrong_sheet(sqrt_z):
    with pytest.raises(EndpointGermMismatch):
        c_ab(sqrt_z, SurfacePoint(1, 1), SurfacePoint(4, -2), BasePath((Line(1, 4),)))


def test_audit_independent_sqrt(sqrt_z):
    base, target = SurfacePoint(1, 1), SurfacePoint(4, 2)
    paths = [
        BasePath((Line(1, 4),)),
        polyline(1, 1 + 2j, 4 + 2j, 4),
        polyline(1, 1 - 2j, 4 - 2j, 4),
    ]
    report = path_independence_audit(sqrt_z, base, target, paths)
    assert report.verdict == "independent"
    assert report.max_discrepancy < 1e-9
    assert all(abs(rc.residue) < 1e-9 for rc in report.enclosed_residue_data)


def test_audit_dependent_recip(recip_z):
    base, target = SurfacePoint(1, 1), SurfacePoint(-1, -1)
    upper = BasePath((Arc(0, 1.0, 0.0, math.pi),))
    lower = BasePath((Arc(0, 1.0, 0.0, -math.pi),))
    report = path_independence_audit(recip_z, base, target, [upper, lower])
    assert report.verdict == "dependent"
    assert report.max_discrepancy == pytest.approx(2 * math.pi, abs=1e-10)


def test_audit_single_path_trivially_independent(sqrt_z):
    report = path_independence_audit(
        sqrt_z, SurfacePoint(1, 1), SurfacePoint(4, 2), [BasePath((Line(1, 4),))]
    )
    assert report.verdict == "independent"
    assert report.max_discrepancy == 0.0


def test_integral_element_continuation(sqrt_z):
    # c_{a,b} + int_b^u = c_{a,u} on the principal branch: both are
    # (2/3)(27) - (2/3)(1)
    el = c_ab(sqrt_z, SurfacePoint(1, 1), SurfacePoint(4, 2), BasePath((Line(1, 4),)))
    defect = integral_element_continuation_check(
        sqrt_z, el, SurfacePoint(9, 3), BasePath((Line(4, 9),))
    )
    assert defect < 1e-9


def test_integral_element_continuation_trivial(sqrt_z):
    el = c_ab(sqrt_z, SurfacePoint(1, 1), SurfacePoint(4, 2), BasePath((Line(1, 4),)))
    defect = integral_element_continuation_check(
        sqrt_z, el, SurfacePoint(4, 2), BasePath(())
    )
    assert defect < 1e-10


def test_integral_element_winding_defect(recip_z):
    # routes that wind differently about 0 disagree by the period 2*pi*i
    el = c_ab(recip_z, SurfacePoint(1, 1), SurfacePoint(2, 0.5), BasePath((Line(1, 2),)))
    probe = SurfacePoint(3, 1.0 / 3.0)
    winding = BasePath((Line(2, 3),)) + loop_path(0, 3.0, 1, anchor=3.0 + 0j)
    through_base = BasePath((Line(1, 3),))
    defect = integral_element_continuation_check(
        recip_z, el, probe, path_target_to_probe=winding, path_base_to_probe=through_base
    )
    assert defect == pytest.approx(2 * math.pi, abs=1e-9)


# --- algebraic properties of the integral (random paths) ---------------------


def _random_admissible_path(rng, start, end):
    """Polyline from start to end through 1-3 waypoints in the right half plane."""
    pts = [start]
    for _ in range(rng.integers(1, 4)):
        pts.append(complex(rng.uniform(0.5, 5.0), rng.uniform(-3.0, 3.0)))
    pts.append(end)
    return polyline(*pts)


def test_linearity_under_scaling(sqrt_z):
    rng = np.random.default_rng(7)
    alpha = GaussianRational.of(3) / GaussianRational.of(2)
    scaled = sqrt_z.scaled_by(alpha)
    af = complex(alpha)
    for _ in range(10):
        path = _random_admissible_path(rng, 1.0 + 0j, 4.0 + 0j)
        base = surface_integral(sqrt_z, SurfacePoint(1, 1), path)
        lifted = surface_integral(scaled, SurfacePoint(1, af), path)
        assert abs(lifted.value - af * base.value) < 1e-9 * max(1.0, abs(base.value))


def test_reversal_negates(sqrt_z):
    rng = np.random.default_rng(8)
    for _ in range(10):
        path = _random_admissible_path(rng, 1.0 + 0j, 4.0 + 0j)
        fwd = surface_integral(sqrt_z, SurfacePoint(1, 1), path)
        back = surface_integral(sqrt_z, fwd.endpoint, reverse(path))
        assert abs(fwd.value + back.value) < 1e-10


def test_subdivision_adds(sqrt_z):
    rng = np.random.default_rng(9)
    for _ in range(10):
        mid = complex(rng.uniform(1.5, 3.5), rng.uniform(-2.0, 2.0))
        first = polyline(1, mid)
        second = polyline(mid, 4)
        joined = polyline(1, mid, 4)
        a = surface_integral(sqrt_z, SurfacePoint(1, 1), first)
        b = surface_integral(sqrt_z, a.endpoint, second)
        c = surface_integral(sqrt_z, SurfacePoint(1, 1), joined)
        assert abs(a.value + b.value - c.value) < 1e-10
