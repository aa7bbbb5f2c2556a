"""Puiseux extraction, residues, and growth bounds."""

import cmath
import math

import pytest

from algebroid.config import DEFAULT
from algebroid.puiseux import (
    PuiseuxExpansion,
    cycle_structure,
    default_radius,
    growth_bound,
    puiseux_expand,
    residue,
    residue_by_contour,
    singular_elements,
)
from algebroid.surface import fiber_at
from algebroid.tracker import Arc, SegmentTracker


def test_cycle_structure_sqrt_z(sqrt_z):
    cycles = cycle_structure(sqrt_z, 0j)
    assert cycles == [(0, 1)]


def test_cycle_structure_circle_eq(circle_eq):
    cycles = cycle_structure(circle_eq, 1j)
    assert cycles == [(0, 1)]


def test_cycle_structure_split(split_eq):
    cycles = cycle_structure(split_eq, 0j)
    assert cycles == [(0,), (1,)]


def test_cycles_partition_sheets(sqrt_z, circle_eq, split_eq, recip_z):
    for eq in (sqrt_z, circle_eq, split_eq, recip_z):
        for cp in eq.critical().points:
            cycles = cycle_structure(eq, cp.location)
            flat = sorted(s for c in cycles for s in c)
            assert flat == list(range(eq.k))


def test_puiseux_sqrt_z(sqrt_z):
    exp = puiseux_expand(sqrt_z, 0j, (0, 1))
    assert exp.m == 2
    assert exp.u == 1
    assert exp.coeffs[1] == pytest.approx(1.0, abs=1e-10)
    others = [abs(b) for n, b in exp.coeffs.items() if n != 1]
    assert all(v < 1e-10 for v in others)


def test_puiseux_recip_z(recip_z):
    exp = puiseux_expand(recip_z, 0j, (0,))
    assert exp.m == 1
    assert exp.u == -1
    assert exp.coeffs[-1] == pytest.approx(1.0, abs=1e-10)


def test_puiseux_circle_eq_leading_coefficient(circle_eq):
    exp = puiseux_expand(circle_eq, 1j, (0, 1))
    assert exp.m == 2
    assert exp.u == 1
    # leading coefficient is the principal square root of 2i
    assert exp.coeffs[1] == pytest.approx(cmath.sqrt(2j), abs=1e-8)


def test_residue_values(sqrt_z, recip_z):
    assert residue(puiseux_expand(sqrt_z, 0j, (0, 1))) == pytest.approx(0.0, abs=1e-10)
    assert residue(puiseux_expand(recip_z, 0j, (0,))) == pytest.approx(1.0, abs=1e-10)


def test_residue_synthetic_definition():
    exp = PuiseuxExpansion(0j, 2, -2, {-2: 3.0 + 0j}, (0, 1), 0, 0.5, 32)
    assert residue(exp) == pytest.approx(6.0)


def test_residue_by_contour_matches(sqrt_z, recip_z, circle_eq):
    assert abs(residue_by_contour(sqrt_z, 0j, (0, 1))) < 1e-10
    assert residue_by_contour(recip_z, 0j, (0,)) == pytest.approx(1.0, abs=1e-10)
    assert abs(residue_by_contour(circle_eq, 1j, (0, 1))) < 1e-8


def test_lemma2_identity_on_suite(sqrt_z, recip_z, circle_eq):
    # series residue and contour residue agree on every singular element
    for eq in (sqrt_z, recip_z, circle_eq):
        for cp in eq.critical().points:
            for cycle in cycle_structure(eq, cp.location):
                r_series = residue(puiseux_expand(eq, cp.location, cycle))
                r_contour = residue_by_contour(eq, cp.location, cycle)
                assert abs(r_series - r_contour) < 1e-8


def test_two_radius_consistency(sqrt_z, recip_z):
    for eq in (sqrt_z, recip_z):
        eps = default_radius(eq, 0j)
        cycle = cycle_structure(eq, 0j)[0]
        a = puiseux_expand(eq, 0j, cycle, epsilon=eps, consistency_check=False)
        b = puiseux_expand(eq, 0j, cycle, epsilon=eps / 2, consistency_check=False)
        scale = max(max(abs(v) for v in a.coeffs.values()),
                    max(abs(v) for v in b.coeffs.values()))
        for n in range(-DEFAULT.n_max // 2, DEFAULT.n_max // 2 + 1):
            va = a.coeffs.get(n, 0j)
            vb = b.coeffs.get(n, 0j)
            if max(abs(va), abs(vb)) > DEFAULT.tol_coeff * scale:
                assert abs(va - vb) <= 1e-8 * scale


def test_reconstruction_matches_tracked_branch(circle_eq):
    # truncated series vs the tracked lift on the half-radius circle
    a = 1j
    eps = default_radius(circle_eq, a)
    exp = puiseux_expand(circle_eq, a, (0, 1), epsilon=eps)
    rho = eps / 2
    fiber = fiber_at(circle_eq, a + rho)
    w_scale = max(abs(r) for r in fiber.roots)
    # windows onto the branch: match the series value at theta=0 to a sheet
    t0 = rho ** (1 / exp.m)
    pos = min(range(len(fiber.roots)),
              key=lambda i: abs(fiber.roots[i] - exp.series_value(t0)))
    assert abs(fiber.roots[pos] - exp.series_value(t0)) < 1e-6 * w_scale
    arc = Arc(a, rho, 0.0, 2 * math.pi * exp.m)
    trk = SegmentTracker(circle_eq, arc, list(fiber.roots), DEFAULT,
                         h_min=DEFAULT.h_min_frac)
    n_check = 16
    for j in range(1, n_check):
        t_par = j / n_check
        trk.advance_to(t_par)
        theta = 2 * math.pi * exp.m * t_par
        t = rho ** (1 / exp.m) * cmath.exp(1j * theta / exp.m)
        assert abs(exp.series_value(t) - trk.fiber[pos]) < 1e-6 * w_scale


def test_growth_bound(sqrt_z, recip_z):
    assert growth_bound(sqrt_z, 0j) == 0
    assert growth_bound(recip_z, 0j) == 1
    assert growth_bound(sqrt_z, 5.0 + 0j) == 0


def test_singular_element_classification(sqrt_z, recip_z, circle_eq):
    rep = singular_elements(sqrt_z, 0j)
    assert len(rep.cycles) == 1
    assert rep.cycles[0].classification == "algebraic-element"

    rep = singular_elements(recip_z, 0j)
    assert rep.cycles[0].classification == "pole-element"

    rep = singular_elements(circle_eq, 1j)
    assert rep.cycles[0].classification == "algebraic-element"
    assert rep.cycles[0].residue == pytest.approx(0.0, abs=1e-9)


def test_radius_validation(circle_eq):
    # half the gap between i and -i is 1.0; radius must stay below it
    with pytest.raises(ValueError):
        puiseux_expand(circle_eq, 1j, (0, 1), epsilon=1.5)


def test_pole_branch_point_is_both():
    # W^2 - 1/z: two sheets collapsing at a coefficient pole
    from algebroid.surface import DefiningEquation

    eq = DefiningEquation.from_strings(["0", "-1/z"])
    rep = singular_elements(eq, 0j)
    assert len(rep.cycles) == 1
    cyc = rep.cycles[0]
    assert cyc.classification == "both"
    assert cyc.expansion.m == 2
    assert cyc.expansion.u == -1
    assert abs(cyc.residue) < 1e-9
    assert growth_bound(eq, 0j) == 1
