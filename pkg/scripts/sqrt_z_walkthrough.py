#!/usr/bin/env python3
"""End-to-end walkthrough on W^2 - z = 0, the 2-valued square root.

Classifies the branch point, checks the loop-residue identity, audits path
independence, and reconstructs the antiderivative equation
M^2 - (4/9) z^3 = 0. Run from the repo root:

    python3 scripts/sqrt_z_walkthrough.py
"""

import math

from algebroid import (
    BasePath,
    Line,
    SurfacePoint,
    build_antiderivative,
    constant_family,
    irreducibility_check,
    loop_path,
    path_independence_audit,
    polyline,
    puiseux_expand,
    residue_by_contour,
    residue_theorem_check,
    surface_integral,
    verify_antiderivative,
)
from algebroid.surface import DefiningEquation


def main():
    eq = DefiningEquation.from_strings(["0", "-z"])
    print("equation: W^2 - z = 0")

    crit = eq.critical()
    print(f"critical points: {[(p.location, p.kind) for p in crit.points]}")
    print(f"monodromy transitive: {irreducibility_check(eq, 1.0).transitive}")

    exp = puiseux_expand(eq, 0j, (0, 1))
    print(f"\npuiseux at 0: m={exp.m}, u={exp.u}")
    print(f"  leading coefficient B_{exp.u} = {exp.coeffs[exp.u]:.12g}")
    print(f"  residue (series)  = {exp.residue:.3e}")
    print(f"  residue (contour) = {residue_by_contour(eq, 0j, (0, 1)):.3e}")
    check = residue_theorem_check(eq, 0j)[0]
    print(f"  loop vs 2*pi*i*residue discrepancy = {check.discrepancy:.3e}")

    base = SurfacePoint(1, 1)
    line = BasePath((Line(1, 4),))
    res = surface_integral(eq, base, line)
    print(f"\nintegral of sqrt(z) along 1 -> 4: {res.value:.12g} (exact 14/3)")

    loop = loop_path(0, 1.0, 2, anchor=1.0 + 0j)
    gamma2 = surface_integral(eq, base, loop)
    print(f"two-turn loop about 0: {abs(gamma2.value):.3e} (closed lift, zero residue)")

    audit = path_independence_audit(
        eq, base, SurfacePoint(4, 2),
        [line, polyline(1, 1 + 2j, 4 + 2j, 4), polyline(1, 1 - 2j, 4 - 2j, 4)],
    )
    print(f"\npath independence over 3 routes: verdict={audit.verdict}, "
          f"max discrepancy={audit.max_discrepancy:.3e}")

    model = build_antiderivative(eq, base, c=2.0 / 3.0)
    print("\nantiderivative model (c chosen so F(1) = 2/3):")
    for j, coeff in enumerate(model.coeffs, start=1):
        print(f"  B_{j}(z) = {coeff}")
    print(f"  fit residuals: {[f'{r:.2e}' for r in model.diagnostics.residuals]}")
    print(f"  derivative defect M' vs W: "
          f"{verify_antiderivative(model, eq):.3e}")

    shifted = constant_family(model, 1.0)
    print("family member with constant shifted by 1:")
    for j, coeff in enumerate(shifted, start=1):
        print(f"  B_{j}(z) = {coeff}")


if __name__ == "__main__":
    main()
