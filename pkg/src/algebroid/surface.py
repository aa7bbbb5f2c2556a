"""The defining equation, its critical set, numeric fibers, and monodromy.

A defining equation W^k + A_1(z) W^(k-1) + ... + A_k(z) = 0 with rational
A_j determines a k-sheeted surface over the z-plane. Away from the critical
set (discriminant zeros and coefficient poles) the fiber consists of k
distinct roots; loops in the punctured plane permute them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .config import DEFAULT, Tolerances
from .errors import NearCriticalPoint, RootFindingFailure, TrackingCollision
from .exactalg import GaussianRational, RatFunc, discriminant, parse_coefficient
from .rootfind import all_roots, newton_polish

__all__ = [
    "DefiningEquation",
    "CriticalPoint",
    "CriticalSet",
    "Fiber",
    "SheetPermutation",
    "IrreducibilityResult",
    "critical_points",
    "fiber_at",
    "monodromy",
    "irreducibility_check",
    "generator_loops",
]

KIND_DISC = "discriminant-zero"
KIND_POLE = "coefficient-pole"
KIND_BOTH = "both"


class DefiningEquation:
    """Immutable defining equation; rejects non-squarefree input at build time."""

    def __init__(self, k: int, coeffs: Sequence[RatFunc]):
        if k < 1:
            raise ValueError("sheet count k must be at least 1")
        coeffs = tuple(RatFunc.of(c) for c in coeffs)
        if len(coeffs) != k:
            raise ValueError(f"expected {k} coefficients, got {len(coeffs)}")
        self.k = k
        self.coeffs = coeffs
        self.disc = discriminant(coeffs)  # raises IdenticallyZeroDiscriminant
        self._dcoeffs = tuple(c.derivative() for c in coeffs)
        self._critical_cache: dict[Tolerances, CriticalSet] = {}

    @classmethod
    def from_strings(cls, exprs: Sequence[str]) -> "DefiningEquation":
        return cls(len(exprs), [parse_coefficient(e) for e in exprs])

    @property
    def max_coeff_degree(self) -> int:
        return max((c.degree for c in self.coeffs), default=0)

    def a_values(self, z: complex) -> list[complex]:
        return [c.eval_complex(z) for c in self.coeffs]

    def psi_coeffs_at(self, z: complex) -> list[complex]:
        """Coefficients of Psi(., z) ascending in W."""
        vals = self.a_values(z)
        return list(reversed(vals)) + [1.0 + 0j]

    def psi(self, w: complex, z: complex) -> complex:
        acc = 1.0 + 0j
        for a in self.a_values(z):
            acc = acc * w + a
        return acc

    def psi_w(self, w: complex, z: complex) -> complex:
        vals = self.a_values(z)
        k = self.k
        acc = complex(k)
        for j in range(1, k):
            acc = acc * w + (k - j) * vals[j - 1]
        return acc

    def psi_z(self, w: complex, z: complex) -> complex:
        acc = 0j
        for d in self._dcoeffs:
            acc = acc * w + (0j if d.is_zero() else d.eval_complex(z))
        return acc

    def residual_scale(self, w: complex, z: complex) -> float:
        aw = abs(w)
        s = aw**self.k
        power = aw ** (self.k - 1)
        for a in self.a_values(z):
            s += abs(a) * power
            power = power / aw if aw > 0 else 0.0
        return max(s, 1.0)

    def critical(self, tol: Tolerances = DEFAULT) -> "CriticalSet":
        cached = self._critical_cache.get(tol)
        if cached is None:
            cached = critical_points(self, tol)
            self._critical_cache[tol] = cached
        return cached

    def scaled_by(self, alpha: GaussianRational) -> "DefiningEquation":
        """Equation of alpha*W(z): substitutes A_j -> alpha^j A_j."""
        alpha = GaussianRational.of(alpha)
        factor = RatFunc.constant(alpha)
        scaled = []
        acc = RatFunc.one()
        for c in self.coeffs:
            acc = acc * factor
            scaled.append(acc * c)
        return DefiningEquation(self.k, scaled)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DefiningEquation)
            and self.k == other.k
            and self.coeffs == other.coeffs
        )

    def __repr__(self) -> str:
        terms = ", ".join(str(c) for c in self.coeffs)
        return f"DefiningEquation(k={self.k}, [{terms}])"


@dataclass(frozen=True)
class CriticalPoint:
    location: complex
    kind: str  # KIND_DISC | KIND_POLE | KIND_BOTH


@dataclass(frozen=True)
class CriticalSet:
    points: tuple[CriticalPoint, ...]

    @property
    def locations(self) -> tuple[complex, ...]:
        return tuple(p.location for p in self.points)

    @property
    def scale(self) -> float:
        if not self.points:
            return 1.0
        return max(1.0, max(abs(p.location) for p in self.points))

    def min_dist(self, z: complex) -> float:
        if not self.points:
            return float("inf")
        return min(abs(z - p.location) for p in self.points)

    def nearest_other_dist(self, loc: complex) -> float:
        """Distance from loc to the nearest critical point other than itself."""
        best = float("inf")
        for p in self.points:
            d = abs(p.location - loc)
            if d > 1e-12 * self.scale:
                best = min(best, d)
        return best

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Fiber:
    z: complex
    roots: tuple[complex, ...]

    @property
    def scale(self) -> float:
        return 1.0 + max((abs(r) for r in self.roots), default=0.0)

    @property
    def min_separation(self) -> float:
        rs = self.roots
        if len(rs) < 2:
            return float("inf")
        return min(
            abs(rs[i] - rs[j]) for i in range(len(rs)) for j in range(i + 1, len(rs))
        )


@dataclass(frozen=True)
class SheetPermutation:
    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(len(self.image))):
            raise ValueError(f"not a permutation: {self.image}")

    def __call__(self, j: int) -> int:
        return self.image[j]

    def compose(self, other: "SheetPermutation") -> "SheetPermutation":
        """self after other: (self.compose(other))(j) = self(other(j))."""
        return SheetPermutation(tuple(self.image[other.image[j]] for j in range(len(self.image))))

    def inverse(self) -> "SheetPermutation":
        inv = [0] * len(self.image)
        for j, m in enumerate(self.image):
            inv[m] = j
        return SheetPermutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(m == j for j, m in enumerate(self.image))

    def orbits(self) -> list[tuple[int, ...]]:
        """Cycles in traversal order, each starting at its smallest element."""
        seen = [False] * len(self.image)
        out = []
        for j in range(len(self.image)):
            if seen[j]:
                continue
            cyc = []
            m = j
            while not seen[m]:
                seen[m] = True
                cyc.append(m)
                m = self.image[m]
            out.append(tuple(cyc))
        return out


def critical_points(eq: DefiningEquation, tol: Tolerances = DEFAULT) -> CriticalSet:
    """Discriminant zeros and coefficient poles, clustered and tagged."""
    candidates: list[tuple[complex, str]] = []
    disc_num = eq.disc.num
    if disc_num.degree >= 1:
        fc = disc_num._float_coeffs()
        for r in all_roots(fc):
            p = newton_polish(fc, r)
            candidates.append((p if p is not None else r, KIND_DISC))
    for c in eq.coeffs:
        if c.den.degree >= 1:
            fc = c.den._float_coeffs()
            for r in all_roots(fc):
                p = newton_polish(fc, r)
                candidates.append((p if p is not None else r, KIND_POLE))

    if not candidates:
        return CriticalSet(())
    scale = max(1.0, max(abs(z) for z, _ in candidates))
    radius = tol.tol_cluster * scale
    clusters: list[tuple[list[complex], set[str]]] = []
    for z, kind in candidates:
        for locs, kinds in clusters:
            if abs(z - locs[0]) <= radius:
                locs.append(z)
                kinds.add(kind)
                break
        else:
            clusters.append(([z], {kind}))
    points = []
    for locs, kinds in clusters:
        loc = sum(locs) / len(locs)
        kind = KIND_BOTH if len(kinds) > 1 else kinds.pop()
        points.append(CriticalPoint(loc, kind))
    points.sort(key=lambda p: (p.location.real, p.location.imag))
    return CriticalSet(tuple(points))


def fiber_at(eq: DefiningEquation, z: complex, tol: Tolerances = DEFAULT) -> Fiber:
    """All k roots of Psi(., z), Newton-polished and canonically ordered."""
    crit = eq.critical(tol)
    if crit.min_dist(z) < tol.tol_cluster * crit.scale:
        raise NearCriticalPoint(f"z={z} is within the critical-point exclusion zone")
    coeffs = eq.psi_coeffs_at(z)
    roots = all_roots(coeffs)
    polished = []
    for r in roots:
        p = newton_polish(coeffs, r)
        polished.append(p if p is not None else r)
    for w in polished:
        if abs(eq.psi(w, z)) > tol.eps_root * eq.residual_scale(w, z):
            raise RootFindingFailure(f"fiber root residual too large at z={z}")
    fiber = Fiber(z, tuple(sorted(polished, key=lambda w: (w.real, w.imag))))
    if fiber.min_separation < tol.delta_sep * fiber.scale:
        raise RootFindingFailure(f"fiber roots not separated at z={z}")
    return fiber


def match_to_fiber(w: complex, fiber: Fiber, tol: Tolerances = DEFAULT) -> int:
    """Index of the unique fiber root within the germ-matching distance."""
    limit = tol.germ_match_frac * min(fiber.min_separation, 2.0 * fiber.scale)
    best, best_d = -1, float("inf")
    for idx, r in enumerate(fiber.roots):
        d = abs(w - r)
        if d < best_d:
            best, best_d = idx, d
    if best_d > limit:
        raise TrackingCollision(
            f"value {w} does not match any fiber root at z={fiber.z} "
            f"(nearest distance {best_d:.3e}, limit {limit:.3e})"
        )
    return best


def monodromy(
    eq: DefiningEquation,
    loop,
    tol: Tolerances = DEFAULT,
    delta_path: Optional[float] = None,
) -> SheetPermutation:
    """Sheet permutation from continuing the whole fiber around a closed loop."""
    from . import tracker  # deferred: tracker imports this module

    z0 = loop.start_z
    if z0 is None:
        raise ValueError("monodromy of an empty path")
    if not loop.is_closed():
        raise ValueError("monodromy requires a closed base loop")
    fiber0 = fiber_at(eq, z0, tol)
    end_roots = tracker.continue_fiber(eq, fiber0.roots, loop, tol, delta_path)
    image = []
    for w in end_roots:
        image.append(match_to_fiber(w, fiber0, tol))
    if sorted(image) != list(range(eq.k)):
        raise TrackingCollision("fiber continuation did not produce a bijection")
    return SheetPermutation(tuple(image))


@dataclass(frozen=True)
class IrreducibilityResult:
    transitive: bool
    orbits: tuple[tuple[int, ...], ...]
    generators: tuple[SheetPermutation, ...]

    def __bool__(self) -> bool:
        return self.transitive


def generator_loops(
    eq: DefiningEquation,
    base_z: complex,
    tol: Tolerances = DEFAULT,
    rng=None,
) -> list:
    """One closed loop per critical point, anchored at base_z.

    Each loop is a circle of half the distance to the nearest other critical
    point (falling back to half the distance from the base when the point is
    alone), reached by a straight spoke that detours around other exclusion
    disks when necessary.
    """
    from . import tracker

    crit = eq.critical(tol)
    loops = []
    margin = tol.delta_path_factor * crit.scale
    for cp in crit.points:
        d_other = crit.nearest_other_dist(cp.location)
        if d_other < float("inf"):
            radius = 0.5 * d_other
        else:
            radius = 0.5 * max(1.0, abs(base_z - cp.location))
        d_base = abs(base_z - cp.location)
        if d_base > 0:
            # keep the base strictly outside the circle
            radius = min(radius, 0.9 * d_base)
        loops.append(
            tracker.anchored_loop(
                cp.location,
                radius,
                base_z,
                crit.locations,
                margin,
                rng=rng,
            )
        )
    return loops


def irreducibility_check(
    eq: DefiningEquation,
    base: complex,
    tol: Tolerances = DEFAULT,
) -> IrreducibilityResult:
    """Transitivity of the monodromy group generated by critical-point loops."""
    if eq.k == 1:
        return IrreducibilityResult(True, ((0,),), ())
    gens = tuple(monodromy(eq, loop, tol) for loop in generator_loops(eq, base, tol))
    parent = list(range(eq.k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for j in range(eq.k):
            rj, rm = find(j), find(g(j))
            if rj != rm:
                parent[rj] = rm
    groups: dict[int, list[int]] = {}
    for j in range(eq.k):
        groups.setdefault(find(j), []).append(j)
    orbits = tuple(sorted(tuple(sorted(v)) for v in groups.values()))
    return IrreducibilityResult(len(orbits) == 1, orbits, gens)
