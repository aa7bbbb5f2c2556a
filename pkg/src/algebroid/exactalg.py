"""Exact arithmetic over the Gaussian rationals.

Polynomials and rational functions in z with Q(i) coefficients carry the
structural layer of the toolkit: defining-equation coefficients, resultants,
discriminants, and Laurent orders are all computed here without rounding.
The expression grammar accepts integers, `i`, `z`, the binary operators
`+ - * /`, `^` with a nonnegative integer exponent, and parentheses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DivisionByZeroPoly, IdenticallyZeroDiscriminant, ZeroFunction

__all__ = [
    "GaussianRational",
    "Poly",
    "RatFunc",
    "parse_coefficient",
    "ratfunc_arith",
    "resultant_w",
    "discriminant",
    "laurent_order",
    "w_poly_mul",
    "w_poly_derivative",
]

_FractionLike = Union[int, Fraction]


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussianRational(Fraction(value))
        if isinstance(value, float):
            return GaussianRational(Fraction(value))
        if isinstance(value, complex):
            return GaussianRational(Fraction(value.real), Fraction(value.imag))
        raise TypeError(f"cannot coerce {value!r} to GaussianRational")

    def __add__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.of(other) - self

    def __mul__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.of(other)
        n2 = other.re * other.re + other.im * other.im
        if n2 == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n2,
            (self.im * other.re - self.re * other.im) / n2,
        )

    def __rtruediv__(self, other):
        return GaussianRational.of(other) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return _frac_str(self.re)
        if self.re == 0:
            return _imag_str(self.im)
        return f"{_frac_str(self.re)} {_imag_str(self.im, signed=True)}"


_GR_ZERO = GaussianRational()
_GR_ONE = GaussianRational(Fraction(1))


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _imag_str(q: Fraction, signed: bool = False) -> str:
    sign = ""
    if signed:
        sign = "+ " if q >= 0 else "- "
        q = abs(q)
    if q == 1:
        return f"{sign}i"
    if q == -1:
        return f"{sign}-i" if not signed else f"{sign}i"
    return f"{sign}{_frac_str(q)}*i"


class Poly:
    """Univariate polynomial in z over GaussianRational, ascending coefficients.

    The zero polynomial has an empty coefficient tuple; otherwise the leading
    coefficient is nonzero.
    """

    __slots__ = ("coeffs", "_fc")

    def __init__(self, coeffs: Iterable = ()):
        cs = [GaussianRational.of(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "_fc", None)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @staticmethod
    def zero() -> "Poly":
        return _P_ZERO

    @staticmethod
    def one() -> "Poly":
        return _P_ONE

    @staticmethod
    def z() -> "Poly":
        return _P_Z

    @staticmethod
    def constant(c) -> "Poly":
        return Poly([GaussianRational.of(c)])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> GaussianRational:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return _P_ZERO
        out = [_GR_ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    def scale(self, c) -> "Poly":
        c = GaussianRational.of(c)
        return Poly([a * c for a in self.coeffs])

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = _P_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise DivisionByZeroPoly("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return _P_ZERO, self
        quot = [_GR_ZERO] * (dq + 1)
        lead = other.coeffs[-1]
        for k in range(dq, -1, -1):
            if len(rem) < len(other.coeffs) + k:
                continue
            c = rem[len(other.coeffs) - 1 + k] / lead
            if not c:
                continue
            quot[k] = c
            for j, b in enumerate(other.coeffs):
                rem[j + k] = rem[j + k] - c * b
        return Poly(quot), Poly(rem)

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("division was not exact")
        return q

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        if lead == _GR_ONE:
            return self
        return Poly([c / lead for c in self.coeffs])

    def derivative(self) -> "Poly":
        return Poly([c * n for n, c in enumerate(self.coeffs) if n > 0])

    def eval_exact(self, z: GaussianRational) -> GaussianRational:
        acc = _GR_ZERO
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def _float_coeffs(self) -> tuple[complex, ...]:
        fc = self._fc
        if fc is None:
            fc = tuple(complex(c) for c in self.coeffs)
            object.__setattr__(self, "_fc", fc)
        return fc

    def eval_complex(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self._float_coeffs()):
            acc = acc * z + c
        return acc

    def root_multiplicity(self, z0: GaussianRational) -> int:
        """Exact multiplicity of z0 as a root."""
        if self.is_zero():
            raise ZeroFunction("multiplicity undefined for the zero polynomial")
        factor = Poly([-z0, _GR_ONE])
        p, count = self, 0
        while not p.is_zero() and not p.eval_exact(z0):
            p = p.exact_div(factor)
            count += 1
        return count

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self) -> str:
        return _format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({_format_poly(self)})"


_P_ZERO = Poly()
_P_ONE = Poly([1])
_P_Z = Poly([0, 1])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor by the Euclidean algorithm."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic() if not a.is_zero() else a


def poly_lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return _P_ZERO
    return (a * b).exact_div(poly_gcd(a, b)).monic()


def _term_str(coef: GaussianRational, power: int) -> str:
    if power == 0:
        s = str(coef)
        return f"({s})" if coef.re != 0 and coef.im != 0 else s
    if coef == _GR_ONE:
        head = ""
    elif coef == GaussianRational(Fraction(-1)):
        head = "-"
    else:
        s = str(coef)
        needs_parens = coef.im != 0 or coef.re.denominator != 1 or coef.re < 0
        head = (f"({s})" if needs_parens else s) + "*"
    zp = "z" if power == 1 else f"z^{power}"
    return head + zp


def _format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    terms = []
    for power in range(p.degree, -1, -1):
        c = p.coeffs[power]
        if not c:
            continue
        terms.append(_term_str(c, power))
    out = terms[0]
    for t in terms[1:]:
        if t.startswith("-") and not t.startswith("-("):
            out += " - " + t[1:]
        else:
            out += " + " + t
    return out


class RatFunc:
    """Reduced rational function num/den with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = _P_ONE):
        if den.is_zero():
            raise DivisionByZeroPoly("denominator is identically zero")
        if num.is_zero():
            num, den = _P_ZERO, _P_ONE
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num.exact_div(g), den.exact_div(g)
            lead = den.leading()
            if lead != _GR_ONE:
                num = Poly([c / lead for c in num.coeffs])
                den = den.monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    @staticmethod
    def zero() -> "RatFunc":
        return _R_ZERO

    @staticmethod
    def one() -> "RatFunc":
        return _R_ONE

    @staticmethod
    def z() -> "RatFunc":
        return _R_Z

    @staticmethod
    def constant(c) -> "RatFunc":
        return RatFunc(Poly.constant(c))

    @staticmethod
    def of(value) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, Poly):
            return RatFunc(value)
        return RatFunc(Poly.constant(GaussianRational.of(value)))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    @property
    def degree(self) -> int:
        """max(deg num, deg den); -1 for the zero function."""
        return max(self.num.degree, self.den.degree)

    def __add__(self, other):
        other = RatFunc.of(other)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = RatFunc.of(other)
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other):
        return RatFunc.of(other) - self

    def __mul__(self, other):
        other = RatFunc.of(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RatFunc.of(other)
        if other.is_zero():
            raise DivisionByZeroPoly("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RatFunc.of(other) / self

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            if self.is_zero():
                raise DivisionByZeroPoly("zero function to a negative power")
            return RatFunc(self.den**-n, self.num**-n)
        return RatFunc(self.num**n, self.den**n)

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def eval_complex(self, z: complex) -> complex:
        return self.num.eval_complex(z) / self.den.eval_complex(z)

    def eval_exact(self, z: GaussianRational) -> GaussianRational:
        d = self.den.eval_exact(z)
        if not d:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num.eval_exact(z) / d

    def __eq__(self, other) -> bool:
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self) -> str:
        if self.den.degree == 0:
            return _format_poly(self.num)
        return f"({_format_poly(self.num)})/({_format_poly(self.den)})"

    def __repr__(self) -> str:
        return f"RatFunc({self})"


_R_ZERO = RatFunc(_P_ZERO)
_R_ONE = RatFunc(_P_ONE)
_R_Z = RatFunc(_P_Z)


def ratfunc_arith(lhs: RatFunc, rhs: RatFunc, kind: str) -> RatFunc:
    """Exact field arithmetic; kind is one of add|sub|mul|div."""
    if kind == "add":
        return lhs + rhs
    if kind == "sub":
        return lhs - rhs
    if kind == "mul":
        return lhs * rhs
    if kind == "div":
        return lhs / rhs
    raise ValueError(f"unknown arithmetic kind {kind!r}")


# --- expression parser -----------------------------------------------------

_SYMBOLS = set("+-*/^()")


def _tokenize(text: str) -> list:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j])))
            i = j
            continue
        if ch in ("i", "z"):
            tokens.append((ch, ch))
            i += 1
            continue
        if ch in _SYMBOLS:
            tokens.append((ch, ch))
            i += 1
            continue
        raise SyntaxError(f"unexpected character {ch!r} at position {i}")
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.take()
        if tok[0] != kind:
            raise SyntaxError(f"expected {kind!r}, found {tok[0]!r}")
        return tok

    def parse(self) -> RatFunc:
        value = self.expr()
        self.expect("end")
        return value

    def expr(self) -> RatFunc:
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RatFunc:
        value = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()[0]
            rhs = self.unary()
            value = value * rhs if op == "*" else value / rhs
        return value

    def unary(self) -> RatFunc:
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RatFunc:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            tok = self.take()
            if tok[0] != "int":
                raise SyntaxError("exponent must be a nonnegative integer literal")
            base = base ** tok[1]
            if self.peek() == "^":
                raise SyntaxError("chained exponentiation is not allowed")
        return base

    def atom(self) -> RatFunc:
        kind, value = self.take()
        if kind == "int":
            return RatFunc.constant(value)
        if kind == "i":
            return RatFunc.constant(GaussianRational(Fraction(0), Fraction(1)))
        if kind == "z":
            return _R_Z
        if kind == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise SyntaxError(f"unexpected token {kind!r}")


def parse_coefficient(text: str) -> RatFunc:
    """Parse an expression string into a reduced rational function of z."""
    return _Parser(_tokenize(text)).parse()


# --- resultants and discriminants ------------------------------------------

WPoly = Sequence[RatFunc]  # ascending coefficients in W


def _trim_w(f: WPoly) -> list[RatFunc]:
    out = [RatFunc.of(c) for c in f]
    while out and out[-1].is_zero():
        out.pop()
    return out


def w_poly_mul(f: WPoly, g: WPoly) -> list[RatFunc]:
    a, b = _trim_w(f), _trim_w(g)
    if not a or not b:
        return []
    out = [_R_ZERO] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] = out[i + j] + ca * cb
    return _trim_w(out)


def w_poly_derivative(f: WPoly) -> list[RatFunc]:
    return _trim_w([c * RatFunc.constant(n) for n, c in enumerate(f) if n > 0])


def _bareiss_det(mat: list[list[Poly]]) -> Poly:
    """Fraction-free determinant of a square matrix of polynomials."""
    n = len(mat)
    if n == 0:
        return _P_ONE
    sign = 1
    prev = _P_ONE
    for col in range(n - 1):
        if mat[col][col].is_zero():
            for r in range(col + 1, n):
                if not mat[r][col].is_zero():
                    mat[col], mat[r] = mat[r], mat[col]
                    sign = -sign
                    break
            else:
                return _P_ZERO
        pivot = mat[col][col]
        for i in range(col + 1, n):
            for j in range(col + 1, n):
                num = pivot * mat[i][j] - mat[i][col] * mat[col][j]
                mat[i][j] = num.exact_div(prev)
            mat[i][col] = _P_ZERO
        prev = pivot
    det = mat[n - 1][n - 1]
    return det if sign == 1 else -det


def resultant_w(f: WPoly, g: WPoly) -> RatFunc:
    """Resultant in W of two polynomials with rational-function coefficients.

    Computed as the Sylvester determinant over Q(i)(z): rows are cleared of
    denominators, the polynomial determinant is taken by fraction-free
    elimination, and the row multipliers are divided back out.
    """
    fc, gc = _trim_w(f), _trim_w(g)
    if not fc or not gc:
        raise ValueError("resultant of a zero polynomial in W")
    m, n = len(fc) - 1, len(gc) - 1
    if m == 0 and n == 0:
        return _R_ONE
    size = m + n
    rows: list[list[RatFunc]] = []
    fdesc = list(reversed(fc))
    gdesc = list(reversed(gc))
    for sh in range(n):
        rows.append([_R_ZERO] * sh + fdesc + [_R_ZERO] * (size - sh - m - 1))
    for sh in range(m):
        rows.append([_R_ZERO] * sh + gdesc + [_R_ZERO] * (size - sh - n - 1))

    cleared: list[list[Poly]] = []
    multiplier = _P_ONE
    for row in rows:
        lcm = _P_ONE
        for entry in row:
            lcm = poly_lcm(lcm, entry.den)
        cleared.append([e.num * lcm.exact_div(e.den) for e in row])
        multiplier = multiplier * lcm
    det = _bareiss_det(cleared)
    return RatFunc(det, multiplier)


def discriminant(eq) -> RatFunc:
    """Resultant of the defining polynomial and its W-derivative.

    Accepts a DefiningEquation-like object (with .coeffs listing A_1..A_k)
    or a plain sequence of RatFunc coefficients.
    """
    coeffs = list(getattr(eq, "coeffs", eq))
    psi = list(reversed(coeffs)) + [_R_ONE]  # ascending in W
    res = resultant_w(psi, w_poly_derivative(psi))
    if res.is_zero():
        raise IdenticallyZeroDiscriminant(
            "discriminant vanishes identically: the defining equation has a repeated factor"
        )
    return res


def laurent_order(rf: RatFunc, z0: GaussianRational) -> int:
    """Order of vanishing at z0; negative at a pole."""
    if rf.is_zero():
        raise ZeroFunction("Laurent order undefined for the zero function")
    z0 = GaussianRational.of(z0)
    return rf.num.root_multiplicity(z0) - rf.den.root_multiplicity(z0)


def snap_to_gaussian(x: complex, coarse_den: int = 10**6, fine_den: int = 10**12,
                     rel_tol: float = 1e-9) -> GaussianRational:
    """Nearest Gaussian rational, preferring small denominators.

    Components within rel_tol of a fraction with denominator <= coarse_den
    snap to it; otherwise a denominator up to fine_den is used.
    """

    def snap(v: float) -> Fraction:
        fv = Fraction(v)
        coarse = fv.limit_denominator(coarse_den)
        if abs(float(coarse) - v) <= rel_tol * max(1.0, abs(v)):
            return coarse
        return fv.limit_denominator(fine_den)

    return GaussianRational(snap(x.real), snap(x.imag))
