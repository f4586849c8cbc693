"""Exact rational polynomial arithmetic and the polynomial families of the problem.

Coefficients are stored in ascending order (``coeffs[k]`` is the coefficient
of ``x**k``) as :class:`fractions.Fraction`.  Multiplication and exact division
run on integer numerators with a common denominator, which keeps the
Vorob'ev-Yablonskii recursion fast up to degree a few hundred.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence


class ExactDivisionError(ArithmeticError):
    """A division that must be exact left a nonzero remainder."""


class InterpolationError(ArithmeticError):
    """An extra interpolation node disagrees with the interpolant."""


def _trim(coeffs: list[Fraction]) -> list[Fraction]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _int_convolve(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


class ExactPoly:
    """Univariate polynomial with exact rational coefficients (ascending)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs: tuple[Fraction, ...] = tuple(_trim([Fraction(c) for c in coeffs]))

    # construction -----------------------------------------------------
    @classmethod
    def monomial(cls, k: int, c=1) -> "ExactPoly":
        return cls([0] * k + [c])

    @classmethod
    def x(cls) -> "ExactPoly":
        return cls([0, 1])

    # basic queries ----------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactPoly):
            other = ExactPoly([other])
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"ExactPoly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mon = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mon and abs(c) == 1:
                body = mon
            else:
                body = f"{abs(c)}*{mon}" if mon else f"{abs(c)}"
            terms.append(("-" if c < 0 else "+", body))
        sign, body = terms[0]
        s = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s

    # integer view -----------------------------------------------------
    def _scaled_ints(self) -> tuple[list[int], int]:
        den = reduce(lcm, (c.denominator for c in self.coeffs), 1)
        return [int(c * den) for c in self.coeffs], den

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    # arithmetic -------------------------------------------------------
    def __add__(self, other) -> "ExactPoly":
        if not isinstance(other, ExactPoly):
            other = ExactPoly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        return ExactPoly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "ExactPoly":
        return ExactPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "ExactPoly":
        if not isinstance(other, ExactPoly):
            other = ExactPoly([other])
        return self + (-other)

    def __rsub__(self, other) -> "ExactPoly":
        return ExactPoly([other]) - self

    def __mul__(self, other) -> "ExactPoly":
        if not isinstance(other, ExactPoly):
            c = Fraction(other)
            return ExactPoly(c * a for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return ExactPoly()
        a, da = self._scaled_ints()
        b, db = other._scaled_ints()
        den = da * db
        return ExactPoly(Fraction(c, den) for c in _int_convolve(a, b))

    __rmul__ = __mul__

    def scale(self, c) -> "ExactPoly":
        return self * Fraction(c)

    def derivative(self, order: int = 1) -> "ExactPoly":
        p = self
        for _ in range(order):
            p = ExactPoly(k * p.coeffs[k] for k in range(1, len(p.coeffs)))
        return p

    def shift_degree(self, k: int) -> "ExactPoly":
        """Multiply by ``x**k``."""
        if self.is_zero():
            return self
        return ExactPoly([0] * k + list(self.coeffs))

    def divmod(self, other: "ExactPoly") -> tuple["ExactPoly", "ExactPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return ExactPoly(), ExactPoly(rem)
        lead = other.lead
        oc = other.coeffs
        m = len(oc) - 1
        quot = [Fraction(0)] * (dq + 1)
        for k in range(dq, -1, -1):
            q = rem[k + m] / lead
            quot[k] = q
            if q:
                for i in range(m + 1):
                    rem[k + i] -= q * oc[i]
        return ExactPoly(quot), ExactPoly(rem[:m])

    def exact_div(self, other: "ExactPoly") -> "ExactPoly":
        """Quotient of a division that must leave no remainder."""
        if self.is_integral() and other.is_integral() and abs(other.lead) == 1:
            return self._exact_div_int(other)
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ExactDivisionError(f"nonzero remainder of degree {r.degree}")
        return q

    def _exact_div_int(self, other: "ExactPoly") -> "ExactPoly":
        rem = [int(c) for c in self.coeffs]
        oc = [int(c) for c in other.coeffs]
        lead = oc[-1]
        m = len(oc) - 1
        dq = len(rem) - 1 - m
        if dq < 0:
            if rem:
                raise ExactDivisionError("dividend degree below divisor degree")
            return ExactPoly()
        quot = [0] * (dq + 1)
        for k in range(dq, -1, -1):
            q = rem[k + m] * lead  # lead is +-1
            quot[k] = q
            if q:
                for i in range(m + 1):
                    rem[k + i] -= q * oc[i]
        if any(rem[:m]):
            raise ExactDivisionError("nonzero remainder in exact division")
        return ExactPoly(quot)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def content(self) -> Fraction:
        """Positive rational content (gcd of numerators over lcm of denominators)."""
        if self.is_zero():
            return Fraction(0)
        num = reduce(gcd, (c.numerator for c in self.coeffs))
        den = reduce(lcm, (c.denominator for c in self.coeffs))
        return Fraction(num, den)

    def primitive(self) -> "ExactPoly":
        c = self.content()
        return self if c in (0, 1) else self * (1 / c)

    def monic(self) -> "ExactPoly":
        if self.is_zero():
            return self
        return self * (1 / self.lead)

    def gcd(self, other: "ExactPoly") -> "ExactPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1].primitive()
        return a.monic()

    def exponent_residues(self, modulus: int = 3) -> set[int]:
        return {k % modulus for k, c in enumerate(self.coeffs) if c != 0}

    # serialization ----------------------------------------------------
    def to_pairs(self) -> list[list[str]]:
        return [[str(c.numerator), str(c.denominator)] for c in self.coeffs]

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[str]]) -> "ExactPoly":
        return cls(Fraction(int(n), int(d)) for n, d in pairs)


# ---------------------------------------------------------------------------
# Vorob'ev-Yablonskii polynomials
# ---------------------------------------------------------------------------

def vy_polynomials(N: int) -> list[ExactPoly]:
    """Return ``[Y_0, ..., Y_N]``.

    Each step forms ``t*Y_n**2 - 4*(Y_n''*Y_n - Y_n'**2)`` and divides it
    exactly by ``Y_{n-1}``; a nonzero remainder raises ExactDivisionError.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    ys = [ExactPoly([1])]
    if N >= 1:
        ys.append(ExactPoly.x())
    t = ExactPoly.x()
    for n in range(1, N):
        y = ys[n]
        dy = y.derivative()
        num = t * y * y - 4 * (y.derivative(2) * y - dy * dy)
        ys.append(num.exact_div(ys[n - 1]))
    return ys


# ---------------------------------------------------------------------------
# Spectral matrix and its characteristic polynomial
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharPolySample:
    n: int
    t_node: Fraction
    poly_in_lambda: ExactPoly


def st_matrix_entries(n: int, t):
    """Nonzero entries of the (n+1)x(n+1) matrix M_n(t) as ``{(row, col): value}``.

    Row k holds the image of the monomial x**k under
    ``p -> p'' + (2x^2 + t) p' - 2 n x p``: ``k(k-1)`` at column k-2,
    ``k t`` at column k-1 and ``-2(n-k)`` at column k+1.  Eigen-polynomial
    coefficient vectors are therefore null vectors of the transpose.
    """
    ent = {}
    for k in range(n + 1):
        if k >= 2:
            ent[(k, k - 2)] = k * (k - 1)
        if k >= 1:
            ent[(k, k - 1)] = k * t
        if k + 1 <= n:
            ent[(k, k + 1)] = -2 * (n - k)
    return ent


def char_poly_coeffs(n: int, t, one=1) -> list:
    """Coefficients (ascending in lambda) of det(M_n(t) - lambda I).

    Banded recursion over leading principal minors of the lower-Hessenberg
    matrix M - lambda I.  Works for any ring element ``t`` (Fraction, int,
    mpc); ``one`` fixes the scalar type of the constant coefficients.
    """
    # p_k as coefficient lists in lambda, p_{-1} = 1, p_{-2} = p_{-3} = 0 conventions
    def sup(k):  # entry (k, k+1)
        return -2 * (n - k) * one

    def sub1(k):  # entry (k, k-1)
        return k * t

    def sub2(k):  # entry (k, k-2)
        return k * (k - 1) * one

    def axpy(acc, c, poly):
        if c == 0:
            return acc
        if len(acc) < len(poly):
            acc = acc + [0 * one] * (len(poly) - len(acc))
        for i, v in enumerate(poly):
            acc[i] = acc[i] + c * v
        return acc

    minors = [[one]]  # minors[j+1] = p_j; minors[0] = p_{-1}
    for k in range(n + 1):
        prev = minors[-1]
        # (a_kk - lambda) p_{k-1} with a_kk = 0
        cur = [0 * one] + [-c for c in prev]
        if k >= 1:
            cur = axpy(cur, -sub1(k) * sup(k - 1), minors[-2])
        if k >= 2:
            cur = axpy(cur, sub2(k) * sup(k - 2) * sup(k - 1), minors[-3])
        minors.append(cur)
    return minors[-1]


def char_poly_at(n: int, t_node) -> CharPolySample:
    """Exact characteristic polynomial det(M_n(t) - lambda I) at rational t."""
    if n < 0:
        raise ValueError("n must be >= 0")
    t = Fraction(t_node)
    coeffs = char_poly_coeffs(n, t, Fraction(1))
    return CharPolySample(n, t, ExactPoly(coeffs))


# ---------------------------------------------------------------------------
# Resultants and discriminants over the integers
# ---------------------------------------------------------------------------

def _bareiss_det(mat: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix (mutates ``mat``)."""
    n = len(mat)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if mat[k][k] == 0:
            for i in range(k + 1, n):
                if mat[i][k] != 0:
                    mat[k], mat[i] = mat[i], mat[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = mat[k][k]
        row_k = mat[k]
        for i in range(k + 1, n):
            row_i = mat[i]
            mik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * mat[n - 1][n - 1]


def resultant_int(a: Sequence[int], b: Sequence[int]) -> int:
    """Resultant of two integer polynomials (ascending coefficients)."""
    m, n = len(a) - 1, len(b) - 1
    if m < 0 or n < 0:
        return 0
    if m == 0:
        return a[0] ** n
    if n == 0:
        return b[0] ** m
    size = m + n
    ra = list(reversed(a))
    rb = list(reversed(b))
    mat = []
    for i in range(n):
        mat.append([0] * i + ra + [0] * (size - m - 1 - i))
    for i in range(m):
        mat.append([0] * i + rb + [0] * (size - n - 1 - i))
    return _bareiss_det(mat)


def discriminant_exact(p: ExactPoly) -> Fraction:
    """Discriminant (-1)^{d(d-1)/2} Res(p, p') / lead(p)."""
    d = p.degree
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    ints, den = p._scaled_ints()
    dp = [k * ints[k] for k in range(1, len(ints))]
    res = resultant_int(ints, dp)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    # scaling by den multiplies the discriminant by den^(2d-2)
    return Fraction(sign * res, ints[-1]) / Fraction(den) ** (2 * d - 2)


def interpolate_exact(nodes: Sequence[Fraction], values: Sequence[Fraction]) -> ExactPoly:
    """Newton divided differences, then expansion into the monomial basis."""
    xs = [Fraction(x) for x in nodes]
    dd = [Fraction(v) for v in values]
    m = len(xs)
    for j in range(1, m):
        for i in range(m - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    # Horner on the Newton form
    coeffs = [dd[-1]]
    for i in range(m - 2, -1, -1):
        xi = xs[i]
        new = [Fraction(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            new[k + 1] += c
            new[k] -= xi * c
        new[0] += dd[i]
        coeffs = new
    return ExactPoly(coeffs)


def symmetric_nodes(count: int) -> list[int]:
    """0, 1, -1, 2, -2, ... (``count`` of them)."""
    out = [0]
    k = 1
    while len(out) < count:
        out.append(k)
        if len(out) < count:
            out.append(-k)
        k += 1
    return out


def discriminant_poly(n: int, extra_nodes: int = 2, node_values: dict | None = None) -> ExactPoly:
    """Monic D_n(t) = Disc_lambda det(M_n(t) - lambda I), normalized monic.

    Evaluates the discriminant exactly at ``deg + 1 + extra_nodes`` symmetric
    integer nodes, interpolates through the first ``deg + 1`` and checks the
    rest.  ``node_values`` may carry precomputed node discriminants.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    deg = n * (n + 1) // 2
    nodes = symmetric_nodes(deg + 1 + extra_nodes)
    values = []
    for t in nodes:
        if node_values is not None and t in node_values:
            values.append(Fraction(node_values[t]))
            continue
        v = discriminant_exact(char_poly_at(n, t).poly_in_lambda)
        if node_values is not None:
            node_values[t] = v
        values.append(v)
    poly = interpolate_exact(nodes[: deg + 1], values[: deg + 1])
    for t, v in zip(nodes[deg + 1:], values[deg + 1:]):
        if poly(Fraction(t)) != v:
            raise InterpolationError(f"node t={t} disagrees with the interpolant")
    if poly.degree != deg:
        raise InterpolationError(f"D_{n} has degree {poly.degree}, expected {deg}")
    return poly.monic()


def raw_discriminant_scale(n: int) -> Fraction:
    """Ratio Disc_lambda(C_n)(t) / D_n(t) (the leading coefficient of the raw discriminant)."""
    deg = n * (n + 1) // 2
    nodes = symmetric_nodes(deg + 1)
    vals = [discriminant_exact(char_poly_at(n, t).poly_in_lambda) for t in nodes]
    return interpolate_exact(nodes, vals).lead


# ---------------------------------------------------------------------------
# Airy-square antiderivative polynomials
# ---------------------------------------------------------------------------

def airy_abc(n: int) -> tuple[ExactPoly, ExactPoly, ExactPoly]:
    """Polynomials (A_n, B_n, C_n) with d/dx(A f^2 - B f'^2 + C f f') = x^n f^2 when f'' = x f.

    B_n solves ``B + 2x B' - B'''/2 = x^n``; the operator maps x^k to
    ``(2k+1) x^k - k(k-1)(k-2)/2 x^(k-3)``, so it is triangular with nonzero
    diagonal and back-substitution inverts it.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    b = [Fraction(0)] * (n + 1)
    rhs = [Fraction(0)] * (n + 1)
    rhs[n] = Fraction(1)
    for k in range(n, -1, -1):
        # coefficient of x^k in T(B): (2k+1) b_k - (k+3)(k+2)(k+1)/2 b_{k+3}
        acc = rhs[k]
        if k + 3 <= n:
            acc += Fraction((k + 3) * (k + 2) * (k + 1), 2) * b[k + 3]
        diag = 2 * k + 1
        if diag == 0:
            raise ArithmeticError("singular Airy operator")
        b[k] = acc / diag
    B = ExactPoly(b)
    A = ExactPoly.x() * B - B.derivative(2) * Fraction(1, 2)
    C = B.derivative()
    return A, B, C


def airy_identity_defect(n: int) -> tuple[ExactPoly, ExactPoly, ExactPoly]:
    """Coefficients of f^2, f f', f'^2 in d/dx(A f^2 - B f'^2 + C f f') - x^n f^2 using f'' = x f."""
    A, B, C = airy_abc(n)
    x = ExactPoly.x()
    c_ff = A.derivative() + x * C - ExactPoly.monomial(n)
    c_fdf = 2 * A - 2 * x * B + C.derivative()
    c_dfdf = C - B.derivative()
    return c_ff, c_fdf, c_dfdf


# ---------------------------------------------------------------------------
# Disk cache
# ---------------------------------------------------------------------------

CACHE_ENV = "PAINLATTICE_CACHE"


def default_cache_dir():
    """Cache directory from PAINLATTICE_CACHE, or None when caching is off."""
    import os

    d = os.environ.get(CACHE_ENV)
    return d or None


def _cache_path(cache_dir, family: str, n: int):
    from pathlib import Path

    return Path(cache_dir) / f"{family.lower()}_{n:03d}.json"


def save_poly(cache_dir, family: str, n: int, poly: ExactPoly) -> None:
    import json
    from pathlib import Path

    Path(cache_dir).mkdir(parents=True, exist_ok=True)
    doc = {"family": family, "n": n, "coeffs": poly.to_pairs()}
    path = _cache_path(cache_dir, family, n)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(doc))
    tmp.replace(path)


def load_poly(cache_dir, family: str, n: int) -> ExactPoly | None:
    import json

    path = _cache_path(cache_dir, family, n)
    if not path.exists():
        return None
    doc = json.loads(path.read_text())
    if doc.get("family") != family or doc.get("n") != n:
        return None
    return ExactPoly.from_pairs(doc["coeffs"])


def vy_polynomial_cached(n: int, cache_dir=None) -> ExactPoly:
    """Y_n, read from or written to the cache directory when one is given."""
    cache_dir = cache_dir or default_cache_dir()
    if cache_dir:
        hit = load_poly(cache_dir, "VY", n)
        if hit is not None:
            return hit
    ys = vy_polynomials(n)
    if cache_dir:
        for k, y in enumerate(ys):
            if load_poly(cache_dir, "VY", k) is None:
                save_poly(cache_dir, "VY", k, y)
    return ys[n]


def discriminant_poly_cached(n: int, cache_dir=None) -> ExactPoly:
    """D_n, read from or written to the cache directory when one is given."""
    cache_dir = cache_dir or default_cache_dir()
    if cache_dir:
        hit = load_poly(cache_dir, "DISC", n)
        if hit is not None:
            return hit
    d = discriminant_poly(n)
    if cache_dir:
        save_poly(cache_dir, "DISC", n, d)
    return d


def verify_cached_poly(family: str, n: int, poly: ExactPoly, fresh_offset: int = 7) -> bool:
    """Re-check a cached polynomial against fresh exact data.

    VY: recompute Y_n by the recursion (cheap for desk-scale n).  DISC: the
    monic normalization hides the raw leading coefficient, so two fresh
    integer nodes beyond the interpolation nodes are evaluated and the
    ratios raw(t)/D_n(t) must agree exactly.
    """
    if family == "VY":
        return vy_polynomials(n)[n] == poly
    if family != "DISC":
        raise ValueError(f"unknown family {family!r}")
    deg = n * (n + 1) // 2
    t1, t2 = deg + fresh_offset, -(deg + fresh_offset + 1)
    r1 = discriminant_exact(char_poly_at(n, t1).poly_in_lambda)
    r2 = discriminant_exact(char_poly_at(n, t2).poly_in_lambda)
    p1, p2 = poly(Fraction(t1)), poly(Fraction(t2))
    if p1 == 0 or p2 == 0:
        return r1 == 0 and r2 == 0
    return poly.degree == deg and r1 * p2 == r2 * p1 and r1 != 0
