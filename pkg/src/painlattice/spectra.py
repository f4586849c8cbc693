"""Lattice points with attached spectral data.

JM points are zeros ``a`` of Y_n (poles of residue -1 of the rational
Painleve-II solution u_n) with the Laurent coefficient ``b`` and the potential
parameter Lambda.  ST points are zeros ``t`` of D_n with the double eigenvalue
of M_n(t) and its monic eigen-polynomial.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mp

from .exactpoly import (
    ExactPoly,
    char_poly_coeffs,
    discriminant_poly_cached,
    vy_polynomial_cached,
)
from .roots import find_roots, find_roots_mp


class AmbiguousCluster(ArithmeticError):
    """The numerically double eigenvalue could not be isolated."""


class LaurentValidationError(ArithmeticError):
    """Low-order Laurent coefficients at a pole disagree with their closed forms."""


NATURAL = "natural"
CONJECTURE = "conjecture"


def _mpc(x):
    if isinstance(x, Fraction):
        return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
    return mpmath.mpc(x)


def _sort_key(z):
    ang = float(mpmath.arg(z)) if z != 0 else -math.inf
    return (round(ang, 9), round(float(abs(z)), 12))


@dataclass
class JMPoint:
    n: int
    a: object
    b: object
    Lambda: object
    hbar: object
    s: object
    E: object

    kind = "JM"

    @property
    def location(self):
        return self.a

    def to_dict(self, digits: int = 40) -> dict:
        return _point_dict("JM", self.n, self.a, self.Lambda, self.s, self.E,
                           {"b": _pair(self.b, digits)}, digits)


@dataclass
class STPoint:
    n: int
    t: object
    lambda_double: object
    Lambda: object
    p_coeffs: list
    hbar: object
    s: object
    E: object
    cluster_ratio: float = field(default=0.0)

    kind = "ST"

    @property
    def location(self):
        return self.t

    def to_dict(self, digits: int = 40) -> dict:
        extra = {
            "lambda_double": _pair(self.lambda_double, digits),
            "p_coeffs": [_pair(c, digits) for c in self.p_coeffs],
        }
        return _point_dict("ST", self.n, self.t, self.Lambda, self.s, self.E, extra, digits)


def _pair(z, digits):
    z = mpmath.mpc(z)
    return [mpmath.nstr(z.real, digits), mpmath.nstr(z.imag, digits)]


def _point_dict(kind, n, loc, Lam, s, E, extra, digits):
    return {
        "kind": kind,
        "n": n,
        "location": _pair(loc, digits),
        "Lambda": _pair(Lam, digits),
        "s": _pair(s, digits),
        "E": _pair(E, digits),
        "extra": extra,
    }


def dump_points(points, path, digits: int = 40) -> None:
    """Write one JSON object per line."""
    with open(path, "w") as fh:
        for p in points:
            fh.write(json.dumps(p.to_dict(digits)) + "\n")


# ---------------------------------------------------------------------------
# truncated power series helpers
# ---------------------------------------------------------------------------

def taylor_at(coeffs_asc: Sequence, a, order: int) -> list:
    """Taylor coefficients f^{(k)}(a)/k! for k = 0..order by repeated synthetic division."""
    work = [_mpc(c) for c in coeffs_asc]
    out = []
    for _ in range(order + 1):
        if not work:
            out.append(mpmath.mpc(0))
            continue
        # divide by (t - a): quotient and remainder via Horner from the top
        acc = mpmath.mpc(0)
        quot = [mpmath.mpc(0)] * (len(work) - 1)
        for k in range(len(work) - 1, -1, -1):
            acc = acc * a + work[k]
            if k > 0:
                quot[k - 1] = acc
        out.append(acc)
        work = quot
    return out


def series_log_derivative(f: Sequence, order: int) -> list:
    """Coefficients of f'/f up to ``order`` for a power series f with f[0] != 0."""
    df = [(k + 1) * f[k + 1] for k in range(len(f) - 1)]
    q = []
    for k in range(order + 1):
        acc = df[k] if k < len(df) else 0
        for j in range(1, k + 1):
            if j < len(f):
                acc -= f[j] * q[k - j]
        q.append(acc / f[0])
    return q


# ---------------------------------------------------------------------------
# JM points
# ---------------------------------------------------------------------------

def regular_part_coefficients(y_prev: ExactPoly, y_n: ExactPoly, a, order: int = 3) -> list:
    """Taylor coefficients at t=a of h = u_n + 1/(t-a), with u_n = Y'_{n-1}/Y_{n-1} - Y'_n/Y_n.

    Writing Y_n = (t-a) W gives h = Y'_{n-1}/Y_{n-1} - W'/W, both regular at a.
    """
    ty_prev = taylor_at(y_prev.coeffs, a, order + 1)
    ty_n = taylor_at(y_n.coeffs, a, order + 2)
    w = ty_n[1:]  # drop the (numerically zero) value Y_n(a)
    lp = series_log_derivative(ty_prev, order)
    lw = series_log_derivative(w, order)
    return [lp[k] - lw[k] for k in range(order + 1)]


def b_coefficient(n: int, a, precision_bits: int = 256, ys: tuple | None = None, check: bool = True):
    """Laurent coefficient b of u_n = -1/(t-a) + a/6 (t-a) - (n-1)/4 (t-a)^2 + b (t-a)^3 + ...

    ``ys`` may supply (Y_{n-1}, Y_n).  With ``check`` the order-0,1,2
    coefficients are compared with 0, a/6 and -(n-1)/4.
    """
    if ys is None:
        ys = (vy_polynomial_cached(n - 1), vy_polynomial_cached(n))
    y_prev, y_n = ys
    with mp.workprec(2 * precision_bits):
        a = mpmath.mpc(a)
        h = regular_part_coefficients(y_prev, y_n, a, 3)
        if check:
            tol = mpmath.mpf(2) ** (-precision_bits // 2) * max(1, abs(a)) ** 2
            targets = [0, a / 6, mpmath.mpf(-(n - 1)) / 4]
            for k, target in enumerate(targets):
                if abs(h[k] - target) > tol * (1 + abs(target)):
                    raise LaurentValidationError(
                        f"order-{k} coefficient {mpmath.nstr(h[k], 10)} != {mpmath.nstr(target, 10)} at a={a}")
        return +h[3]


def jm_scaling(n: int):
    return 1 / (mpmath.mpf(n) + mpmath.mpf(1) / 2)


def jm_points(n: int, precision_bits: int = 256, cache_dir=None) -> list[JMPoint]:
    """One point per zero of Y_n, sorted by angle then modulus."""
    if n < 1:
        raise ValueError("n must be >= 1")
    y_prev = vy_polynomial_cached(n - 1, cache_dir)
    y_n = vy_polynomial_cached(n, cache_dir)
    rs = find_roots(y_n, precision_bits)
    pts = []
    with mp.workprec(precision_bits):
        hbar = jm_scaling(n)
        h23 = hbar ** (mpmath.mpf(2) / 3)
        h43 = hbar ** (mpmath.mpf(4) / 3)
    for a in rs.roots:
        b = b_coefficient(n, a, precision_bits, (y_prev, y_n))
        with mp.workprec(precision_bits):
            a_w = +mpmath.mpc(a)
            lam = 7 * a_w ** 2 / 36 + 10 * b
            pts.append(JMPoint(n, a, b, lam, hbar, a_w * h23, lam * h43))
    pts.sort(key=lambda p: _sort_key(p.a))
    return pts


# ---------------------------------------------------------------------------
# ST points
# ---------------------------------------------------------------------------

def st_scaling(n: int, variant: str = NATURAL):
    if variant == NATURAL:
        return 1 / mpmath.mpf(n + 1)
    if variant == CONJECTURE:
        return 1 / mpmath.mpf(n)
    raise ValueError(f"unknown scaling variant {variant!r}")


def char_poly_numeric(n: int, t) -> list:
    """Ascending coefficients in lambda of det(M_n(t) - lambda I) at complex t."""
    return char_poly_coeffs(n, mpmath.mpc(t), mpmath.mpf(1))


def locate_double_eigenvalue(lams: Sequence, ratio: float = 1e-3):
    """Midpoint of the unique closest pair; AmbiguousCluster unless the gap is isolated."""
    m = len(lams)
    gaps = []
    for i in range(m):
        for j in range(i + 1, m):
            gaps.append((abs(lams[i] - lams[j]), i, j))
    gaps.sort(key=lambda g: g[0])
    if len(gaps) < 1:
        raise AmbiguousCluster("need at least two eigenvalues")
    g0, i, j = gaps[0]
    # the second gap must not share... any other pair, even one touching the cluster,
    # is an O(1) distance away; compare against the next distinct pair
    g1 = gaps[1][0] if len(gaps) > 1 else mpmath.inf
    rel = g0 / g1 if g1 != 0 else mpmath.inf
    if not rel < ratio:
        raise AmbiguousCluster(f"cluster gap ratio {mpmath.nstr(rel, 5)} not below {ratio}")
    return (lams[i] + lams[j]) / 2, float(rel)


def refine_double_eigenvalue(coeffs_asc: Sequence, lam, steps: int = 6):
    """Newton on d/dlambda C (the double root of C is a simple root of C')."""
    d1 = [k * coeffs_asc[k] for k in range(1, len(coeffs_asc))]
    d2 = [k * d1[k] for k in range(1, len(d1))]
    for _ in range(steps):
        f = mpmath.polyval(list(reversed(d1)), lam)
        g = mpmath.polyval(list(reversed(d2)), lam)
        if g == 0:
            break
        step = f / g
        lam = lam - step
        if abs(step) < mpmath.eps * max(1, abs(lam)):
            break
    return lam


def eigenpolynomial(n: int, t, lam) -> tuple[list, object]:
    """Monic p with L(p) = lambda p, where L(p) = p'' + (2x^2+t)p' - 2nxp.

    Coefficient j of L(p) - lambda p reads
    (j+2)(j+1)c_{j+2} + t(j+1)c_{j+1} - 2(n-j+1)c_{j-1} - lambda c_j;
    the equations j = n..1 determine c_{n-1}..c_0 from c_n = 1, and the j = 0
    equation is returned as a residual (scaled by the coefficient size).
    """
    c = [mpmath.mpc(0)] * (n + 3)
    c[n] = mpmath.mpc(1)
    for j in range(n, 0, -1):
        c[j - 1] = ((j + 2) * (j + 1) * c[j + 2] + t * (j + 1) * c[j + 1] - lam * c[j]) / (2 * (n - j + 1))
    res = 2 * c[2] + t * c[1] - lam * c[0]
    scale = max(abs(2 * c[2]), abs(t * c[1]), abs(lam * c[0]), 1)
    return c[: n + 1], res / scale


def eigenpolynomial_svd(n: int, t, lam) -> list:
    """Null vector of M_n(t)^T - lambda I from the smallest singular direction, made monic."""
    m = n + 1
    A = mpmath.matrix(m, m)
    for k in range(m):
        # row k of M holds L(x^k); the transpose maps coefficient vectors
        if k >= 2:
            A[k - 2, k] = k * (k - 1)
        if k >= 1:
            A[k - 1, k] = k * t
        if k + 1 <= n:
            A[k + 1, k] = -2 * (n - k)
        A[k, k] -= lam
    U, S, V = mpmath.svd_c(A)
    idx = min(range(m), key=lambda i: abs(S[i]))
    vec = [mpmath.conj(V[idx, j]) for j in range(m)]
    lead = vec[n]
    return [v / lead for v in vec]


def ode_residual(p_coeffs: Sequence, n: int, t, lam) -> object:
    """max_j |[L(p) - lambda p]_j| / max|c|."""
    c = list(p_coeffs) + [0, 0, 0]
    worst = 0
    for j in range(n + 2):
        v = (j + 2) * (j + 1) * c[j + 2] + t * (j + 1) * c[j + 1] - lam * c[j]
        if j >= 1:
            v -= 2 * (n - j + 1) * c[j - 1]
        worst = max(worst, abs(v))
    return worst / max(abs(x) for x in p_coeffs)


def st_point_at(n: int, t, precision_bits: int = 256, variant: str = NATURAL,
                cluster_ratio: float = 1e-3) -> STPoint:
    """Double eigenvalue and eigen-polynomial at one zero t of D_n."""
    last = None
    for bits in (precision_bits, 2 * precision_bits):
        with mp.workprec(bits + 32):
            tt = mpmath.mpc(t)
            coeffs = char_poly_numeric(n, tt)
            try:
                lams = find_roots_mp(coeffs, bits, check_simple=False).roots
                lam, rel = locate_double_eigenvalue(lams, cluster_ratio)
            except (AmbiguousCluster, ArithmeticError) as exc:
                last = exc
                continue
            lam = refine_double_eigenvalue(coeffs, lam)
            p, _ = eigenpolynomial(n, tt, lam)
        with mp.workprec(precision_bits):
            lam = +lam
            hbar = st_scaling(n, variant)
            Lam = lam + tt ** 2 / 4
            s = tt * hbar ** (mpmath.mpf(2) / 3)
            E = Lam * hbar ** (mpmath.mpf(4) / 3)
            return STPoint(n, t, lam, Lam, p, hbar, s, E, rel)
    raise AmbiguousCluster(f"no isolated double eigenvalue at t={t}: {last}")


def st_points(n: int, precision_bits: int = 256, variant: str = NATURAL, cache_dir=None) -> list[STPoint]:
    """One point per zero of D_n, sorted by angle then modulus."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = discriminant_poly_cached(n, cache_dir)
    rs = find_roots(d, precision_bits)
    pts = [st_point_at(n, t, precision_bits, variant) for t in rs.roots]
    pts.sort(key=lambda p: _sort_key(p.t))
    return pts


def rescale_st(pt: STPoint, variant: str) -> STPoint:
    """Same point with the scaled coordinates recomputed for another ħ convention."""
    hbar = st_scaling(pt.n, variant)
    s = pt.t * hbar ** (mpmath.mpf(2) / 3)
    E = pt.Lambda * hbar ** (mpmath.mpf(4) / 3)
    return STPoint(pt.n, pt.t, pt.lambda_double, pt.Lambda, pt.p_coeffs, hbar, s, E, pt.cluster_ratio)
