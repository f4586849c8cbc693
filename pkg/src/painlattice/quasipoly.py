"""Wedge-contour integrals of quasi-polynomials p(x) e^{theta(x; t)}, theta = x^3/3 + t x/2.

The contour gamma runs from infinity along arg x = pi/3 into the origin and
out along arg x = pi; gamma-tilde runs in along arg x = pi and out along
arg x = 5 pi/3.  e^{2 theta} decays along all three rays, and the integrands
are entire, so these ray pairs are homotopic to any wedge contour with the
same ends.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import gmpy2
import mpmath
from mpmath import mp

from .roots import _from_gmp, _gmp_context, _gmp_to_mpf, _mpf_to_gmp, _to_gmp, find_roots_mp

GAMMA = "gamma"
GAMMA_TILDE = "gamma_tilde"
SQUARED = "squared"

_RAYS = {
    GAMMA: ((1, math.pi / 3), (3, math.pi)),           # (in-ray, out-ray) angles
    GAMMA_TILDE: ((3, math.pi), (5, 5 * math.pi / 3)),
}


class DecayError(ArithmeticError):
    """The weight has not decayed to working precision at the truncation radius."""


@dataclass
class WedgeQuadrature:
    precision_bits: int = 200
    radius: float | None = None
    panels: int = 12
    degree: int = 4

    def directions(self):
        return [cmath.exp(1j * math.pi * k / 3) for k in (1, 3, 5)]


def _default_radius(t, degree: int, coef_bound: float, precision_bits: int) -> float:
    """Smallest R (on a 0.25 grid) with |poly| e^{-2R^3/3 + |t|R} below 2^{-precision_bits}."""
    target = precision_bits * math.log(2)
    at = abs(complex(t))
    R = 1.0
    while True:
        growth = math.log(max(coef_bound, 1.0)) + degree * math.log(max(R, 1.0))
        if 2 * R ** 3 / 3 - at * R - growth > target:
            return R
        R += 0.25


def _poly_eval(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@lru_cache(maxsize=64)
def _gl_nodes(degree: int, prec: int):
    """Gauss-Legendre nodes and weights on [-1, 1] with 3 * 2^(degree-1) points, as gmpy2 numbers."""
    with mp.workprec(prec):
        gl = mpmath.calculus.quadrature.GaussLegendre(mp)
        nodes = gl.calc_nodes(degree, prec)
        return tuple((_mpf_to_gmp(x), _mpf_to_gmp(w)) for x, w in nodes)


def _ray_values(g, angle: float, R, panels: int, degree: int):
    """Integrals of g_k(x) dx and |g_k(x)| |dx| along x = rho e^{i angle}, rho in [0, R].

    g maps a point to a list of integrand values, so several integrands share
    one set of weight evaluations.  Runs on gmpy2 numbers at mp.prec bits.
    """
    bits = mp.prec
    nodes = _gl_nodes(degree, bits)
    with _gmp_context(bits):
        u = _to_gmp(mpmath.expj(angle))
        h = _mpf_to_gmp(mpmath.mpf(R)) / panels
        half = h / 2
        vals = mags = None
        for p in range(panels):
            mid = (p + gmpy2.mpfr("0.5")) * h
            for x, w in nodes:
                fx = g((mid + x * half) * u)
                wt = w * half
                if vals is None:
                    vals = [gmpy2.mpc(0)] * len(fx)
                    mags = [gmpy2.mpfr(0)] * len(fx)
                for i, f in enumerate(fx):
                    vals[i] += wt * f
                    mags[i] += wt * abs(f)
        vals = [v * u for v in vals]
    return [_from_gmp(v) for v in vals], [_gmp_to_mpf(m) for m in mags]


def _contour_values(g, contour: str, R, wq: WedgeQuadrature):
    """Contour values and scales for the integrands g, with a degree-doubling convergence check."""
    (_, a_in), (_, a_out) = _RAYS[contour]
    prev = None
    for degree in range(wq.degree, wq.degree + 4):
        vi, mi = _ray_values(g, a_in, R, wq.panels, degree)
        vo, mo = _ray_values(g, a_out, R, wq.panels, degree)
        vals = [o - i for o, i in zip(vo, vi)]
        scales = [a + b for a, b in zip(mi, mo)]
        if prev is not None:
            err = max(abs(a - b) / s for a, b, s in zip(vals, prev, scales))
            if err < mpmath.mpf(2) ** (-wq.precision_bits):
                return vals, scales
        prev = vals
    raise DecayError(f"Gauss-Legendre panels did not converge on {contour}")


def _integrands(p_coeffs, t, ks, wq: WedgeQuadrature):
    c = [mpmath.mpc(x) for x in p_coeffs]
    t = mpmath.mpc(t)
    deg = len(c) - 1
    kmax = 0
    for k in ks:
        if k == SQUARED:
            kmax = max(kmax, deg)
        elif int(k) < 0:
            raise ValueError("k must be >= 0")
        else:
            kmax = max(kmax, int(k))
    bound = max(float(sum(abs(x) for x in c)), 1.0) ** 2
    R = wq.radius or _default_radius(t, deg + kmax, bound, wq.precision_bits)
    tail = bound * R ** (deg + kmax) * math.exp(-2 * R ** 3 / 3 + abs(complex(t)) * R)
    if tail >= 2.0 ** (-wq.precision_bits):
        raise DecayError(f"weight not decayed at R={R}")
    with _gmp_context(mp.prec):
        gc = [_to_gmp(x) for x in reversed(c)]
        gt = _to_gmp(t)
        third = gmpy2.mpfr(1) / 3
    powers = [None if k == SQUARED else int(k) for k in ks]

    def g(x):
        p = gc[0]
        for a in gc[1:]:
            p = p * x + a
        e = p * gmpy2.exp(2 * (x * x * x * third + gt * x / 2))
        out = []
        xp, cur = 1, 0
        for k in powers:
            if k is None:
                out.append(e * p)
                continue
            while cur < k:
                xp *= x
                cur += 1
            if cur > k:
                xp, cur = x ** k, k
            out.append(e * xp)
        return out
    return g, R


def wedge_integrals(p_coeffs: Sequence, t, ks, contour: str = GAMMA, wq: WedgeQuadrature | None = None):
    """Lists of (value, scale) for several k at once; see wedge_integral."""
    wq = wq or WedgeQuadrature()
    if contour not in _RAYS:
        raise ValueError(f"unknown contour {contour!r}")
    with mp.workprec(wq.precision_bits + 32):
        g, R = _integrands(p_coeffs, t, list(ks), wq)
        return _contour_values(g, contour, R, wq)


def wedge_integral(p_coeffs: Sequence, t, k, contour: str = GAMMA, wq: WedgeQuadrature | None = None):
    """Contour integral of p x^k e^{2 theta} (k >= 0) or of p^2 e^{2 theta} (k = SQUARED).

    Returns (value, scale) where scale is the integral of the absolute
    integrand along the same rays, for relative-vanishing tests.
    """
    vals, scales = wedge_integrals(p_coeffs, t, [k], contour, wq)
    return vals[0], scales[0]


def relative_vanishing(p_coeffs, t, contour: str, wq: WedgeQuadrature | None = None):
    val, scale = wedge_integral(p_coeffs, t, SQUARED, contour, wq)
    return abs(val) / scale


def moment_matrix(p_coeffs, t, wq: WedgeQuadrature | None = None):
    """2 x (n+1) moments of p x^k e^{2 theta} over gamma and gamma-tilde, with their scales."""
    ks = list(range(len(p_coeffs)))
    rows, scales = [], []
    for contour in (GAMMA, GAMMA_TILDE):
        r, sc = wedge_integrals(p_coeffs, t, ks, contour, wq)
        rows.append(r)
        scales.append(sc)
    return rows, scales


def rank_ratio(rows, scales) -> float:
    """sigma_2/sigma_1 of the moment matrix after column scaling and row normalization."""
    m = len(rows[0])
    col = [max(scales[0][k], scales[1][k]) for k in range(m)]
    a = [rows[0][k] / col[k] for k in range(m)]
    b = [rows[1][k] / col[k] for k in range(m)]
    na = mpmath.sqrt(sum(abs(x) ** 2 for x in a))
    nb = mpmath.sqrt(sum(abs(x) ** 2 for x in b))
    if na == 0 and nb == 0:
        raise ValueError("both moment rows vanish")
    if na == 0 or nb == 0:
        return 0.0
    a = [x / na for x in a]
    b = [x / nb for x in b]
    # Gram matrix [[1, g], [conj g, 1]] has eigenvalues 1 +- |g|
    g = abs(sum(mpmath.conj(x) * y for x, y in zip(a, b)))
    lo = max(1 - g, mpmath.mpf(0))
    return float(mpmath.sqrt(lo / (1 + g)))


def degeneracy_rank_check(pt_or_coeffs, t=None, wq: WedgeQuadrature | None = None) -> float:
    """sigma_2/sigma_1 of the moment matrix for an STPoint (or explicit coefficients and t)."""
    if t is None:
        coeffs, t = pt_or_coeffs.p_coeffs, pt_or_coeffs.t
    else:
        coeffs = pt_or_coeffs
    with mp.workprec((wq or WedgeQuadrature()).precision_bits + 32):
        rows, scales = moment_matrix(coeffs, t, wq)
        return rank_ratio(rows, scales)


def fekete_check(p_coeffs, t, precision_bits: int = 256) -> float:
    """max_j |theta'(x_j) - sum_{k != j} 1/(x_k - x_j)| over the roots x_j of p, theta'(x) = x^2 + t/2."""
    if len(p_coeffs) == 2:
        x = -mpmath.mpc(p_coeffs[0]) / mpmath.mpc(p_coeffs[1])
        with mp.workprec(precision_bits):
            return float(abs(x ** 2 + mpmath.mpc(t) / 2))
    rs = find_roots_mp(p_coeffs, precision_bits)
    with mp.workprec(precision_bits):
        xs = [mpmath.mpc(x) for x in rs.roots]
        t = mpmath.mpc(t)
        worst = mpmath.mpf(0)
        for j, xj in enumerate(xs):
            acc = sum(1 / (xk - xj) for k, xk in enumerate(xs) if k != j)
            worst = max(worst, abs(xj ** 2 + t / 2 - acc))
        return float(worst)


@dataclass
class VerificationRow:
    point_id: int
    n: int
    t: complex
    rel_gamma: float
    rel_gamma_tilde: float
    sigma_ratio: float
    fekete: float


def verify_point(idx: int, pt, wq: WedgeQuadrature | None = None, fekete_bits: int = 256) -> VerificationRow:
    """Squared-wedge vanishing on both contours, moment rank ratio and Fekete residual for an STPoint."""
    wq = wq or WedgeQuadrature(precision_bits=max(200, 20 * pt.n))
    ks = [SQUARED] + list(range(len(pt.p_coeffs)))
    rel, rows, scales = [], [], []
    with mp.workprec(wq.precision_bits + 32):
        for contour in (GAMMA, GAMMA_TILDE):
            v, sc = wedge_integrals(pt.p_coeffs, pt.t, ks, contour, wq)
            rel.append(float(abs(v[0]) / sc[0]))
            rows.append(v[1:])
            scales.append(sc[1:])
        sr = rank_ratio(rows, scales)
    fk = fekete_check(pt.p_coeffs, pt.t, fekete_bits)
    return VerificationRow(idx, pt.n, complex(pt.t), rel[0], rel[1], sr, fk)


def write_verification(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["point_id", "n", "re_t", "im_t", "rel_vanish_gamma", "rel_vanish_gamma_tilde",
                     "sigma_ratio", "fekete_residual"])
        for r in rows:
            wr.writerow([r.point_id, r.n, f"{r.t.real:.15g}", f"{r.t.imag:.15g}", f"{r.rel_gamma:.6e}",
                         f"{r.rel_gamma_tilde:.6e}", f"{r.sigma_ratio:.6e}", f"{r.fekete:.6e}"])
