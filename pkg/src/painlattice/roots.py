"""Multiprecision simultaneous root finding (Aberth-Ehrlich plus Newton polishing).

Seeds come from a float64 companion-matrix solve of the polynomial in a
rescaled variable; the Aberth sweep then runs at working precision, and every
root gets Newton steps at twice the working precision before the residual is
certified.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import gmpy2
import mpmath
import numpy as np
from mpmath import mp
from mpmath.libmp import from_man_exp

from .exactpoly import ExactPoly


class RootFindingError(ArithmeticError):
    """Aberth iteration did not converge for some roots."""

    def __init__(self, message, failing=None):
        super().__init__(message)
        self.failing = failing or []


class CoincidentRoots(ArithmeticError):
    """Two computed roots are closer than the simplicity threshold."""

    def __init__(self, message, pair=None, distance=None):
        super().__init__(message)
        self.pair = pair
        self.distance = distance


class DegenerateTurningPoints(CoincidentRoots):
    """The quartic potential has (nearly) repeated turning points."""


@dataclass
class RootSet:
    roots: list
    residuals: list
    precision_bits: int
    min_separation: float = field(default=math.inf)

    def __len__(self):
        return len(self.roots)

    def max_residual(self) -> float:
        return max((float(r) for r in self.residuals), default=0.0)

    def to_json(self, digits: int | None = None) -> str:
        digits = digits or max(15, int(self.precision_bits * 0.30103))
        doc = {
            "precision_bits": self.precision_bits,
            "roots": [[mpmath.nstr(z.real, digits), mpmath.nstr(z.imag, digits)] for z in self.roots],
            "residuals": [mpmath.nstr(r, 6) for r in self.residuals],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "RootSet":
        doc = json.loads(text)
        prec = doc["precision_bits"]
        with mp.workprec(prec):
            roots = [mpmath.mpc(re, im) for re, im in doc["roots"]]
            res = [mpmath.mpf(r) for r in doc["residuals"]]
        return cls(roots, res, prec)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _horner_with_derivative(coeffs_desc, z):
    p = coeffs_desc[0]
    dp = 0
    for c in coeffs_desc[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def relative_residual(coeffs_desc, norm, z):
    """|P(z)| / (||P||_inf * max(1,|z|)^deg)."""
    deg = len(coeffs_desc) - 1
    p = coeffs_desc[0]
    for c in coeffs_desc[1:]:
        p = p * z + c
    r = abs(z)
    scale = norm * (r ** deg if r > 1 else 1)
    return abs(p) / scale


def _float_seeds(coeffs_desc) -> np.ndarray:
    """Approximate roots in float64: rescale z = rho*u, then companion eigenvalues."""
    deg = len(coeffs_desc) - 1
    logs = []
    for c in coeffs_desc:
        logs.append(float(mpmath.log(abs(c))) if c != 0 else -math.inf)
    # Fujiwara-type radius: max_k |a_k/a_0|^(1/k) (descending indexing)
    lead = logs[0]
    cands = [(logs[k] - lead) / k for k in range(1, deg + 1) if logs[k] > -math.inf]
    log_rho = max(cands) if cands else 0.0
    # geometric mean radius is a better scale when the constant term is nonzero
    if logs[-1] > -math.inf:
        log_rho = min(log_rho, (logs[-1] - lead) / deg + 2.0) if deg else log_rho
    scaled = [logs[k] + (deg - k) * log_rho for k in range(deg + 1)]
    top = max(scaled)
    vals = []
    for k, c in enumerate(coeffs_desc):
        if c == 0 or scaled[k] - top < -700:
            vals.append(0j)
            continue
        phase = complex(c / abs(c))
        vals.append(phase * math.exp(scaled[k] - top))
    vals = np.array(vals, dtype=complex)
    # strip trailing zeros (zero roots) and leading zeros
    nz = 0
    while len(vals) > 1 and vals[-1] == 0:
        vals = vals[:-1]
        nz += 1
    u = np.roots(vals) if len(vals) > 1 else np.array([], dtype=complex)
    seeds = np.concatenate([u * math.exp(log_rho), np.zeros(nz, dtype=complex)])
    bad = ~np.isfinite(seeds)
    if bad.any():
        seeds[bad] = 0
    return seeds


def _perturb_duplicates(seeds: np.ndarray, scale: float) -> np.ndarray:
    """Spread identical seeds on a small circle so the Aberth correction is defined."""
    seeds = seeds.copy()
    order = np.lexsort((seeds.imag, seeds.real))
    eps = max(scale, 1e-300) * 1e-6
    for idx in range(1, len(order)):
        i, j = order[idx - 1], order[idx]
        if abs(seeds[i] - seeds[j]) <= eps:
            seeds[j] = seeds[j] + eps * np.exp(2j * math.pi * (0.1 + 0.37 * idx))
    return seeds


def _mpf_to_gmp(x) -> "gmpy2.mpfr":
    if not isinstance(x, mpmath.mpf):
        with mp.workprec(2048):
            x = mpmath.mpf(x)
    sign, man, exp, _ = x._mpf_
    if not man:
        return gmpy2.mpfr(0)
    bits = max(int(man.bit_length()), 2)
    # exact conversion whatever the active gmpy2 context precision
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        v = gmpy2.mul_2exp(gmpy2.mpfr(-man if sign else man, bits), exp)
    return v


def _to_gmp(z) -> "gmpy2.mpc":
    if isinstance(z, mpmath.mpf):
        return gmpy2.mpc(_mpf_to_gmp(z), 0)
    if not isinstance(z, mpmath.mpc):
        with mp.workprec(2048):
            z = mpmath.mpc(z)
    return gmpy2.mpc(_mpf_to_gmp(z.real), _mpf_to_gmp(z.imag))


def _gmp_to_mpf(x):
    if gmpy2.is_zero(x):
        return mpmath.mpf(0)
    m, e = x.as_mantissa_exp()
    return mpmath.mpf(from_man_exp(int(m), int(e)))


def _from_gmp(z):
    return mpmath.mpc(_gmp_to_mpf(z.real), _gmp_to_mpf(z.imag))


def _gmp_context(bits: int):
    return gmpy2.context(gmpy2.get_context(), precision=bits, real_prec=bits, imag_prec=bits)


def aberth(coeffs_desc, seeds, precision_bits: int, max_sweeps: int = 200):
    """Aberth-Ehrlich iteration; returns (roots, converged flags).

    ``coeffs_desc`` are mp numbers, highest degree first.  The sweep runs on
    gmpy2 complex numbers (MPC) at ``precision_bits`` and updates all active
    roots simultaneously (Jacobi style).  A root is frozen once its correction
    falls below 2^-(precision_bits - 8) relative to its size, so late sweeps
    only touch the stragglers.
    """
    with gmpy2.context(_gmp_context(precision_bits)):
        cs = [_to_gmp(c) for c in coeffs_desc]
        zs = [gmpy2.mpc(complex(s)) for s in seeds]
        n = len(zs)
        done = [False] * n
        tol = gmpy2.mul_2exp(gmpy2.mpfr(1), -(precision_bits - 8))
        one = gmpy2.mpc(1)
        for _ in range(max_sweeps):
            active = [i for i in range(n) if not done[i]]
            if not active:
                break
            new = []
            for i in active:
                zi = zs[i]
                p = cs[0]
                dp = gmpy2.mpc(0)
                for c in cs[1:]:
                    dp = dp * zi + p
                    p = p * zi + c
                if p == 0:
                    new.append((i, zi, True))
                    continue
                ratio = p / dp if dp != 0 else gmpy2.mpc(tol)
                acc = gmpy2.mpc(0)
                for j in range(n):
                    if j != i:
                        d = zi - zs[j]
                        if d != 0:
                            acc += one / d
                denom = one - ratio * acc
                step = ratio / denom if denom != 0 else ratio
                znew = zi - step
                conv = abs(step) <= tol * max(gmpy2.mpfr(1), abs(znew))
                new.append((i, znew, conv))
            for i, z, conv in new:
                zs[i] = z
                done[i] = conv
        return [_from_gmp(z) for z in zs], done


def _newton_polish(coeffs_desc, z, bits: int, steps: int = 3):
    with gmpy2.context(_gmp_context(bits)):
        cs = [_to_gmp(c) for c in coeffs_desc]
        z = _to_gmp(z)
        eps = gmpy2.mul_2exp(gmpy2.mpfr(1), -bits + 4)
        for _ in range(steps):
            p = cs[0]
            dp = gmpy2.mpc(0)
            for c in cs[1:]:
                dp = dp * z + p
                p = p * z + c
            if dp == 0 or p == 0:
                break
            step = p / dp
            z = z - step
            if abs(step) <= eps * max(gmpy2.mpfr(1), abs(z)):
                break
    with mp.workprec(bits):
        return _from_gmp(z)


def min_pair_distance(roots) -> tuple[float, tuple[int, int] | None]:
    """Smallest pairwise distance with its index pair (float screening, mp confirmation)."""
    n = len(roots)
    if n < 2:
        return math.inf, None
    arr = np.array([complex(z) for z in roots])
    d = np.abs(arr[:, None] - arr[None, :])
    np.fill_diagonal(d, np.inf)
    i, j = np.unravel_index(int(np.argmin(d)), d.shape)
    # confirm close pairs at full precision
    if d[i, j] < 1e-8 * max(1.0, abs(arr[i])):
        best, pair = math.inf, None
        cand = np.argwhere(d < 1e-8 * max(1.0, float(np.max(np.abs(arr)))))
        for a, b in cand:
            if a < b:
                dist = abs(roots[a] - roots[b])
                if dist < best:
                    best, pair = dist, (int(a), int(b))
        return best, pair
    return float(d[i, j]), (int(min(i, j)), int(max(i, j)))


def _to_mp(c):
    if hasattr(c, "numerator") and hasattr(c, "denominator") and not isinstance(c, (mpmath.mpf, mpmath.mpc)):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpmathify(c)


def _to_mp_desc(coeffs_asc) -> list:
    """Descending mp coefficients at the current working precision."""
    return [_to_mp(c) for c in reversed(list(coeffs_asc))]


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def find_roots_mp(coeffs_asc: Sequence, precision_bits: int = 256, *, check_simple: bool = True,
                  sep_exponent: float = 0.25, error_cls=CoincidentRoots) -> RootSet:
    """All roots of a polynomial with mp (or exact) coefficients in ascending order."""
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64")
    guard = 32
    wp = precision_bits + guard
    with mp.workprec(2 * wp):
        desc = _to_mp_desc(coeffs_asc)
    while desc and desc[0] == 0:
        desc = desc[1:]
    deg = len(desc) - 1
    if deg < 1:
        raise ValueError("polynomial must be nonconstant")
    # peel off exact zero roots
    nzero = 0
    while desc[-1] == 0:
        desc = desc[:-1]
        nzero += 1
    core_deg = len(desc) - 1
    roots: list = []
    if core_deg >= 1:
        seeds = _float_seeds(desc)
        scale = float(np.max(np.abs(seeds))) if len(seeds) else 1.0
        seeds = _perturb_duplicates(seeds, scale)
        zs, _ = aberth(desc, seeds, wp)
        roots = [_newton_polish(desc, z, 2 * wp) for z in zs]
    roots += [mpmath.mpc(0)] * nzero

    with mp.workprec(2 * wp):
        full = desc + [mpmath.mpf(0)] * nzero
        norm = max(abs(c) for c in full)
        residuals = [relative_residual(full, norm, z) for z in roots]
    tol = mpmath.mpf(2) ** (-precision_bits / 2)
    failing = [(i, residuals[i]) for i in range(len(roots)) if not residuals[i] < tol]
    if failing:
        raise RootFindingError(f"{len(failing)} roots above residual tolerance", failing)
    sep = math.inf
    if check_simple:
        sep, pair = min_pair_distance(roots)
        thr = 2.0 ** (-precision_bits * sep_exponent)
        if nzero > 1 or sep <= thr:
            raise error_cls(f"roots {pair} closer than {thr:.3g}", pair=pair, distance=sep)
    return RootSet(roots, residuals, precision_bits, float(sep))


def find_roots(p: ExactPoly, precision_bits: int = 256, *, use_symmetry: bool = True) -> RootSet:
    """All roots of an exact polynomial, certified simple.

    When every exponent of ``p`` is congruent mod 3 (true for Y_n and D_n),
    ``p = t^r G(t^3)``; the roots of G are found first and expanded by cube
    roots of unity, which keeps the three-fold symmetry exact and cuts the
    Aberth cost by a factor near nine.  Newton polishing and the residual
    certificate are always done on ``p`` itself.
    """
    if p.degree < 1:
        raise ValueError("polynomial must be nonconstant")
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64")
    res = p.exponent_residues(3)
    if use_symmetry and len(res) == 1 and p.degree >= 3:
        low = min(k for k, c in enumerate(p.coeffs) if c != 0)
        if low <= 1:
            g = [p.coeffs[k] for k in range(low, p.degree + 1, 3)]
            if len(g) >= 2:
                return _roots_via_cubes(p, g, low, precision_bits)
    return find_roots_mp(p.coeffs, precision_bits)


def _roots_via_cubes(p: ExactPoly, g_coeffs, low: int, precision_bits: int) -> RootSet:
    inner = find_roots_mp(g_coeffs, precision_bits, check_simple=False)
    wp = 2 * (precision_bits + 32)
    with mp.workprec(wp):
        desc = _to_mp_desc(p.coeffs)
        w = mpmath.exp(2j * mpmath.pi / 3)
        roots = []
        for u in inner.roots:
            c = mpmath.cbrt(mpmath.mpc(u)) if u != 0 else mpmath.mpc(0)
            for k in range(3):
                roots.append(_newton_polish(desc, c * w ** k, wp))
        if low == 1:
            roots.append(mpmath.mpc(0))
        norm = max(abs(c) for c in desc)
        residuals = [relative_residual(desc, norm, z) for z in roots]
    tol = mpmath.mpf(2) ** (-precision_bits / 2)
    failing = [(i, residuals[i]) for i in range(len(roots)) if not residuals[i] < tol]
    if failing:
        raise RootFindingError(f"{len(failing)} roots above residual tolerance", failing)
    sep, pair = min_pair_distance(roots)
    thr = 2.0 ** (-precision_bits / 4)
    if sep <= thr:
        raise CoincidentRoots(f"roots {pair} closer than {thr:.3g}", pair=pair, distance=sep)
    return RootSet(roots, residuals, precision_bits, float(sep))


def quartic_discriminant(s, E):
    """Vanishes exactly when z^4 + s z^2 + 2z + E has a repeated root (up to a constant)."""
    return E * s ** 4 - 8 * E ** 2 * s ** 2 + 16 * E ** 3 - s ** 3 + 36 * E * s - 27


def quartic_roots(s, E, precision_bits: int = 128, sep_threshold: float | None = None) -> list:
    """The four turning points of Q(z) = z^4 + s z^2 + 2 z + E.

    Raises DegenerateTurningPoints when two of them are closer than
    ``sep_threshold`` (default 2^{-precision_bits/4}).
    """
    with mp.workprec(precision_bits + 32):
        coeffs = [mpmath.mpc(1), mpmath.mpc(0), mpmath.mpc(s), mpmath.mpc(2), mpmath.mpc(E)]
        try:
            rts = mpmath.polyroots(coeffs, maxsteps=200, extraprec=2 * precision_bits)
        except mpmath.libmp.NoConvergence as exc:
            raise DegenerateTurningPoints(f"quartic root iteration failed at s={s}, E={E}") from exc
        rts = [_newton_polish(list(reversed([E, 2, s, 0, 1])), r, precision_bits + 32) for r in rts]
    thr = sep_threshold if sep_threshold is not None else 2.0 ** (-precision_bits / 4)
    best, pair = math.inf, None
    for i in range(4):
        for j in range(i + 1, 4):
            d = float(abs(rts[i] - rts[j]))
            if d < best:
                best, pair = d, (i, j)
    if best <= thr:
        raise DegenerateTurningPoints(
            f"turning points {pair} at distance {best:.3g}", pair=(rts[pair[0]], rts[pair[1]]), distance=best)
    return [mpmath.mpc(r) for r in rts]
