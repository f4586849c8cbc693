"""Periods of the elliptic curve w^2 = Q(z) = z^4 + s z^2 + 2 z + E.

Branch cuts form a star from the central turning point tau_0 to tau_1,
tau_2, tau_3.  With that cut system

    sqrt(Q)(z) = g_1(z) g_2(z) g_3(z) / (z - tau_0),
    g_j(z)     = (z - m_j) * sqrt(1 - (r_j / (z - m_j))^2)   (principal root),

where m_j and r_j are the midpoint and half-difference of the segment
[tau_j, tau_0].  Each g_j is analytic off its own segment and behaves like z
at infinity, so the product behaves like z^2.

A cut period over [tau_j, tau_0] is computed as -1/2 times the integral over a
confocal ellipse z = m + r cos(phi - i eta) around that segment, traversed
with phi increasing.  On the ellipse the factor g_j equals i r sin(phi - i eta)
exactly.  The remaining factor (the square root of (z - tau_k)(z - tau_l)) is
analytic inside the ellipse; it is transported by continuity from the
midpoint of the segment, where it takes its value in the star determination.
The trapezoidal rule is spectrally accurate on these loops.
"""

from __future__ import annotations

import cmath
import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np
from mpmath import mp

from .roots import DegenerateTurningPoints, quartic_roots

SQRT_Q = "sqrt_q"
ONE_OVER_SQRT_Q = "one_over_sqrt_q"
S1 = "s1"
D_S = "d_s"   # d/ds sqrt(Q) = z^2 / (2 sqrt Q)
D_E = "d_e"   # d/dE sqrt(Q) = 1 / (2 sqrt Q)
DIFFERENTIALS = (SQRT_Q, ONE_OVER_SQRT_Q, S1, D_S, D_E)

INSIDE = "inside"
OUTSIDE = "outside"
NEAR_BOUNDARY = "near-boundary"


class AmbiguousLabeling(ValueError):
    """Two labelings of the turning points have nearly equal matching cost."""


class LoopGeometry(ArithmeticError):
    """A quadrature loop is not separated from the other turning points."""


class BranchTrackingError(ArithmeticError):
    """Continuity tracking of a square root jumped by more than pi/2 between nodes."""


def _reference_taus():
    c = 2.0 ** (1.0 / 3.0)
    return [0j, c * cmath.exp(1j * math.pi / 3), complex(-c, 0), c * cmath.exp(-1j * math.pi / 3)]


REFERENCE_TAUS = _reference_taus()


# ---------------------------------------------------------------------------
# labeling
# ---------------------------------------------------------------------------

def label_turning_points(roots: Sequence, reference: Sequence | None = None, ambiguity: float = 0.01) -> list:
    """Order the four roots as (tau_0, tau_1, tau_2, tau_3).

    The assignment minimizes the total distance to ``reference`` (by default
    the turning points at s = E = 0: 0, 2^{1/3} e^{i pi/3}, -2^{1/3},
    2^{1/3} e^{-i pi/3}); AmbiguousLabeling is raised when the runner-up
    costs less than (1 + ambiguity) times the best.
    """
    ref = [complex(r) for r in (reference if reference is not None else REFERENCE_TAUS)]
    rts = list(roots)
    rc = [complex(r) for r in rts]
    costs = []
    for perm in itertools.permutations(range(4)):
        cost = sum(abs(rc[perm[k]] - ref[k]) for k in range(4))
        costs.append((cost, perm))
    costs.sort(key=lambda c: c[0])
    best, second = costs[0], costs[1]
    if second[0] < (1 + ambiguity) * best[0] and best[0] > 1e-12:
        raise AmbiguousLabeling(f"labeling costs {best[0]:.4g} and {second[0]:.4g} within {ambiguity:.0%}")
    return [rts[best[1][k]] for k in range(4)]


def label_by_continuation(s, E, steps: int = 64, precision_bits: int = 128) -> list:
    """Labels carried from (0,0) along the straight path (u s, u E), u in [0, 1]."""
    labels = list(REFERENCE_TAUS)
    for k in range(1, steps + 1):
        u = k / steps
        rts = quartic_roots(complex(s) * u, complex(E) * u, precision_bits, sep_threshold=1e-12)
        labels = label_turning_points(rts, labels, ambiguity=0.0)
    return labels


# ---------------------------------------------------------------------------
# loop geometry
# ---------------------------------------------------------------------------

@dataclass
class Loop:
    j: int
    m: complex
    r: complex
    eta: float
    others: tuple


def loop_geometry(taus: Sequence, j: int, eta_fraction: float = 0.5) -> Loop:
    """Confocal ellipse around [tau_j, tau_0].

    The ellipse parameter eta is ``eta_fraction`` times the smallest elliptic
    coordinate |Im arccos((tau_k - m)/r)| of the two excluded turning points,
    so both stay outside with a margin matched to the endpoint singularities.
    """
    t0, tj = complex(taus[0]), complex(taus[j])
    m = (t0 + tj) / 2
    r = (t0 - tj) / 2
    others = tuple(k for k in (1, 2, 3) if k != j)
    etas = []
    for k in others:
        w = (complex(taus[k]) - m) / r
        etas.append(abs(cmath.acos(w).imag))
    eta_min = min(etas)
    if eta_min < 1e-9:
        raise LoopGeometry(f"turning point {others[etas.index(eta_min)]} lies on segment {j}")
    return Loop(j, m, r, eta_fraction * eta_min, others)


def _star_sqrt_factor(z: complex, tau0: complex, tau: complex) -> complex:
    m = (tau0 + tau) / 2
    r = (tau0 - tau) / 2
    d = z - m
    return d * cmath.sqrt(1 - (r / d) ** 2)


def star_sqrt_q(z: complex, taus: Sequence) -> complex:
    """sqrt(Q) in the star determination (cuts [tau_0, tau_j]), normalized ~ z^2 at infinity."""
    t = [complex(x) for x in taus]
    g = 1
    for j in (1, 2, 3):
        g *= _star_sqrt_factor(z, t[0], t[j])
    return g / (z - t[0])


def _track(values: np.ndarray, start: complex) -> np.ndarray:
    """Signs making the principal roots ``values`` continuous, the first one matched to ``start``."""
    flips = np.real(values[1:] * np.conj(values[:-1])) < 0
    sign = np.concatenate([[1.0], np.where(flips, -1.0, 1.0)])
    sign = np.cumprod(sign)
    out = values * sign
    if (out[0] * np.conj(start)).real < 0:
        out = -out
    # post check: consecutive angle change must stay below pi/2
    ratio = out[1:] / out[:-1]
    if np.any(np.abs(np.angle(ratio)) > math.pi / 2 * 0.9):
        raise BranchTrackingError("square-root continuity step too large; refine nodes")
    return out


def _h_start(taus, loop: Loop) -> complex:
    """Star value of sqrt((z - tau_k)(z - tau_l)) at the segment midpoint, carried to the loop's phi = pi/2 point."""
    t = [complex(x) for x in taus]
    k, l = loop.others
    m = loop.m
    h_m = _star_sqrt_factor(m, t[0], t[k]) * _star_sqrt_factor(m, t[0], t[l]) / (m - t[0])
    target = m + 1j * loop.r * math.sinh(loop.eta)
    steps = 64
    path = m + (target - m) * np.linspace(0, 1, steps + 1)
    vals = np.sqrt((path - t[k]) * (path - t[l]))
    tr = _track(vals, h_m)
    return complex(tr[-1])


def _integrand(kind: str, z, sq, s):
    if kind == SQRT_Q:
        return sq
    if kind == ONE_OVER_SQRT_Q:
        return 1 / sq
    if kind == S1:
        q = sq * sq
        return (12 * z * z + 2 * s) / (48 * q * sq)
    if kind == D_S:
        return z * z / (2 * sq)
    if kind == D_E:
        return 1 / (2 * sq)
    raise ValueError(f"unknown differential {kind!r}")


def _loop_sqrt_np(taus, loop: Loop, nodes: int):
    t = np.array([complex(x) for x in taus])
    k, l = loop.others
    phi = math.pi / 2 + 2 * math.pi * np.arange(nodes) / nodes
    psi = phi - 1j * loop.eta
    z = loop.m + loop.r * np.cos(psi)
    dz = -loop.r * np.sin(psi)
    g = 1j * loop.r * np.sin(psi)
    h = _track(np.sqrt((z - t[k]) * (z - t[l])), _h_start(taus, loop))
    # closure: the last node must connect to the first without a sign change
    if (h[0] * np.conj(h[-1])).real < 0:
        raise LoopGeometry("loop encloses a branch point of the transported factor")
    return z, dz, g * h


def _cut_periods_np(taus, loop: Loop, s, kinds, nodes: int) -> dict:
    z, dz, sq = _loop_sqrt_np(taus, loop, nodes)
    w = 2 * math.pi / nodes
    return {kd: complex(-0.5 * w * np.sum(_integrand(kd, z, sq, s) * dz)) for kd in kinds}


def _cut_periods_mp(taus, loop: Loop, s, kinds, nodes: int) -> dict:
    """Same quadrature in mpmath at the current working precision."""
    t = [mpmath.mpc(x) for x in taus]
    k, l = loop.others
    m = (t[0] + t[loop.j]) / 2
    r = (t[0] - t[loop.j]) / 2
    eta = mpmath.mpf(loop.eta)
    s = mpmath.mpc(s)
    # start value from the float geometry, then continuity at full precision
    h_prev = mpmath.mpc(_h_start([complex(x) for x in taus], loop))
    acc = {kd: mpmath.mpc(0) for kd in kinds}
    first = None
    two_pi = 2 * mpmath.pi
    for idx in range(nodes):
        phi = mpmath.pi / 2 + two_pi * idx / nodes
        psi = phi - 1j * eta
        sn = mpmath.sin(psi)
        z = m + r * mpmath.cos(psi)
        dz = -r * sn
        g = 1j * r * sn
        h = mpmath.sqrt((z - t[k]) * (z - t[l]))
        if mpmath.re(h * mpmath.conj(h_prev)) < 0:
            h = -h
        if abs(mpmath.arg(h / h_prev)) > 0.45 * mpmath.pi:
            raise BranchTrackingError("square-root continuity step too large; refine nodes")
        if first is None:
            first = h
        h_prev = h
        sq = g * h
        for kd in kinds:
            acc[kd] += _integrand(kd, z, sq, s) * dz
    if mpmath.re(first * mpmath.conj(h_prev)) < 0:
        raise LoopGeometry("loop encloses a branch point of the transported factor")
    w = two_pi / nodes
    return {kd: -w * acc[kd] / 2 for kd in kinds}


def cut_periods(s, E, taus=None, kinds=(SQRT_Q,), nodes: int = 512, precision_bits: int | None = None,
                tol: float = 1e-13, max_nodes: int = 1 << 15) -> list[dict]:
    """Cut periods of the requested differentials for j = 1, 2, 3.

    Returns a list of three dicts {kind: value}.  In float mode the node count
    doubles until all values change by less than ``tol`` (relative to the
    largest); in mp mode (``precision_bits`` given) the same happens at that
    precision with tolerance 2^{-precision_bits/2}.
    """
    if taus is None:
        taus = label_turning_points(quartic_roots(s, E, max(precision_bits or 0, 128), sep_threshold=1e-10))
    loops = [loop_geometry(taus, j) for j in (1, 2, 3)]
    out = []
    for loop in loops:
        n = nodes
        prev = None
        while True:
            if precision_bits is None:
                cur = _cut_periods_np(taus, loop, complex(s), kinds, n)
                eps = tol
            else:
                with mp.workprec(precision_bits):
                    cur = _cut_periods_mp(taus, loop, s, kinds, n)
                eps = 2.0 ** (-precision_bits / 2)
            if prev is not None:
                scale = max(1.0, max(float(abs(v)) for v in cur.values()))
                if max(float(abs(cur[kd] - prev[kd])) for kd in kinds) <= eps * scale:
                    break
            if n >= max_nodes:
                break
            prev = cur
            n *= 2
        out.append(cur)
    return out


def cut_period(s, E, j: int, differential: str = SQRT_Q, nodes: int = 512, precision_bits: int | None = None,
               taus=None):
    """Single cut period of ``differential`` over [tau_j, tau_0] (j in 1..3)."""
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    res = cut_periods(s, E, taus, (differential,), nodes, precision_bits)
    return res[j - 1][differential]


# ---------------------------------------------------------------------------
# elliptic data record
# ---------------------------------------------------------------------------

@dataclass
class EllipticData:
    s: complex
    E: complex
    taus: list
    I: list
    omega: complex
    omega_prime: complex
    tau_mod: complex
    S1: list
    dI_ds: list = field(default_factory=list)
    dI_dE: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def pair(z):
            z = complex(z)
            return [repr(z.real), repr(z.imag)]

        return {
            "s": pair(self.s), "E": pair(self.E),
            "taus": [pair(t) for t in self.taus],
            "I": [pair(v) for v in self.I],
            "omega": pair(self.omega), "omega_prime": pair(self.omega_prime),
            "tau_mod": pair(self.tau_mod),
            "S1": [pair(v) for v in self.S1],
        }


def elliptic_data(s, E, taus=None, nodes: int = 512, precision_bits: int | None = None,
                  reference=None, check_tau: bool = True) -> EllipticData:
    """Turning points, cut periods of sqrt(Q) and S1, half-periods and modulus at (s, E)."""
    if taus is None:
        rts = quartic_roots(s, E, max(precision_bits or 0, 128), sep_threshold=1e-10)
        taus = label_turning_points(rts, reference)
    kinds = (SQRT_Q, ONE_OVER_SQRT_Q, S1, D_S, D_E)
    per = cut_periods(s, E, taus, kinds, nodes, precision_bits)
    I = [p[SQRT_Q] for p in per]
    S1v = [p[S1] for p in per]
    omega = per[1][ONE_OVER_SQRT_Q]
    omega_p = per[0][ONE_OVER_SQRT_Q]
    tau = omega_p / omega
    if check_tau and not complex(tau).imag > 0:
        raise AmbiguousLabeling(f"Im tau = {complex(tau).imag:.3g} <= 0 at s={s}, E={E}")
    return EllipticData(s, E, list(taus), I, omega, omega_p, tau, S1v,
                        [p[D_S] for p in per], [p[D_E] for p in per])


def half_periods_and_tau(s, E, nodes: int = 512, precision_bits: int | None = None, taus=None):
    """(omega, omega', tau) with omega over [tau_2, tau_0], omega' over [tau_1, tau_0], tau = omega'/omega."""
    ed = elliptic_data(s, E, taus, nodes, precision_bits)
    return ed.omega, ed.omega_prime, ed.tau_mod


def quartic_j_invariant(s, E):
    """Klein j-invariant of w^2 = z^4 + s z^2 + 2 z + E from the classical quartic invariants."""
    a, b, c, d, e = 1, 0, s, 2, E
    I = 12 * a * e - 3 * b * d + c * c
    J = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c ** 3
    return 1728 * 4 * I ** 3 / (4 * I ** 3 - J ** 2)


# ---------------------------------------------------------------------------
# derivative identities
# ---------------------------------------------------------------------------

def _periods_at(s, E, ref_taus, precision_bits, nodes):
    rts = quartic_roots(s, E, max(precision_bits or 0, 128), sep_threshold=1e-10)
    taus = label_turning_points(rts, ref_taus, ambiguity=0.0)
    return [p[SQRT_Q] for p in cut_periods(s, E, taus, (SQRT_Q,), nodes, precision_bits)]


def s1_period_fd(s, E, j: int, h_fd: float = 1e-4, precision_bits: int | None = None, nodes: int = 512):
    """(-d^2/ds dE - (s/6) d^2/dE^2) applied to the cut period I_j by central differences."""
    ctx = mp.workprec(precision_bits) if precision_bits else _nullctx()
    with ctx:
        if precision_bits:
            s, E, h = mpmath.mpc(s), mpmath.mpc(E), mpmath.mpf(h_fd)
        else:
            s, E, h = complex(s), complex(E), float(h_fd)
        ref = label_turning_points(quartic_roots(s, E, max(precision_bits or 0, 128)))
        f = {}
        for ds, dE in [(1, 1), (1, -1), (-1, 1), (-1, -1), (0, 1), (0, -1), (0, 0)]:
            f[(ds, dE)] = _periods_at(s + ds * h, E + dE * h, ref, precision_bits, nodes)[j - 1]
        d_sE = (f[(1, 1)] - f[(1, -1)] - f[(-1, 1)] + f[(-1, -1)]) / (4 * h * h)
        d_EE = (f[(0, 1)] - 2 * f[(0, 0)] + f[(0, -1)]) / (h * h)
        return -d_sE - s / 6 * d_EE


class _nullctx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def jacobian_check(s, E, h_fd: float = 1e-4, precision_bits: int | None = None, nodes: int = 512):
    """det d(I_A, I_B)/d(s, E) by central differences, with I_A = 2 I_2 and I_B = 2 I_1."""
    ctx = mp.workprec(precision_bits) if precision_bits else _nullctx()
    with ctx:
        if precision_bits:
            s, E, h = mpmath.mpc(s), mpmath.mpc(E), mpmath.mpf(h_fd)
        else:
            s, E, h = complex(s), complex(E), float(h_fd)
        ref = label_turning_points(quartic_roots(s, E, max(precision_bits or 0, 128)))
        ps = _periods_at(s + h, E, ref, precision_bits, nodes)
        ms = _periods_at(s - h, E, ref, precision_bits, nodes)
        pe = _periods_at(s, E + h, ref, precision_bits, nodes)
        me = _periods_at(s, E - h, ref, precision_bits, nodes)
        dA_ds = 2 * (ps[1] - ms[1]) / (2 * h)
        dB_ds = 2 * (ps[0] - ms[0]) / (2 * h)
        dA_dE = 2 * (pe[1] - me[1]) / (2 * h)
        dB_dE = 2 * (pe[0] - me[0]) / (2 * h)
        return dA_ds * dB_dE - dA_dE * dB_ds


def jacobian_analytic(ed: EllipticData):
    """Same determinant from the loop integrals of d sqrt(Q)/ds and d sqrt(Q)/dE."""
    dA_ds, dB_ds = 2 * ed.dI_ds[1], 2 * ed.dI_ds[0]
    dA_dE, dB_dE = 2 * ed.dI_dE[1], 2 * ed.dI_dE[0]
    return dA_ds * dB_dE - dA_dE * dB_ds


# ---------------------------------------------------------------------------
# elliptic-region boundary
# ---------------------------------------------------------------------------

S0 = -3 / 2 ** (1 / 3)


def boundary_function(a: complex) -> float:
    """Re[(4a^3-1)/(6a^3) w + ln((1-w)/(a^{3/2} sqrt 2))] with w = sqrt(2a^3+1).

    The real part of the logarithm does not depend on its branch, and the
    expression changes sign with w, so its zero set is branch independent.
    """
    a3 = a ** 3
    w = cmath.sqrt(2 * a3 + 1)
    return ((4 * a3 - 1) / (6 * a3) * w).real + math.log(abs(1 - w)) - 1.5 * math.log(abs(a)) - 0.5 * math.log(2)


def s_of_a(a):
    return (4 * a ** 3 - 1) / (2 * a ** 2)


def E_of_a(a):
    return (8 * a ** 3 + 1) / (16 * a ** 4)


def _a_branches(s: complex) -> np.ndarray:
    """The three solutions a of 4a^3 - 2 s a^2 - 1 = 0."""
    return np.roots([4, -2 * s, 0, -1])


def _boundary_terms(a: complex, w: complex) -> float:
    a3 = a ** 3
    return ((4 * a3 - 1) / (6 * a3) * w).real + math.log(abs(1 - w)) - 1.5 * math.log(abs(a)) - 0.5 * math.log(2)


class _BranchState:
    """Three a-branches over a ray in the s-plane, each with its w = sqrt(2a^3+1) tracked continuously."""

    def __init__(self, a: np.ndarray, w: np.ndarray):
        self.a = a
        self.w = w

    @classmethod
    def at_origin(cls):
        a = np.array(sorted(_a_branches(0j), key=lambda z: cmath.phase(z)))
        return cls(a, np.sqrt(2 * a ** 3 + 1))

    def step(self, s: complex) -> "_BranchState":
        cur = _a_branches(s)
        best, bp = math.inf, None
        for perm in itertools.permutations(range(3)):
            c = sum(abs(cur[perm[k]] - self.a[k]) for k in range(3))
            if c < best:
                best, bp = c, perm
        a = cur[list(bp)]
        w = np.sqrt(2 * a ** 3 + 1)
        flip = np.real(w * np.conj(self.w)) < 0
        w = np.where(flip, -w, w)
        return _BranchState(a, w)

    def values(self) -> np.ndarray:
        return np.array([_boundary_terms(self.a[k], self.w[k]) for k in range(3)])


def _ray_crossing(theta: float, r_max: float = 4.0, steps: int = 400) -> tuple[float, complex]:
    """First radius along s = r e^{i theta} where F(a(s)) vanishes on some branch; returns (r, a)."""
    u = cmath.exp(1j * theta)
    prev = _BranchState.at_origin()
    prev_f = prev.values()
    prev_r = 0.0
    for k in range(1, steps + 1):
        r = r_max * k / steps
        cur = prev.step(r * u)
        cur_f = cur.values()
        hits = [b for b in range(3) if np.sign(cur_f[b]) != np.sign(prev_f[b])]
        if hits:
            cands = []
            for b in hits:
                lo, hi = prev_r, r
                st_lo, f_lo = prev, prev_f[b]
                for _ in range(60):
                    mid = (lo + hi) / 2
                    st_mid = st_lo.step(mid * u)
                    fm = st_mid.values()[b]
                    if np.sign(fm) == np.sign(f_lo):
                        lo, st_lo, f_lo = mid, st_mid, fm
                    else:
                        hi = mid
                cands.append((lo, complex(st_lo.a[b])))
            return min(cands, key=lambda c: c[0])
        prev, prev_f, prev_r = cur, cur_f, r
    raise ArithmeticError(f"no boundary crossing along theta={theta}")


@dataclass
class RegionBoundary:
    polyline: list
    corners: list

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["re_s", "im_s"])
            for z in self.polyline:
                wr.writerow([f"{z.real:.12f}", f"{z.imag:.12f}"])

    def distance(self, s: complex) -> float:
        pts = np.array(self.polyline + [self.polyline[0]])
        a, b = pts[:-1], pts[1:]
        ab = b - a
        t = np.clip(np.real((s - a) * np.conj(ab)) / np.maximum(np.abs(ab) ** 2, 1e-300), 0, 1)
        return float(np.min(np.abs(a + t * ab - s)))

    def winding(self, s: complex) -> int:
        pts = np.array(self.polyline + [self.polyline[0]]) - s
        ang = np.angle(pts[1:] / pts[:-1])
        return int(round(float(np.sum(ang)) / (2 * math.pi)))

    def classify(self, s, margin: float = 0.05) -> str:
        s = complex(s)
        if self.distance(s) < margin:
            return NEAR_BOUNDARY
        return INSIDE if self.winding(s) != 0 else OUTSIDE


def region_boundary(resolution: int = 120) -> RegionBoundary:
    """Trace the closed boundary of the elliptic region in the s-plane.

    One third of the boundary (angles between the corner at angle pi and the
    corner at angle pi/3, i.e. theta in [pi/3, pi]) is scanned ray by ray; the
    rest follows from the rotation s -> e^{2 pi i/3} s, which maps the
    parametrization a -> e^{2 pi i/3} a onto itself.  ``resolution`` points
    are used per arc between consecutive corners.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    w = cmath.exp(2j * math.pi / 3)
    arc = []
    for k in range(resolution):
        theta = math.pi / 3 + (2 * math.pi / 3) * k / resolution
        if k == 0:
            arc.append(S0 * w * w)  # the corner at angle pi/3 is s0 e^{-2 pi i/3}
            continue
        r, _ = _ray_crossing(theta)
        arc.append(r * cmath.exp(1j * theta))
    poly = []
    for rot in (1, w, w * w):
        poly.extend(z * rot for z in arc)
    poly.sort(key=lambda z: cmath.phase(z) % (2 * math.pi))
    corners = [S0, S0 * w, S0 * w * w]
    return RegionBoundary(poly, corners)


_DEFAULT_BOUNDARY: RegionBoundary | None = None


def default_boundary() -> RegionBoundary:
    global _DEFAULT_BOUNDARY
    if _DEFAULT_BOUNDARY is None:
        _DEFAULT_BOUNDARY = region_boundary(120)
    return _DEFAULT_BOUNDARY


def classify_s(s, margin: float = 0.05, boundary: RegionBoundary | None = None) -> str:
    """inside / outside / near-boundary relative to the traced elliptic region."""
    return (boundary or default_boundary()).classify(s, margin)


def boundary_corner_refined() -> float:
    """Corner on the negative real axis recovered by refining the crossing along theta = pi."""
    r, _ = _ray_crossing(math.pi, r_max=4.0, steps=2000)
    return -r


def near_origin_constant(ell: int, precision_bits: int = 128):
    """c_ell = integral over [-2^{1/3}, 0] of z^ell dz / (2 sqrt|z^4 + 2z|) (tanh-sinh quadrature)."""
    with mp.workprec(precision_bits):
        a = -mpmath.cbrt(2)

        # z^4 + 2z = z (z - a)(z^2 + a z + a^2), factored to keep the endpoint behaviour exact
        def f(z):
            return z ** ell / (2 * mpmath.sqrt(abs(z) * abs(z - a) * abs(z * z + a * z + a * a)))
        return mpmath.quad(f, [a, 0])
