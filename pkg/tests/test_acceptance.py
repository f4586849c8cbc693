"""Acceptance criteria 1 to 11, each evaluated at its stated tolerance.

Every criterion records its parts in shared.RESULTS; the terminal summary
prints one PASS/FAIL line per criterion.  Parts that cannot be met as
stated are evaluated at full tolerance under strict xfail, so they show as
FAIL in the summary and an unexpected pass would break the run.
"""

import cmath
import math
import statistics
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from fixtures import AIRY_TABLE, DISC5_SYMPY, DISC_TABLE, VY_TABLE
from painlattice.elliptic import (
    INSIDE,
    NEAR_BOUNDARY,
    OUTSIDE,
    S0,
    boundary_corner_refined,
    classify_s,
    elliptic_data,
    jacobian_analytic,
    jacobian_check,
    near_origin_constant,
    s1_period_fd,
)
from painlattice.exactpoly import ExactPoly, airy_abc, discriminant_poly, vy_polynomials
from painlattice.lattice import interior_indices, local_discrepancy, neighbor_prediction
from painlattice.quantize import elliptic_for_point, quantize_points
from painlattice.quasipoly import (
    GAMMA,
    GAMMA_TILDE,
    WedgeQuadrature,
    degeneracy_rank_check,
    relative_vanishing,
    verify_point,
)
from painlattice.roots import find_roots
from painlattice.spectra import CONJECTURE, NATURAL, char_poly_numeric, eigenpolynomial, st_point_at
from shared import jm, lattices, record, st

TOL30 = mpmath.mpf(10) ** -30

# 5 x 5 grid of (s, E) pairs well inside the elliptic region
GRID_S = [-0.6, -0.3 + 0.2j, 0, 0.3 - 0.1j, 0.6]
GRID_E = [-0.4, -0.2j, 0.05, 0.2 + 0.1j, 0.3 + 0.3j]


# ---------------------------------------------------------------------------
# 1. exact fixtures
# ---------------------------------------------------------------------------

def test_c1_vy_table():
    ys = vy_polynomials(5)
    ok = all(ys[n] == ExactPoly(VY_TABLE[n]) for n in range(1, 6))
    record(1, "Y_1..Y_5 equal the printed table", ok)
    assert ok


def test_c1_disc_oracle():
    ok = discriminant_poly(5) == ExactPoly(DISC5_SYMPY)
    record(1, "D_5 equals the independent sympy oracle", ok)
    assert ok


@pytest.mark.xfail(strict=True, reason="printed t^9 coefficient of D_5 is 76211/32; the exact value is 76221/32")
def test_c1_disc_table():
    bad = [n for n in range(1, 6) if discriminant_poly(n) != ExactPoly(DISC_TABLE[n])]
    detail = "mismatch at n=" + ",".join(map(str, bad)) if bad else ""
    if 5 in bad:
        detail += f"; computed t^9 coefficient {discriminant_poly(5)[9]}, printed {DISC_TABLE[5][9]}"
    record(1, "monic D_1..D_5 equal the printed table", not bad, detail)
    assert not bad


@pytest.mark.xfail(strict=True, reason="printed B_3 has constant term -3/7; the defining equation forces +3/7")
def test_c1_airy_table():
    bad = []
    for n in range(5):
        A, B, _ = airy_abc(n)
        a_ref, b_ref = AIRY_TABLE[n]
        if A != ExactPoly(a_ref):
            bad.append(f"A_{n}")
        if B != ExactPoly(b_ref):
            bad.append(f"B_{n}")
    detail = ""
    if bad:
        detail = "mismatch: " + ",".join(bad) + f"; computed B_3 coefficients {[str(c) for c in airy_abc(3)[1].coeffs]}"
    record(1, "A_n, B_n for n=0..4 equal the printed table", not bad, detail)
    assert not bad


# ---------------------------------------------------------------------------
# 2. degree and count laws
# ---------------------------------------------------------------------------

def test_c2_degrees_and_roots():
    ys = vy_polynomials(12)
    worst = 0.0
    ok = True
    for n in range(1, 13):
        d = discriminant_poly(n)
        deg = n * (n + 1) // 2
        ok &= ys[n].degree == deg and d.degree == deg
        for p in (ys[n], d):
            rs = find_roots(p, 256)
            ok &= len(rs.roots) == deg and rs.min_separation > 0
            worst = max(worst, float(rs.max_residual()))
    ok_res = worst < 2.0 ** -128
    record(2, "deg Y_n = deg D_n = n(n+1)/2 for n <= 12, full simple root sets", ok)
    record(2, "root residuals < 2^-128 at 256 bits", ok_res, f"max residual {worst:.3e}")
    assert ok and ok_res


# ---------------------------------------------------------------------------
# 3. anchor points
# ---------------------------------------------------------------------------

def _close(a, b):
    return abs(mpmath.mpc(a) - mpmath.mpc(b)) < TOL30


def test_c3_anchors():
    with mp.workprec(160):
        (p1,) = st(1)
        ok1 = _close(p1.t, 0) and _close(p1.lambda_double, 0) and _close(p1.p_coeffs[0], 0) \
            and _close(p1.p_coeffs[1], 1)
        record(3, "ST n=1: (t, lambda) = (0, 0), p = x", ok1)

        w = mpmath.exp(2j * mpmath.pi / 3)
        pts = st(2)
        ok2 = len(pts) == 3
        for k in range(3):
            q = min(pts, key=lambda p: abs(p.t - mpmath.mpf(-1.5) * w ** k))
            ok2 &= _close(q.t, mpmath.mpf(-1.5) * w ** k)
            ok2 &= _close(q.lambda_double, -2 * w ** (2 * k))
            ok2 &= _close(q.Lambda, mpmath.mpf(-23) / 16 * w ** (2 * k))
        record(3, "ST n=2: (t, lambda, Lambda) = (-3/2, -2, -23/16) and rotations", ok2)

        p4 = st_point_at(4, mpmath.mpc(0), 128)
        ok4 = _close(p4.lambda_double, 0) and all(_close(a, b) for a, b in zip(p4.p_coeffs, [0, 2, 0, 0, 1]))
        record(3, "ST n=4, t=0: p = x^4 + 2x, lambda = 0", ok4)

        (j1,) = jm(1)
        okj = _close(j1.a, 0) and _close(j1.Lambda, 0)
        record(3, "JM n=1: (a, Lambda) = (0, 0)", okj)
    assert ok1 and ok2 and ok4 and okj


# ---------------------------------------------------------------------------
# 4. period identities
# ---------------------------------------------------------------------------

def _fd_tolerance(h):
    # truncation O(h^2) plus rounding eps/h^2 of a second difference, with a safety factor
    return 100 * (2.2e-16 / h ** 2 + h ** 2)


def test_c4_period_identities():
    s_sum = s1_sum = fd = 0.0
    h = 1e-4
    for s in GRID_S:
        for E in GRID_E:
            ed = elliptic_data(s, E)
            s_sum = max(s_sum, abs(sum(ed.I) + 1j * math.pi))
            s1_sum = max(s1_sum, abs(sum(ed.S1)))
            for j in (1, 2, 3):
                fd = max(fd, abs(s1_period_fd(s, E, j, h) - ed.S1[j - 1]))
    t0 = abs(elliptic_data(0, 0).tau_mod - cmath.exp(2j * math.pi / 3))
    ok_a = record(4, "I_1 + I_2 + I_3 = -i pi on the 5x5 grid to 1e-10", s_sum < 1e-10, f"max {s_sum:.2e}")
    ok_b = record(4, "sum of S1_j = 0 on the 5x5 grid to 1e-10", s1_sum < 1e-10, f"max {s1_sum:.2e}")
    ok_c = record(4, "tau(0,0) = e^{2 i pi/3} to 1e-10", t0 < 1e-10, f"error {t0:.2e}")
    tol = _fd_tolerance(h)
    ok_d = record(4, "direct and finite-difference S1 periods agree", fd < tol, f"max {fd:.2e}, tolerance {tol:.1e}")
    assert ok_a and ok_b and ok_c and ok_d


@pytest.mark.xfail(strict=True, reason="the determinant evaluates to -i pi with Im tau > 0 and I_j = -i pi/3 at the origin")
def test_c4_jacobian():
    worst = 0.0
    worst_neg = 0.0
    for s in GRID_S:
        for E in GRID_E:
            ja = jacobian_analytic(elliptic_data(s, E))
            worst = max(worst, abs(ja - 1j * math.pi))
            worst_neg = max(worst_neg, abs(ja + 1j * math.pi))
    jf = jacobian_check(0.3 - 0.1j, 0.2 + 0.1j)
    ok = worst < 1e-6 and abs(jf - 1j * math.pi) < 1e-6
    record(4, "Jacobian determinant = i pi to 1e-6", ok,
           f"max |J - i pi| = {worst:.3e}; max |J + i pi| = {worst_neg:.1e}; finite-difference J = {jf:.6f}")
    assert ok


# ---------------------------------------------------------------------------
# 5. near-origin constants
# ---------------------------------------------------------------------------

@pytest.mark.xfail(strict=True, reason="the stated integral evaluates to 0.96381 and 0.47048, half the quoted constants")
def test_c5_near_origin_constants():
    c0, c2 = near_origin_constant(0), near_origin_constant(2)
    ok = f"{float(c0):.5g}" == "1.9276" and f"{float(c2):.4g}" == "0.9409"
    record(5, "c_0 = 1.9276 and c_2 = 0.9409 to 4 significant digits", ok,
           f"quadrature gives c_0 = {float(c0):.6f}, c_2 = {float(c2):.6f}; "
           f"twice these are {2 * float(c0):.5f}, {2 * float(c2):.5f}")
    assert ok


# ---------------------------------------------------------------------------
# 6. quantization
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def quant_records():
    out = {}
    for n in range(4, 16):
        out[n] = (quantize_points(list(jm(n))), quantize_points(list(st(n))),
                  quantize_points(list(jm(n)), include_s1=False))
    return out


def test_c6_quantization(quant_records):
    jm_ok, st_ok, t0_ok = True, True, True
    worst = 0.0
    improved = total = 0
    for n, (jr, sr, jl) in quant_records.items():
        for r, r0 in zip(jr, jl):
            if r.region != INSIDE:
                continue
            jm_ok &= r.sum_rule_ok and r.max_residual < 0.05 * math.pi
            worst = max(worst, r.max_residual / math.pi)
            total += 1
            improved += r.max_residual < r0.max_residual
        for r, pt in zip(sr, st(n)):
            if r.region != INSIDE:
                continue
            st_ok &= r.sum_rule_ok
            if n % 3 == 1 and abs(complex(pt.t)) < 1e-20:
                t0_ok &= r.integers == ((n - 1) // 3,) * 3
    frac = improved / total
    record(6, "JM: sum k_j = n-1 and max residual < 0.05 pi for n=4..15", jm_ok, f"worst residual {worst:.4f} pi")
    record(6, "ST: sum m_j = n-1 for n=4..15", st_ok)
    record(6, "ST t=0 points: m_j = (n-1)/3 for n = 1 mod 3", t0_ok)
    record(6, "S1 lowers the JM residual for >= 90% of interior points", frac >= 0.9, f"{frac:.1%} of {total}")
    assert jm_ok and st_ok and t0_ok and frac >= 0.9


# ---------------------------------------------------------------------------
# 7. two-eigenvalue relation
# ---------------------------------------------------------------------------

def test_c7_two_eigs(quant_records):
    med = {n: statistics.median(r.twoeigs_error for r in quant_records[n][1] if r.region == INSIDE)
           for n in (5, 10, 15)}
    ok_a = record(7, "median |delta| at n=15 < 0.05", med[15] < 0.05, f"{med[15]:.4f}")
    ok_b = record(7, "median |delta| decreases in n", med[5] > med[10] > med[15],
                  ", ".join(f"n={n}: {v:.4f}" for n, v in med.items()))
    assert ok_a and ok_b


# ---------------------------------------------------------------------------
# 8. quasi-polynomial verification
# ---------------------------------------------------------------------------

def _simple_eigenvalue(n, t):
    with mp.workprec(256):
        coeffs = char_poly_numeric(n, t)
        lams = mpmath.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=256)
        # the eigenvalue farthest from all others is simple
        return max(lams, key=lambda lam: min(abs(lam - mu) for mu in lams if mu is not lam))


def test_c8_orthogonality():
    worst = {"vanish": 0.0, "sigma": 0.0, "fekete": 0.0}
    ctrl_simple, ctrl_pert = math.inf, math.inf
    for n in range(1, 9):
        wq = WedgeQuadrature(precision_bits=max(200, 20 * n))
        for i, pt in enumerate(st(n)):
            r = verify_point(i, pt, wq)
            worst["vanish"] = max(worst["vanish"], r.rel_gamma, r.rel_gamma_tilde)
            worst["sigma"] = max(worst["sigma"], r.sigma_ratio)
            worst["fekete"] = max(worst["fekete"], r.fekete)
        if n >= 2:
            pt = st(n)[0]
            with mp.workprec(wq.precision_bits + 32):
                lam = _simple_eigenvalue(n, pt.t)
                q, _ = eigenpolynomial(n, mpmath.mpc(pt.t), lam)
                tp = mpmath.mpc(pt.t) + mpmath.mpf("0.01")
            ctrl_simple = min(ctrl_simple, *(relative_vanishing(q, pt.t, c, wq) for c in (GAMMA, GAMMA_TILDE)))
            ctrl_pert = min(ctrl_pert, degeneracy_rank_check(pt.p_coeffs, tp, wq),
                            *(relative_vanishing(pt.p_coeffs, tp, c, wq) for c in (GAMMA, GAMMA_TILDE)))
    ok_a = record(8, "relative vanishing of both squared wedge integrals < 1e-8 (n <= 8)",
                  worst["vanish"] < 1e-8, f"max {worst['vanish']:.2e}")
    ok_b = record(8, "moment-matrix sigma_2/sigma_1 < 1e-8", worst["sigma"] < 1e-8, f"max {worst['sigma']:.2e}")
    ok_c = record(8, "negative controls exceed 1e-3", min(ctrl_simple, ctrl_pert) > 1e-3,
                  f"simple eigenvalue min {float(ctrl_simple):.3e}, perturbed t min {float(ctrl_pert):.3e}")
    ok_d = record(8, "Fekete residuals < 1e-25", worst["fekete"] < 1e-25, f"max {worst['fekete']:.2e}")
    assert ok_a and ok_b and ok_c and ok_d


# ---------------------------------------------------------------------------
# 9. lattice scaling laws
# ---------------------------------------------------------------------------

def test_c9_scaling_laws():
    L = lattices(5, 20)
    ns = range(5, 21)
    ok = True
    for s0, want in ((0, -2.0), (1 + 1j, -1.0)):
        reps = {v: local_discrepancy(s0, ns, v, lattices=L) for v in (NATURAL, CONJECTURE)}
        for v, rep in reps.items():
            good = abs(rep.slope - want) <= 0.3
            ok &= record(9, f"slope at s0={s0} ({v}) = {want:g} +- 0.3", good,
                         f"slope {rep.slope:.3f}, R^2 {rep.r_squared:.3f}")
        a, b = reps[NATURAL], reps[CONJECTURE]
        smaller = a.n_values == b.n_values and all(y < x for x, y in zip(a.deltas, b.deltas))
        ok &= record(9, f"CONJECTURE gives smaller Delta_n at every n (s0={s0})", smaller)
    assert ok


# ---------------------------------------------------------------------------
# 10. hexagonal neighbour prediction
# ---------------------------------------------------------------------------

def test_c10_hexagonal():
    L = lattices(5, 20)
    within = tested = 0
    for lat in L[(20, NATURAL)]:
        for i in interior_indices(lat):
            pt = lat.source[i]
            ed = elliptic_for_point(complex(pt.s), complex(pt.E))
            rep = neighbor_prediction(i, lat, ed)
            tested += 1
            within += rep.max_rel_error < 0.1
    frac = within / tested
    ok = record(10, "six-neighbour offsets within 10% for >= 80% of interior points at n=20", frac >= 0.8,
                f"{within} of {tested}")
    assert ok


# ---------------------------------------------------------------------------
# 11. region boundary
# ---------------------------------------------------------------------------

def test_c11_region():
    corner = boundary_corner_refined()
    ok_a = record(11, "corner s0 = -2.381101 to 5 decimals", round(corner, 5) == round(-2.381101, 5)
                  and abs(corner - S0) < 1e-5, f"{corner:.9f}")
    L = lattices(5, 20)
    cls20 = [classify_s(z) for lat in L[(20, NATURAL)] for z in lat.points]
    ok_b = record(11, "all scaled lattice points at n=20 classify inside or near-boundary",
                  all(c in (INSIDE, NEAR_BOUNDARY) for c in cls20),
                  f"{cls20.count(INSIDE)} inside, {cls20.count(NEAR_BOUNDARY)} near")
    outside = sum(classify_s(z, 0.0) == OUTSIDE for (n, v), pair in L.items() for lat in pair for z in lat.points)
    ok_c = record(11, "no lattice point (n=5..20, both scalings) lies in the complement", outside == 0,
                  f"{outside} outside")
    assert ok_a and ok_b and ok_c
