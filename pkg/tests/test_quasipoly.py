import mpmath
import pytest
from mpmath import mp

from painlattice.quasipoly import (
    GAMMA,
    GAMMA_TILDE,
    SQUARED,
    WedgeQuadrature,
    degeneracy_rank_check,
    fekete_check,
    relative_vanishing,
    verify_point,
    wedge_integral,
    write_verification,
)
from painlattice.spectra import eigenpolynomial
from shared import st

WQ = WedgeQuadrature(precision_bits=200)
# n = 2, t = -3/2: p = x^2 + x - 1/4 (double eigenvalue -2)
P2 = [mpmath.mpf(-1) / 4, 1, 1]
T2 = mpmath.mpf(-3) / 2


def test_airy_square_integral():
    # p = 1, t = 0: the integral of e^{2x^3/3} over gamma is a closed form in Gamma(1/3)
    v, _ = wedge_integral([1], 0, 0, GAMMA, WQ)
    with mp.workprec(232):
        # each ray gives e^{i theta} (3/2)^{1/3} Gamma(1/3) / 3 with e^{2 x^3/3} = e^{-2 rho^3/3}
        r = mpmath.cbrt(mpmath.mpf(3) / 2) * mpmath.gamma(mpmath.mpf(1) / 3) / 3
        expected = r * (mpmath.expj(mpmath.pi) - mpmath.expj(mpmath.pi / 3))
        assert abs(v - expected) < mpmath.mpf(2) ** -190


def test_x_moment_vanishes_for_n1():
    # p = x at t = 0: x^2 e^{2x^3/3} integrates to zero over any wedge contour
    for c in (GAMMA, GAMMA_TILDE):
        assert relative_vanishing([0, 1], 0, c, WQ) < 1e-50


def test_n2_squared_vanishes_and_controls():
    for c in (GAMMA, GAMMA_TILDE):
        assert relative_vanishing(P2, T2, c, WQ) < 1e-50
    with mp.workprec(232):
        q, _ = eigenpolynomial(2, mpmath.mpc(T2), mpmath.mpf(4))
    assert relative_vanishing(q, T2, GAMMA, WQ) > 1e-3


def test_rank_and_controls():
    assert degeneracy_rank_check(P2, T2, WQ) < 1e-20
    assert degeneracy_rank_check(P2, T2 + mpmath.mpf("0.01"), WQ) > 1e-3
    assert degeneracy_rank_check([mpmath.mpf("0.3"), mpmath.mpf("-0.7"), 1], T2, WQ) > 1e-3


def test_fekete():
    assert fekete_check(P2, T2, 128) < 1e-30
    assert fekete_check([0, 2, 0, 0, 1], 0, 128) < 1e-30
    assert fekete_check([0, 1], 0) == 0
    assert fekete_check([1, 2, 1, 1], 0.5, 128) > 1e-3


def test_bad_arguments():
    with pytest.raises(ValueError):
        wedge_integral([1], 0, -1, GAMMA, WQ)
    with pytest.raises(ValueError):
        wedge_integral([1], 0, 0, "delta", WQ)


def test_verify_n3_points(tmp_path):
    rows = [verify_point(i, p) for i, p in enumerate(st(3))]
    for r in rows:
        assert r.rel_gamma < 1e-8 and r.rel_gamma_tilde < 1e-8
        assert r.sigma_ratio < 1e-8
        assert r.fekete < 1e-25
    path = tmp_path / "v.csv"
    write_verification(rows, path)
    assert path.read_text().splitlines()[0].startswith("point_id,n,re_t,im_t,rel_vanish_gamma")


def test_squared_mode_constant():
    assert SQUARED == "squared"
