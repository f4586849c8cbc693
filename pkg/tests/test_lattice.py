import cmath
import math

import pytest

from painlattice.elliptic import elliptic_data
from painlattice.lattice import (
    INDEPENDENT,
    NEIGHBOR_PATTERNS,
    BoundaryPoint,
    ProbeOutsideRegion,
    ScaledLattice,
    build_lattices,
    fit_loglog,
    interior_indices,
    local_discrepancy,
    mutual_nearest_fraction,
    nearest_pair,
    neighbor_prediction,
    predicted_offsets,
)
from painlattice.spectra import CONJECTURE, NATURAL
from shared import jm, st


def _lat(n, v=NATURAL):
    return build_lattices(n, v, points=(list(jm(n)), list(st(n))))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_counts_and_symmetry(n):
    jl, sl = _lat(n)
    assert len(jl.points) == len(sl.points) == n * (n + 1) // 2
    assert jl.symmetry_defect() < 1e-12
    assert sl.symmetry_defect() < 1e-12


def test_n2_cube_root_triples():
    jl, sl = _lat(2)
    # Y_2 = t^3 + 4, D_2 = t^3 + 27/8, scaled by (5/2)^{-2/3} and 3^{-2/3}
    for lat, r in ((jl, 4 ** (1 / 3) * 2.5 ** (-2 / 3)), (sl, 1.5 * 3 ** (-2 / 3))):
        for z in lat.points:
            assert abs(abs(z) - r) < 1e-12
            assert abs((z / abs(z)) ** 3 + 1) < 1e-12


def test_conjecture_rescaling():
    _, a = _lat(5, NATURAL)
    _, b = _lat(5, CONJECTURE)
    k = (6 / 5) ** (2 / 3)
    for x, y in zip(a.points, b.points):
        assert abs(y - k * x) < 1e-12


def test_nearest_tie_break():
    lat = ScaledLattice("JM", 1, [1j, -1j, 1, -1])
    i, d, tie = lat.nearest(0)
    assert tie and lat.points[i] == -1 and d == 1


def test_fit_loglog_exact():
    ns = [5, 6, 7, 8, 9]
    slope, _, r2 = fit_loglog(ns, [3.0 * n ** -2 for n in ns])
    assert slope == pytest.approx(-2) and r2 == pytest.approx(1)


def test_discrepancy_small_n_and_errors():
    lats = {(n, NATURAL): _lat(n) for n in range(5, 10)}
    rep = local_discrepancy(0, range(5, 10), NATURAL, lattices=lats)
    assert rep.excluded == [7]  # n = 1 mod 3 has a point at the origin in both lattices
    assert all(d > 0 for d in rep.deltas)
    with pytest.raises(ProbeOutsideRegion):
        local_discrepancy(-7.0, range(5, 10), NATURAL, lattices=lats)
    with pytest.raises(ValueError):
        local_discrepancy(0, range(5, 8), NATURAL, lattices=lats)


def test_pair_and_independent_modes_agree_on_partner():
    jl, sl = _lat(9)
    a, b, _ = nearest_pair(jl, sl, 0.3 + 0.1j)
    c, d, _ = nearest_pair(jl, sl, 0.3 + 0.1j, INDEPENDENT)
    assert abs(a - b) < 0.1
    assert abs(c - d) < 0.5


def test_predicted_offsets_sum_to_zero():
    ed = elliptic_data(0.1, 0.05)
    pred = predicted_offsets(ed, 0.1)
    assert abs(sum(pred)) < 1e-14
    assert len(set(NEIGHBOR_PATTERNS)) == 6


def test_predicted_offsets_hexagonal_at_origin():
    ed = elliptic_data(0, 0)
    pred = predicted_offsets(ed, 1.0)
    mags = [abs(p) for p in pred]
    assert max(mags) - min(mags) < 1e-10
    args = sorted(cmath.phase(p) for p in pred)
    gaps = [b - a for a, b in zip(args, args[1:])]
    assert max(abs(g - math.pi / 3) for g in gaps) < 1e-10


def test_neighbor_prediction_interior_n12():
    jl, sl = _lat(12)
    idx = interior_indices(jl)
    assert idx
    for i in idx:
        pt = jl.source[i]
        rep = neighbor_prediction(i, jl, elliptic_data(complex(pt.s), complex(pt.E)))
        assert rep.max_rel_error < 0.1
        assert rep.distinct_patterns


def test_neighbor_prediction_boundary_point():
    jl, _ = _lat(8)
    i = max(range(len(jl.points)), key=lambda k: abs(jl.points[k]))
    pt = jl.source[i]
    with pytest.raises(BoundaryPoint):
        neighbor_prediction(i, jl, elliptic_data(complex(pt.s), complex(pt.E)))


def test_mutual_matching_and_csv(tmp_path):
    jl, sl = _lat(10)
    assert mutual_nearest_fraction(jl, sl) == 1.0
    sl.to_csv(tmp_path / "st.csv")
    rows = (tmp_path / "st.csv").read_text().splitlines()
    assert rows[0] == "kind,n,scaling,re_s,im_s" and len(rows) == 56
