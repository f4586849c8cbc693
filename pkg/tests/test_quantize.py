import cmath
import math
import statistics

import pytest

from painlattice.elliptic import INSIDE, elliptic_data
from painlattice.quantize import (
    CAPTURE,
    HALF_HBAR,
    TWO_HBAR,
    check_2eigs,
    quantize_jm,
    quantize_points,
    quantize_st,
    s1_weight_value,
    st_log_targets,
    write_report,
)
from shared import jm, st


def test_log_targets_sum():
    for tau in (cmath.exp(2j * math.pi / 3), -0.4 + 0.9j, 0.3 + 1.7j):
        assert abs(sum(st_log_targets(tau)) - 2j * math.pi) < 1e-14


def test_weights():
    assert s1_weight_value("JM", 3) == pytest.approx(2 / 3.5)
    assert s1_weight_value("ST", 3, HALF_HBAR) == pytest.approx(1 / 8)
    with pytest.raises(ValueError):
        s1_weight_value("JM", 3, "bogus")


def test_jm_n1_integers():
    (pt,) = jm(1)
    ed = elliptic_data(complex(pt.s), complex(pt.E))
    rec = quantize_jm(pt, ed)
    assert rec.integers == (0, 0, 0)
    assert rec.sum_rule_ok and rec.quantized


def test_st_n4_t0_integers():
    pt = next(p for p in st(4) if abs(complex(p.t)) < 1e-20)
    ed = elliptic_data(complex(pt.s), complex(pt.E))
    rec = quantize_st(pt, ed)
    assert rec.integers == (1, 1, 1)
    assert rec.max_residual < 0.05 * math.pi


@pytest.mark.parametrize("n", [2, 3, 5])
def test_sum_rules(n):
    for rec in quantize_points(list(jm(n)) + list(st(n))):
        assert rec.region == INSIDE
        assert rec.sum_rule_ok, rec
        assert rec.quantized
        assert all(k >= 0 for k in rec.integers)


def test_s1_weight_choice_matters():
    pts = list(jm(6))
    two = quantize_points(pts, s1_weight=TWO_HBAR)
    half = quantize_points(pts, s1_weight=HALF_HBAR)
    lead = quantize_points(pts, include_s1=False)
    m2 = statistics.median(r.max_residual for r in two)
    mh = statistics.median(r.max_residual for r in half)
    ml = statistics.median(r.max_residual for r in lead)
    assert m2 < mh < ml
    for a, b in zip(two, lead):
        assert a.integers == b.integers


def test_2eigs_forms():
    recs = quantize_points(list(st(6)))
    sheet = statistics.median(r.twoeigs_error for r in recs)
    other = statistics.median(r.twoeigs_error_i1_minus_i2 for r in recs)
    assert sheet < 0.05
    assert other > 1.0
    pt = st(6)[0]
    ed = elliptic_data(complex(pt.s), complex(pt.E))
    with pytest.raises(ValueError):
        check_2eigs(pt, ed, form="bogus")


def test_capture_threshold():
    assert CAPTURE == pytest.approx(math.pi / 2)


def test_report_columns(tmp_path):
    recs = quantize_points(list(jm(2)) + list(st(2)))
    path = tmp_path / "q.csv"
    write_report(recs, path)
    head, *rows = path.read_text().splitlines()
    assert head.split(",") == ["kind", "n", "re_location", "im_location", "i1", "i2", "i3",
                               "abs_r1", "abs_r2", "abs_r3", "sum_rule_ok", "twoeigs_error", "region"]
    assert len(rows) == 6
