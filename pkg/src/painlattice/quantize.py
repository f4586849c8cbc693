"""Exact-WKB quantization conditions at lattice points.

JM points:  (2n+1) I_j + w S1_j  should equal  -i pi (2 k_j + 1).
ST points:  2(n+1) I_j + w S1_j - log(target_j(tau))  should equal  -2 pi i (m_j + 1),
with targets -1/(1+tau), -1-1/tau, tau (principal logarithms).

The S1 weight w is 2 hbar (4/(2n+1) resp. 2/(n+1)) by default, which is the
coefficient produced by S_odd = sqrt(Q)/hbar + hbar S1 + ... when the cut
period of S_odd is doubled.  The alternative weight hbar/2 (1/(2n+1) resp.
1/(n+1)) is available as ``s1_weight="half-hbar"``.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field

from .elliptic import (
    INSIDE,
    NEAR_BOUNDARY,
    AmbiguousLabeling,
    BranchTrackingError,
    EllipticData,
    LoopGeometry,
    classify_s,
    elliptic_data,
    label_by_continuation,
)
from .roots import DegenerateTurningPoints

TWO_HBAR = "two-hbar"
HALF_HBAR = "half-hbar"
CAPTURE = math.pi / 2


@dataclass
class QuantRecord:
    point_id: int
    kind: str
    n: int
    location: complex
    s: complex
    integers: tuple
    residuals: list
    residuals_leading: list
    sum_rule_ok: bool
    quantized: bool
    region: str
    twoeigs_error: float | None = None
    twoeigs_error_i1_minus_i2: float | None = None
    labeling_suspect: bool = False
    notes: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(abs(r) for r in self.residuals)

    @property
    def max_residual_leading(self) -> float:
        return max(abs(r) for r in self.residuals_leading)


def s1_weight_value(kind: str, n: int, s1_weight: str = TWO_HBAR) -> float:
    hbar = 1 / (n + 0.5) if kind == "JM" else 1 / (n + 1)
    if s1_weight == TWO_HBAR:
        return 2 * hbar
    if s1_weight == HALF_HBAR:
        return hbar / 2
    raise ValueError(f"unknown S1 weight {s1_weight!r}")


def st_log_targets(tau: complex) -> list:
    """Principal logs of -1/(1+tau), -1-1/tau, tau; they sum to 2 pi i when Im tau > 0."""
    tau = complex(tau)
    return [cmath.log(-1 / (1 + tau)), cmath.log(-1 - 1 / tau), cmath.log(tau)]


def _mod_2pi_i(z: complex) -> complex:
    im = (z.imag + math.pi) % (2 * math.pi) - math.pi
    if im == -math.pi:
        im = math.pi
    return complex(z.real, im)


def elliptic_for_point(s, E, **kw) -> EllipticData:
    """Elliptic data with labeling by nearest reference, falling back to continuation from the origin."""
    try:
        return elliptic_data(s, E, **kw)
    except AmbiguousLabeling:
        taus = label_by_continuation(s, E)
        return elliptic_data(s, E, taus=taus, **kw)


def _extract_jm(x: complex) -> tuple[int, complex]:
    # x ~ -i pi (2k+1)  =>  i x / pi ~ 2k + 1
    v = (1j * x / math.pi).real
    k = round((v - 1) / 2)
    return k, x + 1j * math.pi * (2 * k + 1)


def _extract_st(x: complex) -> tuple[int, complex]:
    # x ~ -2 pi i (m+1)  =>  i x / (2 pi) ~ m + 1
    v = (1j * x / (2 * math.pi)).real
    m = round(v - 1)
    return m, x + 2j * math.pi * (m + 1)


def _finish(rec_kind, pt_id, pt, ed, ints, res, res_lead, region, nonneg) -> QuantRecord:
    n = pt.n
    quantized = all(abs(r) < CAPTURE for r in res) and all(k >= 0 for k in ints) if nonneg else \
        all(abs(r) < CAPTURE for r in res)
    small = [abs(r) < 0.25 * CAPTURE for r in res]
    suspect = sum(small) == 2
    return QuantRecord(pt_id, rec_kind, n, complex(pt.location), complex(ed.s), tuple(ints), res, res_lead,
                       sum(ints) == n - 1, quantized, region, labeling_suspect=suspect)


def quantize_jm(pt, ed: EllipticData, point_id: int = 0, include_s1: bool = True,
                s1_weight: str = TWO_HBAR, region: str | None = None) -> QuantRecord:
    """Nearest odd multiples of -i pi for (2n+1) I_j (+ weighted S1_j)."""
    n = pt.n
    N = 2 * n + 1
    w = s1_weight_value("JM", n, s1_weight)
    ints, res, lead = [], [], []
    for j in range(3):
        base = N * complex(ed.I[j])
        x = base + (w * complex(ed.S1[j]) if include_s1 else 0)
        k, r = _extract_jm(x)
        ints.append(k)
        res.append(r)
        lead.append(base + 1j * math.pi * (2 * k + 1))
    region = region or classify_s(complex(ed.s))
    return _finish("JM", point_id, pt, ed, ints, res, lead, region, True)


def quantize_st(pt, ed: EllipticData, point_id: int = 0, include_s1: bool = True,
                s1_weight: str = TWO_HBAR, region: str | None = None) -> QuantRecord:
    """Nearest -2 pi i (m_j+1) for 2(n+1) I_j (+ weighted S1_j) minus the log targets."""
    n = pt.n
    N = 2 * (n + 1)
    w = s1_weight_value("ST", n, s1_weight)
    targets = st_log_targets(ed.tau_mod)
    ints, res, lead = [], [], []
    for j in range(3):
        base = N * complex(ed.I[j]) - targets[j]
        x = base + (w * complex(ed.S1[j]) if include_s1 else 0)
        m, r = _extract_st(x)
        ints.append(m)
        res.append(r)
        lead.append(base + 2j * math.pi * (m + 1))
    region = region or classify_s(complex(ed.s))
    rec = _finish("ST", point_id, pt, ed, ints, res, lead, region, True)
    rec.twoeigs_error = check_2eigs(pt, ed)
    rec.twoeigs_error_i1_minus_i2 = check_2eigs(pt, ed, form="i1-i2")
    return rec


def check_2eigs(pt, ed: EllipticData, form: str = "sheet") -> float:
    """|delta| for the two-eigenvalue relation exp(2(n+1) * integral from tau_1 to tau_2) = tau.

    The integral from tau_1 to tau_2 passing next to tau_0 lands on the other
    sheet after the second cut, so it equals -(I_1 + I_2) = I_3 + i pi; the
    default ``form="sheet"`` uses that value.  ``form="i1-i2"`` evaluates the
    same relation with I_1 - I_2 instead.  delta is reduced mod 2 pi i.
    """
    N = 2 * (pt.n + 1)
    I1, I2 = complex(ed.I[0]), complex(ed.I[1])
    if form == "sheet":
        v = -(I1 + I2)
    elif form == "i1-i2":
        v = I1 - I2
    else:
        raise ValueError(f"unknown form {form!r}")
    delta = _mod_2pi_i(N * v - cmath.log(complex(ed.tau_mod)))
    return abs(delta)


def quantize_points(points, include_s1: bool = True, s1_weight: str = TWO_HBAR, margin: float = 0.05,
                    nodes: int = 512) -> list[QuantRecord]:
    """Quantization records for a list of JM or ST points; geometry failures become notes."""
    out = []
    for idx, pt in enumerate(points):
        s, E = complex(pt.s), complex(pt.E)
        region = classify_s(s, margin)
        try:
            ed = elliptic_for_point(s, E, nodes=nodes)
        except (AmbiguousLabeling, DegenerateTurningPoints, LoopGeometry, BranchTrackingError) as exc:
            rec = QuantRecord(idx, pt.kind, pt.n, complex(pt.location), s, (), [], [], False, False,
                              region if region != INSIDE else NEAR_BOUNDARY, notes=[f"{type(exc).__name__}: {exc}"])
            out.append(rec)
            continue
        fn = quantize_jm if pt.kind == "JM" else quantize_st
        out.append(fn(pt, ed, idx, include_s1, s1_weight, region))
    return out


def write_report(records, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["kind", "n", "re_location", "im_location", "i1", "i2", "i3",
                     "abs_r1", "abs_r2", "abs_r3", "sum_rule_ok", "twoeigs_error", "region"])
        for r in records:
            ints = list(r.integers) + [""] * (3 - len(r.integers))
            res = [f"{abs(x):.6e}" for x in r.residuals] + [""] * (3 - len(r.residuals))
            tw = "" if r.twoeigs_error is None else f"{r.twoeigs_error:.6e}"
            wr.writerow([r.kind, r.n, f"{r.location.real:.15g}", f"{r.location.imag:.15g}", *ints, *res,
                         int(r.sum_rule_ok), tw, r.region])
