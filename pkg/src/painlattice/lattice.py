"""Scaled JM and ST point clouds: matching, local discrepancy scaling and the hexagonal neighbour law."""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .elliptic import EllipticData, INSIDE, OUTSIDE, classify_s, default_boundary
from .spectra import CONJECTURE, NATURAL, jm_points, rescale_st, st_points

# (dm1, dm2) with dm_j in {-1,0,1}, |dm1 + dm2| <= 1, not both zero
NEIGHBOR_PATTERNS = ((1, 0), (0, 1), (1, -1), (-1, 0), (0, -1), (-1, 1))
TIE_TOL = 1e-9


class ProbeOutsideRegion(ValueError):
    """The probe lies outside the elliptic region, where there are no lattice points."""


class BoundaryPoint(ValueError):
    """Fewer than six neighbours within three median spacings."""


@dataclass
class ScaledLattice:
    kind: str
    n: int
    points: list
    scaling_variant: str = NATURAL
    source: list = field(default_factory=list, repr=False)

    def array(self) -> np.ndarray:
        return np.array([complex(p) for p in self.points])

    def nearest(self, s0: complex) -> tuple[int, float, bool]:
        """(index, distance, tie) of the point nearest s0; ties go to the smallest (Re, Im)."""
        arr = self.array()
        d = np.abs(arr - s0)
        dmin = d.min()
        close = [i for i in range(len(arr)) if d[i] - dmin <= TIE_TOL]
        close.sort(key=lambda i: (arr[i].real, arr[i].imag))
        return close[0], float(d[close[0]]), len(close) > 1

    def symmetry_defect(self) -> float:
        """Largest distance from a rotated point (by e^{2 pi i/3}) to the cloud."""
        arr = self.array()
        rot = arr * cmath.exp(2j * math.pi / 3)
        return float(max(np.abs(arr - r).min() for r in rot))

    def median_spacing(self) -> float:
        arr = self.array()
        d = np.abs(arr[:, None] - arr[None, :])
        np.fill_diagonal(d, np.inf)
        return float(np.median(d.min(axis=1)))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["kind", "n", "scaling", "re_s", "im_s"])
            for p in self.points:
                p = complex(p)
                wr.writerow([self.kind, self.n, self.scaling_variant, f"{p.real:.17g}", f"{p.imag:.17g}"])


@dataclass
class DiscrepancyReport:
    s0: complex
    scaling_variant: str
    n_values: list
    deltas: list
    pairs: list
    slope: float
    intercept: float
    r_squared: float
    excluded: list = field(default_factory=list)
    ties: list = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["n", "log_n", "delta", "log_delta", "re_jm", "im_jm", "re_st", "im_st"])
            for n, d, (a, b) in zip(self.n_values, self.deltas, self.pairs):
                wr.writerow([n, f"{math.log(n):.15g}", f"{d:.15e}", f"{math.log(d):.15g}",
                             f"{a.real:.17g}", f"{a.imag:.17g}", f"{b.real:.17g}", f"{b.imag:.17g}"])


def build_lattices(n: int, scaling_variant: str = NATURAL, precision_bits: int = 256,
                   cache_dir=None, points: tuple | None = None) -> tuple[ScaledLattice, ScaledLattice]:
    """JM lattice (always hbar = 1/(n+1/2)) and ST lattice in the requested scaling.

    points may carry precomputed (JM points, NATURAL ST points) for this n.
    """
    if points is not None:
        jp, sp = points
    else:
        jp = jm_points(n, precision_bits, cache_dir)
        sp = st_points(n, precision_bits, NATURAL, cache_dir)
    if scaling_variant != NATURAL:
        sp = [rescale_st(p, scaling_variant) for p in sp]
    jl = ScaledLattice("JM", n, [complex(p.s) for p in jp], NATURAL, jp)
    sl = ScaledLattice("ST", n, [complex(p.s) for p in sp], scaling_variant, sp)
    return jl, sl


def lattice_family(n_list, variants=(NATURAL, CONJECTURE), precision_bits: int = 256, cache_dir=None) -> dict:
    """{(n, variant): (JM lattice, ST lattice)} computing each spectrum once."""
    out = {}
    for n in n_list:
        pts = (jm_points(n, precision_bits, cache_dir), st_points(n, precision_bits, NATURAL, cache_dir))
        for v in variants:
            out[(n, v)] = build_lattices(n, v, points=pts)
    return out


def fit_loglog(ns, deltas) -> tuple[float, float, float]:
    """Least-squares slope, intercept and R^2 of log delta against log n."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(deltas, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    yhat = slope * x + intercept
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


PAIR = "pair"
INDEPENDENT = "independent"


def mutual_pairs(jl: ScaledLattice, sl: ScaledLattice) -> list[tuple[int, int]]:
    """(JM index, ST index) pairs that are each other's nearest neighbour."""
    a, b = jl.array(), sl.array()
    d = np.abs(b[:, None] - a[None, :])
    st_to_jm = d.argmin(axis=1)
    jm_to_st = d.argmin(axis=0)
    return [(int(st_to_jm[i]), i) for i in range(len(b)) if jm_to_st[st_to_jm[i]] == i]


def nearest_pair(jl: ScaledLattice, sl: ScaledLattice, s0: complex, mode: str = PAIR):
    """(JM point, ST point, tie) nearest the probe.

    PAIR snaps s0 to the mutual-nearest JM/ST pair whose midpoint is closest;
    INDEPENDENT takes each lattice's own nearest point.  Ties within
    TIE_TOL go to the smallest (Re, Im) and are reported.
    """
    if mode == INDEPENDENT:
        ij, _, tj = jl.nearest(s0)
        is_, _, ts = sl.nearest(s0)
        return jl.points[ij], sl.points[is_], tj or ts
    if mode != PAIR:
        raise ValueError(f"unknown matching mode {mode!r}")
    pairs = mutual_pairs(jl, sl)
    if not pairs:
        raise ValueError("the lattices have no mutual-nearest pairs")
    mids = [((jl.points[j] + sl.points[i]) / 2, j, i) for j, i in pairs]
    dist = [abs(m - s0) for m, _, _ in mids]
    dmin = min(dist)
    close = [mids[k] for k in range(len(mids)) if dist[k] - dmin <= TIE_TOL]
    close.sort(key=lambda c: (c[0].real, c[0].imag))
    _, j, i = close[0]
    return jl.points[j], sl.points[i], len(close) > 1


def local_discrepancy(s0: complex, n_list, scaling_variant: str = NATURAL, precision_bits: int = 256,
                      cache_dir=None, lattices: dict | None = None, zero_tol: float = 1e-20,
                      mode: str = PAIR) -> DiscrepancyReport:
    """Distances between the JM and ST points nearest s0, and their log-log slope in n.

    Values of n where both lattices contain s0 itself (distance below
    zero_tol) carry no scaling information and are excluded from the fit.
    """
    s0 = complex(s0)
    n_list = list(n_list)
    if len(n_list) < 5:
        raise ValueError("need at least five values of n")
    if classify_s(s0, margin=0.0) == OUTSIDE:
        raise ProbeOutsideRegion(f"probe {s0} lies outside the elliptic region")
    ns, ds, pairs, excluded, ties = [], [], [], [], []
    for n in n_list:
        if lattices is not None and (n, scaling_variant) in lattices:
            jl, sl = lattices[(n, scaling_variant)]
        else:
            jl, sl = build_lattices(n, scaling_variant, precision_bits, cache_dir)
        a, b, tie = nearest_pair(jl, sl, s0, mode)
        if tie:
            ties.append(n)
        d = abs(a - b)
        if d < zero_tol:
            excluded.append(n)
            continue
        ns.append(n)
        ds.append(d)
        pairs.append((a, b))
    if len(ns) < 2:
        raise ValueError("too few usable values of n for a slope fit")
    slope, intercept, r2 = fit_loglog(ns, ds)
    return DiscrepancyReport(s0, scaling_variant, ns, ds, pairs, slope, intercept, r2, excluded, ties)


def predicted_offsets(ed: EllipticData, hbar) -> list:
    """2 hbar (omega dm1 - omega' dm2) over the six neighbour patterns."""
    w, wp = complex(ed.omega), complex(ed.omega_prime)
    h = float(hbar)
    return [2 * h * (w * a - wp * b) for a, b in NEIGHBOR_PATTERNS]


@dataclass
class NeighborReport:
    index: int
    s0: complex
    offsets: list
    patterns: list
    rel_errors: list
    max_rel_error: float
    distinct_patterns: bool


def neighbor_prediction(index: int, lattice: ScaledLattice, ed: EllipticData, hbar=None,
                        boundary_spacings: float = 3.0) -> NeighborReport:
    """Compare the six nearest neighbours of lattice point index with the hexagonal prediction."""
    arr = lattice.array()
    s0 = arr[index]
    spacing = lattice.median_spacing()
    bd = default_boundary().distance(s0)
    if bd < boundary_spacings * spacing:
        raise BoundaryPoint(f"point {s0} lies within {boundary_spacings} spacings of the boundary")
    d = np.abs(arr - s0)
    d[index] = np.inf
    order = np.argsort(d, kind="stable")[:6]
    if len(order) < 6 or d[order[-1]] > 3 * spacing:
        raise BoundaryPoint(f"fewer than six neighbours of {s0} within three spacings")
    if hbar is None:
        hbar = lattice.source[index].hbar
    pred = predicted_offsets(ed, hbar)
    offsets, pats, errs = [], [], []
    for k in order:
        off = arr[k] - s0
        j = int(np.argmin([abs(off - p) for p in pred]))
        offsets.append(complex(off))
        pats.append(NEIGHBOR_PATTERNS[j])
        errs.append(float(abs(off - pred[j]) / abs(pred[j])))
    return NeighborReport(index, complex(s0), offsets, pats, errs, max(errs), len(set(pats)) == 6)


def interior_indices(lattice: ScaledLattice, boundary_spacings: float = 3.0) -> list:
    """Indices of points at least boundary_spacings median spacings inside the region boundary."""
    spacing = lattice.median_spacing()
    bd = default_boundary()
    out = []
    for i, p in enumerate(lattice.points):
        if classify_s(p, 0.0, bd) == INSIDE and bd.distance(p) >= boundary_spacings * spacing:
            out.append(i)
    return out


def mutual_nearest_fraction(jl: ScaledLattice, sl: ScaledLattice, indices=None) -> float:
    """Fraction of ST points (optionally a subset) whose nearest JM point has them as nearest ST point."""
    mutual = {i for _, i in mutual_pairs(jl, sl)}
    idx = list(range(len(sl.points)) if indices is None else indices)
    return sum(1 for i in idx if i in mutual) / len(idx) if idx else 1.0


def write_neighbor_reports(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["index", "re_s0", "im_s0", "max_rel_error", "distinct_patterns"])
        for r in reports:
            wr.writerow([r.index, f"{r.s0.real:.17g}", f"{r.s0.imag:.17g}", f"{r.max_rel_error:.6e}",
                         int(r.distinct_patterns)])
