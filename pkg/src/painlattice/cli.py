"""Command-line pipeline: polynomials, lattice points, quantization, orthogonality and lattice comparison.

Exit status 0 when every enabled check passes, 1 when a check fails (the
failure list is written to ``failures.json`` in the output directory and
echoed to stderr), 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__

log = logging.getLogger("painlattice")

SUBCOMMANDS = ("vy-gen", "st-disc", "jm-points", "st-points", "wkb-quantize", "verify-orthogonality",
               "region-boundary", "lattice-compare", "all")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int | None = None
    n_range: tuple[int, int] | None = None
    precision_bits: int = 256
    nodes: int = 512
    ray_nodes: int = 400
    fd_step: float = 1e-4
    capture: float = math.pi / 2
    vanishing_tol: float = 1e-8
    fekete_tol: float = 1e-25
    slope_tol: float = 0.3
    scaling: str = "natural"
    probe: complex | None = None
    out: str = "painlattice-out"
    cache: str | None = None
    include_s1: bool = True
    margin: float = 0.05

    def validate(self) -> None:
        if self.precision_bits < 64:
            raise ConfigError("precision_bits must be >= 64")
        for name in ("nodes", "ray_nodes", "fd_step", "capture", "vanishing_tol", "fekete_tol", "slope_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.margin < 0:
            raise ConfigError("margin must be >= 0")
        if self.scaling not in ("natural", "conjecture"):
            raise ConfigError(f"unknown scaling {self.scaling!r}")
        if self.n is not None and self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.n_range is not None:
            a, b = self.n_range
            if a < 1 or b < a:
                raise ConfigError(f"bad n range {a}:{b}")

    def n_values(self) -> list[int]:
        if self.n_range is not None:
            return list(range(self.n_range[0], self.n_range[1] + 1))
        if self.n is not None:
            return [self.n]
        raise ConfigError("one of --n or --n-range is required")


def parse_n_range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError as exc:
        raise ConfigError(f"--n-range expects A:B, got {text!r}") from exc


def parse_probe(text) -> complex:
    if isinstance(text, (list, tuple)):
        return complex(float(text[0]), float(text[1]))
    try:
        re_, im_ = str(text).split(",")
        return complex(float(re_), float(im_))
    except ValueError as exc:
        raise ConfigError(f"--probe expects RE,IM, got {text!r}") from exc


def load_toml(path) -> dict:
    try:
        import tomllib  # type: ignore[import-not-found]
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


_FLAG_KEYS = {
    "n": "n", "n_range": "n_range", "precision_bits": "precision_bits", "nodes": "nodes",
    "fd_step": "fd_step", "scaling": "scaling", "probe": "probe", "out": "out", "cache": "cache",
}


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the TOML file (if any), then explicit flags."""
    import os

    values: dict = {}
    if args.config:
        doc = load_toml(args.config)
        known = {f for f in RunConfig.__dataclass_fields__}
        for k, v in doc.items():
            key = k.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key {k!r}")
            values[key] = v
    for flag, key in _FLAG_KEYS.items():
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    if args.no_s1:
        values["include_s1"] = False
    if isinstance(values.get("n_range"), str):
        values["n_range"] = parse_n_range(values["n_range"])
    elif isinstance(values.get("n_range"), list):
        values["n_range"] = tuple(int(x) for x in values["n_range"])
    if values.get("probe") is not None:
        values["probe"] = parse_probe(values["probe"])
    if values.get("cache") is None and os.environ.get("PAINLATTICE_CACHE"):
        values["cache"] = os.environ["PAINLATTICE_CACHE"]
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


@dataclass
class Outcome:
    summary: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def check(self, ok: bool, stage: str, what: str, **detail) -> None:
        if not ok:
            self.failures.append({"stage": stage, "check": what, **detail})


def _fmt(x, digits: int = 17) -> list:
    z = complex(x)
    return [f"{z.real:.{digits}g}", f"{z.imag:.{digits}g}"]


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

def stage_vy_gen(cfg: RunConfig, out: Outcome) -> None:
    from .exactpoly import load_poly, save_poly, verify_cached_poly, vy_polynomials

    N = max(cfg.n_values())
    cache = Path(cfg.cache) if cfg.cache else Path(cfg.out) / "cache"
    ys = vy_polynomials(N)
    rows = []
    for k, y in enumerate(ys):
        hit = load_poly(cache, "VY", k)
        if hit is not None:
            out.check(hit == y and verify_cached_poly("VY", k, hit), "vy-gen", "cache_mismatch", n=k)
        else:
            save_poly(cache, "VY", k, y)
        out.check(y.degree == k * (k + 1) // 2, "vy-gen", "degree", n=k, degree=y.degree)
        rows.append({"n": k, "degree": y.degree, "integral": y.is_integral()})
    out.summary["vy-gen"] = {"cache": str(cache), "polynomials": rows}


def stage_st_disc(cfg: RunConfig, out: Outcome) -> None:
    from .exactpoly import discriminant_poly, load_poly, save_poly, verify_cached_poly

    cache = Path(cfg.cache) if cfg.cache else Path(cfg.out) / "cache"
    rows = []
    for n in cfg.n_values():
        hit = load_poly(cache, "DISC", n)
        if hit is not None:
            d = hit
            out.check(verify_cached_poly("DISC", n, d), "st-disc", "cache_mismatch", n=n)
        else:
            d = discriminant_poly(n)
            save_poly(cache, "DISC", n, d)
        out.check(d.degree == n * (n + 1) // 2, "st-disc", "degree", n=n, degree=d.degree)
        rows.append({"n": n, "degree": d.degree, "exponent_residues": sorted(d.exponent_residues())})
    out.summary["st-disc"] = {"cache": str(cache), "polynomials": rows}


def _points(cfg: RunConfig, kind: str, n: int, memo: dict):
    from .spectra import CONJECTURE, NATURAL, jm_points, rescale_st, st_points

    key = (kind, n)
    if key not in memo:
        cache = cfg.cache or str(Path(cfg.out) / "cache")
        if kind == "JM":
            memo[key] = jm_points(n, cfg.precision_bits, cache)
        else:
            pts = st_points(n, cfg.precision_bits, NATURAL, cache)
            memo[key] = pts if cfg.scaling == "natural" else [rescale_st(p, CONJECTURE) for p in pts]
    return memo[key]


def stage_points(cfg: RunConfig, out: Outcome, kind: str, memo: dict) -> None:
    from .spectra import dump_points

    stage = "jm-points" if kind == "JM" else "st-points"
    rows = []
    for n in cfg.n_values():
        pts = _points(cfg, kind, n, memo)
        path = Path(cfg.out) / f"{kind.lower()}_points_n{n:03d}.jsonl"
        dump_points(pts, path)
        out.check(len(pts) == n * (n + 1) // 2, stage, "count", n=n, count=len(pts))
        rows.append({"n": n, "count": len(pts), "file": path.name})
    out.summary[stage] = {"precision_bits": cfg.precision_bits, "files": rows}


def stage_quantize(cfg: RunConfig, out: Outcome, memo: dict) -> None:
    from .elliptic import INSIDE
    from .quantize import quantize_points, write_report

    rows = []
    for n in cfg.n_values():
        recs = []
        for kind in ("JM", "ST"):
            pts = _points(cfg, kind, n, memo)
            if kind == "ST" and cfg.scaling != "natural":
                from .spectra import NATURAL, rescale_st
                pts = [rescale_st(p, NATURAL) for p in pts]
            recs += quantize_points(pts, cfg.include_s1, margin=cfg.margin, nodes=cfg.nodes)
        path = Path(cfg.out) / f"quantization_n{n:03d}.csv"
        write_report(recs, path)
        for r in recs:
            if r.region != INSIDE:
                continue
            out.check(r.sum_rule_ok, "wkb-quantize", "sum_rule", n=n, kind=r.kind, location=_fmt(r.location),
                      integers=list(r.integers))
            out.check(all(abs(x) < cfg.capture for x in r.residuals), "wkb-quantize", "capture", n=n,
                      kind=r.kind, location=_fmt(r.location))
        rows.append({"n": n, "records": len(recs), "interior": sum(r.region == INSIDE for r in recs),
                     "file": path.name})
    out.summary["wkb-quantize"] = {"include_s1": cfg.include_s1, "reports": rows}


def stage_orthogonality(cfg: RunConfig, out: Outcome, memo: dict) -> None:
    from .quasipoly import WedgeQuadrature, verify_point, write_verification
    from .spectra import NATURAL, rescale_st

    rows = []
    for n in cfg.n_values():
        pts = _points(cfg, "ST", n, memo)
        if cfg.scaling != "natural":
            pts = [rescale_st(p, NATURAL) for p in pts]
        wq = WedgeQuadrature(precision_bits=max(200, 20 * n))
        recs = [verify_point(i, p, wq, cfg.precision_bits) for i, p in enumerate(pts)]
        path = Path(cfg.out) / f"orthogonality_n{n:03d}.csv"
        write_verification(recs, path)
        for r in recs:
            for name, v, tol in (("rel_vanish_gamma", r.rel_gamma, cfg.vanishing_tol),
                                 ("rel_vanish_gamma_tilde", r.rel_gamma_tilde, cfg.vanishing_tol),
                                 ("sigma_ratio", r.sigma_ratio, cfg.vanishing_tol),
                                 ("fekete_residual", r.fekete, cfg.fekete_tol)):
                out.check(v < tol, "verify-orthogonality", name, n=n, point_id=r.point_id, value=f"{v:.6e}")
        rows.append({"n": n, "points": len(recs), "file": path.name})
    out.summary["verify-orthogonality"] = {"reports": rows}


def stage_region(cfg: RunConfig, out: Outcome) -> None:
    from .elliptic import S0, boundary_corner_refined, default_boundary

    bd = default_boundary()
    path = Path(cfg.out) / "region_boundary.csv"
    bd.to_csv(path)
    corner = boundary_corner_refined()
    out.check(abs(corner - float(S0)) < 1e-5, "region-boundary", "corner", value=f"{corner:.12f}")
    out.summary["region-boundary"] = {"file": path.name, "corner": f"{corner:.12f}",
                                      "vertices": len(bd.polyline)}


def stage_lattice(cfg: RunConfig, out: Outcome) -> None:
    from .lattice import build_lattices, local_discrepancy

    ns = cfg.n_values()
    lattices = {}
    for n in ns:
        jl, sl = build_lattices(n, cfg.scaling, cfg.precision_bits, cfg.cache or str(Path(cfg.out) / "cache"))
        lattices[(n, cfg.scaling)] = (jl, sl)
        jl.to_csv(Path(cfg.out) / f"lattice_jm_n{n:03d}.csv")
        sl.to_csv(Path(cfg.out) / f"lattice_st_{cfg.scaling}_n{n:03d}.csv")
    summary = {"scaling": cfg.scaling, "n_values": ns}
    if cfg.probe is not None:
        if len(ns) < 5:
            raise ConfigError("lattice-compare with --probe needs an --n-range of at least five values")
        rep = local_discrepancy(cfg.probe, ns, cfg.scaling, lattices=lattices)
        path = Path(cfg.out) / "discrepancy.csv"
        rep.to_csv(path)
        expected = -2.0 if abs(cfg.probe) < 1e-12 else -1.0
        out.check(abs(rep.slope - expected) <= cfg.slope_tol, "lattice-compare", "slope",
                  slope=f"{rep.slope:.6f}", expected=expected)
        out.check(rep.r_squared > 0.9, "lattice-compare", "r_squared", value=f"{rep.r_squared:.6f}")
        summary.update({"probe": _fmt(cfg.probe), "slope": f"{rep.slope:.6f}", "r_squared": f"{rep.r_squared:.6f}",
                        "expected_slope": expected, "excluded_n": rep.excluded, "tie_n": rep.ties,
                        "file": path.name})
    out.summary["lattice-compare"] = summary


def run(cmd: str, cfg: RunConfig) -> Outcome:
    Path(cfg.out).mkdir(parents=True, exist_ok=True)
    out = Outcome()
    memo: dict = {}
    stages = {
        "vy-gen": lambda: stage_vy_gen(cfg, out),
        "st-disc": lambda: stage_st_disc(cfg, out),
        "jm-points": lambda: stage_points(cfg, out, "JM", memo),
        "st-points": lambda: stage_points(cfg, out, "ST", memo),
        "wkb-quantize": lambda: stage_quantize(cfg, out, memo),
        "verify-orthogonality": lambda: stage_orthogonality(cfg, out, memo),
        "region-boundary": lambda: stage_region(cfg, out),
        "lattice-compare": lambda: stage_lattice(cfg, out),
    }
    if cmd == "all":
        order = list(stages)
        if cfg.probe is None or len(cfg.n_values()) < 5:
            order.remove("lattice-compare")
    else:
        order = [cmd]
    for name in order:
        log.info("stage %s", name)
        stages[name]()
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--n-range", dest="n_range", metavar="A:B")
    common.add_argument("--precision-bits", dest="precision_bits", type=int)
    common.add_argument("--nodes", type=int, help="quadrature nodes per loop")
    common.add_argument("--fd-step", dest="fd_step", type=float)
    common.add_argument("--scaling", choices=("natural", "conjecture"))
    common.add_argument("--probe", metavar="RE,IM")
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--cache", metavar="DIR")
    common.add_argument("--no-s1", dest="no_s1", action="store_true")
    common.add_argument("--config", metavar="TOML")
    common.add_argument("-v", "--verbose", action="store_true")
    p = argparse.ArgumentParser(prog="painlattice", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        cfg.n_values() if args.cmd != "region-boundary" else None
        out = run(args.cmd, cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    cfg_doc = asdict(cfg)
    cfg_doc["probe"] = None if cfg.probe is None else _fmt(cfg.probe)
    summary = {"command": args.cmd, "config": cfg_doc, "stages": out.summary, "failures": out.failures,
               "version": __version__}
    outdir = Path(cfg.out)
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    (outdir / "failures.json").write_text(json.dumps(out.failures, indent=2, sort_keys=True) + "\n")
    if out.failures:
        print(json.dumps({"failures": out.failures}, sort_keys=True), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
