"""Command-line driver.

Exit codes: 0 success, 1 invalid input, 2 a bounded search found nothing,
3 an internal invariant failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, fields

from .catalog import FAMILIES, CatalogSpec, generate
from .core import StructureError, from_json, structure_from_code, to_dict, to_json
from .decomposition import InconsistencyError, components_via_oracle, monomorphic_partition
from .extraction import (
    SearchFailure,
    dichotomy_witness,
    invariant_restriction,
    witnesses_of_both_kinds,
)
from .profile import (
    ProfileSeries,
    age_levels,
    bounds_up_to,
    classify_growth,
    infer_kind,
    profile_series,
)
from .suites import SUITES, run_suite

EXIT_OK, EXIT_INVALID, EXIT_SEARCH, EXIT_DEFECT = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """Everything one command needs; built from flags or from a JSON file."""

    command: str
    action: str | None = None
    inp: str | None = None
    out: str | None = None
    csv: str | None = None
    family: str | None = None
    size: int | None = None
    sizes: str | None = None
    reflexive: bool = False
    base_rule: str | None = None
    layers: str | None = None
    direction: str | None = None
    interleave: str | None = None
    apex: str | None = None
    reverse: bool = False
    parts: int | None = None
    n_max: int | None = None
    k_max: int | None = None
    d_max: int = 3
    p_max: int = 4
    tail_start: int | None = None
    k: int = 1
    target: int = 4
    prefer: str = "single"
    both: bool = False
    oracle: bool = False
    method: str = "auto"
    suite: str = "all"
    samples: int | None = None
    n: int | None = None
    seed: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        if "command" not in d:
            raise ConfigError("config needs a 'command'")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        for name in ("n_max", "d_max", "p_max", "target", "samples", "n", "parts"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigError(f"{name} must be positive, got {v}")
        for name in ("size", "k_max", "k", "tail_start"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"{name} must be >= 0, got {v}")

    def catalog_spec(self, size: int | None = None) -> CatalogSpec:
        if self.family is None:
            raise ConfigError("--family is required")
        size = self.size if size is None else size
        if size is None:
            raise ConfigError("--size is required")
        layers = None
        if self.layers is not None:
            layers = tuple(p.strip() for p in self.layers.split(","))
        return CatalogSpec(
            self.family,
            size,
            reflexive=self.reflexive,
            base_rule=self.base_rule,
            layers=layers,
            direction=self.direction,
            interleave=self.interleave,
            apex=self.apex,
            reverse=self.reverse,
            parts=self.parts,
        )


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, path: str | None, out) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path:
        write_atomic(path, text)
    else:
        out.write(text)


def _read_structure(path: str | None):
    if not path:
        raise ConfigError("--in is required")
    with open(path, encoding="utf-8") as fh:
        return from_json(fh.read())


def _parse_sizes(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(p) for p in text.split(",") if p.strip()]


def _fraction(x):
    return None if x is None else str(x)


def _verdict_obj(v) -> dict:
    obj = {"kind": v.kind, "degree": v.degree, "period": v.period, "ratio": _fraction(v.ratio)}
    if v.ratio is not None:
        obj["ratio_float"] = float(v.ratio)
    obj["fibonacci_dominance"] = v.fibonacci_dominance
    if v.fit is not None:
        obj["tail_start"] = v.fit.tail_start
        obj["coefficients"] = [[str(c) for c in row] for row in v.fit.coefficients]
    obj["notes"] = list(v.notes)
    return obj


def _cmd_catalog(cfg: ExperimentConfig, out) -> int:
    if cfg.action == "list":
        _emit("\n".join(FAMILIES), None, out)
        return EXIT_OK
    R = generate(cfg.catalog_spec())
    _emit(to_json(R), cfg.out, out)
    return EXIT_OK


def _cmd_decompose(cfg: ExperimentConfig, out) -> int:
    R = _read_structure(cfg.inp)
    P = monomorphic_partition(R, k_max=cfg.k_max)
    obj = {"blocks": P.to_json_obj()}
    if cfg.oracle:
        Q = components_via_oracle(R)
        obj["oracle_blocks"] = Q.to_json_obj()
        obj["agrees"] = P == Q
    _emit(json.dumps(obj), cfg.out, out)
    if cfg.oracle and P != Q:
        print("partition disagrees with the block oracle", file=sys.stderr)
        return EXIT_DEFECT
    return EXIT_OK


def _cmd_profile(cfg: ExperimentConfig, out) -> int:
    R = _read_structure(cfg.inp)
    n_max = R.n if cfg.n_max is None else cfg.n_max
    series = profile_series(R, n_max, method=cfg.method)
    _emit(series.to_csv(), cfg.csv or cfg.out, out)
    return EXIT_OK


def _cmd_classify(cfg: ExperimentConfig, out) -> int:
    if not cfg.csv:
        raise ConfigError("--csv is required")
    with open(cfg.csv, encoding="utf-8") as fh:
        series = ProfileSeries.from_csv(fh.read())
    v = classify_growth(series, d_max=cfg.d_max, p_max=cfg.p_max, tail_start=cfg.tail_start)
    _emit(json.dumps(_verdict_obj(v)), cfg.out, out)
    return EXIT_OK


def _cmd_bounds(cfg: ExperimentConfig, out) -> int:
    R = generate(cfg.catalog_spec()) if cfg.inp is None else _read_structure(cfg.inp)
    n_max = cfg.n_max if cfg.n_max is not None else 4
    kind = infer_kind(R)
    levels = age_levels(R, n_max)
    found = sorted(bounds_up_to(levels, kind, n_max), key=lambda c: (len(c), c))
    obj = {
        "kind": kind.name,
        "n_max": n_max,
        "bounds": [{"code": c.hex(), "structure": to_dict(structure_from_code(c))} for c in found],
    }
    _emit(json.dumps(obj), cfg.out, out)
    return EXIT_OK


def _witness_obj(w, G) -> dict:
    obj = {"kind": w.kind}
    if w.kind == "single":
        obj["A"] = list(w.A)
    else:
        obj["A1"], obj["A2"] = list(w.A1), list(w.A2)
    obj["transcript"] = w.validate(G)
    return obj


def _cmd_witness(cfg: ExperimentConfig, out) -> int:
    G = _read_structure(cfg.inp)
    if cfg.both:
        found = witnesses_of_both_kinds(G, cfg.target)
        obj = {k: (None if w is None else _witness_obj(w, G)) for k, w in found.items()}
        _emit(json.dumps(obj), cfg.out, out)
        return EXIT_OK if any(found.values()) else EXIT_SEARCH
    w = dichotomy_witness(G, cfg.target, prefer=cfg.prefer)
    _emit(json.dumps(_witness_obj(w, G)), cfg.out, out)
    return EXIT_OK


def _cmd_extract(cfg: ExperimentConfig, out) -> int:
    R = _read_structure(cfg.inp)
    res = invariant_restriction(R, cfg.k, cfg.target)
    obj = {
        "structure": to_dict(res.structure),
        "vertices": list(res.vertices),
        "rows": [list(r) for r in res.rows],
        "homogeneous": list(res.homogeneous),
        "classes": res.classes,
        "transcript": res.transcript,
    }
    if cfg.n_max:
        ext = res.extend(cfg.n_max)
        series = profile_series(ext, cfg.n_max)
        obj["extension_profile"] = list(series)
        obj["extension_verdict"] = _verdict_obj(classify_growth(series, d_max=cfg.d_max, p_max=cfg.p_max))
    _emit(json.dumps(obj), cfg.out, out)
    return EXIT_OK


def _cmd_sweep(cfg: ExperimentConfig, out) -> int:
    if not cfg.sizes:
        raise ConfigError("--sizes is required")
    n_max = cfg.n_max if cfg.n_max is not None else 8
    lines = ["family,k,n,phi,components"]
    for k in _parse_sizes(cfg.sizes):
        R = generate(cfg.catalog_spec(k))
        comps = len(monomorphic_partition(R))
        for n, phi in enumerate(profile_series(R, min(n_max, R.n))):
            lines.append(f"{cfg.family},{k},{n},{phi},{comps}")
    _emit("\n".join(lines), cfg.csv or cfg.out, out)
    return EXIT_OK


def _cmd_verify(cfg: ExperimentConfig, out) -> int:
    names = list(SUITES) if cfg.suite == "all" else [s.strip() for s in cfg.suite.split(",")]
    for name in names:
        if name not in SUITES:
            raise ConfigError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)} or all")
    ok = True
    lines = []
    for name in names:
        res = run_suite(name, samples=cfg.samples, n=cfg.n, seed=cfg.seed)
        lines.append(res.line())
        lines += [f"    {v}" for v in res.violations[:10]]
        lines += [f"    {r}" for r in res.report]
        ok &= res.passed
    _emit("\n".join(lines), cfg.out, out)
    return EXIT_OK if ok else EXIT_DEFECT


COMMANDS = {
    "catalog": _cmd_catalog,
    "decompose": _cmd_decompose,
    "profile": _cmd_profile,
    "classify": _cmd_classify,
    "bounds": _cmd_bounds,
    "witness": _cmd_witness,
    "extract": _cmd_extract,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
}


def run(cfg: ExperimentConfig, out=None) -> int:
    """Execute one command; exceptions are mapped to exit codes by :func:`main`."""
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    return COMMANDS[cfg.command](cfg, out or sys.stdout)


def _catalog_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--family", required=required, choices=FAMILIES)
    p.add_argument("--size", type=int)
    p.add_argument("--reflexive", action="store_true")
    p.add_argument("--base-rule", choices=("eq", "le", "ne"))
    p.add_argument("--layers", help="two layer rules, e.g. empty,full")
    p.add_argument("--direction", choices=("both", "ab", "ba"))
    p.add_argument("--interleave", choices=("ab", "ba"))
    p.add_argument("--apex", choices=("none", "a", "b", "both"))
    p.add_argument("--reverse", action="store_true", help="reverse the order (omega*)")
    p.add_argument("--parts", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monomorph", description="Monomorphic decompositions and profiles.")
    parser.add_argument("--config", help="JSON file with an ExperimentConfig; replaces the flags")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("catalog", help="list families or emit a prefix")
    csub = p.add_subparsers(dest="action", required=True)
    csub.add_parser("list")
    e = csub.add_parser("emit")
    _catalog_flags(e)
    e.add_argument("--out")

    p = sub.add_parser("decompose", help="monomorphic components as JSON")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--kmax", dest="k_max", type=int)
    p.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    p.add_argument("--out")

    p = sub.add_parser("profile", help="profile series as CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--nmax", dest="n_max", type=int)
    p.add_argument("--method", default="auto", choices=("auto", "ordered", "merged", "generic"))
    p.add_argument("--csv")

    p = sub.add_parser("classify", help="growth verdict of a profile CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--dmax", dest="d_max", type=int, default=3)
    p.add_argument("--pmax", dest="p_max", type=int, default=4)
    p.add_argument("--tail-start", type=int)
    p.add_argument("--out")

    p = sub.add_parser("bounds", help="bounds of the age of a family prefix or a structure")
    _catalog_flags(p, required=False)
    p.add_argument("--in", dest="inp")
    p.add_argument("--nmax", dest="n_max", type=int, default=4)
    p.add_argument("--out")

    p = sub.add_parser("witness", help="dichotomy witness of an ordered digraph")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--target", type=int, default=4)
    p.add_argument("--prefer", default="single", choices=("single", "double"))
    p.add_argument("--both", action="store_true", help="search each kind separately")
    p.add_argument("--out")

    p = sub.add_parser("extract", help="homogeneous restriction with many classes")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--target", type=int, default=4)
    p.add_argument("--nmax", dest="n_max", type=int, help="also profile the relabeled extension up to this size")
    p.add_argument("--dmax", dest="d_max", type=int, default=3)
    p.add_argument("--pmax", dest="p_max", type=int, default=4)
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="components and profiles over a family grid (CSV)")
    _catalog_flags(p)
    p.add_argument("--sizes", required=True, help="lo..hi or a comma list")
    p.add_argument("--nmax", dest="n_max", type=int, default=8)
    p.add_argument("--csv")

    p = sub.add_parser("verify", help="run the seeded property suites")
    p.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)}, a comma list, or all")
    p.add_argument("--samples", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    d = {k: v for k, v in vars(args).items() if k != "config" and v is not None}
    d.pop("command", None)
    cfg = ExperimentConfig(command=args.command, **d)
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                cfg = ExperimentConfig.from_dict(json.load(fh))
        elif args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_INVALID
        else:
            cfg = _config_from_args(args)
        return run(cfg, out)
    except SearchFailure as e:
        print(f"search failed: {e}", file=sys.stderr)
        return EXIT_SEARCH
    except (InconsistencyError, AssertionError) as e:
        print(f"internal invariant violated: {e}", file=sys.stderr)
        return EXIT_DEFECT
    except (ValueError, StructureError, OSError, KeyError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
