"""Command-line front end: ``negadep <subcommand> [flags]``.

Exit codes: 0 success, 1 usage or input error, 2 a certified inequality failed.
Reports are deterministic JSON (sorted keys, no timestamps) with rationals written as
{num, den} strings, or CSV where noted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__, counting, dependence, lemmas
from .boxes import Box, format_box, parse_box, rational_json
from .errors import NegadepError
from .gfnet import PointSet, faure_net, format_net_file, read_net_file, verify_tms_net
from .randomize import ScrambleSeed, digital_shift, owen_scramble

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    subcommand: str
    b: int | None = None
    s: int | None = None
    m: int | None = None
    E: int | None = None
    seed: int = 0
    replicates: int = 0
    boxes: list[str] = field(default_factory=list)
    family: str | None = None
    randomizer: str = "scramble"
    out: str | None = None
    format: str = "json"
    grid: str | None = None
    lemma: str | None = None
    net: str | None = None
    replicate: int = 0
    check: bool = False
    route: str | None = None

    def to_json(self) -> dict:
        cfg = asdict(self)
        cfg.pop("out")  # where the report goes is not part of what it says
        return cfg


def _jsonable(x):
    if isinstance(x, Fraction):
        return rational_json(x)
    if isinstance(x, float):
        return x if math.isfinite(x) else str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return lemmas._jsonable(x)


def _report(cfg: RunConfig, result: dict) -> str:
    doc = {"negadep_version": __version__, "config": cfg.to_json(), "result": _jsonable(result)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator} ({float(x):.6g})"
    return str(x)


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


# --- arguments ------------------------------------------------------------------------------


def _net_flags(p: argparse.ArgumentParser, need_m: bool = True) -> None:
    p.add_argument("--b", type=int, help="prime base")
    p.add_argument("--s", type=int, help="dimension (at most b)")
    p.add_argument("--m", type=int, help="the net has b^m points")
    p.add_argument("--E", type=int, help="stored digits per coordinate (default m+20)")
    p.add_argument("--net", help="read the point set from a net file instead of --b/--s/--m")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="negadep", description="Pair probabilities and negative dependence of randomized digital nets.")
    parser.add_argument("--version", action="version", version=f"negadep {__version__}")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("net", help="build a Faure (0,m,s)-net and write it in the net file format")
    _net_flags(p)
    p.add_argument("--check", action="store_true", help="verify the elementary-interval property")
    p.add_argument("--out")

    for name, what in (("scramble", "Owen-scrambled"), ("shift", "digitally shifted")):
        p = sub.add_parser(name, help=f"write a {what} copy of a net")
        _net_flags(p)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--replicate", type=int, default=0)
        p.add_argument("--out")

    p = sub.add_parser("diagnose", help="counting numbers, psi terms and m-tilde over a grid")
    _net_flags(p)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--out")

    for name, text in (("hbox", "pair probability for one box"), ("variance", "variance of the box estimate")):
        p = sub.add_parser(name, help=text)
        _net_flags(p)
        p.add_argument("--box", action="append", required=True, help='e.g. "[1/9,4/9)x[0,1/3)"')
        p.add_argument("--randomizer", choices=("scramble", "shift"), default="scramble")
        p.add_argument("--replicates", type=int, default=0, help="replicates for the empirical estimate (0 = exact only)")
        if name == "hbox":
            route = p.add_mutually_exclusive_group()
            route.add_argument("--exact", dest="route", action="store_const", const="exact")
            route.add_argument("--empirical", dest="route", action="store_const", const="empirical")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")

    p = sub.add_parser("index", help="largest H(A) - Vol(A)^2 over a box family")
    _net_flags(p)
    p.add_argument("--box", action="append", default=[], help="add one box to the family")
    p.add_argument("--family", help="random:N:P, random:count=N,depth=P[,seed=S], or a file with one box per line")
    p.add_argument("--randomizer", choices=("scramble", "shift"), default="scramble")
    p.add_argument("--replicates", type=int, default=0, help="use the empirical route with R replicates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="run inequality certificates")
    p.add_argument("--lemma", default="all", help=f"one of {', '.join(lemmas.LEMMA_IDS)} or 'all'")
    p.add_argument("--grid", default="default", help="'default', 'quick', or key=value overrides")
    p.add_argument("--out")

    p = sub.add_parser("example-shift", help="the ten-point base-5 digital-shift example")
    p.add_argument("--replicates", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(ns.subcommand)
    for key in ("b", "s", "m", "E", "seed", "replicates", "family", "randomizer", "out", "format", "grid", "lemma", "net", "replicate", "check", "route"):
        if hasattr(ns, key) and getattr(ns, key) is not None:
            setattr(cfg, key, getattr(ns, key))
    cfg.boxes = list(getattr(ns, "box", None) or [])
    if cfg.replicates < 0:
        raise UsageError("--replicates must be non-negative")
    if cfg.route == "empirical" and cfg.replicates < 2:
        raise UsageError("--empirical needs --replicates R with R >= 2")
    return cfg


def _point_set(cfg: RunConfig) -> PointSet:
    if cfg.net:
        return read_net_file(cfg.net)
    missing = [f"--{k}" for k in ("b", "s", "m") if getattr(cfg, k) is None]
    if missing:
        raise UsageError(f"missing {', '.join(missing)} (or give --net)")
    return faure_net(cfg.b, cfg.s, cfg.m, cfg.E)


def _boxes(cfg: RunConfig, ps: PointSet) -> list[Box]:
    out = []
    for lit in cfg.boxes:
        try:
            box = parse_box(lit, ps.b)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"--box {lit!r}: {exc}") from None
        if box.s != ps.s:
            raise UsageError(f"--box {lit!r} has {box.s} factors, the point set has dimension {ps.s}")
        out.append(box)
    return out


def _random_family(spec: str, ps: PointSet, seed: int) -> list[Box]:
    opts = {"count": 1000, "depth": (ps.m or 1) + 2, "seed": seed}
    if "=" not in spec:
        # positional form random:N:P
        vals = [v for v in spec.split(":") if v]
        if len(vals) > 2 or not all(v.isdigit() for v in vals):
            raise UsageError(f"--family: expected random:N:P, got {spec!r}")
        opts.update(zip(("count", "depth"), map(int, vals)))
    else:
        for part in filter(None, spec.split(",")):
            key, _, val = part.partition("=")
            if key not in opts or not val.isdigit():
                raise UsageError(f"--family: bad entry {part!r}")
            opts[key] = int(val)
    if opts["count"] < 1 or opts["depth"] < 1:
        raise UsageError("--family: count and depth must be positive")
    return dependence.random_boxes(ps.b, ps.s, opts["depth"], opts["count"], opts["seed"])


def _family(cfg: RunConfig, ps: PointSet) -> list[Box]:
    boxes = _boxes(cfg, ps)
    if cfg.family:
        kind, _, rest = cfg.family.partition(":")
        if kind == "random":
            boxes += _random_family(rest, ps, cfg.seed)
        elif Path(cfg.family).is_file():
            lines = [ln.strip() for ln in Path(cfg.family).read_text().splitlines()]
            extra = RunConfig(cfg.subcommand, boxes=[ln for ln in lines if ln and not ln.startswith("#")])
            boxes += _boxes(extra, ps)
        else:
            raise UsageError(f"--family {cfg.family!r}: not a file and not random:N:P")
    if not boxes:
        raise UsageError("index needs --box or --family")
    return boxes


def _exact_H(box: Box, ps: PointSet, randomizer: str) -> Fraction:
    if randomizer == "shift":
        return dependence.H_shift_exact(box, ps)
    return dependence.H_unanchored(box, ps)


# --- subcommands --------------------------------------------------------------------------


def cmd_net(cfg: RunConfig) -> int:
    ps = _point_set(cfg)
    ok = verify_tms_net(ps) if cfg.check else None
    if cfg.out:
        Path(cfg.out).write_text(format_net_file(ps))
    if cfg.check:
        if ok:
            print(f"(0,{ps.m},{ps.s})-net verified")
        else:
            print(f"(0,{ps.m},{ps.s})-net check failed: some elementary interval does not hold exactly one point")
        return EXIT_OK if ok else EXIT_FAILED
    if not cfg.out:
        sys.stdout.write(format_net_file(ps))
    return EXIT_OK


def cmd_randomize(cfg: RunConfig) -> int:
    ps = _point_set(cfg)
    seed = ScrambleSeed(cfg.seed, cfg.replicate)
    out = owen_scramble(ps, seed) if cfg.subcommand == "scramble" else digital_shift(ps, seed)
    _emit(cfg, format_net_file(out))
    return EXIT_OK


def cmd_diagnose(cfg: RunConfig) -> int:
    ps = _point_set(cfg)
    rows = counting.counting_report(ps)
    if cfg.format == "csv":
        _emit(cfg, counting.report_csv(rows))
    else:
        _emit(cfg, _report(cfg, {"rows": rows, "all_bounds_ok": all(r["bound_ok"] for r in rows)}))
    return EXIT_OK if all(r["bound_ok"] for r in rows) else EXIT_FAILED


def cmd_hbox(cfg: RunConfig) -> int:
    ps = _point_set(cfg)
    results, failed = [], False
    for box in _boxes(cfg, ps):
        vol2 = box.volume**2
        row = {"box": format_box(box), "vol2": vol2}
        if cfg.route != "empirical":
            h = _exact_H(box, ps, cfg.randomizer)
            row.update(h_exact=h, gap=h - vol2)
            # the exact inequality is only guaranteed for scrambled nets
            row["pass"] = h <= vol2 if cfg.randomizer == "scramble" else None
            if row["pass"] is False:
                failed = True
                row["counterexample"] = True
        if cfg.route == "empirical" or (cfg.route is None and cfg.replicates >= 2):
            emp = dependence.H_empirical(box, ps, cfg.randomizer, cfg.replicates, cfg.seed)
            row["h_emp"] = {"mean": emp.estimate, "se": emp.se, "R": emp.R}
            if "gap" not in row:
                row["gap"] = emp.estimate - float(vol2)
        results.append(row)
    _emit(cfg, _report(cfg, {"boxes": results}))
    return EXIT_FAILED if failed else EXIT_OK


def cmd_index(cfg: RunConfig) -> int:
    ps = _point_set(cfg)
    family = _family(cfg, ps)
    mode = "empirical" if cfg.replicates >= 2 else "exact"
    rep = dependence.pairwise_index(ps, family, mode, cfg.randomizer, cfg.replicates, cfg.seed)
    rows = []
    for i, box in enumerate(rep.boxes):
        row = {"box": format_box(box), "h": rep.values[i], "vol2": box.volume**2, "gap": rep.gaps[i]}
        if rep.ses is not None:
            row["se"] = rep.ses[i]
        rows.append(row)
    # an empirical positive gap is not a certified failure
    failed = mode == "exact" and cfg.randomizer == "scramble" and rep.max_gap > 0
    if cfg.format == "csv":
        cols = ["box", "h", "vol2", "gap"] + (["se"] if rep.ses is not None else [])
        _emit(cfg, _csv([{k: _fmt(v) for k, v in r.items()} for r in rows], cols))
    else:
        result = {"mode": mode, "max_gap": rep.max_gap, "argmax": format_box(rep.boxes[rep.argmax]), "boxes": rows}
        _emit(cfg, _report(cfg, result))
    return EXIT_FAILED if failed else EXIT_OK


def cmd_variance(cfg: RunConfig) -> int:
    ps = _point_set(cfg)
    out, failed = [], False
    for box in _boxes(cfg, ps):
        rep = dependence.variance_compare(box, ps, cfg.randomizer, cfg.replicates, cfg.seed)
        row = {
            "box": format_box(box),
            "mu": rep.mu,
            "H": rep.H,
            "var_exact": rep.var_exact,
            "mc_variance": rep.mc_bound,
            "pair_term": rep.pair_term,
            "beats_mc": rep.beats_mc,
        }
        if rep.R:
            row.update(var_empirical=rep.var_emp, var_empirical_se=rep.var_emp_se, replicates=rep.R)
        if cfg.randomizer == "scramble" and not rep.beats_mc:
            failed = True
        out.append(row)
    _emit(cfg, _report(cfg, {"boxes": out}))
    return EXIT_FAILED if failed else EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    try:
        grid = lemmas.GridSpec.parse(cfg.grid)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"--grid {cfg.grid!r}: {exc}") from None
    names = lemmas.LEMMA_IDS if cfg.lemma in (None, "all") else (cfg.lemma,)
    if any(n not in lemmas.LEMMA_IDS for n in names):
        raise UsageError(f"--lemma {cfg.lemma!r}: choose from {', '.join(lemmas.LEMMA_IDS)} or 'all'")
    certs = [lemmas.run_lemma(n, grid) for n in names]
    for c in certs:
        print(f"{c.lemma}: {'PASS' if c.passed else 'FAIL'} ({c.checked} checks, {c.failure_count} counterexamples)", file=sys.stderr)
    doc = {"certificates": [c.to_json() for c in certs], "passed": all(c.passed for c in certs)}
    _emit(cfg, _report(cfg, doc))
    return EXIT_OK if doc["passed"] else EXIT_FAILED


def cmd_example_shift(cfg: RunConfig) -> int:
    ex = dependence.shift_example()
    result = {
        "h_shift": ex.h_shift,
        "h_conditioning": ex.h_conditioning,
        "vol2": ex.vol2,
        "gap": ex.h_shift - ex.vol2,
        "verdict": "positive dependence index" if ex.positive_index else "non-positive dependence index",
        "C_b": {",".join(map(str, k)): v for k, v in sorted(ex.C_b.items())},
        "box": format_box(dependence.shift_example_box()),
    }
    if cfg.replicates >= 2:
        ps, box = dependence.shift_example_points(), dependence.shift_example_box()
        for name in ("shift", "scramble"):
            emp = dependence.H_empirical(box, ps, name, cfg.replicates, cfg.seed)
            result[f"{name}_empirical"] = {"estimate": emp.estimate, "se": emp.se, "replicates": emp.R}
    _emit(cfg, _report(cfg, result))
    return EXIT_OK


COMMANDS = {
    "net": cmd_net,
    "scramble": cmd_randomize,
    "shift": cmd_randomize,
    "diagnose": cmd_diagnose,
    "hbox": cmd_hbox,
    "index": cmd_index,
    "variance": cmd_variance,
    "verify": cmd_verify,
    "example-shift": cmd_example_shift,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if not ns.subcommand:
            raise UsageError(f"choose a subcommand: {', '.join(COMMANDS)}")
        cfg = _config(ns)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[cfg.subcommand](cfg)
    except BrokenPipeError:
        return EXIT_OK
    except UsageError as exc:
        print(f"negadep: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NegadepError, ValueError, OSError) as exc:
        print(f"negadep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
