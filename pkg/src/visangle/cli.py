"""Command-line front end: ``visangle body | probe | verify | sweep``.

Exit codes: 0 pass, 1 threshold breach, 2 usage or configuration error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .errors import NoConvergence, UnknownPreset, VisangleError
from .exterior import outer_radius
from .geometry import (
    SupportBody, body_from_json, curvature_margin, ellipse_tail, harmonic_spectrum,
    make_disk, make_ellipse, perimeter, area, standard_suite,
)
from .numerics import ordered_map
from .identities import IDENTITIES, EXT_TOL, PAIR_TOL, IdentityReport, verify
from .visual_angle import visual_angles

EXIT_OK, EXIT_BREACH, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

JSON_SCHEMA = "visangle.report/1"
CSV_HEADER = ("identity", "body", "params", "lhs", "rhs", "rel_err", "wall_time")

# parameter grids used when a parameterised identity is requested without one
DEFAULT_K = {"hurwitz_even": (2, 4, 6), "hurwitz_odd_consistency": (3, 5), "antipi": (3,)}
DEFAULT_M = {"power_sine": (3, 4, 5)}
SWEEP_DEFAULT = (
    ("crofton", None), ("masotti", None), ("power_sine", (3, 4, 5)),
    ("hurwitz_odd_consistency", (3, 5, 7)),
)


class UsageError(VisangleError):
    pass


# ---------------------------------------------------------------------------
# bodies


def _floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UnknownPreset(f"bad numeric parameters {text!r}") from None


def parse_preset(spec: str) -> SupportBody:
    """``disk:r | ellipse:a,b | shifted_disk | const_width | generic``."""
    name, _, arg = spec.strip().partition(":")
    vals = _floats(arg) if arg else []
    suite = standard_suite()
    if name in suite and not vals:
        return suite[name]
    if name == "disk":
        return make_disk(vals[0] if vals else 1.0)
    if name == "ellipse":
        if len(vals) != 2:
            raise UnknownPreset("ellipse preset needs two semi-axes, e.g. ellipse:2,1")
        return make_ellipse(*vals)
    raise UnknownPreset(f"unknown preset {spec!r}; known: disk:r, ellipse:a,b, {', '.join(list(suite)[1:])}")


def load_body(preset: Optional[str], path: Optional[str]) -> SupportBody:
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read body file: {exc}") from None
        try:
            return body_from_json(text, name=path.rsplit("/", 1)[-1])
        except VisangleError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"bad body file {path}: {exc}") from None
    return parse_preset(preset or "disk:1")


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    bodies: List[Tuple[Optional[str], Optional[str]]] = field(default_factory=list)
    identities: List[str] = field(default_factory=list)
    k: Optional[List[int]] = None
    m: Optional[List[int]] = None
    ext_tol: float = EXT_TOL
    pair_tol: float = PAIR_TOL
    out: Optional[str] = None
    fmt: str = "json"
    seed: int = 0
    timings: bool = False

    def validate(self) -> None:
        if not (self.ext_tol > 0 and self.pair_tol > 0):
            raise UsageError("tolerances must be positive")
        unknown = [i for i in self.identities if i not in IDENTITIES]
        if unknown:
            raise UsageError(f"unknown identity {unknown[0]!r}; known: {', '.join(IDENTITIES)}")
        if self.fmt not in ("json", "csv"):
            raise UsageError("format must be json or csv")


def _read_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a flat JSON object")
    return data


def _split_ids(values: Optional[Sequence[str]]) -> List[str]:
    out: List[str] = []
    for v in values or []:
        out.extend(s for s in v.split(",") if s)
    if "all" in out:
        return list(IDENTITIES)
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = _read_config(getattr(args, "config", None))

    def pick(name, default=None):
        val = getattr(args, name, None)
        return val if val is not None else cfg.get(name, default)

    bodies: List[Tuple[Optional[str], Optional[str]]] = []
    if pick("suite", False):
        bodies = [(name, None) for name in standard_suite()]
    presets = pick("preset")
    if isinstance(presets, str):
        presets = [presets]
    bodies += [(p, None) for p in presets or []]
    if pick("file"):
        bodies.append((None, pick("file")))
    if not bodies:
        bodies = [("disk:1", None)]
    ids = pick("identity")
    ids = _split_ids([ids] if isinstance(ids, str) else ids)
    run = RunConfig(bodies=bodies, identities=ids, k=pick("k"), m=pick("m"),
                    ext_tol=float(pick("ext_tol", EXT_TOL)), pair_tol=float(pick("pair_tol", PAIR_TOL)),
                    out=pick("out"), fmt=pick("format", "json"), seed=int(pick("seed", 0)),
                    timings=bool(pick("timings", False)))
    run.validate()
    return run


# ---------------------------------------------------------------------------
# jobs and reports


def _param_grid(identity: str, k: Optional[Sequence[int]], m: Optional[Sequence[int]]) -> List[dict]:
    if identity in DEFAULT_K:
        return [{"k": int(v)} for v in (k or DEFAULT_K[identity])]
    if identity in DEFAULT_M:
        return [{"m": int(v)} for v in (m or DEFAULT_M[identity])]
    return [{}]


def _applicable(identity: str, body: SupportBody, params: dict) -> bool:
    if identity == "const_width_lambda":
        return all(body.c_sq[j] == 0.0 for j in range(2, body.kmax + 1, 2))
    if identity == "hurwitz_even":
        return params["k"] % 2 == 0
    if identity in ("hurwitz_odd_consistency", "antipi"):
        return params["k"] % 2 == 1
    return True


def run_jobs(jobs: List[Tuple[str, SupportBody, dict]], ext_tol: float,
             pair_tol: float) -> List[IdentityReport]:
    # each report is a pure function of its job, and results keep job order
    return ordered_map(lambda job: verify(job[0], job[1], job[2], ext_tol=ext_tol, pair_tol=pair_tol),
                       jobs)


def make_jobs(cfg: RunConfig, strict: bool) -> List[Tuple[str, SupportBody, dict]]:
    bodies = [load_body(p, f) for p, f in cfg.bodies]
    jobs = []
    for ident in sorted(cfg.identities, key=list(IDENTITIES).index):
        for body in bodies:
            for params in _param_grid(ident, cfg.k, cfg.m):
                if strict or _applicable(ident, body, params):
                    jobs.append((ident, body, params))
    return jobs


def _num(x) -> str:
    return repr(float(x))


def _params_text(params: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in sorted(params.items()))


def reports_to_json(reports: List[IdentityReport], timings: bool = False) -> str:
    doc = {"schema": JSON_SCHEMA, "version": __version__,
           "passed": all(r.passed for r in reports),
           "reports": [r.to_dict(timings) for r in reports]}
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=True) + "\n"


def reports_to_csv(reports: List[IdentityReport], timings: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in reports:
        writer.writerow([r.identity, r.body, _params_text(r.params), _num(r.lhs), _num(r.rhs),
                         _num(r.rel_err), _num(r.wall_time) if timings else ""])
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_body(args: argparse.Namespace) -> int:
    body = load_body(args.preset, args.file)
    pmin, rmin = curvature_margin(body)
    lines = [f"body      {body.describe()}",
             f"kmax      {body.kmax}",
             f"L         {perimeter(body):.15g}",
             f"F         {area(body):.15g}",
             f"min p     {pmin:.15g}",
             f"min p+p'' {rmin:.15g}"]
    if args.preset and args.preset.startswith("ellipse"):
        a, b = _floats(args.preset.partition(":")[2])
        lines.append(f"tail      {ellipse_tail(a, b):.3e}")
    spec = harmonic_spectrum(body)
    lines.append("c_sq      " + ("(none)" if not spec else ""))
    lines.extend(f"  k={k:<3d} {v:.15g}" for k, v in spec.items())
    print("\n".join(lines))
    return EXIT_OK


def _ring(body: SupportBody, n: int, radius: Optional[float]):
    r = radius if radius else outer_radius(body)
    t = np.arange(n) * (2.0 * math.pi / n)
    return r * np.cos(t), r * np.sin(t)


def _random_points(body: SupportBody, n: int, seed: int):
    rng = np.random.default_rng(seed)
    r0 = outer_radius(body)
    t = rng.uniform(0.0, 2.0 * math.pi, n)
    r = rng.uniform(0.5 * r0 * 1.0001, 2.0 * r0, n)
    return r * np.cos(t), r * np.sin(t)


def cmd_probe(args: argparse.Namespace) -> int:
    body = load_body(args.preset, args.file)
    if args.point:
        vals = _floats(args.point)
        if len(vals) != 2:
            raise UsageError("--point needs x,y")
        x, y = np.array([vals[0]]), np.array([vals[1]])
    elif args.random:
        x, y = _random_points(body, args.random, args.seed)
    else:
        x, y = _ring(body, args.grid, args.radius)
    va = visual_angles(body, x, y)
    rows = [("x", "y", "omega", "omega1", "omega2", "omega1+omega2-omega")]
    for i in range(x.size):
        rows.append((f"{x[i]:.6f}", f"{y[i]:.6f}", f"{va.omega[i]:.6f}", f"{va.omega1[i]:.6f}",
                     f"{va.omega2[i]:.6f}", f"{va.omega1[i] + va.omega2[i] - va.omega[i]:.3e}"))
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    for r in rows:
        print("  ".join(v.rjust(w) for v, w in zip(r, widths)))
    return EXIT_OK


def _finish(reports: List[IdentityReport], cfg: RunConfig) -> int:
    text = reports_to_json(reports, cfg.timings) if cfg.fmt == "json" else reports_to_csv(reports, cfg.timings)
    _emit(text, cfg.out)
    failed = [r for r in reports if not r.passed]
    for r in failed:
        for c in r.failing():
            print(f"FAIL {r.identity} [{r.body} {_params_text(r.params)}] term {c.name}: "
                  f"{c.metric} err {c.err:.3e} > {c.threshold:.1e}", file=sys.stderr)
    return EXIT_BREACH if failed else EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    if not cfg.identities:
        raise UsageError("no identity given (use --identity ID or --identity all)")
    strict = len(cfg.bodies) == 1 and len(cfg.identities) == 1
    return _finish(run_jobs(make_jobs(cfg, strict), cfg.ext_tol, cfg.pair_tol), cfg)


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.suite is None and not args.preset and not args.file:
        args.suite = True
    if args.format is None:
        args.format = "csv"
    cfg = build_config(args)
    if cfg.identities:
        jobs = make_jobs(cfg, strict=False)
    else:
        bodies = [load_body(p, f) for p, f in cfg.bodies]
        jobs = []
        for ident, grid in SWEEP_DEFAULT:
            key = "m" if ident in DEFAULT_M else "k"
            for body in bodies:
                for params in ([{key: v} for v in grid] if grid else [{}]):
                    jobs.append((ident, body, params))
    return _finish(run_jobs(jobs, cfg.ext_tol, cfg.pair_tol), cfg)


# ---------------------------------------------------------------------------
# parser


def _add_body_args(p: argparse.ArgumentParser, multi: bool = False) -> None:
    if multi:
        p.add_argument("--preset", action="append", help="body preset (repeatable)")
        p.add_argument("--suite", action="store_true", default=None, help="all five reference bodies")
    else:
        p.add_argument("--preset", help="disk:r | ellipse:a,b | shifted_disk | const_width | generic")
    p.add_argument("--file", help="JSON body file {\"a0\": .., \"a\": [..], \"b\": [..]}")


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--identity", action="append", help="identity id, comma list, or 'all'")
    p.add_argument("--k", type=int, nargs="+", help="k values for Hurwitz/antipi identities")
    p.add_argument("--m", type=int, nargs="+", help="m values for power_sine")
    p.add_argument("--ext-tol", dest="ext_tol", type=float, help=f"exterior tolerance (default {EXT_TOL:g})")
    p.add_argument("--pair-tol", dest="pair_tol", type=float, help=f"pair-measure tolerance (default {PAIR_TOL:g})")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--config", help="flat JSON config; command-line flags win")
    p.add_argument("--seed", type=int)
    p.add_argument("--timings", action="store_true", default=None,
                   help="record wall times (makes output run-dependent)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="visangle", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("body", help="summarise a body")
    _add_body_args(p)
    p.set_defaults(func=cmd_body)

    p = sub.add_parser("probe", help="visual angles at points")
    _add_body_args(p)
    p.add_argument("--point", help="x,y")
    p.add_argument("--grid", type=int, default=8, help="points on a ring (default 8)")
    p.add_argument("--radius", type=float, help="ring radius (default 2 max rho)")
    p.add_argument("--random", type=int, help="random exterior points")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("verify", help="verify identities and write a report")
    _add_body_args(p, multi=True)
    _add_run_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="identity x parameter x body grid as CSV")
    _add_body_args(p, multi=True)
    _add_run_args(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NoConvergence as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (VisangleError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
