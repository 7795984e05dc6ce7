"""Command line front end.

Subcommands:
  conditions   run the applicable existence conditions, report pass/fail
  branches     trace the collision-manifold branches, list the landmarks
  orbit        search one periodic family, export report and trajectory
  table        reference tables: g3 endpoints, csc-sum asymptotics, sweeps

Reports are JSON; trajectories and tables can also be emitted as CSV
(header row, LF endings).  Floats are written with 17 significant digits
so identical configs reproduce byte-identical result sections; the
runtime_seconds field is the one intentionally non-reproducible value.

Exit codes: 0 ok, 2 a condition failed, 3 orbit not found, 64 usage.
"""

import argparse
import dataclasses
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import conditions as conditions_mod
from . import manifolds
from . import orbits
from . import problems
from .errors import DomainError, OrbitNotFoundError, SchubartError

_SIG = ".17g"


@dataclass
class RunConfig:
    """Effective settings for one command; unset fields take these defaults."""

    problem: str = "pyramidal"
    n: int = 2
    mu: float = 1.0
    # integrator overrides
    rtol: float = 1e-10
    atol: float = 1e-12
    max_s: float = 200.0
    # search overrides (None -> per-family defaults)
    grid_points: int = None
    param_lo: float = None
    param_hi: float = None
    workers: int = None
    # condition comparison level (None -> module default)
    beta: float = None
    # seed of record, echoed for deterministic reruns
    seed: int = 20260816
    out: str = None
    format: str = "json"


def _resolved_workers(cfg: RunConfig) -> int:
    if cfg.workers is not None:
        return max(1, int(cfg.workers))
    env = os.environ.get("SCHUBART_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def build_config(args) -> RunConfig:
    """Layer defaults, then an optional --config JSON file, then CLI flags."""
    layers = {}
    path = getattr(args, "config", None)
    if path:
        with open(path) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - {f.name for f in dataclasses.fields(RunConfig)}
        if unknown:
            raise DomainError("unknown config keys: %s" % sorted(unknown))
        layers.update(loaded)
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            layers[f.name] = v
    return RunConfig(**layers)


def _problem(cfg: RunConfig):
    if cfg.problem == "pyramidal":
        return problems.pyramidal(cfg.n, cfg.mu)
    if cfg.problem == "spatial":
        return problems.spatial(cfg.n)
    if cfg.problem == "planar":
        return problems.planar(cfg.n)
    raise DomainError("unknown problem kind %r" % cfg.problem)


# -- deterministic serialization ------------------------------------------------


def _json_text(obj, indent=0) -> str:
    """json.dumps with fixed 17-significant-digit float formatting."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = ",\n".join(
            "%s  %s: %s" % (pad, json.dumps(str(k)), _json_text(v, indent + 1))
            for k, v in obj.items())
        return "{\n%s\n%s}" % (rows, pad)
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        rows = ",\n".join("%s  %s" % (pad, _json_text(v, indent + 1))
                          for v in obj)
        return "[\n%s\n%s]" % (rows, pad)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), _SIG)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _csv_text(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        cells = [format(float(c), _SIG)
                 if isinstance(c, (float, np.floating)) else str(c)
                 for c in row]
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def _envelope(command: str, cfg: RunConfig, results, t0: float) -> dict:
    return {
        "tool": "schubart",
        "version": __version__,
        "command": command,
        "config": dataclasses.asdict(cfg),
        "runtime_seconds": time.perf_counter() - t0,
        "results": results,
    }


def _write(text: str, path) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- subcommands -----------------------------------------------------------------


def cmd_conditions(cfg: RunConfig, args) -> int:
    t0 = time.perf_counter()
    if cfg.format != "json":
        raise DomainError("condition reports are nested; only json output")
    problem = _problem(cfg)
    report = conditions_mod.condition_report(problem, beta=cfg.beta)
    entries = []
    for name in conditions_mod.CONDITION_NAMES:
        entry = report.entries[name]
        entries.append({
            "name": name,
            "status": entry["status"],
            "method": entry["method"],
            "evidence": [{"name": k, "value": v}
                         for k, v in entry["evidence"]],
        })
    ok = all(e["status"] in ("pass", "not-applicable") for e in entries)
    results = {"problem": str(problem), "conditions": entries,
               "all_pass_or_na": ok}
    _write(_json_text(_envelope("conditions", cfg, results, t0)), cfg.out)
    return 0 if ok else 2


def cmd_branches(cfg: RunConfig, args) -> int:
    t0 = time.perf_counter()
    problem = _problem(cfg)
    marks = manifolds.landmark_values(problem)
    n4 = manifolds.check_N4(problem)
    keys = sorted(marks)
    if cfg.format == "csv":
        text = _csv_text(keys + ["separation_v2_v3"],
                         [[marks[k] for k in keys] + [n4["separation"]]])
        _write(text, cfg.out)
        return 0
    results = {
        "problem": str(problem),
        "landmarks": {k: marks[k] for k in keys},
        "signs": {k: ("+" if marks[k] > 0 else "-") for k in keys},
        "separation_v2_v3": n4["separation"],
        "separated": n4["pass"],
    }
    _write(_json_text(_envelope("branches", cfg, results, t0)), cfg.out)
    return 0


def _family_spec(args) -> orbits.FamilySpec:
    i = args.i if args.i is not None else args.k
    return orbits.FamilySpec(args.family, i, args.j)


def _search_overrides(cfg: RunConfig) -> dict:
    out = {}
    for key in ("grid_points", "param_lo", "param_hi"):
        v = getattr(cfg, key)
        if v is not None:
            out[key] = v
    return out


def _trajectory_csv(orbit) -> str:
    samples = orbit.reconstructed.samples
    s = np.array([p for p, _ in samples])
    r = np.array([st.r for _, st in samples])
    v = np.array([st.v for _, st in samples])
    theta = np.array([st.angle for _, st in samples])
    w = np.array([st.w for _, st in samples])
    # physical time from the rescaling dt/ds = r^(3/2) cos^2(theta)
    dt_ds = r ** 1.5 * np.cos(theta) ** 2
    t = np.concatenate(
        [[0.0], np.cumsum(0.5 * (dt_ds[1:] + dt_ds[:-1]) * np.diff(s))])
    return _csv_text(["s", "t", "r", "v", "theta", "w"],
                     zip(s, t, r, v, theta, w))


def cmd_orbit(cfg: RunConfig, args) -> int:
    t0 = time.perf_counter()
    spec = _family_spec(args)
    problem = _problem(cfg)
    try:
        orbit = orbits.find_orbit(problem, spec, _search_overrides(cfg),
                                  workers=_resolved_workers(cfg))
    except OrbitNotFoundError as err:
        results = {
            "family": str(spec),
            "found": False,
            "error": str(err),
            "scan": [{"param": p, "classification": c,
                      "lines": list(lines), "residual": f}
                     for p, c, lines, f in err.scan],
        }
        _write(_json_text(_envelope("orbit", cfg, results, t0)), cfg.out)
        return 3
    checks = orbits.verify_periodicity(problem, orbit)
    seed = orbit.seed
    results = {
        "family": str(spec),
        "found": True,
        "seed_parameter": orbit.seed_parameter,
        "segment": orbit.quarter_or_half,
        "signature": list(orbits.prescribed_signature(spec)),
        "residual": orbit.residual,
        "full_period_s": orbit.full_period_s,
        "closure_error": checks["closure_error"],
        "energy_drift": checks["energy_drift"],
        "seed": {"chart": seed.chart, "r": seed.r, "v": seed.v,
                 "theta": seed.angle, "w": seed.w, "h": seed.h},
        "notes": dict(orbit.notes),
    }
    report = _json_text(_envelope("orbit", cfg, results, t0))
    csv_text = _trajectory_csv(orbit)
    if cfg.out is None:
        _write(csv_text if cfg.format == "csv" else report, None)
    else:
        _write(report, cfg.out)
        _write(csv_text, Path(cfg.out).with_suffix(".csv"))
    return 0


def _table_g3(cfg):
    rows = []
    for n in range(2, 10):
        res = conditions_mod.integrate_g(problems.spatial(n), "g3")
        rows.append({"n": n, "g3_end": res.endpoint_g})
    return rows, ["n", "g3_end"]


def _table_sn(cfg):
    rows = []
    for n in sorted({cfg.n}):
        s_n = problems.csc_sum(n)
        approx = problems.csc_sum_asymptotic(n)
        rows.append({"n": n, "S_n": s_n, "S_n_over_4": s_n / 4.0,
                     "asymptotic": approx,
                     "rel_error": abs(approx - s_n / 4.0) / (s_n / 4.0)})
    return rows, ["n", "S_n", "S_n_over_4", "asymptotic", "rel_error"]


def _table_sweep(cfg, args):
    if args.sweep == "mu":
        if cfg.problem != "pyramidal":
            raise DomainError("only the pyramidal family has a mass ratio")
        values = np.linspace(args.lo, args.hi, args.steps)
        mk = lambda v: problems.pyramidal(cfg.n, float(v))
        key = "mu"
    else:
        values = range(int(args.lo), int(args.hi) + 1)
        mk = lambda v: _problem(dataclasses.replace(cfg, n=int(v)))
        key = "n"
    cols = [key] + ["v%d" % k for k in range(6)]
    rows = []
    for v in values:
        marks = manifolds.landmark_values(mk(v))
        row = {key: float(v) if key == "mu" else int(v)}
        row.update({c: marks.get(c, "") for c in cols[1:]})
        rows.append(row)
    return rows, cols


def cmd_table(cfg: RunConfig, args) -> int:
    t0 = time.perf_counter()
    if args.which == "g3":
        rows, cols = _table_g3(cfg)
    elif args.which == "sn":
        rows, cols = _table_sn(cfg)
    else:
        rows, cols = _table_sweep(cfg, args)
    if cfg.format == "csv":
        _write(_csv_text(cols, [[r[c] for c in cols] for r in rows]), cfg.out)
        return 0
    results = {"which": args.which, "rows": rows}
    _write(_json_text(_envelope("table", cfg, results, t0)), cfg.out)
    return 0


# -- argument plumbing ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the exit-code contract reserves 2 for
    # condition failures
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(64)


def _add_common(sub):
    sub.add_argument("--config", help="JSON file with RunConfig fields")
    sub.add_argument("--problem", choices=["pyramidal", "spatial", "planar"])
    sub.add_argument("--n", type=int)
    sub.add_argument("--mu", type=float)
    sub.add_argument("--rtol", type=float)
    sub.add_argument("--atol", type=float)
    sub.add_argument("--max-s", dest="max_s", type=float)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out")
    sub.add_argument("--format", choices=["json", "csv"])


def make_parser() -> _Parser:
    parser = _Parser(prog="schubart", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("conditions", help="evaluate N1..N4 for a problem")
    _add_common(p)
    p.add_argument("--beta", type=float,
                   help="comparison level for N3' (default %g)"
                   % conditions_mod.DEFAULT_BETA)
    p.set_defaults(func=cmd_conditions)

    p = subs.add_parser("branches", help="landmark table from branch traces")
    _add_common(p)
    p.set_defaults(func=cmd_branches)

    p = subs.add_parser("orbit", help="search one periodic family")
    _add_common(p)
    p.add_argument("--family", required=True, choices=orbits.FAMILY_NAMES)
    p.add_argument("--k", type=int, help="index for B/Z1")
    p.add_argument("--i", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--param-lo", dest="param_lo", type=float)
    p.add_argument("--param-hi", dest="param_hi", type=float)
    p.add_argument("--workers", type=int,
                   help="scan parallelism (default: SCHUBART_WORKERS or cores)")
    p.set_defaults(func=cmd_orbit)

    p = subs.add_parser("table", help="reference tables")
    _add_common(p)
    p.add_argument("which", choices=["g3", "sn", "landmarks-sweep"])
    p.add_argument("--sweep", choices=["mu", "n"], default="mu")
    p.add_argument("--lo", type=float, default=0.5)
    p.add_argument("--hi", type=float, default=3.5)
    p.add_argument("--steps", type=int, default=7)
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.func(cfg, args)
    except DomainError as err:
        sys.stderr.write("error: %s\n" % err)
        return 64
    except SchubartError as err:
        sys.stderr.write("error: %s\n" % err)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
