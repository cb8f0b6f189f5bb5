"""Command-line entry point.

Subcommands::

    percolimit simulate --model iic-cond --sigma 2 --height 1000 --seed 7 -o run/
    percolimit encode --tree run/tree.pt --encoding contour --k 2 -o enc/
    percolimit compare --experiment ipc-v --set k=40 --set n_replicas=500 --seed 7 -o cmp/
    percolimit level-stats --tree run/tree.pt --up-to 30 -o lv/

Every invocation takes a mandatory integer seed (``--seed`` or the
``PERCOLIMIT_SEED`` environment variable; there is no wall-clock default)
and every output directory receives a ``manifest.json`` with the resolved
parameters, sufficient to reproduce each file in it bit-exactly.
``--config file.json`` preloads flag values; explicit flags win.

Exit codes: 0 success (all comparisons passed), 1 statistical failure,
2 usage or validation error, 3 IO error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .codec import (contour_fn, decode_lukaciewicz, height_fn, lukaciewicz,
                    read_path_csv, rescale, write_path_csv)
from .continuum import (EnvelopeProcess, read_envelope_csv, sample_envelope,
                        solve_sde, write_envelope_csv, write_limit_path_csv)
from .errors import (GWOverflowError, InvalidInputError, MaterializationError,
                     PercolimitError, TreeFileError)
from .samplers import (GWOverflow, ModelParams, sample_gw, sample_iic,
                       sample_ipc_direct)
from .seeding import master_sequence, subordinate_seed
from .stats import (EXPERIMENTS, convergence_experiment, level_count,
                    write_sample_csv)
from .trees import load_tree, save_tree, truncate

SIMULATE_MODELS = ("iic-cond", "iic-sides", "gw", "ipc", "envelope", "sde")
ENCODINGS = {"lukaciewicz": lukaciewicz, "height": height_fn,
             "contour": contour_fn}


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="percolimit",
        description="Invasion percolation on regular trees: samplers, "
                    "encodings, and convergence experiments.")
    top.add_argument("--version", action="version",
                     version=f"percolimit {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (fallback: PERCOLIMIT_SEED)")
        p.add_argument("-o", "--out", default=None,
                       help="output directory (default: current directory)")
        p.add_argument("--config", default=None,
                       help="JSON file preloading flag values; flags win")
        p.add_argument("--dry-run", action="store_true",
                       help="validate, print the plan, write nothing")
        p.add_argument("--workers", type=int, default=None,
                       help="replica parallelism (default: available cores)")

    sim = sub.add_parser("simulate", help="sample a model and write its files")
    common(sim)
    sim.add_argument("--model", choices=SIMULATE_MODELS, required=True)
    sim.add_argument("--sigma", type=int, default=2)
    sim.add_argument("--height", type=int, default=None,
                     help="backbone height to materialize (iic models)")
    sim.add_argument("--w", type=float, default=None,
                     help="offspring weight (gw model)")
    sim.add_argument("--cap", type=int, default=None,
                     help="vertex cap for materialized trees")
    sim.add_argument("--n-steps", type=int, default=None,
                     help="invasion steps (ipc model)")
    sim.add_argument("--tmin", type=float, default=None,
                     help="materialization start (envelope model)")
    sim.add_argument("--tmax", type=float, default=None,
                     help="materialization end (envelope model)")
    sim.add_argument("--envelope", default=None,
                     help="envelope CSV driving the sde model")
    sim.add_argument("--level", type=float, default=None,
                     help="constant envelope level for the sde model")
    sim.add_argument("--variant", choices=("E(L)", "E(L/2)"), default="E(L)")
    sim.add_argument("--T", type=float, default=None, help="sde horizon")
    sim.add_argument("--dt", type=float, default=None, help="sde step")

    enc = sub.add_parser("encode", help="encode a .pt tree as a lattice path")
    common(enc)
    enc.add_argument("--tree", default=None, help="input .pt file")
    enc.add_argument("--encoding", choices=tuple(ENCODINGS), default="lukaciewicz")
    enc.add_argument("--k", type=float, default=None,
                     help="diffusive rescaling scale (contour uses 2k^2)")
    enc.add_argument("--decode", action="store_true",
                     help="invert: read a Lukaciewicz CSV, write tree.pt")
    enc.add_argument("--path", default=None,
                     help="input path CSV when decoding")

    cmp_ = sub.add_parser("compare",
                          help="run registered discrete-vs-limit experiments")
    common(cmp_)
    cmp_.add_argument("--experiment", action="append", default=None,
                      help="registered experiment name (repeatable)")
    cmp_.add_argument("--all", action="store_true",
                      help="run every registered experiment")
    cmp_.add_argument("--set", action="append", default=None, metavar="K=V",
                      help="override an experiment parameter (repeatable)")

    lv = sub.add_parser("level-stats",
                        help="per-level counts and partial volumes of a tree")
    common(lv)
    lv.add_argument("--tree", default=None, help="input .pt file")
    lv.add_argument("--up-to", type=int, default=None,
                    help="largest level to report")

    return top


# ---------------------------------------------------------------------------
# config / seed resolution
# ---------------------------------------------------------------------------

def _merge_config(args, argv):
    """Fill flag values from --config for flags not given on the command line."""
    if args.config is None:
        return args
    try:
        with open(args.config) as fh:
            conf = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"config {args.config}: not valid JSON ({exc})")
    if not isinstance(conf, dict):
        raise InvalidInputError(f"config {args.config}: expected a JSON object")
    given = {a.lstrip("-").split("=")[0].replace("-", "_")
             for a in argv if a.startswith("--")}
    for key, value in conf.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise InvalidInputError(f"config {args.config}: unknown field {key!r}")
        if dest in given:
            continue  # explicit flag wins
        if dest == "set" and getattr(args, "set", None):
            continue
        setattr(args, dest, value)
    return args


def _resolve_seed(args) -> int:
    if args.seed is not None:
        seed = args.seed
    else:
        env = os.environ.get("PERCOLIMIT_SEED")
        if env is None:
            raise InvalidInputError(
                "missing required parameter: seed "
                "(pass --seed or set PERCOLIMIT_SEED)")
        try:
            seed = int(env)
        except ValueError:
            raise InvalidInputError(
                f"PERCOLIMIT_SEED must be an integer, got {env!r}")
    master_sequence(seed)  # validates range
    return int(seed)


def _need(args, field, model=None):
    value = getattr(args, field.replace("-", "_"))
    if value is None:
        where = f" for --model {model}" if model else ""
        raise InvalidInputError(f"missing required parameter: {field}{where}")
    return value


def _parse_set(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise InvalidInputError(
                f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        out[key.strip()] = _coerce(raw.strip())
    return out


def _coerce(raw):
    low = raw.lower()
    if low in ("none", "null"):
        return None
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

class OutputDir:
    """Collects (filename, writer) pairs; writes nothing under --dry-run."""

    def __init__(self, root, dry_run):
        self.root = root or "."
        self.dry_run = dry_run
        self.files = []

    def add(self, name, writer):
        self.files.append(name)
        if self.dry_run:
            print(f"would write {os.path.join(self.root, name)}")
            return
        os.makedirs(self.root, exist_ok=True)
        writer(os.path.join(self.root, name))

    def finish(self, command, seed, params):
        manifest = {
            "command": command,
            "seed": seed,
            "params": params,
            "files": sorted(self.files),
            "backend": BACKEND,
            "version": __version__,
        }
        body = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        if self.dry_run:
            print(f"would write {os.path.join(self.root, 'manifest.json')}")
            print(body, end="")
            return
        with open(os.path.join(self.root, "manifest.json"), "w") as fh:
            fh.write(body)


def _write_text(body):
    def writer(fname):
        with open(fname, "w") as fh:
            fh.write(body)
    return writer


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args, seed) -> int:
    model = args.model
    params = {"model": model, "sigma": args.sigma}
    out = OutputDir(args.out, args.dry_run)
    rng = np.random.Generator(np.random.PCG64(master_sequence(seed)))
    mp = ModelParams(args.sigma)

    if model in ("iic-cond", "iic-sides"):
        height = _need(args, "height", model)
        params["height"] = height
        kw = {}
        if args.cap is not None:
            params["cap"] = kw["cap"] = args.cap
        if model == "iic-cond":
            sin = sample_iic(mp, True, height, rng, **kw)
            tree = truncate(sin, height)
            out.add("tree.pt", lambda f: save_tree(tree, f))
        else:
            left, right = sample_iic(mp, False, height, rng, **kw)
            lt, rt = truncate(left, height), truncate(right, height)
            out.add("left.pt", lambda f: save_tree(lt, f))
            out.add("right.pt", lambda f: save_tree(rt, f))
    elif model == "gw":
        w = _need(args, "w", model)
        params["w"] = w
        kw = {}
        if args.cap is not None:
            params["cap"] = kw["cap"] = args.cap
        tree = sample_gw(args.sigma, w, rng=rng, **kw)
        if isinstance(tree, GWOverflow):
            raise MaterializationError(
                f"gw sample exceeded the {tree.cap}-vertex cap; "
                f"raise --cap or lower --w")
        out.add("tree.pt", lambda f: save_tree(tree, f))
    elif model == "ipc":
        n_steps = _need(args, "n-steps", model)
        params["n_steps"] = n_steps
        run = sample_ipc_direct(mp, n_steps, rng)
        out.add("tree.pt", lambda f: save_tree(run.tree, f))
        rows = ["step,parent,slot,weight"]
        rows += [f"{j},{int(p)},{int(s)},{float(w)!r}"
                 for j, (p, s, w) in enumerate(
                     zip(run.parents, run.slots, run.weights))]
        out.add("invasion.csv", _write_text("\n".join(rows) + "\n"))
    elif model == "envelope":
        t_min = _need(args, "tmin", model)
        t_max = _need(args, "tmax", model)
        params.update(t_min=t_min, t_max=t_max)
        env = sample_envelope(t_min, t_max, rng)
        out.add("envelope.csv", lambda f: write_envelope_csv(env, f))
    elif model == "sde":
        T = _need(args, "T", model)
        dt = args.dt if args.dt is not None else 1e-4
        params.update(T=T, dt=dt, variant=args.variant)
        if args.envelope is not None and args.level is not None:
            raise InvalidInputError(
                "sde model takes --envelope or --level, not both")
        if args.envelope is not None:
            params["envelope"] = os.path.basename(args.envelope)
            env = read_envelope_csv(args.envelope, t_max=args.tmax)
        elif args.level is not None:
            params["level"] = args.level
            env = EnvelopeProcess.constant(args.level)
        else:
            raise InvalidInputError(
                "missing required parameter: envelope or level for --model sde")
        path = solve_sde(env, args.variant, T=T, dt=dt, rng=seed)
        out.add("path.csv", lambda f: write_limit_path_csv(path, f))

    out.finish("simulate", seed, params)
    return 0


def cmd_encode(args, seed) -> int:
    out = OutputDir(args.out, args.dry_run)
    if args.decode:
        src = _need(args, "path")
        ts, vs = _read_csv_file(src)
        path_obj = _lattice_from_grid(ts, vs)
        tree = decode_lukaciewicz(path_obj)
        params = {"decode": True, "path": os.path.basename(src)}
        out.add("tree.pt", lambda f: save_tree(tree, f))
    else:
        src = _need(args, "tree")
        tree = load_tree(src)
        path_obj = ENCODINGS[args.encoding](tree)
        params = {"encoding": args.encoding, "tree": os.path.basename(src)}
        if args.k is not None:
            prefactor = 2.0 if args.encoding == "contour" else 1.0
            path_obj = rescale(path_obj, args.k, time_prefactor=prefactor)
            params["k"] = args.k
        body = _path_csv_body(path_obj)
        out.add(f"{args.encoding}.csv", _write_text(body))
    out.finish("encode", seed, params)
    return 0


def _read_csv_file(src):
    with open(src) as fh:
        return read_path_csv(fh)


def _lattice_from_grid(ts, vs):
    from .codec import LatticePath
    if ts.size < 2:
        raise InvalidInputError("path CSV has fewer than 2 rows")
    dt = ts[1] - ts[0]
    if dt <= 0:
        raise InvalidInputError("path CSV times must increase")
    return LatticePath(vs, time_scale=1.0 / dt)


def _path_csv_body(path_obj):
    import io
    buf = io.StringIO()
    write_path_csv(path_obj, buf)
    return buf.getvalue()


def cmd_compare(args, seed) -> int:
    if args.all:
        names = sorted(EXPERIMENTS)
    else:
        names = args.experiment or []
        if isinstance(names, str):
            names = [names]
    if not names:
        raise InvalidInputError(
            "missing required parameter: experiment (or pass --all)")
    for name in names:
        if name not in EXPERIMENTS:
            raise InvalidInputError(
                f"unknown experiment {name!r}; registered: "
                + ", ".join(sorted(EXPERIMENTS)))
    overrides = _parse_set(args.set)
    workers = args.workers or os.cpu_count() or 1
    registry_order = {n: i for i, n in enumerate(sorted(EXPERIMENTS))}
    out = OutputDir(args.out, args.dry_run)
    params = {"experiments": names, "overrides": overrides, "workers": workers}

    if args.dry_run:
        for name in names:
            resolved = dict(EXPERIMENTS[name].defaults)
            resolved.update(overrides)
            print(f"would run {name} with seed "
                  f"{subordinate_seed(seed, registry_order[name])}: {resolved}")
        for name in names:
            out.add(f"{name}-discrete.csv", None)
            out.add(f"{name}-limit.csv", None)
        out.add("report.json", None)
        out.finish("compare", seed, params)
        return 0

    reports = []
    all_pass = True
    for name in names:
        sub_seed = subordinate_seed(seed, registry_order[name])
        report, disc, lim = convergence_experiment(
            name, sub_seed, workers=workers, return_samples=True, **overrides)
        wall = report.pop("wall_time_s")
        print(f"{name}: ks={report['ks_stat']:.4f} "
              f"threshold={report['threshold']} "
              f"{'PASS' if report['pass'] else 'FAIL'} ({wall:.1f}s)")
        all_pass &= report["pass"]
        reports.append(report)
        out.add(f"{name}-discrete.csv", lambda f, s=disc: write_sample_csv(s, f))
        out.add(f"{name}-limit.csv", lambda f, s=lim: write_sample_csv(s, f))
    body = json.dumps({"seed": seed, "all_pass": bool(all_pass),
                       "experiments": reports}, indent=2, sort_keys=True) + "\n"
    out.add("report.json", _write_text(body))
    out.finish("compare", seed, params)
    return 0 if all_pass else 1


def cmd_level_stats(args, seed) -> int:
    src = _need(args, "tree")
    up_to = _need(args, "up-to")
    if up_to < 0:
        raise InvalidInputError("up-to must be >= 0")
    tree = load_tree(src)
    rows = ["level,count,cumulative"]
    cum = 0
    for level in range(up_to + 1):
        c = level_count(tree, level)
        cum += c
        rows.append(f"{level},{c},{cum}")
    out = OutputDir(args.out, args.dry_run)
    out.add("levels.csv", _write_text("\n".join(rows) + "\n"))
    out.finish("level-stats", seed,
               {"tree": os.path.basename(src), "up_to": up_to})
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "encode": cmd_encode,
    "compare": cmd_compare,
    "level-stats": cmd_level_stats,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        args = _merge_config(args, argv)
        seed = _resolve_seed(args)
        return COMMANDS[args.command](args, seed)
    except TreeFileError as exc:
        print(f"percolimit: error: {exc}", file=sys.stderr)
        return 3
    except (InvalidInputError, MaterializationError, GWOverflowError) as exc:
        print(f"percolimit: error: {exc}", file=sys.stderr)
        return 2
    except PercolimitError as exc:
        print(f"percolimit: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"percolimit: io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
