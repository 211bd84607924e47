"""Command-line entry point: ``perturbgraph <subcommand> ...``.

Exit status: 0 success, 1 domain/parameter/config error (including bad
command lines), 2 capability error (instance too large for an exact
routine), 3 a theorem report outside its calibration band.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .blobs import blob_partition, check_partition
from .errors import CapabilityError, PerturbGraphError
from .expansion import (
    conductance_bands,
    edge_isoperimetric_exact,
    expansion_profile,
    vertex_isoperimetric_exact,
)
from .graph import (
    BASE_KINDS,
    PerturbationParams,
    degeneracy,
    diameter,
    generate_base,
    perturb,
)
from .harness import THEOREMS, ExperimentResult, load_calibration, load_config, run_sweep, theorem_report, write_results
from .io import perturbed_from_dict, perturbed_to_dict, read_graph, write_edge_list, write_json, format_edge_list
from .longpath import longest_path_exact, long_path_blob_heuristic
from .subsets import code_bound, enumerate_codes
from .walks import empirical_mixing_estimate, mixing_bounds, mixing_details, stationary

THREADS_ENV = "PERTURBGRAPH_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse's default status 2 would collide with the capability code
        self.exit(1, f"{self.prog}: error: {message}\n")


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise PerturbGraphError(f"{THREADS_ENV} must be an integer (got {env!r})") from None
    return 1


def _emit(args, summary: str, payload: dict, file=None) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True), file=file)
    else:
        print(summary, file=file)


def _read_perturbed(path):
    p = Path(path)
    if p.suffix != ".json":
        raise PerturbGraphError(f"{path}: a perturbed-graph .json file is required")
    return perturbed_from_dict(json.loads(p.read_text()))


# subcommands ------------------------------------------------------------------


def cmd_gen(args):
    g = generate_base(args.kind, args.n, args.seed, max_degree=args.max_degree)
    if args.output:
        write_edge_list(g, args.output)
    else:
        sys.stdout.write(format_edge_list(g))
    _emit(args, f"{args.kind}: n={g.n} m={g.m}" + (f" -> {args.output}" if args.output else ""),
          {"kind": args.kind, "n": g.n, "m": g.m, "output": args.output},
          file=None if args.output else sys.stderr)


def cmd_perturb(args):
    g = read_graph(args.input)
    if args.eps_exponent is not None:
        params = PerturbationParams(0.0, args.seed, args.eps_exponent)
    else:
        params = PerturbationParams(args.eps, args.seed)
    pg = perturb(g, params)
    d = perturbed_to_dict(pg)
    if args.output:
        write_json(d, args.output)
    else:
        print(json.dumps(d, indent=2, sort_keys=True))
    _emit(args, f"n={g.n} base m={g.m} random={len(pg.random_edges)} merged m={pg.merged.m}",
          {"n": g.n, "base_m": g.m, "random_m": len(pg.random_edges), "merged_m": pg.merged.m,
           "eps": pg.eps, "seed": pg.seed, "output": args.output},
          file=None if args.output else sys.stderr)


def cmd_stats(args):
    g = read_graph(args.input)
    conn = g.is_connected()
    d = {"n": g.n, "m": g.m, "max_degree": g.max_degree, "degeneracy": degeneracy(g),
         "connected": conn, "diameter": diameter(g) if conn else None}
    _emit(args, " ".join(f"{k}={v}" for k, v in d.items()), d)


def cmd_expansion(args):
    g = read_graph(args.input)
    c = edge_isoperimetric_exact(g)
    iota = vertex_isoperimetric_exact(g)
    d = {"c": str(c.value), "c_set": sorted(c.argmin), "iota": str(iota.value), "iota_set": sorted(iota.argmin)}
    _emit(args, f"c={c.value} (S={sorted(c.argmin)}) iota={iota.value} (S={sorted(iota.argmin)})", d)


def cmd_profile(args):
    g = read_graph(args.input)
    if args.conductance:
        bands = conductance_bands(g, restrict_connected=not args.all_sets)
        rows = [{"j": j, "phi": str(v), "set": None if S is None else sorted(S)} for j, (v, S) in bands.items()]
        if not args.json:
            for r in rows:
                print(f"{r['j']} {r['phi']}")
        _emit(args, f"{len(rows)} conductance bands", {"bands": rows})
    else:
        prof = expansion_profile(g, args.alpha)
        if not args.json:
            for s, v in prof:
                print(f"{s} {v:.12g}")
        _emit(args, f"profile s=1..{len(prof)} min={min(v for _, v in prof):.6g}",
              {"profile": [[s, v] for s, v in prof]})


def cmd_mix(args):
    g = read_graph(args.input)
    if args.estimate:
        est = empirical_mixing_estimate(g, args.walkers, args.horizon, args.seed)
        d = {"estimate": est.estimate, "status": est.status, "starts": list(est.starts),
             "tv_at_estimate": est.tv_at_estimate, "note": est.note()}
        _emit(args, f"t_mix ~ {est.estimate} ({est.status}; {est.note()})", d)
        return
    det = mixing_details(g)
    d = {"t_mix": det.t_mix, "tv_at": det.tv_at, "tv_before": det.tv_before, "boundary": det.boundary,
         "pi_min": float(stationary(g).min())}
    if args.bounds:
        mb = mixing_bounds(g)
        d.update(fr_sum=mb.fr_sum, js_value=mb.js_value, bounds_exact=mb.exact)
    flag = " (within float guard of 1/4)" if det.boundary else ""
    _emit(args, f"t_mix={det.t_mix}{flag}", d)


def cmd_blobs(args):
    g = read_graph(args.input)
    part = blob_partition(g, args.k)
    problems = check_partition(g, part)
    d = part.as_dict()
    d["problems"] = problems
    if args.output:
        write_json(d, args.output)
    _emit(args, f"t={part.t} blobs, k={part.k}, Delta={part.delta}, problems={len(problems)}", d)
    if problems:
        raise PerturbGraphError("; ".join(problems))


def cmd_longpath(args):
    if args.exact:
        g = read_graph(args.input)
        w = longest_path_exact(g)
    else:
        pg = _read_perturbed(args.input)
        w = long_path_blob_heuristic(pg, args.k, args.seed)
    d = {"length": w.length, "method": w.method, "aux_length": w.aux_length, "path": list(w.vertices)}
    _emit(args, f"length={w.length} method={w.method}", d)


def cmd_enum(args):
    g = read_graph(args.input)
    codes = enumerate_codes(g, args.v, args.a, args.b)
    if args.json:
        print(json.dumps({"codes": [str(c) for c in codes], "bound": code_bound(args.a, args.b)}))
    else:
        for c in codes:
            print(c)
    print(f"{len(codes)} sets, bound {code_bound(args.a, args.b)}", file=sys.stderr)


def cmd_sweep(args):
    cfg = load_config(args.config)
    res = run_sweep(cfg, threads=_threads(args))
    paths = write_results(res, args.output)
    skipped = sum(r["status"] != "ok" for r in res.rows)
    _emit(args, f"{len(res.rows)} rows ({skipped} skipped) -> {paths['result']}",
          {"rows": len(res.rows), "skipped": skipped, "files": {k: str(v) for k, v in paths.items()}})


def cmd_report(args):
    p = Path(args.result)
    if p.is_dir():
        p = p / "result.json"
    res = ExperimentResult.from_json(json.loads(p.read_text()))
    cal = load_calibration(args.calibration)
    theorems = args.theorem or list(THEOREMS)
    reports = [theorem_report(res, t, cal) for t in theorems]
    if args.json:
        print(json.dumps(reports, sort_keys=True, default=str))
    else:
        for r in reports:
            flags = f" [{'; '.join(r['flags'])}]" if r["flags"] else ""
            print(f"{r['theorem']}: {r['status']} fitted={r['fitted']:.6g}{flags}")
    if not all(r["passed"] for r in reports):
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="perturbgraph", description="Randomly perturbed graphs: generation, expansion, mixing, long paths.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(fn=fn)
        return sp

    sp = add("gen", cmd_gen, "generate a base graph")
    sp.add_argument("kind", choices=BASE_KINDS)
    sp.add_argument("n", type=int)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--max-degree", type=int, default=None)
    sp.add_argument("-o", "--output")

    sp = add("perturb", cmd_perturb, "add a G(n, eps/n) sample")
    sp.add_argument("input")
    eg = sp.add_mutually_exclusive_group(required=True)
    eg.add_argument("--eps", type=float)
    eg.add_argument("--eps-exponent", type=float, help="use eps = n^-a")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("-o", "--output")

    sp = add("stats", cmd_stats, "size, degree, degeneracy, diameter")
    sp.add_argument("input")

    sp = add("expansion", cmd_expansion, "exact edge and vertex isoperimetric numbers")
    sp.add_argument("input")

    sp = add("profile", cmd_profile, "expansion or conductance profile")
    sp.add_argument("input")
    sp.add_argument("--alpha", type=float, default=0.5)
    sp.add_argument("--conductance", action="store_true", help="conductance bands instead")
    sp.add_argument("--all-sets", action="store_true", help="do not restrict bands to connected sets")

    sp = add("mix", cmd_mix, "mixing time of the lazy walk")
    sp.add_argument("input")
    mg = sp.add_mutually_exclusive_group()
    mg.add_argument("--exact", action="store_true", help="dense exact computation (default)")
    mg.add_argument("--estimate", action="store_true", help="sampling estimate")
    sp.add_argument("--bounds", action="store_true", help="also report conductance bounds")
    sp.add_argument("--walkers", type=int, default=10000)
    sp.add_argument("--horizon", type=int, default=100000)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("blobs", cmd_blobs, "partition into connected blobs")
    sp.add_argument("input")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("-o", "--output")

    sp = add("longpath", cmd_longpath, "long path via blob heuristic (or exact)")
    sp.add_argument("input")
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--exact", action="store_true")

    sp = add("enum", cmd_enum, "connected sets with given size and boundary")
    sp.add_argument("input")
    sp.add_argument("--v", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)

    sp = add("sweep", cmd_sweep, "run an experiment config")
    sp.add_argument("config")
    sp.add_argument("-o", "--output", required=True, help="output directory")
    sp.add_argument("--threads", type=int, default=None, help=f"worker processes (default ${THREADS_ENV} or 1)")

    sp = add("report", cmd_report, "theorem trend reports for a sweep result")
    sp.add_argument("result", help="sweep output directory or result.json")
    sp.add_argument("--theorem", action="append", choices=list(THEOREMS))
    sp.add_argument("--calibration", default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args) or 0
    except CapabilityError as exc:
        print(f"perturbgraph {args.cmd}: capability: {exc}", file=sys.stderr)
        return 2
    except (PerturbGraphError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"perturbgraph {args.cmd}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
