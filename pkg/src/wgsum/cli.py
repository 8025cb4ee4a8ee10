"""Command-line entry point: ``wgsum <command> ...``.

Settings resolve as command-line flags, then values from ``--config``
(YAML or JSON), then built-in defaults. ``WGSUM_OUT`` sets the default
output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, asdict

import numpy as np
import yaml

from .evaluation import (
    EvalReport,
    decompress,
    reports_to_json,
    rmse,
    run_benchmark,
    write_figure_csvs,
    write_reports_csv,
)
from .graph import EdgeListParseError, generate_synthetic, load_edge_list, write_edge_list
from .lsh import LshParams, build_index_for_graph
from .randomized import b_randomized, randomized_summarize
from .sags import MergeConfig, summarize_with_index, SummarizeStats
from .summary import SummaryFileError, read_summary, write_summary

EXIT_OK, EXIT_ERROR, EXIT_NOT_REACHED = 0, 1, 2
OUT_ENV = "WGSUM_OUT"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    input: str
    method: str = "sags"
    target_cr: float = 0.5
    theta_sim: float = 0.5
    theta_w: float = 0.0
    k: int = 100
    b: int = 25
    r: int = 4
    seed: int = 0
    out: str = "."
    supernodes: int | None = None
    aggregate: str = "sum"
    dump_index: bool = False

    def __post_init__(self):
        if self.method not in ("sags", "randomized", "brandomized"):
            raise UsageError(f"unknown method {self.method!r}")
        try:
            self.merge_config()
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def lsh(self) -> LshParams:
        return LshParams(k=self.k, b=self.b, r=self.r, seed=self.seed)

    def merge_config(self) -> MergeConfig:
        return MergeConfig(
            target_cr=self.target_cr, theta_sim=self.theta_sim, theta_w=self.theta_w,
            lsh=self.lsh(), seed=self.seed,
        )


def _read_config(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a mapping")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _resolve(args, keys, aliases=None) -> dict:
    aliases = aliases or {}
    merged = _read_config(getattr(args, "config", None))
    merged = {aliases.get(k, k): v for k, v in merged.items()}
    for key in keys:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            merged[key] = val
    return {k: v for k, v in merged.items() if k in keys}


def _default_out() -> str:
    return os.environ.get(OUT_ENV, ".")


def _load_graph(path, aggregate="sum"):
    if not os.path.exists(path):
        raise UsageError(f"input file not found: {path}")
    return load_edge_list(path, aggregate=aggregate)


def _sags_run(g, cfg: MergeConfig):
    t0 = time.perf_counter()
    index, sig = build_index_for_graph(g, cfg.lsh_params())
    stats = SummarizeStats(method="sags", index_time_ms=(time.perf_counter() - t0) * 1e3)
    s, stats = summarize_with_index(g, cfg, index, stats)
    return s, stats, index, sig


def cmd_summarize(args) -> int:
    keys = [f.name for f in RunConfig.__dataclass_fields__.values()]
    values = _resolve(args, keys, aliases={"cr": "target_cr", "in": "input"})
    values.setdefault("out", _default_out())
    if "input" not in values:
        raise UsageError("no input graph given (--in)")
    cfg = RunConfig(**values)
    g = _load_graph(cfg.input, cfg.aggregate)
    t0 = time.perf_counter()
    index = sig = None
    if cfg.method == "sags":
        s, stats, index, sig = _sags_run(g, cfg.merge_config())
    elif cfg.method == "randomized":
        s, stats = randomized_summarize(g, target_cr=cfg.target_cr, seed=cfg.seed)
    else:
        count = cfg.supernodes
        if count is None:
            _, sags_stats, index, sig = _sags_run(g, cfg.merge_config())
            count = sags_stats.supernodes
        if not 1 <= count <= g.n:
            raise UsageError(f"--supernodes must lie in [1, {g.n}]")
        s, stats = b_randomized(g, count, seed=cfg.seed)
    total_ms = (time.perf_counter() - t0) * 1e3
    blob = stats.to_dict()
    blob.update(
        index_time_ms=stats.index_time_ms,
        merge_time_ms=stats.merge_time_ms,
        total_time_ms=total_ms,
        cr=stats.final_cr,
        target_cr=cfg.target_cr,
        target_not_reached=not stats.reached,
        config=asdict(cfg),
    )
    write_summary(s, cfg.out, blob)
    if cfg.dump_index and index is not None:
        index.dump(cfg.out, sig)
    status = "reached" if stats.reached else "TARGET NOT REACHED"
    print(
        f"method={cfg.method} cr={stats.final_cr:.6f} target={cfg.target_cr} {status} "
        f"supernodes={stats.supernodes} superedges={stats.superedges} "
        f"index_ms={stats.index_time_ms:.2f} merge_ms={stats.merge_time_ms:.2f}"
    )
    return EXIT_OK if stats.reached else EXIT_NOT_REACHED


def cmd_evaluate(args) -> int:
    g = _load_graph(args.input, args.aggregate)
    loaded = read_summary(args.summary, g)
    if g.num_edges == 0:
        raise UsageError("original graph has no edges")
    cr = loaded.num_superedges / g.num_edges
    err = rmse(g, decompress(loaded))
    if args.json:
        print(json.dumps({"cr": cr, "rmse": err, "supernodes": loaded.num_supernodes,
                          "superedges": loaded.num_superedges}))
    else:
        print(f"cr={cr!r} rmse={err!r} supernodes={loaded.num_supernodes} superedges={loaded.num_superedges}")
    return EXIT_OK


def cmd_decompress(args) -> int:
    g = _load_graph(args.input, args.aggregate)
    h = decompress(read_summary(args.summary, g))
    if args.out in (None, "-"):
        write_edge_list(h, sys.stdout)
    else:
        write_edge_list(h, args.out)
    return EXIT_OK


def _grid_datasets(grid, base_dir):
    datasets = grid.get("datasets") or []
    if isinstance(datasets, (str, dict)):
        datasets = [datasets]
    for i, ds in enumerate(datasets):
        if isinstance(ds, str):
            ds = {"path": ds}
        if "path" in ds:
            path = ds["path"]
            if not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            yield ds.get("name", os.path.basename(path)), lambda p=path, a=ds.get("aggregate", "sum"): load_edge_list(p, a)
        elif "synthetic" in ds:
            params = dict(ds["synthetic"])
            name = ds.get("name", f"synthetic{i}")
            yield name, lambda p=params: generate_synthetic(**p)
        else:
            raise UsageError(f"dataset entry {i} needs 'path' or 'synthetic'")


def _grid_configs(grid):
    lsh = grid.get("lsh", {}) or {}
    b, r = int(lsh.get("b", 25)), int(lsh.get("r", 4))
    params = LshParams(k=b * r, b=b, r=r)
    thresholds = grid.get("thresholds")
    if thresholds is None:
        sims = grid.get("theta_sim", [0.5])
        ws = grid.get("theta_w", [0.0])
        sims = sims if isinstance(sims, list) else [sims]
        ws = ws if isinstance(ws, list) else [ws]
        thresholds = [{"theta_sim": s, "theta_w": w} for s in sims for w in ws]
    return [
        MergeConfig(theta_sim=float(t["theta_sim"]), theta_w=float(t["theta_w"]), lsh=params)
        for t in thresholds
    ]


def cmd_benchmark(args) -> int:
    with open(args.grid, encoding="utf-8") as fh:
        grid = yaml.safe_load(fh) or {}
    cr_grid = [float(x) for x in (grid.get("cr") or grid.get("cr_grid") or [])]
    if not cr_grid:
        raise UsageError("benchmark grid has no compression ratios")
    for cr in cr_grid:
        if not 0.0 < cr < 1.0:
            raise UsageError(f"target cr must lie in (0, 1), got {cr}")
    seeds = grid.get("seeds", [0])
    seeds = seeds if isinstance(seeds, list) else [seeds]
    methods = grid.get("methods") or ["sags", "isags", "randomized", "brandomized"]
    if "sags" in methods and "isags" not in methods:
        methods = list(methods) + ["isags"]
    configs = _grid_configs(grid)
    out = args.out or grid.get("out") or _default_out()
    os.makedirs(out, exist_ok=True)
    jobs = args.jobs or int(grid.get("jobs", 1))

    reports: list[EvalReport] = []
    failures = cells = 0
    for name, load in _grid_datasets(grid, os.path.dirname(os.path.abspath(args.grid))):
        for seed in seeds:
            cells += 1
            try:
                g = load()
                reports.extend(run_benchmark(g, cr_grid, configs, methods, seed=int(seed), dataset=name, jobs=jobs))
            except (OSError, ValueError) as exc:
                failures += 1
                print(f"benchmark cell {name} seed={seed} failed: {exc}", file=sys.stderr)
                for cr in cr_grid:
                    reports.append(EvalReport("failed", cr, float("nan"), False, None, 0.0, 0.0, 0.0, 0, 0, name, None, None, int(seed)))
    if cells == 0:
        raise UsageError("benchmark grid has no datasets")
    write_reports_csv(reports, os.path.join(out, "results.csv"))
    write_figure_csvs(reports, os.path.join(out, "time_vs_cr.csv"), os.path.join(out, "rmse_vs_cr.csv"))
    if args.json:
        with open(os.path.join(out, "results.json"), "w", encoding="utf-8") as fh:
            fh.write(reports_to_json(reports))
    print(f"wrote {len(reports)} rows to {os.path.join(out, 'results.csv')}")
    return EXIT_ERROR if failures == cells else EXIT_OK


def cmd_gen(args) -> int:
    g = generate_synthetic(
        args.n, n_blocks=args.blocks, p_block=args.p_block, p_share=args.p_share,
        p_keep=args.p_keep, weight_levels=args.weight_levels, weight_noise=args.weight_noise,
        seed=args.seed,
    )
    if args.out in (None, "-"):
        write_edge_list(g, sys.stdout)
    else:
        write_edge_list(g, args.out)
        print(f"wrote {g.num_edges} edges over {g.n} nodes to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_stats(args) -> int:
    g = _load_graph(args.input, args.aggregate)
    deg = g.degree()
    info = {
        "nodes": g.n,
        "edges": g.num_edges,
        "isolated": int(np.sum(deg == 0)),
        "degree_mean": float(deg.mean()) if g.n else 0.0,
        "degree_max": int(deg.max()) if g.n else 0,
        "weight_min": float(g.edge_w.min()) if g.num_edges else None,
        "weight_mean": float(g.edge_w.mean()) if g.num_edges else None,
        "weight_max": float(g.edge_w.max()) if g.num_edges else None,
    }
    print(json.dumps(info, indent=2))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # exit status 2 is reserved for target_not_reached
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wgsum", description="Weighted graph summarization")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("summarize", help="summarize a weighted edge list")
    p.add_argument("--in", dest="input")
    p.add_argument("--config")
    p.add_argument("--method", choices=["sags", "randomized", "brandomized"])
    p.add_argument("--cr", dest="target_cr", type=float)
    p.add_argument("--theta-sim", type=float)
    p.add_argument("--theta-w", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--supernodes", type=int, help="brandomized halt count (default: match SAGS)")
    p.add_argument("--aggregate", choices=["sum", "mean", "max"])
    p.add_argument("--out")
    p.add_argument("--dump-index", action="store_true", default=None)
    p.set_defaults(func=cmd_summarize)

    for name, func, helptext in (
        ("evaluate", cmd_evaluate, "report cr and RMSE of a written summary"),
        ("decompress", cmd_decompress, "expand a written summary into an edge list"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--in", dest="input", required=True, help="original edge list")
        p.add_argument("--summary", required=True, help="directory holding membership.txt/superedges.txt")
        p.add_argument("--aggregate", default="sum", choices=["sum", "mean", "max"])
        if name == "evaluate":
            p.add_argument("--json", action="store_true")
        else:
            p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("benchmark", help="run a cr sweep described by a grid file")
    p.add_argument("--grid", required=True)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("gen", help="generate a planted-block synthetic graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--blocks", type=int, default=10)
    p.add_argument("--p-block", type=float, default=0.2)
    p.add_argument("--p-share", type=float, default=1.0)
    p.add_argument("--p-keep", type=float, default=0.5)
    p.add_argument("--weight-levels", type=int, default=5)
    p.add_argument("--weight-noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("stats", help="print graph statistics")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--aggregate", default="sum", choices=["sum", "mean", "max"])
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, EdgeListParseError, SummaryFileError, OSError, ValueError) as exc:
        print(f"wgsum {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
