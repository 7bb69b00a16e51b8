"""Command-line front end: sweep, embed, gen, dichotomy, oracle."""

from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path
from typing import Sequence, TextIO

from .embedders import embed_tree
from .experiments import MODES, PRESETS, SweepConfig, derived_grid, core_size, parse_grid, preset_config, write_sweep
from .graph_core import Graph, GraphFormatError, RegimeError, gnp_sample, graph_from_edge_list, min_degree
from .oracle import OracleStatus, contains_spanning_tree, has_dominating_set_of_size
from .trees import (
    BarePathSet,
    Tree,
    TreeError,
    TreeGenerationError,
    build_extremal,
    dichotomy,
    random_tree_bounded_degree,
    tree_from_edge_list,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2
EXIT_UNKNOWN = 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(path: str) -> Graph:
    try:
        return graph_from_edge_list(_read(path))
    except GraphFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_tree(path: str) -> Tree:
    try:
        return tree_from_edge_list(_read(path))
    except (GraphFormatError, TreeError) as exc:
        raise InputError(f"{path}: {exc}") from None


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=float, default=None, help="ε (default 1.0, or the preset's)")
    p.add_argument("--cconst", type=float, default=None, help="constant C (default max(12, 2/ε))")
    p.add_argument("--mu", type=float, default=None, help="μ (default min(ε/10, 0.1))")
    p.add_argument("--seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spantree", description="Spanning trees in dense graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="Monte Carlo sweep over p, written as CSV")
    sw.add_argument("--preset", choices=sorted(PRESETS))
    sw.add_argument("--mode", choices=MODES)
    sw.add_argument("--n", type=int)
    sw.add_argument("--delta", type=int)
    sw.add_argument("--k", type=int, help="dominating-set size (default ceil((n-1)/Δ))")
    sw.add_argument("--trials", type=int)
    sw.add_argument("--host", choices=("gnp", "complete-minus"))
    grid = sw.add_mutually_exclusive_group()
    grid.add_argument("--p", type=float, help="single edge probability")
    grid.add_argument("--p-grid", help="comma-separated probabilities (default p-, midpoint, p+)")
    sw.add_argument("--timing", action="store_true", help="record wall-clock elapsed_ms (breaks byte reproducibility)")
    sw.add_argument("--out")
    _add_params(sw)

    em = sub.add_parser("embed", help="embed a spanning tree into a graph")
    em.add_argument("graph")
    em.add_argument("tree")
    em.add_argument("--retries", type=int, default=50)
    em.add_argument("--no-oracle", action="store_true", help="skip the exact fallback")
    em.add_argument("--oracle-limit", type=int, default=16)
    em.add_argument("--strict", action="store_true", help="demand the deficiency bounds of the regime embedders")
    em.add_argument("--out")
    _add_params(em)

    gen = sub.add_parser("gen", help="write a graph or tree as an edge list")
    gen.add_argument("kind", choices=("gnp", "broom", "random-tree", "path"))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float)
    gen.add_argument("--delta", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")

    di = sub.add_parser("dichotomy", help="leaves versus bare paths for a tree")
    di.add_argument("tree")
    di.add_argument("--k", type=int, required=True)
    di.add_argument("--ell", type=int, required=True)

    orc = sub.add_parser("oracle", help="exact containment or dominating-set search")
    orc.add_argument("graph")
    orc.add_argument("tree", nargs="?")
    orc.add_argument("--dominating", type=int, metavar="K", help="look for a dominating set of size K instead")
    orc.add_argument("--node-limit", type=int, default=2_000_000)
    orc.add_argument("--out")
    return parser


def _sweep_config(args) -> SweepConfig:
    overrides = dict(
        n=args.n, delta_max=args.delta, eps=args.eps, c_const=args.cconst, mu=args.mu,
        trials=args.trials, seed=args.seed, mode=args.mode, k=args.k, host=args.host,
    )
    if args.p is not None:
        overrides["p_grid"] = (args.p,)
    elif args.p_grid:
        overrides["p_grid"] = parse_grid(args.p_grid)
    if args.preset:
        cfg = preset_config(args.preset, **overrides)
    else:
        missing = [f for f in ("n", "delta", "mode") if getattr(args, f) is None]
        if missing:
            raise InputError("without --preset, sweep needs " + ", ".join("--" + m for m in missing))
        settings = {k: v for k, v in overrides.items() if v is not None}
        settings.setdefault("eps", 1.0)
        settings.setdefault("trials", 100)
        settings.setdefault("seed", 0)
        if "p_grid" not in settings:
            settings["p_grid"] = derived_grid(settings["n"], settings.get("k") or core_size(settings["n"], settings["delta_max"]), settings["eps"])
        cfg = SweepConfig(**settings)
    if args.timing:
        cfg = SweepConfig(**{**cfg.__dict__, "timing": True})
    return cfg


def cmd_sweep(args, err: TextIO) -> int:
    cfg = _sweep_config(args)
    with _output(args.out) as out:
        summaries = write_sweep(cfg, out, err=err)
    for s in summaries:
        print(f"p={s.p:.6g} success={s.successes}/{s.trials - s.unknown} [{s.wilson_low:.3f}, {s.wilson_high:.3f}]", file=err)
    return EXIT_OK


def cmd_embed(args, err: TextIO) -> int:
    g = _load_graph(args.graph)
    t = _load_tree(args.tree)
    if g.n != t.n:
        raise InputError(f"tree has {t.n} vertices but graph has {g.n}")
    emb, report = embed_tree(
        g, t,
        eps=1.0 if args.eps is None else args.eps,
        c_const=args.cconst, mu=args.mu,
        seed=args.seed or 0,
        retries=args.retries,
        oracle_limit=args.oracle_limit,
        use_oracle=not args.no_oracle,
        strict=args.strict,
    )
    print(report.summary(), file=err)
    if emb is None:
        return EXIT_FAILED
    with _output(args.out) as out:
        for x, v in sorted(emb.items()):
            out.write(f"{x} {v}\n")
    return EXIT_OK


def cmd_gen(args, err: TextIO) -> int:
    n = args.n
    if args.kind == "gnp":
        if args.p is None:
            raise InputError("gnp needs --p")
        if n < 1 or not 0 <= args.p <= 1:
            raise InputError("gnp needs n >= 1 and p in [0, 1]")
        g = gnp_sample(n, args.p, args.seed)
        text = g.to_edge_list()
        stats = f"n={n} edges={g.num_edges} min_degree={min_degree(g)}"
    else:
        if args.kind == "path":
            if n < 1:
                raise InputError("path needs n >= 1")
            t = Tree.path(n)
            extra = ""
        else:
            if args.delta is None:
                raise InputError(f"{args.kind} needs --delta")
            if not 2 <= args.delta <= n - 1:
                raise InputError("delta must lie in [2, n-1]")
            if args.kind == "broom":
                t, core = build_extremal(n, args.delta)
                extra = f" k={len(core)}"
            else:
                t = random_tree_bounded_degree(n, args.delta, args.seed)
                extra = ""
        text = t.to_edge_list()
        stats = f"n={n} edges={n - 1} max_degree={t.max_degree} leaves={len(t.leaves())}{extra}"
    with _output(args.out) as out:
        out.write(text)
    print(stats, file=err if args.out is None else sys.stdout)
    return EXIT_OK


def cmd_dichotomy(args, err: TextIO) -> int:
    t = _load_tree(args.tree)
    if args.k < 1 or args.ell < 1:
        raise InputError("k and ell must be positive")
    if t.n < 2:
        print("branch=leaves count=0 (single vertex)")
        return EXIT_OK
    res = dichotomy(t, args.k, args.ell)
    if isinstance(res, BarePathSet):
        print(f"branch=bare_paths length={res.length} count={len(res)}")
        for path in res.paths:
            print(" ".join(map(str, path)))
    else:
        print(f"branch=leaves count={len(res)}")
        print(" ".join(map(str, res.leaves)))
    return EXIT_OK


def cmd_oracle(args, err: TextIO) -> int:
    g = _load_graph(args.graph)
    if args.dominating is not None:
        status, witness = has_dominating_set_of_size(g, args.dominating)
        print(status.value)
        if witness is not None:
            print(" ".join(map(str, witness)))
    else:
        if args.tree is None:
            raise InputError("oracle needs a tree file or --dominating")
        t = _load_tree(args.tree)
        if g.n != t.n:
            raise InputError(f"tree has {t.n} vertices but graph has {g.n}")
        status, emb = contains_spanning_tree(g, t, node_limit=args.node_limit)
        print(status.value, file=err)
        if emb is not None:
            with _output(args.out) as out:
                for x, v in sorted(emb.items()):
                    out.write(f"{x} {v}\n")
    return {OracleStatus.FOUND: EXIT_OK, OracleStatus.ABSENT: EXIT_FAILED}.get(status, EXIT_UNKNOWN)


COMMANDS = {"sweep": cmd_sweep, "embed": cmd_embed, "gen": cmd_gen, "dichotomy": cmd_dichotomy, "oracle": cmd_oracle}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    err = sys.stderr
    try:
        return COMMANDS[args.command](args, err)
    except (InputError, ValueError, RegimeError, TreeError, TreeGenerationError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
