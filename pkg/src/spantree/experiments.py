"""Monte Carlo sweeps over G(n, p) (or K_n minus a sparse subgraph), emitted as CSV.

Each trial is a pure function of (config, p index, trial index): its seed is
derived from the master seed, so the CSV is byte-identical however the trials are
spread over worker processes.
"""

from __future__ import annotations

import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, TextIO

from statsmodels.stats.proportion import proportion_confint

from .embedders import embed_tree
from .graph_core import (
    Graph,
    complete_minus_bounded_subgraph,
    derive_seed,
    gnp_sample,
    high_regime_cutoff,
    min_degree,
    regime_params,
)
from .oracle import OracleStatus, has_dominating_set_of_size
from .trees import Tree, build_extremal, random_tree_bounded_degree

MODES = ("dominating-set", "embed-broom", "embed-random-tree", "min-degree")
HOSTS = ("gnp", "complete-minus")
CSV_HEADER = "p,trial,seed,outcome,min_degree,max_nonneighbors,elapsed_ms"
THREADS_ENV = "SPANTREE_THREADS"


def core_size(n: int, delta_max: int) -> int:
    """k = ceil((n-1)/Δ), the size of the broom's dominating core."""
    return math.ceil((n - 1) / delta_max)


def threshold_probabilities(n: int, k: int, eps: float) -> tuple[float, float]:
    """(p-, p+) = (1 - n^(-(1-ε)/k), 1 - n^(-(1+2ε)/k))."""
    return 1 - n ** (-(1 - eps) / k), 1 - n ** (-(1 + 2 * eps) / k)


def expected_nonneighbors(n: int, p: float) -> float:
    """E[X_v] = 1 + (n-1)(1-p): non-neighbours of v in G(n, p), v itself included."""
    return 1 + (n - 1) * (1 - p)


def expected_dominating_pairs(n: int, p: float) -> float:
    """First moment C(n,2) (1-q^2)^(n-2) of the number of dominating pairs, q = 1-p."""
    q = 1 - p
    return math.comb(n, 2) * (1 - q * q) ** (n - 2)


@dataclass(frozen=True)
class SweepConfig:
    n: int
    delta_max: int
    eps: float
    trials: int
    seed: int
    mode: str
    p_grid: tuple[float, ...] = ()
    c_const: float | None = None
    mu: float | None = None
    k: int | None = None
    host: str = "gnp"
    timing: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.host not in HOSTS:
            raise ValueError(f"host must be one of {HOSTS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n < 3:
            raise ValueError("n must be >= 3")
        if not 1 <= self.delta_max <= self.n - 1:
            raise ValueError("delta must lie in [1, n-1]")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if not self.p_grid:
            raise ValueError("empty p grid")
        if any(not 0.0 <= p <= 1.0 for p in self.p_grid):
            raise ValueError("probabilities must lie in [0, 1]")

    @property
    def core_k(self) -> int:
        return self.k if self.k is not None else core_size(self.n, self.delta_max)

    def removal_degree(self) -> int:
        """Max degree of the subgraph removed from K_n: floor of the deficiency bound
        for the regime the dispatcher would pick."""
        regime = "high" if self.delta_max >= high_regime_cutoff(self.n) else "low"
        return math.floor(regime_params(self.n, self.delta_max, self.eps, self.c_const, self.mu, regime).deficiency)


def derived_grid(n: int, k: int, eps: float) -> tuple[float, float, float]:
    lo, hi = threshold_probabilities(n, k, eps)
    return lo, (lo + hi) / 2, hi


# Acceptance bars for the threshold presets (<= 10% below, >= 90% above) follow
# from the first moment: at n=400, k=2, ε=0.6 the expected number of dominating
# pairs is ~2.6e-12 at p- and ~8e4 at p+.
PRESETS: dict[str, dict] = {
    "thm13-k2": dict(n=400, delta_max=200, eps=0.6, trials=100, seed=2024, mode="dominating-set", grid="derived"),
    "cor12-mindeg": dict(n=400, delta_max=200, eps=0.6, trials=100, seed=2024, mode="min-degree", grid="p_plus"),
    "embed-lowrange": dict(
        n=500, delta_max=100, eps=1.0, trials=100, seed=2024, mode="embed-broom", host="complete-minus", grid="one"
    ),
    "embed-lowrange-tree": dict(
        n=500, delta_max=100, eps=1.0, trials=100, seed=2024, mode="embed-random-tree", host="complete-minus", grid="one"
    ),
}


def preset_config(name: str, **overrides) -> SweepConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    settings = dict(PRESETS[name])
    settings.update({k: v for k, v in overrides.items() if v is not None})
    grid = settings.pop("grid")
    if "p_grid" not in settings:
        k = settings.get("k") or core_size(settings["n"], settings["delta_max"])
        if grid == "derived":
            settings["p_grid"] = derived_grid(settings["n"], k, settings["eps"])
        elif grid == "p_plus":
            settings["p_grid"] = (threshold_probabilities(settings["n"], k, settings["eps"])[1],)
        else:
            settings["p_grid"] = (1.0,)
    settings["p_grid"] = tuple(settings["p_grid"])
    return SweepConfig(**settings)


@dataclass
class SweepRow:
    p: float
    trial: int
    seed: int
    outcome: str  # "1", "0" or "?" (oracle budget exhausted)
    min_degree: int
    max_nonneighbors: int
    elapsed_ms: float
    mean_nonneighbors: float = field(default=0.0, compare=False)

    def csv(self) -> str:
        return f"{self.p!r},{self.trial},{self.seed},{self.outcome},{self.min_degree},{self.max_nonneighbors},{self.elapsed_ms:.1f}"


@dataclass
class SweepSummary:
    p: float
    trials: int
    successes: int
    unknown: int
    fraction: float
    wilson_low: float
    wilson_high: float
    mean_nonneighbors: float

    def csv(self) -> str:
        return (
            f"#summary,p={self.p!r},trials={self.trials},successes={self.successes},unknown={self.unknown},"
            f"fraction={self.fraction:.4f},wilson_low={self.wilson_low:.4f},wilson_high={self.wilson_high:.4f},"
            f"mean_nonneighbors={self.mean_nonneighbors:.6f}"
        )


def trial_instance(config: SweepConfig, p_index: int, trial: int) -> tuple[int, Graph, Tree | None]:
    """(seed, host, tree) for one trial; the tree is None outside the embedding modes."""
    seed = derive_seed(config.seed, p_index, trial)
    n = config.n
    if config.host == "gnp":
        g = gnp_sample(n, config.p_grid[p_index], seed)
    else:
        g = complete_minus_bounded_subgraph(n, config.removal_degree(), seed)
    if config.mode == "embed-broom":
        t = build_extremal(n, config.delta_max)[0]
    elif config.mode == "embed-random-tree":
        t = random_tree_bounded_degree(n, config.delta_max, derive_seed(seed, 1))
    else:
        t = None
    return seed, g, t


def embed_trial(config: SweepConfig, seed: int, g: Graph, t: Tree):
    """embed_tree as the sweep runs it: no exact fallback."""
    return embed_tree(g, t, config.eps, config.c_const, config.mu, seed=derive_seed(seed, 2), use_oracle=False)


def run_trial(config: SweepConfig, p_index: int, trial: int) -> SweepRow:
    start = time.perf_counter()
    seed, g, t = trial_instance(config, p_index, trial)
    n = config.n
    delta = min_degree(g)
    mean_x = n - 2 * g.num_edges / n

    if config.mode == "dominating-set":
        status, _ = has_dominating_set_of_size(g, config.core_k)
        outcome = {OracleStatus.FOUND: "1", OracleStatus.ABSENT: "0"}.get(status, "?")
    elif config.mode == "min-degree":
        bound = n ** (1 - (1 + config.eps) / config.core_k)
        outcome = "1" if delta >= n - bound else "0"
    else:
        emb, _ = embed_trial(config, seed, g, t)
        outcome = "1" if emb is not None else "0"

    elapsed = (time.perf_counter() - start) * 1000 if config.timing else 0.0
    return SweepRow(config.p_grid[p_index], trial, seed, outcome, delta, n - delta, elapsed, mean_x)


def _worker(args: tuple[SweepConfig, int, int]) -> SweepRow:
    return run_trial(*args)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def run_sweep(config: SweepConfig, workers: int | None = None) -> Iterator[SweepRow]:
    """All rows, ordered by (p index, trial) regardless of ``workers``."""
    workers = worker_count() if workers is None else workers
    tasks = [(config, i, j) for i in range(len(config.p_grid)) for j in range(config.trials)]
    if workers <= 1:
        for task in tasks:
            yield _worker(task)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_worker, tasks, chunksize=max(1, len(tasks) // (4 * workers)))


def summarize(p: float, rows: list[SweepRow]) -> SweepSummary:
    known = [r for r in rows if r.outcome != "?"]
    succ = sum(r.outcome == "1" for r in known)
    if known:
        lo, hi = proportion_confint(succ, len(known), alpha=0.05, method="wilson")
        frac = succ / len(known)
    else:
        lo, hi, frac = 0.0, 1.0, float("nan")
    mean_x = sum(r.mean_nonneighbors for r in rows) / len(rows)
    return SweepSummary(p, len(rows), succ, len(rows) - len(known), frac, float(lo), float(hi), mean_x)


def monotonicity_flags(summaries: list[SweepSummary]) -> list[str]:
    """Adjacent grid points where the success fraction drops by more than 2 sigma."""
    flags = []
    for a, b in zip(summaries, summaries[1:]):
        if b.p < a.p or math.isnan(a.fraction) or math.isnan(b.fraction):
            continue
        sigma = math.sqrt(a.fraction * (1 - a.fraction) / a.trials + b.fraction * (1 - b.fraction) / b.trials)
        if a.fraction - b.fraction > 2 * sigma and a.fraction > b.fraction:
            flags.append(f"success fraction drops from {a.fraction:.3f} at p={a.p:.6g} to {b.fraction:.3f} at p={b.p:.6g}")
    return flags


def write_sweep(config: SweepConfig, out: TextIO, workers: int | None = None, err: TextIO | None = None) -> list[SweepSummary]:
    """Stream the CSV for ``config`` to ``out``; returns the per-p summaries."""
    out.write(CSV_HEADER + "\n")
    summaries = []
    current: list[SweepRow] = []
    for row in run_sweep(config, workers):
        current.append(row)
        out.write(row.csv() + "\n")
        if len(current) == config.trials:
            s = summarize(row.p, current)
            summaries.append(s)
            out.write(s.csv() + "\n")
            current = []
    if config.mode == "dominating-set":
        for flag in monotonicity_flags(summaries):
            print(f"warning: {flag}", file=err or sys.stderr)
    return summaries


def parse_grid(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def with_overrides(config: SweepConfig, **kw) -> SweepConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})


def iter_csv_rows(lines: Iterable[str]) -> Iterator[list[str]]:
    for line in lines:
        if line.startswith("#") or line.startswith("p,"):
            continue
        yield line.rstrip("\n").split(",")
