"""Monte Carlo estimation of the consensus probability.

Trial ``k`` of an experiment seeded with ``seed`` draws everything (initial
opinions, then selections) from a Philox stream keyed by ``(seed, k)``. Trials
are therefore independent of scheduling, and the aggregate is a sum of
integers, so reports are bit-identical for any worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from .dynamics import init_opinions, potential_floor, run_to_absorption
from .errors import AbsorptionTimeout, ParameterError
from .graph import Graph
from .theory import BoundReport, consensus_bound, validate_absorbed_state

THREADS_ENV = "MAJSIM_THREADS"
_U64 = (1 << 64) - 1


def default_workers():
    """``MAJSIM_THREADS`` if set, else the CPU count."""
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def trial_rng(seed, index):
    """Counter-based stream for one trial: Philox keyed by ``(seed, index)``."""
    return np.random.Generator(np.random.Philox(key=(int(index) << 64) | (int(seed) & _U64)))


def wilson_interval(successes, trials, confidence=0.95):
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    freq = successes / trials
    return min(float(ci.low), freq), max(float(ci.high), freq)


@dataclass(frozen=True)
class ExperimentConfig:
    graph_spec: object  # GraphSpec or Graph
    p: float
    trials: int
    seed: int = 0
    max_steps: int | None = None
    record_z_trace: bool = False
    confidence: float = 0.95
    graph_id: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be at least 1")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError(f"p must lie in [0, 1], got {self.p}")
        if not 0 <= self.seed <= _U64:
            raise ParameterError("seed must be an unsigned 64-bit integer")

    def graph(self):
        if isinstance(self.graph_spec, Graph):
            return self.graph_spec
        return self.graph_spec.build()

    @property
    def label(self):
        if self.graph_id is not None:
            return self.graph_id
        return getattr(self.graph_spec, "label", "graph")


@dataclass
class EstimateReport:
    graph_id: str
    n: int
    edge_count: int
    p: float
    seed: int
    trials: int
    consensus_count: int
    consensus_frequency: float
    wilson_low: float
    wilson_high: float
    confidence: float
    mean_absorption_steps: float | None
    mean_flips: float | None
    timeouts: int

    def to_dict(self):
        return dict(self.__dict__)


def _run_block(graph, config, start, stop):
    """Sum trial outcomes over trial indices ``[start, stop)``."""
    floor = potential_floor(graph)
    wins = steps = flips = timeouts = 0
    for k in range(start, stop):
        rng = trial_rng(config.seed, k)
        x0 = init_opinions(graph.n, config.p, rng)
        try:
            rec = run_to_absorption(graph, x0, rng, config.max_steps,
                                    record=config.record_z_trace)
        except AbsorptionTimeout:
            timeouts += 1
            continue
        if not validate_absorbed_state(graph, rec.final):
            raise AssertionError(f"trial {k}: final state is not absorbing")
        if rec.consensus != (rec.z_final == floor):
            raise AssertionError(f"trial {k}: consensus flag disagrees with potential floor")
        wins += rec.consensus
        steps += rec.steps_to_absorption
        flips += rec.flips
    return wins, steps, flips, timeouts


def estimate(config, workers=None):
    graph = config.graph()
    workers = default_workers() if workers is None else max(1, int(workers))
    nblocks = min(config.trials, 4 * workers)
    edges = np.linspace(0, config.trials, nblocks + 1).astype(int)
    blocks = list(zip(edges[:-1], edges[1:]))
    if workers == 1:
        parts = [_run_block(graph, config, a, b) for a, b in blocks]
    else:
        _run_block(graph, config, 0, 0)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: _run_block(graph, config, *ab), blocks))
    wins, steps, flips, timeouts = (int(sum(col)) for col in zip(*parts))
    done = config.trials - timeouts
    freq = wins / config.trials
    low, high = wilson_interval(wins, config.trials, config.confidence)
    return EstimateReport(
        graph_id=config.label,
        n=graph.n,
        edge_count=graph.edge_count,
        p=float(config.p),
        seed=int(config.seed),
        trials=config.trials,
        consensus_count=wins,
        consensus_frequency=freq,
        wilson_low=low,
        wilson_high=high,
        confidence=config.confidence,
        mean_absorption_steps=steps / done if done else None,
        mean_flips=flips / done if done else None,
        timeouts=timeouts,
    )


def point_seed(seed, index):
    """Independent seed for grid point ``index`` of a sweep."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0])


def sweep(graph_spec, p_grid, trials, seed=0, max_steps=None, confidence=0.95,
          slack=None, workers=None, graph_id=None):
    """Estimate the consensus probability on a grid of ``p`` and compare with the bound.

    A point is satisfied when ``wilson_low >= bound - slack``; ``slack``
    defaults to that point's interval width.
    """
    p_grid = list(p_grid)
    if not p_grid:
        raise ParameterError("p_grid must not be empty")
    graph = graph_spec if isinstance(graph_spec, Graph) else graph_spec.build()
    label = graph_id or getattr(graph_spec, "label", "graph")
    reports = []
    for k, p in enumerate(p_grid):
        cfg = ExperimentConfig(graph, float(p), trials, point_seed(seed, k), max_steps,
                               confidence=confidence, graph_id=label)
        est = estimate(cfg, workers=workers)
        bound = consensus_bound(float(p), graph.edge_count)
        room = est.wilson_high - est.wilson_low if slack is None else slack
        reports.append(BoundReport(
            graph_id=label,
            n=graph.n,
            edge_count=graph.edge_count,
            p=float(p),
            bound=bound,
            exact_or_estimated=est.consensus_frequency,
            method="mc",
            satisfied=est.wilson_low >= bound - room - 1e-12,
            wilson_low=est.wilson_low,
            wilson_high=est.wilson_high,
            mean_absorption_steps=est.mean_absorption_steps,
            mean_flips=est.mean_flips,
            timeouts=est.timeouts,
        ))
    return reports


def parse_grid(text):
    """``"0.05:0.95:0.05"`` -> [0.05, 0.1, ..., 0.95], endpoints inclusive, rounded to 12 places."""
    parts = [float(t) for t in text.split(":")]
    if len(parts) == 1:
        return parts
    if len(parts) != 3 or parts[2] <= 0:
        raise ParameterError(f"grid must be START:STOP:STEP with STEP > 0, got {text!r}")
    start, stop, step = parts
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]
