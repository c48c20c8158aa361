"""Majority-based imitation dynamics.

At every tick an agent ``i`` is drawn uniformly from the vertices and a
neighbour ``j`` uniformly from ``N_i``. Agent ``i`` copies ``j`` exactly when
``j`` disagrees with ``i`` and strictly more of ``i``'s neighbours hold ``j``'s
opinion than ``i``'s own. Ties never flip.

Opinion vectors are int8 numpy arrays over {+1, -1}. Each tick consumes two
uniform doubles from the caller's ``numpy.random.Generator``; :func:`step` and
:func:`run_to_absorption` consume them identically, so a run can be replayed
one tick at a time from the same stream.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import AbsorptionTimeout, AdjacencyError, ParameterError

MAX_STEPS_PER_VERTEX = 10**6
_FIRST_CHUNK = 256
_MAX_CHUNK = 1 << 16


@dataclass(frozen=True)
class StepOutcome:
    agent: int
    neighbor: int
    flipped: bool
    z_decrement: int


@dataclass
class FlipLog:
    """Flips of one recorded trajectory; ``step`` is the 0-based tick index."""

    step: np.ndarray
    agent: np.ndarray
    neighbor: np.ndarray
    agree_before: np.ndarray
    disagree_before: np.ndarray

    def __len__(self):
        return len(self.step)

    @property
    def z_decrement(self):
        return 2 * (self.disagree_before - self.agree_before)


@dataclass
class RunRecord:
    initial: np.ndarray
    final: np.ndarray
    steps_to_absorption: int
    flips: int
    consensus: bool
    z_initial: int
    z_final: int
    absorbed: bool = True
    z_trace: np.ndarray | None = None
    flip_log: FlipLog | None = None

    def to_dict(self):
        out = {
            "initial": format_opinions(self.initial),
            "final": format_opinions(self.final),
            "steps_to_absorption": self.steps_to_absorption,
            "flips": self.flips,
            "consensus": self.consensus,
            "z_initial": self.z_initial,
            "z_final": self.z_final,
            "absorbed": self.absorbed,
        }
        if self.z_trace is not None:
            out["z_trace"] = [int(z) for z in self.z_trace]
        return out


def parse_opinions(text):
    """``"++--"`` -> ``array([1, 1, -1, -1])``."""
    text = text.strip()
    if not text or set(text) - {"+", "-"}:
        raise ParameterError(f"opinion string must be non-empty '+'/'-' only: {text!r}")
    return np.array([1 if c == "+" else -1 for c in text], dtype=np.int8)


def format_opinions(x):
    return "".join("+" if v > 0 else "-" for v in x)


def as_opinions(graph, x):
    """Validate ``x`` against ``graph`` and return it as an int8 array copy."""
    if isinstance(x, str):
        x = parse_opinions(x)
    arr = np.asarray(x)
    if arr.shape != (graph.n,):
        raise ParameterError(f"expected {graph.n} opinions, got shape {arr.shape}")
    if not np.all((arr == 1) | (arr == -1)):
        raise ParameterError("opinions must be +1 or -1")
    return arr.astype(np.int8)


def init_opinions(n, p, rng):
    """Independent Bernoulli(p) opinions: +1 with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    return np.where(rng.random(n) < p, 1, -1).astype(np.int8)


def opinion_counts(graph, x, i):
    """``(agree, disagree)`` neighbour counts of vertex ``i``."""
    nbrs = list(graph.neighbors(i))
    agree = int(np.count_nonzero(x[nbrs] == x[i]))
    return agree, len(nbrs) - agree


def would_flip(graph, x, i, j):
    if not graph.has_edge(i, j):
        raise AdjacencyError(f"vertex {j} is not a neighbour of {i}")
    if x[j] == x[i]:
        return False
    agree, disagree = opinion_counts(graph, x, i)
    return disagree > agree


def potential_floor(graph):
    """Value of the potential at consensus: ``n(n-1) - 2|E|``."""
    return graph.n * (graph.n - 1) - 2 * graph.edge_count


def potential_Z(graph, x):
    """Ordered pairs ``i != j`` that disagree or are not adjacent."""
    x = np.asarray(x)
    hit = (x[:, None] != x[None, :]) | ~graph.matrix
    np.fill_diagonal(hit, False)
    return int(np.count_nonzero(hit))


def is_consensus(x):
    x = np.asarray(x)
    return bool(np.all(x == x[0]))


def unstable_vertices(graph, x):
    x = np.asarray(x)
    disagree = ((x[:, None] != x[None, :]) & graph.matrix).sum(axis=1)
    return np.flatnonzero(2 * disagree > graph.degrees)


def is_absorbing(graph, x):
    """True when no selection can cause a flip (every vertex weakly agrees)."""
    return unstable_vertices(graph, x).size == 0


def _select(graph, u):
    n = graph.n
    i = min(int(u[0] * n), n - 1)
    nbrs = graph.neighbors(i)
    if not nbrs:
        return i, None
    return i, nbrs[min(int(u[1] * len(nbrs)), len(nbrs) - 1)]


def step(graph, x, rng):
    """Advance one tick; returns ``(new_state, StepOutcome)``. ``x`` is not modified."""
    x = as_opinions(graph, x)
    i, j = _select(graph, rng.random(2))
    if j is None:
        return x, StepOutcome(i, i, False, 0)
    agree, disagree = opinion_counts(graph, x, i)
    if x[j] != x[i] and disagree > agree:
        new = x.copy()
        new[i] = x[j]
        return new, StepOutcome(i, j, True, 2 * (disagree - agree))
    return x, StepOutcome(i, j, False, 0)


def _empty_log(size):
    return tuple(np.zeros(size, dtype=np.int64) for _ in range(5))


def run_to_absorption(graph, x0, rng, max_steps=None, record=False):
    """Step until no vertex can flip.

    ``steps_to_absorption`` counts every tick (null selections included) up
    to and including the flip that entered the absorbing state; a state that
    is already absorbing returns after zero ticks without touching ``rng``.
    With ``record=True`` the record carries the full potential trace
    (``z_trace[0]`` is the initial value) and a :class:`FlipLog`.

    Raises :class:`AbsorptionTimeout` after ``max_steps`` ticks (default
    ``10**6 * n``), carrying the partial record.
    """
    if max_steps is None:
        max_steps = MAX_STEPS_PER_VERTEX * graph.n
    if max_steps <= 0:
        raise ParameterError("max_steps must be positive")
    x0 = as_opinions(graph, x0)
    x = x0.copy()
    indptr, indices = graph.csr
    agree = np.empty(graph.n, dtype=np.int64)
    disagree = np.empty(graph.n, dtype=np.int64)
    unstable = kernels.init_counts(indptr, indices, x, agree, disagree)
    z0 = potential_floor(graph) + int(disagree.sum())
    z = z0
    steps = 0
    flips = 0
    traces = [np.array([z0], dtype=np.int64)] if record else []
    logs = []
    chunk = _FIRST_CHUNK
    empty = _empty_log(0)
    while unstable and steps < max_steps:
        size = min(chunk, max_steps - steps)
        draws = rng.random((size, 2))
        log = _empty_log(size) if record else empty
        trace = np.empty(size, dtype=np.int64) if record else empty[0]
        used, nflip, z, unstable = kernels.advance(
            indptr, indices, x, agree, disagree, draws, z, True, *log, trace
        )
        if record:
            traces.append(trace[:used])
            flip_step = log[0][:nflip] + steps
            logs.append((flip_step,) + tuple(a[:nflip] for a in log[1:]))
        steps += used
        flips += nflip
        chunk = min(2 * chunk, _MAX_CHUNK)

    rec = RunRecord(
        initial=x0,
        final=x,
        steps_to_absorption=steps,
        flips=flips,
        consensus=is_consensus(x),
        z_initial=z0,
        z_final=int(z),
        absorbed=unstable == 0,
    )
    if record:
        rec.z_trace = np.concatenate(traces)
        if logs:
            rec.flip_log = FlipLog(*(np.concatenate(cols) for cols in zip(*logs)))
        else:
            rec.flip_log = FlipLog(*_empty_log(0))
        if np.any(np.diff(rec.z_trace) > 0):
            t = int(np.argmax(np.diff(rec.z_trace) > 0))
            raise AssertionError(f"potential increased at tick {t}: {rec.z_trace[t:t + 2]}")
    if unstable:
        raise AbsorptionTimeout(
            f"no absorption within {max_steps} ticks (n={graph.n})", record=rec
        )
    return rec


def simulate_steps(graph, x0, rng, steps):
    """Run exactly ``steps`` ticks, continuing past absorption.

    Returns ``(final_state, flip_log, ever_consensus)``; ``ever_consensus``
    says whether any visited state was a consensus, found by replaying the
    flips on a copy of ``x0``.
    """
    x = as_opinions(graph, x0)
    indptr, indices = graph.csr
    agree = np.empty(graph.n, dtype=np.int64)
    disagree = np.empty(graph.n, dtype=np.int64)
    kernels.init_counts(indptr, indices, x, agree, disagree)
    z = potential_floor(graph) + int(disagree.sum())
    logs = []
    done = 0
    empty = _empty_log(0)
    while done < steps:
        size = min(_MAX_CHUNK, steps - done)
        draws = rng.random((size, 2))
        log = _empty_log(size)
        _, nflip, z, _ = kernels.advance(
            indptr, indices, x, agree, disagree, draws, z, False, *log, empty[0]
        )
        logs.append((log[0][:nflip] + done,) + tuple(a[:nflip] for a in log[1:]))
        done += size
    flip_log = FlipLog(*(np.concatenate(c) for c in zip(*logs))) if logs else FlipLog(*empty)

    replay = as_opinions(graph, x0)
    plus = int(np.count_nonzero(replay == 1))
    ever = plus in (0, graph.n)
    for i in flip_log.agent:
        replay[i] = -replay[i]
        plus += int(replay[i])
        ever = ever or plus in (0, graph.n)
    return x, flip_log, ever
