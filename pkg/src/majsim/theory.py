"""Closed-form consensus bound, blocked configurations and state validators."""
from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

from .dynamics import as_opinions, simulate_steps, unstable_vertices
from .exact import exact_consensus_probability

CSV_COLUMNS = (
    "graph_id", "n", "m", "p", "bound", "exact_or_estimate", "method", "satisfied",
)
MC_COLUMNS = ("wilson_low", "wilson_high", "mean_absorption_steps", "mean_flips")


def consensus_bound(p, edge_count):
    """Lower bound ``1 - 2 p (1 - p) |E|`` on the consensus probability.

    Returned unclamped; values at or below zero carry no information.
    """
    return 1.0 - 2.0 * p * (1.0 - p) * edge_count


def corollary_holds(p, edge_count, tol=1e-12):
    """Check the small-``p`` consequence of the bound.

    For ``p <= 1/(2|E|)`` the bound is at least ``1/(2|E|)`` (equality at the
    threshold, hence ``tol``); larger ``p`` makes no claim and returns True.
    """
    threshold = 1.0 / (2.0 * edge_count)
    if p > threshold:
        return True
    return consensus_bound(p, edge_count) >= threshold - tol


@dataclass
class BoundReport:
    graph_id: str
    n: int
    edge_count: int
    p: float
    bound: float
    exact_or_estimated: float
    method: str
    satisfied: bool
    wilson_low: float | None = None
    wilson_high: float | None = None
    mean_absorption_steps: float | None = None
    mean_flips: float | None = None
    timeouts: int = 0

    @property
    def vacuous(self):
        return self.bound <= 0.0

    def row(self):
        out = {
            "graph_id": self.graph_id,
            "n": self.n,
            "m": self.edge_count,
            "p": self.p,
            "bound": self.bound,
            "exact_or_estimate": self.exact_or_estimated,
            "method": self.method,
            "satisfied": self.satisfied,
        }
        if self.method == "mc":
            out.update({k: getattr(self, k) for k in MC_COLUMNS})
        return out

    def to_dict(self):
        d = asdict(self)
        d["vacuous"] = self.vacuous
        return d


def exact_bound_report(graph, p, graph_id="graph", tol=1e-9):
    value = exact_consensus_probability(graph, p).p_consensus
    bound = consensus_bound(p, graph.edge_count)
    return BoundReport(graph_id, graph.n, graph.edge_count, float(p), bound, value,
                       "exact", value >= bound - tol)


def reports_to_csv(reports):
    buf = io.StringIO()
    columns = list(CSV_COLUMNS)
    if any(r.method == "mc" for r in reports):
        columns += MC_COLUMNS
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", restval="")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row())
    return buf.getvalue()


@dataclass(frozen=True)
class BlockedPath:
    """Path ``a-b-c-d`` holding opinions ``s, s, -s, -s`` with all degrees <= 2."""

    vertices: tuple[int, int, int, int]
    polarity: int


def find_blocked_path(graph, x):
    """Lexicographically smallest blocked quadruple in state ``x``, or None.

    Both polarities qualify. The search starts from each edge ``(b, c)`` whose
    endpoints disagree and extends one step on either side.
    """
    x = as_opinions(graph, x)
    deg = graph.degrees
    best = None
    for b in range(graph.n):
        if deg[b] > 2:
            continue
        for c in graph.neighbors(b):
            if deg[c] > 2 or x[c] == x[b]:
                continue
            for a in graph.neighbors(b):
                if a == c or deg[a] > 2 or x[a] != x[b]:
                    continue
                for d in graph.neighbors(c):
                    if d in (a, b) or deg[d] > 2 or x[d] != x[c]:
                        continue
                    quad = (a, b, c, d)
                    if best is None or quad < best:
                        best = quad
    if best is None:
        return None
    return BlockedPath(tuple(int(v) for v in best), int(x[best[0]]))


def is_blocked_path(graph, x, bp):
    a, b, c, d = bp.vertices
    s = bp.polarity
    return (
        len(set(bp.vertices)) == 4
        and graph.has_edge(a, b) and graph.has_edge(b, c) and graph.has_edge(c, d)
        and all(graph.degree(v) <= 2 for v in bp.vertices)
        and [int(x[v]) for v in bp.vertices] == [s, s, -s, -s]
    )


def verify_frozen(graph, x, bp, rng, steps):
    """Simulate ``steps`` ticks; True iff no vertex of ``bp`` ever changed opinion."""
    if not is_blocked_path(graph, as_opinions(graph, x), bp):
        raise ValueError(f"{bp} is not a blocked path of this state")
    _, log, _ = simulate_steps(graph, x, rng, steps)
    return not np.isin(log.agent, bp.vertices).any()


def validate_absorbed_state(graph, x):
    """Every vertex has at least as many agreeing as disagreeing neighbours."""
    x = as_opinions(graph, x).astype(np.int64)
    # row i of A @ x, times x_i, equals agree_i - disagree_i
    return bool(np.all((graph.matrix @ x) * x >= 0))


def first_unstable(graph, x):
    """Smallest vertex violating the stability inequality, or None (diagnostics)."""
    bad = unstable_vertices(graph, as_opinions(graph, x))
    return int(bad[0]) if bad.size else None
