"""Exact analysis by enumerating all 2^n opinion configurations.

A configuration is encoded as an integer code whose bit ``b`` is set exactly
when vertex ``b`` holds +1. The selection law matches :mod:`majsim.dynamics`:
ordered adjacent pair ``(i, j)`` is chosen with probability ``1/(n deg_i)``.

Every flip lowers the potential by at least 2, so the chain is absorbing and
acyclic apart from self-loops. Both the hitting-probability solver and the
reachability pass exploit this by visiting states in increasing potential.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .dynamics import potential_floor, potential_Z, would_flip
from .errors import CapacityError, ParameterError

ENUMERATION_CAP = 16
DENSE_CAP = 10
H_EXPORT_CAP = 12
SOLVER_TOL = 1e-12


def encode(x):
    """Opinion vector -> state code."""
    x = np.asarray(x)
    return int(sum(1 << b for b in range(x.shape[0]) if x[b] > 0))


def decode(code, n):
    bits = (int(code) >> np.arange(n)) & 1
    return np.where(bits == 1, 1, -1).astype(np.int8)


def consensus_codes(n):
    return 0, (1 << n) - 1


def _check_cap(graph, cap):
    if graph.n > cap:
        raise CapacityError(f"n={graph.n} exceeds the enumeration cap of {cap}")


@dataclass(frozen=True)
class _Tables:
    weights: np.ndarray  # (2^n, n) flip probability of each vertex per state
    order: np.ndarray  # states sorted by increasing potential
    consensus: np.ndarray  # bool mask over states


@lru_cache(maxsize=32)
def _tables(graph):
    n = graph.n
    size = 1 << n
    maxdeg = int(graph.degrees.max())
    nbr = np.full((n, maxdeg), -1, dtype=np.int64)
    for i, row in enumerate(graph.adjacency):
        nbr[i, : len(row)] = row
    codes = np.arange(size, dtype=np.int64)
    weights = kernels.flip_weights(nbr, graph.degrees, n, codes)

    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(np.int8)
    # disagreeing ordered adjacent pairs, i.e. potential minus its floor
    cut = np.zeros(size, dtype=np.int64)
    for u, v in graph.edges():
        cut += 2 * (bits[:, u] != bits[:, v])
    order = np.argsort(cut, kind="stable")
    consensus = np.zeros(size, dtype=bool)
    consensus[list(consensus_codes(n))] = True
    weights.flags.writeable = False
    return _Tables(weights, order, consensus)


def transitions(graph, code, cap=ENUMERATION_CAP):
    """Successor distribution of one state as sorted ``(code, probability)`` pairs.

    Built directly from :func:`majsim.dynamics.would_flip` over every ordered
    adjacent pair, independently of the vectorised tables used by the solvers.
    """
    _check_cap(graph, cap)
    n = graph.n
    x = decode(code, n)
    mass = {}
    for i in range(n):
        w = 1.0 / (n * graph.degree(i))
        for j in graph.neighbors(i):
            succ = code ^ (1 << i) if would_flip(graph, x, i, j) else code
            mass[succ] = mass.get(succ, 0.0) + w
    return sorted(mass.items())


def enumerate_absorbing(graph, cap=ENUMERATION_CAP):
    """Codes of all states in which no vertex can flip, ascending."""
    _check_cap(graph, cap)
    weights = _tables(graph).weights
    return np.flatnonzero(~np.any(weights > 0.0, axis=1))


def consensus_hit_probabilities(graph, cap=ENUMERATION_CAP, tol=SOLVER_TOL,
                                max_sweeps=10_000):
    """Probability of ending in consensus from every state, indexed by code.

    Gauss-Seidel sweeps with the self-loop eliminated, run until the largest
    change drops below ``tol``.
    """
    _check_cap(graph, cap)
    t = _tables(graph)
    h = np.zeros(1 << graph.n)
    for _ in range(max_sweeps):
        if kernels.hit_sweep(t.order, t.weights, t.consensus, h) < tol:
            return h
    raise RuntimeError(f"hitting probabilities did not converge in {max_sweeps} sweeps")


def transition_matrix(graph, cap=DENSE_CAP):
    """Dense row-stochastic kernel over all 2^n states."""
    _check_cap(graph, cap)
    size = 1 << graph.n
    P = np.zeros((size, size))
    for s in range(size):
        for t, w in transitions(graph, s, cap=cap):
            P[s, t] = w
    return P


def consensus_hit_probabilities_dense(graph, cap=DENSE_CAP):
    """Same quantity by one linear solve on the transient states.

    Only for small graphs; exists to cross-check the sweep solver.
    """
    P = transition_matrix(graph, cap=cap)
    size = P.shape[0]
    absorbing = np.isclose(np.diag(P), 1.0)
    transient = np.flatnonzero(~absorbing)
    target = list(consensus_codes(graph.n))
    h = np.zeros(size)
    h[target] = 1.0
    if transient.size:
        A = np.eye(transient.size) - P[np.ix_(transient, transient)]
        b = P[np.ix_(transient, target)].sum(axis=1)
        h[transient] = np.linalg.solve(A, b)
    return h


def initial_weights(n, p):
    """Product-Bernoulli probability of every code: p per +1 bit, 1-p per -1 bit."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    ones = np.array([bin(c).count("1") for c in range(1 << n)])
    return p**ones * (1.0 - p) ** (n - ones)


def consensus_reachable_mask(graph, cap=ENUMERATION_CAP):
    """Boolean mask over codes: can some positive-probability path reach consensus."""
    _check_cap(graph, cap)
    t = _tables(graph)
    out = np.zeros(1 << graph.n, dtype=bool)
    kernels.reach_pass(t.order, t.weights, t.consensus, out)
    return out


def can_reach_consensus(graph, code, cap=ENUMERATION_CAP):
    """Depth-first search over the support of :func:`transitions` from ``code``."""
    _check_cap(graph, cap)
    targets = set(consensus_codes(graph.n))
    stack = [int(code)]
    seen = {int(code)}
    while stack:
        s = stack.pop()
        if s in targets:
            return True
        for t, w in transitions(graph, s, cap=cap):
            if w > 0 and t not in seen:
                seen.add(t)
                stack.append(t)
    return False


@dataclass
class ExactAnalysis:
    n: int
    p_initial: float
    absorbing: np.ndarray
    h: np.ndarray
    p_consensus: float

    @property
    def n_frozen_nonconsensus(self):
        return int(np.count_nonzero(~np.isin(self.absorbing, consensus_codes(self.n))))

    def to_dict(self):
        out = {
            "n": self.n,
            "p": self.p_initial,
            "p_consensus": self.p_consensus,
            "n_absorbing": int(self.absorbing.size),
            "n_frozen_nonconsensus": self.n_frozen_nonconsensus,
        }
        if self.n <= H_EXPORT_CAP:
            out["h"] = [float(v) for v in self.h]
        return out


def exact_consensus_probability(graph, p, cap=ENUMERATION_CAP):
    """Exact P(consensus) when every agent starts at +1 independently with prob ``p``."""
    weights = initial_weights(graph.n, p)
    h = consensus_hit_probabilities(graph, cap=cap)
    return ExactAnalysis(
        n=graph.n,
        p_initial=float(p),
        absorbing=enumerate_absorbing(graph, cap=cap),
        h=h,
        p_consensus=float(weights @ h),
    )


def frozen_floor_check(graph, cap=ENUMERATION_CAP):
    """Absorbing codes violating ``consensus <=> potential == floor`` (should be empty).

    The potential is evaluated from its pair definition, not the solver tables.
    """
    floor = potential_floor(graph)
    bad = []
    for code in enumerate_absorbing(graph, cap=cap):
        at_floor = potential_Z(graph, decode(code, graph.n)) == floor
        if at_floor != (int(code) in consensus_codes(graph.n)):
            bad.append(int(code))
    return bad
