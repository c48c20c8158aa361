"""Invariant batteries behind ``majsim verify``.

Each suite is a generator of instance dicts carrying at least ``instance``
and ``ok``; a violating instance also carries enough detail (graph, state,
tick) to replay it.
"""
from __future__ import annotations

import numpy as np

from .dynamics import (
    format_opinions,
    init_opinions,
    is_consensus,
    potential_floor,
    potential_Z,
    run_to_absorption,
    simulate_steps,
)
from .exact import (
    consensus_reachable_mask,
    decode,
    enumerate_absorbing,
    exact_consensus_probability,
    frozen_floor_check,
)
from .graph import make_cycle, make_graph, make_path, make_random_connected, make_star, to_edge_list
from .montecarlo import point_seed, trial_rng
from .theory import (
    consensus_bound,
    find_blocked_path,
    validate_absorbed_state,
    verify_frozen,
)

SUITES = ("potential", "absorption", "blocked", "bound", "reachability")


def parse_range(text):
    """``"4..10"`` -> 4..10 inclusive; ``"4,6"`` -> [4, 6]; ``"5"`` -> [5]."""
    text = str(text).strip()
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def small_graph_battery(random_count=10, max_n=8, seed=2024):
    """Named small graphs plus seeded random connected graphs with n <= ``max_n``."""
    graphs = [
        ("P4", make_path(4)),
        ("P6", make_path(6)),
        ("C4", make_cycle(4)),
        ("C5", make_cycle(5)),
        ("C6", make_cycle(6)),
        ("K1_5", make_star(6)),
    ]
    rng = np.random.default_rng(seed)
    for k in range(random_count):
        n = int(rng.integers(4, max_n + 1))
        room = n * (n - 1) // 2 - (n - 1)
        extra = int(rng.integers(0, min(room, n) + 1))
        gseed = int(rng.integers(2**31))
        graphs.append((f"random_n{n}_e{extra}_s{gseed}", make_random_connected(n, extra, gseed)))
    return graphs


def _random_graph(family, n, index, seed):
    if family == "random":
        room = n * (n - 1) // 2 - (n - 1)
        extra = index % (min(room, 3) + 1)
        return make_random_connected(n, extra, point_seed(seed, index))
    return make_graph(family, n)


def check_potential_run(graph, rec):
    """Replay a recorded run and check the potential against its pair definition.

    Returns a list of violation dicts: any tick where the recorded potential
    rises, and any flip whose directly recomputed potential drop differs from
    ``2 * (disagree - agree)`` of the flipping vertex.
    """
    bad = []
    rises = np.flatnonzero(np.diff(rec.z_trace) > 0)
    for t in rises:
        bad.append({"kind": "z_increase", "tick": int(t)})
    x = rec.initial.copy()
    z = potential_Z(graph, x)
    if z != rec.z_trace[0]:
        bad.append({"kind": "z_initial", "direct": z, "recorded": int(rec.z_trace[0])})
    log = rec.flip_log
    for f in range(len(log)):
        i = int(log.agent[f])
        nbrs = list(graph.neighbors(i))
        agree = int(np.count_nonzero(x[nbrs] == x[i]))
        disagree = len(nbrs) - agree
        before = format_opinions(x)
        x[i] = -x[i]
        z_new = potential_Z(graph, x)
        if z - z_new != 2 * (disagree - agree) or z_new > z:
            bad.append({"kind": "decrement", "tick": int(log.step[f]), "state": before,
                        "agent": i, "measured": z - z_new,
                        "expected": 2 * (disagree - agree)})
        z = z_new
    if not np.array_equal(x, rec.final):
        bad.append({"kind": "replay_mismatch"})
    return bad


def suite_potential(family="random", ns=range(5, 13), trials=100, seed=0):
    ns = list(ns)
    for t in range(trials):
        n = ns[t % len(ns)]
        graph = _random_graph(family, n, t, seed)
        rng = trial_rng(seed, t)
        x0 = init_opinions(n, 0.5, rng)
        rec = run_to_absorption(graph, x0, rng, record=True)
        bad = check_potential_run(graph, rec)
        item = {"instance": f"{family} n={n} trial={t}", "ok": not bad,
                "steps": rec.steps_to_absorption, "flips": rec.flips}
        if bad:
            item.update(graph=to_edge_list(graph), initial=format_opinions(x0), violations=bad)
        yield item


def suite_absorption(families=("random", "cycle", "path", "star", "complete"),
                     ns=range(4, 11), trials=100, seed=0, exhaustive_max_n=10):
    ns = list(ns)
    for family in families:
        for t in range(trials):
            n = ns[t % len(ns)]
            graph = _random_graph(family, n, t, seed)
            rng = trial_rng(seed, t)
            rec = run_to_absorption(graph, init_opinions(n, 0.5, rng), rng)
            stable = validate_absorbed_state(graph, rec.final)
            at_floor = potential_Z(graph, rec.final) == potential_floor(graph)
            ok = stable and (is_consensus(rec.final) == at_floor) and rec.consensus == at_floor
            item = {"instance": f"{family} n={n} trial={t}", "ok": ok}
            if not ok:
                item.update(graph=to_edge_list(graph), final=format_opinions(rec.final))
            yield item
        for n in ns:
            if n > exhaustive_max_n:
                continue
            graph = _random_graph(family, n, 0, seed)
            absorbing = enumerate_absorbing(graph)
            unstable = [int(c) for c in absorbing
                        if not validate_absorbed_state(graph, decode(c, n))]
            bad = frozen_floor_check(graph) + unstable
            item = {"instance": f"{family} n={n} exhaustive", "ok": not bad,
                    "n_absorbing": int(absorbing.size)}
            if bad:
                item.update(graph=to_edge_list(graph),
                            states=[format_opinions(decode(c, n)) for c in bad])
            yield item


def blocked_states(graph):
    """All codes whose state contains a blocked quadruple."""
    return [c for c in range(1 << graph.n)
            if find_blocked_path(graph, decode(c, graph.n)) is not None]


def suite_blocked(families=("cycle", "path"), ns=range(4, 9), steps=10_000, seed=0):
    for family in families:
        for n in ns:
            graph = make_graph(family, n)
            reach = consensus_reachable_mask(graph)
            for k, code in enumerate(blocked_states(graph)):
                x = decode(code, n)
                bp = find_blocked_path(graph, x)
                frozen = verify_frozen(graph, x, bp, trial_rng(seed, k), steps)
                _, _, ever = simulate_steps(graph, x, trial_rng(seed, k), steps)
                ok = frozen and not ever and not reach[code]
                item = {"instance": f"{family} n={n} state={format_opinions(x)}",
                        "ok": ok, "quadruple": list(bp.vertices)}
                if not ok:
                    item.update(frozen=frozen, reached_consensus=ever,
                                reachable=bool(reach[code]))
                yield item


def bound_battery(max_n=8, seed=0):
    graphs = []
    for n in range(2, max_n + 1):
        graphs.append((f"complete{n}", make_graph("complete", n)))
        graphs.append((f"path{n}", make_path(n)))
        graphs.append((f"star{n}", make_star(n)))
        if n >= 3:
            graphs.append((f"cycle{n}", make_cycle(n)))
        if n >= 4:
            for extra in (1, 2):
                gseed = point_seed(seed, 100 * n + extra)
                graphs.append((f"random_n{n}_e{extra}", make_random_connected(n, extra, gseed)))
    return graphs


def suite_bound(max_n=8, p_grid=None, seed=0, tol=1e-9):
    if p_grid is None:
        p_grid = [round(0.05 * k, 12) for k in range(1, 20)]
    for label, graph in bound_battery(max_n, seed):
        for p in p_grid:
            value = exact_consensus_probability(graph, p).p_consensus
            bound = consensus_bound(p, graph.edge_count)
            ok = value >= bound - tol
            yield {"instance": f"{label} p={p}", "ok": ok, "n": graph.n,
                   "m": graph.edge_count, "p_consensus": value, "bound": bound}


def reachability_counterexamples(graph):
    """States where 'contains a blocked quadruple' and 'cannot reach consensus' disagree."""
    reach = consensus_reachable_mask(graph)
    out = []
    for code in range(1 << graph.n):
        x = decode(code, graph.n)
        blocked = find_blocked_path(graph, x) is not None
        if blocked == bool(reach[code]):
            out.append(code)
    return out


def suite_reachability(families=("cycle", "path"), ns=range(4, 13)):
    for family in families:
        for n in ns:
            graph = make_graph(family, n)
            bad = reachability_counterexamples(graph)
            item = {"instance": f"{family} n={n}", "ok": not bad, "states": 1 << n}
            if bad:
                item["counterexamples"] = len(bad)
                item["examples"] = [format_opinions(decode(c, n)) for c in bad[:10]]
            yield item

