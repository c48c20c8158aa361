"""Hot loops: trajectory stepping and state-space sweeps.

Graphs arrive in CSR form (``indptr``, ``indices``); opinions are int8 arrays
of +1/-1. Every function here compiles under numba when enabled and runs
unchanged as plain Python otherwise (see :mod:`majsim._jit`).
"""
import numpy as np

from ._jit import jit


@jit
def init_counts(indptr, indices, x, agree, disagree):
    """Fill per-vertex agree/disagree neighbour counts; return #unstable vertices."""
    n = x.shape[0]
    unstable = 0
    for i in range(n):
        a = 0
        d = 0
        for p in range(indptr[i], indptr[i + 1]):
            if x[indices[p]] == x[i]:
                a += 1
            else:
                d += 1
        agree[i] = a
        disagree[i] = d
        if d > a:
            unstable += 1
    return unstable


@jit
def advance(indptr, indices, x, agree, disagree, draws, z, stop_when_absorbed,
            flip_step, flip_agent, flip_nbr, flip_agree, flip_disagree, z_trace):
    """Apply the imitation rule once per row of ``draws``.

    Row ``t`` selects agent ``floor(draws[t, 0] * n)`` and then neighbour slot
    ``floor(draws[t, 1] * deg)``. ``x``, ``agree`` and ``disagree`` are
    updated in place. With ``stop_when_absorbed`` the loop returns on the step
    that leaves no unstable vertex. Flips are logged (step index, agent,
    neighbour, counts before the flip) only when the log buffers are non-empty,
    and ``z_trace[t]`` receives the potential after step ``t`` only when
    ``z_trace`` is non-empty; non-empty buffers must hold ``len(draws)`` rows.

    Returns ``(steps_taken, flips, z, unstable)``.
    """
    n = x.shape[0]
    unstable = 0
    for i in range(n):
        if disagree[i] > agree[i]:
            unstable += 1
    log_flips = flip_step.shape[0] > 0
    log_z = z_trace.shape[0] > 0
    nflips = 0
    steps = 0
    if stop_when_absorbed and unstable == 0:
        return 0, 0, z, 0
    for t in range(draws.shape[0]):
        steps = t + 1
        i = int(draws[t, 0] * n)
        if i >= n:
            i = n - 1
        start = indptr[i]
        deg = indptr[i + 1] - start
        if deg > 0:
            slot = int(draws[t, 1] * deg)
            if slot >= deg:
                slot = deg - 1
            j = indices[start + slot]
            a = agree[i]
            d = disagree[i]
            if x[j] != x[i] and d > a:
                if log_flips:
                    flip_step[nflips] = t
                    flip_agent[nflips] = i
                    flip_nbr[nflips] = j
                    flip_agree[nflips] = a
                    flip_disagree[nflips] = d
                nflips += 1
                z -= 2 * (d - a)
                x[i] = -x[i]
                agree[i] = d
                disagree[i] = a
                unstable -= 1
                for p in range(start, start + deg):
                    k = indices[p]
                    was = disagree[k] > agree[k]
                    if x[k] == x[i]:
                        agree[k] += 1
                        disagree[k] -= 1
                    else:
                        agree[k] -= 1
                        disagree[k] += 1
                    now = disagree[k] > agree[k]
                    if was and not now:
                        unstable -= 1
                    elif now and not was:
                        unstable += 1
        if log_z:
            z_trace[t] = z
        if stop_when_absorbed and unstable == 0:
            break
    return steps, nflips, z, unstable


@jit
def flip_weights(nbr, deg, n_vertices, codes):
    """Per-state, per-vertex flip probabilities for the uniform selection law.

    ``nbr`` is a dense (n, maxdeg) neighbour table padded with -1. Entry
    ``[s, i]`` is ``disagree_i / (n * deg_i)`` when vertex ``i`` is unstable in
    state ``codes[s]`` and zero otherwise.
    """
    n = n_vertices
    out = np.zeros((codes.shape[0], n))
    for s in range(codes.shape[0]):
        c = codes[s]
        for i in range(n):
            bi = (c >> i) & 1
            d = 0
            for q in range(deg[i]):
                if ((c >> nbr[i, q]) & 1) != bi:
                    d += 1
            if 2 * d > deg[i]:
                out[s, i] = d / (n * deg[i])
    return out


@jit
def hit_sweep(order, weights, consensus, h):
    """One Gauss-Seidel sweep of the consensus-hitting equations, in place.

    Self-loop mass is eliminated analytically, so a sweep in increasing
    potential order is already exact; the caller iterates until the change
    falls below tolerance. Returns the largest absolute change.
    """
    n = weights.shape[1]
    worst = 0.0
    for r in range(order.shape[0]):
        s = order[r]
        if consensus[s]:
            new = 1.0
        else:
            total = 0.0
            acc = 0.0
            for i in range(n):
                w = weights[s, i]
                if w > 0.0:
                    total += w
                    acc += w * h[s ^ (1 << i)]
            new = acc / total if total > 0.0 else 0.0
        diff = abs(new - h[s])
        if diff > worst:
            worst = diff
        h[s] = new
    return worst


@jit
def reach_pass(order, weights, consensus, out):
    """Mark states from which a consensus state is reachable.

    ``order`` must list states by nondecreasing potential; every flip strictly
    lowers the potential, so one pass settles all states.
    """
    n = weights.shape[1]
    for r in range(order.shape[0]):
        s = order[r]
        if consensus[s]:
            out[s] = True
            continue
        hit = False
        for i in range(n):
            if weights[s, i] > 0.0 and out[s ^ (1 << i)]:
                hit = True
                break
        out[s] = hit
