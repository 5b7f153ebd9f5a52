"""Independent reference computations used to freeze expected values.

None of these call into the package's evaluators; they re-derive each
quantity from its defining formula by brute force, quadrature or LP.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate
from scipy.optimize import linprog


def atoms_of(values, weights=None):
    values = np.asarray(values, dtype=float)
    weights = np.full(values.size, 1.0 / values.size) if weights is None else np.asarray(weights, float)
    order = np.argsort(values, kind="stable")
    return values[order], weights[order]


def cdf_at(values, weights, x):
    return float(weights[values <= x].sum())


def var_scan(values, weights, alpha):
    """Least m among candidate shifts with P(X + m < 0) <= alpha."""
    cands = sorted(set(-np.asarray(values, float)))
    for m in cands:
        if weights[values + m < 0].sum() <= alpha + 1e-12:
            return m
    raise AssertionError("no candidate satisfied the VaR condition")


def tvar_quadrature(values, weights, alpha, pieces=20000):
    """(1/alpha) * integral of VaR_beta over (0, alpha], midpoint rule per piece."""
    v, w = atoms_of(values, weights)
    cum = np.cumsum(w)
    betas = (np.arange(pieces) + 0.5) * alpha / pieces
    idx = np.searchsorted(cum, betas, side="right")
    return float(np.mean(-v[np.minimum(idx, v.size - 1)]))


def tvar_worst_mass(values, weights, alpha):
    """-E[X | worst alpha mass], splitting the boundary atom."""
    v, w = atoms_of(values, weights)
    left, acc = alpha, 0.0
    for x, p in zip(v, w):
        take = min(p, left)
        acc += take * x
        left -= take
        if left <= 0:
            break
    return -acc / alpha


def choquet_quadrature(values, weights, delta):
    """integral_{-inf}^0 delta(F) dx - integral_0^inf (1 - delta(F)) dx, by pieces."""
    v, w = atoms_of(values, weights)
    cum = np.cumsum(w)
    pts = np.unique(np.concatenate([v, [0.0]]))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        level = float(cum[np.searchsorted(v, a, side="right") - 1]) if a >= v[0] else 0.0

        def f(x, level=level):
            d = float(delta(min(level, 1.0)))
            return d if x < 0 else d - 1.0

        val, _ = integrate.quad(f, a, b)
        total += val
    return total


def best_pairing(xs, ys, sign=+1):
    """max over permutations of mean(sign * x * y[perm]) for equal-size uniform laws."""
    best = -math.inf
    for perm in itertools.permutations(range(len(ys))):
        val = sign * float(np.mean(np.asarray(xs) * np.asarray(ys)[list(perm)]))
        best = max(best, val)
    return best


def coupling_lp_mass(x, a, y, b, eps):
    """Max coupling mass on pairs with |x - y| <= eps, as an LP."""
    n, m = len(x), len(y)
    close = (np.abs(np.subtract.outer(x, y)) <= eps).astype(float).ravel()
    rows, rhs = [], []
    for i in range(n):
        r = np.zeros((n, m))
        r[i] = 1.0
        rows.append(r.ravel())
        rhs.append(a[i])
    for j in range(m):
        r = np.zeros((n, m))
        r[:, j] = 1.0
        rows.append(r.ravel())
        rhs.append(b[j])
    res = linprog(-close, A_eq=np.array(rows), b_eq=rhs, bounds=(0, None), method="highs")
    assert res.status == 0
    return -res.fun


def prohorov_lp(x, a, y, b):
    """Exact d_P: the coupling mass only changes at pairwise distances."""
    dists = np.unique(np.concatenate([[0.0], np.abs(np.subtract.outer(x, y)).ravel()]))
    best = 1.0
    for d in dists:
        if d >= 1.0:
            break
        best = min(best, max(float(d), 1.0 - coupling_lp_mass(x, a, y, b, d)))
    return best


def prohorov_networkx(x, a, y, b, eps, scale=10**9):
    """Max-flow on the bipartite network through networkx, integer capacities."""
    import networkx as nx

    g = nx.DiGraph()
    for i, w in enumerate(a):
        g.add_edge("s", ("x", i), capacity=int(round(w * scale)))
    for j, w in enumerate(b):
        g.add_edge(("y", j), "t", capacity=int(round(w * scale)))
    for i, xi in enumerate(x):
        for j, yj in enumerate(y):
            if abs(xi - yj) <= eps:
                g.add_edge(("x", i), ("y", j))
    if not g.has_node("t"):
        return 0.0
    return nx.maximum_flow_value(g, "s", "t") / scale


def levy_bruteforce(x, a, y, b, iters=60):
    """Bisection on h with the band checked on a dense grid of probe points."""
    x, a = atoms_of(x, a)
    y, b = atoms_of(y, b)

    def ok(h):
        probes = np.concatenate([x, y, x - h, y - h, x + h, y + h])
        probes = np.concatenate([probes, probes - 1e-13, probes + 1e-13])
        for t in probes:
            f_lo = cdf_at(x, a, t - h)
            f_hi = cdf_at(x, a, t + h)
            g = cdf_at(y, b, t)
            if f_lo - h > g + 1e-12 or g > f_hi + h + 1e-12:
                return False
        return True

    lo, hi = 0.0, 1.0
    if ok(0.0):
        return 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def capital_bruteforce(x, probs, s, s0, accept, lo=-1e4, hi=1e4, iters=200):
    """Plain bisection on a user-supplied acceptability test of X + m S / S0."""
    x, s = np.asarray(x, float), np.asarray(s, float)
    assert accept(x + hi * s / s0, probs) and not accept(x + lo * s / s0, probs)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if accept(x + mid * s / s0, probs):
            hi = mid
        else:
            lo = mid
    return hi
