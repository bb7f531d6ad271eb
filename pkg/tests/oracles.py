"""Slow, independent reference computations used to check the library.

Nothing here imports the code under test except plain data containers.
"""

import itertools
import math
from fractions import Fraction

import numpy as np


def naive_contributions(n, edges, attrs, members, kernel="product"):
    """Exact (Fraction) internal/external contribution sums by direct loops.

    ``edges`` is a list of ``(i, j, w)`` with integer-like or float weights.
    """
    W = [[Fraction(0)] * n for _ in range(n)]
    for i, j, w in edges:
        W[i][j] = W[j][i] = Fraction(w)
    k = [sum(W[i]) for i in range(n)]
    two_e = sum(k)
    members = sorted(set(members))
    inside = set(members)
    d = len(attrs[0])
    A = [[Fraction(v) for v in row] for row in attrs]

    def s(a, i, j):
        if kernel == "product":
            return A[i][a] * A[j][a]
        return min(A[i][a], A[j][a])

    internal, external = [], []
    for a in range(d):
        tot = Fraction(0)
        for x in range(len(members)):
            for y in range(x + 1, len(members)):
                i, j = members[x], members[y]
                null = k[i] * k[j] / two_e if two_e else Fraction(0)
                tot += (W[i][j] - null) * s(a, i, j)
        internal.append(tot)
        tot = Fraction(0)
        for i in members:
            for b in range(n):
                if b in inside or W[i][b] == 0:
                    continue
                surprise = k[i] * k[b] / two_e
                tot -= (1 - min(Fraction(1), surprise)) * s(a, i, b)
        external.append(tot)
    return internal, external


def exact_ppr(adj, seed, alpha):
    """Lazy-walk personalized PageRank by a dense linear solve.

    Solves ``p = alpha * e_seed + (1 - alpha) * p M`` with
    ``M = (I + D^-1 A) / 2``.
    """
    n = adj.shape[0]
    deg = adj.sum(axis=1)
    M = 0.5 * (np.eye(n) + adj / deg[:, None])
    s = np.zeros(n)
    s[seed] = 1.0
    return np.linalg.solve((np.eye(n) - (1 - alpha) * M).T, alpha * s)


def conductance_dense(adj, nodes):
    nodes = list(nodes)
    mask = np.zeros(adj.shape[0], bool)
    mask[nodes] = True
    cut = adj[mask][:, ~mask].sum()
    vol = adj[mask].sum()
    total = adj.sum()
    if cut == 0:
        return 0.0
    return cut / min(vol, total - vol)


def naive_welfare(xs, assignment):
    """``sum_c mean_k sqrt(sum_{a in S_c} x_k(a)^2)`` with explicit loops."""
    total = 0.0
    for c, rows in enumerate(xs):
        acc = 0.0
        for row in rows:
            acc += math.sqrt(sum(row[a] ** 2 for a in range(len(row)) if assignment[a] == c))
        total += acc / len(rows)
    return total


def enumerate_welfare(xs, objective=naive_welfare):
    """Best value and lexicographically first optimal assignment over all c^d."""
    c, d = len(xs), len(xs[0][0])
    best, arg = -math.inf, None
    for assign in itertools.product(range(c), repeat=d):
        v = objective(xs, assign)
        if v > best + 1e-12:
            best, arg = v, assign
    return best, arg


def surrogate_objective(xs, assignment):
    """Pre-normalized modular objective with explicit loops."""
    total = 0.0
    for c, rows in enumerate(xs):
        acc = 0.0
        for row in rows:
            norm = math.sqrt(sum(v * v for v in row))
            acc += sum(row[a] ** 2 / norm for a in range(len(row)) if assignment[a] == c)
        total += acc / len(rows)
    return total


def censored_normal_mean(mu, sigma):
    """E[max(X, 0)] for X ~ N(mu, sigma^2)."""
    if sigma == 0:
        return max(mu, 0.0)
    z = mu / sigma
    pdf = math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    cdf = 0.5 * (1 + math.erf(z / math.sqrt(2)))
    return mu * cdf + sigma * pdf


def surrogate_enumeration(mats):
    """Best value of the pre-normalized modular objective over every assignment.

    Vectorized over all ``c**d`` assignments; the per-attribute gains are
    recomputed here from the raw vectors.
    """
    c, d = len(mats), mats[0].shape[1]
    gains = np.array([(m**2 / np.linalg.norm(m, axis=1, keepdims=True)).mean(axis=0) for m in mats])
    assigns = np.array(list(itertools.product(range(c), repeat=d)))
    values = gains[assigns, np.arange(d)].sum(axis=1)
    return float(values.max())
