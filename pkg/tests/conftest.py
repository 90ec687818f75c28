import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def brute_force_transport(supply, demand, cost):
    """Minimum transportation cost by enumerating all basic feasible solutions.

    Every vertex of the transportation polytope corresponds to a
    spanning-tree subset of m+n-1 cells whose flows are forced by the
    marginals; enumerate them all and keep the cheapest feasible one.
    Exponential, so only for tiny instances.
    """
    supply = np.asarray(supply, dtype=float)
    demand = np.asarray(demand, dtype=float)
    m, n = len(supply), len(demand)
    cells = [(i, j) for i in range(m) for j in range(n)]
    best = np.inf
    for combo in itertools.combinations(cells, m + n - 1):
        rs = supply.copy()
        cs = demand.copy()
        left = set(combo)
        flows = {}
        while left:
            # peel a row or column containing exactly one undetermined cell
            progressed = False
            for i in range(m):
                row = [c for c in left if c[0] == i]
                if len(row) == 1:
                    (ci, cj) = row[0]
                    flows[(ci, cj)] = rs[ci]
                    cs[cj] -= rs[ci]
                    rs[ci] = 0.0
                    left.remove((ci, cj))
                    progressed = True
            for j in range(n):
                col = [c for c in left if c[1] == j]
                if len(col) == 1:
                    (ci, cj) = col[0]
                    flows[(ci, cj)] = cs[cj]
                    rs[ci] -= cs[cj]
                    cs[cj] = 0.0
                    left.remove((ci, cj))
                    progressed = True
            if not progressed:
                break  # contains a cycle; not a basis
        if left:
            continue
        vals = np.array(list(flows.values()))
        if np.any(vals < -1e-12):
            continue
        total = sum(f * cost[c] for c, f in flows.items())
        best = min(best, total)
    return best
