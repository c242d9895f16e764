"""Brute-force reference implementations.

These are definitionally direct and share no code with the main pipeline
beyond the data types.  Size guards are hard errors so a test can never
silently pass on skipped work.
"""

from __future__ import annotations

from collections import Counter
from itertools import combinations, permutations

from .binmat import SparseBinaryMatrix
from .graphs import Graph


class SizeGuardError(ValueError):
    """Input exceeds the declared brute-force size limit."""


def brute_matrix_iso(m1: SparseBinaryMatrix, m2: SparseBinaryMatrix) -> bool:
    """Some column permutation makes the row multisets equal."""
    if max(m1.n_cols, m2.n_cols) > 8:
        raise SizeGuardError("brute_matrix_iso limited to 8 columns")
    if m1.n_rows != m2.n_rows or m1.n_cols != m2.n_cols:
        return False
    target = Counter(m2.rows)
    for perm in permutations(range(m1.n_cols)):
        mapped = Counter(tuple(sorted(perm[c] for c in row)) for row in m1.rows)
        if mapped == target:
            return True
    return False


def brute_circular_ones(m: SparseBinaryMatrix) -> bool:
    """Some column order makes every row circularly consecutive."""
    if m.n_cols > 8:
        raise SizeGuardError("brute_circular_ones limited to 8 columns")
    n = m.n_cols
    if n <= 2:
        return True
    rows = [frozenset(r) for r in m.rows if 2 <= len(r) <= n - 2]
    if not rows:
        return True
    # Rotating a circular order preserves circularity: fix column 0 first.
    for rest in permutations(range(1, n)):
        order = (0,) + rest
        pos = {col: i for i, col in enumerate(order)}
        if all(_circ_consecutive([pos[c] for c in row], n) for row in rows):
            return True
    return False


def _circ_consecutive(positions: list[int], n: int) -> bool:
    k = len(positions)
    pos = sorted(positions)
    gaps = sum(1 for i in range(k) if (pos[(i + 1) % k] - pos[i]) % n > 1)
    return gaps <= 1


def brute_strong_overlap_family(m: SparseBinaryMatrix) -> set[frozenset[int]]:
    """All nonempty proper column subsets strongly overlapping no row."""
    if m.n_cols > 7:
        raise SizeGuardError("brute_strong_overlap_family limited to 7 columns")
    n = m.n_cols
    universe = frozenset(range(n))
    rows = [frozenset(r) for r in m.rows]
    family: set[frozenset[int]] = set()
    for r in range(1, n):
        for combo in combinations(range(n), r):
            x = frozenset(combo)
            if not any(
                x & row and x - row and row - x and universe - (x | row)
                for row in rows
            ):
                family.add(x)
    return family


def brute_max_cliques(g: Graph) -> list[frozenset[int]]:
    """All maximal cliques (Bron-Kerbosch with pivoting)."""
    if g.n > 20:
        raise SizeGuardError("brute_max_cliques limited to 20 vertices")
    adj = [set(nbrs) for nbrs in g.adjacency]
    out: list[frozenset[int]] = []

    def expand(r: set[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda v: len(adj[v] & p))
        for v in list(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    expand(set(), set(range(g.n)), set())
    return sorted(out, key=sorted)


def brute_graph_iso(g1: Graph, g2: Graph) -> bool:
    """Some vertex bijection preserves adjacency."""
    if max(g1.n, g2.n) > 8:
        raise SizeGuardError("brute_graph_iso limited to 8 vertices")
    if g1.n != g2.n or g1.m != g2.m:
        return False
    if sorted(len(a) for a in g1.adjacency) != sorted(len(a) for a in g2.adjacency):
        return False
    edges2 = {frozenset(e) for e in g2.edges()}
    for perm in permutations(range(g1.n)):
        if all(frozenset((perm[u], perm[v])) in edges2 for u, v in g1.edges()):
            return True
    return False
