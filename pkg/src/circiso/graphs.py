"""Simple undirected graphs: the input type shared by the class drivers."""

from __future__ import annotations

from dataclasses import dataclass


class GraphParseError(ValueError):
    """Raised when a graph text file is malformed."""


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]  # sorted neighbor lists

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency length mismatch")
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if not (0 <= v < self.n) or v == u:
                    raise ValueError("bad neighbor")
                if u not in self.adjacency[v]:
                    raise ValueError("adjacency not symmetric")
            if any(nbrs[i] >= nbrs[i + 1] for i in range(len(nbrs) - 1)):
                raise ValueError("neighbors not sorted/unique")

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    @staticmethod
    def from_edges(n: int, edges) -> "Graph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError("self-loop")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return Graph(n, tuple(tuple(sorted(s)) for s in nbrs))

    def complement(self) -> "Graph":
        return Graph(
            self.n,
            tuple(
                tuple(v for v in range(self.n) if v != u and v not in set(nbrs))
                for u, nbrs in enumerate(self.adjacency)
            ),
        )

    def relabel(self, perm: list[int]) -> "Graph":
        """perm[old] = new vertex name."""
        return Graph.from_edges(
            self.n, [(perm[u], perm[v]) for u, v in self.edges()]
        )


def is_graph_isomorphism(g1: Graph, g2: Graph, mapping: list[int]) -> bool:
    """Exhaustive edge-preservation check of mapping[u1] = u2."""
    if g1.n != g2.n or sorted(mapping) != list(range(g1.n)):
        return False
    edges2 = {frozenset(e) for e in g2.edges()}
    if g1.m != len(edges2):
        return False
    return all(frozenset((mapping[u], mapping[v])) in edges2 for u, v in g1.edges())


def parse_graph(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphParseError("empty graph file")
    try:
        n, m = map(int, lines[0].split())
    except ValueError as exc:
        raise GraphParseError(f"bad header line: {lines[0]!r}") from exc
    if len(lines) != m + 1:
        raise GraphParseError(f"expected {m} edge lines, got {len(lines) - 1}")
    edges = []
    seen = set()
    for ln in lines[1:]:
        try:
            u, v = map(int, ln.split())
        except ValueError as exc:
            raise GraphParseError(f"bad edge line: {ln!r}") from exc
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"bad edge: {ln!r}")
        if frozenset((u, v)) in seen:
            raise GraphParseError(f"duplicate edge: {ln!r}")
        seen.add(frozenset((u, v)))
        edges.append((u, v))
    return Graph.from_edges(n, edges)


def format_graph(g: Graph) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(out) + "\n"
