"""Circular-arc models: clique points, minimal dominating point sets,
clique-matrix extraction from Helly models, and the succinct augmented
adjacency matrix of proper models.

A model is a purely combinatorial cyclic sequence of 2n labeled endpoints
in clockwise order; arc i occupies the circle clockwise from its ccw
endpoint to its cw endpoint.  Points of interest live in the gaps between
consecutive endpoints and are addressed by gap index: gap g is the open
segment directly clockwise of endpoint g.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional

from .binmat import RowArc, SuccinctCircMatrix
from .graphs import Graph

CCW = "ccw"
CW = "cw"


class ModelParseError(ValueError):
    pass


class NotHellyError(ValueError):
    pass


class NotProperError(ValueError):
    def __init__(self, pair: tuple[int, int]):
        super().__init__(f"arc {pair[0]} contains arc {pair[1]}")
        self.pair = pair


class CoversCircleError(ValueError):
    def __init__(self, pair: tuple[int, int]):
        super().__init__(f"arcs {pair[0]} and {pair[1]} cover the circle")
        self.pair = pair


class NormalizationFailedError(ValueError):
    def __init__(self, pair: tuple[int, int]):
        super().__init__(
            f"no adjacency-preserving retraction for covering pair {pair}"
        )
        self.pair = pair


class SizeGuardError(ValueError):
    pass


@dataclass(frozen=True)
class CircularArcModel:
    n_arcs: int
    endpoints: tuple[tuple[int, str], ...]  # (arc_id, CCW|CW), clockwise

    def __post_init__(self):
        if len(self.endpoints) != 2 * self.n_arcs:
            raise ValueError("endpoint count mismatch")
        seen = set()
        for arc, kind in self.endpoints:
            if kind not in (CCW, CW) or not (0 <= arc < self.n_arcs):
                raise ValueError("bad endpoint")
            if (arc, kind) in seen:
                raise ValueError(f"duplicate endpoint {(arc, kind)}")
            seen.add((arc, kind))

    @property
    def circle(self) -> int:
        return 2 * self.n_arcs

    def positions(self) -> tuple[list[int], list[int]]:
        ccw = [-1] * self.n_arcs
        cw = [-1] * self.n_arcs
        for p, (arc, kind) in enumerate(self.endpoints):
            if kind == CCW:
                ccw[arc] = p
            else:
                cw[arc] = p
        return ccw, cw

    def spans(self) -> list[tuple[int, int]]:
        """(ccw position, covered-gap count) per arc."""
        ccw, cw = self.positions()
        m = self.circle
        return [(ccw[i], (cw[i] - ccw[i]) % m) for i in range(self.n_arcs)]

    def covers_gap(self, arc: int, gap: int) -> bool:
        ccw, cw = self.positions()
        m = self.circle
        return (gap - ccw[arc]) % m < (cw[arc] - ccw[arc]) % m

    def arcs_at(self, gap: int) -> frozenset[int]:
        """C(p): the arcs containing a point in the given gap."""
        m = self.circle
        out = []
        for i, (start, span) in enumerate(self.spans()):
            if (gap - start) % m < span:
                out.append(i)
        return frozenset(out)

    def intersects(self, i: int, k: int) -> bool:
        if i == k:
            return True
        ccw, cw = self.positions()
        m = self.circle
        si = (cw[i] - ccw[i]) % m
        sk = (cw[k] - ccw[k]) % m
        return (ccw[k] - ccw[i]) % m <= si or (ccw[i] - ccw[k]) % m <= sk

    def contains_arc(self, i: int, k: int) -> bool:
        """Closed arc i contains closed arc k (i != k)."""
        ccw, cw = self.positions()
        m = self.circle
        si = (cw[i] - ccw[i]) % m
        t1 = (ccw[k] - ccw[i]) % m
        t2 = (cw[k] - ccw[i]) % m
        return t1 <= si and t2 <= si and t1 <= t2

    def pair_covers_circle(self, i: int, k: int) -> bool:
        ccw, cw = self.positions()
        m = self.circle
        si = (cw[i] - ccw[i]) % m
        sk = (cw[k] - ccw[k]) % m
        off = (cw[i] - ccw[k]) % m
        return off + (m - si) <= sk

    def intersection_graph(self) -> Graph:
        edges = [
            (i, k)
            for i in range(self.n_arcs)
            for k in range(i + 1, self.n_arcs)
            if self.intersects(i, k)
        ]
        return Graph.from_edges(self.n_arcs, edges)

    def reversed(self) -> "CircularArcModel":
        flipped = tuple(
            (arc, CCW if kind == CW else CW) for arc, kind in reversed(self.endpoints)
        )
        return CircularArcModel(self.n_arcs, flipped)

    def reverse_gap(self, gap: int) -> int:
        return (self.circle - 2 - gap) % self.circle


@dataclass(frozen=True)
class CliquePointSet:
    model: CircularArcModel
    points: tuple[int, ...]  # gap indices, clockwise

    def arc_sets(self) -> list[frozenset[int]]:
        return [self.model.arcs_at(g) for g in self.points]


def intersection_segments(a: CircularArcModel) -> CliquePointSet:
    """One point per gap where a ccw endpoint is immediately followed by
    a cw endpoint in the clockwise direction."""
    m = a.circle
    pts = [
        g
        for g in range(m)
        if a.endpoints[g][1] == CCW and a.endpoints[(g + 1) % m][1] == CW
    ]
    return CliquePointSet(a, tuple(pts))


# ---------------------------------------------------------------------------
# Semi-dominating sequences
# ---------------------------------------------------------------------------


def sd_plus(a: CircularArcModel, points: list[int]) -> list[int]:
    """Points not dominated by any later point, in one stack pass.

    ``points`` are gap indices in clockwise traversal order.  Point p
    dominates q when every arc containing q also contains p.
    """
    k = len(points)
    if k <= 1:
        return list(points)
    m = a.circle
    ccw, cw = a.positions()
    spans = a.spans()
    pk = points[-1]

    def fwd_from_pk(pos: int) -> int:
        # distance clockwise from the pk gap to endpoint position pos,
        # in half-step units so gaps and endpoints never tie
        return (2 * pos - (2 * pk + 1)) % (2 * m)

    # B[i]: among arcs not containing pk whose cw endpoint falls strictly
    # between gaps points[i-1] and points[i], the one reaching farthest
    # counterclockwise (these all start after pk, so the smallest start
    # offset from pk covers the most earlier points).
    b_arc: list[Optional[int]] = [None] * k
    for i in range(1, k):
        lo, hi = points[i - 1], points[i]
        best = None
        best_key = None
        e = (lo + 1) % m
        while True:
            arc, kind = a.endpoints[e]
            if kind == CW and cw[arc] == e:
                start, span = spans[arc]
                if (pk - start) % m >= span:  # does not contain gap pk
                    key = fwd_from_pk(start)
                    if best is None or key < best_key:
                        best, best_key = arc, key
            if e == hi:
                break
            e = (e + 1) % m
        b_arc[i] = best

    # A[i]: among arcs containing pk but not points[i], the one reaching
    # farthest clockwise past pk.  Candidates enter as the reach bound
    # loosens and leave permanently as the wrap bound tightens.
    cands = []  # (reach r, wrap extent a, arc id)
    for arc, (start, span) in enumerate(spans):
        back = (pk - start) % m
        if back < span:  # contains gap pk
            cands.append((span - back, back, arc))
    cands.sort()
    a_arc: list[Optional[int]] = [None] * k
    heap: list[tuple[int, int, int]] = []  # (-reach, wrap, arc)
    ci = 0
    for i in range(1, k):
        delta = (points[i] - pk) % m
        while ci < len(cands) and cands[ci][0] <= delta:
            r, wrap, arc = cands[ci]
            heapq.heappush(heap, (-r, wrap, arc))
            ci += 1
        while heap and heap[0][1] >= m - delta:
            heapq.heappop(heap)
        a_arc[i] = heap[0][2] if heap else None

    def covers(arc: Optional[int], gap: int) -> bool:
        if arc is None:
            return False
        start, span = spans[arc]
        return (gap - start) % m < span

    confirmed: set[int] = set()
    stack = [points[0]]
    for i in range(1, k):
        while stack and covers(b_arc[i], stack[-1]):
            confirmed.add(stack.pop())
        while stack and not covers(a_arc[i], stack[-1]):
            stack.pop()
        stack.append(points[i])
    keep = confirmed | set(stack)
    return [p for p in points if p in keep]


def sd_minus(a: CircularArcModel, points: list[int]) -> list[int]:
    """Points not dominated by any earlier point; the mirror pass."""
    rev = a.reversed()
    rev_points = [a.reverse_gap(g) for g in reversed(points)]
    kept = set(sd_plus(rev, rev_points))
    return [p for p in points if a.reverse_gap(p) in kept]


def minimal_dominating(a: CircularArcModel, points: list[int]) -> list[int]:
    """A minimal dominating subset: every input point is dominated by a
    kept point and no kept point dominates another."""
    return sd_plus(a, sd_minus(a, points))


# ---------------------------------------------------------------------------
# Helly models and clique matrices
# ---------------------------------------------------------------------------


def verify_helly(a: CircularArcModel, size_guard: int = 20) -> bool:
    """Every maximal clique of the intersection graph is realized as the
    arc set of some intersection-segment point.  Exponential-time check,
    guarded by size."""
    if a.n_arcs > size_guard:
        raise SizeGuardError(
            f"helly verification limited to {size_guard} arcs"
        )
    from .oracle import brute_max_cliques

    realized = set(intersection_segments(a).arc_sets())
    cliques = brute_max_cliques(a.intersection_graph())
    return all(c in realized for c in cliques)


def clique_matrix_from_helly(
    a: CircularArcModel, check: bool = False, size_guard: int = 20
) -> tuple[SuccinctCircMatrix, list[int]]:
    """Succinct vertex/maximal-clique incidence matrix of a Helly model.

    Columns are the surviving clique points in circle order (a
    circular-ones ordering); the row of each arc records its first and
    last clique numbers.  Also returns the surviving clique point gaps.
    """
    if check and not verify_helly(a, size_guard=size_guard):
        raise NotHellyError("model is not Helly")
    pts = list(intersection_segments(a).points)
    surv = minimal_dominating(a, pts)
    q = len(surv)
    if q == 0:
        raise ValueError("model has no arcs")
    m = a.circle
    spans = a.spans()
    doubled = surv + [g + m for g in surv]
    rows = []
    for arc in range(a.n_arcs):
        start, span = spans[arc]
        lo = bisect_left(doubled, start)
        first = lo
        if first >= len(doubled) or doubled[first] >= start + span:
            raise NotHellyError(f"arc {arc} covers no clique point")
        hi = bisect_left(doubled, start + span)
        count = hi - lo
        if count >= q:
            rows.append(RowArc.full())
        else:
            rows.append(RowArc.arc(first % q, (hi - 1) % q))
    return SuccinctCircMatrix(a.n_arcs, q, tuple(rows)), surv


# ---------------------------------------------------------------------------
# Proper models
# ---------------------------------------------------------------------------


def validate_proper(a: CircularArcModel) -> None:
    for i in range(a.n_arcs):
        for k in range(a.n_arcs):
            if i != k and a.contains_arc(i, k):
                raise NotProperError((i, k))


def find_cover_pair(a: CircularArcModel) -> Optional[tuple[int, int]]:
    for i in range(a.n_arcs):
        for k in range(i + 1, a.n_arcs):
            if a.pair_covers_circle(i, k):
                return (i, k)
    return None


def augmented_adjacency_from_proper(
    a: CircularArcModel,
) -> tuple[SuccinctCircMatrix, list[int]]:
    """Succinct closed-neighborhood matrix of a proper, cover-free model.

    Vertices are indexed by the clockwise order of ccw endpoints; one
    clockwise traversal finds each row's last 1, the mirrored traversal
    the first 1.  Also returns the vertex order (arc id per index).
    """
    validate_proper(a)
    pair = find_cover_pair(a)
    if pair is not None:
        raise CoversCircleError(pair)
    n = a.n_arcs
    m = a.circle
    order = [arc for arc, kind in a.endpoints if kind == CCW]
    index = {arc: j for j, arc in enumerate(order)}

    nbr_count = [0] * n
    for i in range(n):
        for k in range(i + 1, n):
            if a.intersects(i, k):
                nbr_count[i] += 1
                nbr_count[k] += 1

    last1 = [-1] * n
    start = a.endpoints.index((order[0], CCW))
    v = order[0]
    for step in range(1, m + 1):
        arc, kind = a.endpoints[(start + step) % m]
        if kind == CCW:
            v = arc
        else:
            last1[arc] = index[v]
    first1 = [-1] * n
    cw_start = next(p for p, (_, kind) in enumerate(a.endpoints) if kind == CW)
    w = a.endpoints[cw_start][0]
    for step in range(1, m + 1):
        arc, kind = a.endpoints[(cw_start - step) % m]
        if kind == CW:
            w = arc
        else:
            first1[arc] = index[w]

    rows: list[RowArc] = [RowArc.empty()] * n
    for arc in range(n):
        j = index[arc]
        if nbr_count[arc] + 1 == n:
            rows[j] = RowArc.full()
            continue
        f, l = first1[arc], last1[arc]
        size = (l - f) % n + 1
        if size != nbr_count[arc] + 1:
            raise AssertionError(
                f"arc {arc}: traversal span {size} != degree {nbr_count[arc] + 1}"
            )
        rows[j] = RowArc.arc(f, l)
    return SuccinctCircMatrix(n, n, tuple(rows)), order


def normalize_cover_pairs(a: CircularArcModel) -> CircularArcModel:
    """Shrink arcs until no two cover the circle together, preserving the
    intersection graph and properness.

    For a covering pair one arc's cw endpoint is retracted to just before
    the other's ccw endpoint (or, failing both of those, the mirrored ccw
    retraction); a retraction is kept only if the intersection graph is
    unchanged.  Raises NormalizationFailedError when a covering pair
    survives every candidate retraction.
    """
    validate_proper(a)
    base_graph = _edge_set(a)
    current = a
    for _ in range(4 * a.n_arcs * a.n_arcs + 4):
        pair = find_cover_pair(current)
        if pair is None:
            return current
        i, k = pair
        fixed = None
        for x, y in ((i, k), (k, i)):
            for move in (_retract_cw, _retract_ccw):
                candidate = move(current, x, y)
                if candidate is None:
                    continue
                if _edge_set(candidate) != base_graph:
                    continue
                try:
                    validate_proper(candidate)
                except NotProperError:
                    continue
                if candidate.pair_covers_circle(i, k):
                    continue
                fixed = candidate
                break
            if fixed is not None:
                break
        if fixed is None:
            raise NormalizationFailedError(pair)
        current = fixed
    raise NormalizationFailedError(pair)


def _edge_set(a: CircularArcModel) -> frozenset[frozenset[int]]:
    return frozenset(
        frozenset((i, k))
        for i in range(a.n_arcs)
        for k in range(i + 1, a.n_arcs)
        if a.intersects(i, k)
    )


def _retract_cw(a: CircularArcModel, x: int, y: int) -> Optional[CircularArcModel]:
    """Move x's cw endpoint to just counterclockwise of y's ccw endpoint."""
    eps = list(a.endpoints)
    old = eps.index((x, CW))
    target = eps.index((y, CCW))
    item = eps.pop(old)
    target = eps.index((y, CCW))
    eps.insert(target, item)
    cand = CircularArcModel(a.n_arcs, tuple(eps))
    start, span = cand.spans()[x]
    if span == 0:
        return None
    return cand


def _retract_ccw(a: CircularArcModel, x: int, y: int) -> Optional[CircularArcModel]:
    """Move x's ccw endpoint to just clockwise of y's cw endpoint."""
    eps = list(a.endpoints)
    old = eps.index((x, CCW))
    target = eps.index((y, CW))
    item = eps.pop(old)
    target = eps.index((y, CW))
    eps.insert(target + 1, item)
    cand = CircularArcModel(a.n_arcs, tuple(eps))
    start, span = cand.spans()[x]
    if span == 0:
        return None
    return cand


# ---------------------------------------------------------------------------
# Text format: line 1 "n"; then 2n lines "arc_id kind", clockwise.
# ---------------------------------------------------------------------------


def parse_model(text: str) -> CircularArcModel:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ModelParseError("empty model file")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise ModelParseError(f"bad header line: {lines[0]!r}") from exc
    if len(lines) != 2 * n + 1:
        raise ModelParseError(f"expected {2 * n} endpoint lines")
    eps = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2 or parts[1] not in (CCW, CW):
            raise ModelParseError(f"bad endpoint line: {ln!r}")
        try:
            arc = int(parts[0])
        except ValueError as exc:
            raise ModelParseError(f"bad endpoint line: {ln!r}") from exc
        eps.append((arc, parts[1]))
    try:
        return CircularArcModel(n, tuple(eps))
    except ValueError as exc:
        raise ModelParseError(str(exc)) from exc


def format_model(a: CircularArcModel) -> str:
    out = [str(a.n_arcs)]
    out.extend(f"{arc} {kind}" for arc, kind in a.endpoints)
    return "\n".join(out) + "\n"
