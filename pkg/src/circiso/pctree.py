"""Quotient-labeled PC trees of circular-ones matrices.

The PC tree is the unrooted decomposition tree whose leaves are the
matrix columns: P nodes allow any cyclic rearrangement of their incident
edges, C nodes only rotation and reversal of a fixed cyclic order.  Every
matrix row projects onto exactly one internal node as an arc of that
node's cyclic neighbor order; the matrix is reconstructible from the tree
plus these quotient labels.

Construction route: complement the rows containing the last column c so
that c becomes a zero column, drop c, build the PQ tree of the remaining
consecutive-ones matrix, reattach c as a leaf adjacent to the root, and
unroot.  Row projections are then found by the counter/blackening pass,
and the complementation is undone on the quotient images.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from . import pqtree
from .binmat import (
    RowArc,
    SparseBinaryMatrix,
    SuccinctCircMatrix,
    complement_row_succinct,
)

LEAF = "leaf"
P = "P"
C = "C"


@dataclass
class QuotientSpan:
    """Projection of one row: the arc of neighbors from ``first`` to
    ``last`` inclusive, clockwise in the owning node's cyclic order.
    A singleton projection has first == last."""

    row_id: int
    first: int  # neighbor node id
    last: int  # neighbor node id


@dataclass
class PCNode:
    id: int
    kind: str
    column: int = -1  # leaves only
    neighbors: list[int] = field(default_factory=list)  # cyclic order
    quotient: list[QuotientSpan] = field(default_factory=list)


@dataclass
class QuotientPCTree:
    n_cols: int
    n_rows: int
    nodes: dict[int, PCNode]
    leaf_of_col: list[int]

    def internal_nodes(self) -> list[PCNode]:
        return [u for u in self.nodes.values() if u.kind != LEAF]

    def leaves_through(self, u: int, w: int) -> list[int]:
        """Columns of the leaves in the component of w when u is removed."""
        out = []
        stack = [(w, u)]
        while stack:
            x, came_from = stack.pop()
            node = self.nodes[x]
            if node.kind == LEAF:
                out.append(node.column)
                continue
            for y in node.neighbors:
                if y != came_from:
                    stack.append((y, x))
        return out

    def cyclic_leaf_order(self) -> list[int]:
        """Column order induced by the stored cyclic neighbor orders."""
        internal = [u for u in self.nodes.values() if u.kind != LEAF]
        if not internal:
            raise ValueError("tree has no internal node")
        start = internal[0]
        out: list[int] = []
        stack = [(w, start.id) for w in reversed(start.neighbors)]
        while stack:
            x, came_from = stack.pop()
            node = self.nodes[x]
            if node.kind == LEAF:
                out.append(node.column)
                continue
            nbrs = node.neighbors
            i = nbrs.index(came_from)
            ordered = nbrs[i + 1 :] + nbrs[:i]
            stack.extend((y, x) for y in reversed(ordered))
        return out

    def dump(self) -> str:
        """One line per node: id kind [cyclic neighbor ids] {row:(first,last)}."""
        lines = []
        for nid in sorted(self.nodes):
            u = self.nodes[nid]
            nbrs = " ".join(str(w) for w in u.neighbors)
            quo = " ".join(
                f"{s.row_id}:({s.first},{s.last})"
                for s in sorted(u.quotient, key=lambda s: s.row_id)
            )
            label = u.kind if u.kind != LEAF else f"leaf:{u.column}"
            lines.append(f"{nid} {label} [{nbrs}] {{{quo}}}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DegenerateTree:
    """Stand-in for matrices with at most two columns; no P/C structure."""

    n_cols: int
    n_rows: int
    rows: tuple[tuple[int, ...], ...]


class PQuotientViolation(AssertionError):
    """A P-node quotient row selected neither 1 nor degree-1 neighbors."""


def build_pc(s: SuccinctCircMatrix) -> QuotientPCTree:
    """The unique quotient-labeled PC tree of a succinct circular-ones matrix.

    Rows must all be proper arcs (no all-ones/all-zeros codes) and the
    matrix must have at least 3 columns.
    """
    n = s.n_cols
    if n < 3:
        raise ValueError("PC tree requires at least 3 columns")
    for row in s.rows:
        if row.kind != "arc":
            raise ValueError("full/empty rows must be stripped before build_pc")

    c = n - 1
    trivial_one: list[tuple[int, int]] = []  # (row_id, column of the single 1)
    trivial_zero: list[tuple[int, int]] = []  # (row_id, column of the single 0)
    working: list[tuple[int, RowArc, bool]] = []  # (row_id, arc, complemented)
    for rid, row in enumerate(s.rows):
        size = row.size(n)
        if size == 1:
            trivial_one.append((rid, row.first))
        elif size == n - 1:
            trivial_zero.append((rid, (row.last + 1) % n))
        else:
            contains_c = (c - row.first) % n < size
            arc = complement_row_succinct(row, n) if contains_c else row
            working.append((rid, arc, contains_c))

    tree = _pc_skeleton(n, [arc for _, arc, _ in working])
    tree.n_rows = s.n_rows
    _project_working_rows(tree, working)
    _place_trivial_rows(tree, trivial_one, trivial_zero)
    _reclassify_small_c_nodes(tree)
    succinct_quotients(tree)
    assert_p_quotients(tree)
    return tree


def _pc_skeleton(n: int, arcs: list[RowArc]) -> QuotientPCTree:
    """PC tree structure (no quotients) via the PQ tree of the c-reduction."""
    c = n - 1
    pq = pqtree.build_universal(n - 1)
    distinct = {arc.column_set(n) for arc in arcs}
    for cols in sorted(distinct, key=len, reverse=True):
        if not pq.reduce(cols):
            raise ValueError("input is not a circular-ones matrix")

    tree = QuotientPCTree(n_cols=n, n_rows=0, nodes={}, leaf_of_col=[-1] * n)
    counter = 0

    def fresh(kind: str, column: int = -1) -> PCNode:
        nonlocal counter
        node = PCNode(id=counter, kind=kind, column=column)
        tree.nodes[counter] = node
        counter += 1
        return node

    for col in range(n):
        tree.leaf_of_col[col] = fresh(LEAF, column=col).id

    # Iterative rooted-to-unrooted conversion; children lists become the
    # cyclic neighbor order, with the parent slot appended last.
    pc_id: dict[pqtree.PQNode, int] = {}
    stack = [pq.root]
    order = []
    while stack:
        node = stack.pop()
        order.append(node)
        if node.kind != pqtree.LEAF:
            stack.extend(node.children())
    for node in reversed(order):
        if node.kind == pqtree.LEAF:
            pc_id[node] = tree.leaf_of_col[node.column]
            continue
        pc = fresh(P if node.kind == pqtree.P else C)
        for child in node.children():
            cid = pc_id[child]
            pc.neighbors.append(cid)
            tree.nodes[cid].neighbors.append(pc.id)
        pc_id[node] = pc.id

    root = tree.nodes[pc_id[pq.root]]
    if root.kind == LEAF:
        raise AssertionError("degenerate PQ root")
    c_leaf = tree.leaf_of_col[c]
    root.neighbors.append(c_leaf)
    tree.nodes[c_leaf].neighbors.append(root.id)

    _contract_degree_two(tree)
    return tree


def _contract_degree_two(tree: QuotientPCTree) -> None:
    for node in list(tree.nodes.values()):
        if node.kind == LEAF or len(node.neighbors) != 2:
            continue
        a, b = node.neighbors
        for x, other in ((a, b), (b, a)):
            nbrs = tree.nodes[x].neighbors
            nbrs[nbrs.index(node.id)] = other
        del tree.nodes[node.id]


def _project_working_rows(
    tree: QuotientPCTree, working: list[tuple[int, RowArc, bool]]
) -> None:
    """Blackening pass for each row, then undo row complementation on the
    quotient image (with the relocation rule for singleton images)."""
    n = tree.n_cols
    nbr_pos = _neighbor_positions(tree)
    for rid, arc, complemented in working:
        cols = arc.column_set(n)
        u_id, black = _blacken(tree, cols)
        node = tree.nodes[u_id]
        deg = len(node.neighbors)
        first, last = _arc_of_positions(sorted(nbr_pos[u_id][w] for w in black), deg)
        if complemented:
            old_size = (last - first) % deg + 1
            nf, nl = (last + 1) % deg, (first - 1) % deg
            if deg - old_size == 1:
                # The true row's image is the single neighbor w; for an
                # internal w the projection belongs at w instead, spanning
                # all of w's neighbors except u.
                w = tree.nodes[node.neighbors[nf]]
                if w.kind != LEAF:
                    wdeg = len(w.neighbors)
                    upos = nbr_pos[w.id][u_id]
                    w.quotient.append(
                        QuotientSpan(
                            rid,
                            w.neighbors[(upos + 1) % wdeg],
                            w.neighbors[(upos - 1) % wdeg],
                        )
                    )
                    continue
            first, last = nf, nl
        node.quotient.append(
            QuotientSpan(rid, node.neighbors[first], node.neighbors[last])
        )


def _neighbor_positions(tree: QuotientPCTree) -> dict[int, dict[int, int]]:
    return {
        u.id: {w: i for i, w in enumerate(u.neighbors)}
        for u in tree.nodes.values()
        if u.kind != LEAF
    }


def _blacken(tree: QuotientPCTree, cols: Iterable[int]) -> tuple[int, list[int]]:
    """Counter pass from the row's leaves inward.

    A node turns black when all but one of its neighbor subtrees are fully
    black; it then reports inward to the remaining neighbor.  For a valid
    row exactly one touched node stays non-black.  If that survivor was
    touched by a single black internal neighbor u, the row covers u's
    whole subtree and projects at u (all neighbors but the survivor);
    otherwise it projects at the survivor itself.
    """
    nodes = tree.nodes
    count: dict[int, int] = {}
    black_nbrs: dict[int, list[int]] = {}
    nbr_sum: dict[int, int] = {}
    queue = [tree.leaf_of_col[col] for col in cols]
    if len(queue) == 1:
        leaf = nodes[queue[0]]
        return leaf.neighbors[0], [queue[0]]
    blackened: set[int] = set(queue)
    head = 0
    while head < len(queue):
        v_id = queue[head]
        head += 1
        v = nodes[v_id]
        if v.kind == LEAF:
            inward = v.neighbors[0]
        else:
            inward = nbr_sum[v_id] - sum(black_nbrs[v_id])
        count[inward] = count.get(inward, 0) + 1
        black_nbrs.setdefault(inward, []).append(v_id)
        if inward not in nbr_sum:
            nbr_sum[inward] = sum(nodes[inward].neighbors)
        target = nodes[inward]
        if target.kind != LEAF and count[inward] == len(target.neighbors) - 1:
            blackened.add(inward)
            queue.append(inward)
    candidates = [x for x in count if x not in blackened]
    if len(candidates) != 1:
        raise AssertionError("row does not project onto a single node")
    x_id = candidates[0]
    black = black_nbrs[x_id]
    if len(black) == 1 and nodes[black[0]].kind != LEAF:
        # Row equals the whole subtree hanging off x through u.
        u = nodes[black[0]]
        return u.id, [w for w in u.neighbors if w != x_id]
    return x_id, black


def _arc_of_positions(pos: list[int], deg: int) -> tuple[int, int]:
    """(first, last) positions of a cyclically consecutive position set."""
    k = len(pos)
    if k == deg:
        raise AssertionError("image covers all neighbors")
    if k == 1:
        return pos[0], pos[0]
    gap_at = -1
    for i in range(k):
        if (pos[(i + 1) % k] - pos[i]) % deg > 1:
            if gap_at >= 0:
                raise AssertionError("projection image is not consecutive")
            gap_at = i
    if gap_at < 0:
        raise AssertionError("projection image is not consecutive")
    return pos[(gap_at + 1) % k], pos[gap_at]


def _place_trivial_rows(
    tree: QuotientPCTree,
    trivial_one: list[tuple[int, int]],
    trivial_zero: list[tuple[int, int]],
) -> None:
    for rid, col in trivial_one:
        leaf = tree.nodes[tree.leaf_of_col[col]]
        u = tree.nodes[leaf.neighbors[0]]
        u.quotient.append(QuotientSpan(rid, leaf.id, leaf.id))
    for rid, col in trivial_zero:
        leaf = tree.nodes[tree.leaf_of_col[col]]
        u = tree.nodes[leaf.neighbors[0]]
        deg = len(u.neighbors)
        pos = u.neighbors.index(leaf.id)
        u.quotient.append(
            QuotientSpan(
                rid, u.neighbors[(pos + 1) % deg], u.neighbors[(pos - 1) % deg]
            )
        )


def _reclassify_small_c_nodes(tree: QuotientPCTree) -> None:
    """A degree-4 C node whose quotient tolerates every pairing is really P.

    A node is prime exactly when some union of at least 2 and at most
    degree-2 neighbor sets strongly overlaps a quotient row; for degree 4
    that means some 2-subset of neighbors, checked exhaustively.
    """
    for node in tree.internal_nodes():
        if node.kind != C or len(node.neighbors) != 4:
            continue
        pos = {w: i for i, w in enumerate(node.neighbors)}
        row_sets = []
        for span in node.quotient:
            f, l = pos[span.first], pos[span.last]
            size = (l - f) % 4 + 1
            row_sets.append(frozenset((f + i) % 4 for i in range(size)))
        prime = any(
            x & r and x - r and r - x and len(x | r) < 4
            for a in range(4)
            for b in range(a + 1, 4)
            for x in (frozenset((a, b)),)
            for r in row_sets
        )
        if not prime:
            node.kind = P


def assert_p_quotients(tree: QuotientPCTree) -> None:
    """Every P-node quotient row selects exactly 1 or degree-1 neighbors."""
    for node in tree.internal_nodes():
        if node.kind != P:
            continue
        deg = len(node.neighbors)
        pos = {w: i for i, w in enumerate(node.neighbors)}
        for span in node.quotient:
            size = (pos[span.last] - pos[span.first]) % deg + 1
            if size not in (1, deg - 1):
                raise PQuotientViolation(
                    f"node {node.id}: quotient row {span.row_id} selects "
                    f"{size} of {deg} neighbors"
                )


def project_rows(
    tree: QuotientPCTree, s: SuccinctCircMatrix
) -> dict[int, tuple[int, tuple[int, int]]]:
    """Project the rows of s onto an existing PC tree of the same matrix.

    Returns row_id -> (node id, (first, last) neighbor ids).  Rows are
    taken at face value; no complementation bookkeeping is involved.
    """
    out: dict[int, tuple[int, tuple[int, int]]] = {}
    n = s.n_cols
    nbr_pos = _neighbor_positions(tree)
    for rid, row in enumerate(s.rows):
        if row.kind != "arc":
            raise ValueError("full/empty rows have no projection")
        size = row.size(n)
        if size == n - 1:
            missing = (row.last + 1) % n
            leaf = tree.nodes[tree.leaf_of_col[missing]]
            u = tree.nodes[leaf.neighbors[0]]
            deg = len(u.neighbors)
            pos = nbr_pos[u.id][leaf.id]
            out[rid] = (
                u.id,
                (u.neighbors[(pos + 1) % deg], u.neighbors[(pos - 1) % deg]),
            )
            continue
        cols = row.column_set(n)
        u_id, black = _blacken(tree, cols)
        node = tree.nodes[u_id]
        deg = len(node.neighbors)
        first, last = _arc_of_positions(sorted(nbr_pos[u_id][w] for w in black), deg)
        out[rid] = (u_id, (node.neighbors[first], node.neighbors[last]))
    return out


def succinct_quotients(tree: QuotientPCTree) -> QuotientPCTree:
    """Quotients are stored as (first, last) arcs; verify the storage bound
    of one span per source row and return the tree."""
    total = sum(len(u.quotient) for u in tree.internal_nodes())
    if total != tree.n_rows:
        raise AssertionError(
            f"quotient storage holds {total} spans for {tree.n_rows} rows"
        )
    return tree


def reconstruct(tree: QuotientPCTree) -> SparseBinaryMatrix:
    """The source matrix, as row sets over the original column labels."""
    rows: dict[int, tuple[int, ...]] = {}
    for node in tree.internal_nodes():
        deg = len(node.neighbors)
        pos = {w: i for i, w in enumerate(node.neighbors)}
        for span in node.quotient:
            f = pos[span.first]
            size = (pos[span.last] - f) % deg + 1
            cols: list[int] = []
            for i in range(size):
                w = node.neighbors[(f + i) % deg]
                cols.extend(tree.leaves_through(node.id, w))
            rows[span.row_id] = tuple(sorted(cols))
    if sorted(rows) != list(range(tree.n_rows)):
        raise AssertionError("row ids missing from quotients")
    return SparseBinaryMatrix(
        tree.n_rows, tree.n_cols, tuple(rows[i] for i in range(tree.n_rows))
    )


def neighbor_set_family(tree: QuotientPCTree) -> set[frozenset[int]]:
    """The set family represented by the tree (test support).

    Unions of one neighbor set or of all-but-one at C nodes; any union of
    at least one and fewer than all neighbor sets at P nodes.
    """
    family: set[frozenset[int]] = set()
    for node in tree.internal_nodes():
        sets = [frozenset(tree.leaves_through(node.id, w)) for w in node.neighbors]
        k = len(sets)
        if node.kind == C:
            for i in range(k):
                family.add(sets[i])
                family.add(frozenset().union(*(sets[j] for j in range(k) if j != i)))
        else:
            for r in range(1, k):
                for combo in combinations(range(k), r):
                    family.add(frozenset().union(*(sets[j] for j in combo)))
    return family
