"""Canonical integer codes for quotient-labeled PC trees, and the
circular-ones matrix isomorphism test built on them.

Two matrices are isomorphic exactly when their quotient-labeled PC trees
are isomorphic, and tree isomorphism is decided by rooting each tree at
its center and running level-wise isomorphism-class labeling, where a
node's signature combines its children's classes with a canonical
encoding of its quotient (sorted pairs at P nodes, best rotation of the
better direction at C nodes).

Code alphabet: -2 separates tuples, -1 marks the parent slot, 0 is both
the P flag and the leaf class, 1 is the C flag; class labels start at 2
and tuple payload integers are shifted by +2, so the reserved values
never collide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .binmat import (
    CircOnesOrdering,
    MatrixIsoCertificate,
    SparseBinaryMatrix,
    SuccinctCircMatrix,
    circ_ones_order,
    matrices_equal_under,
)
from .pctree import (
    C,
    LEAF,
    P,
    PCNode,
    QuotientPCTree,
    QuotientSpan,
    build_pc,
)

ISOMORPHIC = "isomorphic"
NOT_ISOMORPHIC = "not_isomorphic"
NEITHER_CIRCULAR_ONES = "neither_circular_ones"


class InternalCertificateError(AssertionError):
    """A certificate failed its own verification; indicates a pipeline bug."""


@dataclass(frozen=True)
class MatrixIsoResult:
    verdict: str
    certificate: Optional[MatrixIsoCertificate] = None


# ---------------------------------------------------------------------------
# Sorting primitives
# ---------------------------------------------------------------------------


def least_rotation(seq: Sequence) -> int:
    """Index of the lexicographically least rotation (Booth's algorithm).

    Elements may be any mutually comparable values; ties resolve to the
    smallest index.
    """
    s = list(seq)
    n = len(s)
    if n == 0:
        raise ValueError("empty sequence has no rotations")
    s2 = s + s
    fail = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = s2[j]
        i = fail[j - k - 1]
        while i != -1 and sj != s2[k + i + 1]:
            if sj < s2[k + i + 1]:
                k = j - i - 1
            i = fail[i]
        if sj != s2[k + i + 1]:
            if sj < s2[k]:
                k = j
            fail[j - k] = -1
        else:
            fail[j - k] = i + 1
    return k % n


def radix_sort_tuples(
    tuples: Sequence[tuple[int, ...]],
) -> tuple[list[tuple[int, ...]], list[int]]:
    """Lexicographic sort of integer tuples; a shorter tuple precedes any
    extension of it.  Returns (sorted copy, class id per input position),
    equal tuples sharing consecutive class ids that start at 2."""
    n = len(tuples)
    if n == 0:
        return [], []
    by_len: dict[int, list[int]] = {}
    for i, t in enumerate(tuples):
        by_len.setdefault(len(t), []).append(i)
    maxlen = max(by_len)
    order: list[int] = []
    for p in range(maxlen - 1, -1, -1):
        order = by_len.get(p + 1, []) + order
        buckets: dict[int, list[int]] = {}
        for i in order:
            buckets.setdefault(tuples[i][p], []).append(i)
        order = []
        for v in sorted(buckets):
            order.extend(buckets[v])
    order = by_len.get(0, []) + order
    classes = [0] * n
    cls = 1
    prev = None
    for i in order:
        if tuples[i] != prev:
            cls += 1
            prev = tuples[i]
        classes[i] = cls
    return [tuples[i] for i in order], classes


# ---------------------------------------------------------------------------
# Quotient encodings
# ---------------------------------------------------------------------------


def _p_components(
    node: PCNode, labels: Optional[dict[int, int]]
) -> tuple[tuple[int, ...], ...]:
    deg = len(node.neighbors)
    pos = {w: i for i, w in enumerate(node.neighbors)}
    excl = [0] * deg
    incl = [0] * deg
    for span in node.quotient:
        f, l = pos[span.first], pos[span.last]
        size = (l - f) % deg + 1
        if size == 1:
            incl[f] += 1
        elif size == deg - 1:
            excl[(l + 1) % deg] += 1
        else:
            raise AssertionError("P quotient row of illegal width")
    comps = []
    for i, w in enumerate(node.neighbors):
        if labels is None:
            comps.append((excl[i], incl[i]))
        else:
            comps.append((labels[w], excl[i], incl[i]))
    comps.sort()
    return tuple(comps)


def encode_p_quotient(
    node: PCNode, neighbor_labels: Optional[dict[int, int]] = None
) -> tuple:
    """Canonical P-node encoding: flag 0, then per neighbor the pair
    (#rows excluding only it, #rows containing only it), with the
    neighbor's class label prepended when labels are given, sorted."""
    return (0,) + _p_components(node, neighbor_labels)


def _c_direction_lists(
    node: PCNode, labels: Optional[dict[int, int]]
) -> tuple[list[tuple], list[tuple], list[int], list[int]]:
    """Min-rotated tuple lists for the two travel directions, plus the
    neighbor ids in each list's enumeration order."""
    nbrs = node.neighbors
    k = len(nbrs)
    pos = {w: i for i, w in enumerate(nbrs)}
    by_end: list[list[int]] = [[] for _ in range(k)]
    by_start: list[list[int]] = [[] for _ in range(k)]
    for span in node.quotient:
        f, l = pos[span.first], pos[span.last]
        size = (l - f) % k + 1
        by_end[l].append(size)
        by_start[f].append(size)

    def tup(p: int, bucket: list[list[int]]) -> tuple:
        lens = tuple(sorted(bucket[p]))
        if labels is None:
            return lens
        return (labels[nbrs[p]],) + lens

    cw_order = [0] + list(range(k - 1, 0, -1))  # reverse traversal
    ccw_order = list(range(k))  # forward traversal
    cw = [tup(p, by_end) for p in cw_order]
    ccw = [tup(p, by_start) for p in ccw_order]
    r1 = least_rotation(cw)
    r2 = least_rotation(ccw)
    cw_rot = cw[r1:] + cw[:r1]
    ccw_rot = ccw[r2:] + ccw[:r2]
    cw_ids = [nbrs[cw_order[(r1 + i) % k]] for i in range(k)]
    ccw_ids = [nbrs[ccw_order[(r2 + i) % k]] for i in range(k)]
    return cw_rot, ccw_rot, cw_ids, ccw_ids


def c_direction_candidates(
    node: PCNode, neighbor_labels: Optional[dict[int, int]] = None
) -> tuple[tuple, tuple]:
    """(clockwise, counterclockwise) min-rotated tuple lists, unflagged."""
    cw, ccw, _, _ = _c_direction_lists(node, neighbor_labels)
    return tuple(cw), tuple(ccw)


def encode_c_quotient(
    node: PCNode, neighbor_labels: Optional[dict[int, int]] = None
) -> tuple:
    """Canonical C-node encoding: flag 1, then the lexicographically
    smaller of the two directions' least rotations; per neighbor the
    sorted lengths of the quotient rows whose travel-direction-most
    element sits there."""
    cw, ccw, _, _ = _c_direction_lists(node, neighbor_labels)
    best = cw if cw <= ccw else ccw
    return (1,) + tuple(best)


def _encode_node(
    tree: QuotientPCTree,
    u_id: int,
    parent: Optional[int],
    child_labels: dict[int, int],
) -> tuple[tuple, tuple[str, object]]:
    """Structured encoding plus an alignment record for one internal node."""
    node = tree.nodes[u_id]
    labels: dict[int, int] = {}
    for w in node.neighbors:
        if w == parent:
            labels[w] = -1
        else:
            wn = tree.nodes[w]
            labels[w] = 0 if wn.kind == LEAF else child_labels[w]
    if node.kind == C:
        cw, ccw, cw_ids, ccw_ids = _c_direction_lists(node, labels)
        if cw <= ccw:
            return (1,) + tuple(cw), ("C", cw_ids)
        return (1,) + tuple(ccw), ("C", ccw_ids)
    comps = _p_components(node, labels)
    by_child: dict[int, tuple] = {}
    deg = len(node.neighbors)
    pos = {w: i for i, w in enumerate(node.neighbors)}
    excl = [0] * deg
    incl = [0] * deg
    for span in node.quotient:
        f, l = pos[span.first], pos[span.last]
        size = (l - f) % deg + 1
        if size == 1:
            incl[f] += 1
        else:
            excl[(l + 1) % deg] += 1
    for i, w in enumerate(node.neighbors):
        by_child[w] = (labels[w], excl[i], incl[i])
    return (0,) + comps, ("P", by_child)


def _flatten(structured: tuple) -> tuple[int, ...]:
    out = [structured[0]]
    for comp in structured[1:]:
        out.append(comp[0])
        out.extend(x + 2 for x in comp[1:])
        out.append(-2)
    return tuple(out)


# ---------------------------------------------------------------------------
# Rooting at the center
# ---------------------------------------------------------------------------


@dataclass
class RootedPCTree:
    tree: QuotientPCTree
    root: int
    parent: dict[int, Optional[int]]
    height: int
    levels: list[list[int]]  # internal node ids per level, 0..height


def root_at_center(t: QuotientPCTree) -> RootedPCTree:
    """Root at the tree center; an edge center is subdivided by a pseudo
    P node with an empty quotient that takes over the endpoints' mutual
    neighbor slots."""
    deg = {i: len(t.nodes[i].neighbors) for i in t.nodes}
    removed: set[int] = set()
    layer = [i for i in t.nodes if deg[i] <= 1]
    count = len(t.nodes)
    while count > 2:
        count -= len(layer)
        removed.update(layer)
        nxt = []
        for u in layer:
            for w in t.nodes[u].neighbors:
                if w not in removed:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
        layer = nxt
    center = sorted(layer)

    if len(center) == 1:
        tree, root = t, center[0]
    else:
        v, w = center
        x_id = max(t.nodes) + 1
        nodes = dict(t.nodes)
        for a, b in ((v, w), (w, v)):
            old = t.nodes[a]
            nbrs = [x_id if y == b else y for y in old.neighbors]
            quo = [
                QuotientSpan(
                    s.row_id,
                    x_id if s.first == b else s.first,
                    x_id if s.last == b else s.last,
                )
                for s in old.quotient
            ]
            nodes[a] = PCNode(old.id, old.kind, old.column, nbrs, quo)
        nodes[x_id] = PCNode(x_id, P, -1, [v, w], [])
        tree = QuotientPCTree(t.n_cols, t.n_rows, nodes, t.leaf_of_col)
        root = x_id

    parent: dict[int, Optional[int]] = {root: None}
    depth = {root: 0}
    order = [root]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for w in tree.nodes[u].neighbors:
            if w != parent[u]:
                parent[w] = u
                depth[w] = depth[u] + 1
                order.append(w)
    height = max(depth.values())
    levels: list[list[int]] = [[] for _ in range(height + 1)]
    for u, d in depth.items():
        if tree.nodes[u].kind != LEAF:
            levels[height - d].append(u)
    return RootedPCTree(tree, root, parent, height, levels)


# ---------------------------------------------------------------------------
# Level-wise labeling, codes, and alignment
# ---------------------------------------------------------------------------


def co_label(rts: list[RootedPCTree]):
    """Label all trees' nodes level by level in one batch so class ids
    are comparable across trees.

    Returns (labels, records, flats): per tree, dicts keyed by node id.
    """
    height = rts[0].height
    if any(rt.height != height for rt in rts):
        raise ValueError("co-labeling requires equal heights")
    labels = [dict() for _ in rts]
    records = [dict() for _ in rts]
    flats = [dict() for _ in rts]
    for level in range(height + 1):
        batch: list[tuple[int, int]] = []
        batch_flat: list[tuple[int, ...]] = []
        for ti, rt in enumerate(rts):
            for u in rt.levels[level]:
                structured, record = _encode_node(
                    rt.tree, u, rt.parent[u], labels[ti]
                )
                flat = _flatten(structured)
                records[ti][u] = record
                flats[ti][u] = flat
                batch.append((ti, u))
                batch_flat.append(flat)
        if batch:
            _, classes = radix_sort_tuples(batch_flat)
            for (ti, u), cls in zip(batch, classes):
                labels[ti][u] = cls
    return labels, records, flats


def canonical_tree_code(rt: RootedPCTree) -> list[int]:
    """Self-contained code: per level, the sorted flattened encodings of
    the internal nodes, levels separated by an extra -2.  Two trees get
    equal codes exactly when they are isomorphic."""
    _, _, flats = co_label([rt])
    code: list[int] = []
    for level in range(rt.height + 1):
        for flat in sorted(flats[0][u] for u in rt.levels[level]):
            code.extend(flat)
        code.append(-2)
    return code


def _align(
    rt1: RootedPCTree,
    rt2: RootedPCTree,
    records1: dict,
    records2: dict,
) -> dict[int, int]:
    """Column map between two co-labeled, equal-class rooted trees."""
    colmap: dict[int, int] = {}
    stack = [(rt1.root, rt2.root)]
    while stack:
        u1, u2 = stack.pop()
        n1 = rt1.tree.nodes[u1]
        n2 = rt2.tree.nodes[u2]
        if n1.kind == LEAF or n2.kind == LEAF:
            if n1.kind != LEAF or n2.kind != LEAF:
                raise InternalCertificateError("leaf aligned with internal node")
            colmap[n1.column] = n2.column
            continue
        kind1, rec1 = records1[u1]
        kind2, rec2 = records2[u2]
        if kind1 != kind2:
            raise InternalCertificateError("node kinds disagree")
        if kind1 == "C":
            seq1, seq2 = rec1, rec2
            if len(seq1) != len(seq2):
                raise InternalCertificateError("C degree mismatch")
            for w1, w2 in zip(seq1, seq2):
                p1 = w1 == rt1.parent[u1]
                p2 = w2 == rt2.parent[u2]
                if p1 != p2:
                    raise InternalCertificateError("parent slots misaligned")
                if not p1:
                    stack.append((w1, w2))
        else:
            groups1: dict[tuple, list[int]] = {}
            groups2: dict[tuple, list[int]] = {}
            for w, comp in rec1.items():
                if w != rt1.parent[u1]:
                    groups1.setdefault(comp, []).append(w)
            for w, comp in rec2.items():
                if w != rt2.parent[u2]:
                    groups2.setdefault(comp, []).append(w)
            if sorted(groups1) != sorted(groups2):
                raise InternalCertificateError("P child groups disagree")
            for comp in groups1:
                g1, g2 = groups1[comp], groups2[comp]
                if len(g1) != len(g2):
                    raise InternalCertificateError("P group sizes disagree")
                stack.extend(zip(g1, g2))
    return colmap


# ---------------------------------------------------------------------------
# Matrix isomorphism
# ---------------------------------------------------------------------------


def matrix_iso(m1: SparseBinaryMatrix, m2: SparseBinaryMatrix) -> MatrixIsoResult:
    """Three-way verdict: both non-circular-ones inputs are rejected, a
    single non-circular-ones input settles non-isomorphism, and otherwise
    the quotient-labeled PC trees are compared, shipping a verified
    certificate on success."""
    o1 = circ_ones_order(m1)
    o2 = circ_ones_order(m2)
    if o1 is None and o2 is None:
        return MatrixIsoResult(NEITHER_CIRCULAR_ONES)
    if o1 is None or o2 is None:
        return MatrixIsoResult(NOT_ISOMORPHIC)
    return _iso_on_orderings(m1, o1, m2, o2)


def matrix_iso_succinct(s1: SuccinctCircMatrix, s2: SuccinctCircMatrix) -> MatrixIsoResult:
    """Isomorphism of two succinct matrices (circular-ones by type)."""
    m1, m2 = s1.expand(), s2.expand()
    o1 = CircOnesOrdering(s1, tuple(range(s1.n_cols)))
    o2 = CircOnesOrdering(s2, tuple(range(s2.n_cols)))
    return _iso_on_orderings(m1, o1, m2, o2)


def _strip_trivial(
    s: SuccinctCircMatrix,
) -> tuple[SuccinctCircMatrix, list[int], int, int]:
    arcs = []
    ids = []
    zeros = ones = 0
    for rid, row in enumerate(s.rows):
        if row.kind == "empty":
            zeros += 1
        elif row.kind == "full":
            ones += 1
        else:
            arcs.append(row)
            ids.append(rid)
    return (
        SuccinctCircMatrix(len(arcs), s.n_cols, tuple(arcs)),
        ids,
        zeros,
        ones,
    )


def _iso_on_orderings(
    m1: SparseBinaryMatrix,
    o1: CircOnesOrdering,
    m2: SparseBinaryMatrix,
    o2: CircOnesOrdering,
) -> MatrixIsoResult:
    if m1.n_rows != m2.n_rows or m1.n_cols != m2.n_cols:
        return MatrixIsoResult(NOT_ISOMORPHIC)
    s1, _, zeros1, ones1 = _strip_trivial(o1.succinct)
    s2, _, zeros2, ones2 = _strip_trivial(o2.succinct)
    if zeros1 != zeros2 or ones1 != ones2:
        return MatrixIsoResult(NOT_ISOMORPHIC)

    n = m1.n_cols
    if n <= 2:
        return _degenerate_iso(m1, m2)

    t1 = build_pc(s1)
    t2 = build_pc(s2)
    rt1 = root_at_center(t1)
    rt2 = root_at_center(t2)
    if rt1.height != rt2.height:
        return MatrixIsoResult(NOT_ISOMORPHIC)
    labels, records, _ = co_label([rt1, rt2])
    if labels[0][rt1.root] != labels[1][rt2.root]:
        return MatrixIsoResult(NOT_ISOMORPHIC)

    posmap = _align(rt1, rt2, records[0], records[1])
    # posmap is between column positions of the two succinct orderings;
    # compose with the orderings to map original columns.
    inv1 = [0] * n
    for p, col in enumerate(o1.column_order):
        inv1[col] = p
    col_perm = tuple(o2.column_order[posmap[inv1[c]]] for c in range(n))
    cert = _certificate_with_rows(m1, m2, col_perm)
    return MatrixIsoResult(ISOMORPHIC, cert)


def _certificate_with_rows(
    m1: SparseBinaryMatrix, m2: SparseBinaryMatrix, col_perm: tuple[int, ...]
) -> MatrixIsoCertificate:
    pool: dict[tuple[int, ...], list[int]] = {}
    for j, row in enumerate(m2.rows):
        pool.setdefault(row, []).append(j)
    row_perm = []
    for row in m1.rows:
        key = tuple(sorted(col_perm[c] for c in row))
        slots = pool.get(key)
        if not slots:
            raise InternalCertificateError("column map does not match row multisets")
        row_perm.append(slots.pop())
    cert = MatrixIsoCertificate(col_perm, tuple(row_perm))
    if not matrices_equal_under(m1, m2, cert):
        raise InternalCertificateError("certificate failed verification")
    return cert


def _degenerate_iso(
    m1: SparseBinaryMatrix, m2: SparseBinaryMatrix
) -> MatrixIsoResult:
    from itertools import permutations

    rows2 = sorted(m2.rows)
    for perm in permutations(range(m1.n_cols)):
        mapped = sorted(tuple(sorted(perm[c] for c in row)) for row in m1.rows)
        if mapped == rows2:
            return MatrixIsoResult(
                ISOMORPHIC, _certificate_with_rows(m1, m2, tuple(perm))
            )
    return MatrixIsoResult(NOT_ISOMORPHIC)


# ---------------------------------------------------------------------------
# Canonical codes for whole matrices
# ---------------------------------------------------------------------------


def canonical_code_sparse(m: SparseBinaryMatrix) -> Optional[list[int]]:
    """Single-line canonical form; equal codes exactly for isomorphic
    circular-ones matrices.  None when the matrix is not circular-ones."""
    o = circ_ones_order(m)
    if o is None:
        return None
    return _code_from_ordering(m, o)


def canonical_code_succinct(s: SuccinctCircMatrix) -> list[int]:
    o = CircOnesOrdering(s, tuple(range(s.n_cols)))
    return _code_from_ordering(s.expand(), o)


def _code_from_ordering(m: SparseBinaryMatrix, o: CircOnesOrdering) -> list[int]:
    s, _, zeros, ones = _strip_trivial(o.succinct)
    header = [m.n_cols, zeros, ones]
    if m.n_cols <= 2:
        from itertools import permutations

        best = None
        for perm in permutations(range(m.n_cols)):
            body: list[int] = []
            for row in sorted(
                tuple(sorted(perm[c] for c in row)) for row in m.rows
            ):
                body.extend(row)
                body.append(-2)
            if best is None or body < best:
                best = body
        return header + (best or [])
    tree = build_pc(s)
    rt = root_at_center(tree)
    return header + canonical_tree_code(rt)
