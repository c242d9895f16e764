"""Booth-Lueker PQ tree for consecutive-ones testing.

The tree represents exactly the column orders in which every reduced row
is consecutive: children of a P node may be permuted arbitrarily, children
of a Q node may only be reversed.  ``reduce`` applies the classic template
catalogue (P1-P6, Q1-Q3) bottom-up over the pertinent subtree.

P children are stored as an insertion-ordered set (a dict) and Q children
as a doubly-linked sibling list, so one reduction touches the pertinent
subtree plus O(1) neighbours per node, never the whole tree.  The cost of
a reduction is O(pertinent subtree + total depth of the pertinent leaves);
the amortized-linear bookkeeping of the original algorithm is not
attempted.
"""

from __future__ import annotations

from itertools import permutations, product
from typing import Iterable, Optional

from .binmat import SparseBinaryMatrix

LEAF = "leaf"
P = "P"
Q = "Q"

_FULL = 1
_PARTIAL = 2

_HEAD = 0
_TAIL = 1


class PQNode:
    __slots__ = (
        "kind",
        "parent",
        "column",
        "pchildren",
        "first_child",
        "last_child",
        "child_count",
        "prev_sib",
        "next_sib",
    )

    def __init__(self, kind: str, column: int = -1):
        self.kind = kind
        self.parent: Optional[PQNode] = None
        self.column = column
        self.pchildren: Optional[dict] = {} if kind == P else None
        self.first_child: Optional[PQNode] = None
        self.last_child: Optional[PQNode] = None
        self.child_count = 0
        self.prev_sib: Optional[PQNode] = None
        self.next_sib: Optional[PQNode] = None

    def children(self) -> list["PQNode"]:
        if self.kind == P:
            return list(self.pchildren)
        out = []
        c = self.first_child
        while c is not None:
            out.append(c)
            c = c.next_sib
        return out

    def p_add(self, child: "PQNode") -> None:
        self.pchildren[child] = None
        child.parent = self
        self.child_count += 1

    def p_remove(self, child: "PQNode") -> None:
        del self.pchildren[child]
        child.parent = None
        self.child_count -= 1

    def q_attach(self, child: "PQNode", end: int) -> None:
        child.parent = self
        if self.child_count == 0:
            self.first_child = self.last_child = child
            child.prev_sib = child.next_sib = None
        elif end == _TAIL:
            child.prev_sib = self.last_child
            child.next_sib = None
            self.last_child.next_sib = child
            self.last_child = child
        else:
            child.next_sib = self.first_child
            child.prev_sib = None
            self.first_child.prev_sib = child
            self.first_child = child
        self.child_count += 1


class PQTree:
    def __init__(self, root: PQNode, leaves: list[PQNode]):
        self.root = root
        self.leaves = leaves

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    # -- structure edits ----------------------------------------------------

    def replace_node(self, old: PQNode, new: PQNode) -> None:
        """Put ``new`` where ``old`` sits (same parent slot, or tree root)."""
        parent = old.parent
        if parent is None:
            self.root = new
            new.parent = None
            new.prev_sib = new.next_sib = None
            return
        if parent.kind == P:
            del parent.pchildren[old]
            parent.pchildren[new] = None
            new.parent = parent
            old.parent = None
            return
        new.prev_sib = old.prev_sib
        new.next_sib = old.next_sib
        if old.prev_sib is not None:
            old.prev_sib.next_sib = new
        else:
            parent.first_child = new
        if old.next_sib is not None:
            old.next_sib.prev_sib = new
        else:
            parent.last_child = new
        new.parent = parent
        old.parent = None
        old.prev_sib = old.next_sib = None

    def q_splice(self, u: PQNode, q: PQNode, seq: list[PQNode]) -> None:
        """Replace child ``q`` of Q node ``u`` by the nodes of ``seq`` in order."""
        prev, nxt = q.prev_sib, q.next_sib
        for node in seq:
            node.parent = u
        for a, b in zip(seq, seq[1:]):
            a.next_sib = b
            b.prev_sib = a
        seq[0].prev_sib = prev
        seq[-1].next_sib = nxt
        if prev is not None:
            prev.next_sib = seq[0]
        else:
            u.first_child = seq[0]
        if nxt is not None:
            nxt.prev_sib = seq[-1]
        else:
            u.last_child = seq[-1]
        q.parent = None
        q.prev_sib = q.next_sib = None
        u.child_count += len(seq) - 1

    def convert_q2_to_p(self, q: PQNode) -> None:
        """A Q node with two children is equivalent to a P node."""
        kids = q.children()
        q.kind = P
        q.pchildren = {}
        q.first_child = q.last_child = None
        q.child_count = 0
        for c in kids:
            c.prev_sib = c.next_sib = None
            q.p_add(c)

    def _splice_single_child(self, u: PQNode) -> None:
        """A node left with one child is replaced by that child."""
        if u.child_count == 1:
            only = u.children()[0]
            if u.kind == P:
                u.p_remove(only)
            else:
                u.first_child = u.last_child = None
                u.child_count = 0
                only.prev_sib = only.next_sib = None
            self.replace_node(u, only)

    # -- reduction ----------------------------------------------------------

    def reduce(self, cols: Iterable[int]) -> bool:
        """Constrain the tree so that the given columns are consecutive.

        Returns False when impossible (tree state is then undefined).
        """
        col_list = list(cols)
        k = len(col_list)
        if k <= 1 or k >= self.n_leaves:
            return True

        pert: dict[PQNode, int] = {}
        for col in col_list:
            node: Optional[PQNode] = self.leaves[col]
            while node is not None:
                pert[node] = pert.get(node, 0) + 1
                node = node.parent

        node = self.leaves[col_list[0]]
        while pert[node] != k:
            node = node.parent
        lca = node

        pert_children: dict[PQNode, list[PQNode]] = {}
        for x in pert:
            p = x.parent
            if p is not None:
                pert_children.setdefault(p, []).append(x)
        need = {x: len(pert_children.get(x, ())) for x in pert}

        # results[x] = (state, node now occupying x's slot)
        results: dict[PQNode, tuple[int, PQNode]] = {}
        full_end: dict[PQNode, int] = {}
        ready = [self.leaves[c] for c in col_list]
        while ready:
            u = ready.pop()
            parent = u.parent
            if u.kind == LEAF:
                results[u] = (_FULL, u)
            elif not self._apply_template(
                u, u is lca, pert_children.get(u, ()), results, full_end
            ):
                return False
            if u is lca:
                return True
            need[parent] -= 1
            if need[parent] == 0:
                ready.append(parent)
        raise AssertionError("pertinent root never reached")

    def _apply_template(self, u, is_root, pchilds, results, full_end) -> bool:
        fulls: list[PQNode] = []
        partials: list[PQNode] = []
        for c in pchilds:
            st, now = results[c]
            if st == _FULL:
                fulls.append(now)
            else:
                partials.append(now)
        if not partials and len(fulls) == u.child_count:
            results[u] = (_FULL, u)
            return True
        if u.kind == P:
            return self._template_p(u, is_root, fulls, partials, results, full_end)
        return self._template_q(u, is_root, fulls, partials, results, full_end)

    def _group_fulls(self, u: PQNode, fulls: list[PQNode]) -> Optional[PQNode]:
        """Detach full children from P node u; return a single carrier node."""
        for c in fulls:
            u.p_remove(c)
        if not fulls:
            return None
        if len(fulls) == 1:
            only = fulls[0]
            only.prev_sib = only.next_sib = None
            return only
        pf = PQNode(P)
        for c in fulls:
            c.prev_sib = c.next_sib = None
            pf.p_add(c)
        return pf

    def _template_p(self, u, is_root, fulls, partials, results, full_end) -> bool:
        n_partial = len(partials)
        if is_root:
            if n_partial == 0:
                # P2: group the full children under one new P child.
                if len(fulls) >= 2:
                    u.p_add(self._group_fulls(u, fulls))
                return True
            if n_partial == 1:
                # P4: full children move to the full end of the partial child.
                q = partials[0]
                pf = self._group_fulls(u, fulls)
                if pf is not None:
                    q.q_attach(pf, full_end[q])
                if q.child_count == 2:
                    self.convert_q2_to_p(q)
                self._splice_single_child(u)
                return True
            if n_partial == 2:
                # P6: merge both partial children through the fulls.
                q1, q2 = partials
                pf = self._group_fulls(u, fulls)
                end = full_end[q1]
                if pf is not None:
                    q1.q_attach(pf, end)
                seq = q2.children()
                if full_end[q2] == _TAIL:
                    seq.reverse()  # walk q2 from its full side inward
                u.p_remove(q2)
                for node in seq:
                    node.prev_sib = node.next_sib = None
                    q1.q_attach(node, end)
                self._splice_single_child(u)
                return True
            return False
        # Non-root templates; u's slot may end up held by another node.
        if n_partial == 0:
            # P3: split into a partial Q; u is reused as the empty-side group.
            q = PQNode(Q)
            pf = self._group_fulls(u, fulls)
            self.replace_node(u, q)
            if u.child_count >= 2:
                left: PQNode = u
            else:
                left = u.children()[0]
                u.p_remove(left)
            q.q_attach(left, _TAIL)
            q.q_attach(pf, _TAIL)
            full_end[q] = _TAIL
            results[u] = (_PARTIAL, q)
            return True
        if n_partial == 1:
            # P5: the partial child absorbs u's empty and full children.
            q = partials[0]
            pf = self._group_fulls(u, fulls)
            u.p_remove(q)
            q.prev_sib = q.next_sib = None
            self.replace_node(u, q)
            empty_side = _HEAD if full_end[q] == _TAIL else _TAIL
            if u.child_count >= 2:
                q.q_attach(u, empty_side)
            elif u.child_count == 1:
                only = u.children()[0]
                u.p_remove(only)
                q.q_attach(only, empty_side)
            if pf is not None:
                q.q_attach(pf, full_end[q])
            results[u] = (_PARTIAL, q)
            return True
        return False

    def _template_q(self, u, is_root, fulls, partials, results, full_end) -> bool:
        if len(partials) > (2 if is_root else 1):
            return False
        state = {}
        for node in fulls:
            state[node] = _FULL
        for node in partials:
            state[node] = _PARTIAL

        # The pertinent children must form one contiguous sibling block.
        start = fulls[0] if fulls else partials[0]
        left = start
        while left.prev_sib is not None and left.prev_sib in state:
            left = left.prev_sib
        right = start
        while right.next_sib is not None and right.next_sib in state:
            right = right.next_sib
        count = 0
        x = left
        while x is not None and x is not right.next_sib:
            if x not in state:
                return False
            count += 1
            x = x.next_sib
        if count != len(state):
            return False
        # Partial children only at the extremes of the block, fulls inside.
        for q in partials:
            if q is not left and q is not right:
                return False

        if is_root:
            # Q3-style root pattern: empties* [partial] fulls* [partial] empties*
            if len(partials) == 2 and left is right:
                return False
            for q in partials:
                seq = q.children()
                if q is left:
                    if full_end[q] == _HEAD:
                        seq.reverse()  # full side must face the block interior
                else:
                    if full_end[q] == _TAIL:
                        seq.reverse()
                self.q_splice(u, q, seq)
            return True

        # Q2: the pertinent block must reach one physical end of u.
        q = partials[0] if partials else None
        if right.next_sib is None and (q is None or q is left):
            u_end = _TAIL
        elif left.prev_sib is None and (q is None or q is right):
            u_end = _HEAD
        else:
            return False
        if q is not None:
            seq = q.children()
            if u_end == _TAIL:
                if full_end[q] == _HEAD:
                    seq.reverse()
            else:
                if full_end[q] == _TAIL:
                    seq.reverse()
            self.q_splice(u, q, seq)
        full_end[u] = u_end
        results[u] = (_PARTIAL, u)
        return True

    # -- inspection -----------------------------------------------------------

    def frontier(self) -> list[int]:
        """Left-to-right order of leaf columns."""
        out: list[int] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.kind == LEAF:
                out.append(node.column)
            else:
                stack.extend(reversed(node.children()))
        return out

    def validate(self) -> None:
        """Check structural invariants; raises AssertionError on violation."""
        seen_cols = []
        stack = [(self.root, None)]
        while stack:
            node, parent = stack.pop()
            assert node.parent is parent
            if node.kind == LEAF:
                seen_cols.append(node.column)
                continue
            kids = node.children()
            if node.kind == P:
                assert len(kids) >= 2, "P node with fewer than 2 children"
            else:
                assert len(kids) >= 3, "Q node with fewer than 3 children"
                assert kids[0].prev_sib is None and kids[-1].next_sib is None
            for c in kids:
                stack.append((c, node))
        assert sorted(seen_cols) == list(range(self.n_leaves))

    def to_dot(self) -> str:
        """DOT-like debug dump."""
        lines = ["graph pqtree {"]
        ids: dict[PQNode, int] = {}

        def nid(node: PQNode) -> int:
            if node not in ids:
                ids[node] = len(ids)
            return ids[node]

        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.kind == LEAF:
                lines.append(f'  n{nid(node)} [label="{node.column}" shape=plain];')
                continue
            shape = "circle" if node.kind == P else "box"
            lines.append(f'  n{nid(node)} [label="{node.kind}" shape={shape}];')
            for c in node.children():
                lines.append(f"  n{nid(node)} -- n{nid(c)};")
                stack.append(c)
        lines.append("}")
        return "\n".join(lines)


def build_universal(n_cols: int) -> PQTree:
    """The tree with no constraints: one P node over all column leaves."""
    if n_cols < 1:
        raise ValueError("need at least one column")
    leaves = [PQNode(LEAF, column=c) for c in range(n_cols)]
    if n_cols == 1:
        return PQTree(leaves[0], leaves)
    root = PQNode(P)
    for leaf in leaves:
        root.p_add(leaf)
    return PQTree(root, leaves)


def build_pq(m: SparseBinaryMatrix) -> Optional[PQTree]:
    """PQ tree of all consecutive-ones column orders of m, or None."""
    if m.n_cols < 1:
        raise ValueError("matrix must have at least one column")
    tree = build_universal(m.n_cols)
    distinct = {tuple(row) for row in m.rows}
    for row in sorted(distinct, key=len, reverse=True):
        if not tree.reduce(row):
            return None
    return tree


def frontier(t: PQTree) -> list[int]:
    return t.frontier()


def enumerate_frontiers(t: PQTree) -> set[tuple[int, ...]]:
    """All frontiers reachable by P-permutation and Q-reversal (test helper).

    Exponential; intended for trees over a handful of columns only.
    """

    def orders(node: PQNode) -> list[tuple[int, ...]]:
        if node.kind == LEAF:
            return [(node.column,)]
        child_orders = [orders(c) for c in node.children()]
        out = set()
        if node.kind == P:
            for perm in permutations(range(len(child_orders))):
                for combo in product(*(child_orders[i] for i in perm)):
                    out.add(tuple(x for part in combo for x in part))
        else:
            for seq in (child_orders, list(reversed(child_orders))):
                for combo in product(*seq):
                    out.add(tuple(x for part in combo for x in part))
        return sorted(out)

    return set(orders(t.root))
