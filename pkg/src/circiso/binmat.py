"""Binary matrix representations and circular-ones recognition.

Two interchangeable forms are used throughout:

* ``SparseBinaryMatrix`` -- rows as sorted column-index tuples.
* ``SuccinctCircMatrix`` -- one ``RowArc`` per row; each row is either a
  circular interval of columns or an all-ones/all-zeros code.  This form
  only exists for matrices given in a circular-ones column order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence


class MatrixParseError(ValueError):
    """Raised when a matrix text file is malformed."""


ARC = "arc"
FULL = "full"
EMPTY = "empty"


@dataclass(frozen=True)
class RowArc:
    """One row of a succinct matrix: a circular column interval or a code.

    An ``arc`` row covers columns first, first+1, ..., last taken modulo
    the column count (inclusive, possibly wrapping).  It is never empty
    and never all columns; those cases use the ``empty``/``full`` codes.
    """

    kind: str
    first: int = -1
    last: int = -1

    @staticmethod
    def arc(first: int, last: int) -> "RowArc":
        return RowArc(ARC, first, last)

    @staticmethod
    def full() -> "RowArc":
        return RowArc(FULL)

    @staticmethod
    def empty() -> "RowArc":
        return RowArc(EMPTY)

    def size(self, n_cols: int) -> int:
        if self.kind == FULL:
            return n_cols
        if self.kind == EMPTY:
            return 0
        return (self.last - self.first) % n_cols + 1

    def column_set(self, n_cols: int) -> tuple[int, ...]:
        """Expand to a sorted tuple of column indices."""
        if self.kind == FULL:
            return tuple(range(n_cols))
        if self.kind == EMPTY:
            return ()
        k = self.size(n_cols)
        return tuple(sorted((self.first + i) % n_cols for i in range(k)))

    def validate(self, n_cols: int) -> None:
        if self.kind in (FULL, EMPTY):
            return
        if self.kind != ARC:
            raise ValueError(f"bad row kind {self.kind!r}")
        if not (0 <= self.first < n_cols and 0 <= self.last < n_cols):
            raise ValueError("arc endpoints out of range")
        if self.size(n_cols) >= n_cols:
            raise ValueError("arc must not cover all columns; use the full code")


@dataclass(frozen=True)
class SparseBinaryMatrix:
    n_rows: int
    n_cols: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.n_rows:
            raise ValueError("row count mismatch")
        for row in self.rows:
            if any(not (0 <= c < self.n_cols) for c in row):
                raise ValueError("column index out of range")
            if any(row[i] >= row[i + 1] for i in range(len(row) - 1)):
                raise ValueError("row indices must be strictly increasing")

    @property
    def size(self) -> int:
        """Rows + columns + number of ones; the sparse storage measure."""
        return self.n_rows + self.n_cols + sum(len(r) for r in self.rows)

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], n_cols: int) -> "SparseBinaryMatrix":
        return SparseBinaryMatrix(
            len(rows), n_cols, tuple(tuple(sorted(set(r))) for r in rows)
        )


@dataclass(frozen=True)
class SuccinctCircMatrix:
    n_rows: int
    n_cols: int
    rows: tuple[RowArc, ...]

    def __post_init__(self):
        if len(self.rows) != self.n_rows:
            raise ValueError("row count mismatch")
        for row in self.rows:
            row.validate(self.n_cols)

    def expand(self) -> SparseBinaryMatrix:
        return SparseBinaryMatrix(
            self.n_rows,
            self.n_cols,
            tuple(r.column_set(self.n_cols) for r in self.rows),
        )


def expand(s: SuccinctCircMatrix) -> SparseBinaryMatrix:
    return s.expand()


def row_arc_from_set(cols: Sequence[int], n_cols: int) -> Optional[RowArc]:
    """Succinct form of one row, or None if not circularly consecutive.

    ``cols`` are the positions of the ones under the current column order.
    """
    k = len(cols)
    if k == 0:
        return RowArc.empty()
    if k == n_cols:
        return RowArc.full()
    pos = sorted(cols)
    if k == 1:
        return RowArc.arc(pos[0], pos[0])
    # Circularly consecutive iff exactly one cyclic gap exceeds 1.
    gap_at = -1
    for i in range(k):
        nxt = pos[(i + 1) % k]
        if (nxt - pos[i]) % n_cols > 1:
            if gap_at >= 0:
                return None
            gap_at = i
    if gap_at < 0:
        return None  # unreachable for k < n_cols
    return RowArc.arc(pos[(gap_at + 1) % k], pos[gap_at])


def compress(m: SparseBinaryMatrix) -> Optional[SuccinctCircMatrix]:
    """Succinct form under the stored column order, or None if some row
    is not circularly consecutive in that order."""
    rows = []
    for row in m.rows:
        arc = row_arc_from_set(row, m.n_cols)
        if arc is None:
            return None
        rows.append(arc)
    return SuccinctCircMatrix(m.n_rows, m.n_cols, tuple(rows))


def complement_row_succinct(r: RowArc, n_cols: int) -> RowArc:
    """Complement of a row in O(1): (l+1, f-1) modulo the column count."""
    if n_cols < 2:
        raise ValueError("complement requires at least 2 columns")
    if r.kind == FULL:
        return RowArc.empty()
    if r.kind == EMPTY:
        return RowArc.full()
    return RowArc.arc((r.last + 1) % n_cols, (r.first - 1) % n_cols)


@dataclass(frozen=True)
class MatrixIsoCertificate:
    """col_perm[j] / row_perm[i] give the image in the second matrix of
    column j / row i of the first."""

    col_perm: tuple[int, ...]
    row_perm: tuple[int, ...]


def matrices_equal_under(
    m1: SparseBinaryMatrix, m2: SparseBinaryMatrix, cert: MatrixIsoCertificate
) -> bool:
    """True iff applying the certificate to m1 yields exactly m2."""
    if m1.n_rows != m2.n_rows or m1.n_cols != m2.n_cols:
        raise ValueError("dimension mismatch")
    if sorted(cert.col_perm) != list(range(m1.n_cols)):
        return False
    if sorted(cert.row_perm) != list(range(m1.n_rows)):
        return False
    mapped: list[Optional[tuple[int, ...]]] = [None] * m1.n_rows
    for i, row in enumerate(m1.rows):
        mapped[cert.row_perm[i]] = tuple(sorted(cert.col_perm[c] for c in row))
    return all(mapped[i] == m2.rows[i] for i in range(m2.n_rows))


@dataclass(frozen=True)
class CircOnesOrdering:
    """A witness that a matrix has the circular-ones property.

    ``column_order[p]`` is the original column placed at position p; the
    succinct matrix is expressed in these positions.
    """

    succinct: SuccinctCircMatrix
    column_order: tuple[int, ...]


def circ_ones_order(m: SparseBinaryMatrix) -> Optional[CircOnesOrdering]:
    """Find a circular-ones column ordering, or None if none exists.

    Reduction to consecutive-ones: complement every row with a 1 in the
    last column c, drop c, run the PQ-tree test on what is left, and
    reinsert c at the end of the frontier.
    """
    from . import pqtree  # local import; pqtree depends on nothing here

    n = m.n_cols
    if n <= 2:
        # Any subset of <= 2 columns is circularly consecutive.
        return _ordering_identity(m)
    c = n - 1
    reduce_sets: list[frozenset[int]] = []
    for row in m.rows:
        k = len(row)
        if k <= 1 or k >= n - 1:
            continue  # trivially consecutive in any circular order
        cols = frozenset(row)
        if c in cols:
            cols = frozenset(range(n)) - cols
        reduce_sets.append(cols - {c})
    tree = pqtree.build_universal(n - 1)
    for cols in sorted(set(reduce_sets), key=len, reverse=True):
        if not tree.reduce(cols):
            return None
    order = tuple(tree.frontier()) + (c,)
    return _ordering_from(m, order)


def _ordering_identity(m: SparseBinaryMatrix) -> CircOnesOrdering:
    return _ordering_from(m, tuple(range(m.n_cols)))


def _ordering_from(m: SparseBinaryMatrix, order: tuple[int, ...]) -> CircOnesOrdering:
    pos = [0] * m.n_cols
    for p, col in enumerate(order):
        pos[col] = p
    rows = []
    for row in m.rows:
        arc = row_arc_from_set([pos[c] for c in row], m.n_cols)
        if arc is None:
            raise AssertionError("ordering is not circular-ones")
        rows.append(arc)
    succ = SuccinctCircMatrix(m.n_rows, m.n_cols, tuple(rows))
    return CircOnesOrdering(succ, order)


# ---------------------------------------------------------------------------
# Text formats.  Sparse: "n_rows n_cols" then per row "k c1 ... ck".
# Succinct: "n_rows n_cols" then per row "F", "E" or "f l".
# ---------------------------------------------------------------------------


def parse_sparse(text: str) -> SparseBinaryMatrix:
    lines = _nonempty_lines(text)
    if not lines:
        raise MatrixParseError("empty matrix file")
    try:
        n_rows, n_cols = map(int, lines[0].split())
    except ValueError as exc:
        raise MatrixParseError(f"bad header line: {lines[0]!r}") from exc
    if len(lines) != n_rows + 1:
        raise MatrixParseError(f"expected {n_rows} row lines, got {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        try:
            parts = [int(x) for x in ln.split()]
        except ValueError as exc:
            raise MatrixParseError(f"bad row line: {ln!r}") from exc
        if not parts or parts[0] != len(parts) - 1:
            raise MatrixParseError(f"row length prefix mismatch: {ln!r}")
        row = tuple(parts[1:])
        if any(row[i] >= row[i + 1] for i in range(len(row) - 1)):
            raise MatrixParseError(f"row indices not strictly increasing: {ln!r}")
        if any(not (0 <= ci < n_cols) for ci in row):
            raise MatrixParseError(f"column index out of range: {ln!r}")
        rows.append(row)
    return SparseBinaryMatrix(n_rows, n_cols, tuple(rows))


def format_sparse(m: SparseBinaryMatrix) -> str:
    out = [f"{m.n_rows} {m.n_cols}"]
    for row in m.rows:
        out.append(" ".join([str(len(row))] + [str(c) for c in row]))
    return "\n".join(out) + "\n"


def parse_succinct(text: str) -> SuccinctCircMatrix:
    lines = _nonempty_lines(text)
    if not lines:
        raise MatrixParseError("empty matrix file")
    try:
        n_rows, n_cols = map(int, lines[0].split())
    except ValueError as exc:
        raise MatrixParseError(f"bad header line: {lines[0]!r}") from exc
    if len(lines) != n_rows + 1:
        raise MatrixParseError(f"expected {n_rows} row lines, got {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts == ["F"]:
            rows.append(RowArc.full())
        elif parts == ["E"]:
            rows.append(RowArc.empty())
        elif len(parts) == 2:
            try:
                f, l = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise MatrixParseError(f"bad row line: {ln!r}") from exc
            rows.append(RowArc.arc(f, l))
        else:
            raise MatrixParseError(f"bad row line: {ln!r}")
    try:
        return SuccinctCircMatrix(n_rows, n_cols, tuple(rows))
    except ValueError as exc:
        raise MatrixParseError(str(exc)) from exc


def format_succinct(s: SuccinctCircMatrix) -> str:
    out = [f"{s.n_rows} {s.n_cols}"]
    for row in s.rows:
        if row.kind == FULL:
            out.append("F")
        elif row.kind == EMPTY:
            out.append("E")
        else:
            out.append(f"{row.first} {row.last}")
    return "\n".join(out) + "\n"


def _nonempty_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip()]
