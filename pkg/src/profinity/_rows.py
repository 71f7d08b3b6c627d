"""Row-vector primitives shared by the integer linear algebra engines.

A "row" is either an ``array('q')`` (the packed path, used whenever every
intermediate value provably fits in a signed 64-bit word) or a plain list
of Python ints (the arbitrary-precision path).  All mutating helpers work
on both.  When the compiled extension is importable and the row is packed,
the helpers delegate to it; setting ``PROFINITY_PURE=1`` in the environment
forces the pure-Python implementations.

Entries of a mod-L row are kept in ``[0, L)``.  Packing requires
``L <= 2**30``: gcd elimination produces transients bounded by
``2 * L * (L - 1)`` (Bezout coefficients satisfy ``|x| <= b/2g`` and
``|y| <= a/2g``), which then stays below ``2**63``.

With ``L = 0`` the same code paths do plain integer arithmetic on list
rows with no reduction; that mode backs the exact lattice routines.
"""

from __future__ import annotations

import os
from array import array

_PURE = os.environ.get("PROFINITY_PURE", "") not in ("", "0")

_speedups = None
if not _PURE:
    try:
        from profinity import _speedups  # type: ignore[no-redef]
    except ImportError:
        _speedups = None

#: Largest modulus for which rows are packed into int64 arrays.
PACK_LIMIT = 2**30


def compiled_backend_active() -> bool:
    """Return True when the compiled kernels are loaded and in use."""
    return _speedups is not None


def new_row(n, L):
    """Allocate a zero row of length ``n`` for modulus ``L``."""
    if 0 < L <= PACK_LIMIT:
        return array("q", bytes(8 * n))
    return [0] * n


def pack_row(values, L):
    """Copy ``values`` (already reduced into ``[0, L)``) into a fresh row."""
    if 0 < L <= PACK_LIMIT:
        return array("q", values)
    return list(values)


def first_nonzero(row, start=0):
    """Index of the first nonzero entry at or after ``start``, or -1."""
    if _speedups is not None and type(row) is array:
        return _speedups.first_nonzero(row, start)
    for i in range(start, len(row)):
        if row[i]:
            return i
    return -1


def row_axpy(dst, src, q, L, start=0):
    """In place ``dst[i] -= q * src[i]`` for ``i >= start``, mod L if L > 0.

    For packed rows ``q`` must already be reduced into ``[0, L)``.
    """
    if not q:
        return
    if _speedups is not None and type(dst) is array:
        _speedups.row_axpy(dst, src, q, L, start)
        return
    if L:
        for i in range(start, len(dst)):
            s = src[i]
            if s:
                dst[i] = (dst[i] - q * s) % L
    else:
        for i in range(start, len(dst)):
            s = src[i]
            if s:
                dst[i] -= q * s


def row_combine(r1, r2, a, b, c, d, L, start=0):
    """In place ``(r1, r2) <- (a*r1 + b*r2, c*r1 + d*r2)``, mod L if L > 0.

    The coefficients are plain (possibly negative) ints; for packed rows
    the caller guarantees they come from gcd elimination so the transient
    sums fit in int64.
    """
    if _speedups is not None and type(r1) is array:
        _speedups.row_combine(r1, r2, a, b, c, d, L, start)
        return
    if L:
        for i in range(start, len(r1)):
            x = r1[i]
            y = r2[i]
            if x or y:
                r1[i] = (a * x + b * y) % L
                r2[i] = (c * x + d * y) % L
    else:
        for i in range(start, len(r1)):
            x = r1[i]
            y = r2[i]
            if x or y:
                r1[i] = a * x + b * y
                r2[i] = c * x + d * y


def row_scale(row, u, L, start=0):
    """In place ``row[i] = u * row[i] mod L`` for ``i >= start`` (L > 0)."""
    if u == 1:
        return
    if _speedups is not None and type(row) is array:
        _speedups.row_scale(row, u, L, start)
        return
    for i in range(start, len(row)):
        x = row[i]
        if x:
            row[i] = (u * x) % L


def dot_mod(row, vec, L):
    """``sum(row[i] * vec[i]) mod L`` (L > 0)."""
    if _speedups is not None and type(row) is array and type(vec) is array:
        return _speedups.dot_mod(row, vec, L)
    total = 0
    for i in range(len(row)):
        x = row[i]
        if x:
            total += x * vec[i]
    return total % L


def pairs_dot(row, idxs, vals, L):
    """``sum(row[idxs[k]] * vals[k]) mod L`` (L > 0, vals in ``[0, L)``)."""
    if (
        _speedups is not None
        and type(row) is array
        and type(idxs) is array
    ):
        return _speedups.pairs_dot(row, idxs, vals, L)
    total = 0
    for k in range(len(idxs)):
        w = row[idxs[k]]
        if w:
            total += w * vals[k]
    return total % L


def xgcd(a, b):
    """Extended gcd: ``(g, x, y)`` with ``g = a*x + b*y`` and ``g >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


class EchelonAccumulator:
    """Streaming row-echelon form of an integer row lattice.

    Rows are inserted one at a time; the accumulator maintains one pivot
    row per pivot column.  With ``L > 0`` entries are reduced mod L and
    the represented object is ``span(inserted rows) + L * Z^n``, which is
    what makes the elementwise reduction sound; columns that never gain a
    pivot correspond to the implicit ``L * e_j`` directions.  With
    ``L = 0`` this is a plain integer echelon accumulator and the
    represented object is the bare row span.
    """

    def __init__(self, n, L=0):
        self.n = n
        self.L = L
        self.rows = {}
        self._fast = None
        if _speedups is not None and 0 < L <= PACK_LIMIT and n > 0:
            self._fast = _speedups.FastEchelon(n, L)

    def insert(self, vec):
        """Insert ``vec``; the accumulator takes ownership of it."""
        fast = self._fast
        if fast is not None:
            if type(vec) is not array:
                vec = array("q", [x % self.L for x in vec])
            fast.insert(vec)
            return
        L = self.L
        rows = self.rows
        j = first_nonzero(vec, 0)
        while j >= 0:
            pivot_row = rows.get(j)
            if pivot_row is None:
                rows[j] = vec
                return
            a = pivot_row[j]
            b = vec[j]
            if b % a == 0:
                q = b // a
                row_axpy(vec, pivot_row, q % L if L else q, L, j)
            else:
                g, x, y = xgcd(a, b)
                row_combine(pivot_row, vec, x, y, -(b // g), a // g, L, j)
            j = first_nonzero(vec, j)

    def triangular(self, canonical=True):
        """Return ``(pivots, rows)`` sorted by pivot column.

        Entries above each pivot are reduced into ``[0, pivot)`` so the
        result is canonical for the represented lattice.  Callers that
        feed the rows into a full diagonalization anyway can pass
        ``canonical=False`` to skip the reduction pass and take the raw
        echelon rows.
        """
        if self._fast is not None:
            self.rows.update(self._fast.rows_by_pivot())
            self._fast = None
        L = self.L
        items = sorted(self.rows.items())
        pivots = [j for j, _ in items]
        rows = [r for _, r in items]
        if not canonical:
            return pivots, rows
        for k in range(len(rows)):
            j = pivots[k]
            a = rows[k][j]
            if L and a < 0:
                raise AssertionError("mod-L rows must stay nonnegative")
            if not L and a < 0:
                row_scale_exact(rows[k], -1)
                a = -a
            for r in range(k):
                v = rows[r][j]
                q = v // a
                if q:
                    row_axpy(rows[r], rows[k], q % L if L else q, L, j)
        return pivots, rows


def row_scale_exact(row, u):
    for i in range(len(row)):
        if row[i]:
            row[i] *= u
