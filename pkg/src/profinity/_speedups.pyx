# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counterparts of the row primitives in ``_rows``.

Every function here operates on packed ``array('q')`` rows, so the caller
has already guaranteed ``0 < L <= 2**30``.  Operands are reduced into
``[0, L)`` on entry, which caps every transient below ``2 * (L - 1)**2``
and keeps the arithmetic inside int64.  The accumulating dot products
reduce after each term for the same reason.

The signatures mirror the pure versions exactly; ``_rows`` dispatches
here whenever this module imports and the row is a packed array.
"""

from cpython cimport array as carray
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc, realloc


def first_nonzero(const int64_t[::1] row, Py_ssize_t start):
    cdef Py_ssize_t i
    for i in range(start, row.shape[0]):
        if row[i]:
            return i
    return -1


def row_axpy(int64_t[::1] dst, const int64_t[::1] src, object q_in,
             object L_in, Py_ssize_t start):
    cdef int64_t L = L_in
    cdef int64_t q = q_in % L_in
    cdef int64_t s, v
    cdef Py_ssize_t i
    if q == 0:
        return
    for i in range(start, dst.shape[0]):
        s = src[i]
        if s:
            v = (dst[i] - q * s) % L
            if v < 0:
                v += L
            dst[i] = v


def row_combine(int64_t[::1] r1, int64_t[::1] r2, object a_in, object b_in,
                object c_in, object d_in, object L_in, Py_ssize_t start):
    cdef int64_t L = L_in
    cdef int64_t a = a_in % L_in
    cdef int64_t b = b_in % L_in
    cdef int64_t c = c_in % L_in
    cdef int64_t d = d_in % L_in
    cdef int64_t x, y
    cdef Py_ssize_t i
    for i in range(start, r1.shape[0]):
        x = r1[i]
        y = r2[i]
        if x or y:
            r1[i] = (a * x + b * y) % L
            r2[i] = (c * x + d * y) % L


def row_scale(int64_t[::1] row, object u_in, object L_in, Py_ssize_t start):
    cdef int64_t L = L_in
    cdef int64_t u = u_in % L_in
    cdef int64_t x
    cdef Py_ssize_t i
    for i in range(start, row.shape[0]):
        x = row[i]
        if x:
            row[i] = (u * x) % L


def dot_mod(const int64_t[::1] row, const int64_t[::1] vec, object L_in):
    cdef int64_t L = L_in
    cdef int64_t total = 0
    cdef int64_t x
    cdef Py_ssize_t i
    for i in range(row.shape[0]):
        x = row[i]
        if x:
            total = (total + x * vec[i]) % L
    return total


def pairs_dot(const int64_t[::1] row, const int64_t[::1] idxs,
              const int64_t[::1] vals, object L_in):
    cdef int64_t L = L_in
    cdef int64_t total = 0
    cdef int64_t w
    cdef Py_ssize_t k
    for k in range(idxs.shape[0]):
        w = row[idxs[k]]
        if w:
            total = (total + w * vals[k]) % L
    return total


cdef extern from *:
    ctypedef unsigned long long uint128 "unsigned __int128"


cdef inline uint64_t _magic(int64_t L) noexcept nogil:
    # Barrett multiplier floor((2**64 - 1) / L); unused when L == 1.
    if L < 2:
        return 0
    return (<uint64_t> 0xFFFFFFFFFFFFFFFF) // (<uint64_t> L)


cdef inline int64_t _bred(uint64_t t, uint64_t M, int64_t L) noexcept nogil:
    # t mod L for 0 <= t < 2**62 and L >= 2, one correction step:
    # the quotient estimate (t * M) >> 64 is off by at most one because
    # the truncation error t * (2**64 mod L similar) / (L * 2**64) < 1/4.
    cdef uint64_t q = <uint64_t> (((<uint128> t) * M) >> 64)
    cdef uint64_t r = t - q * (<uint64_t> L)
    if r >= <uint64_t> L:
        r -= <uint64_t> L
    return <int64_t> r


cdef inline void _xgcd64(int64_t a, int64_t b,
                         int64_t* g, int64_t* x, int64_t* y) noexcept nogil:
    # Extended gcd for positive operands; Bezout pair with |x| <= b/2g,
    # |y| <= a/2g, which keeps every combine transient inside int64.
    cdef int64_t x0 = 1, x1 = 0, y0 = 0, y1 = 1, q, r, t
    while b:
        q = a / b
        r = a - q * b
        a = b
        b = r
        t = x0 - q * x1
        x0 = x1
        x1 = t
        t = y0 - q * y1
        y0 = y1
        y1 = t
    g[0] = a
    x[0] = x0
    y[0] = y0


cdef class FastEchelon:
    """Streaming mod-L row echelon, entire insert loop at C speed.

    Mirrors ``_rows.EchelonAccumulator.insert`` exactly for packed rows:
    one pivot row per pivot column, divisibility fast path, gcd combine
    otherwise.  Pivot rows are kept as the inserted ``array('q')``
    objects (their buffers never move), with raw pointers cached so a
    reduction chain costs no Python dispatch per pivot hit.
    """

    cdef Py_ssize_t n
    cdef int64_t L
    cdef uint64_t M
    cdef list store
    cdef Py_ssize_t* pivslot
    cdef int64_t** ptrs
    cdef Py_ssize_t count
    cdef Py_ssize_t cap

    def __cinit__(self, Py_ssize_t n, object L_in):
        cdef Py_ssize_t i
        self.n = n
        self.L = L_in
        if n <= 0 or self.L <= 0:
            raise ValueError("FastEchelon needs n > 0 and 0 < L <= 2**30")
        self.M = _magic(self.L)
        self.store = []
        self.pivslot = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
        if self.pivslot == NULL:
            raise MemoryError()
        for i in range(n):
            self.pivslot[i] = -1
        self.cap = 64
        self.ptrs = <int64_t**> malloc(self.cap * sizeof(int64_t*))
        if self.ptrs == NULL:
            raise MemoryError()
        self.count = 0

    def __dealloc__(self):
        free(self.pivslot)
        free(self.ptrs)

    def insert(self, vec):
        """Insert a packed row; takes ownership, like the pure version."""
        cdef int64_t[::1] mv = vec
        if mv.shape[0] != self.n:
            raise ValueError("row length does not match the accumulator")
        cdef int64_t* v = &mv[0]
        cdef int64_t* p
        cdef int64_t L = self.L
        cdef uint64_t M = self.M
        cdef int64_t a, b, q, g, x, y, c, d, s, t, xx, yy
        cdef Py_ssize_t j = 0, i, slot, n = self.n
        cdef int64_t** grown
        while True:
            while j < n and v[j] == 0:
                j += 1
            if j >= n:
                return
            slot = self.pivslot[j]
            if slot < 0:
                if self.count == self.cap:
                    grown = <int64_t**> realloc(
                        self.ptrs, 2 * self.cap * sizeof(int64_t*))
                    if grown == NULL:
                        raise MemoryError()
                    self.ptrs = grown
                    self.cap *= 2
                self.store.append(vec)
                self.ptrs[self.count] = v
                self.pivslot[j] = self.count
                self.count += 1
                return
            p = self.ptrs[slot]
            a = p[j]
            b = v[j]
            if b % a == 0:
                # b != 0 here, so q >= 1 and the loop always clears v[j].
                q = b / a
                for i in range(j, n):
                    s = p[i]
                    if s:
                        t = v[i] - _bred(<uint64_t> (q * s), M, L)
                        if t < 0:
                            t += L
                        v[i] = t
            else:
                # Bezout pair with |x|, |y| < L; shift into [0, L) so the
                # combined transients stay below 2 * (L - 1)**2 < 2**61.
                _xgcd64(a, b, &g, &x, &y)
                c = -(b / g)
                d = a / g
                x = x % L
                if x < 0:
                    x += L
                y = y % L
                if y < 0:
                    y += L
                c = c % L
                if c < 0:
                    c += L
                d = d % L
                for i in range(j, n):
                    xx = p[i]
                    yy = v[i]
                    if xx or yy:
                        p[i] = _bred(<uint64_t> (x * xx + y * yy), M, L)
                        v[i] = _bred(<uint64_t> (c * xx + d * yy), M, L)

    def rows_by_pivot(self):
        """Dict of pivot column -> pivot row, for the canonical pass."""
        cdef Py_ssize_t j
        out = {}
        for j in range(self.n):
            if self.pivslot[j] >= 0:
                out[j] = self.store[self.pivslot[j]]
        return out


cdef inline void _axpy_c(int64_t* dst, const int64_t* src, int64_t q,
                         Py_ssize_t start, Py_ssize_t n,
                         int64_t L, uint64_t M) noexcept nogil:
    # dst[i] = (dst[i] - q * src[i]) mod L for q in [0, L).
    cdef Py_ssize_t i
    cdef int64_t s, t
    if q == 0:
        return
    for i in range(start, n):
        s = src[i]
        if s:
            t = dst[i] - _bred(<uint64_t> (q * s), M, L)
            if t < 0:
                t += L
            dst[i] = t


cdef inline void _combine_c(int64_t* r1, int64_t* r2,
                            int64_t a, int64_t b, int64_t c, int64_t d,
                            Py_ssize_t start, Py_ssize_t n,
                            int64_t L, uint64_t M) noexcept nogil:
    # (r1, r2) <- (a r1 + b r2, c r1 + d r2) mod L; the coefficients may
    # be negative on entry and are shifted into [0, L) first.
    cdef Py_ssize_t i
    cdef int64_t x, y
    a = a % L
    if a < 0:
        a += L
    b = b % L
    if b < 0:
        b += L
    c = c % L
    if c < 0:
        c += L
    d = d % L
    if d < 0:
        d += L
    for i in range(start, n):
        x = r1[i]
        y = r2[i]
        if x or y:
            r1[i] = _bred(<uint64_t> (a * x + b * y), M, L)
            r2[i] = _bred(<uint64_t> (c * x + d * y), M, L)


cdef class _PtrTable:
    """Raw data pointers for a list of equal-typecode 'q' arrays."""

    cdef int64_t** p
    cdef list objs

    def __cinit__(self, list rows):
        cdef Py_ssize_t m = len(rows), r
        cdef carray.array arr
        self.objs = rows
        self.p = <int64_t**> malloc((m if m else 1) * sizeof(int64_t*))
        if self.p == NULL:
            raise MemoryError()
        for r in range(m):
            arr = rows[r]
            self.p[r] = <int64_t*> arr.data.as_longlongs

    def __dealloc__(self):
        free(self.p)

    cdef void swap(self, Py_ssize_t r, Py_ssize_t s):
        self.objs[r], self.objs[s] = self.objs[s], self.objs[r]
        self.p[r], self.p[s] = self.p[s], self.p[r]


def tracked_echelon_pass(list rows, mirror, mirror_it,
                         Py_ssize_t ncols, object L_in):
    """One row echelon pass over packed rows, mirroring ``_Tracked``.

    Mirrors the pure pass operation for operation: same pivot choice
    (first row of minimal nonzero magnitude), same divisibility fast
    path, same gcd combines, and the same transform updates on the
    mirror pair, so compiled and pure runs produce identical states.
    Entries must already be reduced into [0, L); negative pivots cannot
    occur, so the negation branch of the pure pass has no counterpart.
    """
    cdef int64_t L = L_in
    cdef uint64_t M = _magic(L)
    cdef Py_ssize_t m = len(rows)
    if m == 0:
        return False
    cdef _PtrTable rt = _PtrTable(rows)
    cdef _PtrTable tt = None
    cdef _PtrTable it = None
    cdef Py_ssize_t msize = 0
    if mirror is not None:
        tt = _PtrTable(mirror)
        it = _PtrTable(mirror_it)
        msize = len(mirror[0]) if len(mirror) else 0
    cdef bint changed = False
    cdef Py_ssize_t rank = 0, j, r, best
    cdef int64_t best_val, v, a, b, q, g, x, y, c, d
    for j in range(ncols):
        if rank == m:
            break
        best = -1
        best_val = 0
        for r in range(rank, m):
            v = rt.p[r][j]
            if v:
                if best < 0 or v < best_val:
                    best = r
                    best_val = v
        if best < 0:
            continue
        if best != rank:
            rt.swap(rank, best)
            if tt is not None:
                tt.swap(rank, best)
                it.swap(rank, best)
            changed = True
        for r in range(rank + 1, m):
            while True:
                a = rt.p[rank][j]
                b = rt.p[r][j]
                if not b:
                    break
                changed = True
                if b % a == 0:
                    q = b / a
                    _axpy_c(rt.p[r], rt.p[rank], q % L, j, ncols, L, M)
                    if tt is not None:
                        _axpy_c(tt.p[r], tt.p[rank], q % L, 0, msize, L, M)
                        _axpy_c(it.p[rank], it.p[r], (L - q % L) % L,
                                0, msize, L, M)
                    break
                _xgcd64(a, b, &g, &x, &y)
                c = -(b / g)
                d = a / g
                _combine_c(rt.p[rank], rt.p[r], x, y, c, d, 0, ncols, L, M)
                if tt is not None:
                    _combine_c(tt.p[rank], tt.p[r], x, y, c, d,
                               0, msize, L, M)
                    _combine_c(it.p[rank], it.p[r], d, -c, -y, x,
                               0, msize, L, M)
        a = rt.p[rank][j]
        for r in range(rank):
            q = rt.p[r][j] / a
            if q:
                _axpy_c(rt.p[r], rt.p[rank], q % L, j, ncols, L, M)
                if tt is not None:
                    _axpy_c(tt.p[r], tt.p[rank], q % L, 0, msize, L, M)
                    _axpy_c(it.p[rank], it.p[r], (L - q % L) % L,
                            0, msize, L, M)
                changed = True
        rank += 1
    return changed


def kernel_coords(list w_rows, const int64_t[::1] idxs,
                  const int64_t[::1] vals, const int64_t[::1] cs,
                  const int64_t[::1] sel, object L_in):
    """Sparse dots of every W row against (idxs, vals), with extraction.

    For each row i: y = sum(W[i][idxs[k]] * vals[k]) mod L must be
    divisible by cs[i] (kernel membership), and rows flagged in ``sel``
    contribute (y // cs[i]) mod (L // cs[i]) to the result, in order.
    Raises ValueError exactly where the pure loop would.
    """
    cdef int64_t L = L_in
    cdef uint64_t M = _magic(L)
    cdef Py_ssize_t m = len(w_rows), i, k, nk = idxs.shape[0]
    cdef _PtrTable wt = _PtrTable(w_rows)
    cdef int64_t total, w, c
    cdef const int64_t* p
    out = []
    for i in range(m):
        p = wt.p[i]
        total = 0
        for k in range(nk):
            w = p[idxs[k]]
            if w:
                total = _bred(<uint64_t> (total + w * vals[k]), M, L)
        c = cs[i]
        if total % c:
            raise ValueError("vector is not in the kernel")
        if sel[i]:
            out.append((total / c) % (L / c))
    return out


def transpose_packed(list rows, Py_ssize_t ncols):
    """Transpose a list of packed rows into ncols packed rows."""
    cdef Py_ssize_t m = len(rows)
    cdef carray.array tmpl = rows[0]
    cdef carray.array col
    cdef _PtrTable rt = _PtrTable(rows)
    cdef int64_t** op = <int64_t**> malloc(
        (ncols if ncols else 1) * sizeof(int64_t*))
    if op == NULL:
        raise MemoryError()
    out = []
    cdef Py_ssize_t i, j
    cdef int64_t* p
    cdef int64_t v
    try:
        for j in range(ncols):
            col = carray.clone(tmpl, m, True)
            out.append(col)
            op[j] = <int64_t*> col.data.as_longlongs
        for i in range(m):
            p = rt.p[i]
            for j in range(ncols):
                v = p[j]
                if v:
                    op[j][i] = v
    finally:
        free(op)
    return out
