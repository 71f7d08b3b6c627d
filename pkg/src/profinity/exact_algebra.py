"""Integer linear algebra over finitely generated abelian groups.

Two engines live here.  The exact engine works over Z with arbitrary
precision and powers the public Smith normal form, cokernel and chain
complex routines, including free parts.  The modular engine works mod a
single modulus ``L`` (the lcm of all coordinate orders in play) and powers
kernels and subquotients of maps between finite groups; it is the workhorse
behind the cohomology code, where matrices get large but every order
divides ``L``.

The modular engine is sound because every lattice it manipulates contains
``L * Z^n``: elementwise reduction mod L never changes the represented
object.  Column transforms are tracked as the pair ``(V^T, W)`` with
``W = V^{-1}`` stored so that both receive only row operations; row
transforms are tracked as ``(U, (U^{-1})^T)`` the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm, prod

from array import array

from profinity._rows import (
    PACK_LIMIT,
    EchelonAccumulator,
    _speedups,
    first_nonzero,
    new_row,
    pack_row,
    pairs_dot,
    row_axpy,
    row_combine,
    row_scale_exact,
    xgcd,
)


def _modinv(a, m):
    g, x, _ = xgcd(a % m, m)
    if g != 1:
        raise ValueError(f"{a} is not invertible mod {m}")
    return x % m


def _factorize(n):
    """Prime factorization as a dict prime -> exponent (n >= 1)."""
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _canonical_chain(values):
    """Invariant factor chain (ascending) for a product of cyclic groups."""
    per_prime = {}
    for v in values:
        for p, e in _factorize(v).items():
            per_prime.setdefault(p, []).append(e)
    depth = max((len(es) for es in per_prime.values()), default=0)
    chain = []
    for slot in range(depth):
        f = 1
        for p, es in per_prime.items():
            es_sorted = sorted(es, reverse=True)
            if slot < len(es_sorted):
                f *= p ** es_sorted[slot]
        chain.append(f)
    chain.reverse()
    return tuple(c for c in chain if c > 1)


class FgAbelianGroup:
    """A finitely generated abelian group in invariant factor form.

    ``factors`` is the ascending divisibility chain of torsion orders
    (each > 1) and ``free_rank`` counts Z summands.  Generator coordinates
    are ordered torsion first, then free.
    """

    __slots__ = ("factors", "free_rank")

    def __init__(self, factors=(), free_rank=0):
        factors = tuple(int(f) for f in factors)
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise ValueError(f"not a divisibility chain: {factors}")
        if any(f < 2 for f in factors):
            raise ValueError(f"torsion factors must be >= 2: {factors}")
        if free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        self.factors = factors
        self.free_rank = int(free_rank)

    @classmethod
    def from_factors(cls, values):
        """Build from any list of cyclic orders; 0 means Z, 1 is dropped."""
        vals = [int(v) for v in values]
        if any(v < 0 for v in vals):
            raise ValueError("cyclic orders must be nonnegative")
        free = sum(1 for v in vals if v == 0)
        torsion = _canonical_chain(v for v in vals if v > 1)
        return cls(torsion, free)

    def orders(self):
        """Generator orders, 0 standing for infinite."""
        return tuple(self.factors) + (0,) * self.free_rank

    def gen_count(self):
        return len(self.factors) + self.free_rank

    def is_trivial(self):
        return not self.factors and not self.free_rank

    def is_finite(self):
        return self.free_rank == 0

    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        return prod(self.factors) if self.factors else 1

    def exponent(self):
        if self.free_rank:
            return None
        return self.factors[-1] if self.factors else 1

    def dual(self):
        """Pontryagin dual; defined here for finite groups only."""
        if self.free_rank:
            raise ValueError("dual of a group with free part is not finite")
        return FgAbelianGroup(self.factors)

    def direct_sum(self, other):
        return FgAbelianGroup.from_factors(
            self.orders() + other.orders()
        )

    def hom(self, other):
        """Hom(self, other) as an abstract group."""
        vals = []
        vals.extend([0] * (self.free_rank * other.free_rank))
        for e in other.factors:
            vals.extend([e] * self.free_rank)
        for d in self.factors:
            for e in other.factors:
                vals.append(gcd(d, e))
        return FgAbelianGroup.from_factors(vals)

    def ext1(self, other):
        """Ext^1(self, other)."""
        vals = []
        for d in self.factors:
            vals.extend([d] * other.free_rank)
            for e in other.factors:
                vals.append(gcd(d, e))
        return FgAbelianGroup.from_factors(vals)

    def tensor(self, other):
        """self tensor other."""
        vals = []
        vals.extend([0] * (self.free_rank * other.free_rank))
        for e in other.factors:
            vals.extend([e] * self.free_rank)
        for d in self.factors:
            vals.extend([d] * other.free_rank)
            for e in other.factors:
                vals.append(gcd(d, e))
        return FgAbelianGroup.from_factors(vals)

    def tor1(self, other):
        """Tor_1(self, other)."""
        vals = []
        for d in self.factors:
            for e in other.factors:
                vals.append(gcd(d, e))
        return FgAbelianGroup.from_factors(vals)

    def __eq__(self, other):
        return (
            isinstance(other, FgAbelianGroup)
            and self.factors == other.factors
            and self.free_rank == other.free_rank
        )

    def __hash__(self):
        return hash((self.factors, self.free_rank))

    def __str__(self):
        parts = [f"Z/{f}" for f in self.factors] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"FgAbelianGroup(factors={self.factors}, free_rank={self.free_rank})"


def hom_and_ext(a, b):
    """Hom(a, b) and Ext^1(a, b) for finitely generated abelian a, b."""
    return a.hom(b), a.ext1(b)


# ---------------------------------------------------------------------------
# Tracked diagonalization, shared by the exact and modular engines.
# ---------------------------------------------------------------------------


class _Tracked:
    """A matrix together with optional transform pairs.

    Row operations mirror into ``(U, UinvT)`` and, when the matrix is
    transposed relative to the original orientation, into ``(VT, W)``;
    both pairs obey the same rule: the primary member receives the row
    operation itself, the secondary member its inverse transpose.
    """

    def __init__(self, rows, ncols, L, track_rows, track_cols):
        self.rows = rows
        self.ncols = ncols
        self.L = L
        m = len(rows)
        self.U = _identity_rows(m, L) if track_rows else None
        self.UinvT = _identity_rows(m, L) if track_rows else None
        self.VT = _identity_rows(ncols, L) if track_cols else None
        self.W = _identity_rows(ncols, L) if track_cols else None
        self.transposed = False

    def _mirror_pair(self):
        if self.transposed:
            return self.VT, self.W
        return self.U, self.UinvT

    def swap(self, r, s):
        rows = self.rows
        rows[r], rows[s] = rows[s], rows[r]
        t, tit = self._mirror_pair()
        if t is not None:
            t[r], t[s] = t[s], t[r]
            tit[r], tit[s] = tit[s], tit[r]

    def axpy(self, r, p, q, start):
        """row_r -= q * row_p (q a plain int)."""
        L = self.L
        qm = q % L if L else q
        row_axpy(self.rows[r], self.rows[p], qm, L, start)
        t, tit = self._mirror_pair()
        if t is not None:
            row_axpy(t[r], t[p], qm, L, 0)
            row_axpy(tit[p], tit[r], (-q) % L if L else -q, L, 0)

    def combine(self, p, r, a, b):
        """Gcd step: (row_p, row_r) <- (x p + y r, -(b/g) p + (a/g) r)."""
        L = self.L
        g, x, y = xgcd(a, b)
        c, d = -(b // g), a // g
        row_combine(self.rows[p], self.rows[r], x, y, c, d, L, 0)
        t, tit = self._mirror_pair()
        if t is not None:
            row_combine(t[p], t[r], x, y, c, d, L, 0)
            # inverse transpose of [[x, y], [c, d]] (det 1) is [[d, -c], [-y, x]]
            row_combine(tit[p], tit[r], d, -c, -y, x, L, 0)
        return g

    def negate_row(self, r):
        row_scale_exact(self.rows[r], -1)
        t, tit = self._mirror_pair()
        if t is not None:
            row_scale_exact(t[r], -1)
            row_scale_exact(tit[r], -1)

    def transpose(self):
        self.rows, self.ncols = _transpose_rows(self.rows, self.ncols, self.L)
        self.transposed = not self.transposed

    def col_axpy(self, j, k, q):
        """col_j += q * col_k, mirrored into (VT, W); untransposed only."""
        L = self.L
        qm = q % L if L else q
        for row in self.rows:
            v = row[k]
            if v:
                row[j] = (row[j] + q * v) % L if L else row[j] + q * v
        if self.VT is not None:
            row_axpy(self.VT[j], self.VT[k], (-q) % L if L else -q, L, 0)
            row_axpy(self.W[k], self.W[j], qm, L, 0)

    def col_swap(self, j, k):
        for row in self.rows:
            row[j], row[k] = row[k], row[j]
        if self.VT is not None:
            self.VT[j], self.VT[k] = self.VT[k], self.VT[j]
            self.W[j], self.W[k] = self.W[k], self.W[j]


def _identity_rows(n, L):
    rows = []
    for i in range(n):
        row = new_row(n, L)
        row[i] = 1
        rows.append(row)
    return rows


def _transpose_rows(rows, ncols, L):
    m = len(rows)
    if (
        _speedups is not None
        and m
        and 0 < L <= PACK_LIMIT
        and type(rows[0]) is array
    ):
        return _speedups.transpose_packed(rows, ncols), m
    out = [new_row(m, L) for _ in range(ncols)]
    for i, row in enumerate(rows):
        for j in range(ncols):
            v = row[j]
            if v:
                out[j][i] = v
    return out, m


def _echelon_pass(t: _Tracked):
    """One full row echelon pass; returns True if any entry changed."""
    rows = t.rows
    m = len(rows)
    n = t.ncols
    L = t.L
    if (
        _speedups is not None
        and m
        and 0 < L <= PACK_LIMIT
        and type(rows[0]) is array
    ):
        mirror, mirror_it = t._mirror_pair()
        return _speedups.tracked_echelon_pass(rows, mirror, mirror_it, n, L)
    changed = False
    rank = 0
    for j in range(n):
        if rank == m:
            break
        best = -1
        best_val = 0
        for r in range(rank, m):
            v = rows[r][j]
            if v:
                a = abs(v)
                if best < 0 or a < best_val:
                    best, best_val = r, a
        if best < 0:
            continue
        if best != rank:
            t.swap(rank, best)
            changed = True
        for r in range(rank + 1, m):
            while True:
                a = rows[rank][j]
                b = rows[r][j]
                if not b:
                    break
                changed = True
                if b % a == 0:
                    t.axpy(r, rank, b // a, j)
                    break
                t.combine(rank, r, a, b)
        a = rows[rank][j]
        if a < 0:
            t.negate_row(rank)
            changed = True
            a = -a
        for r in range(rank):
            q = rows[r][j] // a
            if q:
                t.axpy(r, rank, q, j)
                changed = True
        rank += 1
    return changed


def _is_diagonal(rows):
    for i, row in enumerate(rows):
        j = first_nonzero(row, 0)
        while j >= 0:
            if j != i:
                return False
            j = first_nonzero(row, j + 1)
    return True


def _diagonalize(rows, ncols, L, track_rows=False, track_cols=False,
                 canonical=True):
    """Diagonalize by alternating tracked echelon passes.

    Returns the _Tracked holder with ``rows`` diagonal (original
    orientation restored).  Entries are mod L when L > 0.

    With ``canonical`` (mod L only) each diagonal entry d is rewritten to
    gcd(d, L): d generates the direction d*e_i only jointly with the
    implicit L*e_i, and gcd(d, L) is the canonical single generator.  The
    rewrite preserves the lattice and needs no transform update, and it
    keeps the divisions in the chain fixup exact.  Callers that need the
    literal identity U*M*V = D (mod L), such as the congruence solver,
    must turn it off.
    """
    t = _Tracked(rows, ncols, L, track_rows, track_cols)
    for _ in range(200):
        _echelon_pass(t)
        if _is_diagonal(t.rows):
            break
        t.transpose()
    else:
        raise AssertionError("diagonalization did not converge")
    if t.transposed:
        t.transpose()
    if L and canonical:
        for i in range(min(len(t.rows), t.ncols)):
            t.rows[i][i] = gcd(t.rows[i][i], L) % L
    return t


def _interp(d, L):
    """A stored diagonal entry of 0 means L in the modular engine."""
    if L and d == 0:
        return L
    return abs(d)


def _chain_fixup(t: _Tracked, k):
    """Enforce the divisibility chain on diag positions 0..k-1 (tracked)."""
    L = t.L
    rows = t.rows
    for _ in range(k + 1):
        clean = True
        for i in range(k):
            for j in range(i + 1, k):
                a = _interp(rows[i][i], L)
                b = _interp(rows[j][j], L)
                if (a == 0 and b == 0) or (a and b % a == 0):
                    continue
                clean = False
                t.col_axpy(i, j, 1)
                t.combine(i, j, rows[i][i], rows[j][i])
                # clear the fill at (i, j)
                g_now = rows[i][i]
                rem = rows[i][j]
                if rem:
                    t.col_axpy(j, i, -(rem // g_now))
        if clean:
            return


def _sort_diagonal(t: _Tracked, k):
    """Ascending diagonal (zeros last for L == 0), by tracked swaps."""
    L = t.L

    def key(i):
        v = _interp(t.rows[i][i], L)
        return (v == 0, v)

    order = sorted(range(k), key=key)
    # selection-sort with explicit swaps so transforms stay mirrored
    pos = list(range(k))
    for target_slot in range(k):
        want = order[target_slot]
        cur = pos.index(want)
        if cur != target_slot:
            t.swap(target_slot, cur)
            t.col_swap(target_slot, cur)
            pos[target_slot], pos[cur] = pos[cur], pos[target_slot]


@dataclass(frozen=True)
class SnfDecomposition:
    """Smith normal form ``u @ m @ v = diag(d)`` with unimodular u, v."""

    d: tuple
    u: tuple
    v: tuple
    original_shape: tuple

    def diagonal_matrix(self):
        m, n = self.original_shape
        return [
            [self.d[i] if (i == j and i < len(self.d)) else 0 for j in range(n)]
            for i in range(m)
        ]


def smith_normal_form(matrix):
    """Exact Smith normal form with both transforms.

    The diagonal is a nonnegative divisibility chain (zeros at the end);
    pivots are chosen by minimal absolute value for determinism.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    if any(len(r) != n for r in matrix):
        raise ValueError("ragged matrix")
    rows = [list(r) for r in matrix]
    if m == 0 or n == 0:
        eye_m = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
        eye_n = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        return SnfDecomposition((), _freeze(eye_m), _freeze(eye_n), (m, n))
    t = _diagonalize(rows, n, 0, track_rows=True, track_cols=True)
    k = min(m, n)
    for i in range(k):
        if t.rows[i][i] < 0:
            t.negate_row(i)
    _chain_fixup(t, k)
    _sort_diagonal(t, k)
    for i in range(k):
        if t.rows[i][i] < 0:
            t.negate_row(i)
    d = tuple(t.rows[i][i] for i in range(k))
    u = _freeze(t.U)
    v = _freeze(_transpose_rows(t.VT, len(t.VT[0]), 0)[0])
    return SnfDecomposition(d, u, v, (m, n))


def _freeze(rows):
    return tuple(tuple(r) for r in rows)


# ---------------------------------------------------------------------------
# Exact subquotients (with free parts).
# ---------------------------------------------------------------------------


class ExactSubquotient:
    """Quotient of one integer lattice by a sublattice, with coordinates.

    Built from generating vectors of a top lattice and a bottom sublattice
    inside ``Z^ambient``.  Exposes the abstract group, representative
    vectors for its generators, and ``class_of`` for arbitrary members of
    the top lattice.
    """

    def __init__(self, ambient, top_vectors, bottom_vectors):
        self.ambient = ambient
        acc = EchelonAccumulator(ambient, 0)
        for v in top_vectors:
            acc.insert(list(v))
        pivots, basis = acc.triangular()
        self._pivots = pivots
        self._basis = basis
        r = len(basis)
        rel_cols = [self._solve_in_basis(v) for v in bottom_vectors]
        rel_rows = [[col[i] for col in rel_cols] for i in range(r)]
        if not rel_cols:
            rel_rows = [[] for _ in range(r)]
        if r == 0:
            self.group = FgAbelianGroup()
            self.representatives = ()
            self._U = []
            self._dinterp = []
            self._positions = []
            return
        if rel_cols:
            t = _diagonalize(rel_rows, len(rel_cols), 0, track_rows=True)
            k = min(r, len(rel_cols))
            for i in range(k):
                if t.rows[i][i] < 0:
                    t.negate_row(i)
            _chain_fixup(t, k)
            _sort_diagonal(t, k)
            diag = [abs(t.rows[i][i]) for i in range(k)] + [0] * (r - k)
            U = [list(row) for row in t.U]
            UinvT = [list(row) for row in t.UinvT]
        else:
            diag = [0] * r
            U = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
            UinvT = [row[:] for row in U]
        self._U = U
        self._dinterp = diag
        self._positions = [i for i in range(r) if diag[i] != 1]
        factors = [diag[i] for i in self._positions]
        self.group = FgAbelianGroup.from_factors(factors)
        reps = []
        for i in self._positions:
            vec = [0] * ambient
            for k2 in range(r):
                c = UinvT[i][k2]
                if c:
                    for j in range(ambient):
                        vec[j] += c * basis[k2][j]
            reps.append(tuple(vec))
        self.representatives = tuple(reps)

    def _solve_in_basis(self, v):
        v = list(v)
        coeffs = [0] * len(self._basis)
        for k, j in enumerate(self._pivots):
            if v[j]:
                a = self._basis[k][j]
                if v[j] % a:
                    raise ValueError("vector is not in the top lattice")
                q = v[j] // a
                coeffs[k] = q
                for jj in range(j, self.ambient):
                    v[jj] -= q * self._basis[k][jj]
        if any(v):
            raise ValueError("vector is not in the top lattice")
        return coeffs

    def class_of(self, vector):
        """Coordinates of ``vector``'s class on the group's generators."""
        z = self._solve_in_basis(vector)
        out = []
        for i in self._positions:
            s = sum(self._U[i][k] * z[k] for k in range(len(z)))
            d = self._dinterp[i]
            out.append(s % d if d else s)
        return tuple(out)


def cokernel_structure(matrix):
    """Structure of ``Z^m / colspan(matrix)`` plus the projection map.

    ``matrix`` is m-by-n given as rows.  Returns ``(group, projection)``
    where projection is a SubquotientMap from the free group Z^m.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    cols = [[matrix[i][j] for i in range(m)] for j in range(n)]
    top = [[1 if i == k else 0 for i in range(m)] for k in range(m)]
    sq = ExactSubquotient(m, top, cols)
    source = FgAbelianGroup(free_rank=m)
    proj_cols = [sq.class_of([1 if i == k else 0 for i in range(m)]) for k in range(m)]
    mat = [
        [proj_cols[k][t] for k in range(m)]
        for t in range(sq.group.gen_count())
    ]
    return sq.group, SubquotientMap(source, sq.group, mat)


# ---------------------------------------------------------------------------
# Chain complexes of presented groups (exact route).
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainComplexSpec:
    """A bounded chain complex of presented abelian groups.

    ``generators[k]`` counts generators in degree k, ``relations[k]`` lists
    relation vectors (each of length ``generators[k]``), and
    ``differentials[k]`` is the matrix of d_k : C_k -> C_{k-1} given as
    rows.  Degrees absent from ``generators`` are zero.
    """

    degrees: tuple
    generators: dict
    relations: dict
    differentials: dict

    def gens(self, k):
        return self.generators.get(k, 0)

    def rels(self, k):
        return [list(v) for v in self.relations.get(k, [])]

    def diff(self, k):
        """Matrix of d_k as rows; identity-shaped zero when absent."""
        mat = self.differentials.get(k)
        rows_out = self.gens(k - 1)
        cols = self.gens(k)
        if mat is None:
            return [[0] * cols for _ in range(rows_out)]
        return [list(r) for r in mat]


def validate_complex(spec):
    """Check shapes, well-definedness and d∘d = 0 modulo relations.

    Raises ValueError naming the offending degree on failure.
    """
    for k in spec.degrees:
        nk = spec.gens(k)
        for v in spec.rels(k):
            if len(v) != nk:
                raise ValueError(f"degree {k}: relation vector of wrong length")
        mat = spec.diff(k)
        if len(mat) != spec.gens(k - 1) or any(len(r) != nk for r in mat):
            raise ValueError(f"degree {k}: differential has wrong shape")
    for k in spec.degrees:
        mat = spec.diff(k)
        lower = _relation_lattice(spec, k - 1)
        for v in spec.rels(k):
            img = _matvec(mat, v)
            if not lower.contains(img):
                raise ValueError(
                    f"degree {k}: differential not well defined on relations"
                )
        mat2 = spec.diff(k + 1)
        if spec.gens(k + 1):
            comp = _matmul(mat, mat2)
            for j in range(spec.gens(k + 1)):
                col = [comp[i][j] for i in range(len(comp))]
                if not lower.contains(col):
                    raise ValueError(
                        f"degree {k + 1}: d∘d is nonzero modulo relations"
                    )


class _Lattice:
    """Integer lattice with membership tests, from generating vectors."""

    def __init__(self, ambient, vectors):
        self.ambient = ambient
        acc = EchelonAccumulator(ambient, 0)
        for v in vectors:
            acc.insert(list(v))
        self.pivots, self.basis = acc.triangular()

    def contains(self, v):
        v = list(v)
        for k, j in enumerate(self.pivots):
            if v[j]:
                a = self.basis[k][j]
                if v[j] % a:
                    return False
                q = v[j] // a
                for jj in range(j, self.ambient):
                    v[jj] -= q * self.basis[k][jj]
        return not any(v)


def _relation_lattice(spec, k):
    n = spec.gens(k)
    return _Lattice(n, spec.rels(k))


def _matvec(mat, v):
    return [sum(row[j] * v[j] for j in range(len(v))) for row in mat]


def _matmul(a, b):
    if not a:
        return []
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if inner else 0
    return [
        [sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)]
        for i in range(rows)
    ]


def homology_at(spec, degree):
    """Homology of the presented complex at one degree.

    Returns an ExactSubquotient whose representatives are cycles in the
    generator coordinates of ``C_degree``.
    """
    validate_complex(spec)
    n = spec.gens(degree)
    if n == 0:
        return ExactSubquotient(0, [], [])
    d_here = spec.diff(degree)
    rels_below = spec.rels(degree - 1)
    m_below = spec.gens(degree - 1)
    # cycles: x with d(x) in the relation lattice below; get them as the
    # x-part of the integer kernel of [d | rels_below]
    stacked_cols = n + len(rels_below)
    stacked = [
        [d_here[i][j] for j in range(n)]
        + [rels_below[t][i] for t in range(len(rels_below))]
        for i in range(m_below)
    ]
    top = _integer_kernel_x_part(stacked, n) if m_below else _full_basis(n)
    top.extend(spec.rels(degree))
    d_above = spec.diff(degree + 1)
    bottom = [
        [d_above[i][j] for i in range(n)] for j in range(spec.gens(degree + 1))
    ]
    bottom.extend(spec.rels(degree))
    return ExactSubquotient(n, top, bottom)


def _full_basis(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _integer_kernel_x_part(matrix, nx):
    """Basis of the projection to the first nx coordinates of ker(matrix)."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    snf = smith_normal_form(matrix)
    rank = sum(1 for x in snf.d if x)
    vt = [list(col) for col in zip(*snf.v)] if n else []
    out = []
    for i in range(rank, n):
        out.append(list(vt[i][:nx]))
    return out


def induced_map_on_homology(src_spec, dst_spec, chain_maps, degree):
    """Map on homology induced by a chain map, as a SubquotientMap.

    ``chain_maps[k]`` is the matrix (rows) of the degree-k component.
    Commutation with the differentials is checked modulo relations and a
    failing square is reported by degree.
    """
    validate_complex(src_spec)
    validate_complex(dst_spec)

    def component(k):
        mat = chain_maps.get(k)
        if mat is None:
            return [[0] * src_spec.gens(k) for _ in range(dst_spec.gens(k))]
        return [list(r) for r in mat]

    for k in sorted(set(src_spec.degrees)):
        left = _matmul(component(k - 1), src_spec.diff(k))
        right = _matmul(dst_spec.diff(k), component(k))
        lat = _relation_lattice(dst_spec, k - 1)
        for j in range(src_spec.gens(k)):
            col = [left[i][j] - right[i][j] for i in range(len(left))]
            if not lat.contains(col):
                raise ValueError(
                    f"chain map does not commute with d at degree {k}"
                )
    h_src = homology_at(src_spec, degree)
    h_dst = homology_at(dst_spec, degree)
    f = component(degree)
    cols = [h_dst.class_of(_matvec(f, list(rep))) for rep in h_src.representatives]
    mat = [
        [cols[s][t] for s in range(len(cols))]
        for t in range(h_dst.group.gen_count())
    ]
    return SubquotientMap(h_src.group, h_dst.group, mat)


# ---------------------------------------------------------------------------
# Modular engine: kernels and subquotients of finite coordinate systems.
# ---------------------------------------------------------------------------


class ModSubquotient:
    """K / D for K a congruence kernel inside ``⊕ Z/m_j`` (finite).

    K is ``{x : each congruence row · x ≡ 0 mod L}`` (rows pre-scaled to
    the common modulus L) viewed in the presented group with coordinate
    orders ``moduli``; D is generated by the given denominator vectors.
    Exposes the abstract group, generator representatives, and class
    coordinates for arbitrary elements of K.
    """

    def __init__(self, moduli, congruence_rows, L, denominators=(),
                 want_representatives=True, trusted_rows=False):
        n = len(moduli)
        self.moduli = tuple(moduli)
        self.L = L
        if any(L % m for m in moduli):
            raise ValueError("every coordinate order must divide L")
        acc = EchelonAccumulator(n, L)
        if trusted_rows:
            # the caller certifies the column-scaling contract below; used
            # by row streams whose entries are scaled at construction time
            pending = list(congruence_rows)
        else:
            pending = []
            for r in congruence_rows:
                for j in range(n):
                    # row . x must depend on x_j only through x_j mod m_j
                    if r[j] % (L // moduli[j]):
                        raise ValueError(
                            "congruence row %r is not scaled to the "
                            "coordinate orders; column %d must be a "
                            "multiple of %d" % (list(r), j, L // moduli[j])
                        )
                pending.append(r)
        # inserting rows by ascending leading column keeps the echelon
        # nearly fill-free (each row lands at or past the existing
        # pivots), which cuts the reduction work by orders of magnitude
        # on the large structured systems coming from cochain complexes
        pending.sort(key=lambda r: first_nonzero(r, 0))
        for r in pending:
            acc.insert(r)
        del pending
        pivots, tri = acc.triangular(canonical=False)
        self._zc_cache = None
        full = []
        have = dict(zip(pivots, tri))
        for j in range(n):
            full.append(have.get(j) or new_row(n, L))
        t = _diagonalize(full, n, L, track_cols=True)
        # gcd(stored, L) = gcd(true, L); a stored 0 is an unconstrained
        # direction and gcd(0, L) = L.
        g_list = [gcd(t.rows[i][i], L) for i in range(n)]
        self._c = [L // g for g in g_list]
        self._VT = t.VT
        self._W = t.W
        self._idx = [i for i in range(n) if g_list[i] > 1]
        self._orders = [g_list[i] for i in self._idx]
        # |K| inside the presented coordinates: |Λ / L Z^n| divided by
        # |diag(moduli) Z^n / L Z^n|
        self.kernel_order = (prod(g_list) * prod(moduli)) // L**n
        k = len(self._idx)
        rel_cols = []
        for j in range(n):
            if moduli[j] < L:
                rel_cols.append(self._zcoords_of_scaled_unit(j))
        for w in denominators:
            rel_cols.append(self.zcoords(w))
        if k == 0:
            self.group = FgAbelianGroup()
            self.representatives = () if want_representatives else None
            self._Urows = []
            self._dprime = []
            self._positions = []
            return
        cols_n = k + len(rel_cols)
        pres = []
        for a in range(k):
            row = new_row(cols_n, L)
            row[a] = self._orders[a] % L
            for b, col in enumerate(rel_cols):
                row[k + b] = col[a] % L
            pres.append(row)
        td = _diagonalize(pres, cols_n, L, track_rows=True)
        kk = min(k, cols_n)
        _chain_fixup(td, kk)
        _sort_diagonal(td, kk)
        # every invariant factor divides L because diag(orders) is in the
        # relation lattice; a stored 0 is interpreted as the factor L
        dprime = [_interp(td.rows[i][i], L) for i in range(kk)]
        self._Urows = td.U
        self._dprime = dprime
        self._positions = [i for i in range(k) if dprime[i] != 1]
        self.group = FgAbelianGroup.from_factors(
            [dprime[i] for i in self._positions]
        )
        if want_representatives:
            reps = []
            for i in self._positions:
                vec = [0] * n
                for a in range(k):
                    coef = td.UinvT[i][a]
                    if coef:
                        self._add_generator(vec, a, coef)
                reps.append(tuple(v % moduli[j] for j, v in enumerate(vec)))
            self.representatives = tuple(reps)
        else:
            self.representatives = None

    def _add_generator(self, vec, a, coef):
        """vec += coef * u_a where u_a = c_i * (column i of V), i = idx[a]."""
        i = self._idx[a]
        c = self._c[i]
        row = self._VT[i]
        for j in range(len(vec)):
            v = row[j]
            if v:
                vec[j] += coef * c * v

    def generator_vector(self, a):
        vec = [0] * len(self.moduli)
        self._add_generator(vec, a, 1)
        return tuple(v % self.moduli[j] for j, v in enumerate(vec))

    def _zcoords_of_scaled_unit(self, j):
        m = self.moduli[j]
        out = []
        for a in self._idx:
            y = (m * self._W[a][j]) % self.L
            c = self._c[a]
            if y % c:
                raise ValueError(
                    "congruence system is not well defined on the presented"
                    " coordinates"
                )
            out.append((y // c) % (self.L // c))
        return out

    def zcoords(self, x):
        """Generator coordinates of x in K (raises if x is not in K).

        ``x`` may be a dense vector or a sparse list of (index, value)
        pairs; sparse input keeps the cost at ``n * nnz``.
        """
        L = self.L
        if x and isinstance(x[0], tuple):
            pairs = [(j, v % L) for j, v in x if v % L]
        else:
            pairs = [(j, v % L) for j, v in enumerate(x) if v % L]
        idxs = pack_row([j for j, _ in pairs], L)
        vals = pack_row([v for _, v in pairs], L)
        n = len(self.moduli)
        idx = self._idx
        if (
            _speedups is not None
            and n
            and 0 < L <= PACK_LIMIT
            and type(self._W[0]) is array
        ):
            if self._zc_cache is None:
                sel = [0] * n
                for i in idx:
                    sel[i] = 1
                self._zc_cache = (array("q", self._c), array("q", sel))
            cs, selv = self._zc_cache
            return _speedups.kernel_coords(self._W, idxs, vals, cs, selv, L)
        out = []
        ptr = 0
        for i in range(n):
            y = pairs_dot(self._W[i], idxs, vals, L)
            c = self._c[i]
            if y % c:
                raise ValueError("vector is not in the kernel")
            if ptr < len(idx) and idx[ptr] == i:
                out.append((y // c) % (L // c))
                ptr += 1
        return out

    def class_of(self, x):
        """Class coordinates of x on the group's generators."""
        z = self.zcoords(x)
        L = self.L
        out = []
        for i in self._positions:
            s = sum(
                self._Urows[i][a] * z[a] for a in range(len(z))
            ) % L
            out.append(s % self._dprime[i])
        return tuple(out)


def scaled_congruence_rows(matrix_rows, target_moduli, L):
    """Scale integer rows to the common modulus L.

    Row i expresses a congruence mod ``target_moduli[i]``; multiplying by
    ``L // target_moduli[i]`` turns it into a congruence mod L.
    """
    out = []
    for i, row in enumerate(matrix_rows):
        s = L // target_moduli[i]
        out.append(pack_row([(s * v) % L for v in row], L))
    return out


class SubquotientMap:
    """A homomorphism between groups in invariant factor coordinates.

    The matrix has one row per target generator and one column per source
    generator; entries are taken mod the target generator's order (free
    generators have order 0 and exact entries).  Construction validates
    well-definedness: the order of each source generator must kill its
    image column.
    """

    def __init__(self, source, target, matrix):
        self.source = source
        self.target = target
        tr = target.gen_count()
        sc = source.gen_count()
        if len(matrix) != tr or any(len(r) != sc for r in matrix):
            raise ValueError(
                f"matrix must be {tr}x{sc}, got "
                f"{len(matrix)}x{len(matrix[0]) if matrix else 0}"
            )
        t_orders = target.orders()
        s_orders = source.orders()
        mat = []
        for i in range(tr):
            o = t_orders[i]
            mat.append(tuple(v % o if o else v for v in matrix[i]))
        self.matrix = tuple(mat)
        for j in range(sc):
            oj = s_orders[j]
            if oj == 0:
                continue
            for i in range(tr):
                oi = t_orders[i]
                v = oj * self.matrix[i][j]
                if (v % oi) if oi else v:
                    raise ValueError(
                        f"not well defined: generator {j} has order {oj} but "
                        f"its image has a coordinate of order not dividing it"
                        f" (row {i})"
                    )

    @classmethod
    def zero(cls, source, target):
        return cls(
            source,
            target,
            [[0] * source.gen_count() for _ in range(target.gen_count())],
        )

    @classmethod
    def identity(cls, group):
        n = group.gen_count()
        return cls(group, group, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __call__(self, coords):
        t_orders = self.target.orders()
        out = []
        for i in range(self.target.gen_count()):
            s = sum(self.matrix[i][j] * coords[j] for j in range(len(coords)))
            o = t_orders[i]
            out.append(s % o if o else s)
        return tuple(out)

    def compose(self, other):
        """self ∘ other (other's target must equal self's source).

        Dimensions come from the groups, not the matrices, so empty
        sources and targets compose correctly.
        """
        if other.target != self.source:
            raise ValueError("composition mismatch")
        inner = self.source.gen_count()
        rows = self.target.gen_count()
        cols = other.source.gen_count()
        prod_rows = [
            [
                sum(self.matrix[i][t] * other.matrix[t][j]
                    for t in range(inner))
                for j in range(cols)
            ]
            for i in range(rows)
        ]
        return SubquotientMap(other.source, self.target, prod_rows)

    def add(self, other):
        if other.source != self.source or other.target != self.target:
            raise ValueError("sum mismatch")
        rows = [
            [self.matrix[i][j] + other.matrix[i][j] for j in range(self.source.gen_count())]
            for i in range(self.target.gen_count())
        ]
        return SubquotientMap(self.source, self.target, rows)

    def negate(self):
        rows = [[-v for v in r] for r in self.matrix]
        return SubquotientMap(self.source, self.target, rows)

    def __eq__(self, other):
        if not isinstance(other, SubquotientMap):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        return self.matrix == other.matrix

    def __hash__(self):
        return hash((self.source, self.target, self.matrix))

    def is_zero(self):
        return all(all(v == 0 for v in row) for row in self.matrix)

    def _require_finite(self):
        if not (self.source.is_finite() and self.target.is_finite()):
            raise ValueError("this operation is implemented for finite groups")

    def kernel(self):
        """Kernel as a ModSubquotient of the source coordinates."""
        self._require_finite()
        o = list(self.source.orders())
        q = list(self.target.orders())
        if not o:
            return ModSubquotient([1], [], 1)
        L = lcm(*(o + q))
        rows = scaled_congruence_rows([list(r) for r in self.matrix], q, L)
        return ModSubquotient(o, rows, L)

    def kernel_structure(self):
        return self.kernel().group

    def image_structure(self):
        """Image structure via source / kernel."""
        self._require_finite()
        ker = self.kernel()
        o = list(self.source.orders())
        if not o:
            return FgAbelianGroup()
        L = lcm(*o)
        dens = [list(g) for g in
                (ker.generator_vector(a) for a in range(len(ker._idx)))]
        sq = ModSubquotient(o, [], L, denominators=dens,
                            want_representatives=False)
        return sq.group

    def is_injective(self):
        self._require_finite()
        return self.kernel().kernel_order == 1

    def is_surjective(self):
        self._require_finite()
        src = self.source.order()
        ker = self.kernel().kernel_order
        return src // ker == self.target.order()

    def is_isomorphism(self):
        self._require_finite()
        return (
            self.source.order() == self.target.order()
            and self.kernel().kernel_order == 1
        )

    def dual(self):
        """The Pontryagin dual map between the dual groups.

        For f : A -> B the dual B* -> A* has matrix entries
        ``f*[i][j] = f[j][i] * o_i / q_j`` on the standard dual
        generators; integrality is exactly well-definedness of f.
        """
        self._require_finite()
        o = self.source.orders()
        q = self.target.orders()
        rows = []
        for i in range(len(o)):
            row = []
            for j in range(len(q)):
                row.append((self.matrix[j][i] * o[i]) // q[j] % o[i])
            rows.append(row)
        return SubquotientMap(self.target.dual(), self.source.dual(), rows)

    def __repr__(self):
        return (
            f"SubquotientMap({self.source} -> {self.target}, "
            f"matrix={self.matrix})"
        )


def solve_congruence(rows, ncols, b, L):
    """One solution x of ``rows · x ≡ b (mod L)``, or None.

    ``rows`` are consumed.  Entries of the solution are in [0, L).
    """
    t = _diagonalize(rows, ncols, L, track_rows=True, track_cols=True,
                     canonical=False)
    m = len(t.rows)
    ub = []
    for i in range(m):
        s = sum(t.U[i][j] * b[j] for j in range(len(b))) % L
        ub.append(s)
    x = [0] * ncols
    for i in range(min(m, ncols)):
        d = t.rows[i][i] % L
        g = gcd(d, L)
        if ub[i] % g:
            return None
        if g == L:
            z = 0
        else:
            z = (ub[i] // g) * _modinv(d // g, L // g) % (L // g)
        if z:
            row = t.VT[i]
            for j in range(ncols):
                v = row[j]
                if v:
                    x[j] = (x[j] + z * v) % L
    for i in range(ncols, m):
        if ub[i] % L:
            return None
    return x
