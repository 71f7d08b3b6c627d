"""Finite modules over a finite group, with the constructions that feed
cohomology: Pontryagin duals, invariants and coinvariants, induced and
coinduced modules, restriction along a homomorphism, and diagonal tensor
products.

A module is a fixed coordinate presentation ``Z/m_1 + ... + Z/m_k``
together with one action matrix per group element, left-action
convention ``(gh) a = g (h a)``.  Only generator matrices are supplied
by callers; the rest are expanded along the multiplication table, and
the expansion is then verified on every generator edge ``g * x``.  That
edge check proves the homomorphism property for the whole table (by
induction on word length), and it forces each generator matrix to be
invertible, because ``M(g) M(g^-1) = M(e) = I`` is one of the checked
edges.

Everything is a left module.  A right action, where one is needed, is
encoded as the left action of the inverse element; the Pontryagin dual
below does exactly that with its inverse-transpose matrices.
"""

from __future__ import annotations

from math import gcd, lcm, prod

from profinity.exact_algebra import (
    FgAbelianGroup,
    ModSubquotient,
    scaled_congruence_rows,
)


def _matmul(a, b, row_moduli):
    k = len(row_moduli)
    out = []
    for i in range(k):
        arow = a[i]
        m = row_moduli[i]
        row = []
        for j in range(k):
            s = 0
            for t in range(k):
                v = arow[t]
                if v:
                    s += v * b[t][j]
            row.append(s % m)
        out.append(tuple(row))
    return tuple(out)


def _identity_matrix(moduli):
    k = len(moduli)
    return tuple(
        tuple((1 if i == j else 0) % moduli[i] for j in range(k))
        for i in range(k)
    )


def _normalize_matrix(mat, moduli):
    k = len(moduli)
    if len(mat) != k or any(len(row) != k for row in mat):
        raise ValueError("action matrix must be %d x %d" % (k, k))
    out = tuple(
        tuple(int(v) % moduli[i] for v in row)
        for i, row in enumerate(mat)
    )
    for j in range(k):
        for i in range(k):
            if (out[i][j] * moduli[j]) % moduli[i]:
                raise ValueError(
                    "matrix entry (%d, %d) does not respect the coordinate "
                    "orders: %d * %d is nonzero mod %d"
                    % (i, j, out[i][j], moduli[j], moduli[i])
                )
    return out


class GModule:
    """A finite abelian group with a verified action of a finite group.

    ``moduli`` is the coordinate presentation; ``act[x]`` is the matrix
    of the element with index x.  Elements of the module are coordinate
    tuples reduced mod the respective ``moduli``.  Instances are
    immutable and verified at construction.
    """

    __slots__ = ("group", "moduli", "act")

    def __init__(self, group, moduli, element_matrices):
        moduli = tuple(int(m) for m in moduli)
        if any(m < 1 for m in moduli):
            raise ValueError("coordinate orders must be positive")
        n = group.order
        if len(element_matrices) != n:
            raise ValueError("need one action matrix per group element")
        act = [
            _normalize_matrix(element_matrices[x], moduli) for x in range(n)
        ]
        ident = _identity_matrix(moduli)
        if act[group.identity] != ident:
            raise ValueError("the identity element must act as the identity")
        for g in group.generators:
            mg = act[g]
            for x in range(n):
                got = act[group.mul[g][x]]
                want = _matmul(mg, act[x], moduli)
                if got != want:
                    raise ValueError(
                        "action violates the relation %s * %s = %s: "
                        "M(g) M(x) disagrees with M(g x)"
                        % (group.names[g], group.names[x],
                           group.names[group.mul[g][x]])
                    )
        self.group = group
        self.moduli = moduli
        self.act = tuple(act)

    def matrix(self, x):
        return self.act[x]

    def apply(self, x, vec):
        """The action of group element ``x`` on a coordinate vector."""
        mat = self.act[x]
        return tuple(
            sum(mat[i][j] * vec[j] for j in range(len(vec))) % self.moduli[i]
            for i in range(len(self.moduli))
        )

    def order(self):
        return prod(self.moduli)

    def exponent(self):
        return lcm(*self.moduli) if self.moduli else 1

    def underlying(self):
        return FgAbelianGroup.from_factors(self.moduli)

    def has_trivial_action(self):
        ident = _identity_matrix(self.moduli)
        return all(m == ident for m in self.act)

    def elements(self):
        """All coordinate tuples, lexicographic in the presentation."""
        out = [()]
        for m in self.moduli:
            out = [v + (r,) for v in out for r in range(m)]
        return out

    def __repr__(self):
        return "GModule(group_order=%d, moduli=%r)" % (
            self.group.order,
            list(self.moduli),
        )


def _expand_generators(group, moduli, gen_matrices):
    """Per-element matrices from per-generator ones, along a BFS tree."""
    n = group.order
    mats = [None] * n
    mats[group.identity] = _identity_matrix(moduli)
    frontier = [group.identity]
    while frontier:
        x = frontier.pop()
        for g, mg in gen_matrices.items():
            y = group.mul[g][x]
            if mats[y] is None:
                mats[y] = _matmul(mg, mats[x], moduli)
                frontier.append(y)
    if any(m is None for m in mats):
        raise ValueError("generator matrices must cover a generating set")
    return mats


def trivial_module(group, factors):
    """The given abelian group with every element acting as the identity."""
    moduli = tuple(int(m) for m in factors)
    ident = _identity_matrix(moduli)
    return GModule(group, moduli, [ident] * group.order)


def regular_module(group, m):
    """``Z/m[G]``: one Z/m coordinate per group element, permuted by G.

    The basis vector at index x is the group element x, and g sends it
    to the basis vector at ``g x``.
    """
    n = group.order
    moduli = (int(m),) * n
    gen_mats = {}
    for g in group.generators:
        gen_mats[g] = tuple(
            tuple(1 if i == group.mul[g][j] else 0 for j in range(n))
            for i in range(n)
        )
    if not group.generators:
        return trivial_module(group, moduli)
    mats = _expand_generators(group, moduli, gen_mats)
    return GModule(group, moduli, mats)


def explicit_module(group, moduli, gen_matrices):
    """A module from explicit generator matrices.

    ``gen_matrices`` maps generator index to matrix; the expansion along
    the table and the verification in GModule reject inconsistent or
    non-invertible data with the offending relation.
    """
    moduli = tuple(int(m) for m in moduli)
    norm = {}
    for g, mat in gen_matrices.items():
        g = int(g)
        if g not in set(group.generators):
            raise ValueError(
                "element %d is not one of the declared generators" % g
            )
        norm[g] = _normalize_matrix(mat, moduli)
    missing = set(group.generators) - set(norm)
    if missing:
        raise ValueError("missing matrices for generators %r" % sorted(missing))
    mats = _expand_generators(group, moduli, norm)
    return GModule(group, moduli, mats)


def build_module(group, spec):
    """Build a module from a description (the CLI job vocabulary).

    Kinds: ``trivial`` (factors), ``regular`` (m), ``explicit`` (moduli,
    action: a map from generator index to matrix).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("module description must be a dict with a 'kind'")
    kind = spec["kind"]
    if kind == "trivial":
        return trivial_module(group, spec["factors"])
    if kind == "regular":
        return regular_module(group, spec["m"])
    if kind == "explicit":
        action = spec.get("action", {})
        if isinstance(action, dict):
            items = {int(k): v for k, v in action.items()}
        else:
            items = {int(k): v for k, v in action}
        return explicit_module(group, spec["moduli"], items)
    raise ValueError("unknown module kind %r" % (kind,))


class ModuleMap:
    """A map of modules over the same group, as a coordinate matrix.

    ``matrix[i][j]`` is the i-th target coordinate of the image of the
    j-th source basis vector.  Construction verifies that the matrix
    respects the coordinate orders and commutes with every generator.
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix):
        if source.group.mul != target.group.mul:
            raise ValueError("source and target must share the group")
        ks, kt = len(source.moduli), len(target.moduli)
        if len(matrix) != kt or any(len(r) != ks for r in matrix):
            raise ValueError("map matrix must be %d x %d" % (kt, ks))
        mat = tuple(
            tuple(int(v) % target.moduli[i] for v in row)
            for i, row in enumerate(matrix)
        )
        for j in range(ks):
            for i in range(kt):
                if (mat[i][j] * source.moduli[j]) % target.moduli[i]:
                    raise ValueError(
                        "map does not respect the coordinate orders at "
                        "entry (%d, %d)" % (i, j)
                    )
        for g in source.group.generators:
            left = _rect_matmul(target.act[g], mat, target.moduli)
            right = _rect_matmul(mat, source.act[g], target.moduli)
            if left != right:
                raise ValueError(
                    "map fails to commute with the action of generator %s"
                    % source.group.names[g]
                )
        self.source = source
        self.target = target
        self.matrix = mat

    def __call__(self, vec):
        kt = len(self.target.moduli)
        ks = len(self.source.moduli)
        return tuple(
            sum(self.matrix[i][j] * vec[j] for j in range(ks))
            % self.target.moduli[i]
            for i in range(kt)
        )

    def compose(self, other):
        """``self after other``."""
        if other.target is not self.source:
            if other.target.moduli != self.source.moduli or \
                    other.target.act != self.source.act:
                raise ValueError("composition source/target mismatch")
        mat = _rect_matmul(self.matrix, other.matrix, self.target.moduli)
        return ModuleMap(other.source, self.target, mat)


def _rect_matmul(a, b, row_moduli):
    """``a @ b`` with rows of the result reduced mod ``row_moduli``."""
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if inner else 0
    out = []
    for i in range(rows):
        arow = a[i]
        m = row_moduli[i]
        row = []
        for j in range(cols):
            s = 0
            for t in range(inner):
                v = arow[t]
                if v:
                    s += v * b[t][j]
            row.append(s % m)
        out.append(tuple(row))
    return tuple(out)


def identity_map(m):
    return ModuleMap(m, m, _identity_matrix(m.moduli))


# ---------------------------------------------------------------------------
# Pontryagin duality
# ---------------------------------------------------------------------------


def pontryagin_dual(m):
    """The dual module ``Hom(M, Q/Z)`` with action ``(g f)(a) = f(g^-1 a)``.

    The dual of ``Z/m_1 + ... + Z/m_k`` is presented on the same moduli:
    the i-th dual basis vector is the character sending the i-th basis
    vector to ``1/m_i``.  On matrices the action is the transpose of the
    inverse element's matrix, rescaled by ``m_k / m_j`` so entries stay
    integral; the rescaling is exactly the respect-the-orders condition
    of the original matrix.
    """
    moduli = m.moduli
    k = len(moduli)
    group = m.group
    mats = []
    for x in range(group.order):
        src = m.act[group.inverse[x]]
        mats.append(
            tuple(
                tuple(
                    (src[j][i] * moduli[i]) // moduli[j] % moduli[i]
                    for j in range(k)
                )
                for i in range(k)
            )
        )
    return GModule(group, moduli, mats)


def dual_map(f):
    """The dual of a module map, ``f*(phi) = phi after f``."""
    src_d = pontryagin_dual(f.target)
    tgt_d = pontryagin_dual(f.source)
    sm = f.source.moduli
    tm = f.target.moduli
    mat = tuple(
        tuple((f.matrix[j][i] * sm[i]) // tm[j] % sm[i] for j in range(len(tm)))
        for i in range(len(sm))
    )
    return ModuleMap(src_d, tgt_d, mat)


def evaluation_map(m):
    """The canonical map M -> M**; its matrix is the identity in the
    chosen dual coordinates, so this mostly certifies equivariance."""
    double = pontryagin_dual(pontryagin_dual(m))
    return ModuleMap(m, double, _identity_matrix(m.moduli))


# ---------------------------------------------------------------------------
# Invariants and coinvariants
# ---------------------------------------------------------------------------


def invariants(m):
    """``M^G`` with its inclusion into M.

    The fixed subgroup is the kernel of the stacked ``M(g) - I`` over
    the group generators; fixed under generators implies fixed under
    every element.
    """
    k = len(m.moduli)
    L = lcm(1, *m.moduli)
    rows = []
    row_moduli = []
    for g in m.group.generators:
        mat = m.act[g]
        for i in range(k):
            row = [(mat[i][j] - (1 if i == j else 0)) % m.moduli[i]
                   for j in range(k)]
            rows.append(row)
            row_moduli.append(m.moduli[i])
    packed = scaled_congruence_rows(rows, row_moduli, L) if rows else []
    sq = ModSubquotient(m.moduli, packed, L)
    group = sq.group
    reps = sq.representatives or ()
    sub = trivial_module(m.group, group.factors)
    mat = [[reps[t][i] for t in range(len(reps))] for i in range(k)]
    inclusion = ModuleMap(sub, m, mat)
    return group, inclusion


def coinvariants(m):
    """``M_G = M / <g a - a>`` with its projection from M.

    The denominator subgroup is generated by ``(M(x) - I) e_j`` over all
    group elements x, which is the augmentation-ideal image.
    """
    k = len(m.moduli)
    L = lcm(1, *m.moduli)
    dens = []
    for x in range(m.group.order):
        if x == m.group.identity:
            continue
        mat = m.act[x]
        for j in range(k):
            vec = [
                (mat[i][j] - (1 if i == j else 0)) % m.moduli[i]
                for i in range(k)
            ]
            if any(vec):
                dens.append(vec)
    sq = ModSubquotient(m.moduli, [], L, denominators=dens)
    group = sq.group
    quot = trivial_module(m.group, group.factors)
    cols = [sq.class_of([1 if i == j else 0 for i in range(k)])
            for j in range(k)]
    mat = [
        [cols[j][t] for j in range(k)]
        for t in range(group.gen_count())
    ]
    projection = ModuleMap(m, quot, mat)
    return group, projection


# ---------------------------------------------------------------------------
# Induction, coinduction, restriction, tensor
# ---------------------------------------------------------------------------


def induce(h_sub, a):
    """``Ind_H^G A``: one block of A per coset, permuted with H-twists.

    With T the right-coset transversal (G the disjoint union of the
    ``H t``), the tensor description uses the left-coset representatives
    ``t^-1``: the block at coset index c is ``t_c^-1 (x) A``, and
    ``g (t_c^-1 (x) a) = t_{c'}^-1 (x) h a`` where ``t_{c'} g' = h t_c``
    solves the coset shift.
    """
    pos = _check_subgroup_module(h_sub, a)
    g_amb = h_sub.ambient
    k = len(a.moduli)
    n_blocks = h_sub.index
    moduli = tuple(a.moduli[i] for _ in range(n_blocks) for i in range(k))
    mats = []
    for g in range(g_amb.order):
        mat = [[0] * (n_blocks * k) for _ in range(n_blocks * k)]
        for c in range(n_blocks):
            # g * t_c^-1 = t_cp^-1 * h  with  h0 = h^-1
            y_inv = g_amb.mul[h_sub.transversal[c]][g_amb.inverse[g]]
            h0, cp = h_sub.factor(y_inv)
            block = a.act[pos[g_amb.inverse[h0]]]
            for i in range(k):
                for j in range(k):
                    v = block[i][j]
                    if v:
                        mat[cp * k + i][c * k + j] = v
        mats.append(mat)
    return GModule(g_amb, moduli, mats)


def coinduce(h_sub, a):
    """``Coind_H^G A = Hom_H(Z[G], A)`` on the same coordinates.

    An H-equivariant function on G is free on the transversal, so the
    block at coset index c holds ``f(t_c)``; the translated function
    ``(g f)(t_c) = f(t_c g)`` is read off by factoring ``t_c g = h t_{c'}``.
    The resulting matrices coincide with the induced ones, which is the
    finite-index agreement of the two constructions.
    """
    pos = _check_subgroup_module(h_sub, a)
    g_amb = h_sub.ambient
    k = len(a.moduli)
    n_blocks = h_sub.index
    moduli = tuple(a.moduli[i] for _ in range(n_blocks) for i in range(k))
    mats = []
    for g in range(g_amb.order):
        mat = [[0] * (n_blocks * k) for _ in range(n_blocks * k)]
        for c in range(n_blocks):
            h, cp = h_sub.factor(g_amb.mul[h_sub.transversal[c]][g])
            block = a.act[pos[h]]
            for i in range(k):
                for j in range(k):
                    v = block[i][j]
                    if v:
                        mat[c * k + i][cp * k + j] = v
        mats.append(mat)
    return GModule(g_amb, moduli, mats)


def _check_subgroup_module(h_sub, a):
    """Match the module's group to the subgroup and return the position
    map from ambient member index to module group index."""
    amb = h_sub.ambient
    members = h_sub.members
    if a.group.order != len(members):
        raise ValueError("module is not over the subgroup")
    pos = {m: i for i, m in enumerate(members)}
    for x in members:
        for y in members:
            if pos[amb.mul[x][y]] != a.group.mul[pos[x]][pos[y]]:
                raise ValueError(
                    "module group does not match the subgroup table"
                )
    return pos


def restrict_along(rho, a):
    """Pull a module back along a group homomorphism."""
    if rho.target.mul != a.group.mul:
        raise ValueError("homomorphism target must be the module's group")
    mats = [a.act[rho(x)] for x in range(rho.source.order)]
    return GModule(rho.source, a.moduli, mats)


def tensor_product(m, n):
    """``M (x) N`` with the diagonal action.

    Coordinates are the pairs (i, j) with ``gcd(m_i, n_j) > 1``, in
    row-major order; the pair's order is that gcd.
    """
    if m.group.mul != n.group.mul:
        raise ValueError("tensor factors must share the group")
    pairs = [
        (i, j)
        for i in range(len(m.moduli))
        for j in range(len(n.moduli))
        if gcd(m.moduli[i], n.moduli[j]) > 1
    ]
    moduli = tuple(gcd(m.moduli[i], n.moduli[j]) for i, j in pairs)
    mats = []
    for x in range(m.group.order):
        am, an = m.act[x], n.act[x]
        mat = tuple(
            tuple(
                (am[k][i] * an[l][j]) % moduli[r]
                for (i, j) in pairs
            )
            for r, (k, l) in enumerate(pairs)
        )
        mats.append(mat)
    return GModule(m.group, moduli, mats)


# ---------------------------------------------------------------------------
# Isomorphism testing
# ---------------------------------------------------------------------------

#: Above this module order the equivariant search is not attempted.
ISO_SEARCH_ORDER_CAP = 64

#: Largest equivariant hom-group the search will enumerate.
ISO_SEARCH_HOM_CAP = 50_000


def equivariant_hom_group(m, n):
    """``Hom_G(M, N)`` as a ModSubquotient over the entry coordinates.

    A matrix entry (i, j) lives in ``Hom(Z/m_j, Z/n_i) = Z/gcd``; the
    equivariance conditions against each generator are linear
    congruences in those entries.
    """
    km, kn = len(m.moduli), len(n.moduli)
    entries = [(i, j) for i in range(kn) for j in range(km)]
    entry_mod = [gcd(n.moduli[i], m.moduli[j]) for i, j in entries]
    # entry value v encodes the map x -> v * (n_i / gcd) * x
    L = lcm(1, *n.moduli, *m.moduli)
    rows = []
    row_moduli = []
    for g in m.group.generators:
        gm = m.act[g]
        gn = n.act[g]
        for i in range(kn):
            for j in range(km):
                # row for coordinate (i, j) of  N(g) F - F M(g)
                row = [0] * len(entries)
                for t in range(kn):
                    v = gn[i][t]
                    if v:
                        e = entries.index((t, j))
                        scale = n.moduli[t] // entry_mod[e]
                        row[e] += v * scale
                for t in range(km):
                    v = gm[t][j]
                    if v:
                        e = entries.index((i, t))
                        scale = n.moduli[i] // entry_mod[e]
                        row[e] -= v * scale
                rows.append([val % n.moduli[i] for val in row])
                row_moduli.append(n.moduli[i])
    packed = scaled_congruence_rows(rows, row_moduli, L) if rows else []
    sq = ModSubquotient(entry_mod, packed, L)
    return sq, entries, entry_mod


def module_isomorphism_report(m, n):
    """Decide, or semi-decide, whether two modules are isomorphic.

    Returns a dict with ``isomorphic`` (True, False, or None when
    undecided), ``method`` (``exhaustive`` or ``invariant-battery``),
    and ``detail``.  The exhaustive route enumerates the equivariant hom
    group and looks for an invertible member; it runs only when both
    module orders are at most ISO_SEARCH_ORDER_CAP and the hom group is
    small enough to walk.
    """
    if m.group.mul != n.group.mul:
        return {
            "isomorphic": False,
            "method": "invariant-battery",
            "detail": "different groups",
        }
    if m.underlying().factors != n.underlying().factors:
        return {
            "isomorphic": False,
            "method": "invariant-battery",
            "detail": "underlying groups differ",
        }
    if m.moduli == n.moduli and m.act == n.act:
        return {
            "isomorphic": True,
            "method": "exhaustive",
            "detail": "identical presentations",
        }
    if (
        m.order() <= ISO_SEARCH_ORDER_CAP
        and n.order() <= ISO_SEARCH_ORDER_CAP
    ):
        sq, entries, entry_mod = equivariant_hom_group(m, n)
        if sq.kernel_order <= ISO_SEARCH_HOM_CAP:
            found = _search_invertible(sq, entries, entry_mod, m, n)
            return {
                "isomorphic": found,
                "method": "exhaustive",
                "detail": "searched %d equivariant maps" % sq.kernel_order,
            }
    inv_m, _ = invariants(m)
    inv_n, _ = invariants(n)
    if inv_m.factors != inv_n.factors:
        return {
            "isomorphic": False,
            "method": "invariant-battery",
            "detail": "invariant subgroups differ",
        }
    coin_m, _ = coinvariants(m)
    coin_n, _ = coinvariants(n)
    if coin_m.factors != coin_n.factors:
        return {
            "isomorphic": False,
            "method": "invariant-battery",
            "detail": "coinvariant quotients differ",
        }
    fixed_m = [_fixed_count(m, x) for x in range(m.group.order)]
    fixed_n = [_fixed_count(n, x) for x in range(n.group.order)]
    if fixed_m != fixed_n:
        return {
            "isomorphic": False,
            "method": "invariant-battery",
            "detail": "per-element fixed-point counts differ",
        }
    return {
        "isomorphic": None,
        "method": "invariant-battery",
        "detail": "all invariants agree; this method is a semi-decision",
    }


def _fixed_count(m, x):
    k = len(m.moduli)
    L = lcm(1, *m.moduli)
    mat = m.act[x]
    rows = [
        [(mat[i][j] - (1 if i == j else 0)) % m.moduli[i] for j in range(k)]
        for i in range(k)
    ]
    packed = scaled_congruence_rows(rows, list(m.moduli), L)
    sq = ModSubquotient(m.moduli, packed, L, want_representatives=False)
    return sq.kernel_order


def _search_invertible(sq, entries, entry_mod, m, n):
    kn, km = len(n.moduli), len(m.moduli)
    if m.order() != n.order():
        return False
    reps = sq.representatives or ()
    factors = sq.group.factors
    source_elems = m.elements()

    def decode(coords):
        vec = [0] * len(entries)
        for t, c in enumerate(coords):
            if c:
                r = reps[t]
                for e in range(len(entries)):
                    vec[e] = (vec[e] + c * r[e]) % entry_mod[e]
        mat = [[0] * km for _ in range(kn)]
        for e, (i, j) in enumerate(entries):
            mat[i][j] = vec[e] * (n.moduli[i] // entry_mod[e])
        return mat

    def all_coords():
        out = [()]
        for f in factors:
            out = [c + (r,) for c in out for r in range(f)]
        return out

    for coords in all_coords():
        mat = decode(coords)
        seen = set()
        ok = True
        for vec in source_elems:
            img = tuple(
                sum(mat[i][j] * vec[j] for j in range(km)) % n.moduli[i]
                for i in range(kn)
            )
            if img in seen:
                ok = False
                break
            seen.add(img)
        if ok:
            return True
    return False
