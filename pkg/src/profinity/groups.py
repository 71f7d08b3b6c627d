"""Explicit finite groups stored as full multiplication tables.

These are the finite-level carriers for everything downstream: quotients
feed the tower machinery, coset transversals feed induced modules, and
homomorphisms feed restriction and conjugation on cochains.  Tables are
verified eagerly, so any value of type FiniteGroup that escapes this
module satisfies all the group laws.

Associativity is checked with Light's test: once the identity and inverse
laws hold and a generating set S is known to reach every element by
left-bracketed products, verifying ``(x a) y = x (a y)`` for all x, y and
all middle elements a in S implies the law for every middle element.
That turns the n^3 triple scan into |S| * n^2 work, which keeps the
default order cap of 360 cheap while still reporting a literal failing
triple when a table is bad.
"""

from __future__ import annotations

from itertools import permutations

from profinity.exact_algebra import FgAbelianGroup

#: Largest group order built without an explicit override; |G|^3 cochain
#: spaces at degree 3 stay within desk scale below this.
DEFAULT_ORDER_CAP = 360


class GroupLawError(ValueError):
    """A would-be multiplication table violates one of the group laws."""


def _closure_under_table(mul, identity, seed):
    """All left-bracketed products of ``seed`` elements, as a set.

    Works on any table, associative or not, because it only ever extends
    words on the right; that is exactly the reachability notion Light's
    test needs.
    """
    seen = {identity}
    frontier = [identity]
    gens = list(seed)
    while frontier:
        x = frontier.pop()
        row = mul[x]
        for s in gens:
            y = row[s]
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


def _small_generating_subset(mul, identity, candidates):
    """Greedy subset of ``candidates`` with the same closure."""
    chosen = []
    closure = {identity}
    for c in candidates:
        if c not in closure:
            chosen.append(c)
            closure = _closure_under_table(mul, identity, chosen)
    return chosen, closure


class FiniteGroup:
    """A finite group given by its full multiplication table.

    ``mul[a][b]`` is the index of the product; ``names`` are display
    labels only.  The constructor verifies every law and raises
    GroupLawError with a concrete witness otherwise, so instances are
    trustworthy by construction.  Values are immutable.
    """

    __slots__ = ("mul", "identity", "inverse", "generators", "names")

    def __init__(self, mul, generators=None, names=None,
                 order_cap=DEFAULT_ORDER_CAP):
        n = len(mul)
        if n == 0:
            raise GroupLawError("a group has at least one element")
        if n > order_cap:
            raise GroupLawError(
                "order %d exceeds the cap %d" % (n, order_cap)
            )
        table = tuple(tuple(row) for row in mul)
        for a, row in enumerate(table):
            if len(row) != n or any(not 0 <= v < n for v in row):
                raise GroupLawError(
                    "row %d is not a permutation-ready row of size %d"
                    % (a, n)
                )
        identity = None
        for e in range(n):
            if all(table[e][x] == x and table[x][e] == x for x in range(n)):
                identity = e
                break
        if identity is None:
            raise GroupLawError("no two-sided identity element")
        inverse = [None] * n
        for x in range(n):
            for y in range(n):
                if table[x][y] == identity and table[y][x] == identity:
                    inverse[x] = y
                    break
            if inverse[x] is None:
                raise GroupLawError("element %d has no two-sided inverse" % x)

        if generators is None:
            candidates = range(n)
        else:
            candidates = list(generators)
        test_set, closure = _small_generating_subset(table, identity,
                                                     candidates)
        if len(closure) != n:
            raise GroupLawError(
                "generators %r only reach %d of %d elements"
                % (list(candidates), len(closure), n)
            )
        for a in test_set:
            for x in range(n):
                xa = table[x][a]
                row_a = table[a]
                row_xa = table[xa]
                for y in range(n):
                    if row_xa[y] != table[x][row_a[y]]:
                        raise GroupLawError(
                            "associativity fails on the triple "
                            "(%d, %d, %d): (x*a)*y=%d but x*(a*y)=%d"
                            % (x, a, y, row_xa[y], table[x][row_a[y]])
                        )

        self.mul = table
        self.identity = identity
        self.inverse = tuple(inverse)
        self.generators = tuple(test_set) if generators is None else tuple(
            dict.fromkeys(generators)
        )
        if names is None:
            names = tuple("e%d" % i for i in range(n))
        else:
            names = tuple(str(v) for v in names)
            if len(names) != n:
                raise ValueError("need one name per element")
        self.names = names

    @property
    def order(self):
        return len(self.mul)

    def op(self, a, b):
        return self.mul[a][b]

    def inv(self, a):
        return self.inverse[a]

    def conjugate(self, a, by):
        """``by * a * by^-1``."""
        return self.mul[self.mul[by][a]][self.inverse[by]]

    def element_order(self, a):
        k = 1
        x = a
        while x != self.identity:
            x = self.mul[x][a]
            k += 1
        return k

    def is_abelian(self):
        mul = self.mul
        n = len(mul)
        return all(
            mul[a][b] == mul[b][a] for a in range(n) for b in range(a)
        )

    def __repr__(self):
        return "FiniteGroup(order=%d)" % len(self.mul)

    def __eq__(self, other):
        return (
            isinstance(other, FiniteGroup)
            and self.mul == other.mul
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.mul, self.generators))


def cyclic(n):
    """The cyclic group Z/n with elements named by residues."""
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    mul = [[(a + b) % n for b in range(n)] for a in range(n)]
    gens = [] if n == 1 else [1]
    return FiniteGroup(mul, generators=gens, names=[str(i) for i in range(n)])


def product(g, h, order_cap=DEFAULT_ORDER_CAP):
    """Direct product with index ``a * |h| + b`` and pairwise names."""
    ng, nh = g.order, h.order
    mul = [
        [
            g.mul[a1][a2] * nh + h.mul[b1][b2]
            for a2 in range(ng)
            for b2 in range(nh)
        ]
        for a1 in range(ng)
        for b1 in range(nh)
    ]
    gens = [a * nh + h.identity for a in g.generators]
    gens += [g.identity * nh + b for b in h.generators]
    names = [
        "(%s,%s)" % (g.names[a], h.names[b])
        for a in range(ng)
        for b in range(nh)
    ]
    return FiniteGroup(mul, generators=gens, names=names,
                       order_cap=order_cap)


def symmetric(n, order_cap=DEFAULT_ORDER_CAP):
    """The symmetric group on ``{0..n-1}`` in lexicographic tuple order.

    An element is the tuple of images; the product ``p * q`` acts by q
    first, then p.
    """
    if n < 1:
        raise ValueError("symmetric group degree must be positive")
    elems = list(permutations(range(n)))
    index = {p: i for i, p in enumerate(elems)}
    mul = [
        [index[tuple(p[q[i]] for i in range(n))] for q in elems]
        for p in elems
    ]
    gens = []
    if n >= 2:
        swap = (1, 0) + tuple(range(2, n))
        gens.append(index[swap])
    if n >= 3:
        cycle = tuple(range(1, n)) + (0,)
        gens.append(index[cycle])
    names = [str(p) for p in elems]
    return FiniteGroup(mul, generators=gens, names=names,
                       order_cap=order_cap)


def build_group(spec, order_cap=DEFAULT_ORDER_CAP):
    """Build a group from a description (the CLI job vocabulary).

    Kinds: ``cyclic`` (n), ``symmetric`` (n), ``product`` (factors, a
    list of descriptions), ``explicit`` (table, optional generators and
    names).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("group description must be a dict with a 'kind'")
    kind = spec["kind"]
    if kind == "cyclic":
        g = cyclic(int(spec["n"]))
        if g.order > order_cap:
            raise GroupLawError(
                "order %d exceeds the cap %d" % (g.order, order_cap)
            )
        return g
    if kind == "symmetric":
        return symmetric(int(spec["n"]), order_cap=order_cap)
    if kind == "product":
        factors = spec.get("factors", [])
        if not factors:
            raise ValueError("product needs at least one factor")
        g = build_group(factors[0], order_cap=order_cap)
        for sub in factors[1:]:
            g = product(g, build_group(sub, order_cap=order_cap),
                        order_cap=order_cap)
        return g
    if kind == "explicit":
        return FiniteGroup(
            spec["table"],
            generators=spec.get("generators"),
            names=spec.get("names"),
            order_cap=order_cap,
        )
    raise ValueError("unknown group kind %r" % (kind,))


class Homomorphism:
    """A verified map of finite groups, stored pointwise."""

    __slots__ = ("source", "target", "image")

    def __init__(self, source, target, image):
        image = tuple(image)
        if len(image) != source.order:
            raise ValueError("need one image per source element")
        if any(not 0 <= v < target.order for v in image):
            raise ValueError("image indices out of range")
        ms, mt = source.mul, target.mul
        for x in range(source.order):
            for y in range(source.order):
                if image[ms[x][y]] != mt[image[x]][image[y]]:
                    raise ValueError(
                        "not a homomorphism at the pair (%d, %d)" % (x, y)
                    )
        self.source = source
        self.target = target
        self.image = image

    def __call__(self, x):
        return self.image[x]

    def kernel_members(self):
        e = self.target.identity
        return [x for x in range(self.source.order) if self.image[x] == e]

    def is_surjective(self):
        return len(set(self.image)) == self.target.order

    def is_injective(self):
        return len(set(self.image)) == self.source.order

    def compose(self, other):
        """``self after other``; other.target must be self.source."""
        if other.target.mul != self.source.mul:
            raise ValueError("composition source/target mismatch")
        return Homomorphism(
            other.source, self.target,
            [self.image[v] for v in other.image],
        )


def identity_hom(g):
    return Homomorphism(g, g, range(g.order))


def inner_automorphism(g, s):
    """Conjugation ``x -> s x s^-1`` as a verified automorphism."""
    return Homomorphism(g, g, [g.conjugate(x, s) for x in range(g.order)])


def subgroup_closure(g, seed):
    """Members of the subgroup generated by ``seed``, sorted by index."""
    seed = [int(s) for s in seed]
    closed = _closure_under_table(g.mul, g.identity, seed)
    # inverses come for free in a finite group: x^(order) = e
    return sorted(closed)


class SubgroupWithTransversal:
    """A subgroup together with one representative per right coset Hg.

    The identity represents the coset H itself; every other coset is
    represented by its smallest element index, so downstream cochain
    constructions are deterministic.  ``factor(x)`` splits x = h * t.
    """

    __slots__ = ("ambient", "members", "transversal", "coset_of")

    def __init__(self, ambient, members):
        members = sorted(set(int(m) for m in members))
        mset = set(members)
        if ambient.identity not in mset:
            raise ValueError("subgroup must contain the identity")
        for a in members:
            if ambient.inverse[a] not in mset:
                raise ValueError(
                    "subset not closed under inverse at element %d" % a
                )
            for b in members:
                if ambient.mul[a][b] not in mset:
                    raise ValueError(
                        "subset not closed under the table at the pair "
                        "(%d, %d)" % (a, b)
                    )
        self.ambient = ambient
        self.members = tuple(members)
        n = ambient.order
        coset_of = [None] * n
        transversal = [ambient.identity]
        for h in members:
            coset_of[h] = 0
        for x in range(n):
            if coset_of[x] is None:
                idx = len(transversal)
                transversal.append(x)
                for h in members:
                    coset_of[ambient.mul[h][x]] = idx
        self.transversal = tuple(transversal)
        self.coset_of = tuple(coset_of)

    @property
    def index(self):
        return len(self.transversal)

    def factor(self, x):
        """Split ``x = h * t`` with h in the subgroup, t the coset rep.

        Returns ``(h, coset_index)``.
        """
        c = self.coset_of[x]
        t = self.transversal[c]
        h = self.ambient.mul[x][self.ambient.inverse[t]]
        return h, c

    def is_normal(self):
        return self._normality_witness() is None

    def _normality_witness(self):
        g = self.ambient
        mset = set(self.members)
        for s in range(g.order):
            for h in self.members:
                c = g.conjugate(h, s)
                if c not in mset:
                    return (s, h, c)
        return None


def transversal(g, members):
    """Coset data for ``members``; rejects subsets that fail closure."""
    return SubgroupWithTransversal(g, members)


def subgroup_as_group(h_sub):
    """The subgroup as a standalone FiniteGroup plus the index dictionary.

    Returns ``(group, members, pos)``: ``members`` fixes the element
    order (ascending ambient indices), ``pos`` maps an ambient member
    index to its index in the new group.  Names are inherited.
    """
    members = h_sub.members
    pos = {x: p for p, x in enumerate(members)}
    amb = h_sub.ambient
    mul = [[pos[amb.mul[a][b]] for b in members] for a in members]
    names = [amb.names[x] for x in members]
    return FiniteGroup(mul, names=names), members, pos


def quotient_by(g, sub):
    """The quotient group and canonical projection for a normal subgroup.

    ``sub`` is a SubgroupWithTransversal in ``g``.  Rejects non-normal
    subgroups with an explicit conjugation witness.
    """
    if sub.ambient is not g and sub.ambient.mul != g.mul:
        raise ValueError("subgroup does not live in the given group")
    witness = sub._normality_witness()
    if witness is not None:
        s, h, c = witness
        raise ValueError(
            "subgroup is not normal: conjugating member %d by element %d "
            "gives %d, which is outside" % (h, s, c)
        )
    reps = sub.transversal
    coset_of = sub.coset_of
    k = len(reps)
    mul = [
        [coset_of[g.mul[reps[i]][reps[j]]] for j in range(k)]
        for i in range(k)
    ]
    names = ["[%s]" % g.names[r] for r in reps]
    gens = sorted(set(coset_of[x] for x in g.generators) - {coset_of[g.identity]})
    q = FiniteGroup(mul, generators=gens, names=names, order_cap=g.order)
    proj = Homomorphism(g, q, coset_of)
    assert q.order * len(sub.members) == g.order
    return q, proj


def commutator_members(g):
    """The commutator subgroup, as a sorted member list."""
    comms = set()
    for a in range(g.order):
        ia = g.inverse[a]
        for b in range(g.order):
            c = g.mul[g.mul[g.mul[ia][g.inverse[b]]][a]][b]
            comms.add(c)
    return subgroup_closure(g, comms)


def abelianization(g):
    """G made abelian, as an FgAbelianGroup in invariant factor form.

    The invariant factors are reconstructed from order-dividing counts
    of the abelian quotient: for each prime p, the count of solutions of
    ``x^(p^j) = e`` determines how many factors have p-exponent >= j.
    """
    comm = commutator_members(g)
    q, _ = quotient_by(g, transversal(g, comm))
    orders = [q.element_order(x) for x in range(q.order)]
    factor_exps = {}
    residue = q.order
    p = 2
    while residue > 1:
        if residue % p:
            p += 1
            continue
        # exps[j-1] = number of invariant factors with p-exponent >= j,
        # read off N(p^j) = #{x : x^(p^j) = e} = prev * p^exps[j-1]
        exps = []
        prev = 1
        j = 1
        while True:
            pj = p**j
            count = sum(1 for o in orders if pj % o == 0)
            if count == prev:
                break
            ratio = count // prev
            r = 0
            while ratio > 1:
                ratio //= p
                r += 1
            exps.append(r)
            prev = count
            j += 1
        factor_exps[p] = exps
        while residue % p == 0:
            residue //= p
        p += 1
    width = max((exps[0] for exps in factor_exps.values() if exps), default=0)
    factors = [1] * width
    for p, exps in factor_exps.items():
        for r in exps:
            # the r largest factors gain one more power of p
            for i in range(r):
                factors[width - 1 - i] *= p
    return FgAbelianGroup.from_factors(factors)
