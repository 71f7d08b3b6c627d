"""Module constructions over finite groups.

Oracles used here:
  * brute-force element enumeration for invariants (count vectors fixed
    by every generator) and for coinvariants (build the augmentation
    subgroup by closure, then count and classify cosets);
  * order-dividing counts pin down claimed abelian structures, as in the
    group tests;
  * character counting for the dual of a cyclic group: a character of
    Z/6 is determined by the image of 1 among the six elements of
    (1/6)Z/Z, so the dual has exactly 6 elements;
  * bilinear-map counting for the tensor example: a bilinear form on
    Z/4 x Z/6 into Q/Z is determined by B(1,1) in (1/gcd)Z/Z, so there
    are exactly gcd(4,6) = 2, fixing |Z/4 (x) Z/6| = 2.
"""

from __future__ import annotations

from itertools import product as iproduct
from math import gcd

import pytest

from profinity.exact_algebra import FgAbelianGroup
from profinity.gmodules import (
    GModule,
    ModuleMap,
    build_module,
    coinduce,
    coinvariants,
    dual_map,
    evaluation_map,
    explicit_module,
    identity_map,
    induce,
    invariants,
    module_isomorphism_report,
    pontryagin_dual,
    regular_module,
    restrict_along,
    tensor_product,
    trivial_module,
)
from profinity.groups import (
    Homomorphism,
    cyclic,
    product,
    quotient_by,
    subgroup_closure,
    symmetric,
    transversal,
)


def sign_module(m):
    """Z/m with the generator of cyclic(2) acting by -1."""
    return explicit_module(cyclic(2), [m], {1: [[m - 1]]})


def brute_invariant_vectors(mod):
    """All module elements fixed by every generator, by enumeration."""
    gens = mod.group.generators
    return [
        v
        for v in mod.elements()
        if all(mod.apply(g, v) == v for g in gens)
    ]


def brute_coinvariant_count_profile(mod, ks):
    """Order-dividing counts of M / <g a - a> by plain enumeration."""
    elems = mod.elements()
    index = {v: i for i, v in enumerate(elems)}
    moduli = mod.moduli
    k = len(moduli)

    def add(u, v):
        return tuple((a + b) % m for a, b, m in zip(u, v, moduli))

    gens_of_d = []
    for x in range(mod.group.order):
        for v in elems:
            gv = mod.apply(x, v)
            d = tuple((a - b) % m for a, b, m in zip(gv, v, moduli))
            if any(d):
                gens_of_d.append(d)
    zero = tuple(0 for _ in range(k))
    dsub = {zero}
    frontier = [zero]
    while frontier:
        u = frontier.pop()
        for g in gens_of_d:
            w = add(u, g)
            if w not in dsub:
                dsub.add(w)
                frontier.append(w)
    quotient_order = len(elems) // len(dsub)

    def scale(v, c):
        return tuple((a * c) % m for a, m in zip(v, moduli))

    counts = []
    for kk in ks:
        c = sum(1 for v in elems if scale(v, kk) in dsub) // len(dsub)
        counts.append(c)
    return quotient_order, counts


def counts_from_factors(factors, ks):
    out = []
    for k in ks:
        c = 1
        for d in factors:
            c *= gcd(d, k)
        out.append(c)
    return out


# --------------------------------------------------------------------------
# Construction and validation
# --------------------------------------------------------------------------


def test_trivial_module_over_symmetric_three():
    m = trivial_module(symmetric(3), [5])
    assert m.has_trivial_action()
    assert m.order() == 5
    assert m.underlying().factors == (5,)


def test_regular_module_is_the_permutation_action():
    m = regular_module(cyclic(3), 2)
    assert m.moduli == (2, 2, 2)
    g = m.act[1]
    # basis vector j goes to basis vector 1 + j
    for j in range(3):
        col = tuple(g[i][j] for i in range(3))
        assert col == tuple(1 if i == (j + 1) % 3 else 0 for i in range(3))


def test_sign_action_is_accepted_and_has_order_two():
    m = sign_module(7)
    assert m.act[1] == ((6,),)
    assert m.act[0] == ((1,),)


def test_relation_violating_action_is_rejected_with_witness():
    # x2 on Z/5 has order 4, not 2, so it cannot define a cyclic(2) action
    with pytest.raises(ValueError, match="relation"):
        explicit_module(cyclic(2), [5], {1: [[2]]})
    # the zero matrix is not invertible; the same check catches it
    with pytest.raises(ValueError, match="relation"):
        explicit_module(cyclic(2), [5], {1: [[0]]})


def test_explicit_module_requires_generator_cover():
    g = product(cyclic(2), cyclic(2))
    with pytest.raises(ValueError, match="missing"):
        explicit_module(g, [3], {g.generators[0]: [[2]]})


def test_build_module_kinds():
    g = cyclic(2)
    assert build_module(g, {"kind": "trivial", "factors": [4]}).order() == 4
    assert build_module(g, {"kind": "regular", "m": 3}).order() == 9
    m = build_module(
        g, {"kind": "explicit", "moduli": [7], "action": {"1": [[6]]}}
    )
    assert m.act[1] == ((6,),)
    with pytest.raises(ValueError, match="kind"):
        build_module(g, {"kind": "mystery"})


def test_matrix_must_respect_coordinate_orders():
    g = cyclic(2)
    # sending a Z/2 coordinate into Z/4 with an odd entry is not a map
    with pytest.raises(ValueError, match="orders"):
        explicit_module(g, [2, 4], {1: [[1, 0], [1, 1]]})


# --------------------------------------------------------------------------
# Pontryagin duality
# --------------------------------------------------------------------------


def test_dual_of_trivial_cyclic_module_matches_character_count():
    m = trivial_module(symmetric(3), [6])
    d = pontryagin_dual(m)
    # character enumeration: six homs Z/6 -> Q/Z, trivial action
    assert d.order() == 6
    assert d.underlying().factors == (6,)
    assert d.has_trivial_action()


def test_dual_of_sign_module_is_the_sign_module():
    m = sign_module(7)
    d = pontryagin_dual(m)
    assert d.act == m.act


def test_double_dual_evaluation_is_an_isomorphism():
    pool = [
        trivial_module(cyclic(4), [2, 4]),
        sign_module(7),
        sign_module(9),
        regular_module(cyclic(3), 2),
        regular_module(symmetric(3), 2),
        induce(
            transversal(cyclic(4), [0, 2]),
            trivial_module(cyclic(2), [2]),
        ),
    ]
    for m in pool:
        double = pontryagin_dual(pontryagin_dual(m))
        assert double.act == m.act
        assert double.moduli == m.moduli
        ev = evaluation_map(m)  # equivariance is verified on construction
        assert ev.matrix == identity_map(m).matrix


def test_dual_map_reverses_and_squares_to_original():
    m = regular_module(cyclic(2), 4)
    n = trivial_module(cyclic(2), [4])
    # augmentation: sum of coordinates
    f = ModuleMap(m, n, [[1, 1]])
    fd = dual_map(f)
    assert fd.source.moduli == n.moduli
    assert fd.target.moduli == m.moduli
    fdd = dual_map(fd)
    assert fdd.matrix == f.matrix


# --------------------------------------------------------------------------
# Invariants and coinvariants against enumeration oracles
# --------------------------------------------------------------------------


def test_invariants_of_trivial_module_is_everything():
    m = trivial_module(symmetric(3), [2, 6])
    group, inc = invariants(m)
    assert group.factors == (2, 6)
    assert len(brute_invariant_vectors(m)) == 12


def test_invariants_of_sign_module_is_trivial():
    m = sign_module(7)
    group, inc = invariants(m)
    assert group.is_trivial()
    assert brute_invariant_vectors(m) == [(0,)]


def test_invariants_of_regular_module_is_the_diagonal():
    m = regular_module(cyclic(3), 2)
    group, inc = invariants(m)
    assert group.factors == (2,)
    fixed = brute_invariant_vectors(m)
    assert sorted(fixed) == [(0, 0, 0), (1, 1, 1)]
    # the inclusion lands on an actual fixed vector generating the line
    img = inc((1,))
    assert img in fixed and img != (0, 0, 0)


def test_invariants_match_enumeration_on_a_pool():
    pool = [
        sign_module(9),
        regular_module(cyclic(4), 2),
        regular_module(symmetric(3), 2),
        tensor_product(sign_module(4), sign_module(8)),
    ]
    for m in pool:
        group, inc = invariants(m)
        fixed = brute_invariant_vectors(m)
        total = 1
        for f in group.factors:
            total *= f
        assert total == len(fixed)
        for t in range(group.gen_count()):
            coords = tuple(1 if s == t else 0 for s in range(group.gen_count()))
            assert inc(coords) in fixed


def test_coinvariants_of_trivial_module_is_everything():
    m = trivial_module(symmetric(3), [2, 6])
    group, proj = coinvariants(m)
    assert group.factors == (2, 6)


def test_coinvariants_of_sign_module_is_trivial():
    m = sign_module(7)
    group, proj = coinvariants(m)
    assert group.is_trivial()
    qorder, _ = brute_coinvariant_count_profile(m, [1])
    assert qorder == 1


def test_coinvariants_of_regular_module():
    m = regular_module(cyclic(3), 2)
    group, proj = coinvariants(m)
    assert group.factors == (2,)
    qorder, counts = brute_coinvariant_count_profile(m, [1, 2])
    assert qorder == 2 and counts == [1, 2]
    # the projection is onto and kills differences of basis vectors
    assert proj((1, 0, 0)) == proj((0, 1, 0)) == proj((0, 0, 1))
    assert proj((1, 0, 0)) != (0,) * group.gen_count() or group.is_trivial()


def test_coinvariants_match_enumeration_on_a_pool():
    pool = [
        sign_module(9),
        regular_module(cyclic(4), 2),
        regular_module(symmetric(3), 2),
        tensor_product(sign_module(4), sign_module(8)),
    ]
    for m in pool:
        group, proj = coinvariants(m)
        ks = sorted({1, 2, 3, 4, 6, 12})
        qorder, counts = brute_coinvariant_count_profile(m, ks)
        total = 1
        for f in group.factors:
            total *= f
        assert total == qorder
        assert counts == counts_from_factors(group.factors, ks)


def test_duality_swaps_invariants_and_coinvariants():
    pool = [
        sign_module(9),
        regular_module(cyclic(3), 2),
        regular_module(symmetric(3), 2),
        induce(
            transversal(cyclic(4), [0, 2]),
            sign_module(4),
        ),
    ]
    for m in pool:
        co, _ = coinvariants(m)
        inv_dual, _ = invariants(pontryagin_dual(m))
        assert co.factors == inv_dual.factors
        inv, _ = invariants(m)
        co_dual, _ = coinvariants(pontryagin_dual(m))
        assert inv.factors == co_dual.factors


# --------------------------------------------------------------------------
# Induction, coinduction, restriction
# --------------------------------------------------------------------------


def test_induce_from_whole_group_is_the_module_itself():
    g = symmetric(3)
    m = regular_module(g, 2)
    sub = transversal(g, range(g.order))
    ind = induce(sub, m)
    assert ind.moduli == m.moduli
    assert ind.act == m.act


def test_induce_trivial_from_identity_subgroup_is_regular():
    g = cyclic(2)
    sub = transversal(g, [0])
    a = trivial_module(cyclic(1), [3])
    ind = induce(sub, a)
    reg = regular_module(g, 3)
    assert ind.moduli == reg.moduli
    assert ind.act == reg.act


def test_induce_trivial_from_index_two_subgroup_of_cyclic_four():
    g = cyclic(4)
    sub = transversal(g, [0, 2])
    a = trivial_module(cyclic(2), [2])
    ind = induce(sub, a)
    assert ind.moduli == (2, 2)
    # the generator swaps the two blocks
    assert ind.act[1] == ((0, 1), (1, 0))
    # the subgroup member 2 lands in H for both cosets, acting trivially
    assert ind.act[2] == ((1, 0), (0, 1))


def test_coinduce_agrees_with_induce():
    cases = []
    g4 = cyclic(4)
    cases.append((transversal(g4, [0, 2]), trivial_module(cyclic(2), [2])))
    cases.append((transversal(g4, [0, 2]), sign_module(5)))
    s3 = symmetric(3)
    three_cycle = next(x for x in range(6) if s3.element_order(x) == 3)
    a3 = subgroup_closure(s3, [three_cycle])
    sub3 = transversal(s3, a3)
    cases.append((sub3, trivial_module(cyclic(3), [2])))
    g6 = cyclic(6)
    cases.append((transversal(g6, [0, 3]), sign_module(4)))
    for sub, a in cases:
        ind = induce(sub, a)
        coind = coinduce(sub, a)
        assert ind.moduli == coind.moduli
        assert ind.act == coind.act
        report = module_isomorphism_report(ind, coind)
        assert report["isomorphic"] is True


def test_coinduce_trivial_from_identity_subgroup_is_regular():
    g = cyclic(2)
    sub = transversal(g, [0])
    a = trivial_module(cyclic(1), [3])
    co = coinduce(sub, a)
    reg = regular_module(g, 3)
    assert co.act == reg.act


def test_induced_module_size_is_index_times_base():
    s3 = symmetric(3)
    swap = next(x for x in range(6) if s3.element_order(x) == 2)
    h = subgroup_closure(s3, [swap])
    sub = transversal(s3, h)
    a = sign_module(4)
    ind = induce(sub, a)
    assert ind.order() == a.order() ** 0 * 4 ** sub.index
    assert len(ind.moduli) == sub.index * len(a.moduli)


def test_restrict_along_identity_and_trivial_maps():
    g = cyclic(4)
    m = regular_module(g, 2)
    rho = Homomorphism(g, g, range(4))
    assert restrict_along(rho, m).act == m.act
    h = symmetric(3)
    to_trivial = Homomorphism(h, cyclic(1), [0] * 6)
    m1 = trivial_module(cyclic(1), [5])
    res = restrict_along(to_trivial, m1)
    assert res.group.order == 6 and res.has_trivial_action()


def test_restrict_regular_module_along_projection():
    g4, g2 = cyclic(4), cyclic(2)
    q, proj = quotient_by(g4, transversal(g4, [0, 2]))
    # q is cyclic of order 2 on coset labels; rebuild the regular module
    # over q itself
    m = regular_module(q, 2)
    res = restrict_along(proj, m)
    assert res.group.order == 4
    assert res.moduli == (2, 2)
    # the generator of cyclic(4) maps to the swap
    assert res.act[1] == ((0, 1), (1, 0))
    assert res.act[2] == ((1, 0), (0, 1))


# --------------------------------------------------------------------------
# Tensor products
# --------------------------------------------------------------------------


def test_tensor_of_cyclic_groups_is_the_gcd():
    a = trivial_module(cyclic(2), [4])
    b = trivial_module(cyclic(2), [6])
    t = tensor_product(a, b)
    # bilinear-map count: exactly gcd(4, 6) = 2 forms
    assert t.order() == 2
    assert t.underlying().factors == (2,)


def test_tensor_with_large_cyclic_preserves_module():
    m = trivial_module(cyclic(2), [2, 4])
    t = tensor_product(m, trivial_module(cyclic(2), [4]))
    assert t.underlying().factors == (2, 4)


def test_tensor_of_coprime_orders_vanishes():
    t = tensor_product(
        trivial_module(cyclic(3), [2]), trivial_module(cyclic(3), [3])
    )
    assert t.order() == 1
    assert t.moduli == ()


def test_tensor_of_sign_modules_is_trivial_action():
    t = tensor_product(sign_module(8), sign_module(8))
    assert t.moduli == (8,)
    assert t.has_trivial_action()


def test_tensor_hom_duality_at_group_level():
    pairs = [
        (sign_module(4), sign_module(8)),
        (regular_module(cyclic(3), 2), trivial_module(cyclic(3), [4])),
        (trivial_module(cyclic(2), [2, 4]), sign_module(6)),
    ]
    for m, n in pairs:
        t = tensor_product(m, n)
        lhs = t.underlying()  # finite, self-dual as abelian group
        rhs = n.underlying().hom(pontryagin_dual(m).underlying())
        assert lhs.factors == rhs.factors


# --------------------------------------------------------------------------
# Isomorphism reports
# --------------------------------------------------------------------------


def test_iso_report_identical_modules():
    m = regular_module(cyclic(3), 2)
    report = module_isomorphism_report(m, regular_module(cyclic(3), 2))
    assert report["isomorphic"] is True
    assert report["method"] == "exhaustive"


def test_iso_report_distinguishes_twists():
    g = cyclic(4)
    m2 = explicit_module(g, [5], {1: [[2]]})
    m3 = explicit_module(g, [5], {1: [[3]]})
    report = module_isomorphism_report(m2, m3)
    assert report["isomorphic"] is False
    assert report["method"] == "exhaustive"


def test_iso_report_finds_a_coordinate_permutation():
    g = cyclic(2)
    a = explicit_module(g, [2, 4], {1: [[1, 0], [0, 3]]})
    b = explicit_module(g, [4, 2], {1: [[3, 0], [0, 1]]})
    report = module_isomorphism_report(a, b)
    assert report["isomorphic"] is True
    assert report["method"] == "exhaustive"


def test_iso_report_battery_is_a_flagged_semi_decision():
    # order 128 > search cap, and the two presentations differ only by
    # which pair of coordinates the generator swaps, so every battery
    # invariant agrees but no identical-presentation shortcut applies
    g = cyclic(2)

    def swap_mat(i, j, k):
        rows = []
        for r in range(k):
            row = [0] * k
            c = j if r == i else i if r == j else r
            row[c] = 1
            rows.append(row)
        return rows

    a = explicit_module(g, [2] * 7, {1: swap_mat(0, 1, 7)})
    b = explicit_module(g, [2] * 7, {1: swap_mat(2, 3, 7)})
    report = module_isomorphism_report(a, b)
    assert report["isomorphic"] is None
    assert report["method"] == "invariant-battery"
    assert "semi-decision" in report["detail"]


def test_iso_report_brittle_on_different_underlying_groups():
    g = cyclic(2)
    report = module_isomorphism_report(
        trivial_module(g, [4]), trivial_module(g, [2, 2])
    )
    assert report["isomorphic"] is False
