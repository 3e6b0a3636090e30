import itertools

import pytest
from hypothesis import given, settings, strategies as st

from graphfk.abelian import (Cone, GroupHom, HomSpace, Square, Tri, cokernel, compose,
                             cone_maps_into, free_group, hom_candidates, homs_equal,
                             inverse, is_isomorphism, is_surjective, zero_group)
from graphfk.intmat import IntMatrix

from oracles import brute_force_homs, invariant_factors


def cyc(*ds):
    return cokernel(IntMatrix.diagonal(list(ds)))


def test_cokernel_examples():
    assert cyc(2).canonical_form == (0, (2,))
    assert cokernel(IntMatrix.zeros(3, 0)).canonical_form == (3, ())
    assert cokernel(IntMatrix([[1], [2]])).canonical_form == (1, ())
    assert zero_group().is_trivial()
    assert cokernel(IntMatrix([[2, 0], [0, 3]])).describe() == "Z/6"


def presentations():
    return st.tuples(st.integers(0, 4), st.integers(0, 4)).flatmap(
        lambda mn: st.lists(st.lists(st.integers(-6, 6), min_size=mn[1], max_size=mn[1]),
                            min_size=mn[0], max_size=mn[0]).map(
            lambda r: IntMatrix(r, mn[0], mn[1])))


@given(presentations())
def test_canonical_form_matches_independent_snf(A):
    G = cokernel(A)
    assert G.canonical_form == invariant_factors(A.tolist(), A.rows)
    for c in A.columns():
        assert G.is_zero(c)


@given(presentations(), st.data())
def test_canonical_form_invariant_under_unimodular_change(A, data):
    n = A.rows
    P = IntMatrix.identity(n)
    for _ in range(3):
        if n < 2:
            break
        i, j = data.draw(st.permutations(range(n)))[:2]
        k = data.draw(st.integers(-3, 3))
        E = [[int(r == c) for c in range(n)] for r in range(n)]
        E[i][j] = k
        P = IntMatrix(E, n, n) @ P
    assert cokernel(P @ A).canonical_form == cokernel(A).canonical_form


def test_compose_examples():
    G = cokernel(IntMatrix([[1], [2]]))          # Z generated by two classes
    inc = GroupHom(free_group(1), G, IntMatrix([[1], [0]]))
    ident = GroupHom.identity(G)
    assert homs_equal(compose(ident, inc), inc)
    z = GroupHom.zero(G, cyc(2))
    assert homs_equal(compose(z, inc), GroupHom.zero(free_group(1), cyc(2)))
    proj = GroupHom(G, cyc(2), IntMatrix([[0, 1]]))
    direct = GroupHom(free_group(1), cyc(2), IntMatrix([[0]]))
    assert homs_equal(compose(proj, inc), direct)
    with pytest.raises(ValueError):
        compose(inc, proj)


def test_homs_equal_examples():
    Z2, Z = cyc(2), free_group(1)
    one = GroupHom(Z, Z2, IntMatrix([[1]]))
    assert homs_equal(one, one)
    assert homs_equal(one, GroupHom(Z, Z2, IntMatrix([[3]])))
    assert not homs_equal(GroupHom(Z, Z, IntMatrix([[1]])), GroupHom(Z, Z, IntMatrix([[2]])))


def test_is_isomorphism_examples():
    G = cokernel(IntMatrix([[0], [2]]))
    assert is_isomorphism(GroupHom.identity(G))
    assert not is_isomorphism(GroupHom(cyc(3), cyc(3), IntMatrix([[3]])))
    with pytest.raises(ValueError):
        GroupHom(cyc(2), cyc(4), IntMatrix([[1]]))     # not well defined
    assert not is_surjective(GroupHom(cyc(2), cyc(4), IntMatrix([[2]])))
    assert not is_isomorphism(GroupHom(cyc(2), cyc(4), IntMatrix([[2]])))


def test_hom_candidates_examples():
    assert len(hom_candidates(cyc(2), cyc(2)).homs) == 2
    c = hom_candidates(free_group(1), free_group(1), bound=1)
    assert len(c.homs) == 3 and not c.complete
    c = hom_candidates(free_group(1), cyc(2), bound=5)
    assert len(c.homs) == 2 and c.complete


finite_groups = st.lists(st.integers(1, 6), min_size=1, max_size=2).map(lambda ds: cyc(*ds))


@given(finite_groups, finite_groups)
def test_hom_candidates_match_brute_force(S, T):
    c = hom_candidates(S, T)
    assert c.complete
    got = {tuple(T.canonical(h(e)) for e in IntMatrix.identity(S.ngens).columns())
           for h in c.homs}
    assert len(got) == len(c.homs), "candidates must be pairwise different"
    want = brute_force_homs(S.presentation.tolist(), S.ngens, T)
    assert got == want


@settings(max_examples=25)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=2).map(lambda ds: cyc(*ds)))
def test_isomorphisms_have_inverses(G):
    homs = hom_candidates(G, G).homs
    ident = GroupHom.identity(G)
    for h in homs:
        if is_isomorphism(h):
            inv = [g for g in homs if homs_equal(compose(g, h), ident)]
            assert inv and homs_equal(compose(h, inv[0]), ident)
            assert homs_equal(inverse(h), inv[0])


def test_square_constraints():
    # homs h: Z/4 -> Z/4 with h . (2: Z/2 -> Z/4) = (2: Z/2 -> Z/4)
    Z2, Z4 = cyc(2), cyc(4)
    two = GroupHom(Z2, Z4, IntMatrix([[2]]))
    c = hom_candidates(Z4, Z4, [(two, None, two)])
    vals = sorted(h.canonical_matrix[0, 0] for h in c.homs)
    assert vals == [1, 3]
    # impossible square: h . 0 = nonzero
    bad = HomSpace(Z4, Z4, [Square(GroupHom.zero(Z2, Z4), None, two)])
    assert bad.empty and bad.enumerate(4).homs == []


def test_iso_only_free_rank_one_is_exhaustive():
    G = cokernel(IntMatrix([[2], [0]]))       # Z/2 + Z
    c = HomSpace(G, G).enumerate(bound=1, iso_only=True)
    assert c.complete
    assert len(c.homs) == 4                     # +-1 on Z, and Z -> Z/2 either way


def test_cone_examples():
    Z = free_group(1)
    N = Cone(Z, [(1,)])
    assert cone_maps_into(GroupHom.identity(Z), N, N) is Tri.YES
    assert cone_maps_into(GroupHom(Z, Z, IntMatrix([[-1]])), N, N) is Tri.NO
    G = cokernel(IntMatrix([[1], [2]]))
    full = Cone(G, [(1, 0), (0, 1)])
    assert full.is_full
    auto = GroupHom(G, G, IntMatrix([[-1, 0], [0, -1]]))
    assert cone_maps_into(auto, full, full) is Tri.YES


def test_cone_membership_mixed():
    G = cokernel(IntMatrix([[2], [0]]))        # Z/2 + Z
    C = Cone(G, [(1, 0), (0, 1)])
    assert not C.is_full
    assert C.contains((1, 3)) is Tri.YES
    assert C.contains((0, -1)) is Tri.NO
    assert C.contains((1, 0)) is Tri.YES
    two = Cone(free_group(2), [(1, 0), (1, 2)])
    assert two.contains((1, 1)) is Tri.NO       # rationally inside, not integrally
    assert two.contains((3, 4)) is Tri.YES


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=3))
def test_cone_identity_and_composition(gens):
    Z2 = free_group(2)
    C = Cone(Z2, gens)
    ident = GroupHom.identity(Z2)
    assert cone_maps_into(ident, C, C) is Tri.YES
    assert cone_maps_into(compose(ident, ident), C, C) is Tri.YES


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=3),
       st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
def test_cone_contains_against_brute_force(gens, t):
    C = Cone(free_group(2), gens)
    r = C.contains(t, bound=6)
    found = any(tuple(sum(c * g[i] for c, g in zip(cs, gens)) for i in range(2)) == t
                for cs in itertools.product(range(13), repeat=len(gens)))
    if r is Tri.YES:
        assert found
    elif r is Tri.NO:
        assert not found


@given(st.integers(1, 3), st.integers(1, 4), st.data())
def test_exact_lp_feasible_and_farkas(m, n, data):
    from graphfk.abelian import _lp
    A = [data.draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n)) for _ in range(m)]
    x0 = data.draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    b = [sum(a * x for a, x in zip(row, x0)) for row in A]
    c = data.draw(st.lists(st.integers(-2, 2), min_size=n, max_size=n))
    status, val = _lp(c, A, b)
    assert status in ("ok", "unbounded")
    if status == "ok":
        assert val <= sum(ci * xi for ci, xi in zip(c, x0))
    # a Farkas certificate y (y.A >= 0, y.b < 0) proves infeasibility
    y = data.draw(st.lists(st.integers(-2, 2), min_size=m, max_size=m))
    yA = [sum(y[i] * A[i][j] for i in range(m)) for j in range(n)]
    if all(v >= 0 for v in yA):
        b2 = [bi - y[i] * (1 + sum(abs(v) for v in y)) for i, bi in enumerate(b)]
        if sum(yi * bi for yi, bi in zip(y, b2)) < 0:
            assert _lp(c, A, b2)[0] == "infeasible"
