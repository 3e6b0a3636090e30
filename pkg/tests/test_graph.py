import itertools
import random

import pytest
from hypothesis import given, strategies as st

from graphfk.classify import case1_graph, case2_graph, intro_graph
from graphfk.graph import (AF, MIXED, PURELY_INFINITE, Graph, class_Cn_membership,
                           closure, condition_K, extension_split,
                           hereditary_saturated_subsets, is_hereditary, is_saturated,
                           saturate, subquotient_graph, subquotient_type)

from conftest import SEED
from oracles import return_paths_brute, sample_graph


def graphs(max_n=5, max_entry=3):
    return st.integers(1, max_n).flatmap(lambda n: st.lists(
        st.lists(st.sampled_from([0, 0, 0] + list(range(1, max_entry + 1))),
                 min_size=n, max_size=n), min_size=n, max_size=n).map(Graph))


def test_graph_rejects_bad_input():
    with pytest.raises(ValueError):
        Graph([[0, 1]])
    with pytest.raises(ValueError):
        Graph([[-1]])


def test_lattice_case1_is_a_chain():
    lat = hereditary_saturated_subsets(case1_graph(2, 1, 1, 1))
    assert lat.is_linear
    assert [sorted(s) for s in lat.chain] == [[], [0], [0, 1], [0, 1, 2]]


def test_lattice_single_vertex():
    lat = hereditary_saturated_subsets(Graph([[0]]))
    assert lat.subsets == (frozenset(), frozenset({0}))


def test_lattice_case2_shape():
    lat = hereditary_saturated_subsets(case2_graph(2, 1, 1, 1))
    assert not lat.is_linear
    nonzero = [s for s in lat.subsets if s]
    assert min(nonzero, key=len) == {0} and all({0} <= s for s in nonzero)
    mids = [s for s in nonzero if len(s) == 2]
    assert len(mids) == 3
    assert all(not (a <= b) for a, b in itertools.permutations(mids, 2))


@given(graphs())
def test_lattice_axioms(E):
    lat = hereditary_saturated_subsets(E)
    S = set(lat.subsets)
    assert frozenset() in S and frozenset(range(E.n)) in S
    for H in S:
        assert is_hereditary(E, H) and is_saturated(E, H)
    for a, b in itertools.product(S, repeat=2):
        assert a & b in S
        assert saturate(E, a | b) in S
    # exhaustive over all vertex subsets for small graphs
    if E.n <= 5:
        every = {frozenset(c) for r in range(E.n + 1)
                 for c in itertools.combinations(range(E.n), r)
                 if is_hereditary(E, c) and is_saturated(E, c)}
        assert every == S
    assert lat.is_linear == all(a <= b or b <= a for a in S for b in S)


def test_condition_K_examples():
    assert not condition_K(Graph([[1]]))
    assert condition_K(Graph([[2]]))
    assert condition_K(Graph([[0]]))
    assert not condition_K(Graph([[0, 1], [1, 0]]))
    assert condition_K(Graph([[1, 1], [1, 0]]))
    assert condition_K(intro_graph(1))


@given(graphs(max_n=4, max_entry=2))
def test_return_path_count_against_enumeration(E):
    from graphfk.graph import _return_path_count
    for v in range(E.n):
        assert _return_path_count(E, v) == return_paths_brute(E, v, max_len=2 * E.n + 2)


@given(graphs(), st.randoms(use_true_random=False))
def test_condition_K_relabel_invariant(E, rnd):
    perm = list(range(E.n))
    rnd.shuffle(perm)
    assert condition_K(E.permuted(perm)) == condition_K(E)


def test_subquotient_examples():
    E = case1_graph(2, 1, 1, 1)
    full = frozenset(range(3))
    assert subquotient_graph(E, full, frozenset()) == E
    Q = subquotient_graph(E, {0, 1}, {0})
    assert Q.adj.tolist() == [[3]]
    assert subquotient_graph(E, {0}, set()).adj.tolist() == [[0]]
    assert subquotient_graph(E, {0}, {0}).n == 0
    with pytest.raises(ValueError):
        subquotient_graph(E, {0}, {0, 1})
    with pytest.raises(ValueError):
        subquotient_graph(E, {1}, set())


@given(graphs())
def test_subquotient_transitive(E):
    lat = hereditary_saturated_subsets(E)
    for a, b, c in itertools.product(lat.subsets, repeat=3):
        if a <= b <= c:
            direct = subquotient_graph(E, c, a)
            mid = subquotient_graph(E, c, a)
            # the labels of the inner graph record the original vertices
            inner = direct.induced([direct.labels.index(v) for v in sorted(c - b)]) \
                if c - b else Graph([])
            assert inner.adj == subquotient_graph(E, c, b).adj
            assert mid.labels == tuple(sorted(c - a))


def test_types():
    assert subquotient_type(Graph([[0]])) == AF
    assert subquotient_type(Graph([[3]])) == PURELY_INFINITE
    assert subquotient_type(Graph([[0, 0], [1, 2]])) == MIXED
    assert subquotient_type(Graph([[2, 1], [0, 0]])) == MIXED


def test_membership_examples():
    m = class_Cn_membership(intro_graph(1))
    assert m.member and m.n == 3 and m.split == 3 and m.orientation == "AF-on-bottom"
    assert m.types == (PURELY_INFINITE, PURELY_INFINITE, AF)
    m = class_Cn_membership(Graph([[1]]))
    assert not m.member and "Condition (K)" in m.reason
    m = class_Cn_membership(case2_graph(2, 1, 1, 1))
    assert not m.member and "not linear" in m.reason
    assert m.extension_split == {"ideal": (0,), "orientation": "AF-on-bottom"}
    # a vertex feeding only an infinite ideal is swallowed by saturation
    m = class_Cn_membership(Graph([[2, 0], [1, 0]]))
    assert m.member and m.n == 1 and m.orientation == "PI"
    assert class_Cn_membership(Graph([[0]])).orientation == "AF"
    assert class_Cn_membership(Graph([[2]])).orientation == "PI"


def test_membership_chain_with_tail():
    E = Graph([[0, 0, 0], [1, 2, 0], [0, 1, 0]])
    m = class_Cn_membership(E)
    assert m.member and m.n == 2 and m.types == (PURELY_INFINITE, AF)


def test_extension_split_needs_a_comparable_ideal():
    assert extension_split(Graph([[0, 0], [0, 0]])) is None


def test_membership_has_one_transition():
    rng = random.Random(SEED)
    seen = 0
    for _ in range(400):
        E = sample_graph(rng, max_n=5)
        m = class_Cn_membership(E)
        if not m.member:
            continue
        seen += 1
        t = m.types
        for x in t:
            assert x in (AF, PURELY_INFINITE)
        assert sum(a != b for a, b in zip(t, t[1:])) <= 1
    assert seen > 20


def test_closure_is_smallest():
    E = case2_graph(2, 1, 1, 1)
    assert closure(E, [1]) == {0, 1}
    assert closure(E, [0]) == {0}
