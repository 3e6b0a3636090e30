"""Finite directed graphs, their gauge-invariant ideal lattices and the
combinatorial tests that decide which classification theorem applies.

Vertices are 0-based internally; reports print them 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from .intmat import IntMatrix


class Graph:
    """A finite graph; ``adj[i][j]`` counts the edges from i to j."""

    def __init__(self, adjacency: Sequence[Sequence[int]], name: Optional[str] = None,
                 labels: Optional[Sequence[int]] = None):
        rows = [list(r) for r in adjacency]
        n = len(rows)
        for r in rows:
            if len(r) != n:
                raise ValueError("adjacency matrix must be square")
            if any((not isinstance(x, int)) or x < 0 for x in r):
                raise ValueError("adjacency entries must be non-negative integers")
        self.n = n
        self.adj = IntMatrix(rows, n, n)
        self.name = name
        # original vertex numbers when this graph is a subquotient
        self.labels = tuple(labels) if labels is not None else tuple(range(n))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, adj={self.adj.tolist()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.adj == other.adj

    def __hash__(self) -> int:
        return hash(self.adj)

    def out_degree(self, v: int) -> int:
        return sum(self.adj.row(v))

    @cached_property
    def regular(self) -> tuple:
        return tuple(v for v in range(self.n) if self.out_degree(v) > 0)

    @cached_property
    def successors(self) -> tuple:
        return tuple(tuple(j for j in range(self.n) if self.adj[i, j]) for i in range(self.n))

    def induced(self, vertices: Sequence[int]) -> "Graph":
        vs = sorted(vertices)
        return Graph(self.adj.submatrix(vs, vs).tolist(), labels=[self.labels[v] for v in vs])

    def permuted(self, perm: Sequence[int]) -> "Graph":
        """Relabel vertex ``i`` as ``perm[i]``."""
        n = self.n
        out = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                out[perm[i]][perm[j]] = self.adj[i, j]
        return Graph(out, name=self.name)

    def has_cycle(self) -> bool:
        color = [0] * self.n
        for s in range(self.n):
            if color[s]:
                continue
            stack = [(s, iter(self.successors[s]))]
            color[s] = 1
            while stack:
                v, it = stack[-1]
                for w in it:
                    if color[w] == 1:
                        return True
                    if color[w] == 0:
                        color[w] = 1
                        stack.append((w, iter(self.successors[w])))
                        break
                else:
                    color[v] = 2
                    stack.pop()
        return False


# hereditary saturated sets

def hereditary_closure(E: Graph, S) -> frozenset:
    seen = set(S)
    todo = list(S)
    while todo:
        v = todo.pop()
        for w in E.successors[v]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return frozenset(seen)


def saturate(E: Graph, H) -> frozenset:
    H = set(H)
    changed = True
    while changed:
        changed = False
        for v in E.regular:
            if v not in H and all(w in H for w in E.successors[v]):
                H.add(v)
                changed = True
    return frozenset(H)


def closure(E: Graph, S) -> frozenset:
    """Smallest hereditary saturated set containing S."""
    return saturate(E, hereditary_closure(E, S))


def is_hereditary(E: Graph, H) -> bool:
    return all(w in H for v in H for w in E.successors[v])


def is_saturated(E: Graph, H) -> bool:
    return all(v in H for v in E.regular if all(w in H for w in E.successors[v]))


@dataclass(frozen=True)
class IdealLattice:
    """Hereditary saturated vertex sets ordered by inclusion."""
    subsets: tuple
    covers: tuple  # pairs (i, j): subsets[i] is covered by subsets[j]
    is_linear: bool
    chain: Optional[tuple]

    @property
    def length(self) -> int:
        """Number of non-trivial steps; the n of X_n for a chain."""
        return len(self.subsets) - 1 if self.is_linear else -1

    def join_irreducibles(self) -> list:
        """Elements with exactly one lower cover, i.e. the points of the space."""
        lower = {j: [] for j in range(len(self.subsets))}
        for i, j in self.covers:
            lower[j].append(i)
        return [(self.subsets[j], self.subsets[lower[j][0]])
                for j in range(len(self.subsets)) if len(lower[j]) == 1]

    def union_closed(self) -> bool:
        s = set(self.subsets)
        return all(a | b in s for a in self.subsets for b in self.subsets)


def hereditary_saturated_subsets(E: Graph) -> IdealLattice:
    """The full lattice of hereditary saturated subsets of E.

    Every such set is the join of the closures of its vertices, so the
    lattice is generated from the principal closures by repeated joins.
    """
    principal = {closure(E, [v]) for v in range(E.n)}
    found = {frozenset()} | principal
    frontier = list(found)
    while frontier:
        new = []
        for H in frontier:
            for P in principal:
                J = saturate(E, H | P)
                if J not in found:
                    found.add(J)
                    new.append(J)
        frontier = new
    subsets = tuple(sorted(found, key=lambda s: (len(s), sorted(s))))
    idx = {s: i for i, s in enumerate(subsets)}
    covers = []
    for a in subsets:
        for b in subsets:
            if a < b and not any(a < c < b for c in subsets):
                covers.append((idx[a], idx[b]))
    linear = all(a <= b or b <= a for a in subsets for b in subsets)
    return IdealLattice(subsets, tuple(sorted(covers)), linear,
                        subsets if linear else None)


# Condition (K)

def _return_path_count(E: Graph, v: int, cap: int = 2) -> int:
    """Number of first-return paths at v, capped at `cap`."""
    n = E.n
    # vertices other than v that can reach v without passing through v
    reach = {v}
    changed = True
    while changed:
        changed = False
        for u in range(n):
            if u not in reach and any(w in reach for w in E.successors[u]):
                reach.add(u)
                changed = True
    memo: dict = {}
    onstack: set = set()

    def paths(u):  # paths u -> v avoiding v in between, capped
        if u == v:
            return 1
        if u in memo:
            return memo[u]
        if u in onstack:  # a cycle off v feeding back to v: infinitely many
            return cap
        onstack.add(u)
        total = 0
        for w in E.successors[u]:
            if w in reach:
                total += E.adj[u, w] * paths(w)
                if total >= cap:
                    total = cap
                    break
        onstack.discard(u)
        memo[u] = total
        return total

    total = 0
    for w in E.successors[v]:
        if w in reach:
            total += E.adj[v, w] * paths(w)
            if total >= cap:
                return cap
    return total


def condition_K(E: Graph) -> bool:
    """Every vertex on a cycle has at least two distinct first-return paths."""
    for v in range(E.n):
        c = _return_path_count(E, v)
        if c == 1:
            return False
    return True


def on_cycle(E: Graph, v: int) -> bool:
    return _return_path_count(E, v, cap=1) >= 1


# subquotients and their types

def subquotient_graph(E: Graph, H_big, H_small) -> Graph:
    """Induced graph on ``H_big - H_small``."""
    H_big, H_small = frozenset(H_big), frozenset(H_small)
    if not H_small <= H_big:
        raise ValueError("vertex sets are not nested")
    for H in (H_big, H_small):
        if not (is_hereditary(E, H) and is_saturated(E, H)):
            raise ValueError(f"{sorted(v + 1 for v in H)} is not hereditary and saturated")
    return E.induced(sorted(H_big - H_small))


AF = "AF"
PURELY_INFINITE = "PurelyInfiniteSimpleLike"
MIXED = "Mixed"


def simple_blocks(E: Graph) -> list:
    """Vertex sets of the simple subquotients (one per join-irreducible)."""
    lat = hereditary_saturated_subsets(E)
    return [sorted(J - Jm) for J, Jm in lat.join_irreducibles()]


def subquotient_type(E: Graph) -> str:
    if not E.has_cycle():
        return AF
    if condition_K(E) and all(E.induced(b).has_cycle() for b in simple_blocks(E)):
        return PURELY_INFINITE
    return MIXED


def is_purely_infinite_throughout(E: Graph) -> bool:
    """True for the empty graph as well as for the purely infinite type."""
    return E.n == 0 or subquotient_type(E) == PURELY_INFINITE


def is_af(E: Graph) -> bool:
    return not E.has_cycle()


@dataclass(frozen=True)
class Membership:
    member: bool
    n: Optional[int] = None
    split: Optional[int] = None        # U = [split, n]; split = n + 1 means U empty
    orientation: Optional[str] = None  # AF-on-bottom, AF-on-top, AF, PI
    reason: Optional[str] = None
    types: tuple = ()                  # block type of point k, k = 1..n
    extension_split: Optional[dict] = field(default=None, compare=False)

    def describe(self) -> str:
        if not self.member:
            s = f"not in class C_n: {self.reason}"
            if self.extension_split:
                s += f" (extension-eligible: {self.extension_split['orientation']})"
            return s
        return (f"member of C_{self.n}: open set U = [{self.split},{self.n}], "
                f"orientation {self.orientation}")


def chain_blocks(chain: Sequence[frozenset]) -> dict:
    """Point k of X_n -> its vertex block, for a chain H_0 < ... < H_n.

    The ideal A[k, n] corresponds to H_{n-k+1}, so point n is the least
    non-zero ideal.
    """
    n = len(chain) - 1
    return {k: chain[n - k + 1] - chain[n - k] for k in range(1, n + 1)}


def extension_split(E: Graph, lattice: Optional[IdealLattice] = None) -> Optional[dict]:
    """An ideal comparable to every other, with AF on one side and purely
    infinite on the other; None when there is none.

    This is the setting of the extension classification used for the
    non-linear example; for chains it is the same as class C_n.
    """
    lat = lattice or hereditary_saturated_subsets(E)
    full = frozenset(range(E.n))
    for H in lat.subsets:
        if not H or H == full:
            continue
        if not all(H <= K or K <= H for K in lat.subsets):
            continue
        ideal, quot = E.induced(sorted(H)), E.induced(sorted(full - H))
        if is_af(ideal) and is_purely_infinite_throughout(quot):
            return {"ideal": tuple(sorted(H)), "orientation": "AF-on-bottom"}
        if is_purely_infinite_throughout(ideal) and is_af(quot):
            return {"ideal": tuple(sorted(H)), "orientation": "AF-on-top"}
    return None


def class_Cn_membership(E: Graph) -> Membership:
    """Decide whether C*(E) lies in the class C_n.

    Requires Condition (K), a linear lattice of length n, and an open set
    U = [k, n] with A(U) AF and the quotient purely infinite, or the other
    way around.  Orientation "AF-on-bottom" means the AF part is the ideal.
    """
    if E.n == 0:
        return Membership(False, reason="empty graph")
    if not condition_K(E):
        return Membership(False, reason="Condition (K) fails")
    lat = hereditary_saturated_subsets(E)
    if not lat.is_linear:
        return Membership(False, reason="ideal lattice is not linear",
                          extension_split=extension_split(E, lat))
    n = lat.length
    blocks = chain_blocks(lat.chain)
    types = tuple(AF if is_af(E.induced(sorted(blocks[k]))) else PURELY_INFINITE
                  for k in range(1, n + 1))
    full = frozenset(range(E.n))
    for k in range(1, n + 2):
        U = frozenset().union(*(blocks[j] for j in range(k, n + 1)))
        ideal, quot = E.induced(sorted(U)), E.induced(sorted(full - U))
        if is_af(ideal) and is_purely_infinite_throughout(quot):
            orient = "PI" if not U else ("AF" if U == full else "AF-on-bottom")
            return Membership(True, n, k, orient, types=types)
        if is_purely_infinite_throughout(ideal) and is_af(quot):
            orient = "AF" if not U else ("PI" if U == full else "AF-on-top")
            return Membership(True, n, k, orient, types=types)
    return Membership(False, n=n, reason="more than one AF/infinite transition", types=types)
