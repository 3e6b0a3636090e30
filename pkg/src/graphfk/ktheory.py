"""Filtered, ordered K-theory of graph algebras over finite spaces.

For a vertex set S of a subquotient the K-groups come from the matrix
``B = (adj^T - I)`` restricted to rows S and to the columns of the regular
vertices of S: ``K0 = coker B`` and ``K1 = ker B``.  Maps between pieces are
coordinate inclusions and projections; the boundary ``K1(quotient) ->
K0(ideal)`` is the off-diagonal block of B, the exponential map is zero, and
every six-term sequence is checked for exactness when it is built.

The underlying space is read off the ideal lattice: its points are the
join-irreducible hereditary saturated sets, a point carries the block of
vertices it adds, and open sets are down-closed sets of points.  For a
chain of length n the points are labelled so that point n is the least
ideal, i.e. A[k, n] is the ideal of the k-th largest chain member.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .abelian import (Cone, FgAbGroup, GroupHom, cokernel, exactness_failure,
                      free_group)
from .graph import Graph, IdealLattice, hereditary_saturated_subsets
from .intmat import IntMatrix, kernel_basis, solve_columns


class ExactnessError(RuntimeError):
    def __init__(self, node: str, sequence, reason: str):
        super().__init__(f"six-term sequence {sequence} not exact at {node}: {reason}")
        self.node = node
        self.sequence = sequence
        self.reason = reason


class LatticeShapeError(ValueError):
    def __init__(self, message: str, lattice: IdealLattice):
        super().__init__(message)
        self.lattice = lattice


@dataclass(frozen=True)
class Space:
    """A finite T0 space presented by its points and specialisation order.

    ``below[p]`` is the set of points whose join-irreducible ideal lies
    strictly inside that of p.  Opens are the down-closed point sets.
    """
    points: tuple
    below: dict
    blocks: dict  # point -> tuple of graph vertices
    linear: bool

    @property
    def n(self) -> int:
        return len(self.points)

    def comparable(self, p, q) -> bool:
        return p == q or p in self.below[q] or q in self.below[p]

    def opens(self) -> list:
        out = []
        for r in range(len(self.points) + 1):
            for S in itertools.combinations(self.points, r):
                S = frozenset(S)
                if all(self.below[p] <= S for p in S):
                    out.append(S)
        return out

    def is_connected(self, Y) -> bool:
        Y = list(Y)
        if not Y:
            return False
        seen = {Y[0]}
        todo = [Y[0]]
        while todo:
            p = todo.pop()
            for q in Y:
                if q not in seen and self.comparable(p, q):
                    seen.add(q)
                    todo.append(q)
        return len(seen) == len(Y)

    def vertices(self, Y) -> tuple:
        return tuple(sorted(v for p in Y for v in self.blocks[p]))

    def isomorphisms(self, other: "Space"):
        """Order isomorphisms self -> other as dicts, identity-like first."""
        if self.n != other.n:
            return
        mine = sorted(self.points)
        for perm in itertools.permutations(sorted(other.points)):
            phi = dict(zip(mine, perm))
            if all(frozenset(phi[q] for q in self.below[p]) == other.below[phi[p]]
                   for p in mine):
                yield phi


def space_of(E: Graph, lattice: Optional[IdealLattice] = None) -> Space:
    lat = lattice or hereditary_saturated_subsets(E)
    if not lat.union_closed():
        raise LatticeShapeError("hereditary saturated sets are not closed under union",
                                lat)
    jis = lat.join_irreducibles()
    # bigger ideals get smaller labels; ties broken by block
    jis.sort(key=lambda jm: (-len(jm[0]), sorted(jm[0] - jm[1])))
    label = {J: k + 1 for k, (J, _) in enumerate(jis)}
    below = {label[J]: frozenset(label[K] for K, _ in jis if K < J) for J, _ in jis}
    blocks = {label[J]: tuple(sorted(J - Jm)) for J, Jm in jis}
    return Space(tuple(range(1, len(jis) + 1)), below, blocks, lat.is_linear)


@dataclass(frozen=True)
class Piece:
    """K-theory of the subquotient on one connected locally closed set."""
    key: frozenset
    vertices: tuple
    regular: tuple
    B: IntMatrix
    kernel: IntMatrix
    k0: FgAbGroup
    k1: FgAbGroup
    cone: Cone

    @property
    def label(self) -> str:
        return _label(self.key)


def _label(Y) -> str:
    pts = sorted(Y)
    if not pts:
        return "{}"
    if pts == list(range(pts[0], pts[-1] + 1)):
        return f"[{pts[0]},{pts[-1]}]" if len(pts) > 1 else f"{{{pts[0]}}}"
    return "{" + ",".join(map(str, pts)) + "}"


@dataclass(frozen=True)
class SixTerm:
    """Maps of the six-term sequence for ideal Y1 inside Y2 with quotient Y3."""
    ideal: frozenset
    middle: frozenset
    quotient: frozenset
    iota0: GroupHom
    pi0: GroupHom
    exp: GroupHom
    iota1: GroupHom
    pi1: GroupHom
    delta: GroupHom

    def maps(self) -> list:
        """(name, map, source key, degree, target key, degree)."""
        Y1, Y2, Y3 = self.ideal, self.middle, self.quotient
        return [("iota0", self.iota0, Y1, 0, Y2, 0),
                ("pi0", self.pi0, Y2, 0, Y3, 0),
                ("exp", self.exp, Y3, 0, Y1, 1),
                ("iota1", self.iota1, Y1, 1, Y2, 1),
                ("pi1", self.pi1, Y2, 1, Y3, 1),
                ("delta", self.delta, Y3, 1, Y1, 0)]


@dataclass
class FkDiagram:
    space: Space
    pieces: dict     # frozenset of points -> Piece
    sequences: dict  # (ideal, quotient) -> SixTerm
    graph: Optional[Graph] = None

    @property
    def n(self) -> int:
        return self.space.n

    def interval(self, a: int, b: int) -> Piece:
        return self.pieces[frozenset(range(a, b + 1))]

    def group(self, key, degree: int) -> FgAbGroup:
        p = self.pieces[key]
        return p.k0 if degree == 0 else p.k1

    def max_factor(self) -> int:
        return max([1] + [d for p in self.pieces.values() for G in (p.k0, p.k1)
                          for d in G.factors])

    def ordered_keys(self) -> list:
        """Pieces from the least ideal upward."""
        return sorted(self.pieces, key=lambda Y: (-min(Y), -max(Y), len(Y), sorted(Y)))


def _presentation(E: Graph, vertices: tuple):
    """The matrix adj^T - I on rows `vertices`, columns = regular ones among them."""
    regular = tuple(v for v in vertices if E.out_degree(v) > 0)
    rows = [[E.adj[c, r] - (r == c) for c in regular] for r in vertices]
    return regular, IntMatrix(rows, len(vertices), len(regular))


def _piece(E: Graph, key: frozenset, vertices: tuple) -> Piece:
    regular, B = _presentation(E, vertices)
    K = kernel_basis(B)
    k0 = cokernel(B)
    k1 = free_group(K.cols)
    gens = [tuple(int(i == j) for i in range(len(vertices))) for j in range(len(vertices))]
    return Piece(key, vertices, regular, B, K, k0, k1, Cone(k0, gens))


def _coordinate_map(src: tuple, dst: tuple) -> IntMatrix:
    """Inclusion/projection matrix sending basis vector of v to that of v."""
    pos = {v: i for i, v in enumerate(dst)}
    M = [[0] * len(src) for _ in dst]
    for j, v in enumerate(src):
        if v in pos:
            M[pos[v]][j] = 1
    return IntMatrix(M, len(dst), len(src))


def _kernel_map(src: Piece, dst: Piece) -> IntMatrix:
    """K1 map induced on kernel bases by the coordinate map on regular vertices."""
    J = _coordinate_map(src.regular, dst.regular)
    X = solve_columns(dst.kernel, J @ src.kernel)
    if X is None:
        raise RuntimeError("kernel vectors do not map into the target kernel")
    return X


def six_term_maps(ideal: Piece, middle: Piece, quotient: Piece) -> SixTerm:
    iota0 = GroupHom(ideal.k0, middle.k0, _coordinate_map(ideal.vertices, middle.vertices))
    pi0 = GroupHom(middle.k0, quotient.k0,
                   _coordinate_map(middle.vertices, quotient.vertices))
    iota1 = GroupHom(ideal.k1, middle.k1, _kernel_map(ideal, middle))
    pi1 = GroupHom(middle.k1, quotient.k1, _kernel_map(middle, quotient))
    # off-diagonal block: quotient's regular columns against the ideal's rows
    rows = [middle.vertices.index(v) for v in ideal.vertices]
    cols = [middle.regular.index(v) for v in quotient.regular]
    C = middle.B.submatrix(rows, cols)
    delta = GroupHom(quotient.k1, ideal.k0, C @ quotient.kernel)
    exp = GroupHom.zero(quotient.k0, ideal.k1)
    return SixTerm(ideal.key, middle.key, quotient.key, iota0, pi0, exp, iota1, pi1, delta)


def check_exact(seq: SixTerm) -> None:
    """Raise ExactnessError unless the sequence is exact at all six groups."""
    cyc = [("K0(ideal)", seq.delta, seq.iota0), ("K0(middle)", seq.iota0, seq.pi0),
           ("K0(quotient)", seq.pi0, seq.exp), ("K1(ideal)", seq.exp, seq.iota1),
           ("K1(middle)", seq.iota1, seq.pi1), ("K1(quotient)", seq.pi1, seq.delta)]
    for node, f, g in cyc:
        why = exactness_failure(f, g)
        if why:
            raise ExactnessError(node, (_label(seq.ideal), _label(seq.middle),
                                        _label(seq.quotient)), why)


def build_diagram(E: Graph, lattice: Optional[IdealLattice] = None,
                  verify: bool = True) -> FkDiagram:
    """Groups on every connected locally closed set and all six-term maps."""
    space = space_of(E, lattice)
    opens = space.opens()
    pieces = {}
    for U in opens:
        for V in opens:
            if V < U:
                Y = U - V
                if Y not in pieces and space.is_connected(Y):
                    pieces[Y] = _piece(E, Y, space.vertices(Y))
    sequences = {}
    for U1, U2, U3 in itertools.product(opens, repeat=3):
        if not (U1 < U2 < U3):
            continue
        Y1, Y2, Y3 = U2 - U1, U3 - U1, U3 - U2
        if not all(Y in pieces for Y in (Y1, Y2, Y3)) or (Y1, Y3) in sequences:
            continue
        seq = six_term_maps(pieces[Y1], pieces[Y2], pieces[Y3])
        if verify:
            check_exact(seq)
        sequences[(Y1, Y3)] = seq
    return FkDiagram(space, pieces, sequences, E)


def _chain_lattice(E: Graph, chain: Optional[IdealLattice]) -> IdealLattice:
    lat = chain or hereditary_saturated_subsets(E)
    if not lat.is_linear:
        raise LatticeShapeError("ideal lattice is not linear", lat)
    return lat


def k_pair(E: Graph, chain: Optional[IdealLattice], interval):
    """(K0, K1, cone) of the subquotient A[a, b]."""
    lat = _chain_lattice(E, chain)
    a, b = interval
    n = lat.length
    if not 1 <= a <= b <= n:
        raise ValueError(f"interval [{a},{b}] outside X_{n}")
    # A[a, b] = A[a, n] / A[b+1, n]  <->  H_{n-a+1} - H_{n-b}
    S = tuple(sorted(lat.chain[n - a + 1] - lat.chain[n - b]))
    p = _piece(E, frozenset(range(a, b + 1)), S)
    return p.k0, p.k1, p.cone


def six_term(E: Graph, chain: Optional[IdealLattice], triple) -> SixTerm:
    """Maps for opens [w,n] <= [v,n] <= [u,n]: ideal [v,w-1] in [u,w-1].

    With u == v the quotient is empty and pi lands in the zero group.
    """
    lat = _chain_lattice(E, chain)
    u, v, w = triple
    n = lat.length
    if not 1 <= u <= v < w <= n + 1:
        raise ValueError(f"need 1 <= u <= v < w <= {n + 1}, got {triple}")

    def piece(a, b):
        S = tuple(sorted(lat.chain[n - a + 1] - lat.chain[n - b]))
        return _piece(E, frozenset(range(a, b + 1)), S)

    seq = six_term_maps(piece(v, w - 1), piece(u, w - 1), piece(u, v - 1))
    check_exact(seq)
    return seq


def filtered_k_theory(E: Graph) -> FkDiagram:
    """FK+ over X_n; the ideal lattice of E must be a chain."""
    lat = _chain_lattice(E, None)
    return build_diagram(E, lat)


def is_case2_shape(lat: IdealLattice) -> bool:
    """Least non-zero ideal below three incomparable atoms generating a cube."""
    if lat.is_linear or len(lat.subsets) != 9 or not lat.union_closed():
        return False
    nonzero = [s for s in lat.subsets if s]
    least = min(nonzero, key=len)
    if not all(least <= s for s in nonzero):
        return False
    above = [s for s in nonzero if s != least]
    mids = [s for s in above if not any(least < t < s for t in above)]
    return len(mids) == 3 and all(not (a <= b or b <= a)
                                 for a, b in itertools.combinations(mids, 2))


def case2_diagram(E: Graph) -> FkDiagram:
    """FK over the four-point space with a least point below three others."""
    lat = hereditary_saturated_subsets(E)
    if not is_case2_shape(lat):
        raise LatticeShapeError("ideal lattice is not of the four-point Case II shape", lat)
    return build_diagram(E, lat)


def iter_maps(D: FkDiagram) -> Iterable:
    for seq in D.sequences.values():
        yield from seq.maps()
