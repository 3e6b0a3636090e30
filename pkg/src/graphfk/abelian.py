"""Finitely generated abelian groups given by presentations.

A group is always carried together with the integer matrix presenting it
(generators = rows, relations = columns), so that maps between K-groups
induced by inclusions and projections of vertex sets are literally
coordinate inclusions and projections.  Canonical coordinates come from the
Smith decomposition of the presentation: torsion coordinates first (in
divisibility order), then free coordinates.
"""

from __future__ import annotations

import enum
import itertools
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, prod
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

from .intmat import (IntMatrix, column_span_basis, kernel_basis, solve,
                     solve_columns)


class FgAbGroup:
    """The cokernel of an integer matrix.

    Attributes:
        presentation: generators-by-relations matrix.
        free_rank: rank of the free part.
        factors: invariant factors, each > 1, in divisibility order.
    """

    def __init__(self, presentation: IntMatrix):
        self.presentation = presentation
        s = presentation.smith()
        k = presentation.rows
        tors = [i for i, d in enumerate(s.diagonal) if d > 1]
        free = list(range(s.rank, k))
        self.factors = tuple(s.diagonal[i] for i in tors)
        self.free_rank = len(free)
        picked = tors + free
        # presentation coords -> canonical coords, and back
        self.to_canonical = s.U.submatrix(picked, range(k))
        self.from_canonical = s.Uinv.submatrix(range(k), picked)
        self.moduli = self.factors + (0,) * self.free_rank

    @property
    def ngens(self) -> int:
        return self.presentation.rows

    @property
    def ncanonical(self) -> int:
        return len(self.moduli)

    @property
    def canonical_form(self) -> tuple:
        return (self.free_rank, self.factors)

    def is_trivial(self) -> bool:
        return not self.moduli

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> Optional[int]:
        return prod(self.factors) if self.free_rank == 0 else None

    def __eq__(self, other) -> bool:
        return isinstance(other, FgAbGroup) and self.presentation == other.presentation

    def __hash__(self) -> int:
        return hash(self.presentation)

    def __repr__(self) -> str:
        return f"FgAbGroup({self.describe()}, gens={self.ngens})"

    def describe(self) -> str:
        parts = [f"Z/{d}" for d in self.factors]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    # elements

    def canonical(self, x: Sequence[int]) -> tuple:
        """Reduced canonical coordinates of a presentation vector."""
        y = self.to_canonical.apply(x)
        return tuple(v % m if m else v for v, m in zip(y, self.moduli))

    def lift_canonical(self, y: Sequence[int]) -> tuple:
        return self.from_canonical.apply(y)

    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(self.canonical(x))

    def element_order(self, x: Sequence[int]) -> Optional[int]:
        y = self.canonical(x)
        if any(y[len(self.factors):]):
            return None
        out = 1
        for v, d in zip(y, self.factors):
            o = d // gcd(v, d)
            out = out * o // gcd(out, o)
        return out

    def elements(self) -> Iterator[tuple]:
        """All elements of a finite group as presentation vectors."""
        if self.free_rank:
            raise ValueError("group is infinite")
        for y in itertools.product(*(range(d) for d in self.factors)):
            yield self.lift_canonical(y)


def cokernel(A: IntMatrix) -> FgAbGroup:
    return FgAbGroup(A)


def free_group(rank: int) -> FgAbGroup:
    return FgAbGroup(IntMatrix.zeros(rank, 0))


def zero_group() -> FgAbGroup:
    return FgAbGroup(IntMatrix.zeros(0, 0))


def _in_relations(group: FgAbGroup, M: IntMatrix) -> bool:
    return all(group.is_zero(c) for c in M.columns())


class GroupHom:
    """A homomorphism given by a lift matrix on presentation generators."""

    def __init__(self, source: FgAbGroup, target: FgAbGroup, lift: IntMatrix,
                 check: bool = True):
        if lift.shape != (target.ngens, source.ngens):
            raise ValueError(f"lift has shape {lift.shape}, expected "
                             f"{(target.ngens, source.ngens)}")
        self.source = source
        self.target = target
        self.lift = lift
        if check and not _in_relations(target, lift @ source.presentation):
            raise ValueError("lift does not respect the source relations")

    @classmethod
    def identity(cls, G: FgAbGroup) -> "GroupHom":
        return cls(G, G, IntMatrix.identity(G.ngens), check=False)

    @classmethod
    def zero(cls, G: FgAbGroup, H: FgAbGroup) -> "GroupHom":
        return cls(G, H, IntMatrix.zeros(H.ngens, G.ngens), check=False)

    @classmethod
    def from_canonical(cls, source: FgAbGroup, target: FgAbGroup, H: IntMatrix,
                       check: bool = False) -> "GroupHom":
        lift = target.from_canonical @ H @ source.to_canonical
        return cls(source, target, lift, check=check)

    def __call__(self, x: Sequence[int]) -> tuple:
        return self.lift.apply(x)

    @cached_property
    def canonical_matrix(self) -> IntMatrix:
        """The map in canonical coordinates, entries reduced per target row."""
        M = self.target.to_canonical @ self.lift @ self.source.from_canonical
        return IntMatrix([[v % m if m else v for v in row]
                          for row, m in zip(M.tolist(), self.target.moduli)],
                         M.rows, M.cols)

    def __repr__(self) -> str:
        return (f"GroupHom({self.source.describe()} -> {self.target.describe()}, "
                f"canonical={self.canonical_matrix.tolist()})")


def compose(g: GroupHom, f: GroupHom) -> GroupHom:
    """``g . f``."""
    if f.target != g.source:
        raise ValueError("middle groups do not match")
    return GroupHom(f.source, g.target, g.lift @ f.lift, check=False)


def homs_equal(f: GroupHom, g: GroupHom) -> bool:
    if f.source != g.source or f.target != g.target:
        raise ValueError("homs have different source or target")
    return _in_relations(f.target, f.lift - g.lift)


def is_zero_hom(f: GroupHom) -> bool:
    return _in_relations(f.target, f.lift)


def is_surjective(f: GroupHom) -> bool:
    return cokernel(f.lift.hstack(f.target.presentation)).is_trivial()


def is_isomorphism(f: GroupHom) -> bool:
    # surjective maps between isomorphic f.g. abelian groups are injective
    if f.source.canonical_form != f.target.canonical_form:
        return False
    return is_surjective(f)


def preimage(f: GroupHom, b: Sequence[int]) -> Optional[tuple]:
    """Some ``x`` with ``f(x) = b``, or None when b is not in the image."""
    n = f.source.ngens
    y = solve(f.lift.hstack(f.target.presentation), b)
    return None if y is None else tuple(y[:n])


def inverse(f: GroupHom) -> GroupHom:
    if not is_isomorphism(f):
        raise ValueError("map is not an isomorphism")
    cols = []
    for j in range(f.target.ngens):
        e = [0] * f.target.ngens
        e[j] = 1
        cols.append(preimage(f, e))
    lift = IntMatrix.from_columns(cols, f.source.ngens) if cols else \
        IntMatrix.zeros(f.source.ngens, 0)
    return GroupHom(f.target, f.source, lift, check=False)


def kernel_generators(f: GroupHom) -> list:
    """Presentation vectors generating the kernel of f."""
    n = f.source.ngens
    K = kernel_basis(f.lift.hstack(f.target.presentation))
    return [c[:n] for c in K.columns()]


def exactness_failure(f: GroupHom, g: GroupHom) -> Optional[str]:
    """Why ``A -f-> B -g-> C`` fails to be exact at B, or None if exact."""
    if f.target != g.source:
        raise ValueError("maps are not composable")
    if not is_zero_hom(compose(g, f)):
        return "image not contained in kernel"
    for b in kernel_generators(g):
        if preimage(f, b) is None:
            return "kernel not contained in image"
    return None


# Hom spaces cut out by commuting squares

class Square(NamedTuple):
    """Constraint ``post . h . pre == fixed`` on an unknown hom h.

    ``pre`` or ``post`` may be None, meaning the identity.
    """
    pre: Optional[GroupHom]
    post: Optional[GroupHom]
    fixed: GroupHom


class Candidates(NamedTuple):
    homs: list
    complete: bool


def _identity_rows(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


class HomSpace:
    """All homs ``source -> target`` satisfying a list of commuting squares.

    Homs are parametrised in canonical coordinates.  The solution set is a
    coset of a subgroup of Hom(source, target); it is stored as a particular
    parameter vector plus generators of the quotient by the zero homs,
    split into finite-order and free directions.
    """

    def __init__(self, source: FgAbGroup, target: FgAbGroup,
                 constraints: Iterable[Square] = ()):
        self.source = source
        self.target = target
        ms, mt = source.moduli, target.moduli
        ts, tt = len(source.factors), len(target.factors)
        # (row, col, scale, modulus); modulus 0 marks a free-to-free entry
        self.variables = []
        for i, e in enumerate(mt):
            for j, d in enumerate(ms):
                if e and d:
                    g = gcd(d, e)
                    if g > 1:
                        self.variables.append((i, j, e // g, g))
                elif e:
                    self.variables.append((i, j, 1, e))
                elif not d:
                    self.variables.append((i, j, 1, 0))
        N = len(self.variables)

        rows, rhs, aux = [], [], []
        for sq in constraints:
            self._check_square(sq)
            Q = sq.post.canonical_matrix.tolist() if sq.post else _identity_rows(len(mt))
            P = sq.pre.canonical_matrix.tolist() if sq.pre else _identity_rows(len(ms))
            F = sq.fixed.canonical_matrix.tolist()
            ymod = sq.fixed.target.moduli
            for a, ma in enumerate(ymod):
                for l in range(len(F[0]) if F else 0):
                    rows.append([s * Q[a][i] * P[j][l] for (i, j, s, _) in self.variables])
                    aux.append(ma)
                    rhs.append(F[a][l])
        self.empty = False
        if rows:
            W = [m for m in aux if m]
            M = []
            k = 0
            for r, m in zip(rows, aux):
                extra = [0] * len(W)
                if m:
                    extra[k] = m
                    k += 1
                M.append(r + extra)
            M = IntMatrix(M, len(M), N + len(W))
            x0 = solve(M, rhs)
            if x0 is None:
                self.empty = True
                return
            theta0 = list(x0[:N])
            K = kernel_basis(M)
            G = K.submatrix(range(N), range(K.cols))
        else:
            theta0 = [0] * N
            G = IntMatrix.identity(N)

        L = column_span_basis(G)
        trivial = [[m if t == k else 0 for t in range(N)]
                   for k, (_, _, _, m) in enumerate(self.variables) if m]
        T = IntMatrix.from_columns(trivial, N) if trivial else IntMatrix.zeros(N, 0)
        C = solve_columns(L, T)
        if C is None:  # zero homs always satisfy homogeneous squares
            raise AssertionError("zero homs fall outside the solution lattice")
        sC = C.smith()
        directions = L @ sC.Uinv
        self.theta0 = theta0
        self.torsion_dirs = [(directions.column(i), d)
                             for i, d in enumerate(sC.diagonal) if d > 1]
        self.free_dirs = [directions.column(i) for i in range(sC.rank, L.cols)]
        self._free_vars = [k for k, v in enumerate(self.variables) if v[3] == 0]

    def _check_square(self, sq: Square) -> None:
        src = sq.pre.source if sq.pre else self.source
        tgt = sq.post.target if sq.post else self.target
        if sq.pre and sq.pre.target != self.source:
            raise ValueError("pre-map does not land in the source")
        if sq.post and sq.post.source != self.target:
            raise ValueError("post-map does not start at the target")
        if sq.fixed.source != src or sq.fixed.target != tgt:
            raise ValueError("fixed map has the wrong source or target")

    @property
    def finite(self) -> bool:
        return not self.free_dirs

    def size(self) -> Optional[int]:
        if self.empty:
            return 0
        if self.free_dirs:
            return None
        return prod(d for _, d in self.torsion_dirs)

    def _hom(self, theta: Sequence[int]) -> GroupHom:
        mt = self.target.moduli
        H = [[0] * self.source.ncanonical for _ in mt]
        for (i, j, s, _), t in zip(self.variables, theta):
            H[i][j] = s * t
        H = [[v % m if m else v for v in row] for row, m in zip(H, mt)]
        return GroupHom.from_canonical(self.source, self.target,
                                       IntMatrix(H, len(mt), self.source.ncanonical))

    def _free_choices(self, bound: int, iso_only: bool):
        """Integer combinations of the free directions, and whether exhaustive."""
        f = len(self.free_dirs)
        if f == 0:
            return [()], True
        fv = self._free_vars
        Phi = IntMatrix([[d[k] for d in self.free_dirs] for k in fv], len(fv), f)
        F0 = [self.theta0[k] for k in fv]
        S = []
        for r in range(len(fv)):
            if Phi.submatrix(S + [r], range(f)).rank > len(S):
                S.append(r)
            if len(S) == f:
                break
        PhiS = Phi.submatrix(S, range(f))
        rs, rt = self.source.free_rank, self.target.free_rank
        if iso_only and rs == rt == 1:
            values, complete = [(-1,), (1,)], True
        else:
            values, complete = itertools.product(range(-bound, bound + 1), repeat=f), False
        out = []
        for v in values:
            z = solve(PhiS, [a - F0[r] for a, r in zip(v, S)])
            if z is None:
                continue
            F = [F0[k] + sum(Phi[k, i] * z[i] for i in range(f)) for k in range(len(fv))]
            if all(abs(x) <= bound for x in F) or (iso_only and rs == rt == 1):
                out.append(tuple(z))
        return out, complete

    def enumerate(self, bound: int, iso_only: bool = False) -> Candidates:
        """Homs in the space, free coordinates bounded by `bound`.

        With ``iso_only`` only isomorphisms are returned; for rank-one free
        parts the free block is then forced to be +-1, which keeps the
        enumeration exhaustive.
        """
        if self.empty:
            return Candidates([], True)
        if iso_only and self.source.canonical_form != self.target.canonical_form:
            return Candidates([], True)
        frees, complete = self._free_choices(bound, iso_only)
        N = len(self.variables)
        out = []
        tranges = [range(d) for _, d in self.torsion_dirs]
        for z in frees:
            base = list(self.theta0)
            for c, d in zip(z, self.free_dirs):
                for k in range(N):
                    base[k] += c * d[k]
            for w in itertools.product(*tranges):
                theta = list(base)
                for c, (d, _) in zip(w, self.torsion_dirs):
                    if c:
                        for k in range(N):
                            theta[k] += c * d[k]
                h = self._hom(theta)
                if iso_only and not is_isomorphism(h):
                    continue
                out.append(h)
        return Candidates(out, complete)


def default_bound(*groups: FgAbGroup) -> int:
    return max([2] + [d for G in groups for d in G.factors])


def hom_candidates(source: FgAbGroup, target: FgAbGroup,
                   constraints: Iterable = (), bound: Optional[int] = None) -> Candidates:
    """Homs source -> target satisfying commuting squares.

    Each constraint is a :class:`Square` (or a ``(pre, post, fixed)``
    tuple) demanding ``post . h . pre == fixed``.  Torsion coordinates are
    enumerated exhaustively; free coordinates of the free-to-free block are
    bounded by `bound` in absolute value.  ``complete`` is True when no free
    direction had to be truncated.
    """
    if bound is None:
        bound = default_bound(source, target)
    space = HomSpace(source, target, [Square(*c) for c in constraints])
    return space.enumerate(bound)


# Positive cones

class Tri(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


def tri_all(results: Iterable[Tri]) -> Tri:
    seen_unknown = False
    for r in results:
        if r is Tri.NO:
            return Tri.NO
        if r is Tri.UNKNOWN:
            seen_unknown = True
    return Tri.UNKNOWN if seen_unknown else Tri.YES


_SEARCH_LIMIT = 200_000


def _lp(c, A_eq, b_eq):
    """Exact LP ``min c.x`` s.t. ``A_eq x = b_eq, x >= 0``.

    Two-phase simplex over the rationals with Bland's rule, so it cannot
    cycle.  Returns ("infeasible", None), ("unbounded", None) or
    ("ok", value).
    """
    n, m = len(c), len(A_eq)
    T = []
    for row, rhs in zip(A_eq, b_eq):
        r = [Fraction(v) for v in row] + [Fraction(rhs)]
        if r[-1] < 0:
            r = [-v for v in r]
        T.append(r)
    # artificial columns n..n+m-1 sit just before the right-hand side
    for i, r in enumerate(T):
        r[n:n] = [Fraction(int(i == k)) for k in range(m)]
    basis = [n + i for i in range(m)]

    def pivot(i, j):
        p = T[i][j]
        T[i] = [v / p for v in T[i]]
        for k in range(len(T)):
            if k != i and T[k][j]:
                f = T[k][j]
                T[k] = [a - f * b for a, b in zip(T[k], T[i])]
        basis[i] = j

    def run(cost, ncols):
        while True:
            enter = None
            for j in range(ncols):
                if j in basis:
                    continue
                if cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(len(T))) < 0:
                    enter = j
                    break
            if enter is None:
                return True
            best = None
            for i in range(len(T)):
                if T[i][enter] > 0:
                    ratio = T[i][-1] / T[i][enter]
                    if best is None or (ratio, basis[i]) < (best[0], basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return False
            pivot(best[1], enter)

    run([0] * n + [1] * m, n + m)
    if sum(T[i][-1] for i in range(len(T)) if basis[i] >= n) > 0:
        return "infeasible", None
    # drive zero-valued artificials out of the basis, dropping redundant rows
    for i in reversed(range(len(T))):
        if basis[i] >= n:
            j = next((j for j in range(n) if T[i][j]), None)
            if j is None:
                del T[i], basis[i]
            else:
                pivot(i, j)
    for r in T:
        del r[n:n + m]
    if not run(list(c), n):
        return "unbounded", None
    return "ok", sum(c[basis[i]] * T[i][-1] for i in range(len(T)))


class Cone:
    """Submonoid of a group generated by finitely many elements."""

    def __init__(self, group: FgAbGroup, generators: Iterable[Sequence[int]]):
        self.group = group
        self.generators = tuple(tuple(g) for g in generators)
        for g in self.generators:
            if len(g) != group.ngens:
                raise ValueError("cone generator has the wrong length")
        ntor = len(group.factors)
        self._canon = [group.canonical(g) for g in self.generators]
        self._free = [c[ntor:] for c in self._canon]

    def __repr__(self) -> str:
        return f"Cone({self.group.describe()}, {len(self.generators)} generators)"

    def _free_matrix(self, idx) -> list:
        return [[self._free[i][r] for i in idx] for r in range(self.group.free_rank)]

    @cached_property
    def is_full(self) -> bool:
        """True when the cone is the whole group.

        That happens iff the generators generate the group and their free
        images admit a strictly positive rational relation (then a positive
        integer multiple of that relation is zero, so each -g lies in the
        cone).  In a finite group only generation matters.
        """
        G = self.group
        if G.is_trivial():
            return True
        if not self.generators:
            return False
        gens = IntMatrix.from_columns(self.generators, G.ngens)
        if not cokernel(gens.hstack(G.presentation)).is_trivial():
            return False
        if G.free_rank == 0:
            return True
        m = len(self.generators)
        A = self._free_matrix(range(m))
        # x = 1 + x', x' >= 0:  A x' = -A 1
        b = [-sum(row) for row in A]
        return _lp([0] * m, A, b)[0] == "ok"

    @cached_property
    def _nontorsion(self) -> list:
        return [i for i, f in enumerate(self._free) if any(f)]

    @cached_property
    def _pointed(self) -> bool:
        idx = self._nontorsion
        if not idx:
            return True
        A = self._free_matrix(idx)
        return _lp([0] * len(idx), A + [[1] * len(idx)],
                   [0] * len(A) + [1])[0] == "infeasible"

    def contains(self, t: Sequence[int], bound: int = 4) -> Tri:
        """Whether t is a non-negative integer combination of the generators."""
        G = self.group
        if G.is_zero(t) or self.is_full:
            return Tri.YES
        ntor = len(G.factors)
        tc = G.canonical(t)
        tf = tc[ntor:]
        m = len(self.generators)
        A = self._free_matrix(range(m))
        if _lp([0] * m, A, tf)[0] == "infeasible":
            return Tri.NO
        ranges = [None] * m
        complete = True
        for i in range(m):
            if i not in self._nontorsion:
                ranges[i] = range(G.element_order(self.generators[i]) or 1)
        if self._pointed:
            for i in self._nontorsion:
                c = [0] * m
                c[i] = -1
                status, val = _lp(c, A, tf)
                ranges[i] = range(int(-val) + 1)
        else:
            complete = False
            for i in self._nontorsion:
                ranges[i] = range(bound + 1)
        if prod(len(r) for r in ranges) > _SEARCH_LIMIT:
            complete = False
            ranges = [range(min(len(r), bound + 1)) for r in ranges]
        mods = G.moduli
        for c in itertools.product(*ranges):
            ok = True
            for r, md in enumerate(mods):
                v = sum(ci * g[r] for ci, g in zip(c, self._canon)) - tc[r]
                if (v % md if md else v) != 0:
                    ok = False
                    break
            if ok:
                return Tri.YES
        return Tri.NO if complete else Tri.UNKNOWN


def cone_maps_into(f: GroupHom, src: Cone, tgt: Cone, bound: int = 4) -> Tri:
    """Whether f sends every generator of `src` into `tgt`."""
    if src.group != f.source or tgt.group != f.target:
        raise ValueError("cones do not live on the map's source and target")
    if tgt.is_full:
        return Tri.YES
    return tri_all(tgt.contains(f(g), bound) for g in src.generators)
