"""Deciding stable isomorphism by searching for FK+ isomorphisms.

The generic path looks for a family of group isomorphisms, one per piece
and degree, commuting with every map of every six-term sequence and
preserving the K0 cones in both directions.  Pieces are visited from the
least ideal upward; each commuting square with an already fixed neighbour
is a linear constraint on the next hom, so few candidates survive.

The closed-form divisibility criteria for the two three- and four-vertex
families serve as independent oracles.
"""

from __future__ import annotations

import enum
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from sympy import isprime

from .abelian import (HomSpace, Square, Tri, compose, cone_maps_into, homs_equal,
                      inverse, is_isomorphism)
from .graph import (Graph, class_Cn_membership, condition_K, extension_split,
                    hereditary_saturated_subsets)
from .ktheory import (FkDiagram, LatticeShapeError, _label, build_diagram,
                      filtered_k_theory, space_of)


class Status(str, enum.Enum):
    ISOMORPHIC = "isomorphic"
    NOT_ISOMORPHIC = "not_isomorphic"
    UNKNOWN = "unknown"


@dataclass
class Verdict:
    status: Status
    witness: Optional[dict] = None       # (piece of D1, degree) -> GroupHom
    obstruction: Optional[str] = None
    search_complete: bool = True
    space_map: Optional[dict] = None     # point of D1 -> point of D2

    def to_dict(self) -> dict:
        out = {"status": self.status.value, "search_complete": self.search_complete,
               "obstruction": self.obstruction}
        if self.space_map is not None:
            out["space_map"] = {str(k): v for k, v in sorted(self.space_map.items())}
        if self.witness is not None:
            out["witness"] = {f"{_label(Y)} K{d}": h.canonical_matrix.tolist()
                              for (Y, d), h in sorted(self.witness.items(),
                                                      key=lambda kv: (sorted(kv[0][0]), kv[0][1]))}
        return out


def default_bound(D1: FkDiagram, D2: FkDiagram) -> int:
    return max(4, D1.max_factor(), D2.max_factor())


def _mapper(sigma):
    return lambda Y: frozenset(sigma[p] for p in Y)


def _invariant_mismatch(D1, D2, tr) -> Optional[str]:
    for Y in D1.ordered_keys():
        P, Q = D1.pieces[Y], D2.pieces[tr(Y)]
        for d, (G, H) in enumerate(((P.k0, Q.k0), (P.k1, Q.k1))):
            if G.canonical_form != H.canonical_form:
                return (f"K{d} at {P.label} is {G.describe()} in the first diagram "
                        f"and {H.describe()} at {Q.label} in the second")
        if P.cone.is_full != Q.cone.is_full:
            return (f"positive cone of K0 at {P.label} is "
                    f"{'everything' if P.cone.is_full else 'proper'} on one side only")
    return None


def _edges(D1, D2, tr):
    """Pairs of corresponding maps, keyed by their endpoints in D1."""
    out = []
    for (Y1, Y3), seq in D1.sequences.items():
        seq2 = D2.sequences[(tr(Y1), tr(Y3))]
        for m1, m2 in zip(seq.maps(), seq2.maps()):
            _, f1, A, da, B, db = m1
            out.append(((A, da), (B, db), f1, m2[1]))
    return out


class _Search:
    def __init__(self, D1, D2, tr, bound, max_nodes):
        self.D1, self.D2, self.tr = D1, D2, tr
        self.bound = bound
        self.max_nodes = max_nodes
        self.nodes = [(Y, d) for Y in D1.ordered_keys() for d in (0, 1)]
        pos = {nd: i for i, nd in enumerate(self.nodes)}
        self.back = [[] for _ in self.nodes]
        for a, b, f1, f2 in _edges(D1, D2, tr):
            # attach each square to whichever endpoint is visited second
            if pos[a] < pos[b]:
                self.back[pos[b]].append(("in", a, f1, f2))
            else:
                self.back[pos[a]].append(("out", b, f1, f2))
        self.complete = True
        self.visited = 0

    def _squares(self, i, alpha):
        sq = []
        for kind, other, f1, f2 in self.back[i]:
            if kind == "in":   # h . f1 = f2 . alpha_other
                sq.append(Square(f1, None, compose(f2, alpha[other])))
            else:              # alpha_other . f1 = f2 . h
                sq.append(Square(None, f2, compose(alpha[other], f1)))
        return sq

    def _order_ok(self, Y, h) -> bool:
        c1 = self.D1.pieces[Y].cone
        c2 = self.D2.pieces[self.tr(Y)].cone
        if c1.is_full and c2.is_full:
            return True
        r = cone_maps_into(h, c1, c2, self.bound)
        if r is Tri.YES:
            r = cone_maps_into(inverse(h), c2, c1, self.bound)
        if r is Tri.UNKNOWN:
            self.complete = False
        return r is Tri.YES

    def run(self, i=0, alpha=None):
        alpha = {} if alpha is None else alpha
        if i == len(self.nodes):
            return dict(alpha)
        self.visited += 1
        if self.visited > self.max_nodes:
            self.complete = False
            return None
        Y, d = self.nodes[i]
        G1 = self.D1.group(Y, d)
        G2 = self.D2.group(self.tr(Y), d)
        space = HomSpace(G1, G2, self._squares(i, alpha))
        cands = space.enumerate(self.bound, iso_only=True)
        if not cands.complete:
            self.complete = False
        for h in cands.homs:
            if d == 0 and not self._order_ok(Y, h):
                continue
            alpha[(Y, d)] = h
            found = self.run(i + 1, alpha)
            if found is not None:
                return found
            del alpha[(Y, d)]
        return None


def verify_witness(D1: FkDiagram, D2: FkDiagram, sigma: dict, witness: dict,
                   bound: int = 4) -> Optional[str]:
    """Check a witness from scratch; returns why it fails, or None."""
    tr = _mapper(sigma)
    for Y in D1.pieces:
        for d in (0, 1):
            h = witness.get((Y, d))
            if h is None:
                return f"no map at {_label(Y)} K{d}"
            if h.source != D1.group(Y, d) or h.target != D2.group(tr(Y), d):
                return f"map at {_label(Y)} K{d} has the wrong source or target"
            if not is_isomorphism(h):
                return f"map at {_label(Y)} K{d} is not an isomorphism"
        c1, c2 = D1.pieces[Y].cone, D2.pieces[tr(Y)].cone
        h = witness[(Y, 0)]
        if cone_maps_into(h, c1, c2, bound) is not Tri.YES:
            return f"map at {_label(Y)} K0 is not positive"
        if cone_maps_into(inverse(h), c2, c1, bound) is not Tri.YES:
            return f"inverse at {_label(Y)} K0 is not positive"
    for (Y1, Y3), seq in D1.sequences.items():
        seq2 = D2.sequences[(tr(Y1), tr(Y3))]
        for (name, f1, A, da, B, db), m2 in zip(seq.maps(), seq2.maps()):
            if not homs_equal(compose(witness[(B, db)], f1), compose(m2[1], witness[(A, da)])):
                return (f"{name} of the sequence ({_label(Y1)}, {_label(Y3)}) "
                        f"does not commute with the witness")
    return None


def fk_isomorphic(D1: FkDiagram, D2: FkDiagram, bound: Optional[int] = None,
                  max_nodes: int = 200_000) -> Verdict:
    """Search for an isomorphism FK+(D1) -> FK+(D2) over some homeomorphism
    of the underlying spaces."""
    if bound is None:
        bound = default_bound(D1, D2)
    sigmas = list(D1.space.isomorphisms(D2.space))
    if not sigmas:
        return Verdict(Status.NOT_ISOMORPHIC,
                       obstruction="underlying spaces are not homeomorphic")
    reasons = []
    complete = True
    for sigma in sigmas:
        tr = _mapper(sigma)
        why = _invariant_mismatch(D1, D2, tr)
        if why:
            reasons.append(why)
            continue
        search = _Search(D1, D2, tr, bound, max_nodes)
        found = search.run()
        if found is not None:
            bad = verify_witness(D1, D2, sigma, found, bound)
            if bad:
                raise AssertionError(f"search produced an invalid witness: {bad}")
            return Verdict(Status.ISOMORPHIC, witness=found, search_complete=search.complete,
                           space_map=dict(sigma))
        if search.complete:
            reasons.append("exhaustive search over all torsion choices and forced free "
                           "signs found no compatible family of isomorphisms")
        else:
            complete = False
    if not complete:
        return Verdict(Status.UNKNOWN, search_complete=False,
                       obstruction="bounded search found no isomorphism")
    if len(sigmas) == 1:
        return Verdict(Status.NOT_ISOMORPHIC, obstruction=reasons[0])
    uniq = sorted(set(reasons))
    return Verdict(Status.NOT_ISOMORPHIC,
                   obstruction=f"fails for all {len(sigmas)} homeomorphisms: " + "; ".join(uniq))


# closed-form criteria

def _check_params(p, *triples):
    if not isinstance(p, int) or not isprime(p):
        raise ValueError(f"p = {p} is not prime")
    for t in triples:
        if len(t) != 3 or any((not isinstance(v, int)) or v <= 0 for v in t):
            raise ValueError(f"parameters must be three positive integers, got {t}")


def criterion_case1(p: int, t1, t2) -> bool:
    """Divisibility criterion for the three-vertex family."""
    _check_params(p, t1, t2)
    (x, y, z), (a, b, c) = t1, t2
    if (x % p == 0) != (a % p == 0) or (z % p == 0) != (c % p == 0):
        return False
    if z % p:
        return True
    if x % p == 0:
        return (y % p == 0) == (b % p == 0)
    return ((y - x * z // p) % p == 0) == ((b - a * c // p) % p == 0)


def criterion_case2(p: int, t1, t2) -> bool:
    """Same number of p-divisible entries."""
    _check_params(p, t1, t2)
    return sum(v % p == 0 for v in t1) == sum(v % p == 0 for v in t2)


# templates

def intro_graph(n: int) -> Graph:
    return Graph([[0, 0, 0], [n, 3, 0], [1, 1, 3]], name=f"E_{n}")


def case1_graph(p: int, x: int, y: int, z: int) -> Graph:
    return Graph([[0, 0, 0], [z, p + 1, 0], [y, x, p + 1]], name=f"I(p={p};{x},{y},{z})")


def case2_graph(p: int, x: int, y: int, z: int) -> Graph:
    return Graph([[0, 0, 0, 0], [x, p + 1, 0, 0], [y, 0, p + 1, 0], [z, 0, 0, p + 1]],
                 name=f"II(p={p};{x},{y},{z})")


def match_case1(E: Graph):
    """(p, (x, y, z)) when E is literally a three-vertex family member."""
    if E.n != 3:
        return None
    a = E.adj.tolist()
    q = a[1][1]
    if a[0] != [0, 0, 0] or a[1][2] != 0 or a[2][2] != q or not isprime(q - 1):
        return None
    x, y, z = a[2][1], a[2][0], a[1][0]
    return (q - 1, (x, y, z)) if min(x, y, z) > 0 else None


def match_case2(E: Graph):
    if E.n != 4:
        return None
    a = E.adj.tolist()
    q = a[1][1]
    if a[0] != [0] * 4 or not isprime(q - 1):
        return None
    for i in (1, 2, 3):
        if any(a[i][j] != (q if i == j else 0) for j in (1, 2, 3)):
            return None
    t = (a[1][0], a[2][0], a[3][0])
    return (q - 1, t) if min(t) > 0 else None


# pairwise classification

@dataclass
class PairReport:
    applicable: bool
    reason: str
    theorem: Optional[str] = None
    verdict: Optional[Verdict] = None
    path: Optional[str] = None
    closed_form: Optional[bool] = None
    agreement: Optional[bool] = None
    diagrams: tuple = ()
    memberships: tuple = field(default=(), repr=False)

    @property
    def status(self) -> str:
        if not self.applicable:
            return "not_applicable"
        return self.verdict.status.value

    def to_dict(self) -> dict:
        return {"applicable": self.applicable, "status": self.status, "reason": self.reason,
                "theorem": self.theorem, "path": self.path, "closed_form": self.closed_form,
                "agreement": self.agreement,
                "verdict": self.verdict.to_dict() if self.verdict else None,
                "membership": [m.describe() for m in self.memberships]}


def _lattice_poset(lat):
    jis = [J for J, _ in lat.join_irreducibles()]
    return [frozenset(j for j, K in enumerate(jis) if K < J) for J in jis]


def lattices_isomorphic(L1, L2) -> bool:
    """Finite distributive lattices are isomorphic iff their posets of
    join-irreducibles are."""
    P, Q = _lattice_poset(L1), _lattice_poset(L2)
    if len(P) != len(Q) or len(L1.subsets) != len(L2.subsets):
        return False
    for perm in itertools.permutations(range(len(Q))):
        if all(frozenset(perm[j] for j in P[i]) == Q[perm[i]] for i in range(len(P))):
            return True
    return False


def _closed_form(E1, E2):
    for match, crit, name in ((match_case1, criterion_case1, "three-vertex divisibility"),
                              (match_case2, criterion_case2, "divisible-entry count")):
        m1, m2 = match(E1), match(E2)
        if m1 and m2 and m1[0] == m2[0]:
            return crit(m1[0], m1[1], m2[1]), name
    return None, None


def classify_pair(E1: Graph, E2: Graph, bound: Optional[int] = None) -> PairReport:
    for i, E in enumerate((E1, E2), 1):
        if E.n == 0:
            return PairReport(False, f"graph {i} is empty")
        if not condition_K(E):
            return PairReport(False, f"Condition (K) fails for graph {i}")
    L1, L2 = hereditary_saturated_subsets(E1), hereditary_saturated_subsets(E2)
    m1, m2 = class_Cn_membership(E1), class_Cn_membership(E2)
    if not lattices_isomorphic(L1, L2):
        v = Verdict(Status.NOT_ISOMORPHIC,
                    obstruction="ideal lattices are not isomorphic, so the primitive ideal "
                                "spaces are not homeomorphic")
        return PairReport(True, "ideal lattices differ", verdict=v, path="ideal lattice",
                          memberships=(m1, m2))
    if m1.member and m2.member:
        theorem = f"class C_{m1.n}"
        D1, D2 = filtered_k_theory(E1), filtered_k_theory(E2)
    else:
        s1, s2 = extension_split(E1, L1), extension_split(E2, L2)
        eligible = (not L1.is_linear and s1 and s2 and s1["orientation"] == "AF-on-bottom"
                    and s2["orientation"] == "AF-on-bottom")
        if not eligible:
            return PairReport(False, "neither the class C_n theorem nor the AF-ideal "
                              "extension theorem applies", memberships=(m1, m2))
        try:
            D1, D2 = build_diagram(E1, L1), build_diagram(E2, L2)
        except LatticeShapeError as exc:
            return PairReport(False, str(exc), memberships=(m1, m2))
        theorem = "AF least ideal with purely infinite quotient"
    v = fk_isomorphic(D1, D2, bound)
    closed, _ = _closed_form(E1, E2)
    report = PairReport(True, "classification theorem applies", theorem, v,
                        "generic search" if closed is None else "both", closed,
                        diagrams=(D1, D2), memberships=(m1, m2))
    if closed is not None and v.status is not Status.UNKNOWN:
        report.agreement = closed == (v.status is Status.ISOMORPHIC)
    return report


# sweeps

TEMPLATES = ("intro", "caseI", "caseII")


def template_tuples(template: str, lo: int, hi: int) -> list:
    if template not in TEMPLATES:
        raise ValueError(f"unknown template {template!r}")
    if lo > hi or lo < 1:
        raise ValueError(f"bad range {lo}..{hi}")
    r = range(lo, hi + 1)
    if template == "intro":
        return [(n,) for n in r]
    return list(itertools.product(r, repeat=3))


def template_graph(template: str, p: int, t) -> Graph:
    if template == "intro":
        return intro_graph(t[0])
    return (case1_graph if template == "caseI" else case2_graph)(p, *t)


def template_criterion(template: str, p: int, s, t) -> bool:
    if template == "intro":
        return criterion_case1(2, (1, 1, s[0]), (1, 1, t[0]))
    return (criterion_case1 if template == "caseI" else criterion_case2)(p, s, t)


@dataclass
class SweepResult:
    template: str
    p: int
    tuples: list
    classes: list            # lists of tuples, ordered by first member
    criterion: str
    checked: int = 0
    disagreements: list = field(default_factory=list)
    unknown: int = 0

    def to_dict(self) -> dict:
        return {"template": self.template, "p": self.p, "criterion": self.criterion,
                "count": len(self.classes),
                "classes": [{"representative": list(c[0]), "size": len(c),
                             "members": [list(t) for t in c]} for c in self.classes],
                "cross_checked_pairs": self.checked, "unknown": self.unknown,
                "disagreements": [[list(a), list(b)] for a, b in self.disagreements]}


class TransitivityError(RuntimeError):
    pass


def _cross_check(job):
    template, p, t, reps, bound = job
    E = template_graph(template, p, t)
    out = []
    for r in reps:
        rep = classify_pair(E, template_graph(template, p, r), bound)
        out.append((r, rep.status, rep.agreement))
    return t, out


def sweep(template: str, p: int, lo: int, hi: int, cross_check: bool = True,
          workers: int = 1, bound: Optional[int] = None) -> SweepResult:
    """Partition a template family into stable isomorphism classes."""
    if template == "intro":
        p = 2
    if not isprime(p):
        raise ValueError(f"p = {p} is not prime")
    tuples = template_tuples(template, lo, hi)
    classes = []
    for t in tuples:
        for c in classes:
            if template_criterion(template, p, c[0], t):
                c.append(t)
                break
        else:
            classes.append([t])
    # the criterion must be an equivalence relation on what it bucketed
    where = {t: k for k, c in enumerate(classes) for t in c}
    for s, t in itertools.combinations(tuples, 2):
        if template_criterion(template, p, s, t) != (where[s] == where[t]):
            raise TransitivityError(f"criterion is not transitive at {s}, {t}")
    name = "divisible-entry count" if template == "caseII" else "three-vertex divisibility"
    res = SweepResult(template, p, tuples, classes, name)
    if cross_check:
        reps = [c[0] for c in classes]
        jobs = [(template, p, t, reps, bound) for t in tuples]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1)) as ex:
                results = list(ex.map(_cross_check, jobs, chunksize=8))
        else:
            results = [_cross_check(j) for j in jobs]
        for t, out in sorted(results):
            for r, status, agree in out:
                res.checked += 1
                if status == "unknown":
                    res.unknown += 1
                elif (status == "isomorphic") != (where[t] == where[r]):
                    res.disagreements.append((t, r))
    return res
