"""Command line front end.

Graph files are JSON objects ``{"vertices": n, "adjacency": [[...], ...]}``
with an optional ``"name"``; row i of the adjacency matrix lists the
number of edges from vertex i to each vertex (a zero row is a sink).
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .classify import Status, TEMPLATES, classify_pair, sweep
from .graph import (AF, PURELY_INFINITE, Graph, class_Cn_membership,
                    hereditary_saturated_subsets, subquotient_graph, subquotient_type)
from .ktheory import LatticeShapeError, _piece, build_diagram

EXIT = {Status.ISOMORPHIC.value: 0, Status.NOT_ISOMORPHIC.value: 1, Status.UNKNOWN.value: 2,
        "not_applicable": 3}
EX_USAGE, EX_NOINPUT = 64, 66


class UsageError(Exception):
    def __init__(self, message, code=EX_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def load_graph(path: str) -> Graph:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise UsageError(f"{path}: no such file", EX_NOINPUT)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}", EX_NOINPUT)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})")
    return graph_from_json(data, path)


def graph_from_json(data, where="input") -> Graph:
    if isinstance(data, dict) and isinstance(data.get("graph"), dict):
        data = data["graph"]  # an `fk --json` dump
    if not isinstance(data, dict) or "adjacency" not in data or "vertices" not in data:
        raise UsageError(f"{where}: expected an object with 'vertices' and 'adjacency'")
    n, adj = data["vertices"], data["adjacency"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise UsageError(f"{where}: 'vertices' must be a positive integer")
    if (not isinstance(adj, list) or len(adj) != n
            or any(not isinstance(r, list) or len(r) != n for r in adj)):
        raise UsageError(f"{where}: 'adjacency' must be a {n}x{n} list of rows")
    if any(not isinstance(x, int) or isinstance(x, bool) or x < 0 for r in adj for x in r):
        raise UsageError(f"{where}: adjacency entries must be non-negative integers")
    name = data.get("name")
    return Graph(adj, name=name if isinstance(name, str) else None)


def graph_to_json(E: Graph) -> dict:
    out = {"vertices": E.n, "adjacency": E.adj.tolist()}
    if E.name:
        out["name"] = E.name
    return out


def _one_based(vs):
    return [v + 1 for v in vs]


def _group_json(G) -> dict:
    return {"free_rank": G.free_rank, "torsion": list(G.factors), "describe": G.describe()}


def _piece_json(P) -> dict:
    return {"piece": P.label, "points": sorted(P.key), "vertices": _one_based(P.vertices),
            "presentation": P.B.tolist(), "K0": _group_json(P.k0), "K1": _group_json(P.k1),
            "cone_generators": [list(P.k0.canonical(g)) for g in P.cone.generators],
            "cone_is_group": P.cone.is_full}


def fk_report(E: Graph) -> dict:
    """Machine-readable FK+ data; the text report is rendered from this."""
    lat = hereditary_saturated_subsets(E)
    m = class_Cn_membership(E)
    rep = {"graph": graph_to_json(E), "membership": m.describe(),
           "lattice": [_one_based(sorted(s)) for s in lat.subsets],
           "linear": lat.is_linear, "notice": None}
    whole = _piece(E, frozenset(), tuple(range(E.n)))
    rep["whole"] = {"K0": _group_json(whole.k0), "K1": _group_json(whole.k1),
                    "cone_generators": [list(whole.k0.canonical(g))
                                        for g in whole.cone.generators],
                    "cone_is_group": whole.cone.is_full}
    try:
        D = build_diagram(E, lat)
    except LatticeShapeError as exc:
        rep["notice"] = f"{exc}; showing K-data of each ideal only"
        rep["ideals"] = []
        for H in lat.subsets:
            if H:
                P = _piece(E, frozenset(), tuple(sorted(H)))
                rep["ideals"].append({"vertices": _one_based(sorted(H)),
                                      "K0": _group_json(P.k0), "K1": _group_json(P.k1)})
        return rep
    if not lat.is_linear:
        rep["notice"] = "ideal lattice is not linear; pieces are indexed by point sets"
    rep["points"] = {str(k): _one_based(v) for k, v in sorted(D.space.blocks.items())}
    rep["pieces"] = [_piece_json(D.pieces[Y]) for Y in D.ordered_keys()]
    seqs = []
    for (Y1, Y3), s in sorted(D.sequences.items(),
                              key=lambda kv: (sorted(kv[0][0]), sorted(kv[0][1]))):
        seqs.append({"ideal": D.pieces[s.ideal].label, "middle": D.pieces[s.middle].label,
                     "quotient": D.pieces[s.quotient].label,
                     "maps": {name: f.canonical_matrix.tolist()
                              for name, f, *_ in s.maps()}})
    rep["sequences"] = seqs
    return rep


def _cone_text(P) -> str:
    if P["cone_is_group"]:
        return "whole group"
    return "generated by " + ", ".join(str(tuple(c)) for c in P["cone_generators"])


def render_fk(rep: dict) -> str:
    g = rep["graph"]
    lines = [f"graph {g.get('name') or ''} with {g['vertices']} vertices".replace("  ", " "),
             rep["membership"],
             "ideal lattice: " + ", ".join("{" + ",".join(map(str, s)) + "}"
                                           for s in rep["lattice"])]
    w = rep["whole"]
    lines.append(f"whole algebra: K0 = {w['K0']['describe']}, K1 = {w['K1']['describe']}, "
                 f"cone: {_cone_text(w)}")
    if rep["notice"]:
        lines.append(f"notice: {rep['notice']}")
    if "ideals" in rep:
        for item in rep["ideals"]:
            lines.append(f"  ideal {item['vertices']}: K0 = {item['K0']['describe']}, "
                         f"K1 = {item['K1']['describe']}")
        return "\n".join(lines) + "\n"
    lines.append("points: " + ", ".join(f"{k} -> vertices {v}"
                                        for k, v in rep["points"].items()))
    lines.append("pieces (least ideal first):")
    for P in rep["pieces"]:
        lines.append(f"  {P['piece']:<10} K0 = {P['K0']['describe']:<14} "
                     f"K1 = {P['K1']['describe']:<6} cone: {_cone_text(P)}")
    lines.append("six-term sequences (ideal -> middle -> quotient):")
    for s in rep["sequences"]:
        lines.append(f"  {s['ideal']} -> {s['middle']} -> {s['quotient']}: "
                     f"iota0 {s['maps']['iota0']}, pi0 {s['maps']['pi0']}, "
                     f"delta {s['maps']['delta']}")
    return "\n".join(lines) + "\n"


def lattice_dot(E: Graph) -> str:
    """Hasse diagram of the ideal lattice; AF steps solid, infinite ones decorated."""
    lat = hereditary_saturated_subsets(E)
    out = ["digraph ideals {", "  rankdir=BT;", "  node [shape=box];"]
    for i, s in enumerate(lat.subsets):
        label = "{" + ",".join(map(str, _one_based(sorted(s)))) + "}" if s else "0"
        out.append(f'  n{i} [label="{label}"];')
    for i, j in lat.covers:
        kind = subquotient_type(subquotient_graph(E, lat.subsets[j], lat.subsets[i]))
        if kind == AF:
            style = 'style=solid, arrowhead=none'
        elif kind == PURELY_INFINITE:
            style = 'style=dashed, arrowhead=none, penwidth=2, label="~"'
        else:
            style = 'style=dotted, arrowhead=none, label="mixed"'
        out.append(f"  n{i} -> n{j} [{style}];")
    out.append("}")
    return "\n".join(out) + "\n"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_fk(args) -> int:
    E = load_graph(args.file)
    rep = fk_report(E)
    sys.stdout.write(_dump(rep) if args.json else render_fk(rep))
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(lattice_dot(E))
    return 0


def render_classify(rep, names) -> str:
    lines = [f"{names[0]} vs {names[1]}"]
    for nm, m in zip(names, rep.memberships):
        lines.append(f"  {nm}: {m.describe()}")
    if not rep.applicable:
        lines.append(f"classification theorem not applicable: {rep.reason}")
        return "\n".join(lines) + "\n"
    v = rep.verdict
    lines.append(f"theorem: {rep.theorem or 'none needed'}")
    lines.append(f"verdict: {v.status.value} (decided by {rep.path})")
    if v.obstruction:
        lines.append(f"obstruction: {v.obstruction}")
    if rep.closed_form is not None:
        lines.append(f"closed-form criterion says {'isomorphic' if rep.closed_form else 'not isomorphic'}"
                     f"; agreement: {rep.agreement}")
    if v.witness:
        lines.append("witness (canonical coordinates):")
        for k, M in v.to_dict()["witness"].items():
            lines.append(f"  {k}: {M}")
    return "\n".join(lines) + "\n"


def cmd_classify(args) -> int:
    E1, E2 = load_graph(args.a), load_graph(args.b)
    rep = classify_pair(E1, E2, args.bound)
    if args.json:
        sys.stdout.write(_dump(rep.to_dict()))
    else:
        sys.stdout.write(render_classify(rep, (args.a, args.b)))
    # non-applicable pairs still get their invariants printed
    if not rep.applicable and not args.json:
        for E in (E1, E2):
            sys.stdout.write(render_fk(fk_report(E)))
    return EXIT[rep.status]


def parse_range(text: str):
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi if sep else lo)
    except ValueError:
        raise UsageError(f"range must look like A..B, got {text!r}")
    if a < 1 or a > b:
        raise UsageError(f"range must satisfy 1 <= A <= B, got {text!r}")
    return a, b


def cmd_sweep(args) -> int:
    lo, hi = parse_range(args.range)
    try:
        res = sweep(args.template, args.p, lo, hi, cross_check=not args.no_check,
                    workers=args.workers, bound=args.bound)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.json:
        sys.stdout.write(_dump(res.to_dict()))
        return 0
    what = "n" if args.template == "intro" else "(x,y,z)"
    print(f"template {args.template}, p = {res.p}, {what} in {lo}..{hi}: "
          f"{len(res.classes)} classes (criterion: {res.criterion})")
    for k, c in enumerate(res.classes, 1):
        members = " ".join(",".join(map(str, t)) for t in c)
        print(f"  class {k}: size {len(c)}, representative {','.join(map(str, c[0]))}: {members}")
    if not args.no_check:
        print(f"cross-checked {res.checked} comparisons by FK+ search: "
              f"{len(res.disagreements)} disagreements, {res.unknown} unknown")
        for s, t in res.disagreements:
            print(f"  disagreement: {s} vs representative {t}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphfk", description=__doc__.splitlines()[0],
                epilog="Graph files: JSON {\"vertices\": n, \"adjacency\": [[...]]}; "
                       "adjacency[i][j] = number of edges from vertex i to vertex j.")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for any randomised choice (results are deterministic)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fk", help="print the filtered ordered K-theory of a graph")
    f.add_argument("file")
    f.add_argument("--json", action="store_true")
    f.add_argument("--dot", metavar="OUT", help="write the ideal lattice as Graphviz DOT")
    f.set_defaults(func=cmd_fk)

    c = sub.add_parser("classify", help="decide stable isomorphism of two graph algebras",
                       epilog="exit status: 0 isomorphic, 1 not isomorphic, 2 unknown, "
                              "3 theorem not applicable")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--bound", type=int, default=None,
                   help="bound on free coordinates in the search (default: max(4, largest "
                        "invariant factor))")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("sweep", help="partition a template family into classes")
    s.add_argument("--template", required=True, choices=TEMPLATES)
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--range", required=True, metavar="A..B")
    s.add_argument("--json", action="store_true")
    s.add_argument("--bound", type=int, default=None)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--no-check", action="store_true",
                   help="skip the cross-check against the FK+ search")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    random.seed(args.seed)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"graphfk: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
