"""Command-line front end.

Graphs come in as JSON ({"vertices": [{"genus": 0, "legs": [1]}, ...],
"edges": [{"tail": 0, "head": 0, "stabilizer": 2}, ...]}, 0-based), from a
file or stdin ("-").  Output is JSON by default, TSV on request.  Exit
codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import exactalg, graphs, orbits, picard


class ParseError(ValueError):
    pass


def parse_graph_data(data) -> graphs.DualGraph:
    if not isinstance(data, dict):
        raise ParseError("top level: expected an object")
    vertices = data.get("vertices")
    edges = data.get("edges", [])
    if not isinstance(vertices, list) or not vertices:
        raise ParseError("vertices: expected a non-empty array")
    if not isinstance(edges, list):
        raise ParseError("edges: expected an array")
    vs = []
    for i, item in enumerate(vertices):
        if not isinstance(item, dict):
            raise ParseError(f"vertices[{i}]: expected an object")
        g = item.get("genus")
        legs = item.get("legs", [])
        if not isinstance(g, int) or g < 0:
            raise ParseError(f"vertices[{i}].genus: expected a nonnegative integer")
        if not isinstance(legs, list) or not all(isinstance(x, int) for x in legs):
            raise ParseError(f"vertices[{i}].legs: expected an array of integers")
        vs.append(graphs.Vertex(g, tuple(legs)))
    es = []
    for k, item in enumerate(edges):
        if not isinstance(item, dict):
            raise ParseError(f"edges[{k}]: expected an object")
        tail = item.get("tail")
        head = item.get("head")
        stab = item.get("stabilizer", 1)
        for field, value in (("tail", tail), ("head", head), ("stabilizer", stab)):
            if not isinstance(value, int):
                raise ParseError(f"edges[{k}].{field}: expected an integer")
        es.append(graphs.Edge(tail, head, stab))
    return graphs.DualGraph(tuple(vs), tuple(es))


def parse_graph(path: str) -> graphs.DualGraph:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_graph_data(data)


def emit_graph(G: graphs.DualGraph) -> dict:
    return {
        "vertices": [{"genus": v.genus, "legs": list(v.legs)} for v in G.vertices],
        "edges": [
            {"tail": e.tail, "head": e.head, "stabilizer": e.stabilizer}
            for e in G.edges
        ],
    }


def parse_bundle_spec(spec: str, G: graphs.DualGraph) -> picard.LineBundleData:
    """Builder string omega:k=K[,h=ID:VAL,...]."""
    head, _, rest = spec.partition(":")
    if head != "omega":
        raise ParseError(f"unknown bundle builder {head!r}")
    k = 1
    weights = {}
    if rest:
        for piece in rest.split(","):
            key, _, value = piece.partition("=")
            if key == "k":
                k = int(value)
            elif key == "h":
                leg, _, val = value.partition(":")
                weights[int(leg)] = int(val)
            else:
                raise ParseError(f"unknown bundle field {key!r}")
    return picard.omega_bundle(G, k, weights)


def parse_bundle_file(path: str, G: graphs.DualGraph) -> picard.LineBundleData:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "int_part" not in data or "mult" not in data:
        raise ParseError(f"{path}: expected an object with int_part and mult")
    return picard.line_bundle(G, data["int_part"], data["mult"])


def load_bundle(args, G: graphs.DualGraph) -> picard.LineBundleData:
    if getattr(args, "bundle_file", None):
        return parse_bundle_file(args.bundle_file, G)
    return parse_bundle_spec(getattr(args, "bundle", None) or "omega:k=1", G)


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, separators=(",", ":")))
    else:
        keys = list(payload)
        print("\t".join(keys))
        print("\t".join(_tsv_cell(payload[k]) for k in keys))


def _tsv_cell(value) -> str:
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value)
    return str(value)


def _json_safe(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    return value


def _add_common(parser, suppress: bool) -> None:
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--format", choices=("json", "tsv"), default=default("json"))
    parser.add_argument(
        "--max-domain",
        type=int,
        default=default(int(os.environ.get("TC_MAX_DOMAIN", picard.DEFAULT_MAX_DOMAIN))),
    )
    parser.add_argument(
        "--max-vertices", type=int, default=default(graphs.MAX_ENUMERATION_VERTICES)
    )
    parser.add_argument("--seed", type=int, default=default(0))
    parser.add_argument("--jobs", type=int, default=default(1))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tc",
        description="Exact computations on dual graphs of twisted nodal curves.",
    )
    _add_common(parser, suppress=False)
    # The same flags are accepted after the subcommand; SUPPRESS keeps the
    # subparser from clobbering values parsed before it.
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("genus", parents=[common], help="arithmetic genus of a graph")
    p.add_argument("graph")

    p = sub.add_parser("classify", parents=[common], help="node type of an edge")
    p.add_argument("graph")
    p.add_argument("-e", "--edge", type=int, required=True)

    p = sub.add_parser("torsion", parents=[common], help="number of r-torsion classes")
    p.add_argument("graph")
    p.add_argument("-r", type=int, required=True)

    p = sub.add_parser("roots", parents=[common], help="number of r-th roots of a bundle")
    p.add_argument("graph")
    p.add_argument("-r", type=int, required=True)
    p.add_argument("--bundle")
    p.add_argument("--bundle-file")

    p = sub.add_parser(
        "criterion", parents=[common], help="edge criterion for the maximal root count"
    )
    p.add_argument("graph")
    p.add_argument("-r", type=int, required=True)
    p.add_argument("--bundle")
    p.add_argument("--bundle-file")

    p = sub.add_parser(
        "lift", parents=[common], help="membership and lift through the boundary map"
    )
    p.add_argument("graph")
    p.add_argument("-r", type=int, required=True)
    p.add_argument("-t", "--target", required=True, help="comma-separated residues, one per vertex")

    p = sub.add_parser("orbits", parents=[common], help="ghost orbits on root classes")
    p.add_argument("graph")
    p.add_argument("-r", type=int, required=True)
    p.add_argument("--bundle")
    p.add_argument("--bundle-file")
    p.add_argument("--involution", action="store_true")
    p.add_argument("--nontrivial", action="store_true")

    p = sub.add_parser(
        "enumerate", parents=[common], help="stable decorated graphs up to isomorphism"
    )
    p.add_argument("-g", type=int, required=True)
    p.add_argument("-n", "--legs", type=int, default=0)
    p.add_argument("--stabilizers", default="1", help="comma-separated choices")
    p.add_argument("--list", action="store_true", help="include the graphs, not just the count")

    p = sub.add_parser(
        "verify-rootsnum",
        parents=[common],
        help="criterion vs counted roots over a family",
    )
    p.add_argument("-g", type=int, required=True)
    p.add_argument("--stabilizers", default="1,2,3,4,6")
    p.add_argument("-r", "--orders", default="2,3,4,6")
    p.add_argument("--random-bundles", type=int, default=50)

    p = sub.add_parser(
        "verify-cond", parents=[common], help="stability-profile equivalence sweep"
    )
    p.add_argument("-g", type=int, required=True)
    p.add_argument("-r", type=int, required=True)
    p.add_argument("-l", "--profile", required=True, help="comma-separated multiindex")
    p.add_argument("-k", type=int, default=1)

    p = sub.add_parser(
        "nr", parents=[common], help="profile of the nontrivial genus-1 spin cover"
    )
    p.add_argument("-r", type=int, required=True)

    p = sub.add_parser(
        "ratio", parents=[common], help="automorphism order ratio r^m / prod(d_i)"
    )
    p.add_argument("-r", type=int, required=True)
    p.add_argument("-d", "--stabilizers", default="", help="comma-separated d_i")

    return parser


def _csv_ints(text: str) -> list[int]:
    if not text:
        return []
    return [int(piece) for piece in text.split(",")]


def run(args) -> dict:
    if args.command == "genus":
        G = parse_graph(args.graph)
        return {"genus": graphs.genus(G)}
    if args.command == "classify":
        G = parse_graph(args.graph)
        node = graphs.classify_node(G, args.edge)
        out = {"separating": node.separating, "type": node.index}
        if node.separating:
            out["plus_vertices"] = sorted(node.plus_vertices)
            out["minus_vertices"] = sorted(node.minus_vertices)
        return out
    if args.command == "torsion":
        G = parse_graph(args.graph)
        return {"torsion_count": picard.torsion_count(G, args.r)}
    if args.command == "roots":
        G = parse_graph(args.graph)
        F = load_bundle(args, G)
        return {"count": picard.count_roots(G, F, args.r, args.max_domain)}
    if args.command == "criterion":
        G = parse_graph(args.graph)
        F = load_bundle(args, G)
        passed, witnesses = picard.root_count_criterion(G, F, args.r)
        return {
            "criterion": passed,
            "witnesses": [
                {"edge": e, "condition": what, "value": _json_safe(v)}
                for e, what, v in witnesses
            ],
        }
    if args.command == "lift":
        G = parse_graph(args.graph)
        t = _csv_ints(args.target)
        member = picard.delta_image_member(G, args.r, t)
        lift = picard.delta_image_lift(G, args.r, t) if member else None
        return {"member": member, "lift": list(lift) if lift is not None else None}
    if args.command == "orbits":
        G = parse_graph(args.graph)
        F = load_bundle(args, G)
        classes = orbits.enumerate_root_classes(G, F, args.r, args.max_domain)
        if args.nontrivial:
            classes = [c for c in classes if any(c.mult) or any(c.gluing)]
        n, parts = orbits.orbit_count(
            G, F, args.r, with_involution=args.involution, classes=classes
        )
        return {
            "classes": len(classes),
            "orbits": n,
            "sizes": sorted((len(p) for p in parts), reverse=True),
        }
    if args.command == "enumerate":
        found = graphs.enumerate_stable_graphs(
            args.g,
            args.legs,
            _csv_ints(args.stabilizers),
            max_vertices=args.max_vertices,
        )
        out = {"count": len(found)}
        if args.list:
            out["graphs"] = [emit_graph(G) for G in found]
        return out
    if args.command == "verify-rootsnum":
        family = graphs.enumerate_stable_graphs(
            args.g, 0, _csv_ints(args.stabilizers), max_vertices=args.max_vertices
        )
        discrepancies, checked = picard.verify_rootsnum(
            family,
            _csv_ints(args.orders),
            n_random=args.random_bundles,
            seed=args.seed,
            max_domain=args.max_domain,
            jobs=args.jobs,
        )
        return {
            "graphs": len(family),
            "checked": checked,
            "discrepancies": [
                {
                    "graph": emit_graph(rec.graph),
                    "r": rec.r,
                    "criterion": rec.criterion,
                    "count": rec.count,
                    "expected": rec.expected,
                }
                for rec in discrepancies
            ],
        }
    if args.command == "verify-cond":
        report = orbits.verify_cond(
            args.g,
            args.r,
            graphs.MultiIndex.of(_csv_ints(args.profile)),
            args.k,
            max_domain=args.max_domain,
        )
        return {
            "equivalent": report.equivalent,
            "condition": report.condition,
            "all_maximal": report.all_maximal,
            "hypothesis_ok": report.hypothesis_ok,
            "witnesses": [
                {"graph": emit_graph(G), "count": n} for G, n in report.witnesses
            ],
        }
    if args.command == "nr":
        rep = orbits.nr_report(args.r)
        return {
            "degree": rep.degree,
            "j1728": rep.n_j1728,
            "j0": rep.n_j0,
            "cusp": rep.n_cusp,
            "chi": rep.euler,
            "genus": rep.genus_nr,
        }
    if args.command == "ratio":
        value = orbits.aut_order_ratio(args.r, _csv_ints(args.stabilizers))
        return {
            "ratio": str(value),
            "numerator": value.numerator,
            "denominator": value.denominator,
        }
    raise AssertionError(f"unhandled command {args.command}")


DOMAIN_ERRORS = (
    ParseError,
    graphs.GraphError,
    exactalg.AlgebraError,
    picard.PicardError,
    orbits.OrbitError,
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = run(args)
    except DOMAIN_ERRORS as exc:
        print(f"tc: error: {exc}", file=sys.stderr)
        return 1
    _emit(_json_safe(payload), args.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
