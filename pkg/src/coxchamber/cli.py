"""Command-line front end: ``coxchamber <subcommand> ...``.

Output is deterministic JSON (sorted keys) unless another ``--format`` is
chosen.  Validation errors exit with status 1 and computation failures
(budgets, non-discrete input, unstable domains) with status 2; in both cases
a JSON error object is written to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .chamber import (
    Equipment,
    FacePoset,
    cube_poset,
    interval_poset,
    labels_from_list,
    natural_equipment,
    simplex_poset,
    universal_equipment,
    validate_equipment,
)
from .classify import classify_system, finite_group_order
from .core import CoxeterMatrix, dumps, parse_coxeter_matrix
from .flatmodel import (
    SCENARIOS,
    TORUS_SCENES,
    Scenario,
    dirichlet_domain,
    dirichlet_svg,
    dissecting_check,
    poincare_neighbor_check,
    relation_check,
    same_isometry,
    scene_svg,
    su_torus_data,
)
from .geomrep import bourbaki_property_check, enumerate_group
from .simplex import enumerate_simplex_equipments, records_to_csv
from .vinberg import build_universal_space, check_manifold_and_action, euler_characteristic

OUT_DIR_ENV = "COXCHAMBER_OUT_DIR"


class ComputationError(Exception):
    pass


# --- input helpers ---------------------------------------------------------------

def _read_matrix(arg: str) -> CoxeterMatrix:
    path = Path(arg)
    if path.is_file():
        text = path.read_text()
        stripped = text.lstrip()
        if stripped.startswith("{") or stripped.startswith("["):
            return CoxeterMatrix.from_json(json.loads(text))
        return parse_coxeter_matrix(text)
    return parse_coxeter_matrix(arg)


def _read_poset(arg: str) -> FacePoset:
    if arg == "interval":
        return interval_poset()
    kind, _, n = arg.partition(":")
    if kind in ("simplex", "cube") and n:
        if not n.isdigit():
            raise ValueError(f"bad poset dimension {n!r}")
        return simplex_poset(int(n)) if kind == "simplex" else cube_poset(int(n))
    path = Path(arg)
    if not path.is_file():
        raise ValueError(f"unknown poset {arg!r}; use simplex:N, cube:K, interval or a JSON file")
    return FacePoset.from_json(json.loads(path.read_text()))


def _parse_labels(text: str):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok.isdigit():
            raise ValueError(f"angle label {tok!r} is not a positive integer")
        out.append(int(tok))
    return out


def _read_scenario(arg: str) -> Scenario:
    if arg in SCENARIOS:
        return SCENARIOS[arg]
    path = Path(arg)
    if not path.is_file():
        raise ValueError(f"unknown scenario {arg!r}; named ones are {sorted(SCENARIOS)}")
    return Scenario.from_json(json.loads(path.read_text()))


def _parse_point(text: str):
    return tuple(float(x) for x in text.split(","))


# --- subcommands -------------------------------------------------------------------

def cmd_classify(args):
    report = classify_system(_read_matrix(args.matrix))
    if args.format == "text":
        names = " x ".join(lab.name for lab in report.labels)
        order = "" if report.order is None else f" order {report.order}"
        return f"{report.verdict} {names}{order}\n"
    return report.to_json()


def cmd_order(args):
    matrix = _read_matrix(args.matrix)
    report = classify_system(matrix)
    if report.verdict != "finite":
        out = {"finite": False, "order": None, "verdict": report.verdict}
    else:
        out = {"finite": True, "order": str(finite_group_order(matrix)), "verdict": "finite"}
    if args.format == "text":
        return f"{out['order'] if out['finite'] else 'inf'}\n"
    return out


def cmd_enumerate_group(args):
    matrix = _read_matrix(args.matrix)
    graph = enumerate_group(matrix, budget=args.budget, max_len=args.radius)
    if not graph.complete and args.radius is None:
        raise ComputationError(f"enumeration exceeded budget {args.budget}; pass --radius for a ball")
    if args.format == "dot":
        return graph.to_dot()
    return graph.to_json()


def cmd_check_bourbaki(args):
    graph = enumerate_group(_read_matrix(args.matrix), budget=args.budget)
    if not graph.complete:
        raise ComputationError(f"enumeration exceeded budget {args.budget}")
    rep = bourbaki_property_check(graph)
    return {
        "order": len(graph),
        "passed": rep.passed,
        "intersection": rep.intersection_ok,
        "partition": rep.partition_ok,
        "exchange": rep.exchange_ok,
        "witnesses": {k: v[:20] for k, v in rep.witnesses.items()},
    }


def _equipment(args, poset) -> Equipment:
    if args.matrix:
        matrix = _read_matrix(args.matrix)
        if args.wall_map:
            eq = Equipment(matrix, tuple(int(x) for x in args.wall_map.split(",")))
        else:
            eq = natural_equipment(poset, matrix)
        rep = validate_equipment(poset, eq)
        if not rep.ok:
            raise ValueError("invalid equipment: " + "; ".join(rep.errors))
        return eq
    if not args.labels:
        raise ValueError("give --labels or --matrix")
    return universal_equipment(poset, labels_from_list(poset, _parse_labels(args.labels)))


def cmd_equip(args):
    poset = _read_poset(args.poset)
    eq = universal_equipment(poset, labels_from_list(poset, _parse_labels(args.labels)))
    if args.format == "dot":
        return eq.matrix.diagram().to_dot()
    return {
        "poset": poset.to_json(),
        "equipment": eq.to_json(),
        "classification": classify_system(eq.matrix).to_json(),
    }


def cmd_build_universal(args):
    poset = _read_poset(args.poset)
    eq = _equipment(args, poset)
    cx = build_universal_space(poset, eq, ball_radius=args.radius, budget=args.budget)
    if args.format == "dot":
        return cx.to_dot()
    rep = check_manifold_and_action(cx)
    return {
        "complex": cx.to_json(),
        "report": rep.to_json(),
        "euler_characteristic": None if cx.truncated else euler_characteristic(cx),
        "equipment": eq.to_json(),
    }


def cmd_enumerate_simplex(args):
    records = enumerate_simplex_equipments(args.n, args.m_max, args.allow_infinity)
    total = len(records)
    records = records[args.offset:]
    if args.limit is not None:
        records = records[: args.limit]
    if args.format == "csv":
        return records_to_csv(records)
    if args.format == "dot":
        return "".join(r.matrix.diagram().to_dot(name=f"simplex{k}")
                       for k, r in enumerate(records, start=args.offset))
    return {"n": args.n, "m_max": args.m_max, "total": total, "offset": args.offset,
            "records": [r.to_json() for r in records]}


def cmd_dirichlet(args):
    sc = _read_scenario(args.scenario)
    ball = sc.ball(args.radius)
    x0 = _parse_point(args.base_point) if args.base_point else sc.base_point
    dom = dirichlet_domain(ball, x0)
    if args.format == "svg":
        return dirichlet_svg(dom, ball)
    out = dom.to_json()
    out["neighbor_words"] = [list(ball.words[g]) for g in dom.neighbors()]
    out["scenario"] = sc.to_json()
    return out


def cmd_poincare(args):
    sc = _read_scenario(args.scenario)
    ball = sc.ball(args.radius)
    x0 = _parse_point(args.base_point) if args.base_point else sc.base_point
    rep = poincare_neighbor_check(ball, x0)
    return dict(rep.to_json(ball), ball_size=len(ball), radius=ball.radius)


def cmd_torus_demo(args):
    scene = TORUS_SCENES[args.scene]()
    if args.format == "svg":
        return scene_svg(scene)
    out = scene.to_json()
    out["dissecting"] = [dissecting_check(scene, k).to_json() for k in range(len(scene.mirrors))]
    k = len(scene.mirrors)
    if k == 4:
        out["relations"] = {
            "(s1 s3)^2": relation_check(scene, [0, 2, 0, 2]).identity,
            "(s2 s4)^2": relation_check(scene, [1, 3, 1, 3]).identity,
        }
        out["coincidences"] = {"s1 = s3": same_isometry(scene, 0, 2),
                               "s2 = s4": same_isometry(scene, 1, 3)}
    return out


def cmd_su_lattices(args):
    if args.n < 2:
        raise ValueError("--n must be >= 2")
    return {"lattices": [su_torus_data(n).to_json() for n in range(2, args.n + 1)]}


# --- parser ------------------------------------------------------------------------

def _add_out(p, formats, default="json"):
    p.add_argument("--format", choices=formats, default=default, help="output format")
    p.add_argument("--out", help=f"write output to a file (relative to ${OUT_DIR_ENV} if set)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coxchamber", description="Coxeter groups on chambers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    mhelp = 'Coxeter matrix as text ("1 3; 3 1", 0 = inf) or a path to a text/JSON file'

    p = sub.add_parser("classify", help="classify a Coxeter system")
    p.add_argument("matrix", help=mhelp)
    _add_out(p, ["json", "text"])
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("order", help="order of a Coxeter group")
    p.add_argument("matrix", help=mhelp)
    _add_out(p, ["json", "text"])
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("enumerate-group", help="enumerate group elements as a chamber graph")
    p.add_argument("matrix", help=mhelp)
    p.add_argument("--budget", type=int, default=100_000, help="maximum number of elements")
    p.add_argument("--radius", type=int, help="word-length radius (ball of an infinite group)")
    _add_out(p, ["json", "dot"])
    p.set_defaults(func=cmd_enumerate_group)

    p = sub.add_parser("check-bourbaki", help="check the three descent-set properties")
    p.add_argument("matrix", help=mhelp)
    p.add_argument("--budget", type=int, default=100_000, help="maximum number of elements")
    _add_out(p, ["json"])
    p.set_defaults(func=cmd_check_bourbaki)

    phelp = "face poset: simplex:N, cube:K, interval, or a JSON file"
    p = sub.add_parser("equip", help="universal equipment from angle labels")
    p.add_argument("poset", help=phelp)
    p.add_argument("--labels", required=True,
                   help="comma-separated angle labels for codimension-2 faces in poset order "
                        "(a single value applies to all)")
    _add_out(p, ["json", "dot"])
    p.set_defaults(func=cmd_equip)

    p = sub.add_parser("build-universal", help="build U(G, C) and run the manifold checks")
    p.add_argument("poset", help=phelp)
    p.add_argument("--labels", help="angle labels (universal equipment)")
    p.add_argument("--matrix", help="Coxeter matrix of an explicit equipment")
    p.add_argument("--wall-map", help="comma-separated generator for each wall (default: identity)")
    p.add_argument("--radius", type=int, help="ball radius for infinite groups")
    p.add_argument("--budget", type=int, default=200_000, help="maximum number of group elements")
    _add_out(p, ["json", "dot"])
    p.set_defaults(func=cmd_build_universal)

    p = sub.add_parser("enumerate-simplex", help="Coxeter equipments of the n-simplex")
    p.add_argument("--n", type=int, required=True, help="simplex dimension")
    p.add_argument("--m-max", type=int, default=6, help="largest finite label")
    p.add_argument("--allow-infinity", action=argparse.BooleanOptionalAction, default=None,
                   help="allow inf labels (default: only for n = 1)")
    p.add_argument("--offset", type=int, default=0, help="skip this many records")
    p.add_argument("--limit", type=int, help="emit at most this many records")
    _add_out(p, ["json", "csv", "dot"])
    p.set_defaults(func=cmd_enumerate_simplex)

    shelp = f"scenario name ({', '.join(sorted(SCENARIOS))}) or a JSON file"
    p = sub.add_parser("dirichlet", help="Dirichlet domain of a base point")
    p.add_argument("scenario", help=shelp)
    p.add_argument("--radius", type=int, help="ball radius (default from the scenario)")
    p.add_argument("--base-point", help="comma-separated coordinates")
    _add_out(p, ["json", "svg"])
    p.set_defaults(func=cmd_dirichlet)

    p = sub.add_parser("poincare", help="regenerate a ball from Dirichlet neighbors")
    p.add_argument("scenario", help=shelp)
    p.add_argument("--radius", type=int, help="ball radius (default from the scenario)")
    p.add_argument("--base-point", help="comma-separated coordinates")
    _add_out(p, ["json"])
    p.set_defaults(func=cmd_poincare)

    p = sub.add_parser("torus-demo", help="chambers, action and dissecting tests of a torus scene")
    p.add_argument("scene", choices=sorted(TORUS_SCENES))
    _add_out(p, ["json", "svg"])
    p.set_defaults(func=cmd_torus_demo)

    p = sub.add_parser("su-lattices", help="root and weight lattices of SU(2..n)")
    p.add_argument("--n", type=int, default=6, help="largest n")
    _add_out(p, ["json"])
    p.set_defaults(func=cmd_su_lattices)
    return parser


def _emit(result, out):
    text = result if isinstance(result, str) else dumps(result) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _fail(exc, code):
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except (ValueError, KeyError) as exc:
        return _fail(exc, 1)
    except (RuntimeError, ComputationError, RecursionError) as exc:
        return _fail(exc, 2)
    _emit(result, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
