"""Command line interface: ``siltlab <command> [options]``.

Exit codes: 0 success, 2 truncated or undecided, 1 failure or error.
JSON and DOT output are deterministic for fixed options; text output is not
meant to be parsed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .algebra import Algebra, corpus_algebra, corpus_names, load_algebra
from .complexes import ProjComplex, complex_registry, direct_sum, stalk
from .errors import SiltlabError, TheoremViolation, Truncated
from .modules import indec_injective, indec_projective
from .poset import explore, mgs_search, to_dot, to_json
from .reduction import build_context, verify_square
from .silting import basic_ids, bongartz, co_bongartz, describe, mutate, regular, regular_shift
from .verify import SUITES, Bounds, overall, run_suites

EXIT_OK, EXIT_ERROR, EXIT_TRUNCATED = 0, 1, 2


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _common(p: argparse.ArgumentParser, algebra_required: bool = True):
    p.add_argument("--algebra", required=algebra_required,
                   help="algebra file, or the name of a bundled corpus algebra")
    p.add_argument("--prime", type=int, default=None, help="override the field characteristic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-nodes", type=_positive, default=64)
    p.add_argument("--max-depth", type=_positive, default=10)
    p.add_argument("--dim-bound", type=_positive, default=6)
    p.add_argument("--format", choices=("text", "json", "dot"), default="text")
    p.add_argument("--out", default=None, help="write output here instead of stdout")


def _object_args(p: argparse.ArgumentParser):
    p.add_argument("--projectives", default="", help="comma separated vertices v: adds the stalk P_v in degree 0")
    p.add_argument("--shifted", default="", help="comma separated vertices v: adds P_v[1]")
    p.add_argument("--object", default=None,
                   help="JSON file with a list of complexes (or {'complexes': {...}} as emitted by enumerate)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="siltlab", description="Two-term silting theory over bound quiver algebras")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("check", help="dimension, radical data, projectives and injectives"))
    _common(sub.add_parser("enumerate", help="all two-term silting objects with their support tau-tilting pairs"))
    p = sub.add_parser("mutate", help="apply irreducible mutations along a path of summand indices")
    _common(p)
    p.add_argument("--start", choices=("top", "bottom"), default="top", help="start at A or at A[1]")
    p.add_argument("--path", default="", help="comma separated summand positions")
    p = sub.add_parser("complete", help="Bongartz or co-Bongartz completion of a presilting object")
    _common(p)
    _object_args(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--bongartz", action="store_true")
    g.add_argument("--co-bongartz", action="store_true")
    p = sub.add_parser("reduce", help="the reduced algebra B of a presilting object and the reduction square")
    _common(p)
    _object_args(p)
    _common(sub.add_parser("hasse", help="the exchange graph (Hasse quiver)"))
    _common(sub.add_parser("mgs", help="maximal green sequences (max length --max-depth)"))
    p = sub.add_parser("verify", help="run verification suites; without --algebra the whole corpus")
    _common(p, algebra_required=False)
    p.add_argument("--suite", default="all", choices=SUITES + ("all",))
    return ap


def _load(name: str, prime: int | None, seed: int) -> Algebra:
    path = Path(name)
    if path.is_file():
        alg = load_algebra(path, prime)
    elif name in corpus_names():
        alg = corpus_algebra(name, prime)
    else:
        raise SiltlabError(f"no algebra file or corpus entry named {name!r}")
    alg.seed = seed
    return alg


def _bounds(args) -> Bounds:
    return Bounds(max_nodes=args.max_nodes, max_depth=args.max_depth, dim_bound=args.dim_bound)


def _vertex_list(alg: Algebra, text: str) -> list[int]:
    out = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if tok not in alg.vertices:
            raise SiltlabError(f"unknown vertex {tok!r}")
        out.append(alg.vertices.index(tok))
    return out


def _object(alg: Algebra, args) -> tuple[int, ...]:
    parts: list[ProjComplex] = []
    parts += [stalk(alg, [v], 0) for v in _vertex_list(alg, args.projectives)]
    parts += [stalk(alg, [v], -1) for v in _vertex_list(alg, args.shifted)]
    if args.object:
        data = json.loads(Path(args.object).read_text())
        if isinstance(data, dict):
            data = list(data.get("complexes", {}).values())
        parts += [ProjComplex.from_json(alg, c) for c in data]
    if not parts:
        return ()
    return basic_ids(alg, direct_sum(*parts))


def _emit(args, payload, text: str, dot: str | None = None):
    if args.format == "json":
        out = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    elif args.format == "dot":
        if dot is None:
            raise SiltlabError("DOT output is only available for hasse")
        out = dot
    else:
        out = text if text.endswith("\n") else text + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


# ---------------------------------------------------------------- commands


def cmd_check(args) -> int:
    alg = _load(args.algebra, args.prime, args.seed)
    proj = [list(indec_projective(alg, v).dims) for v in range(alg.n)]
    inj = [list(indec_injective(alg, v).dims) for v in range(alg.n)]
    payload = {
        "algebra": alg.name, "prime": alg.p, "dim": alg.dim, "vertices": alg.n, "basis": list(alg.labels),
        "loewy_length": alg.loewy_length(), "radical_power_dims": alg.radical_power_dims(),
        "projectives": proj, "injectives": inj,
    }
    lines = [f"dim {alg.dim}, |A| = {alg.n}", f"basis: {' '.join(alg.labels)}",
             f"radical nilpotency index: {alg.loewy_length()}"]
    lines += [f"P_{alg.vertices[v]} dims {tuple(d)}" for v, d in enumerate(proj)]
    lines += [f"I_{alg.vertices[v]} dims {tuple(d)}" for v, d in enumerate(inj)]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    alg = _load(args.algebra, args.prime, args.seed)
    h = explore(alg, max_nodes=args.max_nodes)
    objs = [describe(alg, T) for T in h.vertices]
    payload = {"algebra": alg.name, "prime": alg.p, "truncated": h.truncated, "count": len(objs), "objects": objs}
    lines = [f"{len(objs)} two-term silting objects" + (" (truncated)" if h.truncated else "")]
    for o in objs:
        st = o.get("stau", {})
        lines.append(f"  {o['summands']}  M={st.get('module_summands')}  P={st.get('proj_part')}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_TRUNCATED if h.truncated else EXIT_OK


def cmd_mutate(args) -> int:
    alg = _load(args.algebra, args.prime, args.seed)
    T = regular(alg) if args.start == "top" else regular_shift(alg)
    steps = [describe(alg, T)]
    lines = [f"start {list(T)}"]
    for tok in filter(None, (t.strip() for t in args.path.split(","))):
        i = int(tok)
        if not 0 <= i < len(T):
            raise SiltlabError(f"summand position {i} out of range")
        m = mutate(alg, T, i)
        T = m.result
        steps.append(dict(describe(alg, T), direction=m.direction, exchanged=m.exchanged, new_summand=m.new_summand))
        lines.append(f"{m.direction} at {m.exchanged} -> {list(T)}")
    _emit(args, {"algebra": alg.name, "steps": steps}, "\n".join(lines))
    return EXIT_OK


def cmd_complete(args) -> int:
    alg = _load(args.algebra, args.prime, args.seed)
    U = _object(alg, args)
    res = co_bongartz(alg, U) if args.co_bongartz else bongartz(alg, U)
    which = "co_bongartz" if args.co_bongartz else "bongartz"
    payload = {"algebra": alg.name, "operation": which, "U": describe(alg, U), "result": describe(alg, res)}
    _emit(args, payload, f"{which}({list(U)}) = {list(res)}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    alg = _load(args.algebra, args.prime, args.seed)
    U = _object(alg, args)
    ctx = build_context(alg, U)
    h = explore(alg, ctx.N, max_nodes=args.max_nodes, interval=(ctx.M, ctx.N))
    B = ctx.B
    payload = {
        "algebra": alg.name, "U": describe(alg, U), "bongartz": list(ctx.N), "co_bongartz": list(ctx.M),
        "B": {"dim": B.dim, "vertices": B.n, "arrows": [[lab, s, t] for lab, s, t in B.arrows],
              "basis": list(B.labels), "mult": B.mult.tolist()},
        "interval_truncated": h.truncated,
    }
    if not h.truncated:
        payload["square"] = verify_square(ctx, h.vertices, args.dim_bound, alg.name).to_json()
    sq = payload.get("square", {})
    text = (f"B: dim {B.dim}, {B.n} vertices; |silt_U| = {len(h.vertices)}; "
            f"bijection={sq.get('bijection')} order_iso={sq.get('order_iso')} square={sq.get('square_commutes')}")
    _emit(args, payload, text)
    if h.truncated or sq.get("truncated"):
        return EXIT_TRUNCATED
    return EXIT_OK if (sq["bijection"] and sq["order_iso"] and sq["square_commutes"]) else EXIT_ERROR


def cmd_hasse(args) -> int:
    alg = _load(args.algebra, args.prime, args.seed)
    h = explore(alg, max_nodes=args.max_nodes)
    text = f"{len(h.vertices)} vertices, {len(h.edges)} edges" + (" (truncated)" if h.truncated else "")
    _emit(args, to_json(h), text, to_dot(h))
    return EXIT_TRUNCATED if h.truncated else EXIT_OK


def cmd_mgs(args) -> int:
    alg = _load(args.algebra, args.prime, args.seed)
    h = explore(alg, max_nodes=args.max_nodes)
    res = mgs_search(alg, max_len=args.max_depth, hasse=h)
    payload = {"algebra": alg.name, "status": res.status, "search_truncated": res.truncated,
               "poset_truncated": h.truncated, "sequences": [q.to_json() for q in res.sequences]}
    text = f"{len(res.sequences)} sequences, lengths {[q.length for q in res.sequences]}, {res.status}"
    _emit(args, payload, text)
    return EXIT_TRUNCATED if (res.truncated or h.truncated) else EXIT_OK


def cmd_verify(args) -> int:
    names = [args.algebra] if args.algebra else corpus_names()
    algs = [_load(n, args.prime, args.seed) for n in names]  # parse everything before any suite runs
    reports = [run_suites(alg, args.suite, _bounds(args)) for alg in algs]
    status = overall(r["status"] for r in reports)
    payload = {"suite": args.suite, "seed": args.seed, "status": status, "reports": reports}
    lines = []
    for r in reports:
        for s in r["suites"]:
            lines.append(f"{r['algebra']:20s} {s['suite']:11s} {s['status'].upper()}")
    lines.append(f"overall: {status.upper()}")
    _emit(args, payload, "\n".join(lines))
    return {"pass": EXIT_OK, "undecided": EXIT_TRUNCATED}.get(status, EXIT_ERROR)


COMMANDS = {
    "check": cmd_check, "enumerate": cmd_enumerate, "mutate": cmd_mutate, "complete": cmd_complete,
    "reduce": cmd_reduce, "hasse": cmd_hasse, "mgs": cmd_mgs, "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except Truncated as exc:
        print(f"truncated: {exc}", file=sys.stderr)
        return EXIT_TRUNCATED
    except (SiltlabError, TheoremViolation, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
