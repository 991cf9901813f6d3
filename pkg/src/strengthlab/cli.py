"""strength-lab command line.

Exit codes: 0 success, 1 internal error, 2 budget exceeded, 3 precondition
failure (bad input included), 4 a verify property failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

from .errors import BudgetExceeded, PreconditionFailed, StrengthLabError
from .field import DEFAULT_ENUMERATION_BUDGET, enumeration_budget, parse_field
from .poly import format_poly, parse_poly

SCHEMA = "strengthlab.report/1"
EXIT_OK, EXIT_INTERNAL, EXIT_BUDGET, EXIT_PRECONDITION, EXIT_PROPERTY = 0, 1, 2, 3, 4


class ArgumentError(PreconditionFailed):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def _blocks(args):
    if args.y is None and args.z is None:
        return None
    blocks = {"x": args.nvars - (args.y or 0) - (args.z or 0), "y": args.y or 0}
    if args.z:
        blocks["z"] = args.z
    if blocks["x"] < 0:
        raise PreconditionFailed("block sizes exceed --nvars")
    return blocks


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _forms(args, ctx, blocks, required=True):
    texts = list(args.form or [])
    if getattr(args, "forms_file", None):
        data = _read_json(args.forms_file)
        texts += data["forms"] if isinstance(data, dict) else list(data)
    if required and not texts:
        raise PreconditionFailed("no forms given (use --form or --forms-file)")
    return [parse_poly(t, ctx, args.nvars, blocks) for t in texts]


def _ideal(args, ctx, blocks):
    texts = list(args.ideal or [])
    if getattr(args, "ideal_file", None):
        data = _read_json(args.ideal_file)
        texts += data["forms"] if isinstance(data, dict) else list(data)
    return [parse_poly(t, ctx, args.nvars, blocks) for t in texts]


def _num(text):
    value = float(text)
    return int(value) if value.is_integer() else value


# -- commands ----------------------------------------------------------------------

def cmd_rank(args):
    from .rank import collection_rank

    ctx = parse_field(args.field)
    blocks = _blocks(args)
    forms = _forms(args, ctx, blocks)
    res = collection_rank(forms, (), args.rmax, args.search_budget)
    return res.to_json(blocks)


def cmd_relrank(args):
    from .rank import collection_rank

    ctx = parse_field(args.field)
    blocks = _blocks(args)
    forms = _forms(args, ctx, blocks)
    gens = _ideal(args, ctx, blocks)
    res = collection_rank(forms, gens, args.rmax, args.search_budget)
    out = res.to_json(blocks)
    out["ideal"] = [format_poly(g, blocks) for g in gens]
    return out


def cmd_prank(args):
    from .multilinear import MultilinearForm, partition_rank

    ctx = parse_field(args.field)
    data = json.loads(args.tensor) if args.tensor else _read_json(args.tensor_file)
    F = MultilinearForm.from_json(data, ctx)
    return partition_rank(F, args.rmax, args.search_budget).to_json()


def cmd_gowers(args):
    from .gowers import bias, bias_rank_experiment, gowers_norm

    ctx = parse_field(args.field)
    if args.samples:
        rows = bias_rank_experiment(args.d, args.nvars, ctx, args.samples, args.rmax, args.seed,
                                    args.budget, args.search_budget)
        return {"rows": [r.to_json() for r in rows]}
    blocks = _blocks(args)
    (f,) = _forms(args, ctx, blocks)[:1]
    res = gowers_norm(f, args.d, budget=args.budget, shards=args.shards)
    out = res.to_json(f)
    b = bias(f, budget=args.budget, shards=args.shards)
    out["bias"] = [b.real, b.imag]
    return out


def cmd_regularize(args):
    from .tower import regularize

    ctx = parse_field(args.field)
    blocks = _blocks(args)
    forms = _forms(args, ctx, blocks)
    tower, trace = regularize(forms, args.A, args.B, args.t, args.rmax, args.search_budget, blocks)
    out = trace.to_json(blocks)
    out["input_forms"] = out.pop("inputs")
    out["within_bound"] = bool(trace.bounds) and tower.size <= trace.bounds[0]
    return out


def _tower_arg(args, ctx):
    from .tower import Tower

    data = _read_json(args.tower_file)
    if "blocks" not in data and "nvars" not in data:
        if args.nvars is None:
            raise PreconditionFailed("tower file has no nvars or blocks; pass --nvars")
        data = {**data, "nvars": args.nvars}
    return Tower.from_json(data, ctx)


def cmd_regcheck(args):
    from .tower import check_regularity

    ctx = parse_field(args.field)
    tower = _tower_arg(args, ctx)
    return check_regularity(tower, args.A, args.B, args.t, args.rmax, args.search_budget).to_json()


def cmd_singloc(args):
    from .variety import Locus, codim_estimate, singular_locus, singular_locus_y

    ctx = parse_field(args.field)
    blocks = _blocks(args)
    forms = _forms(args, ctx, blocks)
    within = _ideal(args, ctx, blocks)
    if args.y_only:
        if not blocks or not blocks.get("y"):
            raise PreconditionFailed("--y-only needs a y block (--y)")
        start = blocks["x"]
        locus = singular_locus_y(forms, (start, start + blocks["y"]), within)
    else:
        locus = singular_locus(forms, within)
    ambient = Locus(ctx, args.nvars, within) if within else None
    est = codim_estimate(locus, ambient, args.K, args.budget, args.shards)
    out = est.to_json()
    out["empirical"] = True
    return out


def cmd_rtcheck(args):
    from .variety import rt_check

    ctx = parse_field(args.field)
    blocks = _blocks(args)
    forms = _forms(args, ctx, blocks, required=False)
    return rt_check(forms, args.t, args.K, args.budget, args.reading, args.shards).to_json()


def cmd_towers(args):
    from .multilinear import coefficient_tower, tilde_tower
    from .tower import d_tower, dl_specialize, dl_tower, tz_tower

    ctx = parse_field(args.field)
    tower = _tower_arg(args, ctx)
    kind = args.kind
    if kind == "tz":
        return {"kind": kind, "tower": tz_tower(tower).to_json()}
    if kind == "d":
        return {"kind": kind, "tower": d_tower(tower).to_json()}
    if kind == "dl":
        return {"kind": kind, "l": args.l, "tower": dl_tower(tower, args.l).to_json()}
    if kind == "dlw":
        ws = json.loads(args.w)
        return {"kind": kind, "w": ws, **dl_specialize(tower, ws).to_json()}
    tilde = tilde_tower(tower)
    if kind == "tilde":
        return {"kind": kind, "tower": _ml_json(tilde)}
    Ns = json.loads(args.Ns) if args.Ns else None
    if Ns is None:
        raise PreconditionFailed("--Ns is required for the coefficient tower")
    N = args.N if args.N is not None else Ns[0]
    return {"kind": kind, "N": N, "Ns": Ns, "tower": _ml_json(coefficient_tower(tilde, N, Ns))}


def _ml_json(tower) -> dict:
    return {
        "dims": list(tower.dims),
        "layers": [[{"slots": list(I), "form": f.to_json()} for f, I in layer] for layer in tower.layers],
    }


def cmd_verify(args):
    from .verify import Config, run_suite

    cfg = Config(seed=args.seed, r_max=args.rmax_verify, shards=args.shards, budget=args.search_budget)
    return run_suite(args.suite, cfg)


def cmd_generate(args):
    from .instances import generate_instances

    params = {}
    if args.params:
        params.update(json.loads(args.params))
    for item in args.param or []:
        key, _, value = item.partition("=")
        params[key] = json.loads(value) if value[:1] in "[{" else value
    specs = generate_instances(args.family, params, args.seed)
    return {"rows": [s.to_json() for s in specs]}


COMMANDS = {
    "rank": cmd_rank,
    "relrank": cmd_relrank,
    "prank": cmd_prank,
    "gowers": cmd_gowers,
    "regularize": cmd_regularize,
    "regcheck": cmd_regcheck,
    "singloc": cmd_singloc,
    "rtcheck": cmd_rtcheck,
    "towers": cmd_towers,
    "verify": cmd_verify,
    "generate": cmd_generate,
}


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--shards", type=int, default=1, help="split enumerations into this many ranges")
    common.add_argument("--budget", type=int, default=None,
                        help=f"enumeration budget (default ${{STRENGTHLAB_BUDGET}} or {DEFAULT_ENUMERATION_BUDGET})")
    common.add_argument("--search-budget", type=int, default=None, help="rank-search candidate budget")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing (not deterministic)")

    ring = _Parser(add_help=False)
    ring.add_argument("--field", default="GF(2)")
    ring.add_argument("--nvars", type=int, default=None)
    ring.add_argument("--y", type=int, default=None, help="size of the y block (last variables before z)")
    ring.add_argument("--z", type=int, default=None, help="size of the z block")
    ring.add_argument("--form", action="append", help="a form in the text grammar (repeatable)")
    ring.add_argument("--forms-file", help='JSON list of forms or {"forms": [...]}')

    ideal = _Parser(add_help=False)
    ideal.add_argument("--ideal", action="append", help="an ideal generator (repeatable)")
    ideal.add_argument("--ideal-file")

    abt = _Parser(add_help=False)
    abt.add_argument("--A", type=_num, default=1)
    abt.add_argument("--B", type=_num, default=1)
    abt.add_argument("--t", type=_num, default=0)

    rmax = _Parser(add_help=False)
    rmax.add_argument("--rmax", type=int, default=4)

    parser = _Parser(prog="strength-lab", description="Exact rank, regularity and uniformity experiments over finite fields.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("rank", parents=[common, ring, rmax], help="Schmidt rank of a form (or collection rank)")
    sub.add_parser("relrank", parents=[common, ring, ideal, rmax], help="rank relative to a homogeneous ideal")
    p = sub.add_parser("prank", parents=[common, rmax], help="partition rank of a multilinear form")
    p.add_argument("--field", default="GF(2)")
    p.add_argument("--tensor", help="MultilinearForm JSON")
    p.add_argument("--tensor-file")
    p = sub.add_parser("gowers", parents=[common, ring, rmax], help="U^d norm of chi o f")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--samples", type=int, default=0, help="run the bias/rank experiment instead")
    p.add_argument("--seed", type=int, default=0)
    sub.add_parser("regularize", parents=[common, ring, abt], help="regularize a collection of forms").add_argument(
        "--rmax", type=int, default=3)
    p = sub.add_parser("regcheck", parents=[common, abt], help="check (A,B,t)-regularity of a tower")
    p.add_argument("--field", default="GF(2)")
    p.add_argument("--tower-file", required=True)
    p.add_argument("--nvars", type=int, default=None)
    p.add_argument("--rmax", type=int, default=3)
    p = sub.add_parser("singloc", parents=[common, ring, ideal], help="codimension of a singular locus")
    p.add_argument("--K", type=int, default=None, help="largest extension degree sampled")
    p.add_argument("--y-only", action="store_true", help="rank test on the y-partials only")
    p = sub.add_parser("rtcheck", parents=[common, ring], help="prefix singular-codimension check")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--reading", choices=("current", "previous"), default="current")
    p = sub.add_parser("towers", parents=[common], help="derived towers")
    p.add_argument("--field", default="GF(2)")
    p.add_argument("--tower-file", required=True)
    p.add_argument("--nvars", type=int, default=None)
    p.add_argument("--kind", choices=("tz", "d", "dl", "dlw", "tilde", "coefficient"), required=True)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--w", help="JSON list of base points")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--Ns", help="JSON list N_1 > ... > N_h")
    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--rmax", dest="rmax_verify", type=int, default=None)
    p = sub.add_parser("generate", parents=[common], help="seeded instance generation")
    p.add_argument("--family", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--params", help="JSON object of family parameters")
    p.add_argument("--param", action="append", help="key=value (repeatable)")
    return parser


def _inputs(args) -> dict:
    # shards only split work; echoing them would break cross-shard byte identity
    skip = {"command", "out", "format", "timing", "shards"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        if key == "rmax_verify":
            key = "rmax"
        out[key] = value
    out["budget"] = enumeration_budget(args.budget)
    return out


def _to_csv(payload: dict) -> str:
    buf = io.StringIO()
    rows = payload.get("rows")
    if rows is None and "results" in payload:
        rows = payload["results"]
    if rows is None:
        rows = [{k: v for k, v in payload.items() if k not in ("schema", "inputs")}]
    keys = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: v if isinstance(v, (str, int, float, bool)) or v is None
                         else json.dumps(v, sort_keys=True) for k, v in row.items()})
    return buf.getvalue()


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _emit(text: str, args):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ArgumentError as exc:
        print(f"strength-lab: error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if getattr(args, "nvars", 1) is None:
        if args.command in ("gowers",) and getattr(args, "samples", 0):
            print("strength-lab: error: --nvars is required", file=sys.stderr)
            return EXIT_PRECONDITION
        if args.command not in ("prank", "regcheck", "towers", "verify", "generate"):
            print("strength-lab: error: --nvars is required", file=sys.stderr)
            return EXIT_PRECONDITION
    start = time.perf_counter()
    try:
        payload = COMMANDS[args.command](args)
        code = EXIT_OK
        if args.command == "verify" and not payload["pass"]:
            code = EXIT_PROPERTY
    except BudgetExceeded as exc:
        print(f"strength-lab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (PreconditionFailed, KeyError, ValueError, OSError) as exc:
        print(f"strength-lab: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except StrengthLabError as exc:
        print(f"strength-lab: error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except Exception as exc:  # noqa: BLE001
        print(f"strength-lab: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    clash = {"schema", "command", "inputs"} & payload.keys()
    if clash:
        raise AssertionError(f"payload shadows report keys {sorted(clash)}")
    report = {"schema": SCHEMA, "command": args.command, "inputs": _inputs(args), **payload}
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 6)
    report = _clean(report)
    if args.format == "csv":
        _emit(_to_csv(report), args)
    else:
        _emit(json.dumps(report, sort_keys=False, indent=2) + "\n", args)
    return code


if __name__ == "__main__":
    sys.exit(main())
