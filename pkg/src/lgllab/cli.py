"""lgl-lab command line.

    lgl-lab analyze  "OPERATOR"
    lgl-lab lgl      "OPERATOR" [--genus G] [--verify]
    lgl-lab lgl      "F" --ga N [--genus G] [--verify]
    lgl-lab oracle   "OPERATOR" | --system FILE.json
    lgl-lab fuchsian FILE.json [--verify]
    lgl-lab cohom    FILE.json
    lgl-lab malgrange "F" --place P

Exit codes: 0 success, 1 typed mathematical error, 2 usage or syntax error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import cohom, lgl, local, oracle
from .diffop import DiffOp, DiffSystem, parse_operator, parse_ratfunc
from .errors import LglError
from .ratcore import Place, RatFunc, parse_place, to_rational

SCHEMA_VERSION = "1"


class InputError(LglError):
    exit_code = 2


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Place):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (RatFunc, DiffOp)):
        return str(x)
    return x


def make_report(input_text, case, S, dimension, breakdown, method, agreement=None, warnings=()):
    return {
        "schema_version": SCHEMA_VERSION,
        "input": input_text,
        "case": case,
        "S": [str(p) for p in S],
        "dimension": dimension,
        "breakdown": _jsonable(breakdown),
        "method": method,
        "agreement": agreement,
        "warnings": list(warnings),
    }


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _rational(x):
    if isinstance(x, bool) or isinstance(x, float):
        raise InputError(f"not an exact rational: {x!r}")
    try:
        return to_rational(x)
    except (ValueError, TypeError, ZeroDivisionError):
        raise InputError(f"not an exact rational: {x!r}") from None


def _matrix(rows):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError("matrix must be a list of rows")
    return [[_rational(x) for x in r] for r in rows]


def _oracle_breakdown(rep: oracle.OracleReport) -> dict:
    return {
        "coker_dimension": rep.coker_dimension,
        "coker_basis": [oracle._vec_str(b) for b in rep.coker_basis],
        "obstruction_ranks": {str(p): r for p, r in rep.obstruction_ranks.items()},
        "correction_rank": rep.correction_rank,
        "witnesses": rep.witness_strings(),
        "certificate": rep.certificate,
        "soundness_checked": rep.soundness_checked,
    }


# --------------------------------------------------------------------------
# Verbs


def cmd_analyze(args):
    L = parse_operator(args.operator)
    places = local.analyze(L)
    detail = {}
    for a in places:
        entry = {
            "irregularity": a.irregularity,
            "indicial": a.indicial.to_str("s"),
            "integer_indicial_roots": a.integer_indicial_roots,
        }
        if a.classification is not None:
            entry["classification"] = str(a.classification)
        detail[str(a.place)] = entry
    return make_report(
        args.operator,
        "analysis",
        [a.place for a in places],
        "unknown",
        {"order": L.order, "places": detail},
        "formula",
    )


def _rank1_f(L: DiffOp) -> RatFunc:
    if L.order != 1:
        raise InputError("the rank-one formula needs an operator of order 1; use the oracle verb")
    return -L.coeff(0) / L.leading


def cmd_lgl(args):
    warnings = []
    if args.ga is not None:
        f = parse_ratfunc(args.operator)
        rep = lgl.lgl_ga_nilpotent(f, args.ga, args.genus)
        n = args.ga
        system = [[f if j == i + 1 else RatFunc(0) for j in range(n)] for i in range(n)]
        run_oracle = lambda: oracle.lgl_oracle_system(system)
    else:
        L = parse_operator(args.operator)
        rep = lgl.lgl_rank1(_rank1_f(L), args.genus)
        run_oracle = lambda: oracle.lgl_oracle(L)
    warnings.extend(rep.warnings)
    breakdown = dict(rep.breakdown)
    breakdown["hypothesis_flags"] = rep.hypothesis_flags
    method, agreement = "formula", None
    if rep.evaluator_only:
        warnings.append("evaluator-only: positive genus counts are plugged into the formula")
    if args.verify:
        if rep.evaluator_only:
            warnings.append("oracle works on the projective line only; nothing to verify against")
        else:
            orc = run_oracle()
            breakdown["oracle"] = _oracle_breakdown(orc)
            method = "both"
            agreement = orc.dimension == rep.dimension
    return make_report(args.operator, rep.case, rep.S, rep.dimension, breakdown, method, agreement, warnings)


def _system_from_json(data):
    if not isinstance(data, dict) or "matrix" not in data:
        raise InputError('system file needs a "matrix" entry')
    rows = data["matrix"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError("matrix must be a list of rows")
    out = []
    for r in rows:
        row = []
        for x in r:
            if isinstance(x, bool) or not isinstance(x, (int, str)):
                raise InputError(f"matrix entries must be strings or integers, got {x!r}")
            row.append(parse_ratfunc(str(x)))
        out.append(row)
    return DiffSystem(out)


def cmd_oracle(args):
    if args.system:
        S = _system_from_json(_read_json(args.system))
        rep = oracle.lgl_oracle_system(S)
        text = args.system
        case = "system"
    else:
        if not args.operator:
            raise InputError("give an operator or --system FILE")
        L = parse_operator(args.operator)
        rep = oracle.lgl_oracle(L)
        text = args.operator
        case = "scalar"
    return make_report(text, case, rep.places, rep.dimension, _oracle_breakdown(rep), "oracle")


def _fuchsian_input(data) -> lgl.FuchsianInput:
    if not isinstance(data, dict):
        raise InputError("Fuchsian file must be a JSON object")
    for key in ("rank", "points", "matrices"):
        if key not in data:
            raise InputError(f'Fuchsian file is missing "{key}"')
    rank = data["rank"]
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
        raise InputError("rank must be a positive integer")
    try:
        points = [parse_place(p) for p in data["points"]]
    except (ValueError, TypeError, ZeroDivisionError):
        raise InputError("points must be rational strings or \"inf\"") from None
    mats = [_matrix(M) for M in data["matrices"]]
    return lgl.FuchsianInput(rank, points, mats)


def cmd_fuchsian(args):
    data = _fuchsian_input(_read_json(args.file))
    rep = lgl.lgl_fuchsian(data)
    breakdown = dict(rep.breakdown)
    breakdown["hypothesis_flags"] = rep.hypothesis_flags
    method, agreement = "formula", None
    warnings = list(rep.warnings)
    if args.verify:
        A = lgl.fuchsian_system(data)
        orc = oracle.lgl_oracle_system(A)
        breakdown["oracle"] = _oracle_breakdown(orc)
        breakdown["realization"] = [[str(x) for x in row] for row in A]
        method = "both"
        agreement = orc.dimension == rep.dimension if rep.dimension != lgl.UNKNOWN else None
        if agreement is None:
            warnings.append(f"formula gives no value; oracle found {orc.dimension}")
    return make_report(args.file, "Fuchsian", rep.S, rep.dimension, breakdown, method, agreement, warnings)


def cmd_cohom(args):
    data = _read_json(args.file)
    if not isinstance(data, dict):
        raise InputError("cohomology file must be a JSON object")
    if "blocks" in data:
        blocks = []
        for b in data["blocks"]:
            if not isinstance(b, dict) or "q_degree" not in b or "dim" not in b:
                raise InputError('each block needs "q_degree" and "dim"')
            blocks.append((int(b["q_degree"]), int(b["dim"])))
        g = data.get("gamma_u_log")
        sd = cohom.SolutionSpaceData(blocks, _matrix(g) if g is not None else None)
        irr = cohom.formal_irregularity(sd)
        return make_report(args.file, "formal_irregularity", [], irr, {"blocks": blocks}, "formula")
    if "N" in data:
        N = _matrix(data["N"])
        a = cohom.NilpotentAction(len(N), N)
        h0, h1 = cohom.ga_cohomology(a)
        bd = {"h0": h0, "h1": h1, "exp_log_agree": cohom.exp_log_check(a)}
        return make_report(args.file, "Ga_module", [], h1, bd, "formula")
    if "A" in data:
        A = _matrix(data["A"])
        direct, via_u = cohom.cyclic_generator_h1_parts(A)
        bd = {"corank_A_minus_1": direct, "corank_unipotent_part": via_u}
        return make_report(args.file, "cyclic_generator", [], direct, bd, "formula", direct == via_u)
    if "generators" in data:
        gens = data["generators"]
        if not isinstance(gens, dict) or not gens:
            raise InputError("generators must be a nonempty object of matrices")
        mats = {k: _matrix(v) for k, v in gens.items()}
        V = len(next(iter(mats.values())))
        h0, h1 = cohom.free_unipotent_cohomology(cohom.GeneratorFamily(V, mats))
        return make_report(args.file, "free_unipotent", [], h1, {"h0": h0, "h1": h1, "S": len(mats)}, "formula")
    if "B" in data:
        B = _matrix(data["B"])
        prec = data.get("precision", 8)
        ker, cok = cohom.constant_system_dims(B, int(prec))
        bd = {"ker_dim": ker, "coker_dim": cok, "precision": prec}
        return make_report(args.file, "constant_system", [], ker, bd, "both", ker == cok)
    raise InputError('unrecognized cohomology input; expected one of "blocks", "N", "A", "generators", "B"')


def cmd_malgrange(args):
    f = parse_ratfunc(args.function)
    try:
        p = parse_place(args.place)
    except (ValueError, TypeError, ZeroDivisionError):
        raise InputError(f"bad place {args.place!r}") from None
    rec = cohom.malgrange_check(f, p)
    bd = {
        "ker_analytic": rec.ker_analytic,
        "ker_formal": rec.ker_formal,
        "irr": rec.irr,
        "coker_analytic": rec.coker_analytic,
        "coker_formal": rec.coker_formal,
        "alternating_sum": rec.alternating_sum,
        "zero_sum": rec.zero_sum,
    }
    return make_report(args.function, rec.kind, [p], "unknown", bd, "formula")


# --------------------------------------------------------------------------
# Output


def format_text(rep: dict) -> str:
    lines = [f"case: {rep['case']}", f"dimension: {rep['dimension']}"]
    if rep["S"]:
        lines.append("S: {" + ", ".join(rep["S"]) + "}")
    lines.append(f"method: {rep['method']}")
    if rep["agreement"] is not None:
        lines.append(f"agreement: {str(rep['agreement']).lower()}")
    for key, val in rep["breakdown"].items():
        if key in ("certificate", "oracle"):
            continue
        lines.append(f"  {key}: {json.dumps(val) if isinstance(val, (dict, list)) else val}")
    if "oracle" in rep["breakdown"]:
        o = rep["breakdown"]["oracle"]
        lines.append(f"  oracle: coker {o['coker_dimension']}, witnesses {o['witnesses']}")
    for w in rep["warnings"]:
        lines.append(f"warning: {w}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lgl-lab", description="Exact lgl computations for differential operators over Q(z).")
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    sub = p.add_subparsers(dest="verb", required=True)

    a = sub.add_parser("analyze", help="singular places, irregularity, indicial polynomials")
    a.add_argument("operator")

    g = sub.add_parser("lgl", help="closed-form dimension")
    g.add_argument("operator", help="operator of order 1, or the function f with --ga")
    g.add_argument("--genus", type=int, default=0)
    g.add_argument("--ga", type=int, metavar="N", help="use the system D - f*N with N a nilpotent block of size N")
    g.add_argument("--verify", action="store_true", help="also run the oracle and compare")

    o = sub.add_parser("oracle", help="brute-force dimension")
    o.add_argument("operator", nargs="?")
    o.add_argument("--system", metavar="FILE", help='JSON file {"matrix": [[expr, ...], ...]}')

    f = sub.add_parser("fuchsian", help="dimension from normalized residue data")
    f.add_argument("file")
    f.add_argument("--verify", action="store_true", help="realize a system and run the oracle")

    c = sub.add_parser("cohom", help="cohomology dimension checks")
    c.add_argument("file")

    m = sub.add_parser("malgrange", help="rank-one local exact sequence")
    m.add_argument("function")
    m.add_argument("--place", required=True)

    for sp in (a, g, o, f, c, m):
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit the JSON report")
    return p


VERBS = {
    "analyze": cmd_analyze,
    "lgl": cmd_lgl,
    "oracle": cmd_oracle,
    "fuchsian": cmd_fuchsian,
    "cohom": cmd_cohom,
    "malgrange": cmd_malgrange,
}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    input_text = getattr(args, "operator", None) or getattr(args, "file", None) or getattr(args, "function", None)
    input_text = input_text or getattr(args, "system", None) or ""
    try:
        rep = VERBS[args.verb](args)
    except (LglError, AssertionError) as exc:
        code = exc.exit_code if isinstance(exc, LglError) else 1
        name = exc.name if isinstance(exc, LglError) else "ConsistencyError"
        if args.json:
            payload = {"schema_version": SCHEMA_VERSION, "input": input_text, "error": {"type": name, "message": str(exc)}}
            print(json.dumps(payload), file=out)
        print(f"error: {name}: {exc}", file=err)
        return code
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        if args.json:
            payload = {"schema_version": SCHEMA_VERSION, "input": input_text, "error": {"type": "InputError", "message": str(exc)}}
            print(json.dumps(payload), file=out)
        print(f"error: InputError: {exc}", file=err)
        return 2
    if args.json:
        print(json.dumps(rep, sort_keys=True), file=out)
    else:
        print(format_text(rep), file=out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
