"""Command-line front end.

Subcommands: norm, profile, select, renorm, separate, kottman,
tsirelson-table.  Inputs are JSON (inline or file paths); outputs are
JSON/CSV artifacts that embed the producing config, plus optional PNG
figures rendered next to the delimited output (--plot).

Exit codes: 0 success, 2 precondition/schema errors, 3 budget/resource
errors.  Runs are reproducible: a fixed seed and config give
byte-identical artifacts at any parallelism level.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from .basis import FiniteBasicSequence, profile
from .errors import (BanachlabError, ParameterError, PreconditionError,
                     ResourceError, SchemaError)
from .optkit import OptBudget
from .renorm import MaxBiortho, premise_check
from .report import (format_scalar, profile_csv_text, render_profile_png,
                     render_series_png, render_sweep_png, render_trace_png,
                     sweep_csv_text, table_csv_text, write_json_artifact,
                     write_text)
from .select import (DEFAULT_LENGTH, DEFAULT_STAGES,
                     asymptotic_monotone_select, builtin_source)
from .separation import (kottman_dim_sweep, kottman_lower_bound,
                         symmetric_separation)
from .serialize import (certificate_to_json, load_json_file, renorm_from_json,
                        scalar_to_json, space_from_json, to_text,
                        trace_to_json, vec_from_json, vec_to_json)
from .vecspace import (C0, Lp, Renormed, SpaceSpec, TsirelsonT,
                       TsirelsonTStar, is_certified_path, norm, space_label)
from .vectors import Scalar, SparseVec

SOURCE_NAMES = ("orthonormal-l2", "perturbed-l2", "lp-basis", "block-l1")


# ----------------------------------------------------------- arg parsing


def _load_obj(text: str, what: str):
    t = text.strip()
    if t.startswith("{") or t.startswith("["):
        try:
            return json.loads(t)
        except json.JSONDecodeError as e:
            raise SchemaError(f"{what}: {e.lineno}:{e.colno}: {e.msg}") from e
    return load_json_file(t, what)


def _parse_number(text: str, what: str) -> Scalar:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"{what}: cannot parse number {text!r}") from None


def _parse_space(text: str) -> SpaceSpec:
    t = text.strip()
    if t.startswith("{") or t.endswith(".json"):
        return space_from_json(_load_obj(t, "--space"))
    if t == "c0":
        return C0()
    if t in ("tsirelson-T", "T"):
        return TsirelsonT()
    if t in ("tsirelson-Tstar", "Tstar"):
        return TsirelsonTStar()
    if t.startswith("lp:"):
        tok = t[len("lp:"):]
        if tok in ("inf", "infinity"):
            return Lp(math.inf)
        p = _parse_number(tok, "--space lp exponent")
        if isinstance(p, Fraction) and p.denominator == 1:
            p = int(p)
        return Lp(p)
    raise SchemaError(f"--space: unrecognized space {text!r}; "
                      "use lp:P, c0, tsirelson-T, tsirelson-Tstar, or JSON")


def _resolve_space(args) -> SpaceSpec:
    space = _parse_space(args.space)
    if getattr(args, "renorm", None):
        spec = renorm_from_json(_load_obj(args.renorm, "--renorm"), space)
        return Renormed(space, spec)
    return space


def _parse_vec_arg(text: str) -> SparseVec:
    return vec_from_json(_load_obj(text, "--vec"), "vec")


def _parse_vecs_arg(text: str) -> list[SparseVec]:
    obj = _load_obj(text, "--vecs")
    if isinstance(obj, dict) and "vectors" in obj:
        obj = obj["vectors"]
    if isinstance(obj, dict) and "coords" in obj:
        obj = [obj]
    if not isinstance(obj, list) or not obj:
        raise SchemaError('--vecs: expected a list of vectors or '
                          '{"vectors": [...]}')
    return [vec_from_json(v, f"vecs[{k}]") for k, v in enumerate(obj)]


def _parse_epsilons(text: str, stages: int) -> list[Scalar]:
    t = text.strip()
    if t.startswith("geometric:"):
        r = _parse_number(t[len("geometric:"):], "--epsilons ratio")
        if not 0 < r < 1:
            raise ParameterError(f"geometric ratio must be in (0, 1), got {r}")
        return [r ** k for k in range(1, stages + 1)]
    vals = [_parse_number(tok, "--epsilons") for tok in t.split(",")
            if tok.strip()]
    if not vals:
        raise SchemaError("--epsilons: empty list")
    return vals


def _exactness(args) -> bool | None:
    return True if getattr(args, "exact", False) else None


def _config(args) -> dict:
    out = {"command": args.command}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "command") or v is None:
            continue
        out[k] = v
    return out


def _png_path(out: str) -> str:
    stem, _ = os.path.splitext(out)
    return stem + ".png"


def _stem(out: str) -> str:
    return os.path.splitext(out)[0]


# ------------------------------------------------------------- commands


def _cmd_norm(args) -> int:
    space = _resolve_space(args)
    v = _parse_vec_arg(args.vec)
    val = norm(space, v, exact=_exactness(args))
    print(format_scalar(val))
    if args.out:
        write_json_artifact(args.out, {
            "space": space_label(space),
            "value": scalar_to_json(val),
            "exact": not isinstance(val, float),
            "certified": is_certified_path(space),
        }, _config(args))
    return 0


def _cmd_profile(args) -> int:
    space = _resolve_space(args)
    vecs = _parse_vecs_arg(args.vecs)
    seq = FiniteBasicSequence(tuple(vecs), space)
    budget = None
    if args.budget is not None or args.seed:
        budget = OptBudget(restarts=args.budget or 16, max_iters=200,
                           seed=args.seed)
    prof = profile(seq, budget)
    text = profile_csv_text(prof, _config(args))
    if args.out:
        write_text(args.out, text)
        if args.plot:
            render_profile_png(_png_path(args.out), prof,
                               title=space_label(space))
    else:
        if args.plot:
            raise ParameterError("--plot requires --out")
        sys.stdout.write(text)
    return 0


def _cmd_select(args) -> int:
    source = builtin_source(args.source)
    stages = args.stages
    length = max(DEFAULT_LENGTH, stages)
    eps = _parse_epsilons(args.epsilons, stages)
    budget = None
    if args.budget is not None or args.seed:
        budget = OptBudget(restarts=args.budget or 8, max_iters=150,
                           seed=args.seed)
    trace = asymptotic_monotone_select(source, eps, stages, budget,
                                       length=length)
    tjson = trace_to_json(trace)
    prof = None
    if len(trace.diagonal) >= 2:
        diag = tuple(source.vector(n) for n in trace.diagonal)
        prof = profile(FiniteBasicSequence(diag, source.space))
    if args.out:
        write_json_artifact(args.out, tjson, _config(args))
        if prof is not None:
            write_text(_stem(args.out) + ".profile.csv",
                       profile_csv_text(prof, _config(args)))
            if args.plot:
                render_trace_png(_png_path(args.out), prof.proj_norms,
                                 trace.epsilons, title=source.name)
    else:
        if args.plot:
            raise ParameterError("--plot requires --out")
        sys.stdout.write(to_text(tjson))
        if prof is not None:
            sys.stdout.write(profile_csv_text(prof, _config(args)))
    return 0


def _cmd_renorm(args) -> int:
    base = _parse_space(args.space)
    spec = renorm_from_json(_load_obj(args.renorm, "--renorm"), base)
    space = Renormed(base, spec)
    probes = _parse_vecs_arg(args.vecs)
    exact = _exactness(args)
    entries = []
    ratios: list[float] = []
    for v in probes:
        bn = norm(base, v, exact=exact)
        rn = norm(space, v, exact=exact)
        entries.append({"vec": vec_to_json(v),
                        "base_norm": scalar_to_json(bn),
                        "renormed_norm": scalar_to_json(rn)})
        if bn != 0:
            ratios.append(float(rn) / float(bn))
    payload = {
        "renorm": spec.label(),
        "norms": entries,
        "sandwich": ({"lo": min(ratios), "hi": max(ratios)} if ratios
                     else None),
        "premise": None,
    }
    if isinstance(spec, MaxBiortho):
        ok, worst = premise_check(spec, seed=args.seed)
        payload["premise"] = {"ok": ok, "worst_ratio": float(worst)}
    if args.out:
        write_json_artifact(args.out, payload, _config(args))
        print(f"renorm {spec.label()}: sandwich {payload['sandwich']}")
    else:
        sys.stdout.write(to_text(payload))
    return 0


def _cmd_separate(args) -> int:
    space = _resolve_space(args)
    vecs = _parse_vecs_arg(args.vecs)
    cert = symmetric_separation(space, vecs, exact=_exactness(args))
    cj = certificate_to_json(cert)
    if args.out:
        write_json_artifact(args.out, cj, _config(args))
        print(f"separation {format_scalar(cert.claimed_separation)} "
              f"exact={cert.exact} certified={cert.certified}")
    else:
        sys.stdout.write(to_text(cj))
    return 0


def _cmd_kottman(args) -> int:
    space = _resolve_space(args)
    try:
        dims = [int(tok) for tok in args.dim.split(",") if tok.strip()]
    except ValueError:
        raise SchemaError(f"--dim: expected an integer or comma list, "
                          f"got {args.dim!r}") from None
    if not dims:
        raise SchemaError("--dim: empty list")
    budget = OptBudget(restarts=args.budget or 16, max_iters=120,
                       seed=args.seed)
    if len(dims) == 1:
        cert = kottman_lower_bound(space, args.k, dims[0], budget)
        cj = certificate_to_json(cert)
        if args.out:
            write_json_artifact(args.out, cj, _config(args))
            print(f"separation {format_scalar(cert.claimed_separation)} "
                  f"exact={cert.exact}")
        else:
            sys.stdout.write(to_text(cj))
        return 0
    certs = kottman_dim_sweep(space, args.k, dims, budget)
    text = sweep_csv_text(dims, certs, _config(args))
    if args.out:
        write_text(args.out, text)
        if args.plot:
            render_sweep_png(_png_path(args.out), dims, certs,
                             title=space_label(space))
    else:
        if args.plot:
            raise ParameterError("--plot requires --out")
        sys.stdout.write(text)
    return 0


def _cmd_tsirelson_table(args) -> int:
    if args.dim < 1:
        raise ParameterError(f"--dim must be at least 1, got {args.dim}")
    ns = list(range(1, args.dim + 1))
    t_vals: list[Scalar] = []
    tstar_vals: list[Scalar] = []
    for n in ns:
        s = SparseVec({i: Fraction(1) for i in range(1, n + 1)})
        t_vals.append(norm(TsirelsonT(), s, exact=True))
        tstar_vals.append(norm(TsirelsonTStar(), s, exact=True))
    rows = [[n, t, ts] for n, t, ts in zip(ns, t_vals, tstar_vals)]
    text = table_csv_text(["n", "t_norm", "tstar_norm"], rows, _config(args))
    if args.out:
        write_text(args.out, text)
        if args.plot:
            render_series_png(_png_path(args.out), ns,
                              {"T norm": [float(v) for v in t_vals],
                               "T* norm": [float(v) for v in tstar_vals]},
                              "n", "norm", title="partial sums e_1 + ... + e_n")
    else:
        if args.plot:
            raise ParameterError("--plot requires --out")
        sys.stdout.write(text)
    return 0


# -------------------------------------------------------------- assembly


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="banachlab",
        description="Norm oracles, basis profiles, subsequence selection, "
                    "renormings, and separation certificates for sequence "
                    "space truncations.")
    ap.add_argument("--version", action="version",
                    version=f"banachlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def flag_space(p, required=True):
        p.add_argument("--space", required=required,
                       help="space spec: lp:P, c0, tsirelson-T, "
                            "tsirelson-Tstar, or JSON (inline or file)")

    def flag_renorm(p, required=False):
        p.add_argument("--renorm", required=required,
                       help="renorm spec JSON (inline or file)")

    def flag_out(p):
        p.add_argument("--out", help="output artifact path")

    def flag_plot(p):
        p.add_argument("--plot", action="store_true",
                       help="render a PNG figure next to the output")

    def flag_exact(p):
        p.add_argument("--exact", action="store_true",
                       help="require the exact rational path")

    def flag_budget_seed(p):
        p.add_argument("--budget", type=int, help="restart budget override")
        p.add_argument("--seed", type=int, default=0, help="RNG seed")

    p = sub.add_parser("norm", help="evaluate a norm")
    flag_space(p)
    flag_renorm(p)
    p.add_argument("--vec", required=True, help="vector JSON (inline or file)")
    flag_exact(p)
    flag_out(p)
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("profile", help="projection-norm profile of a sequence")
    flag_space(p)
    flag_renorm(p)
    p.add_argument("--vecs", required=True,
                   help="vector list JSON (inline or file)")
    flag_budget_seed(p)
    flag_out(p)
    flag_plot(p)
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("select",
                       help="asymptotically monotone subsequence selection")
    p.add_argument("--source", required=True, choices=SOURCE_NAMES,
                   help="built-in sequence source")
    p.add_argument("--epsilons", default="geometric:0.5",
                   help="stage targets: comma list or geometric:r")
    p.add_argument("--stages", type=int, default=DEFAULT_STAGES)
    flag_budget_seed(p)
    flag_out(p)
    flag_plot(p)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("renorm",
                       help="evaluate a renorming over probe vectors")
    flag_space(p)
    flag_renorm(p, required=True)
    p.add_argument("--vecs", required=True,
                   help="probe vector list JSON (inline or file)")
    flag_exact(p)
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    flag_out(p)
    p.set_defaults(func=_cmd_renorm)

    p = sub.add_parser("separate", help="symmetric separation certificate")
    flag_space(p)
    flag_renorm(p)
    p.add_argument("--vecs", required=True,
                   help="vector list JSON (inline or file)")
    flag_exact(p)
    flag_out(p)
    p.set_defaults(func=_cmd_separate)

    p = sub.add_parser("kottman", help="Kottman separation lower-bound search")
    flag_space(p)
    flag_renorm(p)
    p.add_argument("--k", type=int, required=True, help="set size")
    p.add_argument("--dim", required=True,
                   help="dimension, or comma list for a sweep")
    flag_budget_seed(p)
    flag_out(p)
    flag_plot(p)
    p.set_defaults(func=_cmd_kottman)

    p = sub.add_parser("tsirelson-table",
                       help="exact T and T* norms of partial sums")
    p.add_argument("--dim", type=int, default=8)
    flag_out(p)
    flag_plot(p)
    p.set_defaults(func=_cmd_tsirelson_table)

    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ResourceError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except BanachlabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
