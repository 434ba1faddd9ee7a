"""JSON wire formats for vectors, spaces, renormings, traces, certificates.

Formats:

* SparseVec      ``{"coords": [[i, v], ...]}`` with 1-based indices; values
  are JSON numbers or rational strings like ``"1/10"``.
* SpaceSpec      ``{"space": "lp", "p": 1.5}`` | ``{"space": "c0"}`` |
  ``{"space": "tsirelson", "variant": "T"|"Tstar"}`` |
  ``{"space": "renormed", "base": <SpaceSpec>, "renorm": <RenormSpec>}``.
* RenormSpec     ``{"renorm": <label>, ...}`` mirroring the construction's
  fields (the base space lives in the enclosing ``renormed`` object).
* Trace          ``{"rows": [[...]], "diagonal": [...], "margins": [[...]],
  "epsilons": [...]}`` plus residuals/guard/source.
* Certificate    ``{"space": ..., "vectors": [...], "separation": ...,
  "unit_residual": ..., "certified": ..., "pairs": [[i, j, value]]}``.

Rationals survive the round trip: Fractions encode as ``"p/q"`` strings and
decode back to Fractions, so exact-path inputs stay exact through files.
Malformed input raises `SchemaError` naming the offending field.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any

from .errors import SchemaError
from .renorm import (DiagonalScale, ICExtension, JamesIC, MaxBiortho,
                     RenormSpec, StrictConvex)
from .select import SelectionTrace
from .separation import SeparationCertificate
from .vectors import Functional, Scalar, SparseVec
from .vecspace import C0, Lp, Renormed, SpaceSpec, TsirelsonT, TsirelsonTStar

# ---------------------------------------------------------------- scalars


def scalar_to_json(x: Scalar) -> Any:
    if isinstance(x, bool):
        raise SchemaError(f"boolean is not a scalar: {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise SchemaError(f"non-finite scalar cannot be serialized: {x!r}")
        return x
    raise SchemaError(f"unsupported scalar type {type(x).__name__}")


def scalar_from_json(obj: Any, path: str = "value") -> Scalar:
    if isinstance(obj, bool):
        raise SchemaError(f"{path}: expected a number, got a boolean")
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except (ValueError, ZeroDivisionError) as e:
            raise SchemaError(f"{path}: bad rational string {obj!r} ({e})") from e
    raise SchemaError(f"{path}: expected a number or rational string, "
                      f"got {type(obj).__name__}")


# ---------------------------------------------------------------- vectors


def vec_to_json(v: SparseVec) -> dict:
    return {"coords": [[i, scalar_to_json(val)] for i, val in v.items()]}


def vec_from_json(obj: Any, path: str = "vec") -> SparseVec:
    if not isinstance(obj, dict) or "coords" not in obj:
        raise SchemaError(f"{path}: expected an object with a 'coords' field")
    coords = obj["coords"]
    if not isinstance(coords, list):
        raise SchemaError(f"{path}.coords: expected a list of [index, value] pairs")
    entries = []
    for k, pair in enumerate(coords):
        where = f"{path}.coords[{k}]"
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(f"{where}: expected an [index, value] pair")
        idx, val = pair
        if isinstance(idx, bool) or not isinstance(idx, int) or idx < 1:
            raise SchemaError(f"{where}: index must be a positive integer, got {idx!r}")
        entries.append((idx, scalar_from_json(val, where)))
    return SparseVec(entries)


def functional_to_json(f: Functional) -> dict:
    return vec_to_json(f.coefficients)


def functional_from_json(obj: Any, path: str = "functional") -> Functional:
    return Functional(vec_from_json(obj, path))


# ----------------------------------------------------------------- spaces


def space_to_json(space: SpaceSpec) -> dict:
    if isinstance(space, Lp):
        p = "inf" if space.p == math.inf else (
            scalar_to_json(space.p) if isinstance(space.p, (int, Fraction))
            else space.p)
        return {"space": "lp", "p": p}
    if isinstance(space, C0):
        return {"space": "c0"}
    if isinstance(space, TsirelsonT):
        return {"space": "tsirelson", "variant": "T"}
    if isinstance(space, TsirelsonTStar):
        return {"space": "tsirelson", "variant": "Tstar"}
    if isinstance(space, Renormed):
        return {"space": "renormed", "base": space_to_json(space.base),
                "renorm": renorm_to_json(space.renorm)}
    raise SchemaError(f"unsupported space type {type(space).__name__}")


def space_from_json(obj: Any, path: str = "space") -> SpaceSpec:
    if not isinstance(obj, dict) or "space" not in obj:
        raise SchemaError(f"{path}: expected an object with a 'space' field")
    kind = obj["space"]
    if kind == "lp":
        if "p" not in obj:
            raise SchemaError(f"{path}: lp space needs a 'p' field")
        p = obj["p"]
        if p == "inf":
            p = math.inf
        elif isinstance(p, str):
            p = scalar_from_json(p, f"{path}.p")
        elif isinstance(p, bool) or not isinstance(p, (int, float)):
            raise SchemaError(f"{path}.p: expected a number or 'inf'")
        return Lp(p)
    if kind == "c0":
        return C0()
    if kind == "tsirelson":
        variant = obj.get("variant")
        if variant == "T":
            return TsirelsonT()
        if variant == "Tstar":
            return TsirelsonTStar()
        raise SchemaError(f"{path}.variant: expected 'T' or 'Tstar', got {variant!r}")
    if kind == "renormed":
        if "base" not in obj or "renorm" not in obj:
            raise SchemaError(f"{path}: renormed space needs 'base' and 'renorm'")
        base = space_from_json(obj["base"], f"{path}.base")
        spec = renorm_from_json(obj["renorm"], base, f"{path}.renorm")
        return Renormed(base, spec)
    raise SchemaError(f"{path}.space: unknown space kind {kind!r}")


# -------------------------------------------------------------- renormings


def renorm_to_json(spec: RenormSpec) -> dict:
    if isinstance(spec, DiagonalScale):
        return {"renorm": "diagonal",
                "weights": [[i, scalar_to_json(w)] for i, w in spec.weights]}
    if isinstance(spec, MaxBiortho):
        return {"renorm": "max-biortho",
                "epsilon": scalar_to_json(spec.epsilon),
                "functionals": [functional_to_json(f) for f in spec.functionals]}
    if isinstance(spec, ICExtension):
        inner = spec.inner
        inner_json = (renorm_to_json(inner) if hasattr(inner, "label")
                      else space_to_json(inner))
        return {"renorm": "ic-extension",
                "subspace_basis": [vec_to_json(v) for v in spec.subspace_basis],
                "inner": inner_json,
                "b": scalar_to_json(spec.b),
                "support_budget": spec.support_budget}
    if isinstance(spec, JamesIC):
        return {"renorm": "james-ic",
                "blocks": [vec_to_json(v) for v in spec.blocks],
                "support_budget": spec.support_budget}
    if isinstance(spec, StrictConvex):
        return {"renorm": "strict-convex",
                "epsilon": scalar_to_json(spec.epsilon),
                "delta": scalar_to_json(spec.delta),
                "functionals": [functional_to_json(f) for f in spec.functionals]}
    raise SchemaError(f"unsupported renorm type {type(spec).__name__}")


def _vec_list(obj: Any, path: str) -> tuple[SparseVec, ...]:
    if not isinstance(obj, list):
        raise SchemaError(f"{path}: expected a list of vectors")
    return tuple(vec_from_json(v, f"{path}[{k}]") for k, v in enumerate(obj))


def renorm_from_json(obj: Any, base: SpaceSpec, path: str = "renorm") -> RenormSpec:
    if not isinstance(obj, dict) or "renorm" not in obj:
        raise SchemaError(f"{path}: expected an object with a 'renorm' field")
    kind = obj["renorm"]
    if kind == "diagonal":
        raw = obj.get("weights")
        if not isinstance(raw, list):
            raise SchemaError(f"{path}.weights: expected a list of [index, weight] pairs")
        weights = []
        for k, pair in enumerate(raw):
            where = f"{path}.weights[{k}]"
            if not isinstance(pair, list) or len(pair) != 2:
                raise SchemaError(f"{where}: expected an [index, weight] pair")
            idx, w = pair
            if isinstance(idx, bool) or not isinstance(idx, int) or idx < 1:
                raise SchemaError(f"{where}: index must be a positive integer")
            weights.append((idx, scalar_from_json(w, where)))
        return DiagonalScale(base, tuple(weights))
    if kind == "max-biortho":
        if "epsilon" not in obj or "functionals" not in obj:
            raise SchemaError(f"{path}: max-biortho needs 'epsilon' and 'functionals'")
        eps = scalar_from_json(obj["epsilon"], f"{path}.epsilon")
        funcs = obj["functionals"]
        if not isinstance(funcs, list):
            raise SchemaError(f"{path}.functionals: expected a list")
        fs = tuple(functional_from_json(f, f"{path}.functionals[{k}]")
                   for k, f in enumerate(funcs))
        return MaxBiortho(base, eps, fs)
    if kind == "ic-extension":
        if "subspace_basis" not in obj or "inner" not in obj:
            raise SchemaError(f"{path}: ic-extension needs 'subspace_basis' and 'inner'")
        basis = _vec_list(obj["subspace_basis"], f"{path}.subspace_basis")
        inner_obj = obj["inner"]
        if isinstance(inner_obj, dict) and "renorm" in inner_obj:
            inner: object = renorm_from_json(inner_obj, base, f"{path}.inner")
        else:
            inner = space_from_json(inner_obj, f"{path}.inner")
        b = scalar_from_json(obj.get("b", 1), f"{path}.b")
        budget = obj.get("support_budget", 0)
        if isinstance(budget, bool) or not isinstance(budget, int):
            raise SchemaError(f"{path}.support_budget: expected an integer")
        return ICExtension(base, basis, inner, b, budget)
    if kind == "james-ic":
        if "blocks" not in obj:
            raise SchemaError(f"{path}: james-ic needs 'blocks'")
        blocks = _vec_list(obj["blocks"], f"{path}.blocks")
        budget = obj.get("support_budget", 0)
        if isinstance(budget, bool) or not isinstance(budget, int):
            raise SchemaError(f"{path}.support_budget: expected an integer")
        return JamesIC(base, blocks, budget)
    if kind == "strict-convex":
        for field in ("epsilon", "delta", "functionals"):
            if field not in obj:
                raise SchemaError(f"{path}: strict-convex needs '{field}'")
        eps = scalar_from_json(obj["epsilon"], f"{path}.epsilon")
        delta = scalar_from_json(obj["delta"], f"{path}.delta")
        funcs = obj["functionals"]
        if not isinstance(funcs, list):
            raise SchemaError(f"{path}.functionals: expected a list")
        fs = tuple(functional_from_json(f, f"{path}.functionals[{k}]")
                   for k, f in enumerate(funcs))
        return StrictConvex(base, eps, delta, fs)
    raise SchemaError(f"{path}.renorm: unknown renorm kind {kind!r}")


# ------------------------------------------------- traces and certificates


def trace_to_json(trace: SelectionTrace) -> dict:
    return {
        "rows": [list(row) for row in trace.rows],
        "diagonal": list(trace.diagonal),
        "margins": [[float(m) for m in row] for row in trace.residuals],
        "epsilons": [scalar_to_json(e) for e in trace.epsilons],
        "guard": trace.guard,
        "source": trace.source_name,
    }


def certificate_to_json(cert: SeparationCertificate) -> dict:
    return {
        "space": space_to_json(cert.space),
        "vectors": [vec_to_json(v) for v in cert.vectors],
        "separation": scalar_to_json(cert.separation),
        "unit_residual": scalar_to_json(cert.unit_residual),
        "certified": cert.certified,
        "pairs": [[i, j, scalar_to_json(m)] for i, j, m in cert.pair_matrix],
        "exact": cert.exact,
        "claimed_separation": scalar_to_json(cert.claimed_separation),
        "degenerate_pairs": [list(p) for p in cert.degenerate_pairs],
    }


def certificate_from_json(obj: Any, path: str = "certificate") -> SeparationCertificate:
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    for field in ("space", "vectors", "separation", "unit_residual",
                  "certified", "pairs"):
        if field not in obj:
            raise SchemaError(f"{path}: missing field '{field}'")
    space = space_from_json(obj["space"], f"{path}.space")
    vectors = _vec_list(obj["vectors"], f"{path}.vectors")
    pairs = []
    for k, entry in enumerate(obj["pairs"]):
        where = f"{path}.pairs[{k}]"
        if not isinstance(entry, list) or len(entry) != 3:
            raise SchemaError(f"{where}: expected an [i, j, value] triple")
        i, j, m = entry
        if isinstance(i, bool) or isinstance(j, bool) or \
                not isinstance(i, int) or not isinstance(j, int):
            raise SchemaError(f"{where}: pair indices must be integers")
        pairs.append((i, j, scalar_from_json(m, where)))
    degen = tuple((int(a), int(b)) for a, b in obj.get("degenerate_pairs", []))
    return SeparationCertificate(
        space, vectors, tuple(pairs),
        scalar_from_json(obj["separation"], f"{path}.separation"),
        scalar_from_json(obj["unit_residual"], f"{path}.unit_residual"),
        bool(obj["certified"]), bool(obj.get("exact", False)), degen)


# ------------------------------------------------------------------- files


def to_text(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def load_json_file(path: str, what: str = "input") -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise SchemaError(f"{what}: cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"{what}: {path}:{e.lineno}:{e.colno}: {e.msg}") from e
