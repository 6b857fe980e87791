"""JSON schemas for posets, heights, modules, morphisms, and reports.

All numeric payloads are exact: integers for prime-field entries, fraction
strings elsewhere, and "inf" for the infinite value.  Emitted reports re-parse
through these loaders.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .exactlin import FieldSpec, Mat
from .height import (
    HeightDiff,
    HeightFunction,
    INF,
    format_ext,
    from_phi,
    parse_ext,
    rho_diag,
    validate_rho,
)
from .interleave import Certificate, StrataReport
from .erosion import EnDistanceReport, Subquotient
from .pmod import ModuleMorphism, PersistenceModule
from .poset import FinitePoset, OrderMap

__all__ = [
    "SchemaError",
    "parse_field",
    "field_to_json",
    "load_poset",
    "poset_to_json",
    "load_height",
    "load_module",
    "module_to_json",
    "load_morphism",
    "morphism_to_json",
    "strata_report_to_json",
    "en_report_to_json",
    "load_order_map",
]


class SchemaError(ValueError):
    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location


def parse_field(spec: Any) -> FieldSpec:
    """Accepts "gf2" | "gf3" | "gfp:P" | "rational" or {"kind": ..., "p": ...}."""
    if isinstance(spec, str):
        s = spec.strip().lower()
        if s == "rational":
            return FieldSpec("rational")
        if s == "gf2":
            return FieldSpec("gfp", 2)
        if s == "gf3":
            return FieldSpec("gfp", 3)
        if s.startswith("gfp:"):
            return FieldSpec("gfp", int(s.split(":", 1)[1]))
        raise SchemaError(f"unknown field spec {spec!r}", "$.field")
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind in ("gfp", "prime-field"):
            return FieldSpec("gfp", int(spec["p"]))
        if kind == "rational":
            return FieldSpec("rational")
        raise SchemaError(f"unknown field kind {kind!r}", "$.field.kind")
    raise SchemaError("field must be a string or object", "$.field")


def field_to_json(f: FieldSpec) -> Dict[str, Any]:
    if f.is_prime_field:
        return {"kind": "gfp", "p": f.p}
    return {"kind": "rational"}


def load_poset(doc: Dict[str, Any]) -> FinitePoset:
    """{"elements": [...], "covers": [["a","b"], ...]} or {"grid": [4, 3]}.

    Covers need not be reduced in the file; normalization happens on load.
    """
    if "grid" in doc:
        shape = doc["grid"]
        if not isinstance(shape, list) or not all(isinstance(x, int) for x in shape):
            raise SchemaError("grid must be a list of integers", "$.grid")
        return FinitePoset.grid(shape)
    if "elements" not in doc:
        raise SchemaError("missing 'elements'", "$")
    elements = doc["elements"]
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        raise SchemaError("elements must be a list of strings", "$.elements")
    covers = doc.get("covers", [])
    pairs = []
    for i, c in enumerate(covers):
        if not (isinstance(c, list) and len(c) == 2):
            raise SchemaError("cover must be a [lower, upper] pair", f"$.covers[{i}]")
        pairs.append((c[0], c[1]))
    return FinitePoset.from_covers(elements, pairs)


def poset_to_json(p: FinitePoset) -> Dict[str, Any]:
    return {
        "elements": list(p.elements),
        "covers": [[p.elements[a], p.elements[b]] for a, b in p.covers],
    }


def load_height(doc: Dict[str, Any], poset: FinitePoset) -> HeightDiff:
    """{"phi": {...}} or {"rho": [["a","b","3/2"], ...]} or {"diag": true} on grids."""
    if doc.get("diag"):
        return rho_diag(poset)
    if "phi" in doc:
        table = doc["phi"]
        if not isinstance(table, dict):
            raise SchemaError("phi must be an object", "$.phi")
        phi = HeightFunction(poset, {k: Fraction(v) for k, v in table.items()})
        return from_phi(phi)
    if "rho" in doc:
        entries = doc["rho"]
        table = {}
        for i, ent in enumerate(entries):
            if not (isinstance(ent, list) and len(ent) == 3):
                raise SchemaError("rho entry must be [a, b, value]", f"$.rho[{i}]")
            table[(ent[0], ent[1])] = parse_ext(ent[2])
        validation = validate_rho(poset, table)
        if not validation.ok:
            raise SchemaError(
                "invalid height-difference table: "
                f"missing={validation.missing_pairs[:3]} "
                f"superadditivity={validation.superadditivity_violations[:3]}",
                "$.rho",
            )
        return validation.rho
    raise SchemaError("height document needs 'phi', 'rho', or 'diag'", "$")


def _parse_entry(field: FieldSpec, v: Any):
    if field.is_prime_field:
        return int(v)
    return Fraction(v)


def load_module(doc: Dict[str, Any], poset: FinitePoset,
                default_field: Optional[FieldSpec] = None) -> PersistenceModule:
    """{"field": ..., "dims": {"a": 1, ...}, "maps": {"a|b": [[...]], ...}}."""
    fieldspec = parse_field(doc["field"]) if "field" in doc else default_field
    if fieldspec is None:
        raise SchemaError("module needs a field", "$.field")
    dims_doc = doc.get("dims", {})
    dims = []
    for e in poset.elements:
        dims.append(int(dims_doc.get(e, 0)))
    maps = {}
    for key, rows in doc.get("maps", {}).items():
        if "|" not in key:
            raise SchemaError("map key must be 'lower|upper'", f"$.maps[{key!r}]")
        lo, hi = key.split("|", 1)
        a, b = poset.idx(lo), poset.idx(hi)
        if (a, b) not in dict.fromkeys(poset.covers):
            raise SchemaError(f"({lo!r}, {hi!r}) is not a cover", f"$.maps[{key!r}]")
        want_rows, want_cols = dims[b], dims[a]
        if len(rows) != want_rows or any(len(r) != want_cols for r in rows):
            raise SchemaError(
                f"matrix must be {want_rows}x{want_cols}", f"$.maps[{key!r}]"
            )
        maps[(a, b)] = Mat.from_rows(
            fieldspec, [[_parse_entry(fieldspec, v) for v in r] for r in rows],
            cols=want_cols,
        )
    return PersistenceModule(poset, fieldspec, dims, maps)


def module_to_json(m: PersistenceModule) -> Dict[str, Any]:
    P = m.poset
    return {
        "field": field_to_json(m.field),
        "dims": {e: m.dims[i] for i, e in enumerate(P.elements) if m.dims[i]},
        "maps": {
            f"{P.elements[a]}|{P.elements[b]}": m.maps[(a, b)].tolists()
            for (a, b) in P.covers
            if m.dims[a] and m.dims[b]
        },
    }


def load_morphism(doc: Dict[str, Any], source: PersistenceModule,
                  target: PersistenceModule) -> ModuleMorphism:
    """{"components": {"a": [[...]], ...}}; omitted elements mean zero blocks."""
    comps = []
    table = doc.get("components", {})
    for i, e in enumerate(source.poset.elements):
        rows = table.get(e)
        if rows is None:
            comps.append(Mat.zeros(source.field, target.dims[i], source.dims[i]))
        else:
            comps.append(Mat.from_rows(
                source.field,
                [[_parse_entry(source.field, v) for v in r] for r in rows],
                cols=source.dims[i],
            ))
    return ModuleMorphism(source, target, comps)


def morphism_to_json(f: ModuleMorphism) -> Dict[str, Any]:
    P = f.source.poset
    return {
        "components": {
            e: f.components[i].tolists()
            for i, e in enumerate(P.elements)
            if f.components[i].rows and f.components[i].cols
        }
    }


def _stratum_interval(st) -> List[str]:
    if st.kind == "zero":
        return ["0", "0"]
    return [str(st.lo), "inf" if st.hi is None else str(st.hi)]


def strata_report_to_json(rep: StrataReport) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "strata": [
            {"interval": _stratum_interval(sv.stratum), "verdict": sv.verdict}
            for sv in rep.strata
        ],
        "distance": format_ext(rep.distance),
        "attained": rep.attained,
        "decided": rep.decided,
    }
    if not rep.decided:
        out["distance_lo"] = format_ext(rep.distance_lo)
        out["distance_hi"] = format_ext(rep.distance_hi)
    if rep.certificate is not None:
        out["certificate"] = {
            "r": str(rep.certificate.r),
            "p": morphism_to_json(rep.certificate.p),
            "q": morphism_to_json(rep.certificate.q),
        }
    return out


def _subquotient_to_json(sq: Subquotient) -> Dict[str, Any]:
    P = sq.parent.poset
    return {
        "M1": {e: sq.sub1.bases[i].tolists() for i, e in enumerate(P.elements) if sq.sub1.bases[i].cols},
        "M2": {e: sq.sub2.bases[i].tolists() for i, e in enumerate(P.elements) if sq.sub2.bases[i].cols},
        "quotient": module_to_json(sq.quotient),
    }


def en_report_to_json(rep: EnDistanceReport) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "strata": [
            {
                "interval": _stratum_interval(sv.stratum),
                "verdict": sv.verdict,
                **({"via": sv.via} if sv.via else {}),
            }
            for sv in rep.strata
        ],
        "distance": format_ext(rep.distance),
        "decided": rep.decided,
    }
    if not rep.decided:
        out["distance_lo"] = format_ext(rep.distance_lo)
        out["distance_hi"] = format_ext(rep.distance_hi)
    if rep.witness is not None:
        out["witness"] = _subquotient_to_json(rep.witness)
    return out


def load_order_map(doc: Dict[str, Any], source: FinitePoset, target: FinitePoset) -> OrderMap:
    table = doc.get("map")
    if not isinstance(table, dict):
        raise SchemaError("order map needs a 'map' object", "$.map")
    return OrderMap(source, target, dict(table))
