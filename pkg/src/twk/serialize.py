"""Canonical JSON encoding of every value the command line reads or writes.

Documents start with ``"format": 1`` and a ``"kind"`` tag.  Generators and
arrows are emitted in sorted order and coefficients as lists of basis names,
so encoding a decoded document reproduces it byte for byte.
"""

from __future__ import annotations

import json
from typing import Any

from .boxtensor import DABimodule, elementary_module, identity_da
from .ddcoeff import (
    CoefficientSystem, DDBimodule, GeneralizedCoefficientSystem, UNKNOWN_INTERVALS, from_coefficients,
    to_coefficients,
)
from .errors import ForeignElement, TwkError
from .kernel.algebra import (
    Algebra, PathAlgebra, QuiverPresentation, TensorAlgebra, build_algebra, reserved_algebra,
    strand_algebra_torus, torus_algebra, trivial_algebra,
)
from .models import FlipModule, cfdd_identity, identity_typewriter, model_m
from .report import Report
from .typed import Morphism, TypeDStructure, cone
from .typewriter import Typewriter

FORMAT = 1
RESERVED_ALGEBRAS = ("torus", "strands-torus", "trivial")


class ParseError(TwkError, ValueError):
    pass


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT or "kind" not in doc:
        raise ParseError("document must be an object with \"format\": 1 and a \"kind\"")
    return doc


def _head(kind: str) -> dict:
    return {"format": FORMAT, "kind": kind}


# ---------------------------------------------------------------- algebras

def algebra_ref(alg: Algebra):
    for name in RESERVED_ALGEBRAS:
        if alg == reserved_algebra(name):
            return name
    if isinstance(alg, PathAlgebra):
        p = alg.presentation
        return {"name": alg.name, "vertices": list(p.vertices),
                "arrows": [list(a) for a in p.arrows], "relations": [list(r) for r in p.relations],
                "max_path_len": alg.max_path_len}
    raise ForeignElement(f"algebra {alg.name} has no serial form")


def parse_algebra_ref(ref) -> Algebra:
    if isinstance(ref, str):
        return reserved_algebra(ref)
    try:
        pres = QuiverPresentation(ref["vertices"], [tuple(a) for a in ref["arrows"]],
                                  [tuple(r) for r in ref.get("relations", [])])
        return build_algebra(pres, ref["max_path_len"], name=ref.get("name", "quiver"))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed algebra reference: {exc}") from None


def encode_algebra(alg: Algebra) -> dict:
    doc = _head("algebra")
    doc["algebra"] = algebra_ref(alg)
    doc["basis"] = [str(b) for b in alg.basis]
    return doc


# ---------------------------------------------------------------- coefficients

def _elem(alg: Algebra, c) -> list:
    if isinstance(alg, TensorAlgebra):
        out = []
        for k in sorted(c):
            i, j = alg.split(k)
            r = alg.right.basis[j]
            out.append([alg.left.basis[i], "1" if alg.right.is_idempotent(j) else r])
        return out
    return [alg.basis[k] for k in sorted(c)]


def _parse_elem(alg: Algebra, terms, right_vertex=None):
    out = set()
    try:
        for t in terms:
            if isinstance(alg, TensorAlgebra):
                left, right = t
                if right == "1":
                    if right_vertex is None:
                        raise ParseError("right label 1 needs a generator context")
                    j = alg.right.idempotents[alg.right.vertex_index(right_vertex)]
                else:
                    j = alg.right.index(right)
                out ^= {alg.pair(alg.left.index(left), j)}
            else:
                out ^= {alg.index(t)}
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed coefficient {terms!r}: {exc}") from None
    return frozenset(out)


def _coeff_list(alg: Algebra, coeffs: dict) -> list:
    return [[s, t, _elem(alg, c)] for (s, t), c in coeffs.items()]


def _right_of(N: TypeDStructure, g):
    v = N.generators.get(g)
    return v[1] if isinstance(v, tuple) else None


def _parse_coeffs(alg: Algebra, rows, source: TypeDStructure) -> dict:
    out: dict = {}
    try:
        for s, t, terms in rows:
            out[(s, t)] = out.get((s, t), frozenset()) ^ _parse_elem(alg, terms, _right_of(source, s))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed arrow list: {exc}") from None
    return out


# ---------------------------------------------------------------- structures

def _body(N: TypeDStructure) -> dict:
    alg = N.algebra
    if isinstance(alg, TensorAlgebra):
        gens = [[g, v[0], v[1]] for g, v in N.generators.items()]
    else:
        gens = [[g, v] for g, v in N.generators.items()]
    return {"generators": gens, "arrows": _coeff_list(alg, N.arrows)}


def encode_structure(N: TypeDStructure) -> dict:
    alg = N.algebra
    if isinstance(alg, TensorAlgebra):
        doc = _head("dd")
        doc["left"] = algebra_ref(alg.left)
        doc["right"] = algebra_ref(alg.right)
    else:
        doc = _head("typed")
        doc["algebra"] = algebra_ref(alg)
    doc.update(_body(N))
    return doc


def _parse_body(alg: Algebra, body: dict) -> TypeDStructure:
    try:
        if isinstance(alg, TensorAlgebra):
            gens = {g: (lv, rv) for g, lv, rv in body["generators"]}
        else:
            gens = {g: v for g, v in body["generators"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed generator list: {exc}") from None
    probe = TypeDStructure(alg, gens, {}, check=False)
    arrows = _parse_coeffs(alg, body.get("arrows", []), probe)
    N = TypeDStructure(alg, gens, arrows)
    return DDBimodule.from_structure(N) if isinstance(alg, TensorAlgebra) else N


def decode_structure(doc: dict) -> TypeDStructure:
    kind = doc["kind"]
    if kind == "typed":
        return _parse_body(parse_algebra_ref(doc["algebra"]), doc)
    if kind == "dd":
        from .kernel.algebra import tensor_algebra

        alg = tensor_algebra(parse_algebra_ref(doc["left"]), parse_algebra_ref(doc.get("right", "torus")))
        return _parse_body(alg, doc)
    raise ParseError(f"expected a typed or dd document, got {kind!r}")


# ---------------------------------------------------------------- morphisms

def encode_morphism(phi: Morphism, kind: str = "morphism") -> dict:
    doc = _head(kind)
    doc["source"] = encode_structure(phi.source)
    doc["target"] = encode_structure(phi.target)
    doc["components"] = _coeff_list(phi.algebra, phi.coeffs)
    return doc


def decode_morphism(doc: dict) -> Morphism:
    src = decode_structure(doc["source"])
    tgt = decode_structure(doc["target"])
    return Morphism(src, tgt, _parse_coeffs(src.algebra, doc.get("components", []), src))


def encode_homotopy(H: Morphism, phi: Morphism, psi: Morphism) -> dict:
    doc = encode_morphism(H, "homotopy")
    doc["phi"] = _coeff_list(phi.algebra, phi.coeffs)
    doc["psi"] = _coeff_list(psi.algebra, psi.coeffs)
    return doc


def decode_homotopy(doc: dict) -> tuple[Morphism, Morphism, Morphism]:
    H = decode_morphism(doc)
    src, tgt = H.source, H.target
    phi = Morphism(src, tgt, _parse_coeffs(src.algebra, doc.get("phi", []), src))
    psi = Morphism(src, tgt, _parse_coeffs(src.algebra, doc.get("psi", []), src))
    return H, phi, psi


# ---------------------------------------------------------------- typewriters

TW_MAPS = ("f", "h", "g", "fg", "gh", "fgh")


def encode_typewriter(M: Typewriter) -> dict:
    doc = _head("typewriter")
    doc["algebra"] = algebra_ref(M.algebra)
    doc["M0"] = _body(M.M0)
    doc["M1"] = _body(M.M1)
    doc["maps"] = {name: _coeff_list(M.algebra, M.component(name).coeffs) for name in TW_MAPS}
    return doc


def decode_typewriter(doc: dict) -> Typewriter:
    alg = parse_algebra_ref(doc["algebra"])
    M0, M1 = _parse_body(alg, doc["M0"]), _parse_body(alg, doc["M1"])
    blocks = {"f": (M0, M1), "h": (M0, M1), "g": (M1, M0), "fg": (M0, M0), "gh": (M1, M1),
              "fgh": (M0, M1)}
    maps = doc.get("maps", {})
    parts = {}
    for name, (s, t) in blocks.items():
        parts["d_" + name] = Morphism(s, t, _parse_coeffs(alg, maps.get(name, []), s))
    return Typewriter(M0, M1, **parts)


# ---------------------------------------------------------------- DA bimodules

def encode_da(P: DABimodule) -> dict:
    doc = _head("da")
    doc["output"] = algebra_ref(P.output)
    doc["input"] = algebra_ref(P.input)
    doc["generators"] = [[g, lv, rv] for g, (lv, rv) in P.generators.items()]
    doc["actions"] = [[p, [P.input.basis[k] for k in seq], _elem(P.output, c), q]
                      for (p, seq, q), c in P.actions.items()]
    return doc


def decode_da(doc: dict) -> DABimodule:
    A1, A2 = parse_algebra_ref(doc["output"]), parse_algebra_ref(doc["input"])
    try:
        gens = {g: (lv, rv) for g, lv, rv in doc["generators"]}
        actions = [(p, tuple(A2.index(a) for a in seq), _parse_elem(A1, out), q)
                   for p, seq, out, q in doc.get("actions", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed DA document: {exc}") from None
    return DABimodule(A1, A2, gens, actions)


# ---------------------------------------------------------------- flip modules and generalized systems

def encode_flip(F: FlipModule) -> dict:
    doc = _head("flip")
    doc["complex"] = _body(F.complex)
    doc["U"] = _coeff_list(F.complex.algebra, F.U.coeffs)
    doc["V"] = _coeff_list(F.complex.algebra, F.V.coeffs)
    doc["flip"] = _coeff_list(F.complex.algebra, F.flip.coeffs)
    return doc


def decode_flip(doc: dict) -> FlipModule:
    alg = trivial_algebra()
    M = _parse_body(alg, doc["complex"])
    U = Morphism(M, M, _parse_coeffs(alg, doc.get("U", []), M))
    V = Morphism(M, M, _parse_coeffs(alg, doc.get("V", []), M))
    cu, cv = cone(U, check=False), cone(V, check=False)
    flip = Morphism(cu, cv, _parse_coeffs(alg, doc.get("flip", []), cu))
    return FlipModule(M, U, V, flip)


def encode_generalized(G: GeneralizedCoefficientSystem) -> dict:
    doc = _head("generalized")
    doc["dd"] = encode_structure(from_coefficients(G.base))
    alg = G.base.algebra
    doc["maps"] = {I: _coeff_list(alg, G.extra[I].coeffs) for I in UNKNOWN_INTERVALS}
    doc["unchecked"] = {I: _coeff_list(alg, m.coeffs) for I, m in sorted(G.unchecked.items())}
    return doc


def decode_generalized(doc: dict) -> GeneralizedCoefficientSystem:
    from .ddcoeff import interval_block

    base: CoefficientSystem = to_coefficients(decode_structure(doc["dd"]))
    B = (base.M0, base.M1)
    alg = base.algebra
    extra, unchecked = {}, {}
    for I, rows in doc.get("maps", {}).items():
        s, t = interval_block(I)
        extra[I] = Morphism(B[s], B[t], _parse_coeffs(alg, rows, B[s]))
    for I, rows in doc.get("unchecked", {}).items():
        s, t = interval_block(I)
        unchecked[I] = Morphism(B[s], B[t], _parse_coeffs(alg, rows, B[s]))
    return GeneralizedCoefficientSystem(base, extra, unchecked)


def encode_report(report: Report, **extra: Any) -> dict:
    doc = _head("report")
    doc.update(report.as_dict())
    doc.update(extra)
    return doc


# ---------------------------------------------------------------- generic dispatch

def encode(value) -> dict:
    if isinstance(value, Typewriter):
        return encode_typewriter(value)
    if isinstance(value, TypeDStructure):
        return encode_structure(value)
    if isinstance(value, Morphism):
        return encode_morphism(value)
    if isinstance(value, DABimodule):
        return encode_da(value)
    if isinstance(value, FlipModule):
        return encode_flip(value)
    if isinstance(value, GeneralizedCoefficientSystem):
        return encode_generalized(value)
    if isinstance(value, Algebra):
        return encode_algebra(value)
    if isinstance(value, Report):
        return encode_report(value)
    raise TypeError(f"cannot encode {type(value).__name__}")


def decode(doc: dict):
    kind = doc.get("kind")
    try:
        if kind == "algebra":
            return parse_algebra_ref(doc["algebra"])
        if kind in ("typed", "dd"):
            return decode_structure(doc)
        if kind == "morphism":
            return decode_morphism(doc)
        if kind == "homotopy":
            return decode_homotopy(doc)
        if kind == "typewriter":
            return decode_typewriter(doc)
        if kind == "da":
            return decode_da(doc)
        if kind == "flip":
            return decode_flip(doc)
        if kind == "generalized":
            return decode_generalized(doc)
        if kind == "report":
            return Report(list(doc.get("violations", [])), list(doc.get("caveats", [])))
    except KeyError as exc:
        raise ParseError(f"{kind} document is missing field {exc}") from None
    raise ParseError(f"unknown document kind {kind!r}")


def _flip_example() -> FlipModule:
    """One-generator complex, ``U = V = 0`` and the identity flip."""
    from .typed import identity_morphism

    alg = trivial_algebra()
    M = TypeDStructure(alg, {"m": "e"})
    Z = Morphism.zero(M, M)
    C = cone(Z, check=False)
    return FlipModule(M, Z, Z, identity_morphism(C))


RESERVED = {
    "torus": torus_algebra,
    "strands-torus": strand_algebra_torus,
    "trivial": trivial_algebra,
    "m": model_m,
    "cfdd-id": cfdd_identity,
    "id-typewriter": identity_typewriter,
    "id-da-torus": lambda: identity_da(torus_algebra()),
    "id-da-strands-torus": lambda: identity_da(strand_algebra_torus()),
    "elementary-0": lambda: elementary_module(torus_algebra(), 0),
    "elementary-1": lambda: elementary_module(torus_algebra(), 1),
    "flip-id": _flip_example,
}


def reserved(name: str):
    try:
        return RESERVED[name]()
    except KeyError:
        raise ParseError(f"unknown reserved name {name!r}; known: {', '.join(sorted(RESERVED))}") from None


__all__ = [
    "FORMAT", "ParseError", "RESERVED", "dumps", "loads", "encode", "decode", "reserved",
    "encode_structure", "decode_structure", "encode_morphism", "decode_morphism",
    "encode_typewriter", "decode_typewriter", "encode_da", "decode_da", "encode_flip",
    "decode_flip", "encode_generalized", "decode_generalized", "encode_report", "encode_homotopy",
    "decode_homotopy", "algebra_ref", "parse_algebra_ref",
]
