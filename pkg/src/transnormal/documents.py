"""JSON descriptor and report documents.

A descriptor document is an object with a ``type`` field and type-specific
fields; matrices are row-major 4-integer arrays and translations are exact
rational strings such as ``"1/2"``.  Unknown fields are rejected.
"""

from __future__ import annotations

import json
from dataclasses import fields, is_dataclass
from fractions import Fraction

from . import __version__
from .atlas import ManifoldId
from .classifier import (
    ClassificationReport,
    KleinBottled,
    RealProjective,
    Spherical,
    Symbolic,
    Toric,
    Undecided,
)
from .involutions import (
    KLEIN_CLASSES,
    NT_KINDS,
    RP2_CLASSES,
    SPHERE_CLASSES,
    AffineTorusMap,
    DeclaredInvolution,
    DeclaredNT,
    InvolutionRep,
    MappingClassRep,
    Surface,
)
from .lattice import IntMat2

FOILS = {"sphere": "sphere", "rp2": "rp2", "torus": "torus", "klein": "klein", "genus": "genus"}


class DocumentError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


def _keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise DocumentError(path, "expected an object")
    for k in obj:
        if k not in required and k not in optional:
            raise DocumentError(f"{path}.{k}", "unknown field")
    for k in required:
        if k not in obj:
            raise DocumentError(f"{path}.{k}", "missing field")


def _matrix(v, path) -> IntMat2:
    if (
        not isinstance(v, list)
        or len(v) != 4
        or not all(isinstance(e, int) and not isinstance(e, bool) for e in v)
    ):
        raise DocumentError(path, "expected an array of 4 integers")
    return IntMat2(*v)


def _rational(v, path) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise DocumentError(path, "expected a rational string like \"1/2\"")
    try:
        return Fraction(v)
    except (ValueError, ZeroDivisionError):
        raise DocumentError(path, f"not a rational number: {v!r}") from None


def _choice(v, path, allowed):
    if v not in allowed:
        raise DocumentError(path, f"expected one of {list(allowed)}, got {v!r}")
    return v


def _surface(doc, path) -> Surface:
    kind = _choice(doc.get("foil"), f"{path}.foil", FOILS)
    if kind == "genus":
        g = doc.get("genus")
        if not isinstance(g, int) or isinstance(g, bool) or g < 2:
            raise DocumentError(f"{path}.genus", "genus >= 2 required for foil 'genus'")
        return Surface("genus", g)
    if "genus" in doc:
        raise DocumentError(f"{path}.genus", "only allowed with foil 'genus'")
    return Surface(kind)


def _declared_nt(v, path) -> DeclaredNT:
    _keys(v, path, ("nt",), ("label",))
    kind = _choice(v["nt"], f"{path}.nt", NT_KINDS)
    label = v.get("label", "")
    if not isinstance(label, str):
        raise DocumentError(f"{path}.label", "expected a string")
    return DeclaredNT(kind, label)


def _mapping_class(v, surface: Surface, path) -> MappingClassRep:
    kind = surface.kind
    if kind == "torus":
        return MappingClassRep(surface, _matrix(v, path))
    if kind == "genus":
        return MappingClassRep(surface, _declared_nt(v, path))
    allowed = {"sphere": SPHERE_CLASSES, "rp2": RP2_CLASSES, "klein": KLEIN_CLASSES}[kind]
    return MappingClassRep(surface, _choice(v, path, allowed))


def _involution(v, surface: Surface, path) -> InvolutionRep:
    kind = surface.kind
    if kind == "torus":
        _keys(v, path, ("linear", "translation"), ("conjugator",))
        tr = v["translation"]
        if not isinstance(tr, list) or len(tr) != 2:
            raise DocumentError(f"{path}.translation", "expected two rational strings")
        b = tuple(_rational(x, f"{path}.translation[{i}]") for i, x in enumerate(tr))
        cj = None
        if "conjugator" in v:
            cj = MappingClassRep(surface, _matrix(v["conjugator"], f"{path}.conjugator"))
        return InvolutionRep(surface, AffineTorusMap(_matrix(v["linear"], f"{path}.linear"), b), cj)
    if kind == "sphere":
        return InvolutionRep(surface, _choice(v, path, ("antipodal",)))
    if kind == "klein":
        if isinstance(v, str):
            return InvolutionRep(surface, _choice(v, path, ("sigma_k",)))
        _keys(v, path, ("map",), ("conjugator",))
        _choice(v["map"], f"{path}.map", ("sigma_k",))
        cj = None
        if "conjugator" in v:
            cj = MappingClassRep(surface, _choice(v["conjugator"], f"{path}.conjugator", KLEIN_CLASSES))
        return InvolutionRep(surface, "sigma_k", cj)
    if kind == "genus":
        _keys(v, path, ("declared",), ("orientation_reversing",))
        orev = v.get("orientation_reversing", True)
        if not isinstance(v["declared"], str) or not isinstance(orev, bool):
            raise DocumentError(path, "declared involution needs a string label and a boolean flag")
        return InvolutionRep(surface, DeclaredInvolution(v["declared"], orev))
    # RP2 has no free involution; keep the value so validation can say so
    return InvolutionRep(surface, str(v))


_BUNDLE_SURFACE = {"point_disk3": "sphere", "solid_torus": "torus", "solid_klein": "klein"}


def parse_descriptor(doc):
    """Document (parsed JSON object) -> descriptor."""
    if not isinstance(doc, dict):
        raise DocumentError("$", "expected an object")
    kind = _choice(doc.get("type"), "$.type", ("toric", "klein_bottled", "spherical", "real_projective"))
    if kind == "toric":
        _keys(doc, "$", ("type", "foil", "monodromy"), ("genus",))
        foil = _surface(doc, "$")
        return Toric(foil, _mapping_class(doc["monodromy"], foil, "$.monodromy"))
    if kind == "klein_bottled":
        _keys(doc, "$", ("type", "foil", "sigma1", "sigma2"), ("genus", "composition"))
        foil = _surface(doc, "$")
        comp = None
        if "composition" in doc:
            comp = _declared_nt(doc["composition"], "$.composition")
        return KleinBottled(
            foil,
            _involution(doc["sigma1"], foil, "$.sigma1"),
            _involution(doc["sigma2"], foil, "$.sigma2"),
            comp,
        )
    if kind == "spherical":
        _keys(doc, "$", ("type", "bundle"), ("attach", "bundle2"))
        bundle = _choice(doc["bundle"], "$.bundle", _BUNDLE_SURFACE)
        bundle2 = None
        if "bundle2" in doc:
            bundle2 = _choice(doc["bundle2"], "$.bundle2", _BUNDLE_SURFACE)
        attach = _matrix(doc["attach"], "$.attach") if "attach" in doc else None
        return Spherical(bundle, attach, bundle2)
    _keys(doc, "$", ("type", "bundle", "boundary_involution"))
    bundle = _choice(doc["bundle"], "$.bundle", _BUNDLE_SURFACE)
    surface = Surface(_BUNDLE_SURFACE[bundle])
    return RealProjective(bundle, _involution(doc["boundary_involution"], surface, "$.boundary_involution"))


def loads_descriptor(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("$", f"invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_descriptor(doc)


# -- serialisation -------------------------------------------------------------


def _frac(x: Fraction) -> str:
    return str(Fraction(x))


def _surface_fields(s: Surface) -> dict:
    out = {"foil": s.kind}
    if s.kind == "genus":
        out["genus"] = s.genus
    return out


def _mc_doc(m: MappingClassRep):
    d = m.data
    if isinstance(d, IntMat2):
        return list(d.as_tuple())
    if isinstance(d, DeclaredNT):
        return {"nt": d.kind, "label": d.label}
    return d


def _inv_doc(s: InvolutionRep):
    d = s.data
    if isinstance(d, AffineTorusMap):
        out = {"linear": list(d.linear.as_tuple()), "translation": [_frac(t) for t in d.translation]}
        if s.conjugator is not None:
            out["conjugator"] = list(s.conjugator.data.as_tuple())
        return out
    if isinstance(d, DeclaredInvolution):
        return {"declared": d.label, "orientation_reversing": d.orientation_reversing}
    if s.surface.kind == "klein" and s.conjugator is not None:
        return {"map": d, "conjugator": s.conjugator.data}
    return d


def descriptor_to_doc(d) -> dict:
    if isinstance(d, Toric):
        return {"type": "toric", **_surface_fields(d.foil), "monodromy": _mc_doc(d.monodromy)}
    if isinstance(d, KleinBottled):
        out = {
            "type": "klein_bottled",
            **_surface_fields(d.foil),
            "sigma1": _inv_doc(d.sigma1),
            "sigma2": _inv_doc(d.sigma2),
        }
        if d.composition is not None:
            out["composition"] = {"nt": d.composition.kind, "label": d.composition.label}
        return out
    if isinstance(d, Spherical):
        out = {"type": "spherical", "bundle": d.bundle}
        if d.attach is not None:
            out["attach"] = list(d.attach.as_tuple())
        if d.bundle2 is not None:
            out["bundle2"] = d.bundle2
        return out
    return {
        "type": "real_projective",
        "bundle": d.bundle,
        "boundary_involution": _inv_doc(d.boundary_involution),
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def to_jsonable(x):
    """Plain JSON view of report values (tuples, fractions, dataclasses...)."""
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, Fraction):
        return _frac(x)
    if isinstance(x, IntMat2):
        return list(x.as_tuple())
    if isinstance(x, (ManifoldId, Symbolic)):
        return str(x)
    if isinstance(x, Undecided):
        return {"undecided": x.reason}
    if isinstance(x, (tuple, list)):
        return [to_jsonable(e) for e in x]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if is_dataclass(x):
        return {f.name: to_jsonable(getattr(x, f.name)) for f in fields(x)}
    return str(x)


def report_to_doc(report: ClassificationReport, descriptor) -> dict:
    cover = report.essential_cover
    return {
        "tool": "transnormal",
        "version": __version__,
        "input": descriptor_to_doc(descriptor),
        "report": {
            "ambient": str(report.ambient),
            "orientable": report.orientable,
            "canonical_invariant": to_jsonable(report.canonical_invariant),
            "cpc": {"admissible": report.cpc.admissible, "geometry": report.cpc.geometry},
            "cohomogeneity_one": to_jsonable(report.cohom1),
            "essential_cover": {
                "cover": str(cover.cover),
                "cover_type": cover.cover_type,
                "deck_generators": [
                    {"tag": g.tag, "value": to_jsonable(g.value), "surface_map": to_jsonable(g.surface_map)}
                    for g in cover.deck_generators
                ],
            },
        },
    }
