"""Lens spaces, Klein spaces and the other ambient 3-manifolds that occur."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .lattice import IntMat2, NotInvertibleError

SPECIAL_TAGS = ("S3", "S2xS1", "S1xtwS2", "RP3", "RP2xS1", "RP3connRP3")


class InvalidParameters(ValueError):
    pass


@dataclass(frozen=True)
class LensParams:
    p: int
    q: int

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise InvalidParameters(f"invalid lens parameters L({self.p},{self.q})")

    def canonical(self) -> "LensParams":
        p = abs(self.p)
        if p == 0:
            return LensParams(0, 1)
        if p == 1:
            return LensParams(1, 0)
        q = self.q % p
        inv = pow(q, -1, p)
        return LensParams(p, min(q, -q % p, inv, -inv % p))

    def __str__(self):
        return f"L({self.p},{self.q})"


@dataclass(frozen=True)
class KleinParams:
    p: int
    q: int

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise InvalidParameters(f"invalid Klein-space parameters M({self.p},{self.q})")

    def canonical(self) -> "KleinParams":
        return KleinParams(abs(self.p), abs(self.q))

    def __str__(self):
        return f"M({self.p},{self.q})"


@dataclass(frozen=True)
class ManifoldId:
    """Ambient manifold.  ``tag`` is a special name, ``Lens``, ``Klein``,
    ``MappingTorus`` or ``KleinGlue``; ``params`` carries the family data."""

    tag: str
    params: tuple = ()

    def __str__(self):
        if self.tag == "Lens":
            return "L({},{})".format(*self.params)
        if self.tag == "Klein":
            return "M({},{})".format(*self.params)
        if self.tag in ("MappingTorus", "KleinGlue"):
            foil, inv = self.params
            return f"{self.tag}[{foil}; {_fmt(inv)}]"
        return self.tag

    @classmethod
    def lens(cls, params: LensParams) -> "ManifoldId":
        c = params.canonical()
        return cls("Lens", (c.p, c.q))

    @classmethod
    def klein(cls, params: KleinParams) -> "ManifoldId":
        c = params.canonical()
        return cls("Klein", (c.p, c.q))


def _fmt(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(_fmt(e) for e in x) + ")"
    return str(x)


def glue_lens(attach: IntMat2) -> LensParams:
    """Lens space from a boundary gluing ``(q p; s t)``: meridian -> q m + p l."""
    attach = IntMat2.of(attach)
    if not attach.is_unimodular():
        raise NotInvertibleError("attach not unimodular")
    q, p = attach.a, attach.b
    p = abs(p)
    return LensParams(p, q % p if p else 1).canonical()


def lens_homeo(x: LensParams, y: LensParams) -> bool:
    return x.canonical() == y.canonical()


def klein_homeo(x: KleinParams, y: KleinParams) -> bool:
    return x.canonical() == y.canonical()


_COINCIDENCES = {
    ("Lens", (1, 0)): "S3",
    ("Lens", (0, 1)): "S2xS1",
    ("Lens", (2, 1)): "RP3",
    ("Klein", (0, 1)): "RP3connRP3",
    ("Klein", (1, 0)): "S2xS1",
    ("MappingTorus", ("Sphere", "identity")): "S2xS1",
    ("MappingTorus", ("Sphere", "antipodal")): "S1xtwS2",
    ("MappingTorus", ("RP2", "identity")): "RP2xS1",
    ("KleinGlue", ("Sphere", "antipodal_pair")): "RP3connRP3",
}


def resolve_coincidences(mid: ManifoldId) -> ManifoldId:
    if mid.tag in SPECIAL_TAGS:
        return mid
    params = mid.params
    if mid.tag == "Lens":
        params = (lambda c: (c.p, c.q))(LensParams(*params).canonical())
    elif mid.tag == "Klein":
        params = (lambda c: (c.p, c.q))(KleinParams(*params).canonical())
    special = _COINCIDENCES.get((mid.tag, params))
    return ManifoldId(special) if special else ManifoldId(mid.tag, params)
