"""Descriptors of codimension-one transnormal systems on compact 3-manifolds and
the decision procedures built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from . import lattice as lat
from .atlas import (
    KleinParams,
    ManifoldId,
    glue_lens,
    klein_homeo,
    lens_homeo,
    resolve_coincidences,
)
from .involutions import (
    HALF,
    KLEIN,
    SIGMA_MINUS_T2,
    SIGMA_PLUS_T2,
    SPHERE,
    TORUS,
    AffineTorusMap,
    DeclaredInvolution,
    DeclaredNT,
    InvolutionRep,
    MappingClassRep,
    Surface,
    affine_compose,
    conjugating_translation,
    klein_class_product,
    normalize_involution,
)
from .lattice import GL, IntMat2

BUNDLES = ("point_disk3", "solid_torus", "solid_klein")
BOUNDARY = {"point_disk3": SPHERE, "solid_torus": TORUS, "solid_klein": KLEIN}

GEOMETRIES = ("S3", "S2xR", "E3", "Nil", "Sol", "H2xR", "NoneCPC", "UnspecifiedByPaper")
COVER_TYPES = (
    "toric",
    "klein_bottled",
    "spherical",
    "real_projective",
    "cylindrical",
    "planar",
    "twisted_cylindrical",
)


class InvalidDescriptor(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class Undecided:
    reason: str

    def __bool__(self):
        raise TypeError("Undecided has no truth value")


# -- descriptors ---------------------------------------------------------------


@dataclass(frozen=True)
class Toric:
    foil: Surface
    monodromy: MappingClassRep


@dataclass(frozen=True)
class KleinBottled:
    foil: Surface
    sigma1: InvolutionRep
    sigma2: InvolutionRep
    # higher genus only: declared class of sigma2 o sigma1
    composition: Optional[DeclaredNT] = None


@dataclass(frozen=True)
class Spherical:
    bundle: str
    attach: Optional[IntMat2] = None
    bundle2: Optional[str] = None  # defaults to ``bundle``


@dataclass(frozen=True)
class RealProjective:
    bundle: str
    boundary_involution: InvolutionRep


Descriptor = Union[Toric, KleinBottled, Spherical, RealProjective]


def validate_descriptor(d: Descriptor) -> list[str]:
    out: list[str] = []
    if isinstance(d, Toric):
        if d.monodromy.surface != d.foil:
            out.append(f"monodromy lives on {d.monodromy.surface}, foil is {d.foil}")
        out += d.monodromy.problems()
    elif isinstance(d, KleinBottled):
        if d.foil.kind == "rp2":
            out.append("RP2 admits no fixed-point-free involution")
            return out
        for name, s in (("sigma_1", d.sigma1), ("sigma_2", d.sigma2)):
            if s.surface != d.foil:
                out.append(f"{name} lives on {s.surface}, foil is {d.foil}")
            else:
                out += s.problems(name)
        if d.foil.kind == "genus":
            if d.composition is None:
                out.append("genus >= 2 Klein-bottled descriptor needs a declared composition class")
        elif d.composition is not None:
            out.append("declared composition class only applies to genus >= 2 foils")
    elif isinstance(d, Spherical):
        second = d.bundle2 or d.bundle
        for b in (d.bundle, second):
            if b not in BUNDLES:
                out.append(f"unknown bundle kind {b!r}")
        if out:
            return out
        if second != d.bundle:
            out.append(f"bundle kinds differ on the two sides ({d.bundle} vs {second})")
        if d.bundle == "solid_torus":
            if d.attach is None:
                out.append("solid-torus gluing needs an attach matrix")
            elif not d.attach.is_unimodular():
                out.append("attach not unimodular")
        elif d.attach is not None:
            out.append(f"attach matrix given for {d.bundle}; only solid-torus gluings take one")
    elif isinstance(d, RealProjective):
        if d.bundle not in BUNDLES:
            return [f"unknown bundle kind {d.bundle!r}"]
        want = BOUNDARY[d.bundle]
        if d.boundary_involution.surface != want:
            out.append(
                f"boundary involution lives on {d.boundary_involution.surface}, bundle boundary is {want}"
            )
        else:
            out += d.boundary_involution.problems("boundary involution")
    else:
        out.append(f"not a descriptor: {type(d).__name__}")
    return out


def _require_valid(d: Descriptor):
    v = validate_descriptor(d)
    if v:
        raise InvalidDescriptor(v)


# -- invariants ----------------------------------------------------------------


def _torus_sigmas(d: KleinBottled):
    return d.sigma1.data, d.sigma2.data


def _orientation_word(f: AffineTorusMap) -> str:
    return SIGMA_PLUS_T2 if f.linear.det() == 1 else SIGMA_MINUS_T2


def klein_composition(d: KleinBottled) -> AffineTorusMap:
    """sigma_2 o sigma_1 on a torus foil."""
    s1, s2 = _torus_sigmas(d)
    return affine_compose(s2, s1)


def _klein_relative_class(d: KleinBottled) -> str:
    def cls(s: InvolutionRep):
        return s.conjugator.data if s.conjugator is not None else "identity"

    # h1^-1 h2 in the abelian group Z2 x Z2
    return klein_class_product(cls(d.sigma1), cls(d.sigma2))


def _plus_row(f: AffineTorusMap) -> str:
    # sigma = h sigma_+ h^-1 translates by (h11/2, h21/2); the solid-torus shear
    # changes h11 by multiples of h21, so only the parity of h21 survives
    return "RP2xS1" if f.translation[1] == 0 else "S1xtwS2"


def _minus_klein(f: AffineTorusMap) -> KleinParams:
    h = normalize_involution(InvolutionRep(TORUS, f)).conjugator.data
    return KleinParams(h.c, h.d).canonical()


def canonical_invariant(d: Descriptor) -> tuple:
    _require_valid(d)
    if isinstance(d, Toric):
        m, foil = d.monodromy.data, str(d.foil)
        if d.foil.kind == "torus":
            return ("toric", foil, lat.conjugacy_token(m, GL, allow_inverse=True))
        if isinstance(m, DeclaredNT):
            return ("toric", foil, ("declared", m.kind, m.label))
        return ("toric", foil, m)
    if isinstance(d, KleinBottled):
        foil = str(d.foil)
        kind = d.foil.kind
        if kind == "sphere":
            return ("klein_bottled", foil, "antipodal_pair")
        if kind == "klein":
            return ("klein_bottled", foil, _klein_relative_class(d))
        if kind == "genus":
            c = d.composition
            return ("klein_bottled", foil, ("declared", c.kind, c.label))
        s1, s2 = _torus_sigmas(d)
        orient = tuple(sorted((_orientation_word(s1), _orientation_word(s2))))
        comp = klein_composition(d).linear
        return ("klein_bottled", foil, (orient, lat.conjugacy_token(comp, GL, allow_inverse=True)))
    if isinstance(d, Spherical):
        if d.bundle == "solid_torus":
            lp = glue_lens(d.attach)
            return ("spherical", d.bundle, (lp.p, lp.q))
        return ("spherical", d.bundle)
    f = d.boundary_involution
    if d.bundle != "solid_torus":
        return ("real_projective", d.bundle)
    cls = _orientation_word(f.data)
    if cls == SIGMA_PLUS_T2:
        return ("real_projective", d.bundle, cls, _plus_row(f.data))
    k = _minus_klein(f.data)
    return ("real_projective", d.bundle, cls, (k.p, k.q))


# -- equivalence ---------------------------------------------------------------


@dataclass(frozen=True)
class KleinWitness:
    """sigma_i' = (H, b_i) o sigma_{perm(i)} o (H, b_i)^-1."""

    linear: IntMat2
    swapped: bool
    phi1: AffineTorusMap
    phi2: AffineTorusMap


def klein_pair_search(d1: KleinBottled, d2: KleinBottled, bound: int = 5) -> Optional[KleinWitness]:
    """Bounded search for a common linear part relating two torus involution pairs."""
    a = _torus_sigmas(d1)
    b = _torus_sigmas(d2)
    h, hinv = lat._conjugators(bound, GL)

    def arr(m: IntMat2):
        return np.array([[m.a, m.b], [m.c, m.d]], dtype=np.int64)

    for swapped in (False, True):
        src = (a[1], a[0]) if swapped else a
        ok = np.ones(len(h), dtype=bool)
        for s, t in zip(src, b):
            conj = h @ arr(s.linear) @ hinv
            ok &= (conj == arr(t.linear)).all(axis=(1, 2))
        for idx in np.flatnonzero(ok):
            H = IntMat2(*(int(x) for x in h[idx].ravel()))
            phis = [conjugating_translation(s, t, H) for s, t in zip(src, b)]
            if all(p is not None for p in phis):
                return KleinWitness(H, swapped, phis[0], phis[1])
    return None


def equivalent(d1: Descriptor, d2: Descriptor, bound: int = 5) -> Union[bool, Undecided]:
    _require_valid(d1)
    _require_valid(d2)
    if type(d1) is not type(d2):
        return False
    if isinstance(d1, Toric):
        if d1.foil != d2.foil:
            return False
        m1, m2 = d1.monodromy.data, d2.monodromy.data
        if d1.foil.kind == "torus":
            return lat.conj_equivalent(m1, m2, GL, allow_inverse=True)
        if d1.foil.kind == "genus":
            return _declared_equal(m1, m2)
        return m1 == m2
    if isinstance(d1, KleinBottled):
        if d1.foil != d2.foil:
            return False
        kind = d1.foil.kind
        if kind == "sphere":
            return True
        if kind == "genus":
            return _declared_equal(d1.composition, d2.composition)
        if kind == "klein":
            if _klein_relative_class(d1) == _klein_relative_class(d2):
                return True
            return Undecided("Klein-bottle involution pairs with different relative classes")
        if klein_pair_search(d1, d2, bound) is not None:
            return True
        if canonical_invariant(d1) != canonical_invariant(d2):
            return False
        return Undecided(f"no conjugating pair with entries <= {bound} and invariants agree")
    if isinstance(d1, Spherical):
        if d1.bundle != d2.bundle:
            return False
        if d1.bundle == "solid_torus":
            return lens_homeo(glue_lens(d1.attach), glue_lens(d2.attach))
        return True
    if d1.bundle != d2.bundle:
        return False
    if d1.bundle != "solid_torus":
        return True
    f1, f2 = d1.boundary_involution.data, d2.boundary_involution.data
    c1, c2 = _orientation_word(f1), _orientation_word(f2)
    if c1 != c2:
        return False
    if c1 == SIGMA_PLUS_T2:
        return _plus_row(f1) == _plus_row(f2)
    return klein_homeo(_minus_klein(f1), _minus_klein(f2))


def _declared_equal(x: DeclaredNT, y: DeclaredNT):
    if x.kind != y.kind:
        return False
    if x.label == y.label:
        return True
    return Undecided(f"declared {x.kind} classes {x.label!r} and {y.label!r} are not comparable")


# -- ambient manifold and orientation ------------------------------------------


def ambient_manifold(d: Descriptor, resolve: bool = True) -> ManifoldId:
    """Ambient 3-manifold; ``resolve=False`` keeps raw lens/Klein parameters."""
    _require_valid(d)
    done = resolve_coincidences if resolve else (lambda m: m)
    if isinstance(d, Toric):
        inv = canonical_invariant(d)[2]
        return done(ManifoldId("MappingTorus", (str(d.foil), inv)))
    if isinstance(d, KleinBottled):
        inv = canonical_invariant(d)[2]
        return done(ManifoldId("KleinGlue", (str(d.foil), inv)))
    if isinstance(d, Spherical):
        if d.bundle == "point_disk3":
            return ManifoldId("S3")
        if d.bundle == "solid_klein":
            return ManifoldId("S1xtwS2")
        return done(ManifoldId.lens(glue_lens(d.attach)))
    if d.bundle == "point_disk3":
        return ManifoldId("RP3")
    if d.bundle == "solid_klein":
        return ManifoldId("RP2xS1")
    f = d.boundary_involution.data
    if _orientation_word(f) == SIGMA_PLUS_T2:
        return ManifoldId(_plus_row(f))
    return done(ManifoldId.klein(_minus_klein(f)))


def is_orientable(d: Descriptor) -> bool:
    _require_valid(d)
    if isinstance(d, Toric):
        m = d.monodromy.data
        kind = d.foil.kind
        if kind == "sphere":
            return m == "identity"
        if kind == "torus":
            return m.det() == 1
        # declared higher-genus classes are taken orientation preserving
        return kind == "genus"
    if isinstance(d, KleinBottled):
        kind = d.foil.kind
        if kind == "sphere":
            return True
        if kind == "torus":
            return all(s.linear.det() == -1 for s in _torus_sigmas(d))
        if kind == "genus":
            return d.sigma1.data.orientation_reversing and d.sigma2.data.orientation_reversing
        return False
    if isinstance(d, Spherical):
        return d.bundle != "solid_klein"
    if d.bundle == "point_disk3":
        return True
    if d.bundle == "solid_klein":
        return False
    return _orientation_word(d.boundary_involution.data) == SIGMA_MINUS_T2


# -- CPC and geometry ----------------------------------------------------------


@dataclass(frozen=True)
class CPCStatus:
    admissible: Optional[bool]
    geometry: str


_INFINITE_PI1 = {"S2xS1", "S1xtwS2", "RP2xS1", "RP3connRP3"}


def _finite_pi1(mid: ManifoldId) -> bool:
    if mid.tag in ("S3", "RP3"):
        return True
    if mid.tag == "Lens":
        return mid.params[0] >= 1
    if mid.tag == "Klein":
        return True
    if mid.tag in _INFINITE_PI1:
        return False
    raise ValueError(f"no spherical-space-form rule for {mid}")


def _torus_geometry(m: IntMat2) -> str:
    kind = lat.nt_type(m)
    if isinstance(kind, lat.Periodic):
        return "E3"
    if isinstance(kind, lat.Reducible):
        return "Nil"
    return "Sol"


def cpc_status(d: Descriptor) -> CPCStatus:
    _require_valid(d)
    if isinstance(d, (Spherical, RealProjective)):
        geo = "S3" if _finite_pi1(ambient_manifold(d)) else "S2xR"
        return CPCStatus(True, geo)
    orientable = is_orientable(d)
    kind = d.foil.kind
    if isinstance(d, Toric):
        m = d.monodromy.data
        if orientable:
            if kind == "sphere":
                return CPCStatus(True, "S2xR")
            if kind == "torus":
                return CPCStatus(True, _torus_geometry(m))
            return _declared_geometry(m)
        # non-orientable: only finite-order monodromies (product metric averaged
        # over the cyclic group) have a known CPC model
        if kind in ("sphere", "rp2"):
            return CPCStatus(True, "S2xR")
        if kind == "torus" and lat.matrix_order(m) is not None:
            return CPCStatus(True, "E3")
        return CPCStatus(None, "UnspecifiedByPaper")
    if not orientable:
        return CPCStatus(None, "UnspecifiedByPaper")
    if kind == "sphere":
        return CPCStatus(True, "S2xR")
    if kind == "torus":
        return CPCStatus(True, _torus_geometry(klein_composition(d).linear))
    return _declared_geometry(d.composition)


def _declared_geometry(nt: DeclaredNT) -> CPCStatus:
    if nt.kind == "periodic":
        return CPCStatus(True, "H2xR")
    return CPCStatus(False, "NoneCPC")


def cohomogeneity_one(d: Descriptor) -> Union[Optional[str], Undecided]:
    if isinstance(d, (Toric, KleinBottled)):
        return Undecided("cohomogeneity-one actions are not tabulated for this type")
    _require_valid(d)
    if d.bundle == "point_disk3":
        return "SO3"
    if d.bundle == "solid_klein":
        return None
    if isinstance(d, Spherical):
        return "T2"
    if _orientation_word(d.boundary_involution.data) == SIGMA_PLUS_T2:
        return "T2"
    return None


# -- covers --------------------------------------------------------------------


@dataclass(frozen=True)
class DeckAction:
    """Induced action on the foil space; ``value`` is the shift or the centre."""

    tag: str  # FoilPreserving | FoilTranslation | FoilReflection
    value: Optional[Fraction] = None
    surface_map: object = field(default=None, compare=True)

    def __str__(self):
        if self.tag == "FoilPreserving":
            return "FoilPreserving"
        return f"{self.tag}({self.value})"


def foil_translation(shift, surface_map=None) -> DeckAction:
    return DeckAction("FoilTranslation", Fraction(shift), surface_map)


def foil_reflection(center, surface_map=None) -> DeckAction:
    return DeckAction("FoilReflection", None if center is None else Fraction(center), surface_map)


def foil_preserving(surface_map=None) -> DeckAction:
    return DeckAction("FoilPreserving", None, surface_map)


@dataclass(frozen=True)
class Symbolic:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class EssentialCover:
    cover: Union[ManifoldId, Symbolic]
    cover_type: str
    deck_generators: tuple[DeckAction, ...]


def essential_cover(d: Descriptor) -> EssentialCover:
    _require_valid(d)
    if isinstance(d, Toric):
        return EssentialCover(
            Symbolic(f"R x {d.foil}"), "cylindrical", (foil_translation(1, d.monodromy),)
        )
    if isinstance(d, KleinBottled):
        return EssentialCover(
            Symbolic(f"R x {d.foil}"),
            "cylindrical",
            (foil_reflection(0, d.sigma1), foil_reflection(HALF, d.sigma2)),
        )
    if isinstance(d, Spherical):
        return EssentialCover(ambient_manifold(d), "spherical", ())
    if d.bundle == "point_disk3":
        cover = ManifoldId("S3")
    elif d.bundle == "solid_klein":
        cover = ManifoldId("S1xtwS2")
    elif _orientation_word(d.boundary_involution.data) == SIGMA_PLUS_T2:
        cover = ManifoldId("S2xS1")
    else:
        cover = Symbolic(f"lens space double cover of {ambient_manifold(d, resolve=False)}")
    return EssentialCover(cover, "spherical", (foil_reflection(HALF, d.boundary_involution),))


def _frac_gcd(x: Fraction, y: Fraction) -> Fraction:
    num = math.gcd(x.numerator * y.denominator, y.numerator * x.denominator)
    return Fraction(num, x.denominator * y.denominator)


@dataclass(frozen=True)
class CoverDecomposition:
    g0_generators: tuple[DeckAction, ...]
    quotient_generators: tuple[DeckAction, ...]


def decompose_cover(generators) -> CoverDecomposition:
    """Split deck generators into the foil-fixing part and the induced action
    on the foil space.  Reflections pair up into translations by twice the
    distance of their centres."""
    g0, shifts, centers = [], [], []
    reflection = None
    for g in generators:
        if g.tag == "FoilPreserving":
            g0.append(g)
        elif g.tag == "FoilTranslation":
            if g.value is None or g.value <= 0:
                raise ValueError(f"foil translation needs a positive shift, got {g.value}")
            shifts.append(Fraction(g.value))
        elif g.tag == "FoilReflection":
            if g.value is None:
                raise ValueError("foil reflection has no centre")
            centers.append(Fraction(g.value))
            if reflection is None or g.value < reflection.value:
                reflection = g
        else:
            raise ValueError(f"unknown deck action tag {g.tag!r}")
    if centers:
        c0 = min(centers)
        shifts += [2 * (c - c0) for c in centers if c != c0]
    quotient = []
    if shifts:
        t0 = shifts[0]
        for s in shifts[1:]:
            t0 = _frac_gcd(t0, s)
        quotient.append(foil_translation(t0))
    if reflection is not None:
        quotient.append(reflection)
    return CoverDecomposition(tuple(g0), tuple(quotient))


# -- report --------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    ambient: ManifoldId
    orientable: bool
    canonical_invariant: tuple
    cpc: CPCStatus
    cohom1: Union[Optional[str], Undecided]
    essential_cover: EssentialCover


def _canonical_map(obj):
    """Replace a deck generator's surface map by a class representative."""
    if isinstance(obj, MappingClassRep) and obj.surface.kind == "torus":
        return lat.canonical_representative(obj.data, GL, allow_inverse=True).as_tuple()
    if isinstance(obj, MappingClassRep):
        m = obj.data
        return (m.kind, m.label) if isinstance(m, DeclaredNT) else m
    if isinstance(obj, InvolutionRep):
        if obj.surface.kind == "torus":
            return _orientation_word(obj.data)
        if isinstance(obj.data, DeclaredInvolution):
            return "declared"
        return normalize_involution(obj).cls
    return obj


def classify(d: Descriptor) -> ClassificationReport:
    _require_valid(d)
    cover = essential_cover(d)
    gens = tuple(replace(g, surface_map=_canonical_map(g.surface_map)) for g in cover.deck_generators)
    if isinstance(d, KleinBottled):
        # which involution sits at which end is not an invariant
        gens = tuple(
            foil_reflection(c, m)
            for c, m in zip((0, HALF), sorted(g.surface_map for g in gens))
        )
    return ClassificationReport(
        ambient=ambient_manifold(d),
        orientable=is_orientable(d),
        canonical_invariant=canonical_invariant(d),
        cpc=cpc_status(d),
        cohom1=cohomogeneity_one(d),
        essential_cover=EssentialCover(cover.cover, cover.cover_type, gens),
    )
