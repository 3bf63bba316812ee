"""Surfaces, mapping classes and fixed-point-free involutions.

Torus maps are affine maps of R^2/Z^2 with exact rational translations.  The
two model involutions are

* ``SIGMA_PLUS``  : (x, y) -> (x + 1/2, y)        (orientation preserving)
* ``SIGMA_MINUS`` : (x, y) -> (x + 1/2, -y)       (orientation reversing)

and every fixed-point-free involution of the torus is conjugate to one of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Union

from .lattice import I2, IntMat2

HALF = Fraction(1, 2)


# -- surfaces and mapping classes ----------------------------------------------


@dataclass(frozen=True)
class Surface:
    kind: str  # sphere | rp2 | torus | klein | genus
    genus: Optional[int] = None

    KINDS = ("sphere", "rp2", "torus", "klein", "genus")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown surface kind {self.kind!r}")
        if self.kind == "genus":
            if self.genus is None or self.genus < 2:
                raise ValueError("OrientableGenus needs g >= 2; use the dedicated tags below that")
        elif self.genus is not None:
            object.__setattr__(self, "genus", None)

    @property
    def orientable(self) -> bool:
        return self.kind in ("sphere", "torus", "genus")

    @property
    def euler_characteristic(self) -> int:
        return {"sphere": 2, "rp2": 1, "torus": 0, "klein": 0}.get(self.kind, 2 - 2 * (self.genus or 0))

    def __str__(self):
        if self.kind == "genus":
            return f"OrientableGenus({self.genus})"
        return {"sphere": "Sphere", "rp2": "RP2", "torus": "Torus", "klein": "KleinBottle"}[self.kind]


SPHERE = Surface("sphere")
RP2 = Surface("rp2")
TORUS = Surface("torus")
KLEIN = Surface("klein")


def orientable_genus(g: int) -> Surface:
    return Surface("genus", g)


SPHERE_CLASSES = ("identity", "antipodal")
RP2_CLASSES = ("identity",)
# MCG(K) = Z2 x Z2 generated by the Dehn twist and the Y-homeomorphism
KLEIN_CLASSES = ("identity", "dehn_twist", "y", "dehn_twist_y")
NT_KINDS = ("periodic", "reducible", "pseudo_anosov")


def klein_class_bits(name: str) -> tuple[int, int]:
    i = KLEIN_CLASSES.index(name)
    return (i & 1, i >> 1)


def klein_class_product(x: str, y: str) -> str:
    a, b = klein_class_bits(x), klein_class_bits(y)
    return KLEIN_CLASSES[(a[0] ^ b[0]) | ((a[1] ^ b[1]) << 1)]


@dataclass(frozen=True)
class DeclaredNT:
    """Caller-declared Nielsen-Thurston label for a higher-genus class."""

    kind: str
    label: str = ""

    def __post_init__(self):
        if self.kind not in NT_KINDS:
            raise ValueError(f"unknown Nielsen-Thurston kind {self.kind!r}")


@dataclass(frozen=True)
class MappingClassRep:
    surface: Surface
    data: Union[str, IntMat2, DeclaredNT]

    def problems(self) -> list[str]:
        s, d = self.surface.kind, self.data
        allowed = {"sphere": SPHERE_CLASSES, "rp2": RP2_CLASSES, "klein": KLEIN_CLASSES}
        if s in allowed:
            if d not in allowed[s]:
                return [f"mapping class {d!r} not in MCG({self.surface}) = {list(allowed[s])}"]
        elif s == "torus":
            if not isinstance(d, IntMat2):
                return ["torus mapping class must be an integer matrix"]
            if not d.is_unimodular():
                return ["monodromy not unimodular"]
        elif not isinstance(d, DeclaredNT):
            return ["genus >= 2 mapping class must carry a declared Nielsen-Thurston label"]
        return []


def torus_class(m) -> MappingClassRep:
    return MappingClassRep(TORUS, IntMat2.of(m))


# -- affine torus maps ---------------------------------------------------------


def _mod1(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class AffineTorusMap:
    linear: IntMat2
    translation: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))

    def __post_init__(self):
        object.__setattr__(self, "linear", IntMat2.of(self.linear))
        bx, by = self.translation
        object.__setattr__(self, "translation", (_mod1(bx), _mod1(by)))

    def __call__(self, v):
        x, y = self.linear.apply(v)
        return (_mod1(x + self.translation[0]), _mod1(y + self.translation[1]))

    def inverse(self) -> "AffineTorusMap":
        inv = self.linear.inverse()
        bx, by = inv.apply(self.translation)
        return AffineTorusMap(inv, (-bx, -by))

    def conjugate_by(self, h: "AffineTorusMap") -> "AffineTorusMap":
        """``h o self o h^-1``."""
        return affine_compose(h, affine_compose(self, h.inverse()))


def affine_compose(f: AffineTorusMap, g: AffineTorusMap) -> AffineTorusMap:
    """``f o g``: (A, b) o (C, d) = (AC, Ad + b)."""
    dx, dy = f.linear.apply(g.translation)
    return AffineTorusMap(f.linear @ g.linear, (dx + f.translation[0], dy + f.translation[1]))


def linear_map(h) -> AffineTorusMap:
    return AffineTorusMap(IntMat2.of(h))


IDENTITY_MAP = AffineTorusMap(I2)
SIGMA_PLUS = AffineTorusMap(I2, (HALF, Fraction(0)))
SIGMA_MINUS = AffineTorusMap(IntMat2(1, 0, 0, -1), (HALF, Fraction(0)))


def _primitive(v):
    from math import gcd

    g = gcd(v[0], v[1])
    return (v[0] // g, v[1] // g)


def _image_direction(n: IntMat2):
    """Primitive generator of the column space of a rank-one integer matrix."""
    for col in ((n.a, n.c), (n.b, n.d)):
        if col != (0, 0):
            return _primitive(col)
    raise ValueError("zero matrix has no image direction")


def translation_solvable(n: IntMat2, w) -> bool:
    """Whether ``n v = w (mod Z^2)`` has a solution ``v`` in R^2."""
    wx, wy = (Fraction(c) for c in w)
    if n.det() != 0:
        return True
    if n.as_tuple() == (0, 0, 0, 0):
        return wx.denominator == 1 and wy.denominator == 1
    ux, uy = _image_direction(n)
    # w + k in R.u for some integer k  <=>  det(u, w) is an integer
    return (ux * wy - uy * wx).denominator == 1


class InvolutionCheck(NamedTuple):
    is_involution: bool
    fixed_point_free: bool


def involution_check(f: AffineTorusMap) -> InvolutionCheck:
    a, (bx, by) = f.linear, f.translation
    sq = a @ a
    ax, ay = a.apply((bx, by))
    is_inv = sq == I2 and (ax + bx).denominator == 1 and (ay + by).denominator == 1
    n = IntMat2(a.a - 1, a.b, a.c, a.d - 1)
    has_fixed = translation_solvable(n, (-bx, -by))
    return InvolutionCheck(is_inv, not has_fixed)


# -- involution representations ------------------------------------------------

ANTIPODAL_S2 = "Antipodal_S2"
SIGMA_PLUS_T2 = "SigmaPlus_T2"
SIGMA_MINUS_T2 = "SigmaMinus_T2"
SIGMA_K = "SigmaK_K"


@dataclass(frozen=True)
class DeclaredInvolution:
    """Opaque free involution on a higher-genus surface."""

    label: str = ""
    orientation_reversing: bool = True


@dataclass(frozen=True)
class InvolutionRep:
    """Free involution ``sigma = h o sigma_0 o h^-1``.

    ``data`` is an ``AffineTorusMap`` on the torus, the tag ``"antipodal"`` on
    the sphere, ``"sigma_k"`` on the Klein bottle, or a ``DeclaredInvolution``.
    ``conjugator`` optionally records ``h``.
    """

    surface: Surface
    data: Union[AffineTorusMap, str, DeclaredInvolution]
    conjugator: Optional[MappingClassRep] = field(default=None)

    def problems(self, name: str = "involution") -> list[str]:
        kind = self.surface.kind
        if kind == "torus":
            if not isinstance(self.data, AffineTorusMap):
                return [f"{name} on the torus must be an affine map"]
            if not self.data.linear.is_unimodular():
                return [f"{name} linear part not unimodular"]
            check = involution_check(self.data)
            out = []
            if not check.is_involution:
                out.append(f"{name} does not square to the identity")
            if not check.fixed_point_free:
                out.append(f"{name} has fixed points")
            if not out and self.conjugator is not None:
                out += self.conjugator.problems()
                if not out:
                    model = SIGMA_PLUS if self.data.linear.det() == 1 else SIGMA_MINUS
                    if conjugating_translation(model, self.data, self.conjugator.data) is None:
                        out.append(f"{name} is not a conjugate of its model by the recorded conjugator")
            return out
        if kind == "sphere":
            return [] if self.data == "antipodal" else [f"{name} on the sphere must be the antipodal map"]
        if kind == "klein":
            if self.data != "sigma_k":
                return [f"{name} on the Klein bottle must be sigma_k"]
            if self.conjugator is not None:
                return self.conjugator.problems()
            return []
        if kind == "rp2":
            return [f"{name}: RP2 admits no fixed-point-free involution"]
        if not isinstance(self.data, DeclaredInvolution):
            return [f"{name} on a genus >= 2 surface must be declared"]
        return []


def torus_involution(linear, translation, conjugator=None) -> InvolutionRep:
    tx, ty = (Fraction(t) for t in translation)
    cj = None if conjugator is None else torus_class(conjugator)
    return InvolutionRep(TORUS, AffineTorusMap(IntMat2.of(linear), (tx, ty)), cj)


def conjugated_model(h, model: AffineTorusMap = SIGMA_MINUS) -> InvolutionRep:
    """``h o model o h^-1`` for a linear ``h``, with ``h`` recorded."""
    h = IntMat2.of(h)
    return InvolutionRep(TORUS, model.conjugate_by(linear_map(h)), torus_class(h))


class NormalizedInvolution(NamedTuple):
    cls: str
    conjugator: MappingClassRep
    affine_conjugator: Optional[AffineTorusMap]  # torus only: sigma = c o model o c^-1


def conjugating_translation(src: AffineTorusMap, dst: AffineTorusMap, h: IntMat2) -> Optional[AffineTorusMap]:
    """Affine ``c = (h, b)`` with ``c o src o c^-1 = dst``, or None."""
    base = src.conjugate_by(linear_map(h))
    if base.linear != dst.linear:
        return None
    resid = (dst.translation[0] - base.translation[0], dst.translation[1] - base.translation[1])
    a = dst.linear
    n = IntMat2(1 - a.a, -a.b, -a.c, 1 - a.d)  # (I - A) b = resid
    if n.det() != 0:
        det = Fraction(n.det())
        b = ((n.d * resid[0] - n.b * resid[1]) / det, (-n.c * resid[0] + n.a * resid[1]) / det)
    elif n.as_tuple() == (0, 0, 0, 0):
        if resid[0].denominator != 1 or resid[1].denominator != 1:
            return None
        b = (Fraction(0), Fraction(0))
    else:
        b = _rank_one_solution(n, resid)
        if b is None:
            return None
    cand = AffineTorusMap(h, b)
    return cand if src.conjugate_by(cand) == dst else None


def _rank_one_solution(n: IntMat2, w):
    # n = u r^T with u primitive: shift w by an integer vector onto the line
    # R.u, then b = s r / |r|^2 solves r.b = s
    ux, uy = _image_direction(n)
    det = ux * w[1] - uy * w[0]
    if Fraction(det).denominator != 1:
        return None
    _, x, y = _ext_gcd(ux, uy)  # ux*x + uy*y = +-1
    unit = ux * x + uy * y
    kx, ky = det * y * unit, -det * x * unit
    wx, wy = w[0] + kx, w[1] + ky
    s = wx / ux if ux else wy / uy
    r = (n.a // ux, n.b // ux) if ux else (n.c // uy, n.d // uy)
    rr = r[0] * r[0] + r[1] * r[1]
    return (s * r[0] / rr, s * r[1] / rr)


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return (g, y, x - (a // b) * y)


def _eigen_frame(a: IntMat2) -> IntMat2:
    """Columns: primitive +1 and -1 eigenvectors of a reflection, det +1."""
    plus = _kernel(IntMat2(a.a - 1, a.b, a.c, a.d - 1))
    if plus[0] < 0 or (plus[0] == 0 and plus[1] < 0):
        plus = (-plus[0], -plus[1])
    minus = _kernel(IntMat2(a.a + 1, a.b, a.c, a.d + 1))
    h = IntMat2(plus[0], minus[0], plus[1], minus[1])
    if h.det() not in (1, -1):
        raise ValueError("reflection is not of diagonal type")
    if h.det() < 0:
        h = IntMat2(plus[0], -minus[0], plus[1], -minus[1])
    return h


def _kernel(n: IntMat2):
    for row in ((n.a, n.b), (n.c, n.d)):
        if row != (0, 0):
            return _primitive((row[1], -row[0]))
    raise ValueError("zero matrix")


_PLUS_FRAMES = {
    (HALF, Fraction(0)): I2,
    (Fraction(0), HALF): IntMat2(0, -1, 1, 0),
    (HALF, HALF): IntMat2(1, 0, 1, 1),
}


def normalize_involution(sigma: InvolutionRep) -> NormalizedInvolution:
    problems = sigma.problems()
    if problems:
        raise ValueError(f"not a fixed-point-free involution: {'; '.join(problems)}")
    kind = sigma.surface.kind
    cj = sigma.conjugator
    if kind == "sphere":
        return NormalizedInvolution(ANTIPODAL_S2, cj or MappingClassRep(SPHERE, "identity"), None)
    if kind == "klein":
        return NormalizedInvolution(SIGMA_K, cj or MappingClassRep(KLEIN, "identity"), None)
    if kind != "torus":
        raise ValueError("no normal form for involutions of genus >= 2 surfaces")
    f = sigma.data
    if f.linear.det() == 1:
        cls, model = SIGMA_PLUS_T2, SIGMA_PLUS
        default = _PLUS_FRAMES[f.translation]
    else:
        cls, model = SIGMA_MINUS_T2, SIGMA_MINUS
        default = _eigen_frame(f.linear)
    for h in ([cj.data] if cj is not None else []) + [default]:
        c = conjugating_translation(model, f, h)
        if c is not None:
            return NormalizedInvolution(cls, torus_class(h), c)
    raise ArithmeticError("normalisation failed to certify a conjugator")


def klein_pair_matrix(h: IntMat2) -> IntMat2:
    """Linear part of ``sigma_- o h o sigma_- o h^-1`` in closed form."""
    h = IntMat2.of(h)
    if h.det() != 1:
        raise ValueError("klein_pair_matrix needs det(h) = 1")
    h11, h12, h21, h22 = h.as_tuple()
    diag = h11 * h22 + h12 * h21
    return IntMat2(diag, -2 * h11 * h12, -2 * h21 * h22, diag)
