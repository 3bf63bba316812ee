from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transnormal.classifier import (
    CPCStatus,
    InvalidDescriptor,
    KleinBottled,
    RealProjective,
    Spherical,
    Symbolic,
    Toric,
    Undecided,
    ambient_manifold,
    canonical_invariant,
    classify,
    cohomogeneity_one,
    cpc_status,
    decompose_cover,
    equivalent,
    essential_cover,
    foil_preserving,
    foil_reflection,
    foil_translation,
    is_orientable,
    klein_composition,
    klein_pair_search,
    validate_descriptor,
)
from transnormal.involutions import (
    HALF,
    KLEIN,
    KLEIN_CLASSES,
    RP2,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SPHERE,
    TORUS,
    DeclaredInvolution,
    DeclaredNT,
    InvolutionRep,
    MappingClassRep,
    conjugated_model,
    orientable_genus,
    torus_class,
    torus_involution,
)
from transnormal.lattice import GL, IntMat2, conj_equivalent, unimodular_matrices

ANTI = InvolutionRep(SPHERE, "antipodal")
G2 = orientable_genus(2)


def toric(*m):
    return Toric(TORUS, torus_class(m))


def lens(*attach):
    return Spherical("solid_torus", IntMat2(*attach))


def rp_torus(h, model=SIGMA_MINUS):
    return RealProjective("solid_torus", conjugated_model(h, model))


def kb_torus(h1, m1, h2=(1, 0, 0, 1), m2=SIGMA_MINUS):
    return KleinBottled(TORUS, conjugated_model(h1, m1), conjugated_model(h2, m2))


TORIC = [Toric(TORUS, torus_class(m)) for m in unimodular_matrices(2)]
SPHERICAL = [Spherical("solid_torus", m) for m in unimodular_matrices(3)]


# -- validation ---------------------------------------------------------------


def test_validate_examples():
    assert validate_descriptor(toric(1, 1, 0, 1)) == []
    bad = KleinBottled(TORUS, torus_involution((-1, 0, 0, -1), (0, 0)), InvolutionRep(TORUS, SIGMA_MINUS))
    assert validate_descriptor(bad) == ["sigma_1 has fixed points"]
    assert validate_descriptor(lens(2, 0, 0, 1)) == ["attach not unimodular"]


def test_validate_structure():
    assert validate_descriptor(Spherical("solid_torus", IntMat2(1, 0, 0, 1), "solid_klein"))
    assert validate_descriptor(RealProjective("point_disk3", InvolutionRep(TORUS, SIGMA_MINUS)))
    assert validate_descriptor(RealProjective("solid_klein", InvolutionRep(KLEIN, "sigma_k"))) == []
    assert validate_descriptor(Toric(TORUS, MappingClassRep(SPHERE, "identity")))
    assert validate_descriptor(KleinBottled(RP2, InvolutionRep(RP2, "x"), InvolutionRep(RP2, "x")))
    assert validate_descriptor(KleinBottled(G2, InvolutionRep(G2, DeclaredInvolution("s")), InvolutionRep(G2, DeclaredInvolution("s"))))


def test_invalid_raises():
    with pytest.raises(InvalidDescriptor):
        ambient_manifold(lens(2, 0, 0, 1))


# -- equivalence ----------------------------------------------------------------


def test_equivalent_examples():
    assert equivalent(lens(3, 7, 1, 2), lens(2, 7, 1, 4)) is True
    s_id = Toric(SPHERE, MappingClassRep(SPHERE, "identity"))
    s_anti = Toric(SPHERE, MappingClassRep(SPHERE, "antipodal"))
    assert equivalent(s_id, s_anti) is False
    assert equivalent(toric(2, 1, 1, 1), toric(1, 1, 1, 2)) is True


def test_equivalent_across_types_is_false():
    assert equivalent(toric(1, 0, 0, 1), lens(1, 0, 0, 1)) is False


def test_klein_bottled_sphere_single_class():
    assert equivalent(KleinBottled(SPHERE, ANTI, ANTI), KleinBottled(SPHERE, ANTI, ANTI)) is True


def test_klein_pair_witness():
    d1 = kb_torus((1, 0, 0, 1), SIGMA_MINUS)
    d2 = kb_torus((1, 0, 1, 1), SIGMA_MINUS, (1, 0, 1, 1), SIGMA_MINUS)
    w = klein_pair_search(d1, d2)
    assert w is not None
    src = (d1.sigma2, d1.sigma1) if w.swapped else (d1.sigma1, d1.sigma2)
    for s, t, phi in zip(src, (d2.sigma1, d2.sigma2), (w.phi1, w.phi2)):
        assert s.data.conjugate_by(phi) == t.data
        assert phi.linear == w.linear
    assert equivalent(d1, d2) is True


def test_klein_pair_distinct_classes():
    a = kb_torus((1, 0, 0, 1), SIGMA_MINUS)
    b = kb_torus((1, 0, 1, 1), SIGMA_MINUS)
    assert canonical_invariant(a) != canonical_invariant(b)
    assert equivalent(a, b) is False


def test_declared_genus_is_undecided():
    a = Toric(G2, MappingClassRep(G2, DeclaredNT("periodic", "a")))
    b = Toric(G2, MappingClassRep(G2, DeclaredNT("periodic", "b")))
    assert isinstance(equivalent(a, b), Undecided)
    assert equivalent(a, a) is True
    with pytest.raises(TypeError):
        bool(equivalent(a, b))


def test_real_projective_branches():
    assert equivalent(rp_torus((1, 0, 1, 1)), rp_torus((1, 0, -1, 1))) is True
    assert equivalent(rp_torus((1, 0, 1, 1)), rp_torus((1, 1, 1, 2))) is False
    assert equivalent(rp_torus((1, 0, 1, 1), SIGMA_PLUS), rp_torus((1, 0, 0, 1), SIGMA_PLUS)) is False
    assert equivalent(rp_torus((1, 1, 0, 1), SIGMA_PLUS), rp_torus((1, 0, 0, 1), SIGMA_PLUS)) is True


@pytest.mark.parametrize("family", [TORIC, SPHERICAL], ids=["toric", "spherical"])
def test_equivalent_is_an_equivalence_relation(family):
    n = len(family)
    rel = [[equivalent(family[i], family[j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        assert rel[i][i] is True
        for j in range(n):
            assert rel[i][j] == rel[j][i]
    for i, j, k in product(range(n), repeat=3):
        if rel[i][j] and rel[j][k]:
            assert rel[i][k]


def test_equivalence_implies_identical_reports():
    fam = TORIC + SPHERICAL
    reports = [classify(d) for d in fam]
    for i, j in product(range(len(fam)), repeat=2):
        if equivalent(fam[i], fam[j]):
            assert reports[i] == reports[j]


# -- ambient -----------------------------------------------------------------------


def test_ambient_examples():
    assert ambient_manifold(Toric(SPHERE, MappingClassRep(SPHERE, "antipodal"))).tag == "S1xtwS2"
    assert ambient_manifold(Toric(SPHERE, MappingClassRep(SPHERE, "identity"))).tag == "S2xS1"
    assert ambient_manifold(Toric(RP2, MappingClassRep(RP2, "identity"))).tag == "RP2xS1"
    assert ambient_manifold(KleinBottled(SPHERE, ANTI, ANTI)).tag == "RP3connRP3"
    assert str(ambient_manifold(rp_torus((1, 0, 1, 1)))) == "M(1,1)"
    assert ambient_manifold(rp_torus((1, 0, 0, 1))).tag == "RP3connRP3"
    assert ambient_manifold(rp_torus((0, -1, 1, 0))).tag == "S2xS1"
    assert ambient_manifold(Spherical("point_disk3")).tag == "S3"
    assert ambient_manifold(Spherical("solid_klein")).tag == "S1xtwS2"
    assert ambient_manifold(RealProjective("point_disk3", ANTI)).tag == "RP3"
    assert ambient_manifold(RealProjective("solid_klein", InvolutionRep(KLEIN, "sigma_k"))).tag == "RP2xS1"


def test_sigma_plus_row_parity():
    assert ambient_manifold(rp_torus((1, 0, 0, 1), SIGMA_PLUS)).tag == "RP2xS1"
    assert ambient_manifold(rp_torus((1, 0, 1, 1), SIGMA_PLUS)).tag == "S1xtwS2"
    assert ambient_manifold(rp_torus((1, 0, 2, 1), SIGMA_PLUS)).tag == "RP2xS1"


@pytest.mark.parametrize("n", range(-3, 4))
def test_lens_shear_invariance(n):
    shear = IntMat2(1, 0, n, 1)
    for m in unimodular_matrices(2):
        base = ambient_manifold(Spherical("solid_torus", m))
        assert ambient_manifold(Spherical("solid_torus", m @ shear)) == base
        assert ambient_manifold(Spherical("solid_torus", shear @ m)) == base


def test_orientability():
    assert is_orientable(toric(1, 1, 0, 1))
    assert not is_orientable(toric(0, 1, 1, 0))
    assert not is_orientable(Spherical("solid_klein"))
    assert is_orientable(rp_torus((1, 0, 0, 1)))
    assert not is_orientable(rp_torus((1, 0, 0, 1), SIGMA_PLUS))
    assert is_orientable(kb_torus((1, 0, 0, 1), SIGMA_MINUS))
    assert not is_orientable(kb_torus((1, 0, 0, 1), SIGMA_PLUS))


# -- cpc -----------------------------------------------------------------------------


def test_cpc_examples():
    assert cpc_status(toric(1, 1, 0, 1)) == CPCStatus(True, "Nil")
    assert cpc_status(toric(2, 1, 1, 1)) == CPCStatus(True, "Sol")
    assert cpc_status(toric(0, -1, 1, 0)) == CPCStatus(True, "E3")
    pa = Toric(G2, MappingClassRep(G2, DeclaredNT("pseudo_anosov")))
    assert cpc_status(pa) == CPCStatus(False, "NoneCPC")
    per = Toric(G2, MappingClassRep(G2, DeclaredNT("periodic")))
    assert cpc_status(per) == CPCStatus(True, "H2xR")


def test_cpc_spherical_geometry():
    assert cpc_status(Spherical("point_disk3")).geometry == "S3"
    assert cpc_status(Spherical("solid_klein")).geometry == "S2xR"
    assert cpc_status(lens(1, 0, 0, 1)) == CPCStatus(True, "S2xR")
    assert cpc_status(lens(3, 7, 1, 2)) == CPCStatus(True, "S3")
    assert cpc_status(rp_torus((1, 0, 1, 1))).geometry == "S3"
    assert cpc_status(rp_torus((1, 0, 0, 1))).geometry == "S2xR"
    assert cpc_status(rp_torus((0, -1, 1, 0))).geometry == "S2xR"
    assert cpc_status(RealProjective("point_disk3", ANTI)).geometry == "S3"


def test_cpc_non_orientable():
    assert cpc_status(Toric(RP2, MappingClassRep(RP2, "identity"))) == CPCStatus(True, "S2xR")
    assert cpc_status(toric(1, 1, 0, -1)) == CPCStatus(True, "E3")
    assert cpc_status(toric(1, 1, 1, 0)) == CPCStatus(None, "UnspecifiedByPaper")
    assert cpc_status(kb_torus((1, 0, 0, 1), SIGMA_PLUS)) == CPCStatus(None, "UnspecifiedByPaper")


@settings(max_examples=200)
@given(st.sampled_from([m for m in unimodular_matrices(2) if m.det() == 1]), st.sampled_from(unimodular_matrices(3)))
def test_cpc_depends_only_on_class(m, h):
    y = m.conjugate_by(h)
    assert conj_equivalent(m, y, GL, True)
    assert cpc_status(toric(*m)) == cpc_status(toric(*y)) == cpc_status(toric(*m.inverse()))


@pytest.mark.parametrize(
    "h", [m for m in unimodular_matrices(2) if m.det() == 1], ids=str
)
def test_klein_bottled_cpc_matches_toric_composition(h):
    d = kb_torus(h, SIGMA_MINUS)
    assert is_orientable(d)
    comp = klein_composition(d).linear
    assert cpc_status(d) == cpc_status(Toric(TORUS, torus_class(comp)))


def test_sphere_klein_bottled_cpc():
    assert cpc_status(KleinBottled(SPHERE, ANTI, ANTI)) == CPCStatus(True, "S2xR")


# -- cohomogeneity one -----------------------------------------------------------


def test_cohomogeneity_one():
    assert cohomogeneity_one(Spherical("point_disk3")) == "SO3"
    assert cohomogeneity_one(Spherical("solid_klein")) is None
    assert cohomogeneity_one(lens(1, 2, 0, 1)) == "T2"
    assert cohomogeneity_one(rp_torus((1, 0, 1, 1))) is None
    assert cohomogeneity_one(rp_torus((1, 0, 1, 1), SIGMA_PLUS)) == "T2"
    assert cohomogeneity_one(RealProjective("point_disk3", ANTI)) == "SO3"
    assert isinstance(cohomogeneity_one(toric(1, 0, 0, 1)), Undecided)


# -- covers ---------------------------------------------------------------------------


def test_essential_cover_examples():
    assert essential_cover(RealProjective("point_disk3", ANTI)).cover.tag == "S3"
    c = essential_cover(toric(2, 1, 1, 1))
    assert c.cover_type == "cylindrical"
    (g,) = c.deck_generators
    assert g.tag == "FoilTranslation" and g.value == 1
    assert g.surface_map.data == IntMat2(2, 1, 1, 1)
    assert essential_cover(RealProjective("solid_klein", InvolutionRep(KLEIN, "sigma_k"))).cover.tag == "S1xtwS2"
    assert essential_cover(rp_torus((1, 0, 0, 1), SIGMA_PLUS)).cover.tag == "S2xS1"
    assert isinstance(essential_cover(rp_torus((1, 0, 1, 1))).cover, Symbolic)
    s = essential_cover(lens(1, 2, 0, 1))
    assert s.cover.tag == "RP3" and s.deck_generators == ()


def test_decompose_examples():
    g = foil_preserving("g")
    assert decompose_cover([g]) == decompose_cover([g])
    out = decompose_cover([g])
    assert out.g0_generators == (g,) and out.quotient_generators == ()
    out = decompose_cover([foil_reflection(0), foil_reflection(HALF)])
    assert out.g0_generators == ()
    assert foil_translation(1) in out.quotient_generators
    out = decompose_cover([foil_translation(1), g])
    assert out.g0_generators == (g,)
    assert out.quotient_generators == (foil_translation(1),)
    with pytest.raises(ValueError):
        decompose_cover([foil_reflection(None)])


def _all_small_descriptors():
    yield from TORIC
    yield from SPHERICAL[:40]
    yield Spherical("point_disk3")
    yield RealProjective("point_disk3", ANTI)
    yield KleinBottled(SPHERE, ANTI, ANTI)
    for h in unimodular_matrices(1):
        yield rp_torus(h, SIGMA_PLUS)
        if h.det() == 1:
            yield rp_torus(h)
            yield kb_torus(h, SIGMA_MINUS)
    for c in KLEIN_CLASSES:
        yield RealProjective("solid_klein", InvolutionRep(KLEIN, "sigma_k", MappingClassRep(KLEIN, c)))


def test_cover_generators_have_empty_g0():
    for d in _all_small_descriptors():
        gens = essential_cover(d).deck_generators
        assert decompose_cover(gens).g0_generators == ()


def test_klein_bottle_foil_pairs():
    def kb(c1, c2):
        return KleinBottled(
            KLEIN,
            InvolutionRep(KLEIN, "sigma_k", MappingClassRep(KLEIN, c1)),
            InvolutionRep(KLEIN, "sigma_k", MappingClassRep(KLEIN, c2)),
        )

    assert equivalent(kb("y", "y"), kb("identity", "identity")) is True
    assert isinstance(equivalent(kb("y", "identity"), kb("identity", "identity")), Undecided)
    assert cpc_status(kb("y", "y")).geometry == "UnspecifiedByPaper"


def test_report_fields():
    r = classify(toric(1, 1, 0, 1))
    assert r.orientable and r.cpc.geometry == "Nil"
    assert r.ambient.tag == "MappingTorus"
    assert isinstance(r.cohom1, Undecided)
    r2 = classify(toric(1, -1, 0, 1))
    assert r == r2
    t = F(1, 2)
    assert classify(rp_torus((1, 0, 1, 1))).essential_cover.deck_generators[0].value == t
