"""Regenerated summary tables and their reference transcriptions.

``emit_tables`` runs the classifier over finite descriptor families and
collects the distinct rows; ``GOLDEN`` holds the published tables in the same
ASCII vocabulary so the two can be compared byte-for-byte after rendering.
"""

from __future__ import annotations

import csv
import io
from itertools import product

from .classifier import (
    KleinBottled,
    RealProjective,
    Spherical,
    Symbolic,
    Toric,
    ambient_manifold,
    cohomogeneity_one,
    essential_cover,
    is_orientable,
    validate_descriptor,
)
from .involutions import (
    ANTIPODAL_S2,
    KLEIN,
    KLEIN_CLASSES,
    RP2,
    SIGMA_MINUS,
    SIGMA_MINUS_T2,
    SIGMA_PLUS,
    SIGMA_PLUS_T2,
    SPHERE,
    TORUS,
    DeclaredInvolution,
    DeclaredNT,
    InvolutionRep,
    MappingClassRep,
    conjugated_model,
    normalize_involution,
    orientable_genus,
    torus_class,
)
from .lattice import unimodular_matrices

ORDER = ("spherical", "summary", "real_projective")

TITLES = {
    "spherical": "Spherical type: equivalence classes",
    "summary": "Compact 3-manifolds by admitted type",
    "real_projective": "Real-projective type: equivalence classes",
}

HEADERS = {
    "spherical": ("Manifold", "DR-foils", "S-foils", "Cohomogeneity-One Action", "Orientable"),
    "summary": ("Topology", "spherical", "real-projective", "toric", "Klein-bottled"),
    "real_projective": (
        "Manifold",
        "DR-foils",
        "SR-foil",
        "Essential Cover",
        "Cohomogeneity-One Action",
        "Orientable",
    ),
}

X = "x"

GOLDEN = {
    "spherical": (
        ("S3", "2-sphere", "Point", "SO(3,R)", "Yes"),
        ("Lens Space", "Torus", "Circle", "S1xS1", "Yes"),
        ("S1xtwS2", "Klein bottle", "Circle", "None", "No"),
    ),
    "summary": (
        ("S3 (=L(1,0))", X, "", "", ""),
        ("S2xS1 (=L(0,1)=M(1,0)=M_id)", X, "", X, ""),
        ("S1xtwS2 (=M_sigma)", X, X, X, ""),
        ("RP3 (=L(2,1))", X, X, "", ""),
        ("RP2xS1 (=M_idRP2)", "", X, X, ""),
        ("RP3#RP3 (=M(0,1)=K_sigma;sigma)", "", X, "", X),
        ("Other lens spaces L(p,q)", X, "", "", ""),
        ("Other Klein spaces M(p,q)", "", X, "", ""),
        ("Other M_tau", "", "", X, ""),
        ("Other K_sigma1;sigma2", "", "", "", X),
    ),
    "real_projective": (
        ("RP3", "2-sphere", "RP2", "S3", "SO(3,R)", "Yes"),
        ("S1xRP2", "Torus", "Torus", "S1xS2", "S1xS1", "No"),
        ("S1xtwS2", "Torus", "Torus", "S1xS2", "S1xS1", "No"),
        ("Klein Spaces", "Torus", "Klein bottle", "Lens spaces", "None", "Yes"),
        ("S1xRP2", "Klein bottle", "Klein bottle", "S1xtwS2", "None", "No"),
    ),
}

SUMMARY_ROWS = (
    ("S3 (=L(1,0))", "S3"),
    ("S2xS1 (=L(0,1)=M(1,0)=M_id)", "S2xS1"),
    ("S1xtwS2 (=M_sigma)", "S1xtwS2"),
    ("RP3 (=L(2,1))", "RP3"),
    ("RP2xS1 (=M_idRP2)", "RP2xS1"),
    ("RP3#RP3 (=M(0,1)=K_sigma;sigma)", "RP3connRP3"),
    ("Other lens spaces L(p,q)", "Lens"),
    ("Other Klein spaces M(p,q)", "Klein"),
    ("Other M_tau", "MappingTorus"),
    ("Other K_sigma1;sigma2", "KleinGlue"),
)

_FOIL_NAME = {"sphere": "2-sphere", "torus": "Torus", "klein": "Klein bottle", "rp2": "RP2"}
_COHOM = {"SO3": "SO(3,R)", "T2": "S1xS1", None: "None"}
_SPHERICAL_LABEL = {"S3": "S3", "Lens": "Lens Space", "S1xtwS2": "S1xtwS2"}
_RP_LABEL = {"RP3": "RP3", "RP2xS1": "S1xRP2", "S1xtwS2": "S1xtwS2", "Klein": "Klein Spaces"}
_COVER_LABEL = {"S3": "S3", "S2xS1": "S1xS2", "S1xtwS2": "S1xtwS2"}
_QUOTIENT_FOIL = {
    ANTIPODAL_S2: "RP2",
    SIGMA_PLUS_T2: "Torus",
    SIGMA_MINUS_T2: "Klein bottle",
    "SigmaK_K": "Klein bottle",
}


def _yes(flag: bool) -> str:
    return "Yes" if flag else "No"


# -- descriptor families -------------------------------------------------------


def spherical_family(bound: int = 3):
    yield Spherical("point_disk3")
    for m in unimodular_matrices(bound):
        yield Spherical("solid_torus", m)
    yield Spherical("solid_klein")


def real_projective_family(bound: int = 2):
    yield RealProjective("point_disk3", InvolutionRep(SPHERE, "antipodal"))
    for h in unimodular_matrices(bound):
        yield RealProjective("solid_torus", conjugated_model(h, SIGMA_PLUS))
    for h in unimodular_matrices(bound):
        if h.det() == 1:
            yield RealProjective("solid_torus", conjugated_model(h, SIGMA_MINUS))
    for c in KLEIN_CLASSES:
        yield RealProjective("solid_klein", InvolutionRep(KLEIN, "sigma_k", MappingClassRep(KLEIN, c)))


def toric_family(bound: int = 2):
    for c in ("identity", "antipodal"):
        yield Toric(SPHERE, MappingClassRep(SPHERE, c))
    yield Toric(RP2, MappingClassRep(RP2, "identity"))
    for m in unimodular_matrices(bound):
        yield Toric(TORUS, torus_class(m))
    for c in KLEIN_CLASSES:
        yield Toric(KLEIN, MappingClassRep(KLEIN, c))
    g2 = orientable_genus(2)
    for kind in ("periodic", "pseudo_anosov"):
        yield Toric(g2, MappingClassRep(g2, DeclaredNT(kind)))


def klein_bottled_family(bound: int = 2):
    a = InvolutionRep(SPHERE, "antipodal")
    yield KleinBottled(SPHERE, a, a)
    for h in unimodular_matrices(bound):
        for model in (SIGMA_PLUS, SIGMA_MINUS):
            if model is SIGMA_MINUS and h.det() != 1:
                continue
            first = conjugated_model(h, model)
            for second in (SIGMA_PLUS, SIGMA_MINUS):
                yield KleinBottled(TORUS, first, InvolutionRep(TORUS, second))
    for c1, c2 in product(KLEIN_CLASSES, repeat=2):
        yield KleinBottled(
            KLEIN,
            InvolutionRep(KLEIN, "sigma_k", MappingClassRep(KLEIN, c1)),
            InvolutionRep(KLEIN, "sigma_k", MappingClassRep(KLEIN, c2)),
        )
    g2 = orientable_genus(2)
    s = InvolutionRep(g2, DeclaredInvolution("free"))
    for kind in ("periodic", "pseudo_anosov"):
        yield KleinBottled(g2, s, s, DeclaredNT(kind))


FAMILIES = {
    "spherical": spherical_family,
    "real-projective": real_projective_family,
    "toric": toric_family,
    "Klein-bottled": klein_bottled_family,
}


# -- row builders ------------------------------------------------------------------


def spherical_row(d: Spherical) -> tuple:
    raw = ambient_manifold(d, resolve=False).tag
    foil = _FOIL_NAME[{"point_disk3": "sphere", "solid_torus": "torus", "solid_klein": "klein"}[d.bundle]]
    s_foil = "Point" if d.bundle == "point_disk3" else "Circle"
    return (_SPHERICAL_LABEL[raw], foil, s_foil, _COHOM[cohomogeneity_one(d)], _yes(is_orientable(d)))


def real_projective_row(d: RealProjective) -> tuple:
    raw = ambient_manifold(d, resolve=False).tag
    sigma = d.boundary_involution
    cover = essential_cover(d).cover
    cover_label = "Lens spaces" if isinstance(cover, Symbolic) else _COVER_LABEL[cover.tag]
    return (
        _RP_LABEL[raw],
        _FOIL_NAME[sigma.surface.kind],
        _QUOTIENT_FOIL[normalize_involution(sigma).cls],
        cover_label,
        _COHOM[cohomogeneity_one(d)],
        _yes(is_orientable(d)),
    )


def _distinct(rows):
    seen, out = set(), []
    for r in rows:
        if r not in seen:
            seen.add(r)
            out.append(r)
    return out


_GROUP_ORDER = ("point_disk3", "solid_torus", SIGMA_PLUS_T2, SIGMA_MINUS_T2, "solid_klein")


def _group(d) -> str:
    if isinstance(d, RealProjective) and d.bundle == "solid_torus":
        return normalize_involution(d.boundary_involution).cls
    return d.bundle


def _by_bundle(family, row):
    """Distinct rows, grouped by bundle (and boundary involution class)."""
    groups = {}
    for d in family:
        if validate_descriptor(d):
            continue
        groups.setdefault(_group(d), []).append(row(d))
    out = []
    for g in _GROUP_ORDER:
        out += sorted(_distinct(groups.get(g, [])))
    return tuple(out)


def summary_rows() -> tuple:
    admitted = {key: set() for _, key in SUMMARY_ROWS}
    for col, family in FAMILIES.items():
        for d in family():
            if validate_descriptor(d):
                continue
            admitted[ambient_manifold(d).tag].add(col)
    cols = HEADERS["summary"][1:]
    return tuple((label,) + tuple(X if c in admitted[key] else "" for c in cols) for label, key in SUMMARY_ROWS)


def emit_tables() -> dict:
    return {
        "spherical": _by_bundle(spherical_family(), spherical_row),
        "summary": summary_rows(),
        "real_projective": _by_bundle(real_projective_family(), real_projective_row),
    }


# -- rendering ---------------------------------------------------------------------


def render_md(tables: dict) -> str:
    parts = []
    for key in ORDER:
        head = HEADERS[key]
        lines = [f"## {TITLES[key]}", "", "| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        lines += ["| " + " | ".join(row) + " |" for row in tables[key]]
        parts.append("\n".join(lines))
    return "\n\n".join(parts) + "\n"


def render_csv(tables: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for key in ORDER:
        w.writerow([f"# {key}"])
        w.writerow(HEADERS[key])
        w.writerows(tables[key])
    return buf.getvalue()


def render(tables: dict, fmt: str = "md") -> str:
    if fmt == "md":
        return render_md(tables)
    if fmt == "csv":
        return render_csv(tables)
    raise ValueError(f"unknown table format {fmt!r}")


def table_diff(emitted: dict, golden: dict = GOLDEN) -> list[str]:
    """Human-readable cell differences between two table sets."""
    out = []
    for key in ORDER:
        a, b = emitted[key], golden[key]
        if len(a) != len(b):
            out.append(f"{key}: {len(a)} rows emitted, {len(b)} expected")
        for i, (ra, rb) in enumerate(zip(a, b)):
            for col, x, y in zip(HEADERS[key], ra, rb):
                if x != y:
                    out.append(f"{key} row {i + 1} ({ra[0]}), column {col!r}: emitted {x!r}, expected {y!r}")
    return out
