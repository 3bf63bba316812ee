import io
import json

import pytest

from transnormal import tables
from transnormal.classifier import classify
from transnormal.cli import run_cli
from transnormal.documents import (
    DocumentError,
    descriptor_to_doc,
    dumps,
    loads_descriptor,
    parse_descriptor,
    report_to_doc,
)

DOCS = {
    "nil": {"type": "toric", "foil": "torus", "monodromy": [1, 1, 0, 1]},
    "l73": {"type": "spherical", "bundle": "solid_torus", "attach": [3, 7, 1, 2]},
    "l72": {"type": "spherical", "bundle": "solid_torus", "attach": [2, 7, 1, 4]},
    "l71": {"type": "spherical", "bundle": "solid_torus", "attach": [1, 7, 0, 1]},
    "kb": {
        "type": "klein_bottled",
        "foil": "torus",
        "sigma1": {"linear": [1, 0, 0, -1], "translation": ["1/2", "0"]},
        "sigma2": {"linear": [-1, 0, 0, 1], "translation": ["0", "1/2"]},
    },
    "rp": {
        "type": "real_projective",
        "bundle": "solid_torus",
        "boundary_involution": {"linear": [1, 0, 2, -1], "translation": ["1/2", "1/2"], "conjugator": [1, 0, 1, 1]},
    },
    "g2a": {"type": "toric", "foil": "genus", "genus": 2, "monodromy": {"nt": "periodic", "label": "a"}},
    "g2b": {"type": "toric", "foil": "genus", "genus": 2, "monodromy": {"nt": "periodic", "label": "b"}},
    "kk": {
        "type": "klein_bottled",
        "foil": "klein",
        "sigma1": {"map": "sigma_k", "conjugator": "y"},
        "sigma2": "sigma_k",
    },
    "pa": {
        "type": "klein_bottled",
        "foil": "genus",
        "genus": 3,
        "sigma1": {"declared": "s", "orientation_reversing": True},
        "sigma2": {"declared": "s", "orientation_reversing": True},
        "composition": {"nt": "pseudo_anosov", "label": ""},
    },
    "rpk": {"type": "real_projective", "bundle": "solid_klein", "boundary_involution": "sigma_k"},
    "sk": {"type": "spherical", "bundle": "solid_klein"},
}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, doc in DOCS.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(doc))
        out[name] = str(p)
    return out


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name", DOCS)
def test_document_roundtrip(name):
    d = parse_descriptor(DOCS[name])
    doc = descriptor_to_doc(d)
    assert parse_descriptor(doc) == d
    assert parse_descriptor(json.loads(dumps(doc))) == d


def test_roundtrip_over_table_families():
    for family in tables.FAMILIES.values():
        for d in family():
            assert parse_descriptor(json.loads(dumps(descriptor_to_doc(d)))) == d


def test_rationals_normalised():
    doc = json.loads(json.dumps(DOCS["kb"]))
    doc["sigma1"]["translation"] = ["2/4", "3/3"]
    d = parse_descriptor(doc)
    assert descriptor_to_doc(d)["sigma1"]["translation"] == ["1/2", "0"]


@pytest.mark.parametrize(
    "text,path",
    [
        ('{"type": "toric", "foil": "torus", "monodromy": [1,1,0,1], "x": 0}', "$.x"),
        ('{"type": "toric", "foil": "torus"}', "$.monodromy"),
        ('{"type": "toric", "foil": "torus", "monodromy": [1,1,0]}', "$.monodromy"),
        ('{"type": "nope"}', "$.type"),
        ('{"type": "klein_bottled", "foil": "torus", "sigma1": {"linear": [1,0,0,-1], "translation": ["a", "0"]}, "sigma2": "x"}', "$.sigma1.translation[0]"),
        ("[1, 2", "$"),
    ],
)
def test_parse_errors_name_the_field(text, path):
    with pytest.raises(DocumentError) as exc:
        loads_descriptor(text)
    assert exc.value.path == path


def test_cpc_command(files):
    assert run("cpc", files["nil"]) == (0, "admissible: true, geometry: Nil\n", "")
    code, out, _ = run("cpc", files["pa"])
    assert (code, out) == (0, "admissible: false, geometry: NoneCPC\n")


def test_equiv_exit_codes(files):
    assert run("equiv", files["l72"], files["l73"])[:2] == (0, "equivalent\n")
    assert run("equiv", files["l71"], files["l72"])[:2] == (1, "inequivalent\n")
    code, out, _ = run("equiv", files["g2a"], files["g2b"])
    assert code == 2 and out.startswith("undecided: ")


def test_ambient_and_cover(files):
    assert run("ambient", files["l73"])[1] == "L(7,2)\n"
    assert run("ambient", files["rp"])[1] == "M(1,1)\n"
    code, out, _ = run("cover", files["rp"])
    assert code == 0
    assert out.splitlines()[:2] == ["cover: lens space double cover of M(1,1)", "cover_type: spherical"]
    code, out, _ = run("cover", files["sk"])
    assert "(none)" in out


def test_classify_deterministic(files):
    code, out, _ = run("classify", files["kb"])
    assert code == 0
    doc = json.loads(out)
    assert doc["tool"] == "transnormal"
    assert doc["input"] == DOCS["kb"]
    assert doc["report"]["cpc"] == {"admissible": True, "geometry": "E3"}
    assert run("classify", files["kb"])[1] == out
    d = loads_descriptor(json.dumps(DOCS["kb"]))
    assert out == dumps(report_to_doc(classify(d), d))


@pytest.mark.parametrize("name", DOCS)
def test_every_sample_classifies(files, name):
    assert run("classify", files[name])[0] == 0


def test_validate(files, tmp_path):
    assert run("validate", files["nil"])[:2] == (0, "valid\n")
    bad = tmp_path / "bad.json"
    bad.write_text('{"type": "spherical", "bundle": "solid_torus", "attach": [2,0,0,1]}')
    assert run("validate", str(bad))[:2] == (65, "violation: attach not unimodular\n")
    code, _, err = run("cpc", str(bad))
    assert code == 65 and "attach not unimodular" in err


def test_usage_and_parse_errors(files, tmp_path):
    assert run()[0] == 64
    assert run("frobnicate")[0] == 64
    assert run("cpc", str(tmp_path / "missing.json"))[0] == 64
    bad = tmp_path / "extra.json"
    bad.write_text('{"type": "toric", "foil": "torus", "monodromy": [1,1,0,1], "colour": "red"}')
    code, _, err = run("cpc", str(bad))
    assert code == 64 and "$.colour" in err and "unknown field" in err
    assert run("verify-metric", "--family", "sol", "--lambda", "0.5")[0] == 64
    assert run("verify-metric", "--family", "flat", "--c", "1.5")[0] == 64
    assert run("tables", "--format", "xml")[0] == 64


def test_tables_command_is_stable():
    a = run("tables")
    b = run("tables")
    assert a == b and a[0] == 0
    assert a[1] == tables.render(tables.emit_tables(), "md")
    code, out, _ = run("tables", "--format", "csv")
    assert code == 0 and out.startswith("# spherical\n")


@pytest.mark.parametrize(
    "argv",
    [
        ["--family", "nil"],
        ["--family", "sol", "--lambda", "2.618033988"],
        ["--family", "sol", "--trace", "4"],
        ["--family", "flat", "--c", "0.25"],
        ["--family", "product"],
        ["--family", "warped"],
    ],
)
def test_verify_metric_passes(argv):
    code, out, _ = run("verify-metric", *argv)
    assert code == 0, out
    lines = out.splitlines()[1:]
    assert len(lines) == 4 and all(line.startswith("PASS") for line in lines)


def test_verify_metric_fails_on_impossible_tolerance():
    code, out, _ = run("verify-metric", "--family", "warped", "--tol", "1e-30")
    assert code == 1 and "FAIL" in out
