"""Module documents, JSON/CSV emission, CLI subcommands and exit codes."""

import csv
import json
from fractions import Fraction as F

import pytest

from util import ideal, module

from reesdensity import (
    InputError,
    RankMismatchError,
    load_corpus_module,
    parse_module,
    serialize_module,
)
from reesdensity.cli import main
from reesdensity.io import (
    corpus_names,
    dump_json,
    fraction_str,
    parse_fraction,
)

GOOD_DOC = {
    "schema_version": 1,
    "ring": {"variables": ["x", "y"]},
    "free_module": {"shifts": [0]},
    "generators": [
        {"exponents": [2, 0], "basis": 0},
        {"exponents": [1, 1], "basis": 0},
    ],
}


# -- fractions -----------------------------------------------------------------


def test_fraction_round_trip():
    for v in (F(3, 8), F(-7, 2), F(5), F(0)):
        assert parse_fraction(fraction_str(v)) == v


def test_fraction_rejects_garbage():
    with pytest.raises(InputError):
        parse_fraction("three halves")


# -- module documents -------------------------------------------------------------


def test_parse_good_document():
    m = parse_module(GOOD_DOC)
    assert m.num_generators == 2
    assert m.generator_degrees == (2,)
    assert m.max_degree == 2


def test_parse_accepts_json_text():
    m = parse_module(json.dumps(GOOD_DOC))
    assert m.num_generators == 2


def test_serialize_round_trip():
    m = ideal([(2, 0), (1, 1)], shift=-2)
    doc = serialize_module(m, name="shifted")
    back = parse_module(doc)
    assert back == m
    assert doc["name"] == "shifted"


def test_serialize_round_trip_rank2():
    m = module({0: [(2, 0), (1, 1)], 1: [(0, 1)]}, (0, -1))
    assert parse_module(serialize_module(m)) == m


def test_parse_reports_field_paths():
    bad = dict(GOOD_DOC, schema_version=2)
    with pytest.raises(InputError, match="schema_version"):
        parse_module(bad)
    bad = dict(GOOD_DOC, ring={"variables": []})
    with pytest.raises(InputError, match="ring.variables"):
        parse_module(bad)
    bad = dict(GOOD_DOC, generators=[{"exponents": [1], "basis": 0}])
    with pytest.raises(InputError, match=r"generators\[0\].exponents"):
        parse_module(bad)
    bad = dict(GOOD_DOC, generators=[{"exponents": [1, 0], "basis": 3}])
    with pytest.raises(InputError, match=r"generators\[0\].basis"):
        parse_module(bad)


def test_parse_rejects_empty_generators():
    with pytest.raises(InputError, match="generators"):
        parse_module(dict(GOOD_DOC, generators=[]))


def test_parse_rejects_negative_degree_generator():
    doc = {
        "schema_version": 1,
        "ring": {"variables": ["x", "y"]},
        "free_module": {"shifts": [-2]},
        "generators": [{"exponents": [1, 0], "basis": 0}],
    }
    with pytest.raises(InputError, match="negative degree"):
        parse_module(doc)


def test_parse_rejects_unused_basis_vector():
    doc = {
        "schema_version": 1,
        "ring": {"variables": ["x", "y"]},
        "free_module": {"shifts": [0, 0]},
        "generators": [{"exponents": [1, 0], "basis": 0}],
    }
    with pytest.raises(RankMismatchError, match="versal"):
        parse_module(doc)


def test_parse_rejects_invalid_json_text():
    with pytest.raises(InputError, match="invalid JSON"):
        parse_module("{not json")


# -- corpus ------------------------------------------------------------------------


def test_corpus_lists_known_names():
    names = corpus_names()
    assert "maximal_ideal" in names
    assert "square_maximal" in names
    assert len(names) >= 9


def test_corpus_modules_all_parse():
    for name in corpus_names():
        m = load_corpus_module(name)
        assert m.level == 1
        assert not m.is_zero


def test_corpus_unknown_name():
    with pytest.raises(InputError, match="unknown corpus module"):
        load_corpus_module("no_such_module")


# -- json determinism ----------------------------------------------------------------


def test_dump_json_sorted_and_exact():
    blob = dump_json({"b": F(1, 3), "a": [F(2), None]})
    assert blob.index('"a"') < blob.index('"b"')
    assert '"1/3"' in blob


# -- CLI ---------------------------------------------------------------------------


def write_doc(tmp_path, doc, name="m.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_cli_density_writes_csv_per_kind(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    path = write_doc(tmp_path, GOOD_DOC)
    code = main([
        "density", "--module", str(path), "--kind", "adic,saturated,epsilon",
        "--nmax", "16", "--grid", "0:3:1/2",
    ])
    assert code == 0
    for kind in ("adic", "saturated", "epsilon"):
        out = tmp_path / f"m.{kind}.csv"
        assert out.exists()
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "x"
        assert rows[0][-2:] == ["extrapolated", "diagnostic"]
        assert len(rows) == 8  # header + 7 grid points


def test_cli_density_fit_prints_polynomials(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    path = write_doc(tmp_path, GOOD_DOC)
    code = main(["density", "--module", str(path), "--fit"])
    assert code == 0
    out = capsys.readouterr().out
    assert "[2, inf)" in out


def test_cli_density_rejects_bad_kind(tmp_path, capsys):
    path = write_doc(tmp_path, GOOD_DOC)
    assert main(["density", "--module", str(path), "--kind", "nope"]) == 2
    assert "unknown density kind" in capsys.readouterr().err


def test_cli_input_error_exit_code(tmp_path, capsys):
    missing = tmp_path / "missing.json"
    assert main(["density", "--module", str(missing)]) == 2


def test_cli_multiplicity_epsilon_json(tmp_path, capsys):
    out = tmp_path / "eps.json"
    code = main([
        "multiplicity", "--module", "corpus:ideal_x2_xy", "--epsilon",
        "--json-out", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    report = payload["reports"][0]
    assert report["kind"] == "epsilon"
    assert report["values"]["exact"] == "1"
    text = capsys.readouterr().out
    assert "estimate" in text


def test_cli_multiplicity_undetermined_exit_code(tmp_path, capsys):
    code = main([
        "multiplicity", "--module", "corpus:ideal_x2_xy", "--epsilon",
        "--ladder", "1,2",
    ])
    assert code == 0  # estimate-only is not undetermined
    code = main([
        "multiplicity", "--module", "corpus:maximal_ideal", "--diagonal",
        "--ladder", "1,2",
    ])
    assert code == 3


def test_cli_check_reduction_exit_zero(tmp_path, capsys):
    out = tmp_path / "verdict.json"
    code = main([
        "check", "--sub", "corpus:reduction_sub_x2_y2",
        "--sup", "corpus:square_maximal", "--json-out", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["verdict"] == "reduction"
    assert payload["certificate"] == 1
    stand_ins = [c for c in payload["criteria"] if c["stand_in"]]
    assert len(stand_ins) == 1
    assert "verdict: reduction" in capsys.readouterr().out


def test_cli_check_not_reduction_exit_zero(capsys):
    code = main([
        "check", "--sub", "corpus:ideal_x2_xy", "--sup", "corpus:square_maximal",
    ])
    assert code == 0
    assert "not-reduction" in capsys.readouterr().out


def test_cli_check_undetermined_exit_three(tmp_path, capsys):
    sub = write_doc(
        tmp_path,
        dict(GOOD_DOC, generators=[
            {"exponents": [4, 0], "basis": 0},
            {"exponents": [0, 4], "basis": 0},
        ]),
        "sub.json",
    )
    sup = write_doc(
        tmp_path,
        dict(GOOD_DOC, generators=[
            {"exponents": [4, 0], "basis": 0},
            {"exponents": [3, 1], "basis": 0},
            {"exponents": [0, 4], "basis": 0},
        ]),
        "sup.json",
    )
    code = main(["check", "--sub", str(sub), "--sup", str(sup), "--nmax", "1"])
    assert code == 3


def test_cli_check_submodule_violation_exit_two(tmp_path, capsys):
    sub = write_doc(tmp_path, dict(GOOD_DOC, generators=[
        {"exponents": [1, 0], "basis": 0},
    ]), "sub.json")
    sup = write_doc(tmp_path, GOOD_DOC, "sup.json")
    assert main(["check", "--sub", str(sub), "--sup", str(sup)]) == 2


def test_cli_corpus_lists_and_shows(capsys):
    assert main(["corpus"]) == 0
    out = capsys.readouterr().out
    assert "maximal_ideal" in out
    assert main(["corpus", "--show", "maximal_ideal"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["module"]["ring"]["variables"] == ["x", "y"]


def test_cli_density_json_identical_between_cold_and_warm_cache(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    path = write_doc(tmp_path, GOOD_DOC)
    cache_dir = tmp_path / "cache"
    args = [
        "density", "--module", str(path), "--kind", "epsilon", "--nmax", "12",
        "--grid", "0:2:1/2", "--json-out", str(tmp_path / "out.json"),
        "--cache-dir", str(cache_dir),
    ]
    assert main(args) == 0
    cold = (tmp_path / "out.epsilon.json").read_bytes() if (tmp_path / "out.epsilon.json").exists() else (tmp_path / "out.json").read_bytes()
    assert any(cache_dir.iterdir())
    assert main(args) == 0
    warm = (tmp_path / "out.epsilon.json").read_bytes() if (tmp_path / "out.epsilon.json").exists() else (tmp_path / "out.json").read_bytes()
    assert cold == warm
