import json

import pytest

from conftest import ROOT
from symmetry import expr as ex
from symmetry.detsys import determining_system
from symmetry.parser import parse
from symmkit import main


@pytest.fixture(autouse=True)
def in_root(monkeypatch):
    monkeypatch.chdir(ROOT)


def run_json(capsys, *argv):
    code = main(list(argv) + ["--json"])
    return code, json.loads(capsys.readouterr().out)


@pytest.mark.parametrize("subcommand", ["table", "adjoint", "killing", "series"])
def test_algebra_matches_printed_tables(capsys, subcommand):
    code, payload = run_json(capsys, "algebra", subcommand, "data/g4.alg")
    assert code == 0
    assert payload["command"] == f"algebra {subcommand}"
    assert payload["findings"] == []


def test_commutators_in_json(capsys):
    _, payload = run_json(capsys, "algebra", "table", "data/g4.alg")
    assert payload["results"]["commutators"]["Y1,Y3"] == "2*Y1"


def test_optimal_reports_missing_factor(capsys):
    code, payload = run_json(capsys, "optimal", "data/g4.alg")
    assert code == 1
    assert any(f["where"].startswith("optimal") for f in payload["findings"])


def test_principal_algebra(capsys):
    code, payload = run_json(capsys, "symmetries", "data/fin.pde", "--degree", "2")
    assert code == 0
    assert payload["results"]["dimension"] == 1


def test_classify(capsys):
    code, payload = run_json(capsys, "classify", "data/fin.pde", "--algebra", "data/g4.alg", "--assume-positive", "h,x")
    rows = payload["results"]["rows"]
    assert code == 1
    assert len(rows) == 4
    assert payload["results"]["excluded"] == ["A1"]
    assert [row["feasible"] for row in rows] == [True, True, False, False]
    assert rows[1]["h"] == "c^2*x^(-2)"
    assert any("Z4w" in f["message"] for f in payload["findings"])


def test_transform(capsys):
    code = main(["transform", "data/fin.pde", "--algebra", "data/g4.alg"])
    out = capsys.readouterr().out
    assert code == 1
    assert "flow of Y3 sends h" in out
    assert "reflect_E alone is not an equivalence transformation" in out


def test_text_report(capsys):
    assert main(["algebra", "killing", "data/g4.alg"]) == 0
    assert "5*a3*b3" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["algebra", "data/g4.alg"],
    ["integrate", "data/fin.pde"],
    ["symmetries", "data/missing.pde"],
    ["symmetries"],
])
def test_usage_errors(argv):
    assert main(argv) == 2


def test_first_stage_system(capsys):
    code, payload = run_json(capsys, "determining", "data/fin.pde", "--stage", "1")
    first = payload["results"]["constraints"]
    _, payload = run_json(capsys, "determining", "data/fin.pde")
    assert len(first) < len(payload["results"]["constraints"])
    assert code in (0, 1)


@pytest.mark.parametrize("path, spec_name", [("data/fin.pde", "fin_spec"), ("data/fin_equiv.pde", "equiv_spec")])
def test_constraints_reparse_with_problem_context(capsys, request, path, spec_name):
    spec = request.getfixturevalue(spec_name)
    _, payload = run_json(capsys, "determining", path)
    assert payload["context"]["problem"] == spec.name
    assert payload["context"]["functions"]["xi1"] == ["t", "x"]
    context = spec.parse_context()
    generated = determining_system(spec).constraints
    lines = payload["results"]["constraints"]
    assert len(lines) == len(generated)
    for line, c in zip(lines, generated):
        text = line[:-len(" = 0")]
        e = parse(text, context)
        assert e == c.expr
        assert ex.to_string(e) == text
