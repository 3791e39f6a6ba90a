import json
from pathlib import Path

import pytest

from thetachars import MODELS, characters, pipeline, solve
from thetachars.cli import character_document, render
from thetachars.theta import assign_components

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.mark.parametrize("name", list(MODELS))
def test_rank_matches_table(name):
    model = MODELS[name]
    _, rank = pipeline.theta_basis(model, 20)
    assert rank == model.dim_table


@pytest.mark.parametrize("name", list(MODELS))
def test_component_assignment_is_bijective(name):
    model = MODELS[name]
    assign = assign_components(model, model.l, model.k)
    assert sorted(assign.values()) == list(range(1, model.l))
    assert set(assign) == set(model.H)


@pytest.mark.parametrize("name", list(MODELS))
def test_characters_match_snapshot(name):
    model = MODELS[name]
    cs = characters(model, 20)
    text = render(character_document(model, cs.characters, cs.kappa), "json") + "\n"
    assert text == (FIXTURES / f"{name}.json").read_text()


@pytest.mark.parametrize("name", list(MODELS))
def test_vacuum_character(name):
    model = MODELS[name]
    cs = characters(model, 20)
    vac = cs.characters[min(model.H)]
    assert vac.coeffs[0] == 1
    assert vac.offset == -model.c_tilde / 24


def test_solution_is_cached():
    assert solve("WG2", 20) is solve("WG2", 20)


def test_snapshot_documents_parse():
    for name in MODELS:
        doc = json.loads((FIXTURES / f"{name}.json").read_text())
        assert doc["model"] == name
        assert len(doc["characters"]) == MODELS[name].l - 1
