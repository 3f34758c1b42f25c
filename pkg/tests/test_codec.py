import json
from fractions import Fraction as F

import pytest

from evidence_tools import codec, corpus
from evidence_tools.cases import bpa_from_cases
from evidence_tools.conditionals import approximate_conditional
from evidence_tools.errors import FormatError
from evidence_tools.mass import MassFunction


def test_mass_document_layout(y_table):
    document = codec.mass_to_json(bpa_from_cases(y_table))
    assert document["variables"] == [{"name": "X", "values": ["x1", "x2", "x3"]}]
    assert [f["set"] for f in document["focals"]] == [
        {"box": {"X": ["x1", "x2"]}},
        {"box": {"X": ["x1"]}},
        {"box": {"X": ["x2", "x3"]}},
        {"box": {"X": ["x3"]}},
    ]
    assert [f["mass"] for f in document["focals"]] == ["1/5", "1/10", "3/10", "2/5"]
    assert document["focals"][1]["decimal"] == "0.100000"


def test_non_box_focals_are_written_as_tuples(m_and):
    document = codec.mass_to_json(m_and)
    assert document["focals"][0]["set"] == {
        "tuples": [["t", "t", "t"], ["t", "f", "f"], ["f", "t", "f"], ["f", "f", "f"]]
    }


def test_dump_then_load(bel_and, m_and):
    for m in (bel_and, m_and):
        text = codec.dump_mass(m)
        assert text.endswith("}\n")
        assert codec.load_mass(text) == m


def test_bundled_json_matches_corpus(data_dir, m_and):
    assert codec.load_mass((data_dir / "m_and.json").read_text()) == m_and
    net = codec.load_network((data_dir / "reverse_direction.json").read_text())
    expected = corpus.reverse_direction_network()
    assert net.edges == expected.edges
    assert dict(net.valuations) == dict(expected.valuations)


def test_decimal_masses_are_accepted_as_exact():
    text = json.dumps(
        {
            "variables": [{"name": "X", "values": ["a", "b"]}],
            "focals": [{"set": {"box": {"X": ["a"]}}, "mass": "0.3"}, {"set": {"box": {"X": ["a", "b"]}}, "mass": "7/10"}],
        }
    )
    m = codec.load_mass(text)
    assert sorted(m.values()) == [F(3, 10), F(7, 10)]


@pytest.mark.parametrize(
    "document",
    [
        {"focals": []},
        {"variables": [{"name": "X", "values": ["a"]}], "focals": []},
        {"variables": [{"name": "X", "values": ["a", "a"]}], "focals": [{"set": {"box": {"X": ["a"]}}, "mass": "1"}]},
        {"variables": [{"name": "X", "values": ["a"]}], "focals": [{"set": {"box": {"X": ["a"]}}, "mass": 0.5}]},
        {"variables": [{"name": "X", "values": ["a"]}], "focals": [{"set": {"box": {"X": ["b"]}}, "mass": "1"}]},
        {"variables": [{"name": "X", "values": ["a"]}], "focals": [{"set": {"box": {"X": ["a"]}}, "mass": "1/2"}]},
        {"variables": [{"name": "X", "values": ["a"]}], "focals": [{"set": {"cells": []}, "mass": "1"}]},
    ],
)
def test_malformed_mass_documents(document):
    with pytest.raises(FormatError):
        codec.load_mass(json.dumps(document))


def test_json_syntax_errors_carry_position():
    with pytest.raises(FormatError) as excinfo:
        codec.load_mass('{\n  "variables": [\n')
    assert excinfo.value.line is not None
    assert excinfo.value.details()["line"] == excinfo.value.line


def test_network_valuation_frame_must_agree(data_dir):
    document = json.loads((data_dir / "m1_chain.json").read_text())
    document["valuations"]["X"]["variables"][0]["values"] = ["x2", "x1"]
    with pytest.raises(FormatError):
        codec.network_from_json(document)


def test_network_roundtrip():
    net = corpus.reverse_direction_network()
    again = codec.network_from_json(json.loads(codec.dumps(codec.network_to_json(net))))
    assert again.edges == net.edges
    assert dict(again.valuations) == dict(net.valuations)


def test_approximation_document(forty_sixty):
    document = codec.approximation_to_json(approximate_conditional(forty_sixty, ["X"]))
    assert document["strategy"] == "greedy"
    assert document["cover"] == "union"
    assert document["quality"] == "1/2"
    assert len(document["trace"]) == 1
    step = document["trace"][0]
    assert step["gMin"] == "1"
    assert step["cover"] == [
        {"given": ["x1"], "values": [["z1"], ["z2"]]},
        {"given": ["x2"], "values": [["z2"]]},
    ]
    assert step["focal"] == {"tuples": [["x1", "z1"], ["x1", "z2"], ["x2", "z2"]]}
    assert MassFunction.categorical(codec.focal_from_json(step["focal"], forty_sixty.frame)) == codec.mass_from_json(
        document["conditional"]
    )
