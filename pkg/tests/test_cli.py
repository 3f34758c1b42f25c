import io
import json

import pytest

from evidence_tools import cli


def run_json(capsys, *argv):
    code = cli.run([str(a) for a in argv])
    captured = capsys.readouterr()
    assert code == 0, captured.err
    return json.loads(captured.out)


def run_error(capsys, *argv):
    code = cli.run([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, json.loads(captured.err.strip().splitlines()[-1])


def masses(document):
    return [f["mass"] for f in document["focals"]]


def test_bpa_of_y_table(capsys, data_dir):
    document = run_json(capsys, "bpa", data_dir / "y_table.csv")
    assert masses(document) == ["1/5", "1/10", "3/10", "2/5"]
    assert document["focals"][0]["decimal"] == "0.200000"


def test_output_is_byte_stable(capsys, data_dir, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for target in (first, second):
        assert cli.run(["approx-cond", str(data_dir / "forty_sixty.csv"), "--given", "X", "-o", str(target)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert json.loads(first.read_text())["quality"] == "1/2"


def test_standard_input(capsys, data_dir, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO((data_dir / "y_table.csv").read_text()))
    assert masses(run_json(capsys, "bpa", "-")) == ["1/5", "1/10", "3/10", "2/5"]


@pytest.mark.parametrize("mode", ["cases", "shafer"])
def test_condition_modes_agree(capsys, data_dir, mode):
    document = run_json(
        capsys, "condition", data_dir / "y_table.csv", "--mode", mode, "--var", "X", "--set", "x2|x3"
    )
    assert masses(document) == ["2/9", "1/3", "4/9"]


def test_serial_condition(capsys, data_dir):
    args = ["serial-condition", data_dir / "serial_pitfall.csv", "--cond", "X=x1|x2", "--cond", "X=x2|x3"]
    assert masses(run_json(capsys, *args)) == ["1"]
    assert masses(run_json(capsys, *args, "--naive")) == ["1/2", "1/2"]


def test_prob_rejects_set_valued_cells(capsys, data_dir):
    code, error = run_error(capsys, "prob", data_dir / "y_table.csv")
    assert code == 1
    assert error["error"] == "SetValuedDataError"


def test_unknown_value_is_a_usage_error(capsys, data_dir):
    code, error = run_error(capsys, "condition", data_dir / "forty_sixty.csv", "--var", "Z", "--set", "z3")
    assert code == 2
    assert error["error"] == "FrameError"


def test_malformed_csv_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("X,count\nx1,10\nx2,ten\n")
    code, error = run_error(capsys, "bpa", bad)
    assert code == 2
    assert error["error"] == "FormatError"
    assert (error["line"], error["column"]) == (3, 2)


def test_missing_file(capsys, tmp_path):
    code, error = run_error(capsys, "bpa", tmp_path / "absent.csv")
    assert code == 2
    assert error["error"] == "FormatError"


def test_combine_marginalize_extend(capsys, data_dir, tmp_path):
    combined = run_json(capsys, "combine", data_dir / "bel_and.csv", data_dir / "bel_and.csv")
    assert "conflict" in combined

    z = run_json(capsys, "marginalize", data_dir / "bel_and.csv", "--vars", "Z")
    assert masses(z) == ["2/5", "1/10", "1/2"]

    y_file = tmp_path / "y.json"
    assert cli.run(["bpa", str(data_dir / "y_table.csv"), "-o", str(y_file)]) == 0
    frame_file = tmp_path / "frame.json"
    frame_file.write_text(
        json.dumps({"variables": [{"name": "X", "values": ["x1", "x2", "x3"]}, {"name": "Z", "values": ["z1", "z2"]}]})
    )
    extended = run_json(capsys, "extend", y_file, "--frame", frame_file)
    assert [v["name"] for v in extended["variables"]] == ["X", "Z"]
    assert masses(extended) == ["1/5", "1/10", "3/10", "2/5"]


def test_total_conflict_exits_one(capsys, tmp_path):
    for name, value in (("a.json", "x1"), ("b.json", "x2")):
        (tmp_path / name).write_text(
            json.dumps(
                {
                    "variables": [{"name": "X", "values": ["x1", "x2"]}],
                    "focals": [{"set": {"box": {"X": [value]}}, "mass": "1"}],
                }
            )
        )
    code, error = run_error(capsys, "combine", tmp_path / "a.json", tmp_path / "b.json")
    assert code == 1
    assert error["error"] == "TotalConflictError"


def test_classify_and_hull(capsys, data_dir):
    assert run_json(capsys, "classify", data_dir / "m_and.json") == {"classification": "proper"}
    hull = run_json(capsys, "hull", data_dir / "m_and.json")
    assert hull["focals"][0]["set"] == {"box": {"X": ["t", "f"], "Y": ["t", "f"], "Z": ["t", "f"]}}


def test_lift(capsys, data_dir):
    document = run_json(capsys, "lift", data_dir / "lift_distribution.csv", data_dir / "lift_mapping.csv")
    assert masses(document) == ["1/5", "1/10", "3/10", "2/5"]


def test_approx_cond_strategies(capsys, data_dir):
    greedy = run_json(capsys, "approx-cond", data_dir / "forty_sixty.csv", "--given", "X")
    assert greedy["strategy"] == "greedy"
    assert greedy["trace"][0]["qContribution"] == "1/2"
    tight = run_json(capsys, "approx-cond", data_dir / "forty_sixty.csv", "--given", "X", "--cover", "tight")
    assert tight["cover"] == "tight"
    assert tight["quality"] == "7/10"
    seeded = run_json(
        capsys, "approx-cond", data_dir / "forty_sixty.csv", "--given", "X", "--strategy", "stochastic", "--seed", "3"
    )
    assert seeded["quality"] == "1/2"


def test_stochastic_needs_seed(data_dir):
    with pytest.raises(SystemExit) as excinfo:
        cli.run(["approx-cond", str(data_dir / "forty_sixty.csv"), "--given", "X", "--strategy", "stochastic"])
    assert excinfo.value.code == 2


def test_unknown_flags_are_rejected(data_dir):
    with pytest.raises(SystemExit) as excinfo:
        cli.run(["bpa", str(data_dir / "y_table.csv"), "--tolerance", "0.1"])
    assert excinfo.value.code == 2


def test_approx_cond_needs_boxes_unless_hulled(capsys, data_dir):
    code, error = run_error(capsys, "approx-cond", data_dir / "m_and.json", "--given", "X,Y")
    assert code == 1
    assert error["error"] == "NonBoxFocalError"
    hulled = run_json(capsys, "approx-cond", data_dir / "m_and.json", "--given", "X,Y", "--hull")
    assert hulled["quality"] == "1"


def test_existence_deciders(capsys, data_dir):
    decomp = run_json(capsys, "exists-decomp", data_dir / "bel_and.csv", "--given", "X,Y")
    assert decomp["verdict"] == "infeasible"
    assert decomp["method"] == "linear-feasibility"
    cond = run_json(capsys, "exists-cond", data_dir / "forty_sixty.csv", "--given", "X", "--solver", "exhaustive")
    assert cond["verdict"] == "feasible"
    assert cond["witness"] is not None


def test_existence_frame_cap(capsys, data_dir):
    code, error = run_error(capsys, "--max-frame", "4", "exists-decomp", data_dir / "bel_and.csv", "--given", "X,Y")
    assert code == 1
    assert error["error"] == "CapacityError"


def test_consistency_and_correctness(capsys, data_dir):
    document = run_json(
        capsys, "check-consistency", data_dir / "bel_and.csv", "--given", "X,Y", "--cond", data_dir / "m_and.json"
    )
    assert document == {"consistent": True, "canoType": True}

    verdict = run_json(capsys, "check-correctness", data_dir / "bel_and.csv", data_dir / "bel_and.csv")
    assert verdict == {"marginallyCorrect": True, "variable": None, "witness": None}


def test_indep(capsys, data_dir):
    assert run_json(capsys, "indep", data_dir / "bel_and.csv", "--p", "X", "--q", "Y", "--r", "Z") == {
        "independent": False
    }


def test_network_commands(capsys, data_dir):
    assert run_json(capsys, "net-validate", data_dir / "m1_chain.json") == {"valid": True, "violations": []}

    oriented = run_json(capsys, "reorient", data_dir / "reverse_direction.json", "--target", "X")
    assert oriented["reversedEdges"] == [["X", "Z"]]
    assert oriented["edges"] == [["Z", "X"]]
    assert oriented["qualities"] == {"X": "4/5", "Z": "1"}

    posterior = run_json(
        capsys, "propagate", data_dir / "reverse_direction.json", "--target", "X", "--evidence", "Z=z2"
    )
    assert posterior["focals"] == [{"set": {"box": {"X": ["x1", "x2"]}}, "mass": "1", "decimal": "1.000000"}]


def test_verify(capsys, data_dir):
    args = ["verify", data_dir / "reverse_direction.json", "--target", "X", "--evidence", "Z=z2"]
    own = run_json(capsys, *args)
    assert own["status"] == "correct"
    assert own["marginallyCorrect"] is True
    against_data = run_json(capsys, *args, "--reference", data_dir / "forty_sixty.csv")
    assert against_data["status"] == "equal"


def test_bad_evidence(capsys, data_dir):
    code, error = run_error(
        capsys, "propagate", data_dir / "m1_chain.json", "--target", "Z", "--evidence", "Q=q1"
    )
    assert code == 1
    assert error["error"] == "NetworkError"


def test_audit(capsys):
    findings = run_json(capsys, "audit")
    existence = findings["fortySixtyMarginallyConsistentConditional"]
    assert existence["witnessRevalidates"] is True
    assert existence["certificate"]["verdict"] in ("feasible", "infeasible")
    assert findings["exactDecomposition"]["belAnd"]["verdict"] == "infeasible"
    assert findings["exactDecomposition"]["fortySixty"]["verdict"] == "infeasible"
    assert findings["reverseDirection"]["oneWay"]["status"] == "equal"
    baseline = findings["reverseDirection"]["baseline"]
    assert baseline["status"] == "violation"
    assert baseline["witness"] == {"box": {"X": ["x2"]}}
