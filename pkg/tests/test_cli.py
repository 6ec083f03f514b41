import json

import pytest

import hpss
from hpss import Command, build_parser, command_from_args, main, run
from utils.algebra_model import AlgebraSpec, algebra_from_json, dump_algebra, realframe_to_json
from utils.errors import SpecError
from utils.exact_arithmetic import gaussian
from utils.template_manager import builtin_example, builtin_frame


def _json_output(capsys, argv):
    status = main(argv + ["--format", "json"])
    captured = capsys.readouterr()
    assert status == 0, captured.err
    return json.loads(captured.out)


@pytest.fixture
def flat_spec_file(tmp_path):
    path = tmp_path / "flat.json"
    dump_algebra(AlgebraSpec(1, 1, {}, "flat"), path)
    return str(path)


def test_degeneracy_on_heis_ext_is_first_page(capsys):
    report = _json_output(capsys, ["degeneracy", "--example", "heis_ext", "--lambda", "wt:1,1=1"])
    assert report["verb"] == "degeneracy"
    assert report["degeneracy_page"] == 1
    assert report["h_lambda"] == [[0, 1], [1, 3], [2, 4], [3, 3], [4, 1]]
    assert report["checks"]["theorem_consistent"] is True
    assert report["lambda"]["wt"] == [{"l": 1, "j": 1, "re": "1/1", "im": "0/1"}]


def test_spectral_on_w4n6_lists_differentials(capsys):
    report = _json_output(capsys, ["spectral", "--example", "W4n6", "--k", "0", "--lambda", "wt:1,1=1"])
    assert report["degeneracy_page"] == 2
    first = report["e_pages"][0]
    assert first["r"] == 1
    assert any(entry["source"] == [0, 1] and entry["target"] == [1, 1] for entry in first["differentials"])
    assert report["checks"]["exactness_solvable"] is False


def test_spectral_table_output(capsys):
    assert main(["spectral", "--example", "W4n6", "--lambda", "wt:1,1=1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("spectral for W4n6(k=0) (n=2, m=1)")
    assert "d_1: (0,1) -> (1,1)  rank 1" in out
    assert "degeneracy page: 2" in out


def test_cohomology_of_spec_file(capsys, flat_spec_file):
    report = _json_output(capsys, ["cohomology", "--spec", flat_spec_file])
    assert report["dims"] == [[p, q, [1, 2, 1][p] * [1, 2, 1][q]] for p in range(3) for q in range(3)]
    assert "h_lambda" not in report
    report = _json_output(capsys, ["cohomology", "--spec", flat_spec_file, "--lambda", "wt:1,1=1/2+i"])
    assert report["h_lambda"] == [[0, 1], [1, 4], [2, 6], [3, 4], [4, 1]]
    assert report["euler_characteristic"] == 0


def test_algebra_json_in_report_round_trips(capsys):
    report = _json_output(capsys, ["validate", "--example", "P4n2"])
    assert algebra_from_json(report["algebra"]) == builtin_example("P4n2", k=0)
    assert report["validation"]["accepted"] is True


def test_frame_file_is_complexified(capsys, tmp_path):
    path = tmp_path / "frame.json"
    path.write_text(json.dumps(realframe_to_json(builtin_frame("heis_ext", n=1))), encoding="utf-8")
    report = _json_output(capsys, ["validate", "--frame", str(path)])
    assert algebra_from_json(report["algebra"]).E(1, 1, 1) == gaussian(0, "-1/2")


@pytest.mark.parametrize("name", ["heis_ext", "W4n6", "P4n2"])
def test_degeneracy_on_complexified_frame(capsys, tmp_path, name):
    path = tmp_path / "frame.json"
    path.write_text(json.dumps(realframe_to_json(builtin_frame(name))), encoding="utf-8")
    report = _json_output(capsys, ["degeneracy", "--frame", str(path), "--lambda", "wt:1,1=1"])
    assert algebra_from_json(report["algebra"]) == builtin_example(name)
    assert report["degeneracy_page"] == (2 if name == "W4n6" else 1)
    assert report["checks"]["theorem_consistent"] is True


def test_example_list(capsys):
    report = _json_output(capsys, ["example-list"])
    assert sorted(example["name"] for example in report["examples"]) == ["P4n2", "W4n6", "heis_ext", "heis_sum"]
    assert main(["example-list"]) == 0
    assert "heis_sum:" in capsys.readouterr().out


def test_example_run_records_the_example(capsys):
    report = _json_output(capsys, ["example-run", "--example", "heis_sum", "--lambda", "wt:1,2=1"])
    assert report["verb"] == "degeneracy"
    assert report["example"] == {"name": "heis_sum", "sizes": {"m": 1, "n": 1}}
    assert report["degeneracy_page"] == 1


def test_bad_lambda_token_exits_with_one(capsys):
    assert main(["degeneracy", "--example", "heis_ext", "--lambda", "wt:1=1"]) == 1
    assert "column 4" in capsys.readouterr().err


def test_non_poisson_lambda_exits_with_two(capsys):
    argv = ["degeneracy", "--example", "heis_sum", "--lambda", "tt:1,2=1"]
    assert main(argv) == 2
    assert "not holomorphic" in capsys.readouterr().err


def test_usage_errors_exit_with_one(capsys):
    assert main(["frobnicate"]) == 1
    assert main(["degeneracy"]) == 1
    assert main(["degeneracy", "--example", "heis_ext", "--pages", "0"]) == 1
    assert main(["validate", "--example", "W4n6", "--n", "3"]) == 1
    capsys.readouterr()


def test_m_not_one_reports_null_theorem_flags(capsys, tmp_path):
    path = tmp_path / "two_centers.json"
    dump_algebra(AlgebraSpec(1, 2, {(1, 1, 1): gaussian(0, "-1/2")}, "two centers"), path)
    report = _json_output(capsys, ["degeneracy", "--spec", str(path), "--lambda", "ww:1,2=1"])
    assert report["checks"]["m_is_1"] is False
    assert report["checks"]["theorem_consistent"] is None
    assert report["checks"]["exactness_solvable"] is None


def test_missing_lambda_defaults_to_zero(capsys):
    report = _json_output(capsys, ["degeneracy", "--example", "heis_ext"])
    assert report["lambda"] == {"wt": [], "tt": []}
    assert report["degeneracy_page"] == 1


def test_lambda_file_overrides_tokens(capsys, tmp_path):
    path = tmp_path / "lambda.json"
    path.write_text(json.dumps({"wt": [{"l": 1, "j": 2, "re": "1", "im": "0"}]}), encoding="utf-8")
    report = _json_output(capsys, [
        "degeneracy", "--example", "W4n6", "--lambda", "wt:1,1=1", "--lambda-file", str(path),
    ])
    assert report["degeneracy_page"] == 1


def test_pages_flag_limits_iteration(capsys):
    report = _json_output(capsys, ["degeneracy", "--example", "W4n6", "--lambda", "wt:1,1=1", "--pages", "1"])
    assert len(report["e_pages"]) == 1
    assert report["checks"]["converged"] is False


def test_output_is_deterministic(capsys):
    argv = ["spectral", "--example", "heis_ext", "--n", "2", "--lambda", "wt:1,2=1/2i", "--format", "json"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_output_file(capsys, tmp_path):
    path = tmp_path / "out" / "report.json"
    assert main(["validate", "--example", "heis_ext", "--format", "json", "--output", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(path.read_text(encoding="utf-8"))["verb"] == "validate"


def test_run_returns_structured_errors():
    status, report = run(Command("degeneracy", example="heis_ext", lambda_tokens=("xx:1,1=1",)))
    assert status == 1
    assert report["error"]["type"] == "ParseError"
    assert (report["error"]["line"], report["error"]["column"]) == (1, 1)


def test_run_reports_unexpected_exceptions(monkeypatch):
    def fail(cmd, reports):
        raise RuntimeError("lost")

    monkeypatch.setattr(hpss, "_execute", fail)
    status, report = run(Command("validate", example="heis_ext"))
    assert status == 1
    assert report == {"verb": "validate", "error": {"type": "RuntimeError", "message": "lost"}}


def test_command_validation():
    with pytest.raises(SpecError):
        Command("plot")
    with pytest.raises(SpecError):
        Command("validate", output_format="xml")


def test_parser_builds_commands():
    args = build_parser().parse_args(["example-run", "--example", "P4n2", "--k", "1", "--pages", "2"])
    cmd = command_from_args(args)
    assert (cmd.verb, cmd.example, cmd.sizes, cmd.pages) == ("example-run", "P4n2", {"k": 1}, 2)
