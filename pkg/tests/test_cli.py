import json

import pytest
from jsonschema import validate

from helpers import CORPUS, SCHEMA, corpus_files, run_cli


@pytest.fixture(scope="module")
def schema():
    return json.loads(SCHEMA.read_text())


def test_check_clean_model_exit_zero():
    code, out, _ = run_cli("check", str(CORPUS / "heart.gfo"))
    assert code == 0
    assert "0 violations" in out


def test_check_violating_model_exit_one():
    code, out, _ = run_cli("check", str(CORPUS / "john_incomplete.gfo"))
    assert code == 1
    assert "integration-no-process" in out


def test_check_complete_repairs_and_reports():
    code, out, _ = run_cli("check", str(CORPUS / "john_incomplete.gfo"), "--complete")
    assert code == 0
    assert "derived process" in out


def test_check_integration_mode_flag():
    code, _, _ = run_cli(
        "check", str(CORPUS / "heart.gfo"), "--integration=valuation"
    )
    assert code == 0
    code, _, _ = run_cli(
        "check", str(CORPUS / "heart.gfo"), "--integration", "nonsense"
    )
    assert code == 2


def test_check_json_is_schema_valid(schema):
    for path in corpus_files():
        code, out, _ = run_cli("check", str(path), "--format", "json")
        assert code in (0, 1)
        validate(json.loads(out), schema)


def test_check_json_multiple_inputs(schema):
    code, out, _ = run_cli(
        "check",
        str(CORPUS / "heart.gfo"),
        str(CORPUS / "ball.gfo"),
        "--format",
        "json",
    )
    assert code == 0
    report = json.loads(out)
    validate(report, schema)
    assert [f["path"] for f in report["files"]] == [
        str(CORPUS / "heart.gfo"),
        str(CORPUS / "ball.gfo"),
    ]


def test_check_unreadable_file_exit_two():
    code, _, err = run_cli("check", "no-such-file.gfo")
    assert code == 2
    assert "cannot read" in err


def test_check_multiple_inputs_fail_on_any_parse_error(tmp_path):
    bad = tmp_path / "bad.gfo"
    bad.write_text("presential x at nowhere@0;\n")
    code, _, err = run_cli("check", str(CORPUS / "heart.gfo"), str(bad))
    assert code == 2
    assert "dangling-reference" in err


def test_query_changes_on_presential_exit_two():
    code, _, err = run_cli(
        "query", str(CORPUS / "heart.gfo"), "--changes", "heart_a"
    )
    assert code == 2
    assert "heart_a" in err


def test_parse_failure_reports_diagnostics(tmp_path):
    bad = tmp_path / "bad.gfo"
    bad.write_text("chronoid c = [3,3];\n")
    code, _, err = run_cli("check", str(bad))
    assert code == 2
    assert "zero-duration" in err
    code, out, _ = run_cli("check", str(bad), "--format", "json")
    assert code == 2
    payload = json.loads(out)
    assert payload["diagnostics"][0]["code"] == "zero-duration"
    assert payload["diagnostics"][0]["line"] == 1


def test_usage_error_exit_two():
    code, _, _ = run_cli("check")
    assert code == 2
    code, _, _ = run_cli("query", str(CORPUS / "heart.gfo"))
    assert code == 2


def test_query_realizers(tmp_path):
    code, out, _ = run_cli("query", str(CORPUS / "heart.gfo"), "--realizers", "f_pump")
    assert code == 0
    assert json.loads(out) == ["heart"]


def test_query_realizations():
    code, out, _ = run_cli(
        "query", str(CORPUS / "heart.gfo"), "--realizations", "f_pump"
    )
    assert code == 0
    assert json.loads(out) == [
        {
            "process": "blood-movement",
            "requirement_situation": "s_req",
            "goal_situation": "s_goal",
        }
    ]


def test_query_truthmakers():
    code, out, _ = run_cli(
        "query",
        str(CORPUS / "drinking.gfo"),
        "--truthmakers",
        "fact drinks(John, beer)",
    )
    assert code == 0
    assert json.loads(out) == [
        {"fact": "f_jb", "process": "drinking", "situation": "s_drink"}
    ]


def test_query_truthmakers_holds_form():
    code, out, _ = run_cli(
        "query",
        str(CORPUS / "heart.gfo"),
        "--truthmakers",
        "holds(blood, position, in_heart) at 0;",
    )
    assert code == 0
    assert json.loads(out) == [
        {"fact": "f_start", "process": "blood-movement", "situation": "s_req"}
    ]


def test_query_changes_empty_for_constant():
    code, out, _ = run_cli(
        "query", str(CORPUS / "john_paul.gfo"), "--changes", "John"
    )
    assert code == 0
    assert json.loads(out) == []


def test_query_changes_process_with_tolerance():
    code, out, _ = run_cli(
        "query", str(CORPUS / "trajectories.gfo"), "--changes", "pump_run", "--tol", "4"
    )
    assert code == 0
    assert json.loads(out) == [
        {"points": ["1", "5"], "property": "mode"},
        {"points": [], "property": "pressure"},
    ]


def test_query_classify():
    code, out, _ = run_cli(
        "query", str(CORPUS / "ball.gfo"), "--classify", "velocity", "ball_proc"
    )
    assert code == 0
    assert json.loads(out)["support"] == "presenticNonIsolated"


def test_query_malformed_proposition_exit_two():
    code, _, _ = run_cli(
        "query", str(CORPUS / "heart.gfo"), "--truthmakers", "fact drinks(John"
    )
    assert code == 2
    code, _, _ = run_cli(
        "query", str(CORPUS / "heart.gfo"), "--truthmakers", "holds(a, nosuch, b)"
    )
    assert code == 2


def test_query_unknown_function_exit_two():
    code, _, err = run_cli(
        "query", str(CORPUS / "heart.gfo"), "--realizers", "f_nothing"
    )
    assert code == 2
    assert "f_nothing" in err


def test_dump_is_deterministic():
    first = run_cli("dump", str(CORPUS / "rationals.gfo"))
    second = run_cli("dump", str(CORPUS / "rationals.gfo"))
    assert first == second
    assert first[0] == 0
    payload = json.loads(first[1])
    assert payload["chronoids"]["fine"] == {"left": "1/3", "right": "2/3"}
    assert payload["presentials"]["tick_a"]["valuation"] == {"level": "1/4"}


def test_color_env_toggles_ansi():
    plain = run_cli("check", str(CORPUS / "john_incomplete.gfo"))
    colored = run_cli(
        "check",
        str(CORPUS / "john_incomplete.gfo"),
        env_extra={"GFO_COLOR": "1"},
    )
    assert "\x1b[31m" not in plain[1]
    assert "\x1b[31m" in colored[1]
