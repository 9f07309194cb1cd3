import pytest
from click.testing import CliRunner

from calnlu.cli import main, parse_cons_name
from calnlu.avm import Term
from calnlu.engine import data_path

WORKED = "i want you to arrange a conference in my office at 5"


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, *args):
    return runner.invoke(main, list(args), catch_exceptions=False)


def test_parse_cons_name():
    assert parse_cons_name("sent(cmnd,v.np)") == Term("sent", ("cmnd", "v.np"))
    assert parse_cons_name("fragment(np)") == Term("fragment", ("np",))


def test_interpret_worked_sentence(runner):
    result = run(runner, "--today", "1994-06-01", "interpret", WORKED)
    assert result.exit_code == 0
    assert "***Slots:" in result.output
    assert "[ event_time [ [ hour [ 5 am_or_pm ] ] [ minute 0 ] ] ]" in result.output
    assert "[ hour [ 17 ] ]" in result.output
    assert "pending: event_date" in result.output


def test_interpret_no_default_line_when_unambiguous(runner):
    result = run(runner, "interpret", "schedule a meeting at 5 pm")
    assert result.exit_code == 0
    assert "After defaults" not in result.output


def test_interpret_is_deterministic(runner):
    a = run(runner, "--today", "1994-06-01", "interpret", WORKED)
    b = run(runner, "--today", "1994-06-01", "interpret", WORKED)
    assert a.output == b.output


def test_parse_golden_cancel(runner):
    result = run(runner, "--format", "machine", "parse", "cancel the meeting")
    assert result.exit_code == 0
    assert result.output == (
        "sent(cmnd,v.np):\n"
        "[ [ a_obj [ [ den meeting ] [ mods ( [ det the ] ) ] [ number 1 ]"
        " [ type event ] ] ] [ a_type delete ] [ agent hr ] [ sem_cat command ] ]\n"
    )


def test_no_parse_exits_1(runner):
    result = run(runner, "parse", "zzz")
    assert result.exit_code == 1
    result = run(runner, "interpret", "zzz")
    assert result.exit_code == 1


def test_usage_error_exits_2(runner):
    result = run(runner, "--window", "bogus", "parse", "x")
    assert result.exit_code == 2


def test_data_error_exits_3(runner, tmp_path):
    result = run(runner, "--grammar", str(tmp_path / "missing.cg"), "parse", "hi")
    assert result.exit_code == 3
    broken = tmp_path / "broken.cg"
    broken.write_text("(lexeme)")
    result = run(runner, "--grammar", str(broken), "parse", "hi")
    assert result.exit_code == 3


def test_no_filters_flag_changes_counts(runner):
    strict = run(runner, "parse", "schedule a meeting with bob")
    loose = run(runner, "--no-filters", "parse", "schedule a meeting with bob")
    assert strict.output.count("sent(") == 1
    assert loose.output.count("sent(") >= 2


def test_window_flag_overrides_default(runner):
    # with an 8..18 window, hour 8 is no longer ambiguous
    result = run(runner, "--window", "8..18", "interpret", "schedule a meeting at 8")
    assert "[ hour [ 8 ] ]" in result.output
    default = run(runner, "interpret", "schedule a meeting at 8")
    assert "After defaults" not in default.output
    assert "ambiguous_meridiem" in default.output


def test_env_var_override(runner):
    result = runner.invoke(
        main, ["interpret", "schedule a meeting at 8"],
        env={"CALNLU_WINDOW": "8..18"}, catch_exceptions=False,
    )
    assert "[ hour [ 8 ] ]" in result.output


def test_replay_shipped_transcript(runner):
    result = run(runner, "--today", "1994-06-01", "replay", data_path("dialog_transcript.txt"))
    assert result.exit_code == 0
    assert result.output.count("pass") == 4
    assert "FAIL" not in result.output


def test_replay_reports_first_diff(runner, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("U: Schedule a meeting with Bob!\nS: Nope.\n")
    result = run(runner, "replay", str(bad))
    assert result.exit_code == 1
    assert "expected: Nope." in result.output
    assert "actual:   At what time and date?" in result.output


def test_enumerate_limit_one(runner):
    result = run(runner, "enumerate", "--limit", "1")
    assert result.exit_code == 0
    assert len(result.output.splitlines()) == 1


def test_enumerate_unknown_root(runner):
    result = run(runner, "enumerate", "--root", "ghost(x)", "--limit", "1")
    assert result.exit_code != 0
    assert "ghost" in result.output


def test_repl_session(runner):
    result = runner.invoke(
        main,
        ["--today", "1994-06-01", "repl"],
        input="Schedule a meeting with Bob!\nAt 5 pm.\nTomorrow.\n:calendar\n:quit\n",
        catch_exceptions=False,
    )
    assert result.exit_code == 0
    assert "S> At what time and date?" in result.output
    assert 'S> Scheduled "a meeting" on 1994-06-02 at 17:00 with bob.' in result.output
    assert "ev1 1994-06-02 17:00" in result.output
