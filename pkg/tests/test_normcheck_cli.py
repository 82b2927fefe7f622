import os

import pytest

import normcheck
from normcheck import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main


@pytest.fixture
def machine(machines_dir):
    return lambda name: os.path.join(machines_dir, name)


def test_check_preserving(quiet_logs, capsys, machine):
    assert main(["check", machine("three_state.txt")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Verdict: normality preserved" in out
    assert "status: preserving" in out


def test_check_not_preserving(quiet_logs, capsys, machine):
    assert main(["check", machine("b_deleting.txt"), "--workers", "1"]) == EXIT_FAILED
    out = capsys.readouterr().out
    assert "witness: b" in out
    assert "required frequency: 1/2" in out


def test_check_invalid_inputs(quiet_logs, capsys, tmp_path, machine):
    assert main(["check", str(tmp_path / "missing.txt")]) == EXIT_INVALID
    assert "missing.txt" in capsys.readouterr().err

    incomplete = tmp_path / "incomplete.txt"
    incomplete.write_text("input-alphabet: a b\noutput-alphabet: a b\ninitial: 1\nstates: 1\ntrans: 1 a a 1\n")
    assert main(["check", str(incomplete)]) == EXIT_INVALID

    broken = tmp_path / "broken.txt"
    broken.write_text("input-alphabet: a b\n")
    assert main(["check", str(broken)]) == EXIT_INVALID


def test_errors_are_reported_once(quiet_logs, capsys, tmp_path):
    assert main(["check", str(tmp_path / "missing.txt")]) == EXIT_INVALID
    err = capsys.readouterr().err
    assert err.count("No such file or directory") == 1
    assert err.startswith("Error:")


def test_errors_are_logged_to_file(quiet_logs):
    main(["check", str(quiet_logs / "missing.txt")])
    with open(quiet_logs / "logs" / "normcheck.log") as f:
        assert "[Normcheck.CLI] - ERROR - check failed" in f.read()


def test_freq(quiet_logs, capsys, machine):
    assert main(["freq", machine("three_state.txt"), "ab"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1/4"

    assert main(["freq", machine("b_deleting.txt"), "b"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "0"

    assert main(["freq", machine("all_empty.txt"), "a"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "undefined (all-empty-output)"


def test_freq_per_component(quiet_logs, capsys, machine):
    assert main(["freq", machine("two_components.txt"), "b"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["component 1: 1/2", "component 2: 0"]


def test_build(quiet_logs, capsys, machine):
    assert main(["build", machine("three_state.txt")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "state: 1 init 2/3 final 1" in out
    assert "trans: 1 b 1/4 4" in out
    assert "trans: 5 a 1 1" in out
    assert "pi = [ 2/3 0 0 1/6 1/6 ]" in out

    assert main(["build", machine("three_state.txt"), "--no-matrices"]) == EXIT_OK
    assert "pi = [" not in capsys.readouterr().out


def test_build_headers_each_component(quiet_logs, capsys, machine):
    assert main(["build", machine("two_components.txt"), "--no-matrices"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "# component 1: states 1" in out
    assert "# component 2: states 2" in out


def test_run(quiet_logs, capsys, machine):
    assert main(["run", machine("three_state.txt"), "--source", "champernowne", "-n", "4"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "abba"

    assert main(["run", machine("b_deleting.txt"), "--source", "champernowne:2", "-n", "8"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "aaa"


def test_run_from_file(quiet_logs, capsys, tmp_path, machine):
    source = tmp_path / "input.txt"
    source.write_text("bb\nab\n")
    assert main(["run", machine("three_state.txt"), "--source", f"file:{source}", "-n", "4"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "bba"


def test_simulate_csv(quiet_logs, capsys, machine):
    args = ["simulate", machine("identity.txt"), "--source", "random:3", "-n", "200000", "--max-len", "2", "--csv"]
    assert main(args) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "word,predicted,empirical,gap"
    assert [row.split(",")[0] for row in rows[1:]] == ["a", "b", "aa", "ab", "ba", "bb"]


def test_simulate_fails_on_tight_tolerance(quiet_logs, capsys, machine):
    args = ["simulate", machine("identity.txt"), "--source", "champernowne", "-n", "5000",
            "--max-len", "1", "--tolerance", "0.000001", "--csv"]
    assert main(args) == EXIT_FAILED


def test_states_table(quiet_logs, capsys, machine):
    assert main(["states", machine("three_state.txt"), "--source", "random:1", "-n", "100000"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "predicted" in out and "1/2" in out


def test_bad_source(quiet_logs, capsys, machine):
    assert main(["simulate", machine("three_state.txt"), "--source", "noise"]) == EXIT_INVALID
    assert "unknown input source" in capsys.readouterr().err


def test_timing(quiet_logs, capsys, machine):
    assert main(["--timing", "check", machine("three_state.txt")]) == EXIT_OK
    assert "size 11, wall time" in capsys.readouterr().err


def test_version(capsys):
    with pytest.raises(SystemExit) as exited:
        main(["--version"])
    assert exited.value.code == 0
    assert normcheck.VERSION in capsys.readouterr().out


def test_log_level_override(quiet_logs, machine):
    main(["--log-level", "DEBUG", "freq", machine("three_state.txt"), "a"])
    assert normcheck.logger.level == normcheck.logging.DEBUG


def test_epsilon_cycle_document_is_rejected(quiet_logs, capsys, tmp_path):
    cycle = tmp_path / "cycle.txt"
    cycle.write_text(
        "input-alphabet: a b\noutput-alphabet: a b\ninitial: 1\nstates: 1 2 3\n"
        "parent: 2 1\nparent: 3 1\n"
        "trans: 1 a a 1\ntrans: 1 b - 2\ntrans: 2 ε a 3\ntrans: 3 ε b 2\n"
    )
    assert main(["run", str(cycle), "-n", "1"]) == EXIT_INVALID
    assert main(["check", str(cycle)]) == EXIT_INVALID
    assert "not deterministic" in capsys.readouterr().err


@pytest.mark.parametrize("workers", ["0", "-3", "many"])
def test_workers_must_be_positive(quiet_logs, capsys, machine, workers):
    with pytest.raises(SystemExit) as exited:
        main(["check", machine("three_state.txt"), "--workers", workers])
    assert exited.value.code == EXIT_INVALID
    assert "--workers" in capsys.readouterr().err
