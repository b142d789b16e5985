"""
Tests for wavesplitlib.wavesplitrundb.
"""

import pytest

from wavesplitlib.wavesplitexception import WaveSplitValidationException
from wavesplitlib.wavesplitrundb import RunLedger, run_status


def _manifest(run_id, subcommand="decompose", config_hash="abc", exit_code=0, started="2024-01-01T00:00:00"):
    return {
        "run_id": run_id,
        "subcommand": subcommand,
        "config_hash": config_hash,
        "output_dir": "/tmp/out",
        "started": started,
        "wall_time": 1.5,
        "exit_code": exit_code,
    }


@pytest.fixture
def ledger(tmp_path):
    led = RunLedger(str(tmp_path / "runs.db"))
    led.init_db()
    return led


def test_run_status():
    assert run_status(0) == "complete"
    assert run_status(1) == "failed"
    assert run_status(2) == "aborted"
    assert run_status(3) == "aborted"


def test_empty_ledger(ledger):
    assert ledger.n_runs() == 0
    assert ledger.get_runs() == []
    assert not ledger.is_run_in_db("nothing")


def test_add_and_query(ledger):
    ledger.add_run(_manifest("a", started="2024-01-01T00:00:01"))
    ledger.add_run(_manifest("b", subcommand="verify", config_hash="xyz", exit_code=1, started="2024-01-01T00:00:02"))
    ledger.add_run(_manifest("c", exit_code=3, started="2024-01-01T00:00:03"))

    assert ledger.is_run_in_db("a")
    assert ledger.n_runs() == 3
    assert ledger.n_runs("complete") == 1
    assert ledger.n_runs("failed") == 1
    assert ledger.n_runs("aborted") == 1

    runs = ledger.get_runs()
    assert [r["run_id"] for r in runs] == ["a", "b", "c"]
    assert runs[0]["wall_time"] == 1.5
    assert [r["run_id"] for r in ledger.get_runs(subcommand="decompose")] == ["a", "c"]
    assert [r["run_id"] for r in ledger.get_runs(config_hash="xyz")] == ["b"]
    assert ledger.get_runs("verify", "abc") == []


def test_add_run_merges(ledger):
    ledger.add_run(_manifest("a", exit_code=3))
    ledger.add_run(_manifest("a", exit_code=0))
    runs = ledger.get_runs()
    assert len(runs) == 1
    assert runs[0]["status"] == "complete"


def test_ensure_db_keeps_rows(tmp_path):
    led = RunLedger(str(tmp_path / "runs.db"))
    led.ensure_db()
    led.add_run(_manifest("a"))
    led.ensure_db()
    assert led.n_runs() == 1
    led.init_db()
    assert led.n_runs() == 0


def test_optional_manifest_keys(ledger):
    ledger.add_run({"run_id": "m", "subcommand": "kernels", "config_hash": "h"})
    row = ledger.get_runs()[0]
    assert row["exit_code"] == 0
    assert row["wall_time"] == 0.0
    assert row["output_dir"] is None


def test_validation(ledger):
    with pytest.raises(WaveSplitValidationException):
        ledger.add_run({"run_id": "x", "subcommand": "kernels"})
    with pytest.raises(WaveSplitValidationException):
        ledger.n_runs("pending")
