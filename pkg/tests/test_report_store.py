import pytest

from src.cli.config_file import load_run_config
from src.core.models import HaltInfo, RunReport, StageRecord
from src.ival.interval import Interval
from src.memory.report_store import ReportStore


@pytest.fixture
def store(tmp_path):
    return ReportStore(str(tmp_path / "reports.db"))


@pytest.fixture
def config():
    return load_run_config(preset="example-system")


def _report(halted=None) -> RunReport:
    return RunReport(kind="system-fixture", name="example-system", halted=halted,
                     stages=[StageRecord.of("H", [Interval(0.449, 0.4491)], 50.0)])


def test_certified_report_comes_back(store, config):
    store.store(config, _report())
    cached = store.get(config)
    assert cached is not None and cached.cached
    assert cached.stages[0].intervals()[0] == Interval(0.449, 0.4491)


def test_halted_report_is_not_served(store, config):
    store.store(config, _report(HaltInfo(message="overlap")))
    assert store.get(config) is None


def test_key_depends_on_the_configuration(store, config):
    other = load_run_config(preset="example-system", overrides={"tol": 1e-3})
    assert ReportStore.key_for(config) != ReportStore.key_for(other)
    store.store(config, _report())
    assert store.get(other) is None


def test_stats(store, config):
    assert store.get_stats()["total_entries"] == 0
    store.store(config, _report())
    store.store(config, _report(HaltInfo(message="overlap")))
    store.get(config)
    stats = store.get_stats()
    assert stats["total_entries"] == 2
    assert stats["halted_entries"] == 1
    assert stats["total_accesses"] >= 1
