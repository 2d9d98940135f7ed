"""The acceptance battery, one test per numbered check.

The battery runs once per session (twice, counting the determinism rerun);
each test prints its [PASS]/[FAIL] line to the terminal.
"""
import os

import pytest

from e2lab.acceptance import run_suite
from e2lab.config import RunConfig

NUMBERS = range(1, 14)


@pytest.fixture(scope="module")
def outcomes(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance")
    cfg = RunConfig(seed=0, workers=min(4, os.cpu_count() or 1), output=str(out))
    return {o.number: o for o in run_suite(cfg, echo=None)}, out


@pytest.mark.slow
@pytest.mark.parametrize("number", NUMBERS)
def test_criterion(outcomes, number, capsys):
    results, _ = outcomes
    o = results[number]
    with capsys.disabled():
        print(f"\n{o.line()}")
    assert o.passed, o.detail


@pytest.mark.slow
def test_output_files(outcomes):
    _, out = outcomes
    names = sorted(os.listdir(out / "run"))
    assert names == sorted([f"criterion_{n:02d}.csv" for n in range(1, 13)] + ["summary.csv"])
    summary = (out / "run" / "summary.csv").read_text()
    assert summary.startswith("criterion,title,passed,detail")
    assert " s)" not in summary
