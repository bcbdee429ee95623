"""Acceptance suite: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed live and repeated in the terminal
summary.  Run on its own with ``pytest tests/test_acceptance.py -v``.
"""

import subprocess
import sys
import time

import pytest

from hedgelab import acceptance
from hedgelab.report import Report

LINES = []


def record(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    LINES.append(line)
    print(line)


def failures(rep: Report) -> list[str]:
    return [f"{k}={v['value']!r} (expected {v.get('expected')!r} +/- {v.get('tolerance')!r})"
            for k, v in rep.results.items() if v.get("ok") is False]


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda c: c.__name__)
def test_criterion(criterion):
    rep = criterion()
    bad = failures(rep)
    record(rep.command, rep.ok, rep.inputs.get("title", "") + ("; " + "; ".join(bad) if bad else ""))
    assert rep.ok, "\n" + rep.table()


def test_criterion_15_full_reproduce_run():
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "hedgelab", "reproduce"],
                          capture_output=True, text=True, timeout=600)
    elapsed = time.perf_counter() - t0
    ok = proc.returncode == 0 and elapsed <= acceptance.TOTAL_BUDGET_S
    record("criterion-15", ok, f"full reproduce run: exit {proc.returncode}, {elapsed:.1f} s")
    assert elapsed <= acceptance.TOTAL_BUDGET_S, proc.stdout
    assert proc.returncode == 0, proc.stdout
