import os
import re
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import recprimes.arith as arith


@pytest.fixture(autouse=True)
def isolated_factor_cache(monkeypatch):
    """Keep the default factor cache in-memory and per-test."""
    monkeypatch.delenv("RECPRIMES_CACHE", raising=False)
    arith._default_cache = None
    yield
    arith._default_cache = None


def pytest_collection_modifyitems(config, items):
    if os.environ.get("RECPRIMES_SKIP_SLOW"):
        skip = pytest.mark.skip(reason="RECPRIMES_SKIP_SLOW set")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    results: dict[str, list[str]] = {}
    for status in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            if getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            m = re.search(r"test_c(\d+)", nodeid)
            if m:
                results.setdefault(m.group(1), []).append(status)
    if not results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for crit in sorted(results, key=int):
        statuses = results[crit]
        if "failed" in statuses:
            verdict = "FAIL"
        elif all(s == "skipped" for s in statuses):
            verdict = "SKIPPED"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"criterion {int(crit):2d}: {verdict} ({len(statuses)} checks)")
