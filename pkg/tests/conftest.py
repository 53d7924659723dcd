import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import pytest

_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """Record one part of an acceptance criterion: record(criterion, part, ok, detail, seconds)."""
    store = request.config.stash[_ACCEPTANCE]

    def record(criterion, part, ok, detail, seconds):
        store.setdefault(criterion, []).append((part, bool(ok), detail, seconds))
    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(store):
        parts = store[crit]
        ok = all(p[1] for p in parts)
        total = sum(p[3] for p in parts)
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'} ({total:.1f} s)")
        for part, pok, detail, sec in parts:
            terminalreporter.write_line(f"    {part}: {'pass' if pok else 'FAIL'}, {detail} [{sec:.1f} s]")
