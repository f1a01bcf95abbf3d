from __future__ import annotations

import pytest

from qsearch import complete_graph, eig_sym, ground_shift, laplacian, target_overlaps

_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance check and assert it."""

    def _report(name: str, ok: bool, detail: str = "") -> None:
        _RESULTS.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"

    return _report


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture(scope="session")
def complete_profiles():
    out = {}
    for n in (16, 64, 256):
        out[n] = target_overlaps(ground_shift(eig_sym(laplacian(complete_graph(n)))), 0)
    return out
