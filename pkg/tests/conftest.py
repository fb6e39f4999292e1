import time
from contextlib import contextmanager

import pytest

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


class _Outcome:
    def __init__(self):
        self.checks: list[tuple[str, bool]] = []

    def check(self, label: str, ok) -> bool:
        self.checks.append((label, bool(ok)))
        return bool(ok)


@pytest.fixture
def criterion():
    """Context manager recording one acceptance criterion, its sub-checks and its runtime."""

    @contextmanager
    def run(number: int, title: str, budget: float):
        outcome = _Outcome()
        start = time.perf_counter()
        error = None
        try:
            yield outcome
        except Exception as exc:  # recorded, then re-raised
            error = exc
            raise
        finally:
            elapsed = time.perf_counter() - start
            outcome.check(f"runtime {elapsed:.2f}s < {budget:g}s", elapsed < budget)
            failed = [label for label, ok in outcome.checks if not ok]
            if error is not None:
                failed.append("error")
            detail = "; ".join(label if ok else f"FAILED {label}" for label, ok in outcome.checks)
            if error is not None:
                detail += f"; FAILED error: {error!r}"
            _CRITERIA[number] = (title, not failed, detail)
            print(f"criterion {number} {'PASS' if not failed else 'FAIL'}: {title} -- {detail}")
        failed = [label for label, ok in outcome.checks if not ok]
        assert not failed, f"criterion {number} failed: {'; '.join(failed)}"

    return run


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
