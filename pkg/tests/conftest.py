import pytest

ACCEPTANCE: dict[int, tuple[bool, list[str]]] = {}


class Criterion:
    """Collects named checks for one acceptance criterion."""

    def __init__(self, number: int):
        self.number = number
        self.checks: list[tuple[bool, str]] = []

    def check(self, ok: bool, detail: str) -> bool:
        self.checks.append((bool(ok), detail))
        return bool(ok)

    def close(self) -> None:
        ok = all(c for c, _ in self.checks)
        ACCEPTANCE[self.number] = (ok, [("ok   " if c else "FAIL ") + d for c, d in self.checks])
        failed = [d for c, d in self.checks if not c]
        assert not failed, "; ".join(failed)


@pytest.fixture
def criterion(request):
    number = request.node.get_closest_marker("criterion").args[0]
    return Criterion(number)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, lines = ACCEPTANCE[n]
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}")
        for line in lines:
            tr.write_line(f"    {line}")
