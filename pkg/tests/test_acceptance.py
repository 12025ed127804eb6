"""One test per acceptance criterion; every check line is echoed in the run summary."""
import pytest

from planegraphs.acceptance import CRITERIA

LINES: list[str] = []


@pytest.mark.parametrize("criterion", sorted(CRITERIA), ids=lambda c: f"criterion_{c}")
def test_criterion(criterion):
    checks = CRITERIA[criterion]()
    assert checks
    for c in checks:
        LINES.append(c.line())
        print(c.line())
    failed = [c.line() for c in checks if not c.passed]
    assert not failed, "\n".join(failed)
