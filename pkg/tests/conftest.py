import pytest

from pairsep.poset import AbstractModel

_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


# auto=0, cat=1, dog=2, truck=3; one head per pair, arranged so that
# auto/cat == cat/truck sits above auto/dog and dog/truck, cat/dog sits above
# dog/truck, and auto/truck stands on its own.
FOUR_CLASS_NAMES = ["auto", "cat", "dog", "truck"]
FOUR_CLASS_MODELS = {
    (0, 1): AbstractModel({0, 3}, {1, 2}, (0, 1)),
    (0, 2): AbstractModel({0}, {2}, (0, 2)),
    (0, 3): AbstractModel({0}, {3}, (0, 3)),
    (1, 2): AbstractModel({2}, {1, 3}, (1, 2)),
    (1, 3): AbstractModel({0, 3}, {1, 2}, (1, 3)),
    (2, 3): AbstractModel({2}, {3}, (2, 3)),
}


@pytest.fixture
def four_class_bank():
    from pairsep.poset import separable_set

    return {p: separable_set(m, 4) for p, m in FOUR_CLASS_MODELS.items()}
