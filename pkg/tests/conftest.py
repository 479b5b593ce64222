import pytest


def naive_r(dims, masks):
    """Unmemoized reference: always peel the last summand, forget zero factors."""
    dims = list(dims)
    masks = list(masks)
    while 0 in dims:
        i = dims.index(0)
        k = len(dims)
        shift = k - 1 - i
        masks = [((m >> (shift + 1)) << shift) | (m & ((1 << shift) - 1)) for m in masks]
        del dims[i]
    if not dims:
        return 1
    k = len(dims)
    alpha, rest = masks[-1], masks[:-1]
    total = 0
    for j in range(k):
        if (alpha >> (k - 1 - j)) & 1:
            sub = dims.copy()
            sub[j] -= 1
            total ^= naive_r(sub, rest)
    return total


_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and (report.when == "call" or report.failed):
        label = marker.args[0]
        prev = _criteria.get(label, True)
        _criteria[label] = prev and report.passed


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_criteria, key=lambda s: int(s.split()[0])):
        terminalreporter.write_line(f"{'PASS' if _criteria[label] else 'FAIL'}  criterion {label}")
