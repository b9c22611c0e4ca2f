import pytest

_KEY = pytest.StashKey[dict]()


def pytest_addoption(parser):
    parser.addoption(
        "--heavy", action="store_true", default=False,
        help="also run long Monte Carlo rows (searches beyond n = 15000)",
    )


def pytest_configure(config):
    config.stash[_KEY] = {}


def pytest_collection_modifyitems(config, items):
    if config.getoption("--heavy"):
        return
    skip = pytest.mark.skip(reason="heavy; run with --heavy")
    for item in items:
        if "heavy" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def record(request):
    """Log one acceptance check: ``record(criterion, label, ok, detail)``."""
    log = request.config.stash[_KEY]

    def _record(criterion: int, label: str, ok: bool, detail: str = ""):
        log.setdefault(criterion, []).append((label, bool(ok), detail))
        return ok

    return _record


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_KEY, {})
    if not log:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion in sorted(log):
        checks = log[criterion]
        failed = [c for c in checks if not c[1]]
        status = "FAIL" if failed else "PASS"
        tr.write_line(f"{status} criterion {criterion}: {len(checks) - len(failed)}/{len(checks)} checks")
        for label, _, detail in failed:
            tr.write_line(f"      failed: {label} {detail}")
