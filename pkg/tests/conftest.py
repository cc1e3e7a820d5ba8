import pytest

from visangle.geometry import standard_suite


@pytest.fixture(scope="session")
def suite():
    return standard_suite()


@pytest.fixture(scope="session", params=["disk", "shifted_disk", "ellipse", "const_width", "generic"])
def suite_body(request, suite):
    return suite[request.param]


def pytest_sessionstart(session):
    import time

    session.config._visangle_t0 = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from test_acceptance import CRITERIA, RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key, title in CRITERIA.items():
        status, detail = RESULTS.get(key, ("SKIP", "not run"))
        terminalreporter.write_line(f"[{status}] {key:>3} {title}: {detail}")


def pytest_collection_modifyitems(session, config, items):
    # acceptance last, so its wall-time check covers the whole session
    items.sort(key=lambda item: item.module.__name__.endswith("test_acceptance"))
