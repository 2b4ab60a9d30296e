import pytest

# criterion id -> (passed, detail); filled by the acceptance tests
ACCEPTANCE = {}


@pytest.fixture
def criterion():
    def record(cid, passed, detail):
        ACCEPTANCE[cid] = (bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=lambda c: (int(c[1:].split(".")[0]), c)):
        passed, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"{cid:<5} {'PASS' if passed else 'FAIL'}  {detail}")
