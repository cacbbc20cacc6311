"""Shared fixtures, the acceptance summary and the exact-division sentinel."""

from __future__ import annotations

import json
from importlib import resources

import pytest

from clusteraut import errors
from clusteraut.exmatrix import ExchangeMatrix, matrix_from_json
from clusteraut.grouplab import load_gens
from clusteraut.seeds import ClusterPattern

# every NonExactDivision constructed during the session, with the test that raised it
DIVISION_EVENTS: list[str] = []
_current = {"test": "<collection>"}
ACCEPTANCE: dict[int, tuple[str, str]] = {}

_orig_init = errors.NonExactDivision.__init__


def _recording_init(self, *args, **kwargs):
    DIVISION_EVENTS.append(_current["test"])
    _orig_init(self, *args, **kwargs)


errors.NonExactDivision.__init__ = _recording_init


def pytest_configure(config):
    config.addinivalue_line("markers", "expects_nonexact: the test deliberately triggers a failed division")
    config.addinivalue_line("markers", "acceptance(num, title): numbered acceptance criterion")
    config.addinivalue_line("markers", "sentinel: runs after every other test")


def pytest_collection_modifyitems(config, items):
    # the division sentinel must run after everything else
    last = [it for it in items if it.get_closest_marker("sentinel")]
    rest = [it for it in items if not it.get_closest_marker("sentinel")]
    items[:] = rest + last


@pytest.fixture(autouse=True)
def _track_test(request):
    _current["test"] = request.node.nodeid if not request.node.get_closest_marker("expects_nonexact") else "expected"
    yield
    _current["test"] = "<between tests>"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    num, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = ACCEPTANCE.get(num)
        status = "PASS" if rep.outcome == "passed" else "FAIL"
        if prev is None or prev[0] == "PASS":
            ACCEPTANCE[num] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        status, title = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {status}  {title}")


# data


def _data(name: str) -> dict:
    text = resources.files("clusteraut").joinpath("data", f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def builtin_matrix(name: str) -> ExchangeMatrix:
    return matrix_from_json(_data(name))


def builtin_gens(pattern: ClusterPattern, name: str):
    obj = _data(name)
    return load_gens(pattern, obj), obj.get("words", [])


@pytest.fixture(scope="session")
def x7() -> ClusterPattern:
    return ClusterPattern(builtin_matrix("x7"))


@pytest.fixture(scope="session")
def x7_gens(x7):
    return builtin_gens(x7, "x7_gens")


@pytest.fixture(scope="session")
def a2() -> ClusterPattern:
    return ClusterPattern(builtin_matrix("a2"))


@pytest.fixture(scope="session")
def rank3() -> ClusterPattern:
    return ClusterPattern(builtin_matrix("rank3_acyclic"))


@pytest.fixture(scope="session")
def chain234() -> ClusterPattern:
    return ClusterPattern(builtin_matrix("chain4_234"))


@pytest.fixture(scope="session")
def chain222() -> ClusterPattern:
    return ClusterPattern(builtin_matrix("chain4_222"))
