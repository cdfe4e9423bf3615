import math

import numpy as np
import pytest

from rkhsdiag.catalog import get_model, list_models

ALL_MODELS = list_models() + ["gaussian-rbf:n=2"]
COMMUTATIVE = [m for m in list_models() if m != "vertical-poly"]


def random_g(model, rng):
    if model.group.kind == "circle":
        return float(rng.uniform(0, 2 * math.pi))
    x = rng.uniform(-1.5, 1.5, model.n)
    return float(x[0]) if model.n == 1 else tuple(float(c) for c in x)


def random_y(model, rng):
    lo, hi = model.y_region
    y = rng.uniform(lo, hi, model.n)
    return float(y[0]) if model.n == 1 else tuple(float(c) for c in y)


def random_xi(model, rng):
    if model.group.dual_is_integer:
        return int(rng.integers(-4, 5))
    xi = rng.uniform(0.25, 3.0, model.n) * rng.choice([-1, 1], model.n)
    return float(xi[0]) if model.n == 1 else tuple(float(c) for c in xi)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=ALL_MODELS)
def model(request):
    return get_model(request.param)


_CRITERIA: list[str] = []


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion and echo it immediately."""
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def record(number: int, ok: bool, text: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {text}"
        _CRITERIA.append(line)
        with capman.global_and_fixture_disabled():
            print("\n" + line, flush=True)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
