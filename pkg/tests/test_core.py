import time

import numpy as np
import pytest

from affine_vlab.core.config import Settings, settings
from affine_vlab.core.errors import (
    AffineVlabError,
    ConfigParseError,
    ConfigValidationError,
    DegenerateDirection,
    NoConvergence,
    NumericError,
    VerifyFailure,
)
from affine_vlab.core.parallel import chunk_bounds, chunked_sum, ordered_map, worker_count
from affine_vlab.utils.validators import critical_exponent, is_critical, validate_exponents, validate_polygon


def test_exit_codes():
    assert ConfigParseError("x").exit_code == 2
    assert ConfigValidationError("x").exit_code == 3
    assert DegenerateDirection("x").exit_code == 4
    assert NoConvergence("x").exit_code == 5
    assert VerifyFailure("x").exit_code == 6
    assert issubclass(DegenerateDirection, NumericError)
    assert issubclass(VerifyFailure, AffineVlabError)


def test_error_details():
    e = ConfigParseError("duplicate key 'n'", line=4)
    assert str(e) == "line 4: duplicate key 'n'"
    assert e.details == {"line": 4}
    assert str(NoConvergence()) == "NoConvergence"


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("AFFINE_VLAB_THREADS", "3")
    monkeypatch.setenv("DEFAULT_DIRECTIONS_2D", "64")
    fresh = Settings()
    assert fresh.worker_count == 3
    assert fresh.DEFAULT_DIRECTIONS_2D == 64


def test_worker_count_is_capped(monkeypatch):
    monkeypatch.setattr(settings, "AFFINE_VLAB_THREADS", 2)
    assert worker_count() == 2
    assert worker_count(8) == 2
    assert worker_count(1) == 1


def test_ordered_map_keeps_input_order(monkeypatch):
    monkeypatch.setattr(settings, "AFFINE_VLAB_THREADS", 4)

    def slow_square(k):
        time.sleep(0.001 * (5 - k))
        return k * k

    assert ordered_map(slow_square, range(6)) == [0, 1, 4, 9, 16, 25]


def test_chunk_bounds_cover_range():
    bounds = chunk_bounds(10, chunk=4)
    assert bounds == [(0, 4), (4, 8), (8, 10)]
    assert chunk_bounds(0, chunk=4) == []


def test_chunked_sum_is_deterministic(monkeypatch):
    monkeypatch.setattr(settings, "AFFINE_VLAB_THREADS", 4)
    data = np.random.default_rng(0).normal(size=(1000, 3))
    fn = lambda s, e: data[s:e].sum(axis=0)
    first = chunked_sum(fn, len(data), chunk=64)
    assert np.array_equal(first, chunked_sum(fn, len(data), chunk=64))
    assert np.allclose(first, data.sum(axis=0), rtol=1e-12)
    with pytest.raises(ValueError):
        chunked_sum(fn, 0)


# ==================== Validators ====================

def test_exponent_validation():
    assert validate_exponents(3, 2.0, 6.0) == (True, None)
    ok, message = validate_exponents(3, 2.0, 7.0)
    assert not ok and "p*" in message
    assert validate_exponents(2, 2.0)[0]
    assert not validate_exponents(2, 1.0)[0]
    assert not validate_exponents(2, 2.0, 3.0)[0]
    assert not validate_exponents(4, 2.0)[0]
    assert not validate_exponents(3, 2.0, 1.5)[0]


def test_critical_exponent():
    assert critical_exponent(3, 2.0) == 6.0
    assert critical_exponent(2, 2.0) == float("inf")
    assert is_critical(2, 1.5, 6.0)
    assert not is_critical(2, 1.5, 5.9)


def test_polygon_validation():
    assert validate_polygon([[0, 0], [1, 0], [1, 1], [0, 1]]) == (True, None)
    assert not validate_polygon([[0, 0], [1, 1], [1, 0], [0, 1]])[0]
    assert not validate_polygon([[0, 0], [1, 0], [2, 0]])[0]
    assert not validate_polygon([[0, 0], [1, 0]])[0]
