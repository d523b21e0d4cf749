import math

import numpy as np
import pytest
from pydantic import ValidationError

from affine_vlab.core.errors import BadCount, OutOfRange
from affine_vlab.numerics.constants import (
    alpha_np,
    bubble,
    bubble_sobolev_ratio,
    critical_lower_bound,
    k_np,
    omega,
    sharp_constants,
    talenti_constant,
)
from affine_vlab.numerics.quadrature import alpha_consistency, directions, moment_integral
from affine_vlab.schemas.constants import ExtremalBubble


# ==================== Direction sets ====================

def test_direction_weights_sum_to_sphere_measure(ds2, ds3):
    assert ds2.weights.sum() == pytest.approx(2 * math.pi, rel=1e-14)
    assert ds3.weights.sum() == pytest.approx(4 * math.pi, rel=1e-12)
    assert np.allclose(np.linalg.norm(ds3.directions, axis=1), 1.0)


def test_3d_rule_rounds_up_to_product_size(ds3):
    L = math.ceil(math.sqrt(266 / 2))
    assert ds3.size == 2 * L * L
    assert ds3.size >= 266
    assert np.all(ds3.weights > 0)


def test_3d_rule_is_antipodally_closed(ds3):
    xi = ds3.directions
    gaps = np.min(np.linalg.norm(xi[:, None, :] + xi[None, :, :], axis=2), axis=1)
    assert np.max(gaps) < 1e-12


def test_too_few_directions():
    with pytest.raises(BadCount):
        directions(2, 3)
    with pytest.raises(OutOfRange):
        directions(4, 64)


def test_rule_keys_differ():
    assert directions(2, 64).key() != directions(2, 128).key()
    assert directions(2, 64).key() == directions(2, 64).key()


def test_moment_is_rotation_invariant(ds2):
    a = moment_integral(ds2, 2.0, [1.0, 0.0])
    b = moment_integral(ds2, 2.0, [math.cos(0.3), math.sin(0.3)])
    assert a == pytest.approx(b, rel=1e-12)
    assert a == pytest.approx(math.pi, rel=1e-12)


@pytest.mark.parametrize(
    "n, p, m, tol",
    [(2, 2.0, 256, 1e-12), (3, 2.0, 266, 1e-6), (2, 1.5, 512, 1e-6)],
)
def test_alpha_identity(n, p, m, tol):
    assert alpha_consistency(n, p, m) <= tol


# ==================== Closed forms ====================

def test_omega_values():
    assert omega(1) == pytest.approx(2.0)
    assert omega(2) == pytest.approx(math.pi)
    assert omega(3) == pytest.approx(4 * math.pi / 3)


def test_alpha_closed_form():
    assert alpha_np(2, 2) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-12)


def test_sharp_constant_reference_values():
    assert k_np(3, 2) == pytest.approx(0.42727, abs=1e-5)
    assert k_np(2, 1) == pytest.approx(0.5 / math.sqrt(math.pi), rel=1e-12)


@pytest.mark.parametrize("n, p", [(3, 2.0), (3, 1.5), (4, 2.0), (5, 2.0)])
def test_sharp_constant_matches_talenti(n, p):
    assert k_np(n, p) == pytest.approx(talenti_constant(n, p), rel=1e-12)


def test_sharp_constant_range():
    with pytest.raises(OutOfRange):
        k_np(2, 2)
    with pytest.raises(OutOfRange):
        talenti_constant(3, 1)


def test_sharp_constants_table():
    table = sharp_constants(3, 2)
    names = [name for name, _ in table.to_rows()]
    assert "k_np" in names and "talenti" in names
    assert table.mu_critical == pytest.approx(1 / table.k_np)

    eigen_only = sharp_constants(2, 2)
    assert eigen_only.k_np is None
    assert "k_np" not in [name for name, _ in eigen_only.to_rows()]


def test_critical_lower_bound():
    threshold = k_np(3, 2) ** -2
    assert critical_lower_bound(3, 2, 0.0, 9.87) == pytest.approx(threshold)
    assert critical_lower_bound(3, 2, 4.935, 9.87) == pytest.approx(0.5 * threshold)
    with pytest.raises(OutOfRange):
        critical_lower_bound(3, 2, 0.0, 0.0)


# ==================== Extremal family ====================

def test_bubble_peak_and_decay():
    e = ExtremalBubble(a=2.0, b=1.0, x0=[0.0, 0.0, 0.0])
    assert bubble(e, 3, 2.0, [0.0, 0.0, 0.0]) == pytest.approx(2.0)
    values = bubble(e, 3, 2.0, np.array([[0.5, 0, 0], [1, 0, 0], [2, 0, 0]]))
    assert np.all(np.diff(values) < 0)


def test_bubble_matrix_must_be_unimodular():
    with pytest.raises(ValidationError):
        ExtremalBubble(x0=[0.0, 0.0], A=[[2.0, 0.0], [0.0, 1.0]])
    e = ExtremalBubble(x0=[0.0, 0.0], A=[[2.0, 0.0], [0.0, 0.5]])
    assert np.allclose(e.matrix, np.diag([2.0, 0.5]))


def test_truncated_bubble_ratio_decreases_to_threshold():
    threshold = k_np(3, 2) ** -2
    ratios = [bubble_sobolev_ratio(3, 2, b) for b in (1e2, 1e3, 1e4)]
    assert ratios[0] > ratios[1] > ratios[2]
    assert ratios[2] >= threshold * (1 - 1e-4)
    assert ratios[2] <= threshold * 1.05
