import math

import numpy as np
import pytest

from affine_vlab.core.errors import GridMismatch, NonFinite, OutOfRange, SingularMatrix
from affine_vlab.numerics.fields import (
    ScalarField,
    band_limited_field,
    bump,
    cell_gradient_array,
    centroid_values,
    centroid_values_transpose,
    grad_norm,
    gradients,
    gradients_transpose,
    lq_norm,
    pullback,
    radial_profile,
    truncate,
    truncation_shares,
)
from affine_vlab.numerics.geometry import GridDomain, build_grid, transform_domain


@pytest.fixture
def open_box():
    # Every node interior, so linear fields keep their values
    return GridDomain.from_mask([0.0, 0.0], 0.1, np.ones((6, 5), dtype=bool))


def test_linear_field_gradient_is_exact(open_box):
    u = ScalarField.from_function(open_box, lambda x: 2.0 * x[..., 0] - 3.0 * x[..., 1])
    g = gradients(u).g
    assert g.shape == (open_box.n_cells, 2)
    assert np.allclose(g, [2.0, -3.0], atol=1e-12)


def test_masked_nodes_hold_zero(disk_grid):
    u = ScalarField(disk_grid, np.ones(disk_grid.shape))
    assert np.all(u.values[~disk_grid.inside_mask] == 0.0)
    assert np.all(u.values[disk_grid.inside_mask] == 1.0)


def test_field_validation(disk_grid):
    with pytest.raises(GridMismatch):
        ScalarField(disk_grid, np.zeros((3, 3)))
    values = np.zeros(disk_grid.shape)
    values[tuple(np.argwhere(disk_grid.inside_mask)[0])] = np.nan
    with pytest.raises(NonFinite):
        ScalarField(disk_grid, values)


def test_gradient_transpose_is_adjoint(disk_grid, random_field):
    u = random_field(3)
    rng = np.random.default_rng(11)
    flux = rng.normal(size=(disk_grid.n_cells, 2))
    lhs = float(np.sum(cell_gradient_array(disk_grid, u.values) * flux))
    rhs = float(np.sum(u.values * gradients_transpose(disk_grid, flux)))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_centroid_transpose_is_adjoint(disk_grid, random_field):
    u = random_field(4)
    c = np.random.default_rng(5).normal(size=disk_grid.n_cells)
    lhs = float(np.sum(centroid_values(u) * c))
    rhs = float(np.sum(u.values * centroid_values_transpose(disk_grid, c)))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_bump_norms_match_continuum(disk_spec):
    dom = build_grid(disk_spec, 0.02)
    u = bump(dom, radius=1.0)
    assert grad_norm(u, 2) == pytest.approx(math.sqrt(2 * math.pi), rel=0.02)
    assert lq_norm(u, 2) == pytest.approx(math.sqrt(math.pi / 3), rel=0.02)


def test_lq_norm_rejects_small_exponent(disk_bump):
    with pytest.raises(OutOfRange):
        lq_norm(disk_bump, 0.5)


def test_truncation_adds_back_exactly(random_field):
    u = random_field(7)
    for level in (0.1 * u.max_abs(), 0.5 * u.max_abs()):
        lower, upper = truncate(u, level)
        assert np.array_equal(lower.values + upper.values, u.values)
        assert np.max(np.abs(lower.values)) <= level * (1 + 1e-12)


def test_truncation_level_must_be_positive(disk_bump):
    with pytest.raises(OutOfRange):
        truncate(disk_bump, 0.0)


def test_truncation_shares_split_cells(disk_bump):
    shares = truncation_shares(disk_bump, 0.5)
    assert shares.shape == (disk_bump.dom.n_cells,)
    assert np.all((shares >= 0.0) & (shares <= 1.0))
    # Centre cells lie above the level, rim cells below it
    assert shares.min() == 0.0 and shares.max() == 1.0
    assert np.any((shares > 0.0) & (shares < 1.0))
    assert np.all(truncation_shares(disk_bump, 2.0) == 1.0)


def test_pullback_identity(disk_bump):
    same = pullback(disk_bump, np.eye(2), disk_bump.dom)
    assert np.allclose(same.values, disk_bump.values, atol=1e-12)
    with pytest.raises(SingularMatrix):
        pullback(disk_bump, np.zeros((2, 2)), disk_bump.dom)


def test_radial_profile_scatter(disk_bump, random_field):
    radii, means, scatter = radial_profile(disk_bump)
    assert scatter < 0.05
    assert means[0] > means[-1]
    _, _, rough = radial_profile(random_field(1))
    assert rough > scatter


def test_positive_band_limited_field(disk_grid):
    u = band_limited_field(disk_grid, np.random.default_rng(0), positive=True)
    assert np.all(u.interior() > 0)


def test_seeded_fields_are_reproducible(disk_grid):
    a = band_limited_field(disk_grid, np.random.default_rng(42))
    b = band_limited_field(disk_grid, np.random.default_rng(42))
    assert np.array_equal(a.values, b.values)


def test_add_requires_same_grid(disk_bump, square_grid):
    other = bump(square_grid, center=[0.5, 0.5], radius=0.5)
    with pytest.raises(GridMismatch):
        disk_bump + other
    doubled = disk_bump + disk_bump
    assert np.allclose(doubled.values, 2 * disk_bump.values)


def test_shear_pullback_preserves_l2_norm(disk_bump):
    T = np.array([[1.0, 1.0], [0.0, 1.0]])
    sheared = pullback(disk_bump, T, transform_domain(disk_bump.dom, T))
    assert lq_norm(sheared, 2.0) == pytest.approx(lq_norm(disk_bump, 2.0), rel=0.02)


def test_dilation_pullback_scales_l1_mass(disk_bump):
    T = 2.0 * np.eye(2)
    shrunk = pullback(disk_bump, T, transform_domain(disk_bump.dom, T))
    assert lq_norm(shrunk, 1.0) == pytest.approx(0.25 * lq_norm(disk_bump, 1.0), rel=0.02)
