import numpy as np
import pytest

from affine_vlab.core.config import settings
from affine_vlab.core.errors import DegenerateDirection, GridMismatch
from affine_vlab.numerics.affine_energy import (
    comparison_steps,
    energy,
    energy_gradient,
    energy_p,
    kernel,
    kernel_factor,
    superadditivity_check,
    weak_form,
)
from affine_vlab.numerics.fields import ScalarField, bump, gradients
from affine_vlab.numerics.geometry import build_grid
from affine_vlab.numerics.quadrature import directions
from affine_vlab.schemas.domain import DomainSpec


def test_radial_bump_energy_equals_gradient_norm(disk_bump, ds2):
    report = energy(disk_bump, ds2, 2.0)
    assert not report.degenerate
    assert report.m == ds2.size
    assert len(report.psi) == ds2.size
    assert report.energy == pytest.approx(report.grad_norm, rel=0.02)


@pytest.mark.slow
def test_radial_bump_matches_the_closed_form_gradient_norm(ds2):
    # ||grad (1 - |x|^2)||_2 = sqrt(2 pi) on the unit disk
    dom = build_grid(DomainSpec.ball_domain(2, 1.0), 0.01)
    report = energy(bump(dom, radius=1.0), ds2, 2.0)
    assert report.grad_norm == pytest.approx(np.sqrt(2.0 * np.pi), rel=0.01)
    assert report.energy == pytest.approx(report.grad_norm, rel=0.01)


def test_radial_bump_energy_3d(ball_grid, ds3):
    u = bump(ball_grid, radius=1.0)
    report = energy(u, ds3, 2.0)
    assert report.energy == pytest.approx(report.grad_norm, rel=0.05)


def test_zero_field_is_degenerate(disk_grid, ds2):
    zero = ScalarField.zeros(disk_grid)
    report = energy(zero, ds2, 2.0)
    assert report.degenerate
    assert report.energy == 0.0
    with pytest.raises(DegenerateDirection):
        kernel(zero, ds2, 2.0)
    with pytest.raises(DegenerateDirection):
        energy_gradient(zero, ds2, 2.0)


def test_energy_is_one_homogeneous(random_field, ds2):
    u = random_field(0)
    e = energy(u, ds2, 1.5).energy
    assert energy(u.scaled(-3.0), ds2, 1.5).energy == pytest.approx(3.0 * e, rel=1e-12)


def test_dimension_mismatch(disk_bump, ds3):
    with pytest.raises(GridMismatch):
        energy(disk_bump, ds3, 2.0)


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("p", [2.0, 1.5, 3.0])
def test_comparison_inequality(random_field, ds2, seed, p):
    steps = comparison_steps(random_field(seed), ds2, p)
    assert steps.holds()
    assert steps.energy <= steps.grad_norm * (1 + steps.anisotropy + 1e-12)


def test_affine_invariance_against_classical_norm():
    h = 1.0 / 48
    disk = build_grid(DomainSpec.ball_domain(2, 1.0), h)
    ellipse = build_grid(DomainSpec(kind="ellipse", half_axes=[0.5, 2.0]), h)
    ds = directions(2, 128)
    u = bump(disk, radius=1.0)
    # u o A with det A = 1 lives on A^{-1}(disk)
    v = bump(ellipse, radius=1.0, matrix=np.diag([2.0, 0.5]))
    eu, ev = energy(u, ds, 2.0), energy(v, ds, 2.0)
    assert ev.energy == pytest.approx(eu.energy, rel=0.03)
    assert ev.grad_norm / eu.grad_norm > 1.3


# ==================== Kernel ====================

def test_kernel_reproduces_energy(random_field, ds2):
    u = random_field(5)
    for p in (2.0, 1.5):
        kern = kernel(u, ds2, p)
        g = gradients(u)
        total = g.volume * float(np.sum(kern.h_p(g.g, ds2)))
        assert total == pytest.approx(energy_p(u, ds2, p), rel=1e-10)
        zeta = np.array([0.3, -1.2])
        assert kern.h(2.5 * zeta, ds2) == pytest.approx(2.5 * kern.h(zeta, ds2), rel=1e-12)


def test_weak_form_against_itself(random_field, ds2):
    u = random_field(6)
    assert weak_form(u, ds2, 2.0, u) == pytest.approx(energy_p(u, ds2, 2.0), rel=1e-10)
    assert weak_form(u, ds2, 1.5, u) == pytest.approx(energy_p(u, ds2, 1.5), rel=1e-10)


def test_kernel_tied_to_its_rule(disk_bump, ds2):
    kern = kernel(disk_bump, ds2, 2.0)
    with pytest.raises(GridMismatch):
        kern.h_p(np.array([1.0, 0.0]), directions(2, 64))


def test_regularized_factor_tends_to_signed_power():
    t = np.array([-2.0, -0.5, 0.5, 2.0])
    exact = np.sign(t) * np.abs(t) ** 0.5
    assert np.allclose(kernel_factor(t, 1.5, 1e-9), exact, rtol=1e-12)
    assert kernel_factor(np.array([0.0]), 1.5, 1e-9)[0] == 0.0


@pytest.mark.parametrize("p, tol", [(2.0, 1e-5), (1.5, 1e-4)])
def test_energy_gradient_matches_finite_differences(random_field, ds2, p, tol):
    u = random_field(9)
    grad = energy_gradient(u, ds2, p)
    assert np.all(grad[~u.dom.inside_mask] == 0.0)

    delta = 1e-6 * u.max_abs()
    nodes = np.argwhere(u.dom.inside_mask)
    picks = np.random.default_rng(7).choice(len(nodes), size=8, replace=False)
    scale = np.max(np.abs(grad))
    for k in picks:
        idx = tuple(nodes[k])
        bump_values = np.zeros(u.dom.shape)
        bump_values[idx] = delta
        step = ScalarField(u.dom, bump_values)
        fd = (energy_p(u + step, ds2, p) - energy_p(u + step.scaled(-1.0), ds2, p)) / (2 * delta)
        assert abs(fd - grad[idx]) <= tol * scale


# ==================== Superadditivity and reductions ====================

def test_superadditivity_is_near_equality_for_radial_fields(disk_bump, ds2):
    total = energy_p(disk_bump, ds2, 2.0)
    gap = superadditivity_check(disk_bump, ds2, 2.0, 0.5)
    assert gap >= -1e-8
    assert abs(gap) / total <= disk_bump.dom.h


@pytest.mark.parametrize("p", [2.0, 1.5])
@pytest.mark.parametrize("frac", [0.1, 0.25, 0.5, 0.9])
def test_superadditivity_gap_is_nonnegative(random_field, ds2, p, frac):
    u = random_field(8)
    assert superadditivity_check(u, ds2, p, frac * u.max_abs()) >= -1e-8


def test_superadditivity_vanishes_above_max(random_field, ds2):
    u = random_field(8)
    gap = superadditivity_check(u, ds2, 2.0, 2.0 * u.max_abs())
    assert abs(gap) <= 1e-12 * energy_p(u, ds2, 2.0)


def test_energy_is_reproducible_across_chunkings(monkeypatch, random_field, ds2):
    u = random_field(2)
    first = energy(u, ds2, 1.5)
    assert energy(u, ds2, 1.5).energy == first.energy

    monkeypatch.setattr(settings, "CHUNK_CELLS", 37)
    chunked = energy(u, ds2, 1.5)
    assert chunked.energy == pytest.approx(first.energy, rel=1e-12)
    assert energy(u, ds2, 1.5).energy == chunked.energy
