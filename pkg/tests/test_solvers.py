import math

import numpy as np
import pytest
from pydantic import ValidationError

from affine_vlab.core.errors import ConfigValidationError, OutOfRange
from affine_vlab.numerics.constants import k_np
from affine_vlab.numerics.fields import radial_profile
from affine_vlab.schemas.domain import DomainSpec
from affine_vlab.schemas.solve import SolveConfig
from affine_vlab.solvers.descent import DescentOptions, descend
from affine_vlab.solvers.grid import build_quotient, least_energy, positivity_fraction, principal_eigen
from affine_vlab.solvers.radial import (
    radial_critical_level,
    radial_level,
    radial_principal_eigen,
    scan_lambda,
)
from affine_vlab.workers.restart_tasks import build_restart_jobs, initial_fields


def _rayleigh(diag):
    def fun(x):
        top = float(x @ (diag * x))
        bottom = float(x @ x)
        level = top / bottom
        return level, 2.0 * (diag * x - level * x) / bottom
    return fun


def test_descent_on_rayleigh_quotient():
    diag = np.array([1.0, 2.0, 3.0, 5.0])
    normalize = lambda x: x / np.linalg.norm(x)
    outcome = descend(_rayleigh(diag), np.ones(4), normalize, DescentOptions(tol_rel=1e-12))
    assert outcome.converged
    assert outcome.level == pytest.approx(1.0, rel=1e-6)
    assert np.all(np.diff(outcome.trace) <= 0)


def test_descent_reports_iteration_limit():
    diag = np.array([1.0, 2.0, 3.0, 5.0])
    normalize = lambda x: x / np.linalg.norm(x)
    outcome = descend(_rayleigh(diag), np.ones(4), normalize, DescentOptions(max_iter=1, tol_rel=1e-15))
    assert not outcome.converged
    assert outcome.reason == "max_iter"


# ==================== Configuration ====================

def test_solve_config_exponent_checks():
    disk = DomainSpec.ball_domain(2, 1.0)
    with pytest.raises(ValidationError):
        SolveConfig(p=1.5, q=7.0, domain=disk)
    with pytest.raises(ValidationError):
        SolveConfig(p=1.5, q=6.0, domain=disk)
    assert SolveConfig(p=1.5, q=6.0, domain=disk, experimental=True).q == 6.0
    assert SolveConfig(p=2.0, domain=disk).directions_count == 128


def test_least_energy_needs_q():
    with pytest.raises(ConfigValidationError):
        least_energy(SolveConfig(p=1.5, h=0.25))


def test_restart_fields_are_seeded(disk_grid):
    first = initial_fields(disk_grid, seed=3, restarts=2)
    again = initial_fields(disk_grid, seed=3, restarts=2)
    assert [(i, kind) for i, kind, _ in first] == [(0, "random"), (1, "random"), (2, "radial")]
    for (_, _, a), (_, _, b) in zip(first, again):
        assert np.array_equal(a.values, b.values)
    assert all(positivity_fraction(f) == 1.0 for _, kind, f in first if kind == "random")


def test_restart_jobs_share_the_quotient():
    cfg = SolveConfig(p=2.0, h=0.125, restarts=2)
    quotient = build_quotient(cfg, q=2.0, lam=0.0)
    jobs = build_restart_jobs(quotient, cfg)
    assert len(jobs) == 3
    assert all(job.quotient is quotient for job in jobs)
    assert all(job.x0.shape == (quotient.dom.n_interior,) for job in jobs)


def test_quotient_gradient_matches_finite_differences():
    cfg = SolveConfig(p=1.5, q=3.0, lambda_=0.5, h=0.125)
    quotient = build_quotient(cfg, q=3.0, lam=0.5)
    x = initial_fields(quotient.dom, seed=1, restarts=1)[0][2].interior()
    level, grad = quotient(x)
    delta = 1e-6 * np.max(np.abs(x))
    for k in (0, len(x) // 2, len(x) - 1):
        e = np.zeros_like(x)
        e[k] = delta
        fd = (quotient(x + e)[0] - quotient(x - e)[0]) / (2 * delta)
        assert fd == pytest.approx(grad[k], rel=1e-4, abs=1e-6 * np.max(np.abs(grad)))


# ==================== Grid solves ====================

@pytest.mark.slow
def test_affine_eigenvalue_below_classical():
    disk = DomainSpec.ball_domain(2, 1.0)
    affine = principal_eigen(SolveConfig(p=2.0, domain=disk, h=1.0 / 12, restarts=1))
    classical = principal_eigen(SolveConfig(p=2.0, domain=disk, h=1.0 / 12, restarts=1, energy_kind="classical"))
    assert affine.eigenvalue <= classical.eigenvalue * (1 + 1e-4)
    assert 3.5 < classical.eigenvalue < 8.0
    assert np.all(np.diff(affine.trace) <= 1e-12 * affine.trace[0])
    assert np.all(affine.eigenfunction.values >= 0)


@pytest.mark.slow
def test_least_energy_subcritical():
    cfg = SolveConfig(p=1.5, q=3.0, domain=DomainSpec.ball_domain(2, 1.0), h=1.0 / 12, restarts=1, tol_rel=1e-10)
    result = least_energy(cfg)
    assert result.level > 0
    assert result.positivity_ok
    assert result.mu ** 1.5 == pytest.approx(result.level, rel=1e-12)
    assert result.el_residual < 1e-3
    assert np.allclose(result.rescaled_solution.values, result.rescale * result.minimizer.values)


@pytest.mark.slow
def test_least_energy_is_bit_reproducible():
    def config():
        return SolveConfig(p=1.5, q=3.0, domain=DomainSpec.ball_domain(2, 1.0), h=1.0 / 12, restarts=2, seed=11)

    first = least_energy(config())
    second = least_energy(config())
    assert first.level == second.level
    assert first.seed_index == second.seed_index
    assert np.array_equal(first.minimizer.values, second.minimizer.values)
    assert np.array_equal(first.rescaled_solution.values, second.rescaled_solution.values)
    assert np.array_equal(np.asarray(first.trace), np.asarray(second.trace))


@pytest.mark.slow
def test_radial_start_gives_a_radial_eigenfunction():
    cfg = SolveConfig(p=2.0, domain=DomainSpec.ball_domain(2, 1.0), h=1.0 / 32, radial_init_only=True)
    result = principal_eigen(cfg)
    assert result.seed_index == 0
    _, means, scatter = radial_profile(result.eigenfunction)
    assert scatter <= 0.02
    assert means[0] > means[-1]


# ==================== Radial ====================

def test_radial_eigenvalue_of_the_ball():
    sol = radial_principal_eigen(3, 2.0, nodes=1000)
    assert sol.level == pytest.approx(math.pi ** 2, rel=1e-3)
    assert sol.profile[-1] == 0.0


def test_radial_level_rejects_supercritical_q():
    with pytest.raises(OutOfRange):
        radial_level(3, 2.0, 7.0)
    with pytest.raises(OutOfRange):
        radial_level(2, 2.0, 4.0)


def test_critical_level_sits_above_sobolev_threshold():
    level = radial_critical_level(3, 2.0, 0.0, nodes=1000)
    assert level >= 0.99 * k_np(3, 2.0) ** -2


@pytest.mark.slow
def test_critical_level_drops_below_threshold_at_half_eigenvalue():
    lam1 = radial_principal_eigen(3, 2.0).level
    level = radial_critical_level(3, 2.0, 0.5 * lam1)
    assert 0 < level <= 0.98 * k_np(3, 2.0) ** -2


@pytest.mark.slow
def test_scan_lambda_is_nonincreasing():
    lam1 = radial_principal_eigen(3, 2.0, nodes=1000).level
    rows = scan_lambda(3, 2.0, np.linspace(0.0, 0.8 * lam1, 5), nodes=1000)
    levels = [row["level"] for row in rows]
    assert all(b <= a * (1 + 1e-9) for a, b in zip(levels, levels[1:]))
    assert rows[-1]["below_K_threshold"]
