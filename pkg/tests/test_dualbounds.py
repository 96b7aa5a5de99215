import numpy as np
import pytest

from conftest import random_admissible_gamma
from rdmbounds.dualbounds import (
    BoundOptions,
    InadmissibleGammaError,
    dual_objective,
    lower_bound,
    primal_oracle,
    upper_bound,
)
from rdmbounds.integrals import rotate_system
from rdmbounds.manybody import ground_state


def test_model_a_half_filling_bounds(model_a):
    lb = lower_bound(np.diag([1.0, 1.0]), model_a)
    ub = upper_bound(np.diag([1.0, 1.0]), model_a)
    assert abs(lb.value - 0.8) < 1e-5
    assert abs(ub.value - 1.1) < 1e-5
    assert abs(lb.duality_gap) <= 1e-6
    assert abs(ub.duality_gap) <= 1e-6
    assert lb.converged and ub.converged


def test_hubbard_half_filling_bounds(hubbard):
    lb = lower_bound(np.diag([1.0, 1.0]), hubbard)
    ub = upper_bound(np.diag([1.0, 1.0]), hubbard)
    assert abs(lb.value - 0.0) < 1e-5
    assert abs(ub.value - 4.0) < 1e-5
    assert lb.converged and ub.converged


def test_idempotent_bounds_pin_to_first_diagonal_integral(model_a, hubbard):
    for spec, j11 in ((model_a, 1.0), (hubbard, 4.0)):
        lb = lower_bound(np.diag([2.0, 0.0]), spec)
        ub = upper_bound(np.diag([2.0, 0.0]), spec)
        assert abs(lb.value - j11) < 1e-6
        assert abs(ub.value - j11) < 1e-6
        assert lb.converged and ub.converged


def test_bounds_reject_inadmissible(model_a):
    with pytest.raises(InadmissibleGammaError):
        lower_bound(np.diag([2.5, -0.5]), model_a)
    with pytest.raises(InadmissibleGammaError):
        upper_bound(np.diag([1.0, 0.5]), model_a)


def test_bound_ordering_random(model_a, hubbard):
    rng = np.random.default_rng(23)
    for spec in (model_a, hubbard):
        for _ in range(5):
            gamma = random_admissible_gamma(rng, 2, 2)
            lb = lower_bound(gamma, spec)
            ub = upper_bound(gamma, spec)
            assert lb.value <= ub.value + 1e-8


def test_dual_objective_weak_duality(model_a):
    # Any potential's dual value sits below the constrained minimum.
    rng = np.random.default_rng(29)
    for _ in range(10):
        gamma = random_admissible_gamma(rng, 2, 2)
        oracle = primal_oracle(gamma, 1.0, model_a, restarts=8, seed=3)
        for _ in range(2):
            g = rng.standard_normal((2, 2))
            g = 0.5 * (g + g.T)
            val, _ = dual_objective(g, 1.0, gamma, model_a)
            assert val <= oracle + 1e-7


def test_dual_objective_supergradient(model_a):
    # grad is a supergradient of the concave map g -> E[g] - Tr[g gamma]:
    # every other potential is majorized by the tangent plane.
    rng = np.random.default_rng(31)
    gamma = np.diag([1.2, 0.8])
    for _ in range(20):
        g = rng.standard_normal((2, 2))
        g = 0.5 * (g + g.T)
        val, grad = dual_objective(g, 1.0, gamma, model_a)
        g2 = rng.standard_normal((2, 2))
        g2 = 0.5 * (g2 + g2.T)
        val2, _ = dual_objective(g2, 1.0, gamma, model_a)
        assert val2 <= val + float(np.sum(grad * (g2 - g))) + 1e-10


def test_lower_bound_midpoint_convex(model_a):
    rng = np.random.default_rng(37)
    for _ in range(5):
        g1 = random_admissible_gamma(rng, 2, 2)
        g2 = random_admissible_gamma(rng, 2, 2)
        mid = 0.5 * (g1 + g2)
        lb_mid = lower_bound(mid, model_a).value
        lb_avg = 0.5 * (lower_bound(g1, model_a).value + lower_bound(g2, model_a).value)
        assert lb_mid <= lb_avg + 1e-6
        ub_mid = upper_bound(mid, model_a).value
        ub_avg = 0.5 * (upper_bound(g1, model_a).value + upper_bound(g2, model_a).value)
        assert ub_mid >= ub_avg - 1e-6


def test_bounds_unitary_covariance(model_a):
    th = 0.6
    u = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    gamma = np.diag([1.3, 0.7])
    rotated = rotate_system(model_a, u)
    a = lower_bound(gamma, model_a).value
    b = lower_bound(u.T @ gamma @ u, rotated).value
    assert abs(a - b) < 1e-6


def test_primal_ensemble_reproduces_gamma(model_a, model_a_basis):
    from rdmbounds.manybody import one_rdm

    gamma = np.diag([0.7, 1.3])
    res = lower_bound(gamma, model_a)
    back = one_rdm(res.primal_ensemble, model_a_basis)
    assert np.max(np.abs(back.matrix - gamma)) < 1e-5
    assert abs(res.residual) <= 1e-6


def test_primal_oracle_interior_values(model_a, hubbard):
    assert abs(primal_oracle(np.diag([1.0, 1.0]), 1.0, model_a, restarts=8) - 0.8) < 1e-6
    assert abs(primal_oracle(np.diag([1.0, 1.0]), -1.0, model_a, restarts=8) + 1.1) < 1e-6
    assert abs(primal_oracle(np.diag([1.0, 1.0]), 1.0, hubbard, restarts=8) - 0.0) < 1e-6
    assert abs(primal_oracle(np.diag([1.0, 1.0]), -1.0, hubbard, restarts=8) + 4.0) < 1e-6


def test_primal_oracle_boundary_unique_preimage(model_a):
    # diag(2,0) admits exactly one preimage; both signs give (11|11).
    assert abs(primal_oracle(np.diag([2.0, 0.0]), 1.0, model_a, restarts=8) - 1.0) < 1e-4
    assert abs(primal_oracle(np.diag([2.0, 0.0]), -1.0, model_a, restarts=8) + 1.0) < 1e-4


def test_unconverged_dual_is_still_one_sided(model_a):
    # Starving the optimizer must not break the bound direction.
    opts = BoundOptions(
        beta_schedule=(1.0, 4.0),
        stage_maxiter=5,
        polish_steps=0,
        eval_budget=40,
        certificate_beta_min=1.0,
    )
    gamma = np.diag([1.0, 1.0])
    weak = lower_bound(gamma, model_a, opts)
    assert weak.value <= 0.8 + 1e-9
    weak_ub = upper_bound(gamma, model_a, opts)
    assert weak_ub.value >= 1.1 - 1e-9


def test_free_energy_monotone_in_beta(model_a, model_a_basis):
    from rdmbounds.dualbounds import _DualEngine

    rng = np.random.default_rng(41)
    engine = _DualEngine(model_a_basis, 1.0, np.diag([1.1, 0.9]))
    x = rng.standard_normal(3)
    e_gs = engine.exact(x, 1e-9)[0]
    prev = -np.inf
    for beta in (0.5, 1.0, 2.0, 8.0, 32.0):
        val = engine.smoothed(x, beta)[0]
        assert val >= prev - 1e-12
        prev = val
    assert prev <= e_gs + 1e-12


def test_free_energy_gradient_matches_fd(model_a, model_a_basis):
    from rdmbounds.dualbounds import _DualEngine

    rng = np.random.default_rng(43)
    engine = _DualEngine(model_a_basis, 1.0, np.diag([1.2, 0.8]))
    x = rng.standard_normal(3) * 0.5
    beta = 4.0
    _, grad = engine.smoothed(x, beta)
    fd = np.zeros_like(x)
    eps = 1e-6
    for i in range(len(x)):
        xp = x.copy()
        xp[i] += eps
        xm = x.copy()
        xm[i] -= eps
        fd[i] = (engine.smoothed(xp, beta)[0] - engine.smoothed(xm, beta)[0]) / (2 * eps)
    denom = max(1.0, float(np.linalg.norm(fd)))
    assert np.linalg.norm(grad - fd) / denom < 1e-6


def test_dual_value_lower_bounds_functional_on_ground_gamma(hubbard, hubbard_basis):
    # lb at the interacting ground gamma equals its W exactly in the limit;
    # certified value must sit within gap_tol.
    from rdmbounds.manybody import Ensemble, one_rdm, two_rdm, vee_expectation

    gs = ground_state(hubbard, 1.0)
    ens = Ensemble(np.array([1.0]), gs.states[:1])
    gamma = one_rdm(ens, hubbard_basis)
    w_true = vee_expectation(two_rdm(ens, hubbard_basis), hubbard.v)
    res = lower_bound(gamma, hubbard)
    assert res.value <= w_true + 1e-9
    assert w_true - res.value <= 1e-5
