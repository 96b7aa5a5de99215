import numpy as np
import pytest

from rdmbounds.functionals import (
    CANDIDATES,
    FunctionalPoint,
    coleman_check,
    hf_two_rdm,
    hf_vee,
    trace_condition,
)
from rdmbounds.integrals import rotate_system
from rdmbounds.manybody import Ensemble, OneRDM, ground_state, two_rdm, vee_expectation


def test_coleman_accepts_and_rejects():
    assert coleman_check(np.diag([1.0, 1.0]), 2).ok
    assert coleman_check(np.diag([2.0, 0.0]), 2).ok
    v = coleman_check(np.diag([2.5, -0.5]), 2)
    assert not v.ok
    assert "-0.5" in v.message or "2.5" in v.message
    assert not coleman_check(np.diag([2.2, -0.2]), 2).ok
    assert not coleman_check(np.diag([1.0, 0.5]), 2).ok  # trace 1.5 != 2
    # Slight numerical noise within tolerance passes.
    assert coleman_check(np.diag([2.0 + 1e-12, -1e-12]), 2).ok


def test_coleman_accepts_onerdm_instances():
    gamma = OneRDM.from_occupations([1.2, 0.8])
    assert coleman_check(gamma, 2).ok


def test_hf_two_rdm_trace_three():
    # Half filling overestimates the pair count: trace 3 instead of 2.
    rdm2 = hf_two_rdm([1.0, 1.0])
    assert trace_condition(rdm2, 2) == (3.0, True)


def test_hf_trace_never_below_exact():
    rng = np.random.default_rng(4)
    for _ in range(100):
        n1 = rng.uniform(0.0, 2.0)
        val, ok = trace_condition(hf_two_rdm([n1, 2.0 - n1]), 2)
        assert ok
        assert val - 2.0 >= -1e-12
    # Equality only at idempotent occupations.
    assert abs(trace_condition(hf_two_rdm([2.0, 0.0]), 2)[0] - 2.0) < 1e-12
    assert trace_condition(hf_two_rdm([1.5, 0.5]), 2)[0] > 2.0 + 1e-3


def test_hf_two_rdm_entrywise_delta_formula():
    # Literal delta-formula transcription, kept separate on purpose.
    rng = np.random.default_rng(8)
    occ = rng.uniform(0.0, 2.0, size=3)
    got = hf_two_rdm(occ).tensor
    m = len(occ)
    want = np.zeros((m, m, m, m))
    for i in range(m):
        for j in range(m):
            want[i, j, i, j] += occ[i] * occ[j]
            want[i, j, j, i] -= 0.5 * occ[i] * occ[j]
    assert np.allclose(got, want, atol=1e-14)


def test_hf_vee_values(model_a, hubbard):
    assert abs(hf_vee(np.diag([1.0, 1.0]), model_a.v) - 1.35) < 1e-12
    assert abs(hf_vee(np.diag([2.0, 0.0]), model_a.v) - 1.0) < 1e-12
    assert abs(hf_vee(np.diag([1.0, 1.0]), hubbard.v) - 2.0) < 1e-12
    assert abs(hf_vee(np.diag([2.0, 0.0]), hubbard.v) - 4.0) < 1e-12
    assert CANDIDATES["hf"].name == "hf"
    assert abs(CANDIDATES["hf"].fn(OneRDM.from_occupations([1.0, 1.0]), model_a) - 1.35) < 1e-12


def test_hf_vee_rotation_invariant(model_a):
    th = 0.9
    u = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    gamma = np.diag([1.4, 0.6])
    rotated = rotate_system(model_a, u)
    gamma_rot = u.T @ gamma @ u
    a = hf_vee(gamma, model_a.v)
    b = hf_vee(gamma_rot, rotated.v)
    assert abs(a - b) < 1e-9


def test_hf_vee_idempotent_matches_determinant(model_a, model_a_basis):
    # gamma = diag(2,0) is the unique doubly occupied first orbital.
    sec_idx = next(
        k for k, s in enumerate(model_a_basis.sectors) if s.n_alpha == s.n_beta == 1
    )
    sec = model_a_basis.sectors[sec_idx]
    vec = np.zeros(sec.dim)
    vec[sec.position(0b0011)] = 1.0
    ens = Ensemble(np.array([1.0]), [(sec_idx, vec)])
    w_det = vee_expectation(two_rdm(ens, model_a_basis), model_a.v)
    assert abs(hf_vee(np.diag([2.0, 0.0]), model_a.v) - w_det) < 1e-10


def test_exact_two_rdm_trace(hubbard, hubbard_basis):
    for lam in (1.0, 0.0, -1.0):
        gs = ground_state(hubbard, lam)
        ens = Ensemble(np.array([1.0]), gs.states[:1])
        assert abs(two_rdm(ens, hubbard_basis).trace - 2.0) < 1e-10


def test_functional_point_fields():
    pt = FunctionalPoint(w=0.9, gamma=OneRDM.from_occupations([1.0, 1.0]))
    assert pt.w == 0.9
    assert pt.gamma.m_spatial == 2
