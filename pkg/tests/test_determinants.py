import numpy as np
import pytest

from rdmbounds.determinants import (
    DimensionOverflowError,
    annihilate,
    apply_single,
    build_one_body,
    build_two_body,
    create,
    enumerate_sector,
    occupied,
    spin_orbital,
)
from rdmbounds.integrals import TwoBodyIntegrals


def test_spin_orbital_interleaving():
    assert spin_orbital(0, 0) == 0
    assert spin_orbital(0, 1) == 1
    assert spin_orbital(1, 0) == 2
    assert spin_orbital(3, 1) == 7


def test_enumerate_sector_counts():
    sec = enumerate_sector(2, 1, 1)
    assert sec.dim == 4
    assert sec.dets == (3, 6, 9, 12)
    assert enumerate_sector(2, 2, 0).dim == 1
    assert enumerate_sector(3, 2, 1).dim == 9
    for det in enumerate_sector(3, 2, 1).dets:
        occ = occupied(det)
        assert len(occ) == 3
        assert sum(1 for i in occ if i % 2 == 0) == 2


def test_sector_position_roundtrip():
    sec = enumerate_sector(2, 1, 1)
    for k, det in enumerate(sec.dets):
        assert sec.position(det) == k


def test_enumerate_sector_rejects_huge():
    with pytest.raises(DimensionOverflowError):
        enumerate_sector(12, 6, 6)


def test_annihilate_create_phases():
    # a_0 on |0b0011> removes orbital 0 with phase +1.
    det, phase = annihilate(0b0011, 0)
    assert (det, phase) == (0b0010, 1)
    # a_1 must hop over the occupied orbital 0.
    det, phase = annihilate(0b0011, 1)
    assert (det, phase) == (0b0001, -1)
    assert annihilate(0b0010, 0) is None
    det, phase = create(0b0001, 1)
    assert (det, phase) == (0b0011, -1)
    assert create(0b0001, 0) is None


def test_apply_single_phase_consistency():
    # a_i^dag a_j then a_j^dag a_i returns the original determinant with
    # phase +1 whenever both steps act nontrivially.
    for det in enumerate_sector(3, 2, 1).dets:
        for i in range(6):
            for j in range(6):
                first = apply_single(det, i, j)
                if first is None:
                    continue
                mid, phase1 = first
                back = apply_single(mid, j, i)
                assert back is not None
                out, phase2 = back
                assert out == det
                assert phase1 * phase2 == 1


def test_build_one_body_matches_manual():
    # Hopping h = [[0,-1],[-1,0]] on the S_z = 0 sector, dets (3,6,9,12).
    h = np.array([[0.0, -1.0], [-1.0, 0.0]])
    sec = enumerate_sector(2, 1, 1)
    mat = build_one_body(h, sec)
    expected = np.array(
        [
            [0.0, 1.0, -1.0, 0.0],
            [1.0, 0.0, 0.0, 1.0],
            [-1.0, 0.0, 0.0, -1.0],
            [0.0, 1.0, -1.0, 0.0],
        ]
    )
    assert np.allclose(mat, expected, atol=1e-14)


def test_build_operators_hermitian_and_sector_blocked():
    rng = np.random.default_rng(7)
    h = rng.standard_normal((3, 3))
    h = 0.5 * (h + h.T)
    v = TwoBodyIntegrals(3)
    for idx in [(0, 0, 0, 0), (1, 0, 2, 1), (2, 2, 1, 1), (2, 1, 2, 1)]:
        v.set(*idx, rng.standard_normal())
    for (na, nb) in [(1, 1), (2, 1), (2, 0)]:
        sec = enumerate_sector(3, na, nb)
        a = build_one_body(h, sec)
        b = build_two_body(v, sec)
        assert np.max(np.abs(a - a.T)) <= 1e-12
        assert np.max(np.abs(b - b.T)) <= 1e-12


def test_build_two_body_zero_integrals():
    v = TwoBodyIntegrals(2)
    sec = enumerate_sector(2, 1, 1)
    assert np.allclose(build_two_body(v, sec), 0.0, atol=0.0)


def test_build_one_body_commutes_with_number():
    # One-body operators conserve (n_alpha, n_beta): the basis never mixes
    # sectors, so acting within a sector is closure enough to verify.
    h = np.array([[0.3, 0.7], [0.7, -0.2]])
    for (na, nb) in [(0, 2), (1, 1), (2, 0)]:
        sec = enumerate_sector(2, na, nb)
        mat = build_one_body(h, sec)
        assert mat.shape == (sec.dim, sec.dim)
