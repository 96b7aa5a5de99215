"""Slater-determinant sectors and second-quantized operator matrices.

A determinant is an integer bit pattern over spin orbitals indexed
``i = 2*p + s``, where ``p`` labels the spatial orbital and ``s`` is 0
for alpha, 1 for beta.  Bit ``i`` set means spin orbital ``i`` is
occupied.  Determinants in a sector are ordered by ascending bit
pattern, which fixes the row/column convention of every many-body
matrix built here.  Everything is dense and real; sector sizes are
capped so that exact diagonalization stays desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

MAX_SECTOR_DIM = 10_000
MAX_SPATIAL = 16


class DimensionOverflowError(ValueError):
    """Determinant space larger than the dense-diagonalization cap."""


def spin_orbital(p: int, s: int) -> int:
    """Spin-orbital index of spatial orbital ``p`` with spin ``s`` (0=alpha, 1=beta)."""
    return 2 * p + s


def occupied(det: int) -> list[int]:
    """Occupied spin-orbital indices of ``det``, ascending."""
    out = []
    i = 0
    while det >> i:
        if det >> i & 1:
            out.append(i)
        i += 1
    return out


def _parity_below(det: int, i: int) -> int:
    """(-1)**(number of occupied spin orbitals strictly below i)."""
    return -1 if (det & ((1 << i) - 1)).bit_count() & 1 else 1


def annihilate(det: int, i: int):
    """Apply a_i.  Returns (det', phase) or None if spin orbital i is empty."""
    if not det >> i & 1:
        return None
    return det & ~(1 << i), _parity_below(det, i)


def create(det: int, i: int):
    """Apply a†_i.  Returns (det', phase) or None if spin orbital i is filled."""
    if det >> i & 1:
        return None
    return det | (1 << i), _parity_below(det, i)


def apply_single(det: int, create_idx: int, annihilate_idx: int):
    """Apply a†_create a_annihilate with the fermionic phase.

    The phase is (-1)**(occupied below annihilate_idx) times
    (-1)**(occupied below create_idx counted after the annihilation).
    Returns (det', phase) or None when the string destroys the ket.
    """
    step = annihilate(det, annihilate_idx)
    if step is None:
        return None
    det1, ph1 = step
    step = create(det1, create_idx)
    if step is None:
        return None
    det2, ph2 = step
    return det2, ph1 * ph2


@dataclass
class Sector:
    """All determinants with fixed (n_alpha, n_beta) in m_spatial orbitals."""

    m_spatial: int
    n_alpha: int
    n_beta: int
    dets: tuple[int, ...]

    def __post_init__(self):
        self._pos = {d: i for i, d in enumerate(self.dets)}

    @property
    def dim(self) -> int:
        return len(self.dets)

    @property
    def n_electrons(self) -> int:
        return self.n_alpha + self.n_beta

    def position(self, det: int) -> int:
        return self._pos[det]

    def __contains__(self, det: int) -> bool:
        return det in self._pos


def enumerate_sector(m_spatial: int, n_alpha: int, n_beta: int) -> Sector:
    """Enumerate the (n_alpha, n_beta) sector, ordered by ascending bit pattern."""
    if not 1 <= m_spatial <= MAX_SPATIAL:
        raise ValueError(f"m_spatial must be in 1..{MAX_SPATIAL}, got {m_spatial}")
    for n, tag in ((n_alpha, "n_alpha"), (n_beta, "n_beta")):
        if not 0 <= n <= m_spatial:
            raise ValueError(f"{tag}={n} outside 0..{m_spatial}")
    dim = comb(m_spatial, n_alpha) * comb(m_spatial, n_beta)
    if dim > MAX_SECTOR_DIM:
        raise DimensionOverflowError(
            f"sector dimension {dim} exceeds cap {MAX_SECTOR_DIM}"
        )
    alphas = [
        sum(1 << spin_orbital(p, 0) for p in combo)
        for combo in combinations(range(m_spatial), n_alpha)
    ]
    betas = [
        sum(1 << spin_orbital(p, 1) for p in combo)
        for combo in combinations(range(m_spatial), n_beta)
    ]
    dets = tuple(sorted(a | b for a in alphas for b in betas))
    return Sector(m_spatial, n_alpha, n_beta, dets)


def _as_array(op) -> np.ndarray:
    if hasattr(op, "matrix"):
        return np.asarray(op.matrix, dtype=float)
    return np.asarray(op, dtype=float)


def build_one_body(h, sector: Sector) -> np.ndarray:
    """Matrix of sum_pq h_pq sum_s a†_{p,s} a_{q,s} on the sector basis."""
    hm = _as_array(h)
    m = sector.m_spatial
    if hm.shape != (m, m):
        raise ValueError(f"one-body operator shape {hm.shape} does not match m={m}")
    out = np.zeros((sector.dim, sector.dim))
    for p in range(m):
        for q in range(m):
            if hm[p, q] == 0.0:
                continue
            for j, det in enumerate(sector.dets):
                for s in (0, 1):
                    step = apply_single(det, spin_orbital(p, s), spin_orbital(q, s))
                    if step is None:
                        continue
                    det2, phase = step
                    out[sector.position(det2), j] += hm[p, q] * phase
    return out


def build_two_body(v, sector: Sector) -> np.ndarray:
    """Matrix of (1/2) sum (pr|qs) a†_{p,σ} a†_{q,τ} a_{s,τ} a_{r,σ}.

    ``v`` is the chemists'-notation integral tensor (object with a
    dense() method, or a plain (m,m,m,m) array with T[p,r,q,s]=(pr|qs)).
    """
    tensor = v.dense() if hasattr(v, "dense") else np.asarray(v, dtype=float)
    m = sector.m_spatial
    if tensor.shape != (m, m, m, m):
        raise ValueError(f"two-body tensor shape {tensor.shape} does not match m={m}")
    out = np.zeros((sector.dim, sector.dim))
    nonzero = np.argwhere(np.abs(tensor) > 0.0)
    for j, det in enumerate(sector.dets):
        for p, r, q, s in nonzero:
            val = 0.5 * tensor[p, r, q, s]
            for sig in (0, 1):
                step0 = annihilate(det, spin_orbital(r, sig))
                if step0 is None:
                    continue
                for tau in (0, 1):
                    step1 = annihilate(step0[0], spin_orbital(s, tau))
                    if step1 is None:
                        continue
                    step2 = create(step1[0], spin_orbital(q, tau))
                    if step2 is None:
                        continue
                    step3 = create(step2[0], spin_orbital(p, sig))
                    if step3 is None:
                        continue
                    phase = step0[1] * step1[1] * step2[1] * step3[1]
                    out[sector.position(step3[0]), j] += val * phase
    return out
