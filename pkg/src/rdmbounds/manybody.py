"""Exact N-electron ground states, ensembles, and reduced density matrices.

The Hamiltonian h + lambda*V conserves (n_alpha, n_beta), so it is
diagonalized sector by sector with dense symmetric solvers.  All
reduced quantities are spin-summed and spatial: the 1-RDM is
gamma_pq = <sum_s a†_{p,s} a_{q,s}> with trace N and occupations in
[0, 2]; the 2-RDM is G[p,q,r,s] = <sum_{σ,τ} a†_{p,σ} a†_{q,τ}
a_{s,τ} a_{r,σ}> with trace N(N-1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .determinants import (
    Sector,
    annihilate,
    apply_single,
    build_two_body,
    create,
    enumerate_sector,
    spin_orbital,
)
from .integrals import OneBodyOperator, SystemSpec, TwoBodyIntegrals


@dataclass(eq=False)
class OneRDM:
    """Spin-summed spatial 1-RDM with its natural occupations."""

    matrix: np.ndarray
    occupations: np.ndarray

    @classmethod
    def from_matrix(cls, matrix) -> "OneRDM":
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"1-RDM must be square, got shape {m.shape}")
        if not np.allclose(m, m.T, atol=1e-10):
            raise ValueError("1-RDM must be symmetric")
        m = 0.5 * (m + m.T)
        return cls(m, np.linalg.eigvalsh(m))

    @classmethod
    def from_occupations(cls, occupations) -> "OneRDM":
        occ = np.asarray(occupations, dtype=float)
        return cls(np.diag(occ), np.sort(occ))

    @property
    def m_spatial(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))


@dataclass(eq=False)
class TwoRDM:
    """Spin-summed spatial 2-RDM tensor G[p,q,r,s] = <a†_p a†_q a_s a_r> (spin traced)."""

    tensor: np.ndarray

    @property
    def m_spatial(self) -> int:
        return self.tensor.shape[0]

    @property
    def trace(self) -> float:
        return float(np.einsum("pqpq->", self.tensor))


@dataclass(eq=False)
class Ensemble:
    """Convex mixture of sector-resolved states: weights w_i >= 0, sum w_i = 1."""

    weights: np.ndarray
    states: list[tuple[int, np.ndarray]]

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.weights) != len(self.states):
            raise ValueError("weights and states length mismatch")
        if np.any(self.weights < -1e-12):
            raise ValueError("ensemble weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > 1e-10:
            raise ValueError("ensemble weights must sum to 1")


class ManyBodyBasis:
    """Cached determinant sectors and operator blocks for fixed electron count.

    Holds, per (n_alpha, n_beta) sector: the determinant basis, the
    dense two-body matrix of V, and sparse coupling tables for every
    spin-summed single excitation E_pq = sum_s a†_{p,s} a_{q,s}.  The
    tables make repeated Hamiltonian assembly and 1-RDM evaluation
    cheap inside optimization loops.
    """

    def __init__(self, m_spatial: int, n_electrons: int, v: TwoBodyIntegrals):
        self.m_spatial = m_spatial
        self.n_electrons = n_electrons
        self.v = v
        self.sectors: list[Sector] = []
        lo = max(0, n_electrons - m_spatial)
        hi = min(n_electrons, m_spatial)
        for n_alpha in range(lo, hi + 1):
            self.sectors.append(
                enumerate_sector(m_spatial, n_alpha, n_electrons - n_alpha)
            )
        self.v_blocks = [build_two_body(v, sec) for sec in self.sectors]
        self._tables = [self._excitation_tables(sec) for sec in self.sectors]

    @classmethod
    def from_spec(cls, spec: SystemSpec) -> "ManyBodyBasis":
        return cls(spec.m_spatial, spec.n_electrons, spec.v)

    @staticmethod
    def _excitation_tables(sector: Sector):
        tables = {}
        m = sector.m_spatial
        for p in range(m):
            for q in range(m):
                rows, cols, phases = [], [], []
                for j, det in enumerate(sector.dets):
                    for s in (0, 1):
                        step = apply_single(det, spin_orbital(p, s), spin_orbital(q, s))
                        if step is None:
                            continue
                        rows.append(sector.position(step[0]))
                        cols.append(j)
                        phases.append(step[1])
                tables[p, q] = (
                    np.asarray(rows, dtype=np.intp),
                    np.asarray(cols, dtype=np.intp),
                    np.asarray(phases, dtype=float),
                )
        return tables

    @property
    def dims(self) -> list[int]:
        return [sec.dim for sec in self.sectors]

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def one_body_block(self, k: int, h: np.ndarray) -> np.ndarray:
        """Dense sector-k matrix of sum_pq h_pq E_pq."""
        dim = self.sectors[k].dim
        out = np.zeros((dim, dim))
        for (p, q), (rows, cols, phases) in self._tables[k].items():
            hpq = h[p, q]
            if hpq != 0.0 and rows.size:
                np.add.at(out, (rows, cols), hpq * phases)
        return out

    def hamiltonian(self, k: int, h: np.ndarray, lam: float) -> np.ndarray:
        block = self.one_body_block(k, h)
        if lam != 0.0:
            block = block + lam * self.v_blocks[k]
        return block

    def eigh_all(self, h: np.ndarray, lam: float):
        """Eigenvalues and eigenvectors of every sector block."""
        return [np.linalg.eigh(self.hamiltonian(k, h, lam)) for k in range(len(self.sectors))]

    def gamma_from_vector(self, k: int, vec: np.ndarray) -> np.ndarray:
        """Spin-summed 1-RDM of a pure sector-k state."""
        m = self.m_spatial
        out = np.zeros((m, m))
        for (p, q), (rows, cols, phases) in self._tables[k].items():
            if rows.size:
                out[p, q] = float(np.sum(phases * vec[rows] * vec[cols]))
        return 0.5 * (out + out.T)

    def gamma_from_density(self, k: int, rho: np.ndarray) -> np.ndarray:
        """Spin-summed 1-RDM of a sector-k density matrix rho."""
        m = self.m_spatial
        out = np.zeros((m, m))
        for (p, q), (rows, cols, phases) in self._tables[k].items():
            if rows.size:
                out[p, q] = float(np.sum(phases * rho[cols, rows]))
        return 0.5 * (out + out.T)

    def apply_excitation(self, k: int, p: int, q: int, vec: np.ndarray) -> np.ndarray:
        """E_pq acting on a sector-k vector."""
        rows, cols, phases = self._tables[k][p, q]
        out = np.zeros_like(vec)
        if rows.size:
            np.add.at(out, rows, phases * vec[cols])
        return out

    def excitation_stack(self, k: int) -> np.ndarray:
        """Dense (m, m, dim, dim) array of every E_pq on sector k."""
        dim = self.sectors[k].dim
        m = self.m_spatial
        out = np.zeros((m, m, dim, dim))
        for (p, q), (rows, cols, phases) in self._tables[k].items():
            if rows.size:
                np.add.at(out[p, q], (rows, cols), phases)
        return out


@dataclass(eq=False)
class GroundSpace:
    """Degenerate ground manifold across sectors for one (h, lambda)."""

    energy: float
    states: list[tuple[int, np.ndarray]]
    basis: ManyBodyBasis

    @property
    def degeneracy(self) -> int:
        return len(self.states)

    def ensemble(self) -> Ensemble:
        d = self.degeneracy
        return Ensemble(np.full(d, 1.0 / d), list(self.states))


def ground_state(
    spec: SystemSpec,
    lam: float,
    degeneracy_tol: float = 1e-9,
    *,
    h: np.ndarray | None = None,
    basis: ManyBodyBasis | None = None,
) -> GroundSpace:
    """Lowest eigenvalue and its degenerate eigenspace of h + lambda*V.

    Degeneracy uses a relative window: states with
    E <= E0 + degeneracy_tol * max(1, |E0|) are included.  ``h``
    overrides spec.h (same orbital basis); the core energy is not
    added.
    """
    if basis is None:
        basis = ManyBodyBasis.from_spec(spec)
    if h is None:
        hm = spec.h.matrix
    elif isinstance(h, OneBodyOperator):
        hm = h.matrix
    else:
        hm = np.asarray(h, dtype=float)
    pairs = basis.eigh_all(hm, lam)
    energy = min(float(w[0]) for w, _ in pairs)
    window = energy + degeneracy_tol * max(1.0, abs(energy))
    states = []
    for k, (w, u) in enumerate(pairs):
        for i in range(len(w)):
            if w[i] <= window:
                states.append((k, u[:, i].copy()))
            else:
                break
    return GroundSpace(energy, states, basis)


def one_rdm(ensemble: Ensemble, basis: ManyBodyBasis) -> OneRDM:
    """Spin-summed spatial 1-RDM of an ensemble."""
    m = basis.m_spatial
    out = np.zeros((m, m))
    for w, (k, vec) in zip(ensemble.weights, ensemble.states):
        if len(vec) != basis.sectors[k].dim:
            raise ValueError("state length does not match its sector dimension")
        out += w * basis.gamma_from_vector(k, vec)
    return OneRDM.from_matrix(out)


def _state_two_rdm(basis: ManyBodyBasis, k: int, vec: np.ndarray) -> np.ndarray:
    m = basis.m_spatial
    sector = basis.sectors[k]
    out = np.zeros((m, m, m, m))
    for j, det in enumerate(sector.dets):
        cj = vec[j]
        if cj == 0.0:
            continue
        for sig in (0, 1):
            for r in range(m):
                step0 = annihilate(det, spin_orbital(r, sig))
                if step0 is None:
                    continue
                for tau in (0, 1):
                    for s in range(m):
                        step1 = annihilate(step0[0], spin_orbital(s, tau))
                        if step1 is None:
                            continue
                        for q in range(m):
                            step2 = create(step1[0], spin_orbital(q, tau))
                            if step2 is None:
                                continue
                            for p in range(m):
                                step3 = create(step2[0], spin_orbital(p, sig))
                                if step3 is None or step3[0] not in sector:
                                    continue
                                phase = step0[1] * step1[1] * step2[1] * step3[1]
                                out[p, q, r, s] += (
                                    phase * vec[sector.position(step3[0])] * cj
                                )
    return out


def two_rdm(ensemble: Ensemble, basis: ManyBodyBasis) -> TwoRDM:
    """Spin-summed spatial 2-RDM G[p,q,r,s] = <a†_{p,σ} a†_{q,τ} a_{s,τ} a_{r,σ}>."""
    m = basis.m_spatial
    out = np.zeros((m, m, m, m))
    for w, (k, vec) in zip(ensemble.weights, ensemble.states):
        out += w * _state_two_rdm(basis, k, vec)
    return TwoRDM(out)


def vee_expectation(rdm2: TwoRDM, v: TwoBodyIntegrals) -> float:
    """Interaction energy (1/2) sum (pr|qs) G[p,q,r,s] from a 2-RDM."""
    t = v.dense() if hasattr(v, "dense") else np.asarray(v, dtype=float)
    return 0.5 * float(np.einsum("prqs,pqrs->", t, rdm2.tensor))
