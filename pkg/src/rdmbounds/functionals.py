"""Candidate interaction-energy functionals and 1-RDM validity checks.

A candidate functional assigns an interaction energy W to a 1-RDM.
The bundled mean-field candidate evaluates the idempotent-style 2-RDM
ansatz G[p,q,r,s] = n_r n_s (δ_pr δ_qs - ½ δ_qr δ_ps) in the natural
orbital basis of the given γ.  At degenerate occupations the natural
basis is not unique, so the value can jump there; the eigensolver's
deterministic basis choice is used.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .integrals import SystemSpec, TwoBodyIntegrals, rotate_tensor
from .manybody import OneRDM, TwoRDM

COLEMAN_TOL = 1e-10
OCC_SLACK = 1e-8


@dataclass(eq=False)
class FunctionalPoint:
    """A candidate pair (W, gamma) to be tested for representability."""

    w: float
    gamma: OneRDM


@dataclass
class ColemanVerdict:
    """Outcome of the occupation-and-trace admissibility check."""

    ok: bool
    message: str
    min_occupation: float
    max_occupation: float
    trace: float

    def __bool__(self) -> bool:
        return self.ok


def coleman_check(gamma, n_electrons: int) -> ColemanVerdict:
    """Test 0 <= occupations <= 2 and trace == N, to absolute tolerance 1e-10."""
    if not isinstance(gamma, OneRDM):
        gamma = OneRDM.from_matrix(np.asarray(gamma, dtype=float))
    occ = gamma.occupations
    tr = gamma.trace
    lo, hi = float(occ[0]), float(occ[-1])
    if lo < -COLEMAN_TOL:
        return ColemanVerdict(False, f"occupation {lo:.6g} below 0", lo, hi, tr)
    if hi > 2.0 + COLEMAN_TOL:
        return ColemanVerdict(False, f"occupation {hi:.6g} above 2", lo, hi, tr)
    if abs(tr - n_electrons) > COLEMAN_TOL:
        return ColemanVerdict(
            False, f"trace {tr:.12g} differs from N={n_electrons}", lo, hi, tr
        )
    return ColemanVerdict(True, "admissible", lo, hi, tr)


def _checked_occupations(occupations) -> np.ndarray:
    occ = np.asarray(occupations, dtype=float)
    if occ.min() < -OCC_SLACK or occ.max() > 2.0 + OCC_SLACK:
        raise ValueError(f"occupations outside [0, 2]: {occ}")
    return np.clip(occ, 0.0, 2.0)


def hf_two_rdm(occupations) -> TwoRDM:
    """Mean-field 2-RDM ansatz from natural occupations (natural-orbital basis)."""
    occ = _checked_occupations(occupations)
    m = len(occ)
    eye = np.eye(m)
    ns = np.einsum("r,s->rs", occ, occ)
    tensor = np.einsum("rs,pr,qs->pqrs", ns, eye, eye) - 0.5 * np.einsum(
        "rs,qr,ps->pqrs", ns, eye, eye
    )
    return TwoRDM(tensor)


def trace_condition(rdm2: TwoRDM, n_electrons: int) -> tuple[float, bool]:
    """Trace of a 2-RDM and whether it reaches the N-electron value N(N-1)."""
    value = rdm2.trace
    return value, value >= n_electrons * (n_electrons - 1) - 1e-12


def hf_vee(gamma, v: TwoBodyIntegrals) -> float:
    """Mean-field interaction energy of gamma.

    Diagonalizes gamma, rotates the integrals into the natural basis,
    and contracts W = ½ sum_rs n_r n_s [(rr|ss) - ½ (rs|sr)].
    """
    gm = gamma.matrix if isinstance(gamma, OneRDM) else np.asarray(gamma, dtype=float)
    occ, u = np.linalg.eigh(gm)
    occ = _checked_occupations(occ)
    t = rotate_tensor(v.dense(), u)
    coul = np.einsum("rrss->rs", t)
    exch = np.einsum("rssr->rs", t)
    ns = np.einsum("r,s->rs", occ, occ)
    return 0.5 * float(np.sum(ns * (coul - 0.5 * exch)))


@dataclass(eq=False)
class CandidateFunctional:
    """A named pure map (gamma, system) -> W."""

    name: str
    fn: Callable[[OneRDM, SystemSpec], float]

    def __call__(self, gamma: OneRDM, spec: SystemSpec) -> float:
        return self.fn(gamma, spec)

    def point(self, gamma: OneRDM, spec: SystemSpec) -> FunctionalPoint:
        return FunctionalPoint(self(gamma, spec), gamma)


CANDIDATES = {
    "hf": CandidateFunctional("hf", lambda gamma, spec: hf_vee(gamma, spec.v)),
}
