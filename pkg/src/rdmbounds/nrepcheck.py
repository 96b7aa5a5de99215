"""Membership tests for candidate (W, gamma) pairs and a max-min demo.

A pair is jointly representable iff gamma passes the occupation
admissibility test and the certified bounds sandwich W.  Negative
verdicts carry an explicit separating half-space whose right-hand
side is recomputed from the ground problem, so they can be checked
without trusting any optimizer state.  Positive verdicts are
conclusive only when both bound certificates closed their gaps.

The bivariational demonstration minimizes Tr[h gamma] + lam * W over
the intersection of half-spaces, the admissible-occupation set and a
W box, using a log-barrier interior Newton method; the outer loop
improves the constraint family by cutting planes taken from the
violated bound at the current inner minimizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .dualbounds import BoundOptions, lower_bound, upper_bound
from .functionals import COLEMAN_TOL, FunctionalPoint, coleman_check
from .integrals import OneBodyOperator, SystemSpec
from .manybody import ManyBodyBasis, OneRDM, ground_state


class InfeasibleConstraintsError(RuntimeError):
    """The half-space intersection has empty interior inside the box."""


@dataclass(frozen=True)
class HalfSpace:
    """Constraint Tr[h_tilde gamma] + lam * W >= rhs with rhs a ground energy."""

    h_tilde: OneBodyOperator
    lam: float
    rhs: float


@dataclass(frozen=True)
class Verdict:
    """Outcome of a membership test, with bounds and optional witness."""

    representable: bool
    witness: tuple[HalfSpace, float] | None
    lb: float
    ub: float
    conclusive: bool
    message: str = ""


def make_halfspace(
    h, lam: float, spec: SystemSpec, *, basis: ManyBodyBasis | None = None
) -> HalfSpace:
    """Half-space from a trial potential, right-hand side solved exactly."""
    op = h if isinstance(h, OneBodyOperator) else OneBodyOperator(np.asarray(h, float))
    rhs = ground_state(spec, lam, h=op, basis=basis).energy
    return HalfSpace(op, float(lam), rhs)


def reduce_lambda(h, lam: float) -> tuple[OneBodyOperator, float]:
    """Rescale (h, lam) to the equivalent unit-strength pair (h/|lam|, sgn lam)."""
    if lam == 0.0:
        raise ValueError("lambda must be nonzero; use coleman_check at lambda = 0")
    hm = h.matrix if isinstance(h, OneBodyOperator) else np.asarray(h, dtype=float)
    return OneBodyOperator(hm / abs(lam)), float(np.sign(lam))


def _coleman_witness(gm: np.ndarray, n_electrons: int) -> OneBodyOperator:
    """Potential exposing the largest admissibility violation at lam = 0."""
    w, u = np.linalg.eigh(gm)
    best = None
    if w[0] < -COLEMAN_TOL:
        best = (-w[0], np.outer(u[:, 0], u[:, 0]))
    if w[-1] > 2.0 + COLEMAN_TOL:
        cand = (w[-1] - 2.0, -np.outer(u[:, -1], u[:, -1]))
        if best is None or cand[0] > best[0]:
            best = cand
    tr = float(np.trace(gm))
    if abs(tr - n_electrons) > COLEMAN_TOL:
        sign = 1.0 if tr < n_electrons else -1.0
        cand = (abs(tr - n_electrons), sign * np.eye(len(gm)))
        if best is None or cand[0] > best[0]:
            best = cand
    if best is None:
        raise ValueError("no admissibility violation to witness")
    return OneBodyOperator(best[1])


def check_pair(
    point: FunctionalPoint,
    spec: SystemSpec,
    tol: float = 1e-6,
    *,
    options: BoundOptions | None = None,
    basis: ManyBodyBasis | None = None,
) -> Verdict:
    """Decide whether (W, gamma) is jointly reachable by an N-electron ensemble.

    Admissibility failures are witnessed at lam = 0; otherwise W is
    tested against the two certified bounds, whose optimal potentials
    become witnesses on violation.  Violation verdicts are always
    conclusive (a certified bound is one-sided even before its gap
    closes); acceptance verdicts are conclusive only when both
    certificates converged.
    """
    if basis is None:
        basis = ManyBodyBasis.from_spec(spec)
    gamma = point.gamma
    gm = gamma.matrix if isinstance(gamma, OneRDM) else np.asarray(gamma, dtype=float)
    w = float(point.w)

    admissible = coleman_check(gm, spec.n_electrons)
    if not admissible.ok:
        h = _coleman_witness(gm, spec.n_electrons)
        hs = make_halfspace(h, 0.0, spec, basis=basis)
        margin = hs.rhs - float(np.sum(h.matrix * gm))
        return Verdict(False, (hs, margin), np.inf, -np.inf, True, admissible.message)

    lb_res = lower_bound(gm, spec, options, basis=basis)
    ub_res = upper_bound(gm, spec, options, basis=basis)
    lb, ub = lb_res.value, ub_res.value
    if w < lb - tol:
        hs = make_halfspace(lb_res.optimal_potential, 1.0, spec, basis=basis)
        margin = hs.rhs - float(np.sum(hs.h_tilde.matrix * gm)) - w
        return Verdict(
            False, (hs, margin), lb, ub, True, "below certified lower bound"
        )
    if w > ub + tol:
        hs = make_halfspace(ub_res.optimal_potential, -1.0, spec, basis=basis)
        margin = hs.rhs - float(np.sum(hs.h_tilde.matrix * gm)) + w
        return Verdict(
            False, (hs, margin), lb, ub, True, "above certified upper bound"
        )
    conclusive = lb_res.converged and ub_res.converged
    message = "within certified bounds" if conclusive else "bound gaps not closed"
    return Verdict(True, None, lb, ub, conclusive, message)


def sampled_lambda0_check(
    gamma,
    spec: SystemSpec,
    samples: int = 200,
    seed: int = 0,
    *,
    tol: float = 1e-9,
    basis: ManyBodyBasis | None = None,
) -> bool:
    """Test Tr[h gamma] >= E0[N, h] over sampled interaction-free potentials.

    The sample always contains the targeted potentials (eigenvector
    projectors of gamma with both signs, and +/- identity), so any
    occupation or trace violation above tol is found; random
    symmetric draws fill the rest of the budget.  Returns True when
    every sampled inequality holds.
    """
    if basis is None:
        basis = ManyBodyBasis.from_spec(spec)
    gm = gamma.matrix if isinstance(gamma, OneRDM) else np.asarray(gamma, dtype=float)
    m = spec.m_spatial
    w, u = np.linalg.eigh(gm)
    pool = []
    for i in range(m):
        proj = np.outer(u[:, i], u[:, i])
        pool.extend((proj, -proj))
    eye = np.eye(m)
    pool.extend((eye, -eye))
    rng = np.random.default_rng(seed)
    while len(pool) < samples:
        a = rng.standard_normal((m, m))
        pool.append(0.5 * (a + a.T))
    for h in pool:
        e0 = ground_state(spec, 0.0, h=OneBodyOperator(h), basis=basis).energy
        if float(np.sum(h * gm)) < e0 - tol:
            return False
    return True


# ---------------------------------------------------------------------------
# Inner minimization over half-space intersections


def _traceless_basis(m: int) -> np.ndarray:
    """Orthonormal symmetric traceless basis, Frobenius inner product."""
    mats = []
    for p in range(m):
        for q in range(p + 1, m):
            b = np.zeros((m, m))
            b[p, q] = b[q, p] = 1.0 / np.sqrt(2.0)
            mats.append(b)
    for k in range(1, m):
        d = np.zeros(m)
        d[:k] = 1.0
        d[k] = -float(k)
        mats.append(np.diag(d / np.linalg.norm(d)))
    return np.array(mats)


@dataclass(eq=False)
class _InnerProblem:
    center: np.ndarray  # (n/m) I
    bstack: np.ndarray  # (d, m, m)
    c0: float
    c_x: np.ndarray
    c_w: float
    alphas: np.ndarray  # (K, d)
    betas: np.ndarray  # (K,)
    consts: np.ndarray  # (K,)
    w_lo: float
    w_hi: float

    @property
    def dim(self) -> int:
        return len(self.c_x)

    def gamma_of(self, x: np.ndarray) -> np.ndarray:
        return self.center + np.einsum("i,imn->mn", x, self.bstack)

    def objective(self, z: np.ndarray) -> float:
        return self.c0 + float(self.c_x @ z[:-1]) + self.c_w * z[-1]

    def parts(self, z: np.ndarray):
        x, w = z[:-1], z[-1]
        eigw, u = np.linalg.eigh(self.gamma_of(x))
        slack = self.consts + self.alphas @ x + self.betas * w
        return eigw, u, slack, w - self.w_lo, self.w_hi - w

    def barrier_value(self, z: np.ndarray, mu: float) -> float:
        eigw, _, slack, blo, bhi = self.parts(z)
        if eigw.min() <= 0 or eigw.max() >= 2 or blo <= 0 or bhi <= 0:
            return np.inf
        if len(slack) and slack.min() <= 0:
            return np.inf
        logs = (
            np.log(eigw).sum()
            + np.log(2.0 - eigw).sum()
            + (np.log(slack).sum() if len(slack) else 0.0)
            + np.log(blo)
            + np.log(bhi)
        )
        return self.objective(z) - mu * logs

    def barrier_grad_hess(self, z: np.ndarray, mu: float):
        d = self.dim
        eigw, u, slack, blo, bhi = self.parts(z)
        p = np.einsum("ma,imn,nb->iab", u, self.bstack, u)
        inv1 = 1.0 / eigw
        inv2 = 1.0 / (2.0 - eigw)
        t1 = np.einsum("iaa,a->i", p, inv1)
        t2 = np.einsum("iaa,a->i", p, inv2)
        h1 = np.einsum("iab,jab,a,b->ij", p, p, inv1, inv1)
        h2 = np.einsum("iab,jab,a,b->ij", p, p, inv2, inv2)
        grad = np.empty(d + 1)
        hess = np.zeros((d + 1, d + 1))
        grad[:d] = self.c_x - mu * (t1 - t2)
        grad[d] = self.c_w - mu * (1.0 / blo - 1.0 / bhi)
        hess[:d, :d] = mu * (h1 + h2)
        hess[d, d] = mu * (1.0 / blo**2 + 1.0 / bhi**2)
        if len(slack):
            inv_s = 1.0 / slack
            grad[:d] -= mu * (self.alphas.T @ inv_s)
            grad[d] -= mu * float(self.betas @ inv_s)
            ws = inv_s**2
            hess[:d, :d] += mu * (self.alphas.T * ws) @ self.alphas
            hess[:d, d] += mu * (self.alphas.T @ (ws * self.betas))
            hess[d, :d] = hess[:d, d]
            hess[d, d] += mu * float(self.betas**2 @ ws)
        return grad, hess

    def newton(self, z: np.ndarray, mu: float, iters: int = 60) -> np.ndarray:
        for _ in range(iters):
            val = self.barrier_value(z, mu)
            grad, hess = self.barrier_grad_hess(z, mu)
            ridge = 1e-12 * max(1.0, float(np.trace(hess)) / len(z))
            dz = np.linalg.solve(hess + ridge * np.eye(len(z)), -grad)
            dec = float(-grad @ dz)
            if dec < 2e-13:
                break
            t = 1.0
            while t > 1e-16:
                if self.barrier_value(z + t * dz, mu) <= val - 0.25 * t * dec:
                    break
                t *= 0.5
            if t <= 1e-16:
                break
            z = z + t * dz
        return z


def _phase_one(problem: _InnerProblem, margin: float) -> np.ndarray:
    """Strictly feasible start by maximizing the worst slack on a trust cube."""
    d = problem.dim
    n_var = d + 2  # x, W, t
    c = np.zeros(n_var)
    c[-1] = -1.0
    rows = []
    rhs = []
    for k in range(len(problem.consts)):
        row = np.zeros(n_var)
        row[:d] = -problem.alphas[k]
        row[d] = -problem.betas[k]
        row[-1] = 1.0
        rows.append(row)
        rhs.append(problem.consts[k])
    row = np.zeros(n_var)
    row[d] = -1.0
    row[-1] = 1.0
    rows.append(row)
    rhs.append(-problem.w_lo)
    row = np.zeros(n_var)
    row[d] = 1.0
    row[-1] = 1.0
    rows.append(row)
    rhs.append(problem.w_hi)
    rho = 0.9 * margin / np.sqrt(max(d, 1))
    bounds = [(-rho, rho)] * d + [(None, None), (None, None)]
    res = linprog(
        c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs"
    )
    if not res.success or res.x[-1] <= 1e-9:
        raise InfeasibleConstraintsError(
            "no strictly feasible (gamma, W) inside the box"
        )
    return res.x[:-1]


def max_min(
    spec: SystemSpec,
    lam: float,
    constraints: list[HalfSpace],
    box: tuple[float, float],
    *,
    mu_min: float = 1e-10,
    validate: bool = True,
    basis: ManyBodyBasis | None = None,
) -> tuple[float, FunctionalPoint]:
    """Minimize Tr[h gamma] + lam * W over half-spaces, admissible gamma, W box.

    The trace condition is eliminated by parameterizing gamma around
    the equal-filling center with a traceless basis; the remaining
    constraints enter a logarithmic barrier whose strength is halved
    from 1 down to mu_min (path suboptimality is the barrier count
    times mu_min).  Ties are broken by the analytic center, making
    the minimizer deterministic.
    """
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ValueError("lam must be +1 or -1")
    w_lo, w_hi = float(box[0]), float(box[1])
    if not (np.isfinite(w_lo) and np.isfinite(w_hi) and w_lo < w_hi):
        raise ValueError("box must be a finite nonempty interval")
    n, m = spec.n_electrons, spec.m_spatial
    if not 0 < n < 2 * m:
        raise ValueError("admissible set has empty interior at this filling")
    if validate and constraints:
        if basis is None:
            basis = ManyBodyBasis.from_spec(spec)
        for hs in constraints:
            e = ground_state(spec, hs.lam, h=hs.h_tilde, basis=basis).energy
            if abs(e - hs.rhs) > 1e-9 + 1e-12 * abs(e):
                raise ValueError("half-space rhs does not match its ground energy")

    bstack = _traceless_basis(m)
    h = spec.h.matrix
    center = (n / m) * np.eye(m)
    if constraints:
        hmats = np.array([hs.h_tilde.matrix for hs in constraints])
        alphas = np.einsum("kmn,imn->ki", hmats, bstack)
        betas = np.array([hs.lam for hs in constraints])
        consts = np.array(
            [(n / m) * np.trace(hs.h_tilde.matrix) - hs.rhs for hs in constraints]
        )
    else:
        alphas = np.zeros((0, len(bstack)))
        betas = np.zeros(0)
        consts = np.zeros(0)
    problem = _InnerProblem(
        center=center,
        bstack=bstack,
        c0=(n / m) * float(np.trace(h)),
        c_x=np.einsum("mn,imn->i", h, bstack),
        c_w=float(lam),
        alphas=alphas,
        betas=betas,
        consts=consts,
        w_lo=w_lo,
        w_hi=w_hi,
    )
    z = _phase_one(problem, margin=min(n / m, 2.0 - n / m))
    mu = 1.0
    while True:
        z = problem.newton(z, mu)
        if mu <= mu_min:
            break
        mu = max(mu / 2.0, mu_min)
    gamma_star = problem.gamma_of(z[:-1])
    point = FunctionalPoint(w=float(z[-1]), gamma=OneRDM.from_matrix(gamma_star))
    return problem.objective(z), point


def default_box(
    spec: SystemSpec,
    *,
    options: BoundOptions | None = None,
    basis: ManyBodyBasis | None = None,
) -> tuple[float, float]:
    """W box [0, 10 * max(1, upper bound at equal filling)]."""
    m = spec.m_spatial
    gamma_half = (spec.n_electrons / m) * np.eye(m)
    res = upper_bound(gamma_half, spec, options, basis=basis)
    return (0.0, 10.0 * max(1.0, res.value))


@dataclass(frozen=True)
class CutRound:
    """One outer round: inner value, gap to the target energy, family size."""

    index: int
    value: float
    gap: float
    n_constraints: int
    point: FunctionalPoint


def cutting_plane(
    spec: SystemSpec,
    lam: float = 1.0,
    rounds: int = 16,
    box: tuple[float, float] | None = None,
    *,
    h=None,
    constraints: list[HalfSpace] | None = None,
    improvement_tol: float = 1e-8,
    max_constraints: int = 64,
    options: BoundOptions | None = None,
    basis: ManyBodyBasis | None = None,
) -> list[CutRound]:
    """Grow the half-space family toward max-min equality with E_gs.

    Each round solves the inner minimization, evaluates the certified
    bound at the inner minimizer's gamma, and appends the violated
    inequality's optimal potential as the next half-space.  A plain
    tangent at the minimizer zigzags, so when the true relaxed
    objective did not improve there, the cut is generated at the
    midpoint toward the best gamma seen instead.  Stops when no
    violation remains, improvement stalls for two rounds, the family
    reaches max_constraints, or rounds are exhausted.
    """
    if basis is None:
        basis = ManyBodyBasis.from_spec(spec)
    h_op = spec.h if h is None else (
        h if isinstance(h, OneBodyOperator) else OneBodyOperator(np.asarray(h, float))
    )
    if h is not None and not np.allclose(h_op.matrix, spec.h.matrix, atol=1e-12):
        spec = SystemSpec(
            m_spatial=spec.m_spatial,
            n_electrons=spec.n_electrons,
            h=h_op,
            v=spec.v,
            core_energy=spec.core_energy,
        )
    if box is None:
        box = default_box(spec, options=options, basis=basis)
    sign = 1.0 if lam > 0 else -1.0
    target = ground_state(spec, lam, basis=basis).energy
    hm = spec.h.matrix

    def probe(gm):
        if sign > 0:
            res = lower_bound(gm, spec, options, basis=basis)
        else:
            res = upper_bound(gm, spec, options, basis=basis)
        w_eff = min(max(res.value, box[0]), box[1])
        return res, float(np.sum(hm * gm)) + lam * w_eff

    cons = list(constraints or [])
    history: list[CutRound] = []
    prev = -np.inf
    stall = 0
    best_phi = np.inf
    best_gm = None
    for r in range(rounds):
        value, point = max_min(spec, lam, cons, box, validate=False, basis=basis)
        history.append(CutRound(r + 1, value, target - value, len(cons), point))
        if target - value <= improvement_tol:
            break
        stall = stall + 1 if value - prev < improvement_tol else 0
        if stall >= 2:
            break
        prev = value
        if len(cons) >= max_constraints:
            break
        gm = point.gamma.matrix
        res, phi = probe(gm)
        violation = sign * (res.value - point.w)
        if violation <= 1e-10:
            break
        if phi < best_phi:
            best_phi, best_gm = phi, gm
        else:
            res_q, phi_q = probe(0.5 * (gm + best_gm))
            if phi_q < best_phi:
                best_phi, best_gm = phi_q, 0.5 * (gm + best_gm)
            res = res_q
        cons.append(make_halfspace(res.optimal_potential, sign, spec, basis=basis))
    return history
