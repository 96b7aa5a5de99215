"""Certified bounds on the interaction-energy functional of a 1-RDM.

The exact lower bound at gamma is the concave-dual value
sup_g { E(g, +1) - Tr[g gamma] } where E(g, lam) is the N-electron
ground energy of g + lam*V; the exact upper bound is the negative of
the same program at lam = -1.  The dual is maximized by annealing a
free-energy smoothing (temperature-softened ground energy with the
thermal 1-RDM as exact gradient), then polishing the nonsmooth
objective with adaptive-level supergradient steps.  A primal
certificate is recovered from the ground space of the final
potential, and the dual/primal pair is reported with its gap.

An independent brute-force route (primal_oracle) minimizes the signed
interaction energy directly over factorized N-electron density
matrices under an augmented-Lagrangian 1-RDM constraint, escaping
rank-deficient traps through eigenvector steps of the multiplier
Hamiltonian; it exists to cross-check the dual values and is never
consulted by them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize

from .functionals import coleman_check
from .integrals import OneBodyOperator, SystemSpec
from .manybody import Ensemble, ManyBodyBasis, OneRDM

MAX_GROUND_DIM = 64


class InadmissibleGammaError(ValueError):
    """Input 1-RDM fails the occupation/trace admissibility check."""


class OracleInfeasibleError(RuntimeError):
    """Brute-force search could not meet the 1-RDM constraint."""


@dataclass
class BoundOptions:
    """Tuning knobs for the dual bound computation.

    The defaults favor accuracy near idempotent 1-RDMs: occupations
    are clamped to [clamp_eps, 2 - clamp_eps] before the dual is
    maximized, and the annealing schedule runs hot enough that the
    boundary layer (optimal potentials of norm ~ 1/sqrt(clamp_eps))
    is reachable.
    """

    gap_tol: float = 1e-6
    residual_tol: float = 1e-6
    clamp_eps: float = 1e-12
    beta_schedule: tuple[float, ...] = tuple(float(2**k) for k in range(25))
    stage_maxiter: int = 120
    stage_gtol: float = 1e-13
    polish_steps: int = 400
    eval_budget: int = 20_000
    degeneracy_tol: float = 1e-9
    certificate_ladder: tuple[float, ...] = (1e-9, 1e-8, 1e-7, 1e-6, 1e-5)
    certificate_steps: int = 600
    certificate_beta_min: float = 256.0


@dataclass(eq=False)
class BoundResult:
    """A certified bound: dual value, optimizing potential, primal witness."""

    value: float
    optimal_potential: OneBodyOperator
    duality_gap: float
    primal_ensemble: Ensemble
    iterations: int
    converged: bool
    residual: float
    dual_value: float
    primal_value: float


def _tri_pairs(m: int) -> list[tuple[int, int]]:
    return [(p, q) for p in range(m) for q in range(p, m)]


def _unpack_sym(x: np.ndarray, m: int, pairs) -> np.ndarray:
    g = np.zeros((m, m))
    for k, (p, q) in enumerate(pairs):
        g[p, q] = x[k]
        g[q, p] = x[k]
    return g


def _pack_grad(r: np.ndarray, pairs) -> np.ndarray:
    return np.array([r[p, p] if p == q else 2.0 * r[p, q] for p, q in pairs])


def _clamped_gamma(gamma, eps: float) -> np.ndarray:
    mat = gamma.matrix if isinstance(gamma, OneRDM) else np.asarray(gamma, dtype=float)
    occ, u = np.linalg.eigh(mat)
    occ = np.clip(occ, eps, 2.0 - eps)
    return (u * occ) @ u.T


class _DualEngine:
    """Evaluations of the dual objective D(g) = E(g, lam) - Tr[g gamma]."""

    def __init__(self, basis: ManyBodyBasis, lam: float, gamma_target: np.ndarray):
        self.basis = basis
        self.lam = lam
        self.target = gamma_target
        self.pairs = _tri_pairs(basis.m_spatial)
        self.evals = 0

    def g_matrix(self, x: np.ndarray) -> np.ndarray:
        return _unpack_sym(x, self.basis.m_spatial, self.pairs)

    def _eigh(self, g: np.ndarray):
        self.evals += 1
        return self.basis.eigh_all(g, self.lam)

    def smoothed(self, x: np.ndarray, beta: float):
        """Free-energy smoothing of D and its exact gradient."""
        g = self.g_matrix(x)
        spectra = self._eigh(g)
        all_w = np.concatenate([w for w, _ in spectra])
        emin = float(all_w.min())
        weights = np.exp(-beta * (all_w - emin))
        z = float(weights.sum())
        free = emin - np.log(z) / beta
        gamma_th = np.zeros_like(self.target)
        offset = 0
        for k, (w, u) in enumerate(spectra):
            sec = weights[offset : offset + len(w)] / z
            offset += len(w)
            keep = sec > 1e-300
            if keep.any():
                rho = (u[:, keep] * sec[keep]) @ u[:, keep].T
                gamma_th += self.basis.gamma_from_density(k, rho)
        value = free - float(np.sum(g * self.target))
        grad = _pack_grad(gamma_th - self.target, self.pairs)
        return value, grad

    def exact(self, x: np.ndarray, degeneracy_tol: float):
        """Nonsmooth D and the equal-weight ground-ensemble supergradient."""
        g = self.g_matrix(x)
        spectra = self._eigh(g)
        e0 = min(float(w[0]) for w, _ in spectra)
        window = e0 + degeneracy_tol * max(1.0, abs(e0))
        gamma_eq = np.zeros_like(self.target)
        count = 0
        for k, (w, u) in enumerate(spectra):
            for i in range(len(w)):
                if w[i] > window:
                    break
                gamma_eq += self.basis.gamma_from_vector(k, u[:, i])
                count += 1
        gamma_eq /= count
        value = e0 - float(np.sum(g * self.target))
        grad = _pack_grad(gamma_eq - self.target, self.pairs)
        return value, grad, spectra, e0


def dual_objective(
    g,
    lam: float,
    gamma,
    spec: SystemSpec,
    *,
    basis: ManyBodyBasis | None = None,
    degeneracy_tol: float = 1e-9,
):
    """One dual evaluation: value E(g, lam) - Tr[g gamma] and a supergradient.

    The supergradient is gamma_gs - gamma for the equal-weight ensemble
    over the degenerate ground space.
    """
    if basis is None:
        basis = ManyBodyBasis.from_spec(spec)
    gm = g.matrix if isinstance(g, OneBodyOperator) else np.asarray(g, dtype=float)
    target = gamma.matrix if isinstance(gamma, OneRDM) else np.asarray(gamma, dtype=float)
    engine = _DualEngine(basis, lam, target)
    x = np.array([gm[p, q] for p, q in engine.pairs])
    value, grad, _, _ = engine.exact(x, degeneracy_tol)
    m = basis.m_spatial
    supergrad = np.zeros((m, m))
    for k, (p, q) in enumerate(engine.pairs):
        supergrad[p, q] = grad[k] if p == q else 0.5 * grad[k]
        supergrad[q, p] = supergrad[p, q]
    return value, supergrad


# ---------------------------------------------------------------------------
# Primal certificate


def _project_simplex(w: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1}."""
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(w) + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[rho - 1] / rho
    return np.maximum(w - theta, 0.0)


def _project_blocks(mats: list[np.ndarray]):
    """Projection onto block PSD matrices with joint unit trace."""
    eigs = [np.linalg.eigh(m) for m in mats]
    allw = np.concatenate([w for w, _ in eigs])
    proj = _project_simplex(allw)
    out = []
    offset = 0
    for w, u in eigs:
        pw = proj[offset : offset + len(w)]
        offset += len(w)
        out.append((u * pw) @ u.T)
    return out


@dataclass(eq=False)
class _Certificate:
    ensemble: Ensemble
    primal_value: float
    residual: float
    gap: float


def _certificate_from_spectra(
    basis: ManyBodyBasis,
    lam: float,
    target: np.ndarray,
    spectra,
    e0: float,
    dual_value: float,
    window_tol: float,
    steps: int,
) -> _Certificate | None:
    window = e0 + window_tol * max(1.0, abs(e0))
    groups = []  # (sector index, matrix of ground vectors)
    for k, (w, u) in enumerate(spectra):
        n_keep = int(np.searchsorted(w, window, side="right"))
        if n_keep:
            groups.append((k, u[:, :n_keep]))
    total = sum(vecs.shape[1] for _, vecs in groups)
    if total == 0 or total > MAX_GROUND_DIM:
        return None

    m = basis.m_spatial
    a_blocks = []
    b_blocks = []
    for k, vecs in groups:
        stack = basis.excitation_stack(k).reshape(m * m, *basis.v_blocks[k].shape)
        a_blocks.append(np.einsum("ia,tij,jb->tab", vecs, stack, vecs))
        b_blocks.append(vecs.T @ basis.v_blocks[k] @ vecs)

    y = target.ravel()
    rho = [np.eye(vecs.shape[1]) / total for _, vecs in groups]
    lip = sum(float(np.sum(a * a)) for a in a_blocks)
    step = 1.0 / max(lip, 1e-12)

    def gamma_of(r):
        return sum(np.einsum("tab,ab->t", a, rb) for a, rb in zip(a_blocks, r))

    prev = None
    momentum = [rb.copy() for rb in rho]
    t_acc = 1.0
    for it in range(steps):
        gy = gamma_of(momentum) - y
        grads = [np.einsum("tab,t->ab", a, gy) for a in a_blocks]
        cand = [mb - step * gb for mb, gb in zip(momentum, grads)]
        new = _project_blocks([0.5 * (c + c.T) for c in cand])
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_acc * t_acc))
        momentum = [
            nb + ((t_acc - 1.0) / t_next) * (nb - rb) for nb, rb in zip(new, rho)
        ]
        rho, t_acc = new, t_next
        res = float(np.linalg.norm(gamma_of(rho) - y))
        if prev is not None and abs(prev - res) < 1e-16 and it > 20:
            break
        prev = res

    residual = float(np.linalg.norm(gamma_of(rho) - y))
    primal = lam * sum(float(np.sum(rb * bb)) for rb, bb in zip(rho, b_blocks))

    weights = []
    states = []
    for (k, vecs), rb in zip(groups, rho):
        w, u = np.linalg.eigh(rb)
        for i in range(len(w)):
            if w[i] > 1e-12:
                weights.append(w[i])
                states.append((k, vecs @ u[:, i]))
    weights = np.asarray(weights)
    weights /= weights.sum()
    ensemble = Ensemble(weights, states)
    return _Certificate(ensemble, primal, residual, primal - dual_value)


def primal_certificate(
    g_star,
    lam: float,
    gamma,
    spec: SystemSpec,
    opts: BoundOptions | None = None,
    *,
    basis: ManyBodyBasis | None = None,
):
    """Best ensemble over the ground space of g_star matching gamma.

    Returns (ensemble, primal_value, residual) where primal_value is
    the lam-signed interaction energy of the recovered ensemble and
    residual = ||gamma(ensemble) - gamma||_F.
    """
    opts = opts or BoundOptions()
    if basis is None:
        basis = ManyBodyBasis.from_spec(spec)
    gm = (
        g_star.matrix
        if isinstance(g_star, OneBodyOperator)
        else np.asarray(g_star, dtype=float)
    )
    target = gamma.matrix if isinstance(gamma, OneRDM) else np.asarray(gamma, dtype=float)
    engine = _DualEngine(basis, lam, target)
    x = np.array([gm[p, q] for p, q in engine.pairs])
    dual_value, _, spectra, e0 = engine.exact(x, opts.degeneracy_tol)
    best = None
    for tol in opts.certificate_ladder:
        cert = _certificate_from_spectra(
            basis, lam, target, spectra, e0, dual_value, tol, opts.certificate_steps
        )
        if cert is None:
            continue
        if best is None or abs(cert.gap) + cert.residual < abs(best.gap) + best.residual:
            best = cert
        if best.residual <= opts.residual_tol and abs(best.gap) <= opts.gap_tol:
            break
    if best is None:
        raise ValueError(f"ground space larger than {MAX_GROUND_DIM}")
    return best.ensemble, best.primal_value, best.residual


# ---------------------------------------------------------------------------
# Dual maximization


def maximize_dual(
    lam: float,
    gamma,
    spec: SystemSpec,
    opts: BoundOptions | None = None,
    *,
    basis: ManyBodyBasis | None = None,
) -> BoundResult:
    """Maximize D(g) = E(g, lam) - Tr[g gamma] over symmetric potentials.

    Anneals the free-energy smoothing over opts.beta_schedule with
    warm starts (quasi-Newton ascent per stage, exact thermal-RDM
    gradients), polishes with adaptive-level supergradient steps, and
    certifies the final potential with a primal ensemble.
    """
    opts = opts or BoundOptions()
    if basis is None:
        basis = ManyBodyBasis.from_spec(spec)
    target = _clamped_gamma(gamma, opts.clamp_eps)
    engine = _DualEngine(basis, lam, target)

    x = np.zeros(len(engine.pairs))
    best_x = x.copy()
    best_val = -np.inf
    best_cert: _Certificate | None = None

    def consider(xv: np.ndarray) -> bool:
        """Track the incumbent; returns True when certified converged."""
        nonlocal best_x, best_val, best_cert
        val, _, spectra, e0 = engine.exact(xv, opts.degeneracy_tol)
        if val > best_val:
            best_val = val
            best_x = xv.copy()
            best_cert = None
        if best_cert is None:
            if val < best_val:
                _, _, spectra, e0 = engine.exact(best_x, opts.degeneracy_tol)
            for tol in opts.certificate_ladder:
                cert = _certificate_from_spectra(
                    basis, lam, target, spectra, e0, best_val, tol,
                    opts.certificate_steps,
                )
                if cert is None:
                    continue
                if best_cert is None or abs(cert.gap) + cert.residual < abs(
                    best_cert.gap
                ) + best_cert.residual:
                    best_cert = cert
                if (
                    best_cert.residual <= opts.residual_tol
                    and abs(best_cert.gap) <= opts.gap_tol
                ):
                    return True
        return (
            best_cert is not None
            and best_cert.residual <= opts.residual_tol
            and abs(best_cert.gap) <= opts.gap_tol
        )

    converged = False
    for beta in opts.beta_schedule:
        if engine.evals >= opts.eval_budget:
            break
        res = minimize(
            lambda xv: tuple(-t for t in engine.smoothed(xv, beta)),
            x,
            jac=True,
            method="BFGS",
            options={"maxiter": opts.stage_maxiter, "gtol": opts.stage_gtol},
        )
        x = res.x
        if beta >= opts.certificate_beta_min:
            if consider(x):
                converged = True
                break

    if not converged:
        # Level-style supergradient polish of the nonsmooth dual.
        x = best_x.copy() if np.isfinite(best_val) else x
        delta = 1e-6
        for it in range(opts.polish_steps):
            if engine.evals >= opts.eval_budget:
                break
            val, grad, _, _ = engine.exact(x, opts.degeneracy_tol)
            if val > best_val:
                best_val = val
                best_x = x.copy()
                best_cert = None
                delta = min(delta * 1.6, 1.0)
            else:
                delta = max(delta * 0.7, 1e-13)
            gnorm2 = float(grad @ grad)
            if gnorm2 < 1e-26:
                break
            step = (best_val + delta - val) / gnorm2
            step = min(step, 1e7 / np.sqrt(gnorm2))
            x = x + step * grad
            if (it + 1) % 25 == 0 and consider(best_x):
                converged = True
                break

    if best_cert is None:
        _, _, spectra, e0 = engine.exact(best_x, opts.degeneracy_tol)
        for tol in opts.certificate_ladder:
            cert = _certificate_from_spectra(
                basis, lam, target, spectra, e0, best_val, tol, opts.certificate_steps
            )
            if cert is not None and (
                best_cert is None
                or abs(cert.gap) + cert.residual
                < abs(best_cert.gap) + best_cert.residual
            ):
                best_cert = cert
    if best_cert is None:
        raise ValueError(f"ground space larger than {MAX_GROUND_DIM}")

    converged = (
        abs(best_cert.gap) <= opts.gap_tol and best_cert.residual <= opts.residual_tol
    )
    g_star = OneBodyOperator(engine.g_matrix(best_x))
    return BoundResult(
        value=best_val,
        optimal_potential=g_star,
        duality_gap=best_cert.gap,
        primal_ensemble=best_cert.ensemble,
        iterations=engine.evals,
        converged=converged,
        residual=best_cert.residual,
        dual_value=best_val,
        primal_value=best_cert.primal_value,
    )


def lower_bound(
    gamma,
    spec: SystemSpec,
    opts: BoundOptions | None = None,
    *,
    basis: ManyBodyBasis | None = None,
) -> BoundResult:
    """Certified lower bound of the interaction-energy functional at gamma."""
    gm = gamma if isinstance(gamma, OneRDM) else OneRDM.from_matrix(gamma)
    verdict = coleman_check(gm, spec.n_electrons)
    if not verdict.ok:
        raise InadmissibleGammaError(verdict.message)
    return maximize_dual(1.0, gm, spec, opts, basis=basis)


def upper_bound(
    gamma,
    spec: SystemSpec,
    opts: BoundOptions | None = None,
    *,
    basis: ManyBodyBasis | None = None,
) -> BoundResult:
    """Certified upper bound of the interaction-energy functional at gamma."""
    gm = gamma if isinstance(gamma, OneRDM) else OneRDM.from_matrix(gamma)
    verdict = coleman_check(gm, spec.n_electrons)
    if not verdict.ok:
        raise InadmissibleGammaError(verdict.message)
    res = maximize_dual(-1.0, gm, spec, opts, basis=basis)
    return replace(
        res,
        value=-res.value,
        duality_gap=res.duality_gap,
    )


# ---------------------------------------------------------------------------
# Independent brute-force primal route


def primal_oracle(
    gamma,
    lam: float,
    spec: SystemSpec,
    restarts: int = 50,
    seed: int = 0,
    *,
    basis: ManyBodyBasis | None = None,
    al_rounds: int = 16,
    inner_maxiter: int = 400,
    feasible_tol: float = 1e-7,
    infeasible_tol: float = 1e-5,
    max_escapes: int = 6,
    certify_tol: float = 1e-7,
) -> float:
    """Brute-force min of lam * Tr[V Gamma] over N-electron states with 1-RDM gamma.

    Factorizes Gamma = L L^T / Tr(L L^T) over the direct sum of
    sectors and enforces the partial-trace constraint with an
    augmented Lagrangian.  The factorization can stall at rank-deficient
    points whose effective Hamiltonian lift(mu) + lam*V still has an
    eigenvector below the incumbent energy; mixing that eigenvector in
    and re-solving escapes the trap, and once the spectral gap
    eta - eigmin (the exact duality gap of the convex program under the
    multiplier estimate mu) falls below certify_tol the restart loop
    stops early with a globally optimal value.  Intentionally
    independent of the dual machinery.
    """
    if basis is None:
        basis = ManyBodyBasis.from_spec(spec)
    for d in basis.dims:
        if d > MAX_GROUND_DIM:
            raise ValueError(f"sector dimension {d} too large for the oracle")
    target = gamma.matrix if isinstance(gamma, OneRDM) else np.asarray(gamma, dtype=float)
    m = basis.m_spatial
    dims = basis.dims
    d_tot = basis.total_dim
    slices = []
    offset = 0
    for d in dims:
        slices.append(slice(offset, offset + d))
        offset += d
    stacks = [basis.excitation_stack(k) for k in range(len(dims))]
    v_blocks = basis.v_blocks

    def gamma_of(gam_blocks):
        out = np.zeros((m, m))
        for st, gb in zip(stacks, gam_blocks):
            out += np.einsum("pqij,ji->pq", st, gb)
        return 0.5 * (out + out.T)

    def lift(w):
        return [np.einsum("pq,pqij->ij", w, st) for st in stacks]

    def value_of(gam_blocks) -> float:
        return lam * sum(float(np.sum(vb * gb)) for vb, gb in zip(v_blocks, gam_blocks))

    def merit(lmat, mu, c):
        def fun(xflat):
            lm = xflat.reshape(d_tot, d_tot)
            a = lm @ lm.T
            s = float(np.trace(a))
            gam = a / s
            gam_blocks = [gam[sl, sl] for sl in slices]
            r = gamma_of(gam_blocks) - target
            w = mu + c * r
            val = value_of(gam_blocks) + float(np.sum(mu * r)) + 0.5 * c * float(
                np.sum(r * r)
            )
            m_blocks = lift(w)
            for k, vb in enumerate(v_blocks):
                m_blocks[k] = m_blocks[k] + lam * vb
            ml = np.zeros_like(lm)
            tr_mg = 0.0
            for sl, mb in zip(slices, m_blocks):
                ml[sl] = mb @ lm[sl]
                tr_mg += float(np.sum(mb * gam[sl, sl]))
            grad = (2.0 / s) * (ml - tr_mg * lm)
            return val, grad.ravel()

        return minimize(
            fun,
            lmat.ravel(),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": inner_maxiter, "ftol": 1e-18, "gtol": 1e-13},
        )

    def restore(lmat):
        # Pure least squares on the partial-trace residual; recovers exact
        # feasibility when the augmented rounds stall near the target.
        def fun(xflat):
            lm = xflat.reshape(d_tot, d_tot)
            a = lm @ lm.T
            s = float(np.trace(a))
            gam = a / s
            r = gamma_of([gam[sl, sl] for sl in slices]) - target
            ml = np.zeros_like(lm)
            tr_mg = 0.0
            for sl, mb in zip(slices, lift(r)):
                ml[sl] = mb @ lm[sl]
                tr_mg += float(np.sum(mb * gam[sl, sl]))
            grad = (2.0 / s) * (ml - tr_mg * lm)
            return 0.5 * float(np.sum(r * r)), grad.ravel()

        res = minimize(
            fun,
            lmat.ravel(),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": 2000, "ftol": 1e-20, "gtol": 1e-16},
        )
        return res.x.reshape(d_tot, d_tot)

    def al_chain(lmat, mu, rounds):
        lmat = lmat / np.sqrt(np.sum(lmat * lmat))
        c = 10.0
        prev_res = np.inf
        for _ in range(rounds):
            res = merit(lmat, mu, c)
            lmat = res.x.reshape(d_tot, d_tot)
            lmat /= np.sqrt(np.sum(lmat * lmat))
            a = lmat @ lmat.T
            gam = a / float(np.trace(a))
            r = gamma_of([gam[sl, sl] for sl in slices]) - target
            resid = float(np.linalg.norm(r))
            mu = mu + c * r
            if resid > 0.5 * prev_res:
                c = min(c * 5.0, 1e10)
            if resid < 1e-11:
                break
            prev_res = resid
        lmat = restore(lmat)
        a = lmat @ lmat.T
        gam = a / float(np.trace(a))
        gam_blocks = [gam[sl, sl] for sl in slices]
        resid = float(np.linalg.norm(gamma_of(gam_blocks) - target))
        return value_of(gam_blocks), resid, lmat, gam, mu

    def spectral_gap(gam, mu):
        # eta - eigmin of the multiplier Hamiltonian lift(mu) + lam*V;
        # positive gap means a descent eigenvector exists.
        eta = 0.0
        low = np.inf
        vec = None
        sector = 0
        for k, (sl, mb) in enumerate(zip(slices, lift(mu))):
            mb = mb + lam * v_blocks[k]
            eta += float(np.sum(mb * gam[sl, sl]))
            w, u = np.linalg.eigh(mb)
            if w[0] < low:
                low, vec, sector = float(w[0]), u[:, 0], k
        return eta - low, vec, sector

    def mix_in(lmat, vec, sector, eps):
        out = np.sqrt(1.0 - eps) * lmat
        col = np.zeros(d_tot)
        col[slices[sector]] = vec
        j = int(np.argmin(np.sum(out * out, axis=0)))
        out[:, j] = np.sqrt(eps * np.sum(lmat * lmat)) * col
        return out

    init_scales = (0.1, 0.3, 1.0, 3.0)

    def solve_once(rng, idx) -> tuple[float, float, float]:
        l0 = rng.standard_normal((d_tot, d_tot)) * init_scales[idx % 4]
        val, resid, lmat, gam, mu = al_chain(l0, np.zeros((m, m)), al_rounds)
        gap, vec, sector = spectral_gap(gam, mu)
        for _ in range(max_escapes):
            if gap <= certify_tol * max(1.0, abs(val)):
                break
            cand = al_chain(
                mix_in(lmat, vec, sector, 0.02), mu, max(al_rounds // 2, 8)
            )
            gap2, vec2, sector2 = spectral_gap(cand[3], cand[4])
            improved = cand[0] < val - 1e-12 and cand[1] <= max(resid, feasible_tol)
            if improved or gap2 < 0.5 * gap:
                val, resid, lmat, gam, mu = cand
                gap, vec, sector = gap2, vec2, sector2
            else:
                break
        return val, resid, gap

    rng = np.random.default_rng(seed)
    best_val = np.inf
    best_resid = np.inf
    resid_floor = np.inf
    for k in range(restarts):
        val, resid, gap = solve_once(rng, k)
        resid_floor = min(resid_floor, resid)
        if resid <= feasible_tol and val < best_val:
            best_val, best_resid = val, resid
        if resid <= feasible_tol and gap <= certify_tol * max(1.0, abs(val)):
            break
    if not np.isfinite(best_val):
        if resid_floor > infeasible_tol:
            raise OracleInfeasibleError(
                f"1-RDM constraint residual floor {resid_floor:.3e} exceeds "
                f"{infeasible_tol:.0e}; target is likely not reachable"
            )
        # Near-feasible only: fall back to the best residual's value.
        rng = np.random.default_rng(seed)
        best_val = np.inf
        for k in range(restarts):
            val, resid, _ = solve_once(rng, k)
            if resid <= max(2.0 * resid_floor, feasible_tol) and val < best_val:
                best_val = val
    return float(best_val)
