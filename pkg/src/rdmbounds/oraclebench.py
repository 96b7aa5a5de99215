"""Brute-force extremes of the pair energy at fixed diagonal 1-RDM.

Restricted to two electrons in two spatial orbitals, where every
state decomposes over six determinants.  For interactions that do
not couple the doubly-occupied pair to the open-shell pair (true of
both bundled models) the extreme values at gamma = diag(n, 2-n) are
attained within four families:

  paired      c|11> + s|22>           occupation axis x = 2c^2
  open-shell  cos(phi)|1a2b> + sin(phi)|1b2a>   x = 1
  triplet     |1a2a>, |1b2b>                    x = 1

plus two-state ensembles across them.  Per family the extreme pair
energy at fixed x is available in closed form, and the paired-family
extremes are convex (min side) resp. concave (max side) in x, so a
single mixing anchor at x = 1 exhausts the ensembles.  The grid is
used to bracket the anchored-mixture search before local refinement.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .integrals import SystemSpec
from .manybody import ManyBodyBasis


@dataclass(frozen=True)
class ExtremeSearchResult:
    """Extremes of the pair energy over states with 1-RDM diag(n, 2-n)."""

    min_value: float
    max_value: float
    min_attained_by: str
    max_attained_by: str

    def __post_init__(self):
        if self.min_value > self.max_value + 1e-12:
            raise ValueError("min exceeds max")


@dataclass(frozen=True)
class _Families:
    """Interaction matrix elements restricted to the state families."""

    v_pp: float  # <11|V|11>
    v_qq: float  # <22|V|22>
    v_pq: float  # <11|V|22>
    open_block: np.ndarray  # 2x2 block over |1a2b>, |1b2a>
    triplet: float

    def paired(self, x: float, sign: float) -> float:
        """Extreme pair energy of c|11> + s|22> at occupation x = 2c^2."""
        c2 = min(max(x / 2.0, 0.0), 1.0)
        s2 = 1.0 - c2
        cross = 2.0 * np.sqrt(c2 * s2) * abs(self.v_pq)
        return c2 * self.v_pp + s2 * self.v_qq + sign * cross

    def at_one(self, sign: float) -> tuple[float, str]:
        """Extreme pair energy among the x = 1 families."""
        w, u = np.linalg.eigh(self.open_block)
        if sign < 0:
            cand = [(w[0], _open_label(u[:, 0])), (self.triplet, "triplet")]
            return min(cand, key=lambda t: t[0])
        cand = [(w[-1], _open_label(u[:, -1])), (self.triplet, "triplet")]
        return max(cand, key=lambda t: t[0])


def _open_label(vec: np.ndarray) -> str:
    return f"open-shell({vec[0]:+.6f}|1a2b> {vec[1]:+.6f}|1b2a>)"


def _paired_label(x: float, sign: float, fam: _Families) -> str:
    c = np.sqrt(min(max(x / 2.0, 0.0), 1.0))
    s = np.sqrt(1.0 - c * c)
    if fam.v_pq != 0.0:
        s *= sign * np.sign(fam.v_pq)
    return f"paired({c:+.6f}|11> {s:+.6f}|22>)"


def _extract_families(spec: SystemSpec) -> _Families:
    basis = ManyBodyBasis.from_spec(spec)
    by_spin = {(s.n_alpha, s.n_beta): k for k, s in enumerate(basis.sectors)}
    k11 = by_spin[(1, 1)]
    sec = basis.sectors[k11]
    i_pp = sec.position(0b0011)
    i_qq = sec.position(0b1100)
    i_ab = sec.position(0b1001)
    i_ba = sec.position(0b0110)
    v = basis.v_blocks[k11]
    coupling = np.abs(v[np.ix_([i_pp, i_qq], [i_ab, i_ba])]).max()
    if coupling > 1e-12:
        warnings.warn(
            "interaction couples paired and open-shell determinants; "
            "family enumeration is an inner estimate only",
            stacklevel=3,
        )
    open_block = v[np.ix_([i_ab, i_ba], [i_ab, i_ba])]
    t_up = basis.v_blocks[by_spin[(2, 0)]][0, 0]
    t_dn = basis.v_blocks[by_spin[(0, 2)]][0, 0]
    if abs(t_up - t_dn) > 1e-10:
        raise ValueError("spin-asymmetric interaction block")
    return _Families(
        v_pp=float(v[i_pp, i_pp]),
        v_qq=float(v[i_qq, i_qq]),
        v_pq=float(v[i_pp, i_qq]),
        open_block=open_block,
        triplet=float(t_up),
    )


def _anchored_mixture(
    n: float, anchor_w: float, fam: _Families, sign: float, grid: int
) -> tuple[float, float, float]:
    """Best mixture of a paired state at x and the x = 1 anchor.

    Returns (value, x, weight_on_anchor).  The mixing weight follows
    from the occupation constraint p*1 + (1-p)*x = n.
    """
    lo, hi = (0.0, n) if n < 1.0 else (n, 2.0)

    def chord(x: float) -> float:
        p = (n - x) / (1.0 - x)
        return p * anchor_w + (1.0 - p) * fam.paired(x, sign)

    xs = np.linspace(lo, hi, max(grid, 3))
    vals = np.array([sign * chord(x) for x in xs])
    k = int(np.argmax(vals))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
    if a == b:
        x_best = a
    else:
        res = minimize_scalar(
            lambda x: -sign * chord(x),
            bounds=(a, b),
            method="bounded",
            options={"xatol": 1e-13},
        )
        x_best = float(res.x)
        if sign * chord(x_best) < vals[k]:
            x_best = float(xs[k])
    p = (n - x_best) / (1.0 - x_best)
    return chord(x_best), x_best, p


def enumerate_extremes(
    occupations, spec: SystemSpec, grid: int = 200
) -> ExtremeSearchResult:
    """Extreme pair energies over states whose 1-RDM is diag(n, 2-n).

    The 1-RDM is diagonal in the integral basis.  Requires two
    electrons in two spatial orbitals and grid >= 100 per continuous
    parameter; results are exact for the bundled models (the families
    above exhaust the sector) and refined beyond grid resolution by a
    bounded local search on the mixing parameter.
    """
    if spec.m_spatial != 2 or spec.n_electrons != 2:
        raise ValueError("extreme enumeration requires 2 electrons in 2 orbitals")
    if grid < 100:
        raise ValueError("grid must be at least 100 per continuous parameter")
    occ = np.asarray(occupations, dtype=float)
    if occ.shape != (2,):
        raise ValueError("occupations must be a pair (n, 2 - n)")
    if abs(occ.sum() - 2.0) > 1e-8:
        raise ValueError("occupations must sum to the electron count")
    n = float(occ[0])
    if not -1e-10 <= n <= 2.0 + 1e-10:
        raise ValueError("occupation outside [0, 2]")
    n = min(max(n, 0.0), 2.0)

    fam = _extract_families(spec)

    results = {}
    for sign, key in ((-1.0, "min"), (1.0, "max")):
        value = fam.paired(n, sign)
        label = _paired_label(n, sign, fam)
        anchor_w, anchor_label = fam.at_one(sign)
        if abs(n - 1.0) <= 1e-12:
            if sign * anchor_w > sign * value:
                value, label = anchor_w, anchor_label
        else:
            mix_val, x_mix, p = _anchored_mixture(n, anchor_w, fam, sign, grid)
            if sign * mix_val > sign * value + 1e-15:
                value = mix_val
                label = (
                    f"{p:.6f} * {anchor_label} + "
                    f"{1 - p:.6f} * {_paired_label(x_mix, sign, fam)}"
                )
        results[key] = (value, label)

    return ExtremeSearchResult(
        min_value=results["min"][0],
        max_value=results["max"][0],
        min_attained_by=results["min"][1],
        max_attained_by=results["max"][1],
    )
