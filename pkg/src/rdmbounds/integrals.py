"""Integral containers, FCIDUMP round trip, and the bundled two-orbital models.

Two-electron integrals use chemists' notation (pq|rs) over real
orbitals and are stored once per 8-fold-symmetric equivalence class,
so the permutation symmetry holds exactly by construction.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field

import numpy as np


class FcidumpError(ValueError):
    """Malformed FCIDUMP content; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(eq=False)
class OneBodyOperator:
    """Real symmetric one-electron operator over spatial orbitals."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"one-body matrix must be square, got shape {m.shape}")
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12):
            raise ValueError("one-body matrix must be symmetric to 1e-12")
        self.matrix = 0.5 * (m + m.T)

    @property
    def m_spatial(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def zeros(cls, m_spatial: int) -> "OneBodyOperator":
        return cls(np.zeros((m_spatial, m_spatial)))


def _canonical(p: int, q: int, r: int, s: int) -> tuple[int, int, int, int]:
    """Canonical representative of the 8-fold class of (pq|rs)."""
    ij = (p, q) if p >= q else (q, p)
    kl = (r, s) if r >= s else (s, r)
    if ij < kl:
        ij, kl = kl, ij
    return (*ij, *kl)


class TwoBodyIntegrals:
    """Chemists'-notation (pq|rs) integrals on canonical 8-fold keys."""

    def __init__(self, m_spatial: int):
        if m_spatial < 1:
            raise ValueError("m_spatial must be positive")
        self.m_spatial = m_spatial
        self._data: dict[tuple[int, int, int, int], float] = {}
        self._dense: np.ndarray | None = None

    def _check_index(self, *idx: int):
        for i in idx:
            if not 0 <= i < self.m_spatial:
                raise IndexError(f"orbital index {i} outside 0..{self.m_spatial - 1}")

    def set(self, p: int, q: int, r: int, s: int, value: float):
        """Store (pq|rs); later writes to the same class overwrite."""
        self._check_index(p, q, r, s)
        self._data[_canonical(p, q, r, s)] = float(value)
        self._dense = None

    def get(self, p: int, q: int, r: int, s: int) -> float:
        self._check_index(p, q, r, s)
        return self._data.get(_canonical(p, q, r, s), 0.0)

    def items(self):
        """Stored canonical entries, deterministically ordered."""
        return sorted(self._data.items())

    def dense(self) -> np.ndarray:
        """Full (m,m,m,m) tensor with T[p,q,r,s] = (pq|rs)."""
        if self._dense is None:
            m = self.m_spatial
            t = np.zeros((m, m, m, m))
            for (p, q, r, s), val in self._data.items():
                for a, b in ((p, q), (q, p)):
                    for c, d in ((r, s), (s, r)):
                        t[a, b, c, d] = val
                        t[c, d, a, b] = val
            self._dense = t
        return self._dense

    def rotated(self, u: np.ndarray) -> "TwoBodyIntegrals":
        """Integrals in the orbital basis |i> = sum_p u[p,i] |p>."""
        t = rotate_tensor(self.dense(), u)
        out = TwoBodyIntegrals(self.m_spatial)
        m = self.m_spatial
        for p in range(m):
            for q in range(p + 1):
                for r in range(p + 1):
                    smax = q if r == p else r
                    for s in range(smax + 1):
                        if t[p, q, r, s] != 0.0:
                            out.set(p, q, r, s, t[p, q, r, s])
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwoBodyIntegrals):
            return NotImplemented
        return self.m_spatial == other.m_spatial and np.array_equal(
            self.dense(), other.dense()
        )


def rotate_tensor(t: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Four-index transform of a chemists' tensor by orbital rotation u."""
    t = np.einsum("pqrs,pi->iqrs", t, u)
    t = np.einsum("iqrs,qj->ijrs", t, u)
    t = np.einsum("ijrs,rk->ijks", t, u)
    return np.einsum("ijks,sl->ijkl", t, u)


@dataclass(eq=False)
class SystemSpec:
    """A finite interacting problem: orbital count, electron count, h, V."""

    m_spatial: int
    n_electrons: int
    h: OneBodyOperator
    v: TwoBodyIntegrals
    core_energy: float = 0.0

    def __post_init__(self):
        if self.n_electrons < 1 or self.n_electrons > 2 * self.m_spatial:
            raise ValueError(
                f"n_electrons={self.n_electrons} outside 1..{2 * self.m_spatial}"
            )
        if self.h.m_spatial != self.m_spatial or self.v.m_spatial != self.m_spatial:
            raise ValueError("h/v orbital dimensions disagree with m_spatial")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SystemSpec):
            return NotImplemented
        return (
            self.m_spatial == other.m_spatial
            and self.n_electrons == other.n_electrons
            and np.array_equal(self.h.matrix, other.h.matrix)
            and self.v == other.v
            and self.core_energy == other.core_energy
        )


def rotate_system(spec: SystemSpec, u: np.ndarray) -> SystemSpec:
    """The same system expressed in the rotated orbital basis u (orthogonal)."""
    u = np.asarray(u, dtype=float)
    if not np.allclose(u.T @ u, np.eye(spec.m_spatial), atol=1e-12):
        raise ValueError("rotation must be orthogonal")
    h2 = OneBodyOperator(u.T @ spec.h.matrix @ u)
    return SystemSpec(
        spec.m_spatial, spec.n_electrons, h2, spec.v.rotated(u), spec.core_energy
    )


# ---------------------------------------------------------------------------
# FCIDUMP


def read_fcidump(path) -> SystemSpec:
    """Parse an FCIDUMP file.

    Header fields other than NORB/NELEC/MS2 are accepted and ignored.
    Body lines are "value i j k l" with 1-based indices: all indices
    positive gives (ij|kl); k = l = 0 gives h_ij; all four zero gives
    the core energy.  Duplicate symmetry-equivalent entries overwrite.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()

    header_end = None
    header_text = []
    for ln, line in enumerate(lines):
        header_text.append(line)
        if "&END" in line.upper() or line.strip() == "/" or line.rstrip().endswith("/"):
            header_end = ln
            break
    if header_end is None:
        raise FcidumpError("missing &END/'/' header terminator")
    header = " ".join(header_text)
    if "&FCI" not in header.upper():
        raise FcidumpError("missing &FCI header", line=1)

    def field_int(name: str) -> int:
        match = re.search(rf"{name}\s*=\s*(-?\d+)", header, re.IGNORECASE)
        if match is None:
            raise FcidumpError(f"missing header field {name}", line=1)
        return int(match.group(1))

    norb = field_int("NORB")
    nelec = field_int("NELEC")
    field_int("MS2")  # accepted; sector search spans all spin projections

    h = np.zeros((norb, norb))
    v = TwoBodyIntegrals(norb)
    core = 0.0
    for ln in range(header_end + 1, len(lines)):
        raw = lines[ln].strip()
        if not raw:
            continue
        tokens = raw.split()
        if len(tokens) != 5:
            raise FcidumpError(f"expected 'value i j k l', got {raw!r}", line=ln + 1)
        try:
            value = float(tokens[0])
            i, j, k, l = (int(t) for t in tokens[1:])
        except ValueError as exc:
            raise FcidumpError(str(exc), line=ln + 1) from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise FcidumpError(f"orbital index {idx} outside 0..{norb}", line=ln + 1)
        if i > 0 and j > 0 and k > 0 and l > 0:
            v.set(i - 1, j - 1, k - 1, l - 1, value)
        elif i > 0 and j > 0 and k == 0 and l == 0:
            h[i - 1, j - 1] = value
            h[j - 1, i - 1] = value
        elif i == 0 and j == 0 and k == 0 and l == 0:
            core = value
        else:
            raise FcidumpError(f"unsupported index pattern {i} {j} {k} {l}", line=ln + 1)

    return SystemSpec(norb, nelec, OneBodyOperator(h), v, core)


def write_fcidump(spec: SystemSpec, path):
    """Write ``spec`` so that read_fcidump reproduces it exactly."""
    with open(path, "w") as fh:
        fh.write(f" &FCI NORB={spec.m_spatial},NELEC={spec.n_electrons},MS2=0,\n")
        fh.write(" &END\n")
        for (p, q, r, s), val in spec.v.items():
            if val != 0.0:
                fh.write(f"{float(val)!r} {p + 1} {q + 1} {r + 1} {s + 1}\n")
        h = spec.h.matrix
        for p in range(spec.m_spatial):
            for q in range(p + 1):
                if h[p, q] != 0.0:
                    fh.write(f"{float(h[p, q])!r} {p + 1} {q + 1} 0 0\n")
        fh.write(f"{float(spec.core_energy)!r} 0 0 0 0\n")


# ---------------------------------------------------------------------------
# Bundled models


def pair_matrix_min_eig(v: TwoBodyIntegrals) -> float:
    """Smallest eigenvalue of the (pq),(rs) pair-index integral matrix."""
    m = v.m_spatial
    return float(np.linalg.eigvalsh(v.dense().reshape(m * m, m * m))[0])


_MODEL_DEFAULTS = {
    "hubbard_dimer": {"t": 1.0, "u": 4.0},
    "model_a": {"j11": 1.0, "j22": 1.0, "j12": 0.9, "k12": 0.1},
}


def builtin_model(name: str, **params) -> SystemSpec:
    """Construct a bundled two-orbital, two-electron model.

    hubbard_dimer(t, U): hopping -t between two sites with on-site U.
    model_a(J11, J22, J12, K12): zero one-body part with Coulomb-like
    diagonal integrals and one exchange coupling.
    """
    key = name.lower()
    if key not in _MODEL_DEFAULTS:
        known = ", ".join(sorted(_MODEL_DEFAULTS))
        raise ValueError(f"unknown model {name!r}; known models: {known}")
    values = dict(_MODEL_DEFAULTS[key])
    for k, val in params.items():
        lk = k.lower()
        if lk not in values:
            raise ValueError(f"unknown parameter {k!r} for model {name!r}")
        values[lk] = float(val)

    v = TwoBodyIntegrals(2)
    if key == "hubbard_dimer":
        t, u = values["t"], values["u"]
        h = OneBodyOperator(np.array([[0.0, -t], [-t, 0.0]]))
        v.set(0, 0, 0, 0, u)
        v.set(1, 1, 1, 1, u)
    else:
        h = OneBodyOperator.zeros(2)
        v.set(0, 0, 0, 0, values["j11"])
        v.set(1, 1, 1, 1, values["j22"])
        v.set(0, 0, 1, 1, values["j12"])
        v.set(0, 1, 0, 1, values["k12"])

    if pair_matrix_min_eig(v) < -1e-10:
        warnings.warn(
            f"model {name!r}: pair-index integral matrix is not PSD; "
            "parameters are outside the physical regime",
            stacklevel=2,
        )
    return SystemSpec(2, 2, h, v)
