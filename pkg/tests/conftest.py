import numpy as np
import pytest

from rdmbounds.integrals import builtin_model
from rdmbounds.manybody import ManyBodyBasis


@pytest.fixture(scope="session")
def hubbard():
    return builtin_model("hubbard_dimer")


@pytest.fixture(scope="session")
def model_a():
    return builtin_model("model_a")


@pytest.fixture(scope="session")
def hubbard_basis(hubbard):
    return ManyBodyBasis.from_spec(hubbard)


@pytest.fixture(scope="session")
def model_a_basis(model_a):
    return ManyBodyBasis.from_spec(model_a)


def random_admissible_gamma(rng, m, n_electrons, margin=0.05):
    """Random symmetric gamma with occupations in [margin, 2 - margin]."""
    occ = rng.uniform(margin, 2.0 - margin, size=m)
    occ *= n_electrons / occ.sum()
    while occ.max() > 2.0 - margin:
        occ = np.minimum(occ, 2.0 - margin)
        occ *= n_electrons / occ.sum()
    a = rng.standard_normal((m, m))
    q, _ = np.linalg.qr(a)
    return q @ np.diag(occ) @ q.T
