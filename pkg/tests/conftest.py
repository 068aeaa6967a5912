import os

import numpy as np
import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("HELMRES_RUN_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="desk-scale run; set HELMRES_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240815)


def random_sparse(rng, n, density=0.2, diag_boost=0.0):
    """Random complex sparse test matrix with guaranteed stored diagonal."""
    import scipy.sparse as sp

    from helmres.linalg import SparseMatrix

    mask = rng.random((n, n)) < density
    a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * mask
    a += np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n)
                 + diag_boost)
    return SparseMatrix.from_scipy(sp.csr_matrix(a))
