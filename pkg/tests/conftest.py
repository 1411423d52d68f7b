import json
from importlib import resources

import numpy as np
import pytest

from superpose.core import two_feature_pair


def loop_gram(B, A):
    """Scalar triple loop, the reference for ``gram``."""
    d, m = len(B), len(B[0])
    out = [[0.0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            s = 0.0
            for r in range(d):
                s += B[r][i] * A[r][j]
            out[i][j] = s
    return np.array(out)


def pair_scan_mu(C):
    """Largest off-diagonal magnitude by visiting every ordered pair."""
    m = len(C)
    best, arg = -1.0, None
    for i in range(m):
        for j in range(m):
            if i != j and abs(C[i][j]) > best:
                best, arg = abs(C[i][j]), (i, j)
    return best, arg


def load_schema(name):
    text = resources.files("superpose").joinpath("schemas", name).read_text()
    return json.loads(text)


@pytest.fixture
def pair2():
    return two_feature_pair()


@pytest.fixture
def data_dir():
    return resources.files("superpose").joinpath("data")
