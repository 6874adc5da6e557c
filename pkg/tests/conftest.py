import numpy as np
import pytest

from decorr import backend

# N = 25, M = 2 example sequences used throughout the tests
WORKED_S = [int(x) for x in "2 1 2 2 2 1 1 1 1 2 1 2 1 1 2 2 2 2 1 1 2 1 2 1 1".split()]
WORKED_Q = [int(x) for x in "1 1 1 2 1 1 1 1 2 1 2 1 1 2 2 1 1 1 1 2 2 1 2 1 2".split()]
WORKED_B1 = [int(x) for x in "0 1 0 0 0 1 1 1 1 0 1 0 1 1 0 0 0 0 1 1 0 1 0 1 1".split()]
WORKED_C1 = [int(x) for x in "1 1 1 0 1 1 1 1 0 1 0 1 1 0 0 1 1 1 1 0 0 1 0 1 0".split()]


def brute_matches(s, q):
    """Match count at every displacement by direct comparison (no channels, no FFT)."""
    s, q = np.asarray(s), np.asarray(q)
    Ns, Nq = s.size, q.size
    out = []
    for p in range(-(Ns - 1), Nq):
        lo, hi = max(0, -p), min(Ns, Nq - p)
        out.append(int(np.count_nonzero(s[lo:hi] == q[lo + p:hi + p])))
    return np.array(out)


def brute_products(a, b):
    """sum_i a[i] * b[i + p] for every displacement, plain Python loops."""
    a, b = list(a), list(b)
    out = []
    for p in range(-(len(a) - 1), len(b)):
        out.append(sum(a[i] * b[i + p] for i in range(len(a)) if 0 <= i + p < len(b)))
    return out


@pytest.fixture(params=backend.available())
def backend_name(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
