"""Multi-indices in graded lexicographic order and Drury-Arveson monomial weights."""
from functools import lru_cache
import math


def graded_indices(n, max_degree):
    """All ``alpha`` in N^n with ``|alpha| <= max_degree``.

    Ordered by total degree; within a degree, lexicographically descending,
    so ``z_1`` precedes ``z_2`` and ``z_1^2 > z_1 z_2 > z_2^2``.
    """
    return list(_graded(n, max_degree))


@lru_cache(maxsize=None)
def _graded(n, max_degree):
    out = []
    for k in range(max_degree + 1):
        out.extend(_of_degree(n, k))
    return tuple(out)


def _of_degree(n, k):
    if n == 1:
        return [(k,)]
    out = []
    for first in range(k, -1, -1):
        out.extend((first,) + rest for rest in _of_degree(n - 1, k - first))
    return out


def multinomial(alpha):
    """``|alpha|! / alpha!`` as an exact integer (built multiplicatively)."""
    total, out = 0, 1
    for a in alpha:
        for i in range(1, a + 1):
            total += 1
            out = out * total // i
    return out


def weight(alpha):
    """``w_alpha = ||z^alpha|| = sqrt(alpha! / |alpha|!)`` in the Drury-Arveson norm."""
    return 1.0 / math.sqrt(multinomial(alpha))


def unit(n, j):
    return tuple(1 if i == j else 0 for i in range(n))


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def dominates(a, b):
    return all(x >= y for x, y in zip(a, b))
