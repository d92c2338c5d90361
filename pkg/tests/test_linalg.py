import itertools
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ghr import linalg


def leibniz(a):
    n = len(a)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = Fraction(1)
        for i, p in enumerate(perm):
            prod *= a[i][p]
        total += -prod if inv % 2 else prod
    return total


fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def square(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    return [[draw(fractions) for _ in range(n)] for _ in range(n)]


@given(square())
@settings(max_examples=150, deadline=None)
def test_bareiss_equals_permutation_expansion(a):
    assert linalg.bareiss_det(a) == leibniz(a)


def test_bareiss_zero_pivot_and_singular():
    assert linalg.bareiss_det([[0, 1], [1, 0]]) == -1
    assert linalg.bareiss_det([[0, 0, 1], [0, 2, 0], [3, 0, 0]]) == -6
    assert linalg.bareiss_det([[1, 2], [2, 4]]) == 0
    assert linalg.bareiss_det([]) == 1


@given(st.lists(fractions, min_size=1, max_size=4), st.integers(1, 4))
@settings(max_examples=100, deadline=None)
def test_psd_exact_on_gram_matrices(entries, extra):
    # a rank-one Gram matrix is PSD; lowering one diagonal entry of a rank-one
    # matrix with n >= 2 makes it indefinite
    b = [entries, [2 * x for x in entries]]
    n = len(entries)
    gram = [[sum(b[r][i] * b[r][j] for r in range(2)) for j in range(n)] for i in range(n)]
    assert linalg.psd_exact(gram)
    gram[0][0] -= Fraction(1, extra)
    if n >= 2 and any(entries[1:]):
        assert not linalg.psd_exact(gram)


def test_psd_real_threshold():
    ok, singular = linalg.psd_real([[1.0, 1.0], [1.0, 1.0]])
    assert ok and singular
    ok, singular = linalg.psd_real([[1.0, 2.0], [2.0, 1.0]])
    assert not ok
    ok, singular = linalg.psd_real(np.eye(3))
    assert ok and not singular
