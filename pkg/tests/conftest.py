import random
import sys
from fractions import Fraction
from math import comb, factorial

import pytest

from ghr import _kernels
from ghr.moments import MomentSequence, Spectrum, moments_of

# Exp(1) central moments, frozen from raw moments k! and binomial centring
EXP1_MU = (1, 0, 1, 2, 9, 44, 265, 1854, 14833, 133496, 1334961)


def exp1_moments(order=10):
    raw = [factorial(k) for k in range(order + 1)]
    mu = [sum(comb(n, k) * raw[k] * (-1) ** (n - k) for k in range(n + 1)) for n in range(order + 1)]
    return MomentSequence.of(mu)


def random_spectrum(rng, exact=True, lo=8, hi=16):
    """Random discrete law on 8-16 points with rational levels and weights."""
    size = rng.randint(lo, hi)
    levels = rng.sample(range(-40, 41), size)
    weights = [rng.randint(1, 9) for _ in range(size)]
    total = sum(weights)
    if exact:
        return Spectrum(tuple((Fraction(e, 4), Fraction(w, total)) for e, w in zip(levels, weights)))
    return Spectrum(tuple((e / 4, w / total) for e, w in zip(levels, weights)))


def random_moments(rng, order=10, exact=True):
    return moments_of(random_spectrum(rng, exact), order)


@pytest.fixture
def exp1():
    return exp1_moments()


@pytest.fixture
def rng():
    return random.Random(20240601)


def kernel_sets():
    sets = [_kernels.NUMPY]
    nb = _kernels.numba_kernels()
    if nb is not None:
        sets.append(nb)
    return sets


@pytest.fixture(params=kernel_sets(), ids=lambda k: k.name)
def kernels(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
