"""Central moments and cumulants of the conjugate-variable distribution.

Moment sequences are the universal input of the bound engine. They are built
from a handful of distribution families, from discrete spectra, or supplied
directly, and live on either the exact (``Fraction``) or the real (float)
backend.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels, linalg
from .errors import InsufficientOrder, InvalidMoments, InvalidSpec
from .scalar import coerce

# spectrum probabilities must sum to one within this on the real backend
PROB_SUM_TOL = 1e-12
# |mu_0 - 1| and |mu_1| / sqrt(mu_2) allowance on the real backend
_REAL_LOCATION_TOL = 1e-10


@dataclass(frozen=True)
class MomentSequence:
    """Central moments ``mu[0..order]``; ``mu[n]`` has units energy**n."""

    mu: tuple

    def __post_init__(self):
        if len(self.mu) < 1:
            raise InvalidMoments("a moment sequence needs at least mu_0")

    @classmethod
    def of(cls, values: Sequence, backend: Optional[str] = None) -> "MomentSequence":
        mu, _ = coerce(values, backend)
        return cls(mu)

    @property
    def order(self) -> int:
        return len(self.mu) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.mu)

    def __getitem__(self, n):
        return self.mu[n]

    def __len__(self) -> int:
        return len(self.mu)

    def truncated(self, order: int) -> "MomentSequence":
        if order > self.order:
            raise InsufficientOrder(f"requested order {order} exceeds available {self.order}")
        return MomentSequence(self.mu[: order + 1])

    def scaled(self, c) -> "MomentSequence":
        """Moments of ``c * X``: ``mu[n] -> c**n mu[n]``."""
        if self.exact and isinstance(c, (int, Fraction)):
            c = Fraction(c)
            return MomentSequence(tuple(m * c**n for n, m in enumerate(self.mu)))
        c = float(c)
        return MomentSequence(tuple(float(m) * c**n for n, m in enumerate(self.mu)))

    def as_real(self) -> "MomentSequence":
        return MomentSequence(tuple(float(x) for x in self.mu))

    def standardized(self) -> "MomentSequence":
        """Real-backend copy rescaled to unit variance (identity if mu_2 <= 0)."""
        real = self.as_real()
        if real.order < 2 or not real.mu[2] > 0:
            return real
        return real.scaled(1.0 / math.sqrt(real.mu[2]))


@dataclass(frozen=True)
class CumulantSequence:
    """Cumulants ``kappa_1..kappa_R``; ``kappa[r - 1]`` holds kappa_r."""

    kappa: tuple

    @classmethod
    def of(cls, values: Sequence, backend: Optional[str] = None) -> "CumulantSequence":
        kappa, _ = coerce(values, backend)
        return cls(kappa)

    @property
    def order(self) -> int:
        return len(self.kappa)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.kappa)

    def cumulant(self, r: int):
        return self.kappa[r - 1]


# ---------------------------------------------------------------------------
# distribution specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gamma:
    shape: Union[Fraction, float]
    rate: Union[Fraction, float] = Fraction(1)


@dataclass(frozen=True)
class Exponential:
    rate: Union[Fraction, float] = Fraction(1)


@dataclass(frozen=True)
class Gaussian:
    variance: Union[Fraction, float] = Fraction(1)


@dataclass(frozen=True)
class Spectrum:
    """Discrete distribution: ``levels`` is a sequence of (eigenvalue, probability)."""

    levels: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class ExplicitMoments:
    moments: MomentSequence


@dataclass(frozen=True)
class ExplicitCumulants:
    cumulants: CumulantSequence


DistributionSpec = Union[Gamma, Exponential, Gaussian, Spectrum, ExplicitMoments, ExplicitCumulants]


# ---------------------------------------------------------------------------
# conversions
# ---------------------------------------------------------------------------

def cumulants_to_central(kappa: CumulantSequence, target_order: int) -> MomentSequence:
    """Central moments from cumulants via the set-partition recursion.

    ``mu_n = sum_j C(n-1, j-1) kappa_j mu_{n-j}`` with kappa_1 dropped, so the
    result is centred whatever kappa_1 is.
    """
    if target_order > kappa.order:
        raise InsufficientOrder(
            f"target order {target_order} exceeds cumulant order {kappa.order}"
        )
    if kappa.exact:
        k = (Fraction(0), Fraction(0)) + tuple(kappa.kappa[1:target_order])
        mu = [Fraction(1)]
        for n in range(1, target_order + 1):
            mu.append(sum((comb(n - 1, j - 1) * k[j] * mu[n - j] for j in range(2, n + 1)), Fraction(0)))
        return MomentSequence(tuple(mu))
    k = np.zeros(target_order + 1)
    k[2:] = [float(x) for x in kappa.kappa[1:target_order]]
    mu = _kernels.cumulants_to_central(k, target_order)
    return MomentSequence(tuple(float(x) for x in mu))


def central_to_cumulants(mu: MomentSequence, target_order: Optional[int] = None) -> CumulantSequence:
    """Inverse of :func:`cumulants_to_central`; kappa_1 is always zero."""
    if target_order is None:
        target_order = mu.order
    if target_order > mu.order:
        raise InsufficientOrder(f"target order {target_order} exceeds moment order {mu.order}")
    report = validate(mu)
    if not report.valid:
        raise InvalidMoments("invalid moment sequence: " + "; ".join(report.reasons))
    zero = Fraction(0) if mu.exact else 0.0
    k = [zero, zero]  # index 0 unused, kappa_1 = 0
    for n in range(2, target_order + 1):
        s = mu[n]
        for j in range(2, n):
            s -= comb(n - 1, j - 1) * k[j] * mu[n - j]
        k.append(s)
    return CumulantSequence(tuple(k[1 : target_order + 1]))


def raw_to_central(raw: Sequence) -> MomentSequence:
    """Binomial centring ``mu_n = sum_k C(n,k) m_k (-m_1)**(n-k)``."""
    raw, exact = coerce(raw)
    if raw[0] != 1:
        raise InvalidMoments("raw[0] must be 1")
    if len(raw) == 1:
        return MomentSequence(raw)
    mean = raw[1]
    mu = [sum(comb(n, k) * raw[k] * (-mean) ** (n - k) for k in range(n + 1)) for n in range(len(raw))]
    if exact:
        mu[1] = Fraction(0)
    else:
        mu[1] = 0.0
    return MomentSequence(tuple(mu))


def gamma_cumulants(shape, rate, order: int) -> CumulantSequence:
    """kappa_r = shape (r-1)! / rate**r."""
    return CumulantSequence(tuple(shape * factorial(r - 1) / rate**r for r in range(1, order + 1)))


def _positive(name, value):
    if not value > 0:
        raise InvalidSpec(f"{name} must be positive, got {value}")


def moments_of(spec: DistributionSpec, target_order: int) -> MomentSequence:
    """Central moments 0..target_order of a distribution spec."""
    if target_order < 0:
        raise InvalidSpec("target order must be nonnegative")
    if isinstance(spec, Exponential):
        spec = Gamma(Fraction(1) if isinstance(spec.rate, Fraction) else 1.0, spec.rate)
    if isinstance(spec, Gamma):
        _positive("gamma shape", spec.shape)
        _positive("gamma rate", spec.rate)
        order = max(target_order, 2)
        mu = cumulants_to_central(gamma_cumulants(spec.shape, spec.rate, order), order)
        return mu.truncated(target_order)
    if isinstance(spec, Gaussian):
        if spec.variance < 0:
            raise InvalidSpec(f"gaussian variance must be nonnegative, got {spec.variance}")
        zero = 0 * spec.variance
        order = max(target_order, 2)
        kappa = CumulantSequence((zero, spec.variance) + (zero,) * (order - 2))
        return cumulants_to_central(kappa, order).truncated(target_order)
    if isinstance(spec, Spectrum):
        return _spectrum_moments(spec, target_order)
    if isinstance(spec, ExplicitMoments):
        return spec.moments.truncated(target_order)
    if isinstance(spec, ExplicitCumulants):
        return cumulants_to_central(spec.cumulants, target_order)
    raise InvalidSpec(f"unknown distribution spec {spec!r}")


def _spectrum_moments(spec: Spectrum, target_order: int) -> MomentSequence:
    if not spec.levels:
        raise InvalidSpec("spectrum has no levels")
    values, exact = coerce([x for level in spec.levels for x in level])
    levels, probs = values[0::2], values[1::2]
    if any(p < 0 for p in probs):
        raise InvalidSpec("spectrum probabilities must be nonnegative")
    total = sum(probs)
    if exact:
        if total != 1:
            raise InvalidSpec(f"spectrum probabilities sum to {total}, not 1")
        mean = sum(p * e for e, p in zip(levels, probs))
        dev = [e - mean for e in levels]
        mu = [sum(p * d**n for d, p in zip(dev, probs)) for n in range(target_order + 1)]
        return MomentSequence(tuple(mu))
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise InvalidSpec(f"spectrum probabilities sum to {total!r}, not 1")
    _, mu = _kernels.spectral_moments(np.array(levels), np.array(probs), target_order)
    mu = [float(x) for x in mu]
    if target_order >= 1:
        mu[1] = 0.0
    return MomentSequence(tuple(mu))


# ---------------------------------------------------------------------------
# validity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValidityReport:
    """Outcome of :func:`validate`.

    ``minors[m]`` is ``det H^(m)`` for the odd-index Hankel matrix
    ``H^(m)[a][b] = mu[2a+2b+2]``; it equals the bound engine's D_{2(2m+1)}.
    ``rank_deficient[m]`` marks a singular ``H^(m)`` (finite support).
    """

    valid: bool
    minors: tuple
    rank_deficient: tuple
    reasons: tuple = ()

    @property
    def first_deficiency(self) -> Optional[int]:
        return next((m for m, flag in enumerate(self.rank_deficient) if flag), None)


def odd_hankel(mu: MomentSequence, m: int) -> list:
    """``H^(m)[a][b] = mu[2a+2b+2]`` for a, b = 0..m."""
    return [[mu[2 * a + 2 * b + 2] for b in range(m + 1)] for a in range(m + 1)]


def _hamburger(mu: MomentSequence) -> list:
    h = mu.order // 2
    return [[mu[i + j] for j in range(h + 1)] for i in range(h + 1)]


def validate(mu: MomentSequence) -> ValidityReport:
    """Check that ``mu`` can be the central moments of a distribution.

    The odd-index Hankel matrices ``H^(m)`` must be positive semidefinite for
    every ``m`` with ``4m + 2 <= order``; so must the full Hankel matrix
    ``[mu_{i+j}]``, which additionally enforces inequalities such as
    ``mu_4 >= mu_2**2``.
    """
    reasons = []
    exact = mu.exact
    if mu.order < 2:
        return ValidityReport(False, (), (), ("need moments through mu_2",))
    work = mu if exact else mu.standardized()
    if exact:
        if mu[0] != 1:
            reasons.append("mu_0 != 1")
        if mu[1] != 0:
            reasons.append("mu_1 != 0")
    else:
        if not all(math.isfinite(x) for x in work.mu):
            reasons.append("non-finite moment")
        if abs(work[0] - 1.0) > _REAL_LOCATION_TOL:
            reasons.append("mu_0 != 1")
        if abs(work[1]) > _REAL_LOCATION_TOL:
            reasons.append("mu_1 != 0")
    for n in range(2, mu.order + 1, 2):
        if mu[n] < 0:
            reasons.append(f"mu_{n} < 0")

    max_m = (mu.order - 2) // 4
    minors, deficient = [], []
    for m in range(max_m + 1):
        hm = odd_hankel(work, m)
        minors.append(linalg.det(odd_hankel(mu, m), exact))
        if exact:
            ok = linalg.psd_exact(hm)
            singular = minors[-1] == 0
        else:
            ok, singular = linalg.psd_real(hm)
        if not ok:
            reasons.append(f"H^({m}) is not positive semidefinite")
        deficient.append(singular)
    if not reasons:
        full = _hamburger(work)
        ok = linalg.psd_exact(full) if exact else linalg.psd_real(full)[0]
        if not ok:
            reasons.append("moment Hankel matrix [mu_(i+j)] is not positive semidefinite")
    return ValidityReport(not reasons, tuple(minors), tuple(deficient), tuple(reasons))
