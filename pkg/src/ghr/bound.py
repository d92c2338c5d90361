"""Generalized Heisenberg bound from even central moments.

For odd ``k`` the correction terms are ``mu_2 U_k**2 / N_k`` where

* ``D_{2n}`` is the determinant with entries ``mu_{2n - 2i - 2j}``,
* ``N_n = D_{2n} / D_{2n-4}`` (with ``D_{-2} = 1``),
* ``F_{n,k}`` is the projection coefficient of the n-th trajectory derivative
  on the k-th orthogonalized one,
* ``U_n = (-1)**m n mu_{n-1} - sum_k F_{n,k} U_k`` with ``m = (n-1)/2`` and
  ``U_1 = 1``.

``DT**2 DH**2 >= (1/4) sum_k mu_2 U_k**2 / N_k``; the k = 1 term is the
Heisenberg floor.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import linalg
from .errors import DegenerateDenominator, InsufficientMoments
from .moments import MomentSequence
from .scalar import sign_power

# real-backend degeneracy threshold: N_k / mu_2k and |U_k| / (k mu_(k-1))
DEGENERACY_EPS = 1e-10


class Status(str, enum.Enum):
    REGULAR = "Regular"
    TRUNCATED = "Truncated"
    DIVERGENT = "Divergent"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BoundTerm:
    """One odd-order term; ``U`` and ``N`` are in the input's energy units."""

    k: int
    U: object
    N: object
    value: object
    status: Status
    cond: Optional[float] = None


@dataclass(frozen=True)
class BoundSeries:
    terms: tuple
    partial_sums: tuple
    bound: object
    degeneracy: Optional[str] = None
    variance_zero: bool = False

    @property
    def divergent(self) -> bool:
        return any(t.status is Status.DIVERGENT for t in self.terms)

    @property
    def undefined(self) -> bool:
        return self.bound is None

    def values(self) -> list:
        return [t.value for t in self.terms]


def _check_odd(n: int, name: str = "n"):
    if n < 1 or n % 2 == 0:
        raise ValueError(f"{name} must be a positive odd integer, got {n}")


def _need(mu: MomentSequence, order: int, what: str):
    if mu.order < order:
        raise InsufficientMoments(f"{what} needs moments through mu_{order}, have mu_{mu.order}")


def max_k(mu: MomentSequence) -> int:
    """Largest odd k whose term is computable from ``mu`` (0 if none)."""
    k = mu.order // 2
    if k % 2 == 0:
        k -= 1
    return max(k, 0)


def d_matrix(mu: MomentSequence, n: int) -> list:
    m = (n - 1) // 2
    return [[mu[2 * n - 2 * i - 2 * j] for j in range(m + 1)] for i in range(m + 1)]


def f_matrix(mu: MomentSequence, n: int, k: int) -> list:
    """D_{2k}'s matrix with its first row replaced by mu_{n+k}, mu_{n+k-2}, ..., mu_{n+1}."""
    rows = d_matrix(mu, k)
    rows[0] = [mu[n + k - 2 * j] for j in range((k + 1) // 2)]
    return rows


class _Evaluator:
    """Per-call memo of D, F and U for one moment sequence."""

    def __init__(self, mu: MomentSequence):
        self.mu = mu
        self.exact = mu.exact
        self._d = {}
        self._u = {1: Fraction(1) if self.exact else 1.0}

    def one(self):
        return Fraction(1) if self.exact else 1.0

    def D(self, n: int):
        if n == -1:
            return self.one()
        if n not in self._d:
            _need(self.mu, 2 * n, f"D_{2 * n}")
            self._d[n] = linalg.det(d_matrix(self.mu, n), self.exact)
        return self._d[n]

    def N(self, n: int):
        den = self.D(n - 2)
        if den == 0:
            raise DegenerateDenominator(f"D_{2 * n - 4} vanishes")
        return self.D(n) / den

    def F(self, n: int, k: int):
        _need(self.mu, n + k, f"F_({n},{k})")
        den = self.D(k)
        if den == 0:
            raise DegenerateDenominator(f"D_{2 * k} vanishes")
        s = sign_power((n + k) // 2 - 1)
        return s * linalg.det(f_matrix(self.mu, n, k), self.exact) / den

    def U(self, n: int):
        if n in self._u:
            return self._u[n]
        _need(self.mu, max(n - 1, 2 * n - 2), f"U_{n}")
        m = (n - 1) // 2
        u = sign_power(m) * n * self.mu[n - 1]
        for k in range(1, n - 1, 2):
            u -= self.F(n, k) * self.U(k)
        self._u[n] = u
        return u


def hankel_determinant(mu: MomentSequence, n: int):
    """D_{2n}; ``n = -1`` gives the base case 1."""
    if n == -1:
        return Fraction(1) if mu.exact else 1.0
    _check_odd(n)
    return _Evaluator(mu).D(n)


def orthogonal_norm(mu: MomentSequence, n: int):
    """N_n = D_{2n} / D_{2n-4}, the squared norm of the n-th orthogonal vector."""
    _check_odd(n)
    _need(mu, 2 * n, f"N_{n}")
    return _Evaluator(mu).N(n)


def projection_coefficient(mu: MomentSequence, n: int, k: int):
    """F_{n,k} from the bordered determinant, for odd k < n."""
    _check_odd(n)
    _check_odd(k, "k")
    if k >= n:
        raise ValueError(f"k must be less than n, got n={n}, k={k}")
    return _Evaluator(mu).F(n, k)


def numerator_U(mu: MomentSequence, n: int):
    """U_n by the downward recursion from U_1 = 1."""
    _check_odd(n)
    return _Evaluator(mu).U(n)


def _vanishes(x, scale, exact: bool) -> bool:
    """Exact zero, or |x| small against ``scale`` on the real backend."""
    if exact:
        return x == 0
    return abs(x) <= DEGENERACY_EPS * abs(scale)


def _term(ev: _Evaluator, k: int, unit: Optional[float], real_cond: bool) -> BoundTerm:
    """Term k from an evaluator on ``ev.mu``; ``unit`` rescales U and N back."""
    mu = ev.mu
    exact = ev.exact
    cond = None
    if real_cond:
        cond = linalg.condition_number(d_matrix(mu, k))
    if k == 1:
        return BoundTerm(1, ev.one(), _rescale(mu[2], unit, 2), ev.one(), Status.REGULAR, cond)
    if mu[2] == 0:
        zero = 0 * ev.one()
        return BoundTerm(k, zero, zero, zero, Status.TRUNCATED, cond)
    n_k = ev.N(k)
    u_k = ev.U(k)
    u_out = _rescale(u_k, unit, k - 1)
    n_out = _rescale(n_k, unit, 2 * k)
    # N_k / mu_2k is the squared sine between xi^(k) and the lower odd derivatives
    if _vanishes(n_k, mu[2 * k], exact):
        if _vanishes(u_k, k * mu[k - 1], exact):
            return BoundTerm(k, u_out, n_out, 0 * ev.one(), Status.TRUNCATED, cond)
        return BoundTerm(k, u_out, n_out, math.inf, Status.DIVERGENT, cond)
    return BoundTerm(k, u_out, n_out, mu[2] * u_k * u_k / n_k, Status.REGULAR, cond)


def _rescale(x, unit, power: int):
    if unit is None:
        return x
    return x * unit ** (power / 2)


def _prepare(mu: MomentSequence):
    """Evaluation copy and the variance needed to undo standardization."""
    if mu.exact:
        return mu, None
    std = mu.standardized()
    if mu.order >= 2 and mu[2] > 0:
        return std, float(mu[2])
    return std, None


def series_term(mu: MomentSequence, k: int) -> BoundTerm:
    """Term ``mu_2 U_k**2 / N_k`` with its degeneracy status."""
    _check_odd(k, "k")
    _need(mu, 2 * k, f"term {k}")
    work, unit = _prepare(mu)
    ev = _Evaluator(work)
    for j in range(1, k, 2):
        prior = _term(ev, j, unit, False)
        if prior.status is Status.TRUNCATED:
            return BoundTerm(k, None, None, 0 * ev.one(), Status.TRUNCATED)
        if prior.status is Status.DIVERGENT:
            return BoundTerm(k, None, None, math.inf, Status.DIVERGENT)
    return _term(ev, k, unit, not work.exact)


def bound_series(mu: MomentSequence, k_max: int) -> BoundSeries:
    """Terms k = 1, 3, ..., k_max and the bound on DT**2 DH**2.

    The series stops at the first Truncated or Divergent term. A Divergent
    term makes the bound infinite; zero variance leaves it undefined (None).
    """
    _check_odd(k_max, "k_max")
    _need(mu, 2 * k_max, f"series through k={k_max}")
    work, unit = _prepare(mu)
    ev = _Evaluator(work)
    terms, sums = [], []
    total = 0 * ev.one()
    note = None
    for k in range(1, k_max + 1, 2):
        term = _term(ev, k, unit, not work.exact)
        terms.append(term)
        if term.status is Status.REGULAR:
            total = total + term.value
            sums.append(total)
            continue
        if term.status is Status.DIVERGENT:
            sums.append(math.inf)
            note = f"N_{k} vanishes with U_{k} != 0: no finite-variance unbiased estimator"
        else:
            sums.append(total)
            note = f"N_{k} and U_{k} vanish: orthogonal frame exhausted at k={k}"
        break
    variance_zero = work[2] == 0
    if variance_zero:
        bound = None
        note = "variance mu_2 = 0: bound undefined" + (f"; {note}" if note else "")
    elif terms[-1].status is Status.DIVERGENT:
        bound = math.inf
    else:
        bound = total / 4
    return BoundSeries(tuple(terms), tuple(sums), bound, note, variance_zero)


def closed_form_term(mu: MomentSequence, k: int):
    """Closed-form k = 3 and k = 5 corrections, evaluated literally."""
    if k not in (3, 5):
        raise ValueError("closed forms exist only for k = 3 and k = 5")
    _need(mu, 2 * k, f"closed form k={k}")
    work = mu if mu.exact else mu.standardized()
    m2, m4, m6 = work[2], work[4], work[6]
    d6 = m6 * m2 - m4**2
    if d6 == 0:
        raise DegenerateDenominator("mu_6 mu_2 - mu_4**2 vanishes")
    if k == 3:
        return (m4 - 3 * m2**2) ** 2 / d6
    m8, m10 = work[8], work[10]
    den = (m10 * d6 + 2 * m8 * m6 * m4 - m8**2 * m2 - m6**3) * d6
    if den == 0:
        raise DegenerateDenominator("D_10 vanishes")
    return m2 * (m8 * (m4 - 3 * m2**2) + m6 * (8 * m4 * m2 - m6) - 5 * m4**3) ** 2 / den


def gamma_second_order(gamma_shape):
    """18 / (3 g**2 + 47 g + 42): the k = 3 term for a gamma law of shape g."""
    if not gamma_shape > 0:
        raise ValueError(f"gamma shape must be positive, got {gamma_shape}")
    if isinstance(gamma_shape, (int, Fraction)):
        g = Fraction(gamma_shape)
        return 18 / (3 * g**2 + 47 * g + 42)
    g = float(gamma_shape)
    return 18.0 / (3.0 * g * g + 47.0 * g + 42.0)
