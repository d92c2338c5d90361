"""Scalar backends.

Two number systems are used throughout: exact rationals (``Fraction``) and
binary64 floats. A sequence is exact when every entry is an ``int`` or a
``Fraction``; anything else puts it on the real backend.
"""
from __future__ import annotations

import math
import os
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Union

import numpy as np

Scalar = Union[Fraction, float]

EXACT = "exact"
REAL = "real"
BACKENDS = (EXACT, REAL)


def default_backend() -> Optional[str]:
    """Backend named by ``GHR_BACKEND``, or None for automatic selection."""
    value = os.environ.get("GHR_BACKEND", "").strip().lower()
    if not value or value == "auto":
        return None
    if value not in BACKENDS:
        raise ValueError(f"GHR_BACKEND must be 'exact' or 'real', got {value!r}")
    return value


def is_rational(x) -> bool:
    return isinstance(x, (Rational, np.integer)) and not isinstance(x, bool)


def parse_number(text: Union[str, int, float, Fraction], exact: bool):
    """Parse a literal such as ``"3"``, ``"7/2"`` or ``"0.5"``.

    With ``exact`` the literal is read as the rational it spells out
    (``"0.1"`` -> 1/10); otherwise a float is returned.
    """
    if isinstance(text, bool):
        raise ValueError(f"not a number: {text!r}")
    if exact:
        if isinstance(text, float):
            if not math.isfinite(text):
                raise ValueError(f"{text!r} has no exact rational value")
            return Fraction(repr(text))
        try:
            return Fraction(text)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"{text!r} is not a rational literal") from exc
    if isinstance(text, str) and "/" in text:
        return float(Fraction(text))
    return float(text)


def coerce(values: Iterable, backend: Optional[str] = None) -> tuple[tuple, bool]:
    """Convert ``values`` to a tuple on one backend; return (tuple, exact)."""
    values = list(values)
    if backend is None:
        exact = all(is_rational(v) for v in values)
    elif backend == EXACT:
        exact = True
    elif backend == REAL:
        exact = False
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if exact:
        return tuple(_to_fraction(v) for v in values), True
    return tuple(float(v) for v in values), False


def _to_fraction(v) -> Fraction:
    if isinstance(v, np.integer):
        return Fraction(int(v))
    if is_rational(v):
        return Fraction(v)
    return parse_number(v, True)


def to_float(x) -> float:
    if x is None:
        return math.nan
    return float(x)


def format_scalar(x, digits: int = 17) -> str:
    """Render for machine-readable output: ``num/den`` for rationals."""
    if x is None:
        return "nan"
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, f".{digits}g")


def sign_power(e: int) -> int:
    """(-1)**e for integer e."""
    return -1 if e % 2 else 1
