"""Moment, cumulant and spectrum files.

Moments file (JSON)::

    {"order": 6, "mu": [1, 0, 1, 0, 3, 0, 15]}
    {"order": 2, "exact": true, "mu": [[1, 1], [0, 1], [1, 3]]}

Entries of ``mu`` may be numbers, ``"p/q"`` strings or, with ``exact``,
``[numerator, denominator]`` pairs. A cumulants file has the same shape with
``kappa`` (kappa_1 first) instead of ``mu``.

Spectrum file: a JSON array of ``{"eigenvalue": e, "probability": p}`` or
``{"eigenvalue": e, "amplitude_re": a, "amplitude_im": b}`` objects.
``"-"`` reads from stdin.
"""
from __future__ import annotations

import json
import sys
from fractions import Fraction
from typing import Optional

from .errors import InvalidMoments, InvalidSpec
from .moments import CumulantSequence, MomentSequence, Spectrum
from .oracle import SpectrumModel
from .scalar import EXACT, coerce


def _read(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"{path}: not valid JSON ({exc})") from exc


def _entry(x, exact_pairs: bool):
    if exact_pairs and isinstance(x, list):
        if len(x) != 2:
            raise InvalidSpec(f"exact entry must be [numerator, denominator], got {x!r}")
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise InvalidSpec(f"unreadable number {x!r}") from exc
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return x
    raise InvalidSpec(f"unreadable number {x!r}")


def _sequence(doc, key: str, backend: Optional[str]):
    if not isinstance(doc, dict) or key not in doc:
        raise InvalidSpec(f"expected an object with a {key!r} array")
    exact_flag = bool(doc.get("exact", False))
    values = [_entry(x, exact_flag) for x in doc[key]]
    if backend is None and exact_flag:
        backend = EXACT
    seq, _ = coerce(values, backend)
    order = doc.get("order")
    return seq, order


def load_moments(path: str, backend: Optional[str] = None) -> MomentSequence:
    mu, order = _sequence(_read(path), "mu", backend)
    if order is not None and order != len(mu) - 1:
        raise InvalidMoments(f"order {order} does not match {len(mu)} moments")
    return MomentSequence(mu)


def load_cumulants(path: str, backend: Optional[str] = None) -> CumulantSequence:
    kappa, order = _sequence(_read(path), "kappa", backend)
    if order is not None and order != len(kappa):
        raise InvalidMoments(f"order {order} does not match {len(kappa)} cumulants")
    return CumulantSequence(kappa)


def _levels(path: str) -> list:
    doc = _read(path)
    if isinstance(doc, dict) and "levels" in doc:
        doc = doc["levels"]
    if not isinstance(doc, list) or not doc:
        raise InvalidSpec(f"{path}: expected a nonempty array of levels")
    for item in doc:
        if not isinstance(item, dict) or "eigenvalue" not in item:
            raise InvalidSpec(f"{path}: every level needs an eigenvalue")
    return doc


def load_spectrum(path: str, backend: Optional[str] = None) -> Spectrum:
    """Distribution spec; amplitude entries contribute |amplitude|**2."""
    pairs = []
    for item in _levels(path):
        e = _entry(item["eigenvalue"], False)
        if "probability" in item:
            p = _entry(item["probability"], False)
        else:
            re = _entry(item.get("amplitude_re", 0), False)
            im = _entry(item.get("amplitude_im", 0), False)
            p = re * re + im * im
        pairs.extend([e, p])
    values, _ = coerce(pairs, backend)
    return Spectrum(tuple(zip(values[0::2], values[1::2])))


def load_spectrum_model(path: str) -> SpectrumModel:
    levels = []
    for item in _levels(path):
        e = float(_entry(item["eigenvalue"], False))
        if "probability" in item:
            p = float(_entry(item["probability"], False))
            if p < 0:
                raise InvalidSpec("probabilities must be nonnegative")
            amp = complex(p**0.5)
        else:
            amp = complex(float(_entry(item.get("amplitude_re", 0), False)), float(_entry(item.get("amplitude_im", 0), False)))
        levels.append((e, amp))
    return SpectrumModel(tuple(levels))


def dump_moments(mu: MomentSequence) -> str:
    if mu.exact:
        doc = {"order": mu.order, "exact": True, "mu": [[x.numerator, x.denominator] for x in mu.mu]}
    else:
        doc = {"order": mu.order, "mu": [float(x) for x in mu.mu]}
    return json.dumps(doc)
