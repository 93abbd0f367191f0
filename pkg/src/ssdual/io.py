"""JSON reading and writing for chains, vectors and posets.

Rationals are written as ``"num/den"`` strings.  Output is canonical (fixed
key order, one matrix row per line) so that write(read(write(x))) reproduces
the same bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .markov import Chain
from .numerics import RatMatrix, format_rational, to_rational
from .poset import Poset, PosetError, product_lattice, validate


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class FloatChain:
    """Floating-point chain, accepted only by the profile computations."""

    labels: tuple
    nu: np.ndarray
    P: np.ndarray

    @property
    def size(self) -> int:
        return len(self.labels)


def _label_in(x):
    return tuple(_label_in(y) for y in x) if isinstance(x, list) else x


def _label_out(x):
    return [_label_out(y) for y in x] if isinstance(x, tuple) else x


def _dump(x) -> str:
    return json.dumps(x, separators=(", ", ": "))


def _scalar(x, mode: str):
    if mode == "float":
        if isinstance(x, str):
            return float(to_rational(x))
        return float(x)
    if isinstance(x, float):
        raise FormatError(f"float {x!r} given in exact mode; write it as a rational string")
    return to_rational(x)


def _load(source) -> Any:
    if isinstance(source, (dict, list)):
        return source
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None


# -- chains -----------------------------------------------------------------

def chain_to_json(chain) -> str:
    if isinstance(chain, FloatChain):
        nu = [float(x) for x in chain.nu]
        rows = [[float(x) for x in r] for r in chain.P]
        mode = "float"
    else:
        nu = [format_rational(x) for x in chain.nu]
        rows = chain.P.to_strings()
        mode = "exact"
    lines = [
        "{",
        f'  "labels": {_dump([_label_out(s) for s in chain.labels])},',
        f'  "nu": {_dump(nu)},',
        '  "P": [',
        ",\n".join(f"    {_dump(r)}" for r in rows),
        "  ],",
        f'  "mode": "{mode}"',
        "}",
    ]
    return "\n".join(lines) + "\n"


def chain_from_json(source, mode: str | None = None):
    """Parse a chain; ``mode`` overrides the payload's own ``mode`` field."""
    obj = _load(source)
    if not isinstance(obj, dict) or not {"labels", "nu", "P"} <= obj.keys():
        raise FormatError('a chain needs "labels", "nu" and "P"')
    mode = mode or obj.get("mode", "exact")
    if mode not in ("exact", "float"):
        raise FormatError(f"unknown mode {mode!r}")
    labels = tuple(_label_in(x) for x in obj["labels"])
    nu = [_scalar(x, mode) for x in obj["nu"]]
    P = [[_scalar(x, mode) for x in r] for r in obj["P"]]
    if mode == "float":
        return FloatChain(labels, np.asarray(nu, dtype=float), np.asarray(P, dtype=float))
    return Chain(labels, tuple(nu), RatMatrix(P))


# -- vectors ----------------------------------------------------------------

def vector_to_json(v: Sequence) -> str:
    return _dump([format_rational(x) for x in v]) + "\n"


def vector_from_json(source, mode: str = "exact", key: str = "pi") -> list:
    """A bare list, or an object holding the list under ``key``."""
    obj = _load(source)
    if isinstance(obj, dict):
        if key not in obj:
            raise FormatError(f'expected a list or an object with "{key}"')
        obj = obj[key]
    if not isinstance(obj, list):
        raise FormatError("expected a JSON list")
    return [_scalar(x, mode) for x in obj]


# -- posets -----------------------------------------------------------------

def poset_to_json(poset: Poset) -> str:
    rows = [[int(x) for x in r] for r in poset.zeta.tolist()]
    lines = [
        "{",
        f'  "labels": {_dump([_label_out(s) for s in poset.labels])},',
        '  "zeta": [',
        ",\n".join(f"    {_dump(r)}" for r in rows),
        "  ]",
        "}",
    ]
    return "\n".join(lines) + "\n"


def poset_from_json(source, cap: int | None = None) -> Poset:
    obj = _load(source)
    if not isinstance(obj, dict):
        raise FormatError("a poset is a JSON object")
    if "product" in obj:
        return product_lattice(obj["product"], cap=cap)
    if not {"labels", "zeta"} <= obj.keys():
        raise FormatError('a poset needs "labels" and "zeta", or "product"')
    labels = [_label_in(x) for x in obj["labels"]]
    try:
        zeta = [[int(x) for x in r] for r in obj["zeta"]]
    except (TypeError, ValueError):
        raise PosetError("zeta entries must be 0 or 1") from None
    return validate(labels, zeta, cap=cap)
