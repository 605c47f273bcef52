"""Coordinated multi-neighborhood learning of local causal structure.

The heavy lifting happens in the compiled ``_core`` extension; this module
adds target-name resolution and decodes result documents into dicts.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from ._core import (
    CyclicInput,
    Error,
    InvalidArgument,
    Network,
    ParseError,
    kfold_split,
    num_threads,
    set_num_threads,
    simulate,
)
from . import _core

__all__ = [
    "CyclicInput",
    "Error",
    "InvalidArgument",
    "Network",
    "ParseError",
    "discover",
    "discover_oracle",
    "kfold_split",
    "num_threads",
    "set_num_threads",
    "simulate",
]

__version__ = "0.1.0"


def _resolve(targets: Iterable[int | str], names: Sequence[str]) -> list[int]:
    out = []
    for t in targets:
        if isinstance(t, str):
            if t not in names:
                raise InvalidArgument(f"unknown target {t!r}")
            out.append(list(names).index(t))
        else:
            out.append(int(t))
    return out


def _decode(doc: str, metrics: dict) -> dict:
    result = json.loads(doc)
    if metrics:
        result["metrics"] = dict(metrics)
    return result


def discover(
    data,
    targets: Iterable[int | str],
    algorithm: str = "cml",
    *,
    names: Sequence[str] | None = None,
    alpha_skel: float = 0.01,
    alpha_mb: float = 0.01,
    lmax: int = 3,
    network: Network | None = None,
) -> dict:
    """Learns the local structure around ``targets`` from an n x p sample matrix.

    ``data`` may be a NumPy array or a pandas DataFrame (column labels become
    node names). Targets are node indices or names. Passing the true
    ``network`` adds a ``metrics`` entry scored against it.
    """
    if names is None and hasattr(data, "columns"):
        names = [str(c) for c in data.columns]
    values = np.asarray(data, dtype=float)
    if values.ndim != 2:
        raise InvalidArgument("data must be a two-dimensional array")
    names = list(names) if names is not None else []
    if network is not None and not names:
        names = list(network.names)
    lookup = names or [f"X{v + 1}" for v in range(values.shape[1])]
    doc, metrics = _core._discover(
        values, names, _resolve(targets, lookup), algorithm, alpha_skel, alpha_mb, lmax, network
    )
    return _decode(doc, metrics)


def discover_oracle(network: Network, targets: Iterable[int | str], algorithm: str = "cml", *, lmax: int | None = None) -> dict:
    """Runs an algorithm with d-separation in ``network`` as the independence oracle."""
    doc, metrics = _core._discover_oracle(
        network, _resolve(targets, network.names), algorithm, network.p if lmax is None else lmax
    )
    return _decode(doc, metrics)
