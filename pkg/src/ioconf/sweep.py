"""Bounded-exhaustive universes over one input and one output.

Enumerates every deterministic, initially-connected model with up to
``max_states`` states over inputs {a} and outputs {x} as integer tables for
the kernels, and decodes rows back into library models for cross-checks.
"""
from __future__ import annotations

from itertools import product

import numpy as np

from . import kernels
from .models import ActionAlphabet, Iolts

_ALPHABET = ActionAlphabet(frozenset({"a"}), frozenset({"x"}))
_LABELS = ("a", "x")  # column order in the tables


def enumerate_tables(max_states: int = 3) -> np.ndarray:
    """Every reachable deterministic transition table, one row per model."""
    if not 1 <= max_states <= kernels.MAX_STATES:
        raise ValueError(f"max_states must be in 1..{kernels.MAX_STATES}")
    rows = []
    for n in range(1, max_states + 1):
        for tbl in product(range(-1, n), repeat=2 * n):
            seen = {0}
            stack = [0]
            while stack:
                s = stack.pop()
                for lab in range(2):
                    t = tbl[2 * s + lab]
                    if t >= 0 and t not in seen:
                        seen.add(t)
                        stack.append(t)
            if len(seen) == n:
                row = [n] + list(tbl) + [-2] * (2 * (kernels.MAX_STATES - n))
                rows.append(row)
    return np.array(rows, dtype=np.int64)


def table_to_iolts(row: np.ndarray) -> Iolts:
    """Decode one table row into a library model (states s0, s1, ...)."""
    n = int(row[0])
    trans = set()
    for s in range(n):
        for lab_idx, lab in enumerate(_LABELS):
            t = int(row[1 + 2 * s + lab_idx])
            if t >= 0:
                trans.add((f"s{s}", lab, f"s{t}"))
    states = frozenset(f"s{s}" for s in range(n))
    return Iolts(states, "s0", _ALPHABET, frozenset(trans))


def ioco_route_disagreements(tables: np.ndarray) -> tuple[int, int]:
    """(disagreements, pairs checked) between the two conformance kernels."""
    dis, count = kernels.sweep_ioco_routes(tables)
    return int(dis), int(count)


def m_completeness_disagreements(tables: np.ndarray, m: int,
                                 max_impl_states: int) -> tuple[int, int]:
    """(disagreements, pairs checked) between fault-model and direct routes."""
    dis, count = kernels.sweep_m_completeness(tables, m, max_impl_states)
    return int(dis), int(count)
