"""Integer-table kernels for the bounded-exhaustive verification sweeps.

The exhaustive sweeps pit two conformance-check routes against each other
over every deterministic model pair of a small universe (millions of pairs),
which is far too hot for the dict-based library objects.  Models over one
input ``a`` and one output ``x`` with at most three states are encoded as
int64 rows ``[n, a0, x0, a1, x1, a2, x2]`` where entry ``-1`` means the
transition is absent and ``-2`` pads unused states.

Kernels are compiled with numba when available.  Set ``IOCONF_NO_NUMBA=1``
to force the pure-Python fallback (same code, interpreted over the same
numpy arrays); ``benchmarks/bench_kernels.py`` compares the two paths.
"""
import os

import numpy as np

NUMBA_ENABLED = False
if os.environ.get("IOCONF_NO_NUMBA", "") in ("", "0"):
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass
if not NUMBA_ENABLED:
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def decorate(func):
            return func

        return decorate


MAX_STATES = 3
_ROW = 1 + 2 * MAX_STATES


@njit(cache=True)
def ioco_violates_direct(ns, ts, ni, ti):
    """Definitional route: walk the synchronous product and flag any
    reachable pair where the implementation emits x but the spec does not."""
    seen = np.zeros(MAX_STATES * MAX_STATES, dtype=np.uint8)
    stack = np.empty(MAX_STATES * MAX_STATES, dtype=np.int64)
    top = 0
    stack[top] = 0
    top += 1
    seen[0] = 1
    while top > 0:
        top -= 1
        pair = stack[top]
        s = pair // MAX_STATES
        q = pair % MAX_STATES
        if ti[2 * q + 1] >= 0 and ts[2 * s + 1] < 0:
            return True
        for lab in range(2):
            a = ts[2 * s + lab]
            b = ti[2 * q + lab]
            if a >= 0 and b >= 0:
                nxt = a * MAX_STATES + b
                if not seen[nxt]:
                    seen[nxt] = 1
                    stack[top] = nxt
                    top += 1
    return False


@njit(cache=True)
def ioco_violates_sink(ns, ts, ni, ti):
    """Construction route: extend the spec table with a final sink reached on
    the missing output and a dead sink on missing inputs, then look for the
    final sink in the product with the implementation."""
    final_sink = ns
    dead_sink = ns + 1
    width = ns + 2
    seen = np.zeros(width * MAX_STATES, dtype=np.uint8)
    stack = np.empty(width * MAX_STATES, dtype=np.int64)
    top = 0
    stack[top] = 0
    top += 1
    seen[0] = 1
    while top > 0:
        top -= 1
        pair = stack[top]
        t = pair // MAX_STATES
        q = pair % MAX_STATES
        if t >= ns:
            continue  # both sinks are terminal
        for lab in range(2):
            b = ti[2 * q + lab]
            if b < 0:
                continue
            a = ts[2 * t + lab]
            if a >= 0:
                t2 = a
            elif lab == 1:  # x is the output
                t2 = final_sink
            else:
                t2 = dead_sink
            if t2 == final_sink:
                return True
            nxt = t2 * MAX_STATES + b
            if not seen[nxt]:
                seen[nxt] = 1
                stack[top] = nxt
                top += 1
    return False


@njit(cache=True)
def fault_model_fails(ns, ts, ni, ti, m):
    """Fail-reachability of the levelled multigraph run against the
    implementation.  Equivalent to running every linear purpose, because the
    purposes are exactly the root-to-fail paths of the graph."""
    levels = m * ns + 1
    width = ns * levels
    seen = np.zeros(width * MAX_STATES, dtype=np.uint8)
    stack = np.empty(width * MAX_STATES, dtype=np.int64)
    top = 0
    stack[top] = 0
    top += 1
    seen[0] = 1
    while top > 0:
        top -= 1
        pair = stack[top]
        q = pair % MAX_STATES
        node = pair // MAX_STATES
        j = node // levels
        k = node % levels
        if ts[2 * j + 1] < 0 and ti[2 * q + 1] >= 0:
            return True  # fail arc on the missing output, impl can emit it
        for lab in range(2):
            i = ts[2 * j + lab]
            b = ti[2 * q + lab]
            if i < 0 or b < 0:
                continue
            if i > j:
                k2 = k
            elif k < levels - 1:
                k2 = k + 1
            else:
                continue
            nxt = (i * levels + k2) * MAX_STATES + b
            if not seen[nxt]:
                seen[nxt] = 1
                stack[top] = nxt
                top += 1
    return False


@njit(cache=True)
def sweep_ioco_routes(tables):
    """Disagreements between the two conformance routes over all pairs."""
    count = 0
    disagreements = 0
    for i in range(tables.shape[0]):
        ns = tables[i, 0]
        ts = tables[i, 1:]
        for j in range(tables.shape[0]):
            ni = tables[j, 0]
            ti = tables[j, 1:]
            if ioco_violates_direct(ns, ts, ni, ti) != ioco_violates_sink(
                    ns, ts, ni, ti):
                disagreements += 1
            count += 1
    return disagreements, count


@njit(cache=True)
def sweep_m_completeness(tables, m, max_impl_states):
    """Disagreements between fault-model verdicts and direct conformance,
    implementations restricted to at most ``max_impl_states`` states."""
    count = 0
    disagreements = 0
    for i in range(tables.shape[0]):
        ns = tables[i, 0]
        ts = tables[i, 1:]
        for j in range(tables.shape[0]):
            ni = tables[j, 0]
            if ni > max_impl_states:
                continue
            ti = tables[j, 1:]
            if ioco_violates_direct(ns, ts, ni, ti) != fault_model_fails(
                    ns, ts, ni, ti, m):
                disagreements += 1
            count += 1
    return disagreements, count
