"""Labelled transition systems with input/output partitions.

Models are immutable value objects: states are strings, transitions are
(source, label, target) triples, and the internal action is spelled with the
reserved label ``tau``.  Observable semantics (traces with internal moves
erased) is what every operation here is defined on.
"""
from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .errors import (
    AlphabetMismatch,
    DanglingEndpoint,
    DeltaAlreadyUsed,
    DisjointnessViolation,
    ModelFormatError,
    ReservedLabelMisuse,
    TauSelfLoop,
    UnknownLabel,
    UnknownState,
    UnreachableState,
)

TAU = "tau"
DELTA = "delta"
FAIL = "fail"
PASS = "pass"

Trace = tuple[str, ...]

_LABEL_RE = re.compile(r"^[A-Za-z0-9_?!]+$")
_RESERVED = frozenset({TAU, DELTA, FAIL, PASS})


@dataclass(frozen=True)
class ActionAlphabet:
    """Disjoint input/output label sets plus the reserved internal symbol.

    ``quiescence`` names the reserved quiescence label when the alphabet
    carries one.  In specification/implementation alphabets it sits among the
    outputs; swapped tester alphabets carry it among the inputs.
    """

    inputs: frozenset[str]
    outputs: frozenset[str]
    internal: str = TAU
    quiescence: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        if self.inputs & self.outputs:
            raise DisjointnessViolation(
                f"labels on both sides: {sorted(self.inputs & self.outputs)}")
        if self.internal in self.inputs or self.internal in self.outputs:
            raise DisjointnessViolation(
                f"internal symbol {self.internal!r} may not be a visible label")
        for name in self.inputs | self.outputs:
            if not _LABEL_RE.match(name):
                raise ReservedLabelMisuse(f"bad label spelling: {name!r}")
            if name in _RESERVED and name != self.quiescence:
                raise ReservedLabelMisuse(
                    f"{name!r} is reserved and not declared as quiescence")
        if self.quiescence is not None:
            if self.quiescence not in self.inputs | self.outputs:
                raise ReservedLabelMisuse(
                    f"quiescence label {self.quiescence!r} not in the alphabet")

    @property
    def labels(self) -> frozenset[str]:
        return self.inputs | self.outputs

    def swapped(self) -> "ActionAlphabet":
        """Tester orientation: inputs and outputs exchanged."""
        return ActionAlphabet(self.outputs, self.inputs, self.internal,
                              self.quiescence)


def _check_structure(model: "Lts") -> None:
    labels = model.alphabet.labels
    if model.initial not in model.states:
        raise DanglingEndpoint(f"initial state {model.initial!r} not declared")
    for (src, lab, tgt) in model.transitions:
        if src not in model.states or tgt not in model.states:
            raise DanglingEndpoint(f"transition {(src, lab, tgt)} leaves the state set")
        if lab == model.alphabet.internal:
            if src == tgt:
                raise TauSelfLoop(f"internal self-loop at {src!r}")
        elif lab not in labels:
            raise UnknownLabel(f"transition label {lab!r} not in the alphabet")
    reachable = _reachable_states(model.states, model.initial, model.transitions)
    stranded = model.states - reachable
    if stranded:
        raise UnreachableState(f"unreachable states: {sorted(stranded)}")


def _reachable_states(states, initial, transitions) -> frozenset[str]:
    adj: dict[str, list[str]] = {}
    for (src, _lab, tgt) in transitions:
        adj.setdefault(src, []).append(tgt)
    seen = {initial}
    queue = deque([initial])
    while queue:
        for nxt in adj.get(queue.popleft(), ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


@dataclass(frozen=True)
class Lts:
    """Finite labelled transition system; every state reachable, no internal
    self-loops (internal cycles across distinct states are allowed)."""

    states: frozenset[str]
    initial: str
    alphabet: ActionAlphabet
    transitions: frozenset[tuple[str, str, str]]

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        _check_structure(self)


@dataclass(frozen=True)
class Iolts(Lts):
    """LTS whose alphabet partition into inputs/outputs is meaningful."""

    @property
    def inputs(self) -> frozenset[str]:
        return self.alphabet.inputs

    @property
    def outputs(self) -> frozenset[str]:
        return self.alphabet.outputs


@dataclass(frozen=True)
class DeltaIolts(Iolts):
    """IOLTS with a declared quiescence output, self-looped exactly at the
    states that enable no ordinary output and no internal move."""

    def __post_init__(self):
        super().__post_init__()
        delta = self.alphabet.quiescence
        if delta is None or delta not in self.outputs:
            raise ReservedLabelMisuse("quiescence output not declared")
        loops = {src for (src, lab, tgt) in self.transitions
                 if lab == delta and src == tgt}
        for (src, lab, tgt) in self.transitions:
            if lab == delta and src != tgt:
                raise ReservedLabelMisuse(
                    f"non-loop quiescence transition {(src, lab, tgt)}")
        expected = _quiescent_ignoring(self, delta)
        if loops != expected:
            raise ReservedLabelMisuse(
                f"quiescence loops at {sorted(loops)}, "
                f"but quiescent states are {sorted(expected)}")


def _quiescent_ignoring(model: Lts, delta: str | None) -> frozenset[str]:
    # one-step predicate: no outgoing output or internal transition,
    # not counting the quiescence label itself
    blocked = (model.alphabet.outputs - ({delta} if delta else set())) | {
        model.alphabet.internal}
    noisy = {src for (src, lab, _t) in model.transitions if lab in blocked}
    return frozenset(model.states - noisy)


# ---------------------------------------------------------------------------
# adjacency / closure caches


@lru_cache(maxsize=2048)
def _adjacency(model: Lts) -> Mapping[str, Mapping[str, tuple[str, ...]]]:
    adj: dict[str, dict[str, list[str]]] = {s: {} for s in model.states}
    for (src, lab, tgt) in model.transitions:
        adj[src].setdefault(lab, []).append(tgt)
    return {s: {lab: tuple(sorted(ts)) for lab, ts in row.items()}
            for s, row in adj.items()}


@lru_cache(maxsize=2048)
def _tau_closures(model: Lts) -> Mapping[str, frozenset[str]]:
    adj = _adjacency(model)
    tau = model.alphabet.internal
    out: dict[str, frozenset[str]] = {}
    for start in model.states:
        seen = {start}
        queue = deque([start])
        while queue:
            for nxt in adj[queue.popleft()].get(tau, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        out[start] = frozenset(seen)
    return out


def _closure(model: Lts, states: Iterable[str]) -> frozenset[str]:
    clo = _tau_closures(model)
    out: set[str] = set()
    for s in states:
        out |= clo[s]
    return frozenset(out)


def _step(model: Lts, states: Iterable[str], label: str) -> frozenset[str]:
    adj = _adjacency(model)
    out: set[str] = set()
    for s in states:
        out.update(adj[s].get(label, ()))
    return frozenset(out)


# ---------------------------------------------------------------------------
# trace semantics


def after(model: Lts, start: str, trace: Iterable[str]) -> frozenset[str]:
    """States reachable from ``start`` by an observable path spelling ``trace``.

    Internal moves interleave freely; the result is closed under trailing
    internal moves, so ``after(m, s, ())`` is the internal closure of ``s``.
    """
    if start not in model.states:
        raise UnknownState(f"unknown state {start!r}")
    labels = model.alphabet.labels
    cur = _closure(model, (start,))
    for sym in trace:
        if sym not in labels:
            raise UnknownLabel(f"unknown label {sym!r}")
        cur = _closure(model, _step(model, cur, sym))
        if not cur:
            return frozenset()
    return cur


def _enabled(model: Lts, states: Iterable[str], pool: frozenset[str]) -> frozenset[str]:
    adj = _adjacency(model)
    out: set[str] = set()
    for s in _closure(model, states):
        out.update(lab for lab in adj[s] if lab in pool)
    return frozenset(out)


def out_set(model: Iolts, states: Iterable[str]) -> frozenset[str]:
    """Output labels enabled (via observable steps) at any state of the set."""
    states = frozenset(states)
    unknown = states - model.states
    if unknown:
        raise UnknownState(f"unknown states {sorted(unknown)}")
    return _enabled(model, states, model.outputs)


def inp_set(model: Iolts, states: Iterable[str]) -> frozenset[str]:
    """Input labels enabled (via observable steps) at any state of the set."""
    states = frozenset(states)
    unknown = states - model.states
    if unknown:
        raise UnknownState(f"unknown states {sorted(unknown)}")
    return _enabled(model, states, model.inputs)


def init_set(model: Iolts, states: Iterable[str]) -> frozenset[str]:
    """Union of enabled inputs and outputs."""
    return inp_set(model, states) | out_set(model, states)


def is_deterministic(model: Lts) -> bool:
    """No observable trace from the initial state reaches two distinct states.

    Equivalent, for reachable models, to: no internal transitions and at most
    one target per (state, label).
    """
    tau = model.alphabet.internal
    seen: set[tuple[str, str]] = set()
    for (src, lab, _tgt) in model.transitions:
        if lab == tau:
            return False
        if (src, lab) in seen:
            return False
        seen.add((src, lab))
    return True


def quiescent_states(model: Iolts) -> frozenset[str]:
    """States with no outgoing output or internal transition (one-step)."""
    return _quiescent_ignoring(model, None)


def delta_loops(model: DeltaIolts) -> frozenset[str]:
    """States carrying the quiescence self-loop."""
    delta = model.alphabet.quiescence
    return frozenset(src for (src, lab, tgt) in model.transitions
                     if lab == delta and src == tgt)


def delta_extend(model: Iolts) -> DeltaIolts:
    """Add the reserved quiescence output with self-loops at quiescent states."""
    if model.alphabet.quiescence is not None:
        raise DeltaAlreadyUsed("model already declares a quiescence label")
    if any(lab == DELTA for (_s, lab, _t) in model.transitions):
        raise DeltaAlreadyUsed(f"{DELTA!r} already used as a transition label")
    alphabet = ActionAlphabet(model.inputs, model.outputs | {DELTA},
                              model.alphabet.internal, quiescence=DELTA)
    loops = {(s, DELTA, s) for s in quiescent_states(model)}
    return DeltaIolts(model.states, model.initial, alphabet,
                      model.transitions | loops)


def strip_delta(model: DeltaIolts) -> Iolts:
    """Inverse of delta_extend: drop the quiescence label and its loops."""
    delta = model.alphabet.quiescence
    alphabet = ActionAlphabet(model.inputs, model.outputs - {delta},
                              model.alphabet.internal)
    kept = frozenset(t for t in model.transitions if t[1] != delta)
    return Iolts(model.states, model.initial, alphabet, kept)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class StateFlags:
    sink: bool
    input_state: bool
    single_input: bool
    input_complete: bool
    output_complete: bool


@dataclass(frozen=True)
class ClassReport:
    deterministic: bool
    input_enabled: bool
    input_complete: bool
    output_complete: bool
    output_deterministic: bool
    single_input: bool
    has_sink: bool
    initially_connected: bool
    progressive: bool
    input_state_minimal: bool
    input_state_count: int
    per_state: Mapping[str, StateFlags] = field(hash=False, compare=False,
                                                default_factory=dict)


def _output_tau_subgraph_acyclic(model: Iolts) -> bool:
    tau = model.alphabet.internal
    adj: dict[str, list[str]] = {s: [] for s in model.states}
    for (src, lab, tgt) in model.transitions:
        if lab in model.outputs or lab == tau:
            adj[src].append(tgt)
    color = dict.fromkeys(model.states, 0)  # 0 fresh, 1 on stack, 2 done
    for root in model.states:
        if color[root]:
            continue
        stack = [(root, iter(adj[root]))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
            elif color[nxt] == 1:
                return False
            elif color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(adj[nxt])))
    return True


def classify(model: Iolts) -> ClassReport:
    """Structural class report: sink/single-input/complete flags per state,
    whole-model conjunctions, and pairwise input-state distinguishability."""
    per_state: dict[str, StateFlags] = {}
    input_states = []
    for s in sorted(model.states):
        inp = inp_set(model, (s,))
        out = out_set(model, (s,))
        flags = StateFlags(
            sink=not inp and not out,
            input_state=bool(inp),
            single_input=len(inp) <= 1,
            input_complete=inp in (model.inputs, frozenset()),
            output_complete=out in (model.outputs, frozenset()),
        )
        per_state[s] = flags
        if flags.input_state:
            input_states.append(s)
    has_sink = any(f.sink for f in per_state.values())
    return ClassReport(
        deterministic=is_deterministic(model),
        input_enabled=all(inp_set(model, (s,)) == model.inputs
                          for s in model.states),
        input_complete=all(f.input_complete for f in per_state.values()),
        output_complete=all(f.output_complete for f in per_state.values()),
        output_deterministic=all(len(out_set(model, (s,))) == 1
                                 for s in model.states),
        single_input=all(f.single_input for f in per_state.values()),
        has_sink=has_sink,
        initially_connected=True,  # construction invariant
        progressive=not has_sink and _output_tau_subgraph_acyclic(model),
        input_state_minimal=is_input_state_minimal(model),
        input_state_count=len(input_states),
        per_state=per_state,
    )


def reroot(model: Iolts, new_initial: str) -> Iolts:
    """Same model restarted at ``new_initial``; unreachable states pruned."""
    if new_initial not in model.states:
        raise UnknownState(f"unknown state {new_initial!r}")
    reach = _reachable_states(model.states, new_initial, model.transitions)
    kept = frozenset(t for t in model.transitions
                     if t[0] in reach and t[2] in reach)
    return Iolts(reach, new_initial, model.alphabet, kept)


def synchronous_product(left: Lts, right: Lts,
                        alphabet: ActionAlphabet) -> tuple[Lts, dict[str, tuple[str, str]]]:
    """Synchronous composition: internal moves interleave on either side,
    visible labels must fire on both.  Only the reachable part is built.
    State names are "(l|r)"; the returned map recovers the pairs."""
    tau_l = left.alphabet.internal
    tau_r = right.alphabet.internal
    adj_l = _adjacency(left)
    adj_r = _adjacency(right)
    shared = sorted(left.alphabet.labels & right.alphabet.labels)

    def name(p, q):
        return f"({p}|{q})"

    start = (left.initial, right.initial)
    pairs = {name(*start): start}
    transitions: set[tuple[str, str, str]] = set()
    queue = deque([start])
    seen = {start}
    while queue:
        p, q = queue.popleft()
        moves: list[tuple[str, tuple[str, str]]] = []
        for t in adj_l[p].get(tau_l, ()):
            if t != p:
                moves.append((alphabet.internal, (t, q)))
        for t in adj_r[q].get(tau_r, ()):
            if t != q:
                moves.append((alphabet.internal, (p, t)))
        for lab in shared:
            for tp in adj_l[p].get(lab, ()):
                for tq in adj_r[q].get(lab, ()):
                    moves.append((lab, (tp, tq)))
        for lab, nxt in moves:
            transitions.add((name(p, q), lab, name(*nxt)))
            if nxt not in seen:
                seen.add(nxt)
                pairs[name(*nxt)] = nxt
                queue.append(nxt)
    model = Lts(frozenset(pairs), name(*start), alphabet,
                frozenset(transitions))
    return model, pairs


def distinguishable(a: Iolts, sa: str, b: Iolts, sb: str) -> bool:
    """True iff the product of the two re-rooted models reaches a sink state
    (a state enabling nothing observable)."""
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("distinguishability needs one shared alphabet")
    ra = reroot(a, sa)
    rb = reroot(b, sb)
    product, _pairs = synchronous_product(ra, rb, a.alphabet)
    as_iolts = Iolts(product.states, product.initial, product.alphabet,
                     product.transitions)
    return any(not init_set(as_iolts, (s,)) for s in as_iolts.states)


def is_input_state_minimal(model: Iolts) -> bool:
    """Every pair of distinct input-states is distinguishable."""
    input_states = sorted(s for s in model.states if inp_set(model, (s,)))
    for i, s in enumerate(input_states):
        for t in input_states[i + 1:]:
            if not distinguishable(model, s, model, t):
                return False
    return True


# ---------------------------------------------------------------------------
# raw description parsing / serialization


def validate_model(raw: Mapping, normalize: bool = False,
                   tester: bool = False) -> Iolts:
    """Build a validated model from a raw JSON-style description.

    With ``normalize`` set, internal self-loops are dropped and unreachable
    states pruned instead of rejected.  A description declaring the reserved
    quiescence output yields a quiescence-checked model.  The quiescence
    label is legal only among the outputs, except for ``tester`` files whose
    alphabet is swapped.
    """
    if not isinstance(raw, Mapping):
        raise ModelFormatError("model description must be a mapping")
    for key in ("inputs", "outputs", "states", "initial", "transitions"):
        if key not in raw:
            raise ModelFormatError(f"missing key {key!r}")
    inputs = frozenset(map(str, raw["inputs"]))
    outputs = frozenset(map(str, raw["outputs"]))
    if DELTA in inputs and not tester:
        raise ReservedLabelMisuse(
            f"{DELTA!r} belongs among the outputs (tester files excepted)")
    quiescence = DELTA if DELTA in (inputs | outputs) else None
    alphabet = ActionAlphabet(inputs, outputs, quiescence=quiescence)
    states = frozenset(map(str, raw["states"]))
    initial = str(raw["initial"])
    transitions = set()
    for item in raw["transitions"]:
        if len(item) != 3:
            raise ModelFormatError(f"transition {item!r} is not a triple")
        src, lab, tgt = map(str, item)
        transitions.add((src, lab, tgt))

    if normalize:
        transitions = {(s, lab, t) for (s, lab, t) in transitions
                       if not (lab == TAU and s == t)}
        if initial not in states:
            raise DanglingEndpoint(f"initial state {initial!r} not declared")
        for (src, _lab, tgt) in transitions:
            if src not in states or tgt not in states:
                raise DanglingEndpoint(f"transition endpoint missing: {(src, tgt)}")
        reach = _reachable_states(states, initial, transitions)
        states = reach
        transitions = {t for t in transitions if t[0] in reach and t[2] in reach}

    # quiescence among the outputs means loop placement is checked; a tester
    # file carrying it among the inputs stays a plain partitioned model
    cls = DeltaIolts if DELTA in outputs else Iolts
    return cls(states, initial, alphabet, frozenset(transitions))


def model_from_json(text: str, normalize: bool = False,
                    tester: bool = False) -> Iolts:
    return validate_model(json.loads(text), normalize=normalize, tester=tester)


def model_to_dict(model: Lts) -> dict:
    return {
        "inputs": sorted(model.alphabet.inputs),
        "outputs": sorted(model.alphabet.outputs),
        "states": sorted(model.states),
        "initial": model.initial,
        "transitions": [list(t) for t in sorted(model.transitions)],
    }


def model_to_json(model: Lts) -> str:
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n"


def canonical_sha256(model: Lts) -> str:
    import hashlib

    return hashlib.sha256(model_to_json(model).encode()).hexdigest()


def model_to_dot(model: Lts, name: str = "model") -> str:
    """Graphviz rendering; verdict states get doubled circles."""
    lines = [f"digraph {json.dumps(name)} {{", "  rankdir=LR;"]
    lines.append('  __start [shape=point, label=""];')
    for s in sorted(model.states):
        shape = "doublecircle" if s in (FAIL, PASS) else "circle"
        lines.append(f"  {json.dumps(s)} [shape={shape}];")
    lines.append(f"  __start -> {json.dumps(model.initial)};")
    for (src, lab, tgt) in sorted(model.transitions):
        lines.append(f"  {json.dumps(src)} -> {json.dumps(tgt)}"
                     f" [label={json.dumps(lab)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
