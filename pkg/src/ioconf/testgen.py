"""Generation of test purposes, fault models and scheme suites.

Testers come in two orientations.  Test purposes swap the alphabet (they
send the implementation's inputs and receive its outputs) and carry reserved
``fail``/``pass`` verdict states.  Schemes keep the specification's
orientation and are acyclic, single-input and output-complete with a single
designated fail sink.

The bounded-exhaustive constructions all go through one levelled acyclic
multigraph: levels replicate the specification states, arcs run rightward
within a level or down to the next one, and every root-to-fail path spells a
minimal-length family of disallowed behaviours.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from . import automata, models
from .errors import (
    BudgetExceeded,
    GenerationError,
    ModelFormatError,
    NondeterministicSpec,
    ReservedStateCollision,
    UnsupportedPurpose,
)
from .models import FAIL, PASS, ActionAlphabet, Iolts, Trace

MultigraphNode = tuple[str, int] | str  # (state, level) or the fail sentinel


def _one_step_labels(model: Iolts, state: str) -> frozenset[str]:
    return frozenset(lab for (src, lab, _t) in model.transitions
                     if src == state)


def _reachable_between(model: Iolts, src: str, dst: str) -> bool:
    if src not in model.states or dst not in model.states:
        return False
    return dst in models._reachable_states(model.states, src,
                                           model.transitions)


@dataclass(frozen=True)
class TestPurpose:
    """Tester with swapped alphabet and optional fail/pass verdict states."""

    __test__ = False  # keep pytest collection away from the Test* name

    model: Iolts
    fail_state: str | None = None
    pass_state: str | None = None
    word: Trace | None = None

    def __post_init__(self):
        if self.fail_state is not None and self.fail_state != FAIL:
            raise ReservedStateCollision("the fail state must be named 'fail'")
        if self.pass_state is not None and self.pass_state != PASS:
            raise ReservedStateCollision("the pass state must be named 'pass'")
        for s in (self.fail_state, self.pass_state):
            if s is not None and s not in self.model.states:
                raise ReservedStateCollision(f"verdict state {s!r} missing")
        if self.fail_state and self.pass_state:
            if (_reachable_between(self.model, self.fail_state, self.pass_state)
                    or _reachable_between(self.model, self.pass_state,
                                          self.fail_state)):
                raise GenerationError(
                    "verdict states may not reach one another")

    @property
    def name(self) -> str:
        if self.word is not None:
            return ".".join(self.word) if self.word else "empty"
        return "complete"


@dataclass(frozen=True)
class Scheme:
    """Specification-oriented tester with a designated fail sink."""

    model: Iolts
    fail_state: str
    pass_state: str | None = None
    word: Trace | None = None

    def __post_init__(self):
        if self.fail_state != FAIL:
            raise ReservedStateCollision("the fail state must be named 'fail'")
        if self.fail_state not in self.model.states:
            raise ReservedStateCollision("fail state missing from the model")

    @property
    def name(self) -> str:
        return ".".join(self.word) if self.word else "empty"


@dataclass(frozen=True)
class Provenance:
    spec_sha256: str
    m: int
    transforms: tuple[str, ...]
    enumeration: tuple[str, ...]
    capped: bool = False
    determinized: bool = False
    kind: str = "faultmodel"


@dataclass(frozen=True)
class FaultModel:
    purposes: tuple[TestPurpose, ...]
    provenance: Provenance


@dataclass(frozen=True)
class SchemeSuite:
    schemes: tuple[Scheme, ...]
    provenance: Provenance


# ---------------------------------------------------------------------------
# the single complete test purpose


def complete_test_purpose(spec: Iolts) -> TestPurpose:
    """One deterministic tester that is conformance-complete on its own.

    The spec is determinized, then every state gains a fail edge for each
    output it does not enable, and fail loops on every output.  When the spec
    enables every output everywhere the fail state would be unreachable and
    is dropped.
    """
    det = automata.determinize_iolts(spec)
    if FAIL in det.states:
        raise ReservedStateCollision("spec already uses the state name 'fail'")
    trans = set(det.transitions)
    missing_any = False
    for s in sorted(det.states):
        enabled = _one_step_labels(det, s)
        for lab in sorted(det.outputs):
            if lab not in enabled:
                trans.add((s, lab, FAIL))
                missing_any = True
    alphabet = det.alphabet.swapped()
    if not missing_any:
        model = Iolts(det.states, det.initial, alphabet, frozenset(trans))
        return TestPurpose(model, fail_state=None, pass_state=None)
    for lab in sorted(det.outputs):
        trans.add((FAIL, lab, FAIL))
    model = Iolts(det.states | {FAIL}, det.initial, alphabet,
                  frozenset(trans))
    return TestPurpose(model, fail_state=FAIL, pass_state=None)


# ---------------------------------------------------------------------------
# the levelled multigraph


@dataclass(frozen=True)
class Multigraph:
    spec: Iolts
    m: int
    enumeration: tuple[str, ...]
    levels: int
    pre_prune_node_count: int
    root: MultigraphNode
    nodes: frozenset[MultigraphNode]
    arcs: tuple[tuple[MultigraphNode, str, MultigraphNode], ...] = field(
        hash=False, compare=False)

    def successors(self, node: MultigraphNode) -> list[tuple[str, MultigraphNode]]:
        return sorted((lab, dst) for (src, lab, dst) in self.arcs
                      if src == node)

    def trace_path(self, word: Iterable[str]) -> tuple[MultigraphNode, ...]:
        """Node sequence that ``word`` spells from the root (deterministic)."""
        arc_map = {(src, lab): dst for (src, lab, dst) in self.arcs}
        path: list[MultigraphNode] = [self.root]
        cur = self.root
        for sym in word:
            nxt = arc_map.get((cur, sym))
            if nxt is None:
                raise GenerationError(f"word leaves the graph at {cur!r}/{sym!r}")
            path.append(nxt)
            cur = nxt
        return tuple(path)

    def count_fail_paths(self) -> int:
        """Number of distinct root-to-fail paths (exact, no enumeration)."""
        order = sorted((n for n in self.nodes if n != FAIL),
                       key=lambda n: (n[1], self.enumeration.index(n[0])))
        count: dict[MultigraphNode, int] = {n: 0 for n in self.nodes}
        count[self.root] = 1
        total = 0
        out: dict[MultigraphNode, list[MultigraphNode]] = {}
        for (src, _lab, dst) in self.arcs:
            out.setdefault(src, []).append(dst)
        for node in order:
            c = count[node]
            if not c:
                continue
            for dst in out.get(node, ()):
                if dst == FAIL:
                    total += c
                else:
                    count[dst] += c
        return total


def build_multigraph(spec: Iolts, m: int,
                     enumeration: Iterable[str] | None = None) -> Multigraph:
    """Levelled acyclic unfolding of a deterministic spec, fail arcs attached.

    With n spec states there are m*n+1 levels; a transition whose target
    comes later in the enumeration stays within its level, any other one
    drops a level.  Every node gains a fail arc per output the underlying
    state does not enable.  Unreachable nodes are discarded.
    """
    if m < 1:
        raise GenerationError("the implementation size bound must be positive")
    if not models.is_deterministic(spec):
        raise NondeterministicSpec("the multigraph needs a deterministic spec")
    if enumeration is None:
        enumeration = (spec.initial,) + tuple(
            sorted(spec.states - {spec.initial}))
    else:
        enumeration = tuple(enumeration)
        if set(enumeration) != set(spec.states) or len(enumeration) != len(
                spec.states):
            raise GenerationError("enumeration must list every state once")
        if enumeration[0] != spec.initial:
            raise GenerationError("enumeration must start at the initial state")
    index = {s: i for i, s in enumerate(enumeration)}
    n = len(enumeration)
    levels = m * n + 1

    arcs: list[tuple[MultigraphNode, str, MultigraphNode]] = []
    by_src: dict[MultigraphNode, list[tuple[str, MultigraphNode]]] = {}

    def add(src, lab, dst):
        arcs.append((src, lab, dst))
        by_src.setdefault(src, []).append((lab, dst))

    outgoing: dict[str, list[tuple[str, str]]] = {s: [] for s in spec.states}
    for (src, lab, tgt) in sorted(spec.transitions):
        outgoing[src].append((lab, tgt))
    for k in range(levels):
        for s in enumeration:
            node = (s, k)
            enabled = {lab for (lab, _t) in outgoing[s]}
            for lab in sorted(spec.outputs - enabled):
                add(node, lab, FAIL)
            if k == levels - 1:
                continue
            for (lab, tgt) in outgoing[s]:
                if index[tgt] > index[s]:
                    add(node, lab, (tgt, k))
                else:
                    add(node, lab, (tgt, k + 1))

    root: MultigraphNode = (enumeration[0], 0)
    reachable: set[MultigraphNode] = {root}
    queue = deque([root])
    while queue:
        cur = queue.popleft()
        for (_lab, dst) in by_src.get(cur, ()):
            if dst not in reachable:
                reachable.add(dst)
                queue.append(dst)
    kept = tuple((src, lab, dst) for (src, lab, dst) in arcs
                 if src in reachable and dst in reachable)
    return Multigraph(spec=spec, m=m, enumeration=enumeration, levels=levels,
                      pre_prune_node_count=n * levels, root=root,
                      nodes=frozenset(reachable), arcs=kept)


def _node_name(node: MultigraphNode) -> str:
    if node == FAIL:
        return FAIL
    state, level = node
    return f"{state}.{level}"


def _linear_purpose(g: Multigraph, path: tuple[MultigraphNode, ...],
                    word: Trace) -> TestPurpose:
    alphabet = g.spec.alphabet.swapped()
    names = [_node_name(n) for n in path]
    trans = frozenset((names[i], word[i], names[i + 1])
                      for i in range(len(word)))
    model = Iolts(frozenset(names), names[0], alphabet, trans)
    return TestPurpose(model, fail_state=FAIL, pass_state=None, word=word)


def enumerate_test_purposes(g: Multigraph) -> Iterator[TestPurpose]:
    """Lazily stream one linear purpose per root-to-fail path, shortlex."""
    queue = deque([(g.root, (g.root,), ())])
    succ: dict[MultigraphNode, list[tuple[str, MultigraphNode]]] = {}
    for (src, lab, dst) in g.arcs:
        succ.setdefault(src, []).append((lab, dst))
    for lst in succ.values():
        lst.sort()
    while queue:
        node, path, word = queue.popleft()
        for (lab, dst) in succ.get(node, ()):
            if dst == FAIL:
                yield _linear_purpose(g, path + (FAIL,), word + (lab,))
            else:
                queue.append((dst, path + (dst,), word + (lab,)))


def purpose_for_word(g: Multigraph, word: Iterable[str]) -> TestPurpose:
    """The linear purpose for one root-to-fail word of the graph."""
    word = tuple(word)
    path = g.trace_path(word)
    if path[-1] != FAIL:
        raise GenerationError("word does not end in the fail node")
    return _linear_purpose(g, path, word)


# ---------------------------------------------------------------------------
# verdict-preserving transforms


def _ensure_no_user_verdict(model: Iolts, name: str, declared: str | None):
    if declared is None and name in model.states:
        raise ReservedStateCollision(
            f"state name {name!r} already used by the model")


def make_input_enabled(tp: TestPurpose) -> TestPurpose:
    """Enable every tester input (= impl output) at every non-fail state.

    Missing symbols route to the pass state; pass and fail get full
    self-loop rows.  Fail-reachability, hence every verdict, is unchanged.
    """
    model = tp.model
    inputs = model.alphabet.inputs
    _ensure_no_user_verdict(model, PASS, tp.pass_state)
    additions: set[tuple[str, str, str]] = set()
    for s in sorted(model.states - {tp.fail_state, tp.pass_state} - {None}):
        enabled = _one_step_labels(model, s)
        for lab in sorted(inputs - enabled):
            additions.add((s, lab, PASS))
    trans = set(model.transitions) | additions
    states = set(model.states)
    need_pass = bool(additions) or tp.pass_state is not None
    if need_pass:
        states.add(PASS)
        trans |= {(PASS, lab, PASS) for lab in inputs}
    if tp.fail_state is not None:
        trans |= {(tp.fail_state, lab, tp.fail_state) for lab in inputs}
    model2 = Iolts(frozenset(states), model.initial, model.alphabet,
                   frozenset(trans))
    return TestPurpose(model2, tp.fail_state,
                       PASS if need_pass else tp.pass_state, tp.word)


def make_output_deterministic(tp: TestPurpose) -> TestPurpose:
    """Give every non-verdict state exactly one tester output (= impl input).

    States with none gain an edge on the least input to pass.  Requires the
    linear-path shape: no state may already emit two distinct outputs.
    """
    model = tp.model
    outputs = model.alphabet.outputs
    if not outputs:
        raise UnsupportedPurpose("no tester outputs to choose from")
    least = min(outputs)
    _ensure_no_user_verdict(model, PASS, tp.pass_state)
    additions: set[tuple[str, str, str]] = set()
    for s in sorted(model.states - {tp.fail_state, tp.pass_state} - {None}):
        emitted = _one_step_labels(model, s) & outputs
        if len(emitted) > 1:
            raise UnsupportedPurpose(
                f"state {s!r} already emits {sorted(emitted)}")
        if not emitted:
            additions.add((s, least, PASS))
    if not additions:
        return tp
    states = set(model.states) | {PASS}
    trans = set(model.transitions) | additions
    trans |= {(PASS, lab, PASS) for lab in model.alphabet.inputs}
    model2 = Iolts(frozenset(states), model.initial, model.alphabet,
                   frozenset(trans))
    return TestPurpose(model2, tp.fail_state, PASS, tp.word)


TRANSFORM_NAMES = ("input_enabled", "output_deterministic")


def apply_transforms(tp: TestPurpose, transforms: Iterable[str]) -> TestPurpose:
    for name in transforms:
        if name == "input_enabled":
            tp = make_input_enabled(tp)
        elif name == "output_deterministic":
            tp = make_output_deterministic(tp)
        else:
            raise GenerationError(f"unknown transform {name!r}")
    return tp


# ---------------------------------------------------------------------------
# fault models and scheme suites


def _normalize_transforms(transforms) -> tuple[str, ...]:
    if transforms is None:
        return ()
    if transforms == "all":
        return TRANSFORM_NAMES
    return tuple(transforms)


def gen_fault_model(spec: Iolts, m: int, transforms=None,
                    max_purposes: int | None = None,
                    strict_budget: bool = False,
                    enumeration: Iterable[str] | None = None) -> FaultModel:
    """Bounded-exhaustive fault model: one purpose per root-to-fail path.

    ``max_purposes`` truncates the (worst-case exponential) stream and marks
    the provenance as capped; with ``strict_budget`` the overflow raises
    BudgetExceeded instead.
    """
    transforms = _normalize_transforms(transforms)
    det = automata.determinize_iolts(spec)
    g = build_multigraph(det, m, enumeration)
    purposes: list[TestPurpose] = []
    capped = False
    for tp in enumerate_test_purposes(g):
        if max_purposes is not None and len(purposes) >= max_purposes:
            if strict_budget:
                raise BudgetExceeded(
                    f"more than {max_purposes} purposes at m={m}")
            capped = True
            break
        purposes.append(apply_transforms(tp, transforms))
    prov = Provenance(spec_sha256=models.canonical_sha256(spec), m=m,
                      transforms=transforms, enumeration=g.enumeration,
                      capped=capped, determinized=det is not spec,
                      kind="faultmodel")
    return FaultModel(tuple(purposes), prov)


def _scheme_from_purpose(tp: TestPurpose, spec_alphabet: ActionAlphabet) -> Scheme:
    """Re-orient a linear purpose and complete its output rows via pass."""
    outputs = spec_alphabet.outputs
    trans = set()
    states = set(tp.model.states)
    need_pass = False
    for s in sorted(tp.model.states):
        emitted = {lab for (src, lab, _t) in tp.model.transitions
                   if src == s and lab in outputs}
        for (src, lab, tgt) in tp.model.transitions:
            if src == s:
                trans.add((src, lab, tgt))
        if emitted and len(outputs) > 1:
            for lab in sorted(outputs - emitted):
                trans.add((s, lab, PASS))
                need_pass = True
    if need_pass:
        states.add(PASS)
    model = Iolts(frozenset(states), tp.model.initial, spec_alphabet,
                  frozenset(trans))
    return Scheme(model, FAIL, PASS if need_pass else None, tp.word)


def gen_scheme_suite(spec: Iolts, m: int,
                     max_schemes: int | None = None,
                     strict_budget: bool = False) -> SchemeSuite:
    """Acyclic single-input output-complete suite, spec orientation."""
    det = automata.determinize_iolts(spec)
    g = build_multigraph(det, m)
    schemes: list[Scheme] = []
    capped = False
    for tp in enumerate_test_purposes(g):
        if max_schemes is not None and len(schemes) >= max_schemes:
            if strict_budget:
                raise BudgetExceeded(f"more than {max_schemes} schemes at m={m}")
            capped = True
            break
        schemes.append(_scheme_from_purpose(tp, det.alphabet))
    prov = Provenance(spec_sha256=models.canonical_sha256(spec), m=m,
                      transforms=(), enumeration=g.enumeration, capped=capped,
                      determinized=det is not spec, kind="schemes")
    return SchemeSuite(tuple(schemes), prov)


# ---------------------------------------------------------------------------
# validators


@dataclass(frozen=True)
class PurposeReport:
    verdicts_separated: bool
    deterministic: bool
    verdict_states_present: bool
    verdict_loops_complete: bool
    acyclic_except_verdict_loops: bool
    init_shape_ok: bool

    @property
    def structural_ok(self) -> bool:
        return self.verdicts_separated

    @property
    def tretmans_ok(self) -> bool:
        return (self.deterministic and self.verdict_states_present
                and self.verdict_loops_complete
                and self.acyclic_except_verdict_loops and self.init_shape_ok)


@dataclass(frozen=True)
class SchemeReport:
    acyclic: bool
    single_input: bool
    output_complete: bool
    single_fail_sink: bool

    @property
    def ok(self) -> bool:
        return (self.acyclic and self.single_input and self.output_complete
                and self.single_fail_sink)


def _acyclic(model: Iolts, ignore_self_loops_at: frozenset[str]) -> bool:
    adj: dict[str, list[str]] = {s: [] for s in model.states}
    for (src, _lab, tgt) in model.transitions:
        if src == tgt and src in ignore_self_loops_at:
            continue
        adj[src].append(tgt)
    color = dict.fromkeys(model.states, 0)
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


def validate_test_purpose(tp: TestPurpose) -> PurposeReport:
    """Structural checks plus the classical test-case shape conditions.

    Verdict states are special-cased: they must carry complete self-loop
    rows on the tester inputs and are exempt from the one-output rule.
    """
    model = tp.model
    inputs = model.alphabet.inputs
    verdicts = frozenset(s for s in (tp.fail_state, tp.pass_state) if s)

    separated = True
    if tp.fail_state and tp.pass_state:
        separated = not (
            _reachable_between(model, tp.fail_state, tp.pass_state)
            or _reachable_between(model, tp.pass_state, tp.fail_state))

    loops_ok = bool(tp.fail_state and tp.pass_state)
    if loops_ok:
        for v in verdicts:
            row = {(lab) for (src, lab, tgt) in model.transitions
                   if src == v and tgt == v}
            if row != inputs:
                loops_ok = False

    init_ok = True
    for s in sorted(model.states - verdicts):
        labels = _one_step_labels(model, s)
        emitted = labels & model.alphabet.outputs
        if len(emitted) != 1 or labels != emitted | inputs:
            init_ok = False
            break

    return PurposeReport(
        verdicts_separated=separated,
        deterministic=models.is_deterministic(model),
        verdict_states_present=bool(tp.fail_state and tp.pass_state),
        verdict_loops_complete=loops_ok,
        acyclic_except_verdict_loops=_acyclic(model, verdicts),
        init_shape_ok=init_ok,
    )


def validate_scheme(s: Scheme) -> SchemeReport:
    model = s.model
    report = models.classify(model)
    sinks = {st for st, flags in report.per_state.items() if flags.sink}
    fail_sink = (s.fail_state in sinks
                 and sinks <= {s.fail_state, s.pass_state})
    return SchemeReport(
        acyclic=_acyclic(model, frozenset()),
        single_input=report.single_input,
        output_complete=report.output_complete,
        single_fail_sink=fail_sink,
    )


# ---------------------------------------------------------------------------
# serialization


def _tester_to_model_dict(model: Iolts) -> dict:
    return models.model_to_dict(model)


def _purpose_from_model(model: Iolts, word: Trace | None) -> TestPurpose:
    return TestPurpose(model,
                       fail_state=FAIL if FAIL in model.states else None,
                       pass_state=PASS if PASS in model.states else None,
                       word=word)


def save_fault_model(fm: FaultModel | SchemeSuite, directory: str | Path) -> None:
    """Write one model file per tester plus the provenance record."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    testers = fm.purposes if isinstance(fm, FaultModel) else fm.schemes
    entries = []
    for i, tester in enumerate(testers):
        fname = f"tp{i:05d}.json"
        (directory / fname).write_text(models.model_to_json(tester.model))
        entries.append({"file": fname,
                        "word": list(tester.word) if tester.word else None})
    prov = {
        "kind": fm.provenance.kind,
        "spec_sha256": fm.provenance.spec_sha256,
        "m": fm.provenance.m,
        "transforms": list(fm.provenance.transforms),
        "enumeration": list(fm.provenance.enumeration),
        "capped": fm.provenance.capped,
        "determinized": fm.provenance.determinized,
        "purposes": entries,
    }
    (directory / "provenance.json").write_text(
        json.dumps(prov, indent=2, sort_keys=True) + "\n")


def load_fault_model(directory: str | Path) -> FaultModel:
    """Rebuild a fault model from a directory written by save_fault_model.

    A bare directory of model files (no provenance record) is accepted; the
    provenance is then synthesized with empty metadata.
    """
    directory = Path(directory)
    prov_path = directory / "provenance.json"
    if prov_path.exists():
        raw = json.loads(prov_path.read_text())
        entries = raw.get("purposes", [])
        purposes = []
        for entry in entries:
            model = models.model_from_json(
                (directory / entry["file"]).read_text(), tester=True)
            word = tuple(entry["word"]) if entry.get("word") else None
            purposes.append(_purpose_from_model(model, word))
        prov = Provenance(
            spec_sha256=raw.get("spec_sha256", ""), m=int(raw.get("m", 0)),
            transforms=tuple(raw.get("transforms", ())),
            enumeration=tuple(raw.get("enumeration", ())),
            capped=bool(raw.get("capped", False)),
            determinized=bool(raw.get("determinized", False)),
            kind=raw.get("kind", "faultmodel"))
        return FaultModel(tuple(purposes), prov)
    purposes = []
    for path in sorted(directory.glob("*.json")):
        model = models.model_from_json(path.read_text(), tester=True)
        purposes.append(_purpose_from_model(model, None))
    prov = Provenance(spec_sha256="", m=0, transforms=(), enumeration=())
    return FaultModel(tuple(purposes), prov)
