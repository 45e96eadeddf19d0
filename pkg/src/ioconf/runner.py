"""Test execution: synchronous runs, fault-model verdicts, the acyclic
defeat construction, and the golden-ratio counting results."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

from . import automata, models
from .automata import EPSILON, Fsa
from .errors import AlphabetMismatch, CyclicPurpose, NonCanonicalSpec
from .models import FAIL, PASS, ActionAlphabet, Iolts, Lts, Trace
from .testgen import FaultModel, Scheme, SchemeSuite, TestPurpose

PHI = (1 + math.sqrt(5)) / 2


@dataclass(frozen=True)
class CrossProduct:
    """Synchronous composition of a tester and an implementation."""

    model: Lts
    pairs: dict[str, tuple[str, str]]


@dataclass(frozen=True)
class PurposeResult:
    name: str
    verdict: str  # "pass" | "fail"
    witness: Trace | None = None
    reached_pass: bool = False

    @property
    def inconclusive(self) -> bool:
        # a pass that visited neither verdict state decides nothing
        return self.verdict == "pass" and not self.reached_pass


@dataclass(frozen=True)
class RunReport:
    aggregate: str  # "pass" | "fail"
    purposes: tuple[PurposeResult, ...]

    def to_dict(self) -> dict:
        return {
            "aggregate": self.aggregate,
            "purposes": [
                {"name": r.name, "verdict": r.verdict,
                 "witness": list(r.witness) if r.witness is not None else None}
                for r in self.purposes
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _check_orientation(tester_alpha: ActionAlphabet, impl: Iolts) -> None:
    complementary = (tester_alpha.inputs == impl.outputs
                     and tester_alpha.outputs == impl.inputs)
    identical = (tester_alpha.inputs == impl.inputs
                 and tester_alpha.outputs == impl.outputs)
    if not (complementary or identical):
        raise AlphabetMismatch(
            "tester and implementation alphabets neither match nor mirror")


def cross_product(tester: TestPurpose | Scheme | Iolts,
                  impl: Iolts) -> CrossProduct:
    """Pairwise synchronous product; internal moves interleave freely."""
    tester_model = tester.model if hasattr(tester, "model") else tester
    _check_orientation(tester_model.alphabet, impl)
    product, pairs = models.synchronous_product(tester_model, impl,
                                                impl.alphabet)
    return CrossProduct(product, pairs)


def passes(impl: Iolts, tester: TestPurpose | Scheme) -> PurposeResult:
    """Fail iff the product reaches the tester's fail state; shortest trace."""
    cp = cross_product(tester, impl)
    fail_state = tester.fail_state
    pass_state = getattr(tester, "pass_state", None)
    reached_pass = pass_state is not None and any(
        t == pass_state for (t, _q) in cp.pairs.values())
    if fail_state is None:
        return PurposeResult(tester.name, "pass", reached_pass=reached_pass)
    finals = frozenset(name for name, (t, _q) in cp.pairs.items()
                       if t == fail_state)
    if not finals:
        return PurposeResult(tester.name, "pass", reached_pass=reached_pass)
    fsa = Fsa(cp.model.states, cp.model.initial, cp.model.alphabet.labels,
              frozenset((s, EPSILON if lab == cp.model.alphabet.internal
                         else lab, t)
                        for (s, lab, t) in cp.model.transitions),
              finals)
    witness = automata.shortest_witness(fsa)
    if witness is None:  # fail pairs exist but only via unreachable paths
        return PurposeResult(tester.name, "pass", reached_pass=reached_pass)
    return PurposeResult(tester.name, "fail", witness, reached_pass)


def _testers(fm: FaultModel | SchemeSuite):
    return fm.purposes if isinstance(fm, FaultModel) else fm.schemes


def _run_one(args) -> PurposeResult:
    impl, tester = args
    return passes(impl, tester)


def run_fault_model(impl: Iolts, fm: FaultModel | SchemeSuite,
                    jobs: int = 1) -> RunReport:
    """Aggregate pass iff every tester passes; failures carry witnesses."""
    testers = _testers(fm)
    if jobs > 1 and len(testers) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = tuple(pool.map(_run_one,
                                     ((impl, t) for t in testers)))
    else:
        results = tuple(passes(impl, t) for t in testers)
    aggregate = "pass" if all(r.verdict == "pass" for r in results) else "fail"
    return RunReport(aggregate, results)


# ---------------------------------------------------------------------------
# the acyclic defeat construction


def canonical_spec() -> Iolts:
    """One state, one input self-loop, one never-emitted output."""
    return Iolts(frozenset({"s0"}), "s0",
                 ActionAlphabet(frozenset({"a"}), frozenset({"x"})),
                 frozenset({("s0", "a", "s0")}))


def _longest_observable(tp: TestPurpose) -> int:
    """Longest observable trace, self-loops at verdict states excluded."""
    model = tp.model
    verdicts = {tp.fail_state, tp.pass_state} - {None}
    adj: dict[str, list[tuple[str, int]]] = {s: [] for s in model.states}
    for (src, lab, tgt) in model.transitions:
        if src == tgt and src in verdicts:
            continue
        weight = 0 if lab == model.alphabet.internal else 1
        adj[src].append((tgt, weight))
    best: dict[str, int] = {}
    color = dict.fromkeys(model.states, 0)

    def visit(node: str) -> int:
        if color[node] == 1:
            raise CyclicPurpose(f"cycle through {node!r}")
        if color[node] == 2:
            return best[node]
        color[node] = 1
        score = 0
        for (tgt, w) in adj[node]:
            score = max(score, w + visit(tgt))
        color[node] = 2
        best[node] = score
        return score

    return visit(model.initial)


def defeat_acyclic_fault_model(fm: FaultModel) -> Iolts:
    """Implementation that sneaks past every acyclic purpose for the
    canonical spec: a chain one step longer than any purpose can observe,
    then the forbidden output.

    The result always violates input/output conformance against the
    canonical spec yet passes the given fault model.
    """
    spec = canonical_spec()
    k = 0
    for tp in fm.purposes:
        tester_alpha = tp.model.alphabet
        if not (tester_alpha.inputs == spec.outputs
                and tester_alpha.outputs == spec.inputs):
            raise NonCanonicalSpec(
                "purpose alphabet does not mirror the canonical spec")
        k = max(k, _longest_observable(tp))
    for tp in fm.purposes:
        if passes(spec, tp).verdict != "pass":
            raise NonCanonicalSpec(
                "fault model rejects the canonical spec itself")
    states = [f"q{i}" for i in range(k + 1)] + ["q"]
    trans = {(f"q{i}", "a", f"q{i + 1}") for i in range(k)}
    trans |= {(f"q{k}", "x", "q"), (f"q{k}", "a", f"q{k}"), ("q", "a", "q")}
    return Iolts(frozenset(states), "q0", spec.alphabet, frozenset(trans))


# ---------------------------------------------------------------------------
# counting the exponential lower bound


@dataclass(frozen=True)
class LowerBound:
    m: int
    f_m: int
    bound: float

    def to_dict(self) -> dict:
        return {"m": self.m, "F_m": self.f_m, "bound": self.bound}


def words_zero_oneone(length: int) -> Iterator[str]:
    """All words of the given length over the blocks '0' and '11'."""
    if length == 0:
        yield ""
        return
    for w in words_zero_oneone(length - 1):
        yield "0" + w
    if length >= 2:
        for w in words_zero_oneone(length - 2):
            yield "11" + w


def count_lower_bound(m: int) -> LowerBound:
    """Number of length-m block words, via the binomial sum and by brute
    force enumeration; the two must agree.  ``bound`` is phi^m / sqrt(5)."""
    by_sum = sum(math.comb(m - i, i) for i in range(m // 2 + 1))
    by_enum = sum(1 for _ in words_zero_oneone(m))
    if by_sum != by_enum:
        raise AssertionError(
            f"count mismatch at m={m}: sum {by_sum} vs enumeration {by_enum}")
    return LowerBound(m, by_sum, PHI ** m / math.sqrt(5))


# ---------------------------------------------------------------------------
# adversarial families


@dataclass(frozen=True)
class AdversarialFamily:
    spec: Iolts
    impls: tuple[Iolts, ...]
    alphas: tuple[str, ...]


def _binary_alphabet(outputs: Iterable[str]) -> ActionAlphabet:
    return ActionAlphabet(frozenset({"0", "1"}), frozenset(outputs))


def loop_spec_01x() -> Iolts:
    """Three-state spec over inputs 0/1 and output x; the block words over
    '0'/'11' are exactly its x-free traces returning to the start."""
    alphabet = _binary_alphabet({"x"})
    trans = {("s0", "0", "s0"), ("s0", "1", "s1"), ("s1", "0", "s1"),
             ("s1", "1", "s0"), ("s1", "x", "s2"), ("s2", "0", "s2"),
             ("s2", "1", "s2")}
    return Iolts(frozenset({"s0", "s1", "s2"}), "s0", alphabet,
                 frozenset(trans))


def chained_spec_01ax(k: int) -> Iolts:
    """The 0/1/a/x spec with k input-states feeding a length-k output chain."""
    if k < 3:
        raise ValueError("the chained spec needs k >= 3")
    alphabet = _binary_alphabet({"a", "x"})
    states = {f"s{i}" for i in range(k + 1)}
    trans = {("s0", "0", "s0"), ("s0", "1", "s1"), ("s0", "a", "s2"),
             ("s1", "0", "s1"), ("s1", "1", "s0"), ("s1", "x", "s2"),
             ("s1", "a", "s3")}
    for i in range(2, k):
        trans |= {(f"s{i}", "0", f"s{i + 1}"), (f"s{i}", "1", f"s{i + 1}")}
    trans.add((f"s{k}", "x", "s0"))
    return Iolts(frozenset(states), "s0", alphabet, frozenset(trans))


def _flip(bit: str) -> str:
    return "1" if bit == "0" else "0"


def _chain_impl(alpha: str, outputs: frozenset[str],
                input_enabled_tail: bool) -> Iolts:
    """Deterministic chain that executes alpha then emits x.

    With ``input_enabled_tail`` the two post-chain states also absorb every
    input (the fully input-enabled variant); without it they stay bare so
    that all input-states remain pairwise distinguishable.
    """
    r = len(alpha)
    alphabet = _binary_alphabet(outputs)
    states = {f"q{i}" for i in range(r + 2)} | {PASS}
    trans: set[tuple[str, str, str]] = set()
    for i, bit in enumerate(alpha):
        trans.add((f"q{i}", bit, f"q{i + 1}"))
        trans.add((f"q{i}", _flip(bit), PASS))
    trans.add((f"q{r}", "x", f"q{r + 1}"))
    trans |= {(PASS, "0", PASS), (PASS, "1", PASS)}
    if input_enabled_tail:
        trans |= {(f"q{r}", "0", PASS), (f"q{r}", "1", PASS),
                  (f"q{r + 1}", "0", f"q{r + 1}"),
                  (f"q{r + 1}", "1", f"q{r + 1}")}
    return Iolts(frozenset(states), "q0", alphabet, frozenset(trans))


def adversarial_family(m: int, variant: str = "tretmans") -> AdversarialFamily:
    """One violating implementation per block word of length 1..m-3.

    Every member violates input/output conformance against the family spec
    with the witness alpha+x, yet any two members of equal length force
    distinct deterministic output-deterministic (or single-input) testers.
    """
    if variant == "tretmans":
        spec = loop_spec_01x()
        tail = True
    elif variant == "simao":
        spec = chained_spec_01ax(max(m, 3))
        tail = False
    else:
        raise ValueError(f"unknown variant {variant!r}")
    alphas = []
    for r in range(1, max(m - 3, 0) + 1):
        alphas.extend(sorted(words_zero_oneone(r)))
    impls = tuple(_chain_impl(a, spec.outputs, tail) for a in alphas)
    return AdversarialFamily(spec, impls, tuple(alphas))
