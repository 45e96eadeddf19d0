"""Language-level conformance relations and complete test suites.

A pair of regular languages (desired, forbidden) induces a conformance
relation on models; the matching complete test suite is the union of the
desired behaviours outside the specification with the forbidden behaviours
inside it.  Input/output conformance is the special case where the desired
language is every specification trace followed by one output.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import automata, models
from .automata import EPSILON, Fsa
from .errors import AlphabetMismatch
from .models import Iolts, Trace


@dataclass(frozen=True)
class Verdict:
    outcome: str  # "conforms" | "violates"
    witness: Trace | None = None
    clause: str | None = None  # "D" | "F"
    determinized: bool = False  # inputs were normalized before checking

    @property
    def conforms(self) -> bool:
        return self.outcome == "conforms"


@dataclass(frozen=True)
class TestSuiteFsa:
    """Automaton denoting the complete test suite for one spec and (D, F)."""

    automaton: Fsa


def _require_same_alphabet(spec: Iolts, impl: Iolts) -> None:
    if spec.alphabet != impl.alphabet:
        raise AlphabetMismatch("spec and impl must share one alphabet")


def _require_language_alphabet(spec: Iolts, lang: Fsa, which: str) -> None:
    if lang.alphabet != spec.alphabet.labels:
        raise AlphabetMismatch(
            f"{which} language alphabet {sorted(lang.alphabet)} differs from "
            f"the model labels {sorted(spec.alphabet.labels)}")


def _complete_otr_fsa(model: Iolts) -> Fsa:
    """Deterministic complete automaton for the observable semantics."""
    return automata.complete(automata.determinize(automata.lts_to_fsa(model)))


def build_test_suite(spec: Iolts, d: Fsa, f: Fsa) -> TestSuiteFsa:
    """Automaton for (D outside the spec traces) union (F inside them).

    Pipeline: complete deterministic spec-trace automaton, its complement,
    completed deterministic D and F, two products, then a product union.
    The state count is bounded by (n_S+1)^2 * n_D * n_F with n_S the
    deterministic spec size and n_D/n_F the completed language sizes.
    """
    _require_language_alphabet(spec, d, "desired")
    _require_language_alphabet(spec, f, "forbidden")
    otr = _complete_otr_fsa(spec)
    not_otr = automata.complement(otr)
    dc = automata.complete(automata.determinize(d))
    fc = automata.complete(automata.determinize(f))
    d_side = automata.intersect(dc, not_otr)
    f_side = automata.intersect(fc, otr)
    return TestSuiteFsa(automata.product_union(f_side, d_side))


def ioco_d_language(spec: Iolts) -> Fsa:
    """Every observable spec trace followed by exactly one output label."""
    one_output = Fsa(
        frozenset({"u0", "u1"}), "u0", spec.alphabet.labels,
        frozenset(("u0", lab, "u1") for lab in spec.outputs),
        frozenset({"u1"}))
    return automata.eliminate_epsilon(
        automata.concat(automata.lts_to_fsa(spec), one_output))


def _impl_trace_fsa(impl: Iolts) -> Fsa:
    return automata.determinize(automata.lts_to_fsa(impl))


def check_conf(spec: Iolts, impl: Iolts, d: Fsa, f: Fsa) -> Verdict:
    """Language-pair conformance with shortest witness and clause attribution.

    Violating behaviours are impl traces in D outside the spec traces
    (D-clause) or in F inside them (F-clause); on equal witness length the
    D-clause is reported.
    """
    _require_same_alphabet(spec, impl)
    _require_language_alphabet(spec, d, "desired")
    _require_language_alphabet(spec, f, "forbidden")
    normalized = not (models.is_deterministic(spec)
                      and models.is_deterministic(impl))
    otr = _complete_otr_fsa(spec)
    not_otr = automata.complement(otr)
    itr = _impl_trace_fsa(impl)
    w_d = automata.shortest_witness(
        automata.intersect(automata.intersect(itr, d), not_otr))
    w_f = automata.shortest_witness(
        automata.intersect(automata.intersect(itr, f), otr))
    if w_d is None and w_f is None:
        return Verdict("conforms", determinized=normalized)
    if w_f is None or (w_d is not None and len(w_d) <= len(w_f)):
        return Verdict("violates", w_d, "D", normalized)
    return Verdict("violates", w_f, "F", normalized)


def witnesses_up_to(spec: Iolts, impl: Iolts, d: Fsa, f: Fsa,
                    max_len: int) -> list[tuple[Trace, str]]:
    """Every violating behaviour of length <= max_len, shortlex, with clause."""
    _require_same_alphabet(spec, impl)
    otr = _complete_otr_fsa(spec)
    not_otr = automata.complement(otr)
    itr = _impl_trace_fsa(impl)
    d_side = automata.intersect(automata.intersect(itr, d), not_otr)
    f_side = automata.intersect(automata.intersect(itr, f), otr)
    found = [(w, "D") for w in automata.words_up_to(d_side, max_len)]
    found += [(w, "F") for w in automata.words_up_to(f_side, max_len)]
    return sorted(found, key=lambda p: (len(p[0]), p[0], p[1]))


def check_ioco(spec: Iolts, impl: Iolts) -> Verdict:
    """Input/output conformance via the two-sink construction.

    The deterministic spec-trace automaton is extended with a final sink
    reached on any missing output and a non-final sink on any missing input;
    its language is exactly the traces that end with a first disallowed
    output.  Intersection with the impl traces decides conformance in time
    proportional to the product size.
    """
    _require_same_alphabet(spec, impl)
    normalized = not (models.is_deterministic(spec)
                      and models.is_deterministic(impl))
    sa = automata.determinize(automata.lts_to_fsa(spec))
    fail = automata._fresh("f", sa.states)
    dead = automata._fresh("e", sa.states | {fail})
    rows = {(src, lab) for (src, lab, _t) in sa.transitions}
    trans = set(sa.transitions)
    for s in sa.states:
        for lab in spec.outputs:
            if (s, lab) not in rows:
                trans.add((s, lab, fail))
        for lab in spec.inputs:
            if (s, lab) not in rows:
                trans.add((s, lab, dead))
    suite = Fsa(sa.states | {fail, dead}, sa.initial, sa.alphabet,
                frozenset(trans), frozenset({fail}))
    witness = automata.shortest_witness(
        automata.intersect(_impl_trace_fsa(impl), suite))
    if witness is None:
        return Verdict("conforms", determinized=normalized)
    return Verdict("violates", witness, "D", normalized)


def check_adherence(impl: Iolts, suite: TestSuiteFsa) -> Verdict:
    """An implementation adheres when none of its traces lies in the suite."""
    witness = automata.shortest_witness(
        automata.intersect(_impl_trace_fsa(impl), suite.automaton))
    if witness is None:
        return Verdict("conforms")
    return Verdict("violates", witness)


def finite_witnesses(spec: Iolts, impl: Iolts, d: Fsa,
                     f: Fsa) -> tuple[frozenset[Trace], frozenset[Trace]]:
    """Singleton (or empty) finite sub-languages certifying the verdict.

    The returned pair (D', F') satisfies: the implementation conforms for
    (D, F) iff it conforms for (D', F').
    """
    _require_same_alphabet(spec, impl)
    otr = _complete_otr_fsa(spec)
    not_otr = automata.complement(otr)
    itr = _impl_trace_fsa(impl)
    w_d = automata.shortest_witness(
        automata.intersect(automata.intersect(itr, d), not_otr))
    w_f = automata.shortest_witness(
        automata.intersect(automata.intersect(itr, f), otr))
    d_fin = frozenset() if w_d is None else frozenset({w_d})
    f_fin = frozenset() if w_f is None else frozenset({w_f})
    return d_fin, f_fin
