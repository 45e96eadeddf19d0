import random
from collections import deque

import pytest
from hypothesis import given, settings, strategies as st

from ioconf import automata, models
from ioconf.automata import (
    EPSILON,
    Fsa,
    accepts,
    complement,
    complete,
    concat,
    determinize,
    eliminate_epsilon,
    empty_language,
    fsa_to_lts,
    intersect,
    is_complete_fsa,
    is_deterministic_fsa,
    is_empty,
    language_equivalent,
    lts_to_fsa,
    parse_regex,
    product_union,
    shortest_witness,
    union_,
    words_up_to,
)
from ioconf.errors import (
    AmbiguousTokenization,
    NonTrivialFinalSet,
    NotComplete,
    NotDeterministic,
    RegexSyntaxError,
    UnknownAtom,
)

from conftest import random_iolts


def _brute_otr(model, max_len):
    """Observable traces by direct path search, independent of the automata."""
    words = set()
    adj = {}
    for (s, lab, t) in model.transitions:
        adj.setdefault(s, []).append((lab, t))
    queue = deque([(model.initial, ())])
    seen = set()
    while queue:
        state, word = queue.popleft()
        if (state, word) in seen or len(word) > max_len:
            continue
        seen.add((state, word))
        words.add(word)
        for (lab, t) in adj.get(state, ()):
            nxt = word if lab == "tau" else word + (lab,)
            if len(nxt) <= max_len:
                queue.append((t, nxt))
    return words


# --- induction ----------------------------------------------------------------

def test_induced_fsa_language(bct_lts):
    fsa = lts_to_fsa(bct_lts)
    assert accepts(fsa, ())
    assert accepts(fsa, tuple("bcbt"))
    assert accepts(fsa, tuple("bbbtbcbtb"))


def test_induced_fsa_rejects_non_trace(spec_b):
    fsa = lts_to_fsa(spec_b)
    assert not accepts(fsa, ("b", "a", "x"))
    assert accepts(fsa, ("b", "a"))


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_induced_language_is_observable_semantics(seed):
    rng = random.Random(seed)
    m = random_iolts(rng, rng.randint(1, 4), inputs=("a", "b"), outputs=("x",))
    fsa = lts_to_fsa(m)
    bound = 2 * len(m.states)
    brute = _brute_otr(m, bound)
    for word in words_up_to(fsa, bound):
        assert word in brute
    for word in brute:
        assert accepts(fsa, word)


def test_fsa_to_lts_roundtrip(spec_b):
    back = fsa_to_lts(lts_to_fsa(spec_b), spec_b.alphabet)
    assert back.transitions == spec_b.transitions


def test_fsa_to_lts_requires_all_final(spec_b):
    fsa = lts_to_fsa(spec_b)
    trimmed = Fsa(fsa.states, fsa.initial, fsa.alphabet, fsa.transitions,
                  frozenset({fsa.initial}))
    with pytest.raises(NonTrivialFinalSet):
        fsa_to_lts(trimmed, spec_b.alphabet)


def test_fsa_to_lts_drops_epsilon_self_loop():
    fsa = Fsa(frozenset({"p"}), "p", frozenset({"a"}),
              frozenset({("p", EPSILON, "p"), ("p", "a", "p")}),
              frozenset({"p"}))
    alphabet = models.ActionAlphabet(frozenset({"a"}), frozenset())
    lts = fsa_to_lts(fsa, alphabet)
    assert lts.transitions == {("p", "a", "p")}


def test_roundtrip_preserves_language(bct_lts):
    fsa = lts_to_fsa(bct_lts)
    back = lts_to_fsa(fsa_to_lts(fsa, bct_lts.alphabet))
    assert language_equivalent(fsa, back)


# --- epsilon elimination and determinization -------------------------------------

def test_eliminate_epsilon_chain():
    fsa = Fsa(frozenset({"s0", "s1", "s2"}), "s0", frozenset({"a"}),
              frozenset({("s0", EPSILON, "s1"), ("s1", "a", "s2")}),
              frozenset({"s2"}))
    out = eliminate_epsilon(fsa)
    assert ("s0", "a", "s2") in out.transitions
    assert all(lab != EPSILON for (_s, lab, _t) in out.transitions)
    assert language_equivalent(fsa, out)


def test_eliminate_epsilon_preserves_language(bct_lts):
    fsa = lts_to_fsa(bct_lts)
    out = eliminate_epsilon(fsa)
    assert language_equivalent(fsa, out)
    assert out.finals == out.states  # all-final preserved


def test_determinize(vending):
    fsa = lts_to_fsa(vending)
    det = determinize(fsa)
    assert is_deterministic_fsa(det)
    assert language_equivalent(fsa, det)
    assert det.finals == det.states


def test_determinize_subset_naming():
    fsa = Fsa(frozenset({"s", "p", "q"}), "s", frozenset({"a"}),
              frozenset({("s", "a", "p"), ("s", "a", "q")}),
              frozenset({"p", "q"}))
    det = determinize(fsa)
    assert "{p,q}" in det.states


# --- completion and complement ----------------------------------------------------

def test_complete_counts(spec_b):
    det = determinize(lts_to_fsa(spec_b))
    comp = complete(det)
    assert is_complete_fsa(comp)
    assert len(comp.states) == len(det.states) + 1
    assert len(comp.transitions) == len(comp.alphabet) * len(comp.states)
    # adding the sink is unconditional
    again = complete(comp)
    assert len(again.states) == len(comp.states) + 1


def test_complete_single_bare_state():
    fsa = Fsa(frozenset({"s"}), "s", frozenset({"a"}), frozenset(),
              frozenset())
    comp = complete(fsa)
    assert len(comp.states) == 2
    assert len(comp.transitions) == 2


def test_complete_requires_deterministic(vending):
    with pytest.raises(NotDeterministic):
        complete(lts_to_fsa(vending))


def test_complement_of_trace_language(spec_b):
    comp = complement(complete(determinize(lts_to_fsa(spec_b))))
    assert accepts(comp, ("b", "a", "x"))
    assert not accepts(comp, ("b", "a"))


def test_complement_preconditions(spec_b):
    det = determinize(lts_to_fsa(spec_b))
    with pytest.raises(NotComplete):
        complement(det)


def test_double_complement(spec_b):
    base = complete(determinize(lts_to_fsa(spec_b)))
    assert language_equivalent(base, complement(complement(base)))


def test_complement_all_final_is_empty():
    fsa = complete(Fsa(frozenset({"s"}), "s", frozenset({"a"}),
                       frozenset({("s", "a", "s")}), frozenset({"s"})))
    flipped = complement(fsa)
    # the added sink is non-final, so the flip accepts exactly its language
    assert shortest_witness(intersect(fsa, flipped)) is None


# --- products, unions, concatenation ------------------------------------------------

def test_intersection_with_complement_empty(spec_b):
    base = complete(determinize(lts_to_fsa(spec_b)))
    assert is_empty(intersect(base, complement(base)))


def test_concat_builds_output_extension(spec_b):
    letters = Fsa(frozenset({"u0", "u1"}), "u0", spec_b.alphabet.labels,
                  frozenset({("u0", "x", "u1")}), frozenset({"u1"}))
    d = concat(lts_to_fsa(spec_b), letters)
    assert accepts(d, ("a", "x"))
    assert accepts(d, ("b", "a", "x"))
    assert not accepts(d, ("a", "b"))


def test_product_of_extension_and_complement(spec_b):
    letters = Fsa(frozenset({"u0", "u1"}), "u0", spec_b.alphabet.labels,
                  frozenset({("u0", "x", "u1")}), frozenset({"u1"}))
    d = concat(lts_to_fsa(spec_b), letters)
    not_otr = complement(complete(determinize(lts_to_fsa(spec_b))))
    ts = intersect(determinize(d), not_otr)
    assert accepts(ts, ("b", "a", "x"))
    assert accepts(ts, ("x",))
    assert not accepts(ts, ("a", "x"))


def test_product_state_bound(spec_a, spec_b):
    a = complete(determinize(lts_to_fsa(spec_a)))
    b = complete(determinize(lts_to_fsa(spec_b)))
    prod = intersect(a, b)
    assert len(prod.states) <= len(a.states) * len(b.states)


def test_union_state_count_and_language(spec_a, spec_b):
    a = lts_to_fsa(spec_a)
    b = lts_to_fsa(spec_b)
    u = union_(a, b)
    assert len(u.states) == len(a.states) + len(b.states) + 1
    for word in [(), ("a",), ("a", "x"), ("b", "a")]:
        assert accepts(u, word) == (accepts(a, word) or accepts(b, word))


def test_product_union_requires_complete(spec_a, spec_b):
    with pytest.raises(NotComplete):
        product_union(lts_to_fsa(spec_a), lts_to_fsa(spec_b))


# --- regex front end -----------------------------------------------------------------

def test_regex_union_star():
    fsa = parse_regex("(a+b)*ax", {"a", "b", "x"})
    assert accepts(fsa, tuple("ababax"))
    assert accepts(fsa, tuple("ax"))
    assert not accepts(fsa, tuple("ba"))


def test_regex_star_inside():
    fsa = parse_regex("ba*b", {"a", "b", "x"})
    assert accepts(fsa, tuple("baab"))
    assert accepts(fsa, tuple("bb"))
    assert not accepts(fsa, tuple("bab" + "x"))


def test_regex_plus_sugar():
    fsa = parse_regex("ab^+x", {"a", "b", "x"})
    assert accepts(fsa, tuple("abx"))
    assert accepts(fsa, tuple("abbbx"))
    assert not accepts(fsa, tuple("ax"))
    alt = parse_regex("a b b* x", {"a", "b", "x"})
    assert language_equivalent(fsa, alt)


def test_regex_empty_and_group():
    with pytest.raises(RegexSyntaxError):
        parse_regex("", {"a"})
    fsa = parse_regex("()", {"a"})
    assert accepts(fsa, ())
    assert not accepts(fsa, ("a",))


def test_regex_unknown_atom():
    with pytest.raises(UnknownAtom):
        parse_regex("a z", {"a", "b"})


def test_regex_ambiguous_tokenization():
    with pytest.raises(AmbiguousTokenization):
        parse_regex("aab", {"a", "aa", "ab"})
    ok = parse_regex("a ab", {"a", "aa", "ab"})
    assert accepts(ok, ("a", "ab"))


def test_regex_syntax_errors():
    with pytest.raises(RegexSyntaxError):
        parse_regex("(a", {"a"})
    with pytest.raises(RegexSyntaxError):
        parse_regex("a+", {"a"})


# --- emptiness, witnesses, equivalence ------------------------------------------------

def test_no_finals_is_empty():
    assert is_empty(empty_language({"a"}))
    assert shortest_witness(empty_language({"a"})) is None


def test_witness_epsilon():
    fsa = Fsa(frozenset({"s"}), "s", frozenset({"a"}),
              frozenset({("s", "a", "s")}), frozenset({"s"}))
    assert shortest_witness(fsa) == ()


def test_witness_of_suite_product(spec_b):
    letters = Fsa(frozenset({"u0", "u1"}), "u0", spec_b.alphabet.labels,
                  frozenset({("u0", "x", "u1")}), frozenset({"u1"}))
    d = concat(lts_to_fsa(spec_b), letters)
    not_otr = complement(complete(determinize(lts_to_fsa(spec_b))))
    ts = intersect(determinize(d), not_otr)
    # the first output is disallowed at the start, so the minimum is length 1
    assert shortest_witness(ts) == ("x",)
    assert accepts(ts, ("b", "a", "x"))


def test_witness_is_accepted_and_minimal():
    fsa = parse_regex("ba*b + aa", {"a", "b"})
    w = shortest_witness(fsa)
    assert w == ("a", "a")
    assert accepts(fsa, w)


def test_words_up_to_matches_membership():
    fsa = parse_regex("(a+b)*ab", {"a", "b"})
    listed = set(words_up_to(fsa, 4))
    from itertools import product as iproduct
    for n in range(5):
        for word in iproduct(("a", "b"), repeat=n):
            assert (word in listed) == accepts(fsa, word)


def test_language_equivalent(spec_b, vending):
    fsa = lts_to_fsa(spec_b)
    assert language_equivalent(fsa, fsa)
    assert language_equivalent(lts_to_fsa(vending),
                               determinize(lts_to_fsa(vending)))
    a = parse_regex("a", {"a", "b"})
    b = parse_regex("b", {"a", "b"})
    assert not language_equivalent(a, b)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_determinize_preserves_language_random(seed):
    rng = random.Random(seed)
    m = random_iolts(rng, rng.randint(1, 4), inputs=("a", "b"), outputs=("x",))
    fsa = lts_to_fsa(m)
    det = determinize(fsa)
    assert is_deterministic_fsa(det)
    assert language_equivalent(fsa, det)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_deterministic_models_have_no_internal_moves(seed):
    rng = random.Random(seed)
    m = random_iolts(rng, rng.randint(1, 4), inputs=("a", "b"), outputs=("x",))
    if models.is_deterministic(m):
        assert all(lab != "tau" for (_s, lab, _t) in m.transitions)
