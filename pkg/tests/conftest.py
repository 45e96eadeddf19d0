"""Shared fixtures: the worked example models and random model generators."""
from __future__ import annotations

import random

import pytest

from ioconf.models import ActionAlphabet, Iolts, validate_model

# Five-state machine with internal returns; labels: one button, two drinks.
BCT_LTS = {
    "inputs": ["b"],
    "outputs": ["c", "t"],
    "states": ["s0", "s1", "s2", "s3", "s4"],
    "initial": "s0",
    "transitions": [["s0", "b", "s1"], ["s0", "b", "s2"], ["s1", "b", "s1"],
                    ["s1", "t", "s3"], ["s2", "b", "s2"], ["s2", "c", "s4"],
                    ["s3", "tau", "s0"], ["s4", "tau", "s0"]],
}

# Nondeterministic vending machine: one button, tea or coffee, internal reset.
VENDING = {
    "inputs": ["but"],
    "outputs": ["tea", "coffee"],
    "states": ["s0", "s1", "s2", "tea", "cof"],
    "initial": "s0",
    "transitions": [["s0", "but", "s1"], ["s0", "but", "s2"],
                    ["s1", "but", "s1"], ["s2", "but", "s2"],
                    ["s1", "tea", "tea"], ["s2", "coffee", "cof"],
                    ["tea", "tau", "s0"], ["cof", "tau", "s0"]],
}

# Deterministic spec/impl pair used for the regex-language conformance demos;
# the impl replaces the spec's s2-x-s3 edge by an a edge.
SPEC_A = {
    "inputs": ["a", "b"],
    "outputs": ["x"],
    "states": ["s0", "s1", "s2", "s3"],
    "initial": "s0",
    "transitions": [["s0", "a", "s1"], ["s1", "b", "s2"], ["s1", "x", "s2"],
                    ["s1", "a", "s3"], ["s0", "b", "s3"], ["s3", "a", "s3"],
                    ["s2", "b", "s2"], ["s2", "x", "s3"], ["s3", "b", "s0"]],
}
IMPL_A = {
    "inputs": ["a", "b"],
    "outputs": ["x"],
    "states": ["q0", "q1", "q2", "q3"],
    "initial": "q0",
    "transitions": [["q0", "a", "q1"], ["q1", "b", "q2"], ["q1", "x", "q2"],
                    ["q1", "a", "q3"], ["q0", "b", "q3"], ["q3", "a", "q3"],
                    ["q2", "b", "q2"], ["q2", "a", "q3"], ["q3", "b", "q0"]],
}
IMPL_A_EXTRA = {
    **IMPL_A,
    "transitions": IMPL_A["transitions"] + [["q3", "x", "q0"]],
}

# Deterministic spec/impl pair used for suite construction and test purposes;
# the impl adds an x edge out of q3.
SPEC_B = {
    "inputs": ["a", "b"],
    "outputs": ["x"],
    "states": ["s0", "s1", "s2", "s3"],
    "initial": "s0",
    "transitions": [["s0", "a", "s1"], ["s1", "a", "s1"], ["s1", "x", "s2"],
                    ["s1", "b", "s3"], ["s0", "b", "s3"], ["s3", "a", "s3"],
                    ["s2", "a", "s1"], ["s2", "b", "s3"], ["s3", "b", "s2"]],
}
IMPL_B = {
    "inputs": ["a", "b"],
    "outputs": ["x"],
    "states": ["q0", "q1", "q2", "q3"],
    "initial": "q0",
    "transitions": [["q0", "a", "q1"], ["q1", "a", "q1"], ["q1", "x", "q2"],
                    ["q1", "b", "q3"], ["q0", "b", "q3"], ["q3", "a", "q3"],
                    ["q2", "a", "q1"], ["q2", "b", "q3"], ["q3", "b", "q2"],
                    ["q3", "x", "q2"]],
}

# Quiescence demo before extension: s1 and s3 enable neither outputs nor
# internal moves.
DELTA_BASE = {
    "inputs": ["a"],
    "outputs": ["b"],
    "states": ["s0", "s1", "s2", "s3"],
    "initial": "s0",
    "transitions": [["s0", "a", "s1"], ["s0", "tau", "s1"], ["s1", "a", "s2"],
                    ["s2", "tau", "s3"], ["s2", "b", "s3"], ["s3", "a", "s3"]],
}


@pytest.fixture
def bct_lts():
    return validate_model(BCT_LTS)


@pytest.fixture
def vending():
    return validate_model(VENDING)


@pytest.fixture
def spec_a():
    return validate_model(SPEC_A)


@pytest.fixture
def impl_a():
    return validate_model(IMPL_A)


@pytest.fixture
def impl_a_extra():
    return validate_model(IMPL_A_EXTRA)


@pytest.fixture
def spec_b():
    return validate_model(SPEC_B)


@pytest.fixture
def impl_b():
    return validate_model(IMPL_B)


@pytest.fixture
def delta_base():
    return validate_model(DELTA_BASE)


def random_det_iolts(rng: random.Random, n_states: int,
                     inputs=("a",), outputs=("x",)) -> Iolts:
    """Reachable deterministic model: spanning edges plus random extras."""
    states = [f"n{i}" for i in range(n_states)]
    labels = sorted(set(inputs) | set(outputs))
    used: set[tuple[str, str]] = set()
    trans: set[tuple[str, str, str]] = set()
    for i in range(1, n_states):
        slots = [(p, lab) for p in range(i) for lab in labels
                 if (states[p], lab) not in used]
        parent, lab = rng.choice(slots)
        used.add((states[parent], lab))
        trans.add((states[parent], lab, states[i]))
    for s in states:
        for lab in labels:
            if (s, lab) not in used and rng.random() < 0.45:
                used.add((s, lab))
                trans.add((s, lab, states[rng.randrange(n_states)]))
    alphabet = ActionAlphabet(frozenset(inputs), frozenset(outputs))
    return Iolts(frozenset(states), states[0], alphabet, frozenset(trans))


def random_iolts(rng: random.Random, n_states: int, inputs=("a",),
                 outputs=("x",), tau_prob: float = 0.15) -> Iolts:
    """Reachable, possibly nondeterministic model with internal moves."""
    states = [f"n{i}" for i in range(n_states)]
    labels = sorted(set(inputs) | set(outputs))
    trans: set[tuple[str, str, str]] = set()
    for i in range(1, n_states):
        parent = states[rng.randrange(i)]
        if rng.random() < tau_prob and parent != states[i]:
            trans.add((parent, "tau", states[i]))
        else:
            trans.add((parent, rng.choice(labels), states[i]))
    extras = rng.randrange(n_states * 2 + 1)
    for _ in range(extras):
        src = rng.choice(states)
        tgt = rng.choice(states)
        if rng.random() < tau_prob:
            if src != tgt:
                trans.add((src, "tau", tgt))
        else:
            trans.add((src, rng.choice(labels), tgt))
    alphabet = ActionAlphabet(frozenset(inputs), frozenset(outputs))
    return Iolts(frozenset(states), states[0], alphabet, frozenset(trans))
