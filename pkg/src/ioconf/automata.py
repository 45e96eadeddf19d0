"""Finite-automata algebra over action labels.

Carries all regular-language machinery: induction from transition systems
(internal moves become epsilon), epsilon elimination, subset-construction
determinization, completion, boolean operations, concatenation, a small
regex front end, and emptiness with shortest-witness extraction.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from . import models
from .errors import (
    AlphabetMismatch,
    AmbiguousTokenization,
    DanglingEndpoint,
    ModelFormatError,
    NonTrivialFinalSet,
    NotComplete,
    NotDeterministic,
    RegexSyntaxError,
    UnknownAtom,
    UnknownLabel,
)
from .models import Iolts, Lts, Trace

EPSILON = "eps"


@dataclass(frozen=True)
class Fsa:
    """Nondeterministic finite automaton with epsilon moves."""

    states: frozenset[str]
    initial: str
    alphabet: frozenset[str]
    transitions: frozenset[tuple[str, str, str]]
    finals: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "alphabet", frozenset(self.alphabet))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if self.initial not in self.states:
            raise DanglingEndpoint(f"initial {self.initial!r} not a state")
        if not self.finals <= self.states:
            raise DanglingEndpoint("final states outside the state set")
        if EPSILON in self.alphabet:
            raise UnknownLabel(f"{EPSILON!r} is the reserved epsilon spelling")
        for (src, lab, tgt) in self.transitions:
            if src not in self.states or tgt not in self.states:
                raise DanglingEndpoint(f"transition {(src, lab, tgt)} dangles")
            if lab != EPSILON and lab not in self.alphabet:
                raise UnknownLabel(f"label {lab!r} not in the alphabet")


@lru_cache(maxsize=2048)
def _adj(a: Fsa) -> Mapping[str, Mapping[str, tuple[str, ...]]]:
    adj: dict[str, dict[str, list[str]]] = {s: {} for s in a.states}
    for (src, lab, tgt) in a.transitions:
        adj[src].setdefault(lab, []).append(tgt)
    return {s: {lab: tuple(sorted(set(ts))) for lab, ts in row.items()}
            for s, row in adj.items()}


@lru_cache(maxsize=2048)
def _eps_closures(a: Fsa) -> Mapping[str, frozenset[str]]:
    adj = _adj(a)
    out = {}
    for start in a.states:
        seen = {start}
        queue = deque([start])
        while queue:
            for nxt in adj[queue.popleft()].get(EPSILON, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        out[start] = frozenset(seen)
    return out


def _closure(a: Fsa, states: Iterable[str]) -> frozenset[str]:
    clo = _eps_closures(a)
    out: set[str] = set()
    for s in states:
        out |= clo[s]
    return frozenset(out)


def is_deterministic_fsa(a: Fsa) -> bool:
    """No epsilon moves and at most one target per (state, symbol)."""
    seen = set()
    for (src, lab, _tgt) in a.transitions:
        if lab == EPSILON or (src, lab) in seen:
            return False
        seen.add((src, lab))
    return True


def is_complete_fsa(a: Fsa) -> bool:
    rows = {(src, lab) for (src, lab, _t) in a.transitions if lab != EPSILON}
    return all((s, x) in rows for s in a.states for x in a.alphabet)


def accepts(a: Fsa, word: Iterable[str]) -> bool:
    """Subset simulation; tolerates nondeterminism and epsilon moves."""
    cur = _closure(a, (a.initial,))
    adj = _adj(a)
    for sym in word:
        nxt: set[str] = set()
        for s in cur:
            nxt.update(adj[s].get(sym, ()))
        cur = _closure(a, nxt)
        if not cur:
            return False
    return bool(cur & a.finals)


# ---------------------------------------------------------------------------
# induction to/from transition systems


def lts_to_fsa(model: Lts) -> Fsa:
    """Induced automaton: internal moves become epsilon, every state final.
    Its language is exactly the observable semantics of the model."""
    tau = model.alphabet.internal
    trans = frozenset((s, EPSILON if lab == tau else lab, t)
                      for (s, lab, t) in model.transitions)
    return Fsa(model.states, model.initial, model.alphabet.labels, trans,
               model.states)


def fsa_to_lts(a: Fsa, alphabet: models.ActionAlphabet) -> Lts:
    """Inverse induction.  Requires every state final; epsilon self-loops are
    dropped and unreachable states pruned to restore the model invariants."""
    if a.finals != a.states:
        raise NonTrivialFinalSet("only all-final automata induce models")
    if a.alphabet != alphabet.labels:
        raise AlphabetMismatch("alphabet does not cover the automaton labels")
    trans = {(s, alphabet.internal if lab == EPSILON else lab, t)
             for (s, lab, t) in a.transitions
             if not (lab == EPSILON and s == t)}
    reach = models._reachable_states(a.states, a.initial, trans)
    trans = frozenset(t for t in trans if t[0] in reach and t[2] in reach)
    return Lts(reach, a.initial, alphabet, trans)


def determinize_iolts(model: Iolts) -> Iolts:
    """Observable-trace-preserving deterministic model (subset construction)."""
    if models.is_deterministic(model):
        return model
    det = determinize(lts_to_fsa(model))
    lts = fsa_to_lts(det, model.alphabet)
    return Iolts(lts.states, lts.initial, lts.alphabet, lts.transitions)


# ---------------------------------------------------------------------------
# core constructions


def eliminate_epsilon(a: Fsa) -> Fsa:
    """Language-preserving removal of all epsilon moves (same state set)."""
    adj = _adj(a)
    clo = _eps_closures(a)
    trans = set()
    finals = set(a.finals)
    for s in a.states:
        for r in clo[s]:
            if r in a.finals:
                finals.add(s)
            for lab, targets in adj[r].items():
                if lab == EPSILON:
                    continue
                for t in targets:
                    trans.add((s, lab, t))
    return Fsa(a.states, a.initial, a.alphabet, frozenset(trans),
               frozenset(finals))


def _subset_name(states: frozenset[str]) -> str:
    return "{" + ",".join(sorted(states)) + "}"


def determinize(a: Fsa) -> Fsa:
    """Subset construction; state names are the sorted source-name sets."""
    base = eliminate_epsilon(a)
    adj = _adj(base)
    start = frozenset({base.initial})
    seen = {start}
    queue = deque([start])
    trans = set()
    while queue:
        cur = queue.popleft()
        by_label: dict[str, set[str]] = {}
        for s in cur:
            for lab, targets in adj[s].items():
                by_label.setdefault(lab, set()).update(targets)
        for lab in sorted(by_label):
            nxt = frozenset(by_label[lab])
            trans.add((_subset_name(cur), lab, _subset_name(nxt)))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    names = frozenset(_subset_name(s) for s in seen)
    finals = frozenset(_subset_name(s) for s in seen if s & base.finals)
    return Fsa(names, _subset_name(start), base.alphabet, frozenset(trans),
               finals)


def _fresh(name: str, taken: frozenset[str]) -> str:
    while name in taken:
        name += "_"
    return name


def complete(a: Fsa) -> Fsa:
    """Total transition function via one fresh non-final sink.

    The sink is always added, so the result has exactly |A|*(|S|+1)
    transitions regardless of whether the input was already complete.
    """
    if not is_deterministic_fsa(a):
        raise NotDeterministic("completion needs a deterministic input")
    sink = _fresh("e", a.states)
    rows = {(src, lab) for (src, lab, _t) in a.transitions}
    trans = set(a.transitions)
    for s in a.states:
        for lab in a.alphabet:
            if (s, lab) not in rows:
                trans.add((s, lab, sink))
    for lab in a.alphabet:
        trans.add((sink, lab, sink))
    return Fsa(a.states | {sink}, a.initial, a.alphabet, frozenset(trans),
               a.finals)


def complement(a: Fsa) -> Fsa:
    """Flip final states; requires a deterministic complete input."""
    if not is_deterministic_fsa(a):
        raise NotDeterministic("complement needs a deterministic input")
    if not is_complete_fsa(a):
        raise NotComplete("complement needs a complete input")
    return Fsa(a.states, a.initial, a.alphabet, a.transitions,
               a.states - a.finals)


def _pair_name(p: str, q: str) -> str:
    return f"({p}|{q})"


def _product(a: Fsa, b: Fsa, final_rule) -> Fsa:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("product needs one shared alphabet")
    a = eliminate_epsilon(a)
    b = eliminate_epsilon(b)
    adj_a = _adj(a)
    adj_b = _adj(b)
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    trans = set()
    while queue:
        p, q = queue.popleft()
        for lab in adj_a[p].keys() & adj_b[q].keys():
            for tp in adj_a[p][lab]:
                for tq in adj_b[q][lab]:
                    trans.add((_pair_name(p, q), lab, _pair_name(tp, tq)))
                    if (tp, tq) not in seen:
                        seen.add((tp, tq))
                        queue.append((tp, tq))
    states = frozenset(_pair_name(p, q) for (p, q) in seen)
    finals = frozenset(_pair_name(p, q) for (p, q) in seen
                       if final_rule(p in a.finals, q in b.finals))
    return Fsa(states, _pair_name(*start), a.alphabet, frozenset(trans),
               finals)


def intersect(a: Fsa, b: Fsa) -> Fsa:
    """Reachable product; at most |A|*|B| states."""
    return _product(a, b, lambda fa, fb: fa and fb)


def product_union(a: Fsa, b: Fsa) -> Fsa:
    """Product with either-final acceptance.  Correct as a union only when
    both inputs are complete; used by the test-suite pipeline."""
    if not (is_complete_fsa(a) and is_complete_fsa(b)):
        raise NotComplete("product union needs complete inputs")
    return _product(a, b, lambda fa, fb: fa or fb)


def _disjoin(a: Fsa, prefix: str) -> Fsa:
    ren = {s: prefix + s for s in a.states}
    return Fsa(frozenset(ren.values()), ren[a.initial], a.alphabet,
               frozenset((ren[s], lab, ren[t]) for (s, lab, t) in a.transitions),
               frozenset(ren[s] for s in a.finals))


def union_(a: Fsa, b: Fsa) -> Fsa:
    """Epsilon-linked union: one fresh initial, |A|+|B|+1 states."""
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("union needs one shared alphabet")
    da = _disjoin(a, "l.")
    db = _disjoin(b, "r.")
    init = "u"
    trans = da.transitions | db.transitions | {
        (init, EPSILON, da.initial), (init, EPSILON, db.initial)}
    return Fsa(da.states | db.states | {init}, init, a.alphabet,
               frozenset(trans), da.finals | db.finals)


def concat(a: Fsa, b: Fsa) -> Fsa:
    """Concatenation: epsilon edges from the left finals to the right start."""
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("concatenation needs one shared alphabet")
    da = _disjoin(a, "l.")
    db = _disjoin(b, "r.")
    trans = da.transitions | db.transitions | {
        (f, EPSILON, db.initial) for f in da.finals}
    return Fsa(da.states | db.states, da.initial, a.alphabet,
               frozenset(trans), db.finals)


# ---------------------------------------------------------------------------
# emptiness / witnesses / equivalence


def shortest_witness(a: Fsa) -> Trace | None:
    """Shortest accepted word, ties broken label-lexicographically.

    Returns None when the language is empty; the empty tuple is the witness
    for languages containing the empty word.
    """
    start = _closure(a, (a.initial,))
    if start & a.finals:
        return ()
    adj = _adj(a)
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        cur, word = queue.popleft()
        by_label: dict[str, set[str]] = {}
        for s in cur:
            for lab, targets in adj[s].items():
                if lab != EPSILON:
                    by_label.setdefault(lab, set()).update(targets)
        for lab in sorted(by_label):
            nxt = _closure(a, by_label[lab])
            if nxt & a.finals:
                return word + (lab,)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, word + (lab,)))
    return None


def is_empty(a: Fsa) -> bool:
    return shortest_witness(a) is None


def words_up_to(a: Fsa, max_len: int) -> list[Trace]:
    """All accepted words of length <= max_len, in shortlex order."""
    out: list[Trace] = []
    adj = _adj(a)
    frontier: list[tuple[frozenset[str], Trace]] = [
        (_closure(a, (a.initial,)), ())]
    for _ in range(max_len + 1):
        nxt_frontier = []
        for cur, word in frontier:
            if cur & a.finals:
                out.append(word)
            if len(word) == max_len:
                continue
            by_label: dict[str, set[str]] = {}
            for s in cur:
                for lab, targets in adj[s].items():
                    if lab != EPSILON:
                        by_label.setdefault(lab, set()).update(targets)
            for lab in sorted(by_label):
                nxt_frontier.append((_closure(a, by_label[lab]), word + (lab,)))
        frontier = nxt_frontier
        if not frontier:
            break
    return out


def language_equivalent(a: Fsa, b: Fsa) -> bool:
    """Symmetric-difference emptiness test."""
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("equivalence needs one shared alphabet")
    ca = complete(determinize(a))
    cb = complete(determinize(b))
    return (is_empty(intersect(ca, complement(cb)))
            and is_empty(intersect(cb, complement(ca))))


# ---------------------------------------------------------------------------
# regex front end


@dataclass(frozen=True)
class RegexAst:
    pass


@dataclass(frozen=True)
class Atom(RegexAst):
    label: str


@dataclass(frozen=True)
class EmptyWord(RegexAst):
    pass


@dataclass(frozen=True)
class Union(RegexAst):
    left: RegexAst
    right: RegexAst


@dataclass(frozen=True)
class Concat(RegexAst):
    left: RegexAst
    right: RegexAst


@dataclass(frozen=True)
class Star(RegexAst):
    inner: RegexAst


@dataclass(frozen=True)
class Plus(RegexAst):
    """Postfix ^+ sugar: one or more repetitions."""

    inner: RegexAst


_SPECIALS = ("+", "*", "(", ")")


def _tokenize(text: str, labels: list[str]) -> list[str]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SPECIALS:
            tokens.append(ch)
            i += 1
            continue
        if ch == "^":
            if i + 1 < n and text[i + 1] == "+":
                tokens.append("^+")
                i += 2
                continue
            raise RegexSyntaxError(f"stray '^' at position {i}")
        match = None
        for lab in labels:  # labels pre-sorted longest first
            if text.startswith(lab, i):
                match = lab
                break
        if match is None:
            if _segmentable(text, labels):
                raise AmbiguousTokenization(
                    f"no longest-match label at position {i}, but the input "
                    "tokenizes under another segmentation; separate atoms "
                    "with whitespace")
            raise UnknownAtom(f"no alphabet label matches at position {i}")
        tokens.append(match)
        i += len(match)
    return tokens


def _segmentable(text: str, labels: list[str]) -> bool:
    # can the whole input be split into labels/specials at all?
    stripped = text
    n = len(stripped)
    ok = [False] * (n + 1)
    ok[0] = True
    for i in range(n):
        if not ok[i]:
            continue
        ch = stripped[i]
        if ch.isspace() or ch in _SPECIALS:
            ok[i + 1] = True
            continue
        if ch == "^" and i + 1 < n and stripped[i + 1] == "+":
            ok[i + 2] = True
            continue
        for lab in labels:
            if stripped.startswith(lab, i):
                ok[i + len(lab)] = True
    return ok[n]


class _Parser:
    def __init__(self, tokens: list[str], alphabet: frozenset[str]):
        self.tokens = tokens
        self.pos = 0
        self.alphabet = alphabet

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> RegexAst:
        node = self.expr()
        if self.peek() is not None:
            raise RegexSyntaxError(f"unexpected token {self.peek()!r}")
        return node

    def expr(self) -> RegexAst:
        node = self.term()
        while self.peek() == "+":
            self.take()
            node = Union(node, self.term())
        return node

    def term(self) -> RegexAst:
        parts = []
        while self.peek() is not None and self.peek() not in ("+", ")"):
            parts.append(self.factor())
        if not parts:
            raise RegexSyntaxError("empty term")
        node = parts[0]
        for p in parts[1:]:
            node = Concat(node, p)
        return node

    def factor(self) -> RegexAst:
        tok = self.take()
        if tok == "(":
            if self.peek() == ")":
                self.take()
                node: RegexAst = EmptyWord()
            else:
                node = self.expr()
                if self.take() != ")":
                    raise RegexSyntaxError("unbalanced parenthesis")
        elif tok in self.alphabet:
            node = Atom(tok)
        else:
            raise RegexSyntaxError(f"unexpected token {tok!r}")
        while self.peek() in ("*", "^+"):
            node = Star(node) if self.take() == "*" else Plus(node)
        return node


def regex_to_ast(text: str, alphabet: Iterable[str]) -> RegexAst:
    alphabet = frozenset(alphabet)
    if not text.strip():
        raise RegexSyntaxError("empty regular expression")
    labels = sorted(alphabet, key=len, reverse=True)
    tokens = _tokenize(text, labels)
    return _Parser(tokens, alphabet).parse()


class _Builder:
    """Thompson-style fragment construction with counter-named states."""

    def __init__(self):
        self.n = 0
        self.trans: set[tuple[str, str, str]] = set()

    def fresh(self) -> str:
        self.n += 1
        return f"r{self.n - 1}"

    def build(self, node: RegexAst) -> tuple[str, str]:
        start, end = self.fresh(), self.fresh()
        if isinstance(node, Atom):
            self.trans.add((start, node.label, end))
        elif isinstance(node, EmptyWord):
            self.trans.add((start, EPSILON, end))
        elif isinstance(node, Union):
            ls, le = self.build(node.left)
            rs, re_ = self.build(node.right)
            self.trans |= {(start, EPSILON, ls), (start, EPSILON, rs),
                           (le, EPSILON, end), (re_, EPSILON, end)}
        elif isinstance(node, Concat):
            ls, le = self.build(node.left)
            rs, re_ = self.build(node.right)
            self.trans |= {(start, EPSILON, ls), (le, EPSILON, rs),
                           (re_, EPSILON, end)}
        elif isinstance(node, Star):
            ms, me = self.build(node.inner)
            self.trans |= {(start, EPSILON, ms), (me, EPSILON, ms),
                           (me, EPSILON, end), (start, EPSILON, end)}
        elif isinstance(node, Plus):
            ms, me = self.build(node.inner)
            self.trans |= {(start, EPSILON, ms), (me, EPSILON, ms),
                           (me, EPSILON, end)}
        else:  # pragma: no cover - exhaustive over the AST
            raise RegexSyntaxError(f"unknown node {node!r}")
        return start, end


def parse_regex(text: str, alphabet: Iterable[str]) -> Fsa:
    """Compile a regex over the declared alphabet to an epsilon-free FSA.

    Grammar: '+' is union, juxtaposition concatenates, '*' is Kleene star,
    postfix '^+' is one-or-more, parentheses group, '()' denotes the empty
    word.  Atoms tokenize by longest match against the alphabet; use
    whitespace to separate atoms when longest match is not what you mean.
    """
    alphabet = frozenset(alphabet)
    ast = regex_to_ast(text, alphabet)
    builder = _Builder()
    start, end = builder.build(ast)
    states = frozenset(f"r{i}" for i in range(builder.n))
    nfa = Fsa(states, start, alphabet, frozenset(builder.trans),
              frozenset({end}))
    return eliminate_epsilon(nfa)


def empty_language(alphabet: Iterable[str]) -> Fsa:
    """The canonical empty-language automaton: one non-final state."""
    return Fsa(frozenset({"v0"}), "v0", frozenset(alphabet), frozenset(),
               frozenset())


# ---------------------------------------------------------------------------
# serialization


def fsa_from_dict(raw: Mapping) -> Fsa:
    for key in ("alphabet", "states", "initial", "finals", "transitions"):
        if key not in raw:
            raise ModelFormatError(f"missing key {key!r}")
    trans = set()
    for item in raw["transitions"]:
        if len(item) != 3:
            raise ModelFormatError(f"transition {item!r} is not a triple")
        trans.add(tuple(map(str, item)))
    return Fsa(frozenset(map(str, raw["states"])), str(raw["initial"]),
               frozenset(map(str, raw["alphabet"])), frozenset(trans),
               frozenset(map(str, raw["finals"])))


def fsa_from_json(text: str) -> Fsa:
    return fsa_from_dict(json.loads(text))


def fsa_to_dict(a: Fsa) -> dict:
    return {
        "alphabet": sorted(a.alphabet),
        "states": sorted(a.states),
        "initial": a.initial,
        "finals": sorted(a.finals),
        "transitions": [list(t) for t in sorted(a.transitions)],
    }


def fsa_to_json(a: Fsa) -> str:
    return json.dumps(fsa_to_dict(a), indent=2, sort_keys=True) + "\n"


def fsa_to_dot(a: Fsa, name: str = "fsa") -> str:
    lines = [f"digraph {json.dumps(name)} {{", "  rankdir=LR;"]
    lines.append('  __start [shape=point, label=""];')
    for s in sorted(a.states):
        shape = "doublecircle" if s in a.finals else "circle"
        lines.append(f"  {json.dumps(s)} [shape={shape}];")
    lines.append(f"  __start -> {json.dumps(a.initial)};")
    for (src, lab, tgt) in sorted(a.transitions):
        lines.append(f"  {json.dumps(src)} -> {json.dumps(tgt)}"
                     f" [label={json.dumps(lab)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
