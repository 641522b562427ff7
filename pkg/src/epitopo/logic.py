"""Epistemic formulas: AST, text syntax and evaluation over simplicial models.

Grammar (ASCII)::

    formula := implies
    implies := or ( "->" implies )?
    or      := and ( "|" and )*
    and     := unary ( "&" unary )*
    unary   := "!" unary | "K[" agent "]" unary
             | "E[" agents "]" unary | "C[" agents "]" unary | primary
    primary := "p[" agent "," value "]" | "true" | "false" | "(" formula ")"

Formulas are evaluated extensionally: :func:`extension` returns the set of
facet indices where a formula holds, computed bottom-up once per subformula.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import networkx as nx

from .complex import ChromaticComplex
from .errors import FormulaSyntaxError, UnknownAgent


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    agent: str
    value: str


@dataclass(frozen=True, slots=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class K(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True, slots=True)
class E(Formula):
    agents: tuple[str, ...]
    sub: Formula

    def __post_init__(self):
        if not self.agents:
            raise ValueError("E needs a nonempty agent set")


@dataclass(frozen=True, slots=True)
class C(Formula):
    agents: tuple[str, ...]
    sub: Formula

    def __post_init__(self):
        if not self.agents:
            raise ValueError("C needs a nonempty agent set")


TRUE = Top()
FALSE = Bottom()


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; ``true`` for no parts."""
    out: Formula | None = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TRUE if out is None else out


def disj(parts: Iterable[Formula]) -> Formula:
    out: Formula | None = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return FALSE if out is None else out


def some_input(agents: Sequence[str], value: str) -> Formula:
    """At least one agent holds ``value``."""
    return disj(Atom(a, str(value)) for a in agents)


def agents_of(phi: Formula) -> set[str]:
    match phi:
        case Atom(a, _) | K(a, _):
            out = {a}
        case E(bs, _) | C(bs, _):
            out = set(bs)
        case _:
            out = set()
    for child in children(phi):
        out |= agents_of(child)
    return out


def children(phi: Formula) -> tuple[Formula, ...]:
    match phi:
        case Not(s) | K(_, s) | E(_, s) | C(_, s):
            return (s,)
        case And(l, r) | Or(l, r) | Implies(l, r):
            return (l, r)
    return ()


def modal_depth(phi: Formula) -> int:
    sub = max((modal_depth(c) for c in children(phi)), default=0)
    return sub + 1 if isinstance(phi, (K, E, C)) else sub


def is_positive(phi: Formula) -> bool:
    """True iff negation occurs only directly above atoms (implication counts as negative)."""
    match phi:
        case Not(Atom()):
            return True
        case Not() | Implies():
            return False
    return all(is_positive(c) for c in children(phi))


# -- printing -------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3}


def to_text(phi: Formula) -> str:
    match phi:
        case Top():
            return "true"
        case Bottom():
            return "false"
        case Atom(a, v):
            return f"p[{a},{v}]"
        case Not(s):
            return "!" + _unary_arg(s)
        case K(a, s):
            return f"K[{a}] " + _unary_arg(s)
        case E(bs, s):
            return f"E[{','.join(bs)}] " + _unary_arg(s)
        case C(bs, s):
            return f"C[{','.join(bs)}] " + _unary_arg(s)
        case And(l, r) | Or(l, r):
            op = " & " if isinstance(phi, And) else " | "
            p = _PREC[type(phi)]
            return _wrap(l, p, strict=False) + op + _wrap(r, p, strict=True)
        case Implies(l, r):
            return _wrap(l, 1, strict=True) + " -> " + _wrap(r, 1, strict=False)
    raise TypeError(f"not a formula: {phi!r}")


def _unary_arg(s: Formula) -> str:
    text = to_text(s)
    return f"({text})" if type(s) in _PREC else text


def _wrap(s: Formula, parent: int, strict: bool) -> str:
    text = to_text(s)
    p = _PREC.get(type(s))
    if p is None or p > parent or (p == parent and not strict):
        return text
    return f"({text})"


# -- parsing --------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<arrow>->)|(?P<op>[!&|()])"
    r"|(?P<atom>p\[(?P<aargs>[^\]]*)\])"
    r"|(?P<modal>[KEC])\[(?P<margs>[^\]]*)\]"
    r"|(?P<word>true|false)\b"
    r")"
)


class _Parser:
    def __init__(self, text: str, agents: Sequence[str] | None):
        self.text = text
        self.agents = None if agents is None else set(agents)
        self.tokens: list[tuple[str, object, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
            start = m.start() + len(m.group(0)) - len(m.group(0).lstrip())
            if m.group("arrow"):
                self.tokens.append(("->", None, start))
            elif m.group("op"):
                self.tokens.append((m.group("op"), None, start))
            elif m.group("atom"):
                parts = [x.strip() for x in m.group("aargs").split(",")]
                if len(parts) != 2 or not all(parts):
                    raise FormulaSyntaxError("atom must be p[agent,value]", text, start)
                self._agent(parts[0], start)
                self.tokens.append(("atom", (parts[0], parts[1]), start))
            elif m.group("modal"):
                names = tuple(x.strip() for x in m.group("margs").split(","))
                if not all(names):
                    raise FormulaSyntaxError("empty agent name", text, start)
                for n in names:
                    self._agent(n, start)
                kind = m.group("modal")
                if kind == "K" and len(names) != 1:
                    raise FormulaSyntaxError("K takes exactly one agent", text, start)
                self.tokens.append((kind, names, start))
            else:
                self.tokens.append((m.group("word"), None, start))
            pos = m.end()
        self.i = 0

    def _agent(self, name: str, pos: int) -> None:
        if self.agents is not None and name not in self.agents:
            raise UnknownAgent(f"unknown agent {name!r} at position {pos}")

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        return self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Formula:
        if not self.tokens:
            raise FormulaSyntaxError("empty formula", self.text, 0)
        phi = self.implies()
        if self.i != len(self.tokens):
            raise FormulaSyntaxError(f"unexpected token {self.peek()!r}", self.text, self.pos())
        return phi

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        phi = self.conjunction()
        while self.peek() == "|":
            self.take()
            phi = Or(phi, self.conjunction())
        return phi

    def conjunction(self) -> Formula:
        phi = self.unary()
        while self.peek() == "&":
            self.take()
            phi = And(phi, self.unary())
        return phi

    def unary(self) -> Formula:
        kind = self.peek()
        if kind is None:
            raise FormulaSyntaxError("unexpected end of formula", self.text, self.pos())
        if kind == "!":
            self.take()
            return Not(self.unary())
        if kind in ("K", "E", "C"):
            _, names, _ = self.take()
            sub = self.unary()
            if kind == "K":
                return K(names[0], sub)
            return (E if kind == "E" else C)(names, sub)
        if kind == "atom":
            _, (agent, value), _ = self.take()
            return Atom(agent, value)
        if kind == "true":
            self.take()
            return TRUE
        if kind == "false":
            self.take()
            return FALSE
        if kind == "(":
            self.take()
            phi = self.implies()
            if self.peek() != ")":
                raise FormulaSyntaxError("expected ')'", self.text, self.pos())
            self.take()
            return phi
        raise FormulaSyntaxError(f"unexpected token {kind!r}", self.text, self.pos())


def parse(text: str, agents: Sequence[str] | None = None) -> Formula:
    """Parse formula text; with ``agents`` given, unknown agent names raise :class:`UnknownAgent`."""
    return _Parser(text, agents).parse()


# -- evaluation -----------------------------------------------------------


def evaluate(
    phi: Formula,
    universe: frozenset,
    atom: Callable[[str, str], frozenset],
    know: Callable[[str, frozenset], frozenset],
    common: Callable[[tuple[str, ...], frozenset], frozenset],
) -> frozenset:
    """Generic extensional evaluator shared by the simplicial and Kripke checkers.

    ``know(a, S)`` returns the worlds where agent ``a`` knows ``S``;
    ``common(B, S)`` the worlds where ``S`` is common knowledge among ``B``.
    """
    memo: dict[Formula, frozenset] = {}

    def ev(f: Formula) -> frozenset:
        if f in memo:
            return memo[f]
        match f:
            case Top():
                out = universe
            case Bottom():
                out = frozenset()
            case Atom(a, v):
                out = atom(a, v)
            case Not(s):
                out = universe - ev(s)
            case And(l, r):
                out = ev(l) & ev(r)
            case Or(l, r):
                out = ev(l) | ev(r)
            case Implies(l, r):
                out = (universe - ev(l)) | ev(r)
            case K(a, s):
                out = know(a, ev(s))
            case E(bs, s):
                inner = ev(s)
                out = universe
                for b in bs:
                    out = out & know(b, inner)
            case C(bs, s):
                out = common(tuple(bs), ev(s))
            case _:
                raise TypeError(f"not a formula: {f!r}")
        memo[f] = out
        return out

    return ev(phi)


def _require_agents(phi: Formula, agents: Iterable[str]) -> None:
    unknown = agents_of(phi) - set(agents)
    if unknown:
        raise UnknownAgent(f"formula mentions unknown agents {sorted(unknown)}")


class _SimplicialSemantics:
    """Per-model caches for vertex classes and B-components."""

    def __init__(self, m: ChromaticComplex):
        self.m = m
        self.universe = frozenset(range(len(m.facets)))
        self._components: dict[frozenset, list[frozenset]] = {}
        self._atoms: dict[tuple[str, str], frozenset] = {}

    def atom(self, agent: str, value: str) -> frozenset:
        key = (agent, value)
        if key not in self._atoms:
            col = self.m.agent_index(agent)
            self._atoms[key] = frozenset(
                i for i, f in enumerate(self.m.facets) if key in self.m.vertices[f[col]].label
            )
        return self._atoms[key]

    def know(self, agent: str, s: frozenset) -> frozenset:
        col = self.m.agent_index(agent)
        inc = self.m.incidence
        out = set()
        good: dict[str, bool] = {}
        for i, f in enumerate(self.m.facets):
            v = f[col]
            if v not in good:
                good[v] = all(j in s for j in inc[v])
            if good[v]:
                out.add(i)
        return frozenset(out)

    def components(self, group: tuple[str, ...]) -> list[frozenset]:
        key = frozenset(group)
        if key not in self._components:
            g = nx.Graph()
            g.add_nodes_from(self.universe)
            cols = {self.m.agent_index(b) for b in group}
            for vid, fs in self.m.incidence.items():
                if self.m.agent_index(self.m.vertices[vid].color) in cols:
                    nx.add_path(g, fs)
            self._components[key] = [frozenset(c) for c in nx.connected_components(g)]
        return self._components[key]

    def common(self, group: tuple[str, ...], s: frozenset) -> frozenset:
        out: set[int] = set()
        for comp in self.components(group):
            if comp <= s:
                out |= comp
        return frozenset(out)


_SEMANTICS_ATTR = "_epitopo_semantics"


def _semantics(m: ChromaticComplex) -> _SimplicialSemantics:
    sem = m.__dict__.get(_SEMANTICS_ATTR)
    if sem is None:
        sem = _SimplicialSemantics(m)
        m.__dict__[_SEMANTICS_ATTR] = sem
    return sem


def extension(m: ChromaticComplex, phi: Formula) -> frozenset[int]:
    """Indices of the facets of ``m`` where ``phi`` holds."""
    _require_agents(phi, m.agents)
    sem = _semantics(m)
    return evaluate(phi, sem.universe, sem.atom, sem.know, sem.common)


def check(m: ChromaticComplex, facet, phi: Formula | str) -> bool:
    """Truth of ``phi`` at a facet (index, name or vertex tuple) of ``m``."""
    if isinstance(phi, str):
        phi = parse(phi, m.agents)
    i = m.resolve_facet(facet)
    return i in extension(m, phi)
