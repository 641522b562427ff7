"""Kripke models with partition-based indistinguishability relations."""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

import networkx as nx

from .complex import Atom
from .errors import ModelError, UnknownAgent
from .logic import Formula, agents_of, evaluate, parse


def _close_partition(states: Sequence[str], blocks: Iterable[Iterable[str]]) -> tuple[frozenset[str], ...]:
    """Equivalence closure of the given blocks; missing states become singletons."""
    index = {s: i for i, s in enumerate(states)}
    g = nx.Graph()
    g.add_nodes_from(states)
    for block in blocks:
        block = list(block)
        for s in block:
            if s not in index:
                raise ModelError(f"relation mentions unknown state {s!r}")
        nx.add_path(g, block)
    parts = [frozenset(c) for c in nx.connected_components(g)]
    return tuple(sorted(parts, key=lambda b: min(index[s] for s in b)))


class KripkeModel:
    """States, one partition of the states per agent, and a valuation.

    ``relations`` may be given as arbitrary groups of related states: they are
    closed under equivalence before storage, so reflexivity, symmetry and
    transitivity always hold.
    """

    def __init__(
        self,
        agents: Sequence[str],
        states: Sequence[str],
        relations: Mapping[str, Iterable[Iterable[str]]],
        valuation: Mapping[str, Iterable[Atom]],
    ):
        self.agents = tuple(agents)
        if not self.agents or len(set(self.agents)) != len(self.agents):
            raise ModelError("agent set must be nonempty and duplicate-free")
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate state names")
        unknown = set(relations) - set(self.agents)
        if unknown:
            raise UnknownAgent(f"relations for unknown agents {sorted(unknown)}")
        self.relations: dict[str, tuple[frozenset[str], ...]] = {
            a: _close_partition(self.states, relations.get(a, ())) for a in self.agents
        }
        self.valuation: dict[str, frozenset[Atom]] = {
            s: frozenset((str(x), str(y)) for x, y in valuation.get(s, ())) for s in self.states
        }
        extra = set(valuation) - set(self.states)
        if extra:
            raise ModelError(f"valuation for unknown states {sorted(extra)}")
        self._check_partitions()

    def _check_partitions(self) -> None:
        for a, blocks in self.relations.items():
            covered = [s for b in blocks for s in b]
            if len(covered) != len(self.states) or set(covered) != set(self.states):
                raise ModelError(f"relation of {a!r} is not a partition of the states")

    @cached_property
    def block_of(self) -> dict[str, dict[str, int]]:
        """agent -> state -> index of its block."""
        return {
            a: {s: i for i, b in enumerate(blocks) for s in b}
            for a, blocks in self.relations.items()
        }

    def related(self, agent: str, s: str, t: str) -> bool:
        return self.block_of[agent][s] == self.block_of[agent][t]

    def local_values(self, agent: str, s: str) -> frozenset[Atom]:
        return frozenset(p for p in self.valuation[s] if p[0] == agent)

    def is_empty(self) -> bool:
        return not self.states

    def _key(self):
        return (
            self.agents,
            frozenset(self.states),
            tuple(frozenset(self.relations[a]) for a in self.agents),
            frozenset(self.valuation.items()),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"KripkeModel(agents={self.agents}, states={len(self.states)})"


def is_proper(m: KripkeModel) -> bool:
    """Any two distinct states are told apart by at least one agent."""
    signature = Counter(tuple(m.block_of[a][s] for a in m.agents) for s in m.states)
    return all(n == 1 for n in signature.values())


def is_local(m: KripkeModel) -> bool:
    """Related states agree on the related agent's own atoms."""
    for a, blocks in m.relations.items():
        for b in blocks:
            if len({m.local_values(a, s) for s in b}) > 1:
                return False
    return True


class _KripkeSemantics:
    def __init__(self, m: KripkeModel):
        self.m = m
        self.universe = frozenset(m.states)
        self._components: dict[frozenset, list[frozenset]] = {}

    def atom(self, agent: str, value: str) -> frozenset:
        return frozenset(s for s in self.m.states if (agent, value) in self.m.valuation[s])

    def know(self, agent: str, s: frozenset) -> frozenset:
        out: set[str] = set()
        for block in self.m.relations[agent]:
            if block <= s:
                out |= block
        return frozenset(out)

    def common(self, group: tuple[str, ...], s: frozenset) -> frozenset:
        key = frozenset(group)
        if key not in self._components:
            g = nx.Graph()
            g.add_nodes_from(self.m.states)
            for b in group:
                for block in self.m.relations[b]:
                    nx.add_path(g, sorted(block))
            self._components[key] = [frozenset(c) for c in nx.connected_components(g)]
        out: set[str] = set()
        for comp in self._components[key]:
            if comp <= s:
                out |= comp
        return frozenset(out)


def _semantics(m: KripkeModel) -> _KripkeSemantics:
    sem = m.__dict__.get("_epitopo_semantics")
    if sem is None:
        sem = m.__dict__["_epitopo_semantics"] = _KripkeSemantics(m)
    return sem


def extension_kripke(m: KripkeModel, phi: Formula) -> frozenset[str]:
    unknown = agents_of(phi) - set(m.agents)
    if unknown:
        raise UnknownAgent(f"formula mentions unknown agents {sorted(unknown)}")
    sem = _semantics(m)
    return evaluate(phi, sem.universe, sem.atom, sem.know, sem.common)


def check_kripke(m: KripkeModel, state: str, phi: Formula | str) -> bool:
    if isinstance(phi, str):
        phi = parse(phi, m.agents)
    if state not in m.valuation:
        raise ModelError(f"unknown state {state!r}")
    return state in extension_kripke(m, phi)


# -- action models and product update -------------------------------------


class KripkeActionModel:
    """Action points with per-agent partitions and a precondition per point."""

    def __init__(self, agents, points, relations, pre):
        frame = KripkeModel(agents, points, relations, {})
        self.agents = frame.agents
        self.points = frame.states
        self.relations = frame.relations
        missing = set(self.points) - set(pre)
        if missing:
            raise ModelError(f"action points without precondition: {sorted(missing)[:5]}")
        self.pre = dict(pre)


def product_update_kripke(m: KripkeModel, act: KripkeActionModel) -> KripkeModel:
    """Pairs (s, t) with ``pre(t)`` true at ``s``; the result is empty when nothing survives."""
    if set(m.agents) != set(act.agents):
        raise ModelError("model and action model have different agent sets")
    cache: dict[Formula, frozenset[str]] = {}
    pairs: list[tuple[str, str]] = []
    for t in act.points:
        phi = act.pre[t]
        if phi not in cache:
            cache[phi] = extension_kripke(m, phi)
        pairs.extend((s, t) for s in m.states if s in cache[phi])
    pairs.sort(key=lambda p: (m.states.index(p[0]), act.points.index(p[1])))
    name = {p: f"({p[0]},{p[1]})" for p in pairs}
    if len(set(name.values())) != len(name):
        raise ModelError("state name collision in product update")
    act_block = {a: {t: i for i, b in enumerate(bs) for t in b} for a, bs in act.relations.items()}
    relations: dict[str, list[list[str]]] = {}
    for a in m.agents:
        groups: dict[tuple[int, int], list[str]] = defaultdict(list)
        for s, t in pairs:
            groups[(m.block_of[a][s], act_block[a][t])].append(name[(s, t)])
        relations[a] = list(groups.values())
    valuation = {name[(s, t)]: m.valuation[s] for s, t in pairs}
    return KripkeModel(m.agents, [name[p] for p in pairs], relations, valuation)


# -- isomorphism ------------------------------------------------------------


def find_kripke_isomorphism(m: KripkeModel, n: KripkeModel) -> dict[str, str] | None:
    """State bijection preserving every agent's relation (both ways) and the valuation."""
    if set(m.agents) != set(n.agents) or len(m.states) != len(n.states):
        return None

    def sig(k: KripkeModel, s: str):
        return (k.valuation[s], tuple(len(k.relations[a][k.block_of[a][s]]) for a in m.agents))

    sm = {s: sig(m, s) for s in m.states}
    sn = {s: sig(n, s) for s in n.states}
    if Counter(sm.values()) != Counter(sn.values()):
        return None
    pool: dict[Any, list[str]] = defaultdict(list)
    for s in n.states:
        pool[sn[s]].append(s)
    order = sorted(m.states, key=lambda s: (len(pool[sm[s]]), m.states.index(s)))
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def ok(s: str, t: str) -> bool:
        for u, w in mapping.items():
            for a in m.agents:
                if m.related(a, s, u) != n.related(a, t, w):
                    return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        s = order[k]
        for t in pool[sm[s]]:
            if t not in used and ok(s, t):
                mapping[s] = t
                used.add(t)
                if search(k + 1):
                    return True
                del mapping[s]
                used.discard(t)
        return False

    return dict(mapping) if search(0) else None


# -- JSON -------------------------------------------------------------------


def kripke_to_dict(m: KripkeModel) -> dict:
    val = {}
    for s in m.states:
        grouped: dict[str, list[str]] = defaultdict(list)
        for a, v in sorted(m.valuation[s]):
            grouped[a].append(v)
        val[s] = dict(grouped)
    return {
        "agents": list(m.agents),
        "states": list(m.states),
        "relations": {a: [sorted(b, key=m.states.index) for b in m.relations[a]] for a in m.agents},
        "valuation": val,
    }


def kripke_from_dict(data: Mapping[str, Any]) -> KripkeModel:
    try:
        relations = data["relations"]
        agents = data.get("agents") or list(relations)
        valuation = {}
        for s, spec in data.get("valuation", {}).items():
            atoms = []
            for a, values in spec.items():
                if isinstance(values, (str, int)):
                    values = [values]
                atoms.extend((str(a), str(v)) for v in values)
            valuation[str(s)] = atoms
        return KripkeModel(
            [str(a) for a in agents],
            [str(s) for s in data["states"]],
            {str(a): [[str(s) for s in b] for b in bs] for a, bs in relations.items()},
            valuation,
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ModelError(f"malformed Kripke JSON: {exc!r}") from None


def all_atoms(m: KripkeModel) -> set[Atom]:
    return set(itertools.chain.from_iterable(m.valuation.values()))
