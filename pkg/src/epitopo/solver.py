"""Decide whether a protocol model maps onto a task model over the same inputs.

A decision map ``delta`` must send each protocol vertex to a task vertex of
the same color lying over the same input vertex, and every protocol facet to
a task facet. The search treats each protocol vertex as a variable and each
protocol facet as a table constraint whose allowed tuples are the task facets
over the same input facet, maintaining generalized arc consistency.
"""

from __future__ import annotations

import os
import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any, Union

import networkx as nx

from .action import Morphism, Update, _same, check_morphism
from .complex import ChromaticComplex, Facet, facet_adjacency
from .errors import NotPositive, ProjectionMismatch
from .logic import Formula, extension, is_positive, to_text

SOLVABLE = "SOLVABLE"
UNSOLVABLE = "UNSOLVABLE"
UNKNOWN = "UNKNOWN"

DEFAULT_NODE_BUDGET = 10**7


def node_budget() -> int:
    return int(os.environ.get("EPITOPO_NODE_BUDGET", DEFAULT_NODE_BUDGET))


@dataclass
class ConnectivityCertificate:
    """Two protocol facets joined by ``path`` whose possible images lie in disjoint task components."""

    path: list[int]
    first_candidates: list[int]
    second_candidates: list[int]
    kind: str = "connectivity"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "path": self.path,
            "first_candidates": self.first_candidates,
            "second_candidates": self.second_candidates,
        }


@dataclass
class LogicalCertificate:
    """A protocol facet where a positive formula fails although it holds at every possible image."""

    facet: int
    formula: Formula
    candidates: list[int]
    kind: str = "logic"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "facet": self.facet,
            "formula": to_text(self.formula),
            "candidates": self.candidates,
        }


Certificate = Union[ConnectivityCertificate, LogicalCertificate]


@dataclass
class SolveResult:
    status: str
    delta: Morphism | None = None
    certificate: Certificate | None = None
    stats: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"status": self.status, "statistics": self.stats}
        if self.delta is not None:
            out["delta"] = dict(sorted(self.delta.mapping.items()))
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out


# -- shared bookkeeping ------------------------------------------------------


class _Instance:
    def __init__(self, protocol: Update, task: Update):
        self.p, self.pi_p = protocol.model, protocol.projection
        self.t, self.pi_t = task.model, task.projection
        base_p, base_t = self.pi_p.target, self.pi_t.target
        if not (base_p is base_t or base_p == base_t):
            raise ProjectionMismatch("protocol and task project onto different input models")
        if self.p.agents != self.t.agents:
            raise ProjectionMismatch("protocol and task use different agent orders")
        by_input: dict[Facet, list[int]] = defaultdict(list)
        for j, f in enumerate(self.t.facets):
            by_input[tuple(self.pi_t(v) for v in f)].append(j)
        self.candidates: list[list[int]] = [
            by_input.get(tuple(self.pi_p(v) for v in f), []) for f in self.p.facets
        ]


def candidate_facets(protocol: Update, task: Update) -> list[list[int]]:
    """For each protocol facet, the task facets over the same input facet."""
    return _Instance(protocol, task).candidates


# -- obstructions -------------------------------------------------------------


def _component_index(c: ChromaticComplex) -> dict[int, int]:
    comp = {}
    for k, nodes in enumerate(nx.connected_components(facet_adjacency(c))):
        for j in nodes:
            comp[j] = k
    return comp


def connectivity_obstruction(protocol: Update, task: Update) -> ConnectivityCertificate | None:
    """Certificate when a connected piece of the protocol must land in two task components at once."""
    inst = _Instance(protocol, task)
    tcomp = _component_index(inst.t)
    pgraph = facet_adjacency(inst.p)
    for nodes in sorted(nx.connected_components(pgraph), key=min):
        groups: dict[frozenset, int] = {}
        for i in sorted(nodes):
            comps = frozenset(tcomp[j] for j in inst.candidates[i])
            if not comps:
                return ConnectivityCertificate([i], [], [])
            groups.setdefault(comps, i)
        reps = list(groups.items())
        for a in range(len(reps)):
            for b in range(a + 1, len(reps)):
                (ca, i), (cb, k) = reps[a], reps[b]
                if not ca & cb:
                    path = nx.shortest_path(pgraph, i, k)
                    return ConnectivityCertificate(
                        list(path), list(inst.candidates[i]), list(inst.candidates[k])
                    )
    return None


def logical_obstruction(protocol: Update, task: Update, phi: Formula) -> LogicalCertificate | None:
    """Certificate when ``phi`` fails at a protocol facet but holds at all its possible images."""
    if not is_positive(phi):
        raise NotPositive(f"{to_text(phi)} is not positive")
    inst = _Instance(protocol, task)
    at_p = extension(inst.p, phi)
    at_t = extension(inst.t, phi)
    for i in range(len(inst.p.facets)):
        if i not in at_p and all(j in at_t for j in inst.candidates[i]):
            return LogicalCertificate(i, phi, list(inst.candidates[i]))
    return None


def replay(cert: Certificate, protocol: Update, task: Update) -> bool:
    """Re-derive a certificate's claims from the models."""
    inst = _Instance(protocol, task)
    if isinstance(cert, LogicalCertificate):
        if not is_positive(cert.formula):
            return False
        i = cert.facet
        if not 0 <= i < len(inst.p.facets) or sorted(cert.candidates) != sorted(inst.candidates[i]):
            return False
        at_t = extension(inst.t, cert.formula)
        return i not in extension(inst.p, cert.formula) and all(j in at_t for j in cert.candidates)
    path = cert.path
    if not path or not all(0 <= i < len(inst.p.facets) for i in path):
        return False
    for i, k in zip(path, path[1:]):
        if not set(inst.p.facets[i]) & set(inst.p.facets[k]):
            return False
    if sorted(cert.first_candidates) != sorted(inst.candidates[path[0]]):
        return False
    if sorted(cert.second_candidates) != sorted(inst.candidates[path[-1]]):
        return False
    tcomp = _component_index(inst.t)
    first = {tcomp[j] for j in cert.first_candidates}
    second = {tcomp[j] for j in cert.second_candidates}
    return not first & second


# -- search -------------------------------------------------------------------


class _Search:
    def __init__(self, inst: _Instance, budget: int):
        self.inst = inst
        self.budget = budget
        self.nodes = 0
        self.revisions = 0
        p, t = inst.p, inst.t
        self.facets = p.facets
        self.allowed = [[t.facets[j] for j in js] for js in inst.candidates]
        self.incident = p.incidence
        self.weight = [1] * len(self.facets)
        dom: dict[str, frozenset[str]] = {}
        for v, fs in self.incident.items():
            col = p.agent_index(p.vertices[v].color)
            vals = None
            for i in fs:
                here = {y[col] for y in self.allowed[i]}
                vals = here if vals is None else vals & here
            dom[v] = frozenset(vals or ())
        self.dom = dom
        self.trail: list[tuple[str, frozenset[str]]] = []

    def _set(self, v: str, values: frozenset[str]) -> None:
        self.trail.append((v, self.dom[v]))
        self.dom[v] = values

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            v, old = self.trail.pop()
            self.dom[v] = old

    def propagate(self, queue: deque[int]) -> bool:
        queued = set(queue)
        dom = self.dom
        while queue:
            i = queue.popleft()
            queued.discard(i)
            self.revisions += 1
            x = self.facets[i]
            alive = [y for y in self.allowed[i] if all(y[c] in dom[x[c]] for c in range(len(x)))]
            if not alive:
                self.weight[i] += 1
                return False
            for c, v in enumerate(x):
                supported = frozenset(y[c] for y in alive)
                if supported != dom[v]:
                    self._set(v, dom[v] & supported)
                    for k in self.incident[v]:
                        if k != i and k not in queued:
                            queued.add(k)
                            queue.append(k)
        return True

    def choose(self) -> str | None:
        best, best_score = None, None
        for v, d in self.dom.items():
            if len(d) > 1:
                w = sum(self.weight[i] for i in self.incident[v])
                score = (len(d) / w, v)
                if best_score is None or score < best_score:
                    best, best_score = v, score
        return best

    def run(self) -> dict[str, str] | None | bool:
        """Mapping if found, None if exhausted, False if the node budget ran out."""
        if any(not d for d in self.dom.values()):
            return None
        if not self.propagate(deque(range(len(self.facets)))):
            return None
        stack: list[tuple[str, list[str], int]] = []
        v = self.choose()
        if v is None:
            return {u: next(iter(d)) for u, d in self.dom.items()}
        stack.append((v, sorted(self.dom[v]), len(self.trail)))
        while stack:
            v, values, mark = stack[-1]
            self._undo(mark)
            if not values:
                stack.pop()
                continue
            value = values.pop(0)
            self.nodes += 1
            if self.nodes > self.budget:
                return False
            self._set(v, frozenset({value}))
            if not self.propagate(deque(self.incident[v])):
                continue
            nxt = self.choose()
            if nxt is None:
                return {u: next(iter(d)) for u, d in self.dom.items()}
            stack.append((nxt, sorted(self.dom[nxt]), len(self.trail)))
        return None


def solve(
    protocol: Update,
    task: Update,
    budget: int | None = None,
    obstruction: str | Formula | None = None,
) -> SolveResult:
    """Search for a decision map from the protocol model to the task model.

    ``obstruction`` runs a fast check first: ``"connectivity"`` or a positive
    formula for the logical check. A certificate found there settles the
    instance as unsolvable without search.
    """
    start = time.perf_counter()
    inst = _Instance(protocol, task)
    if obstruction is not None:
        cert: Certificate | None
        if obstruction == "connectivity":
            cert = connectivity_obstruction(protocol, task)
        elif isinstance(obstruction, Formula):
            cert = logical_obstruction(protocol, task, obstruction)
        else:
            raise ValueError(f"unknown obstruction {obstruction!r}")
        if cert is not None:
            stats = {"nodes": 0, "exhausted": False, "seconds": time.perf_counter() - start}
            return SolveResult(UNSOLVABLE, certificate=cert, stats=stats)

    budget = node_budget() if budget is None else budget
    search = _Search(inst, budget)
    found = search.run()
    stats = {
        "nodes": search.nodes,
        "revisions": search.revisions,
        "budget": budget,
        "exhausted": found is None,
        "seconds": time.perf_counter() - start,
    }
    if found is False:
        return SolveResult(UNKNOWN, stats=stats)
    if found is None:
        return SolveResult(UNSOLVABLE, stats=stats)
    delta = Morphism(inst.p, inst.t, dict(sorted(found.items())))
    return SolveResult(SOLVABLE, delta=delta, stats=stats)


def verify(result: SolveResult, protocol: Update, task: Update) -> bool:
    """Independent re-check of a result against the models.

    Solvable results are re-checked as morphisms commuting with the
    projections; certificates are replayed. An exhaustive search has no
    replayable object, so only its ``exhausted`` flag is reported.
    """
    if result.status == SOLVABLE:
        d = result.delta
        if d is None or not (_same(d.source, protocol.model) and _same(d.target, task.model)):
            return False
        if not check_morphism(d):
            return False
        return all(
            task.projection(d(v)) == protocol.projection(v) for v in protocol.model.vertices
        )
    if result.status == UNSOLVABLE:
        if result.certificate is not None:
            return replay(result.certificate, protocol, task)
        return bool(result.stats.get("exhausted"))
    return False
