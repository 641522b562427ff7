"""The immediate-snapshot action model and its iteration."""

from __future__ import annotations

import itertools
import os
from typing import Sequence

from .action import ActionModel, AtFacets, Update, compose, identity, product_update
from .complex import ChromaticComplex, Vertex
from .errors import AgentNotInPartition, ResourceLimit
from .logic import Atom, conj, extension

SequentialPartition = tuple[tuple[str, ...], ...]

DEFAULT_FACET_LIMIT = 10**6


def ordered_partitions(agents: Sequence[str]) -> list[SequentialPartition]:
    """All sequences of nonempty disjoint blocks covering ``agents``.

    Canonical order: the first block is chosen largest first, then in
    lexicographic order of agent positions; the remainder recurses.
    """
    agents = tuple(agents)
    if not agents:
        raise ValueError("need at least one agent")

    def rec(rest: tuple[str, ...]) -> list[SequentialPartition]:
        if not rest:
            return [()]
        out = []
        for size in range(len(rest), 0, -1):
            for block in itertools.combinations(rest, size):
                remaining = tuple(a for a in rest if a not in block)
                out.extend((block,) + tail for tail in rec(remaining))
        return out

    return rec(agents)


def aview(agent: str, c: SequentialPartition) -> frozenset[str]:
    """Agents whose inputs ``agent`` sees: its own block and all earlier blocks."""
    seen: set[str] = set()
    for block in c:
        seen.update(block)
        if agent in block:
            return frozenset(seen)
    raise AgentNotInPartition(f"agent {agent!r} does not occur in {c!r}")


def view_vertex_id(agent: str, view: tuple[str | None, ...]) -> str:
    return f"{agent}<{','.join('_' if v is None else v for v in view)}>"


def _facet_precondition(m: ChromaticComplex, i: int):
    """Conjunction of the facet's atoms when it singles the facet out, else the facet itself."""
    label = sorted(m.facet_label(i), key=lambda p: (m.agent_index(p[0]), p[1]))
    phi = conj(Atom(a, v) for a, v in label)
    if extension(m, phi) == frozenset({i}):
        return phi
    return AtFacets(frozenset({m.facets[i]}))


def immediate_snapshot(m: ChromaticComplex) -> ActionModel:
    """One copy of every sequential partition per facet of ``m``.

    The vertex of agent ``a`` in action ``(c, X)`` is ``a`` together with its
    view: for every agent, the vertex of ``X`` it has seen, or nothing. Actions
    whose views coincide for ``a`` share their ``a``-vertex.
    """
    partitions = ordered_partitions(m.agents)
    seen_by = [[aview(a, c) for a in m.agents] for c in partitions]
    vertices: dict[str, Vertex] = {}
    facets: list[tuple[str, ...]] = []
    owner: dict[tuple[str, ...], int] = {}
    for i, x in enumerate(m.facets):
        for sees in seen_by:
            row = []
            for col, agent in enumerate(m.agents):
                view = tuple(x[j] if b in sees[col] else None for j, b in enumerate(m.agents))
                vid = view_vertex_id(agent, view)
                if vid not in vertices:
                    vertices[vid] = Vertex(vid, agent, frozenset(), payload=view)
                row.append(vid)
            facets.append(tuple(row))
            owner[tuple(row)] = i
    facets.sort()
    complex = ChromaticComplex(
        m.agents, sorted(vertices.values(), key=lambda v: (m.agent_index(v.color), v.id)), facets
    )
    pre_of = {i: _facet_precondition(m, i) for i in range(len(m.facets))}
    return ActionModel(complex, {f: pre_of[owner[f]] for f in complex.facets})


def facet_limit() -> int:
    return int(os.environ.get("EPITOPO_FACET_LIMIT", DEFAULT_FACET_LIMIT))


def protocol_model(m: ChromaticComplex, rounds: int = 1, limit: int | None = None) -> Update:
    """``m`` after ``rounds`` immediate snapshots, with the projection back onto ``m``.

    Round ``k`` takes snapshots over the round ``k-1`` model, so the values an
    agent sees are the previous-round vertices of the agents it reads.
    ``rounds=0`` gives ``m`` itself with the identity projection.
    """
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    limit = facet_limit() if limit is None else limit
    per_facet = len(ordered_partitions(m.agents))
    current, proj = m, identity(m)
    for _ in range(rounds):
        if len(current.facets) * per_facet > limit:
            raise ResourceLimit(
                f"next round would have {len(current.facets) * per_facet} facets (limit {limit})"
            )
        step = product_update(current, immediate_snapshot(current))
        proj = compose(step.projection, proj)
        current = step.model
    return Update(current, proj)
