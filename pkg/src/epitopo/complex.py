"""Chromatic simplicial complexes and simplicial models.

A complex is stored by its facets only. Because every complex here is pure
and chromatic, a facet is kept as a tuple of vertex ids ordered by agent
index, so ``facet[i]`` is the vertex of colour ``agents[i]``. Lower faces
are derived on demand.
"""

from __future__ import annotations

import itertools
import sys
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping, Sequence

import networkx as nx

from .errors import (
    FacetNotInModel,
    LabelLocality,
    MergeConflict,
    ModelError,
    NonChromatic,
    NonPure,
)

Atom = tuple[str, str]
Facet = tuple[str, ...]


@dataclass(frozen=True)
class Vertex:
    id: str
    color: str
    label: frozenset[Atom] = frozenset()
    payload: Hashable = field(default=None, compare=False)

    def values(self) -> list[str]:
        return sorted(v for _, v in self.label)


class ChromaticComplex:
    """Pure chromatic complex over an ordered agent set.

    Raises :class:`NonChromatic`, :class:`NonPure` or :class:`LabelLocality`
    when the data violates the invariants. Duplicate facets are merged.
    """

    def __init__(
        self,
        agents: Sequence[str],
        vertices: Iterable[Vertex],
        facets: Iterable[Iterable[str]],
    ):
        agents = tuple(agents)
        if not agents:
            raise ModelError("agent set must be nonempty")
        if len(set(agents)) != len(agents):
            raise ModelError(f"duplicate agent names in {agents!r}")
        self.agents: tuple[str, ...] = agents
        self._agent_index = {a: i for i, a in enumerate(agents)}

        table: dict[str, Vertex] = {}
        for v in vertices:
            if v.id in table:
                raise ModelError(f"duplicate vertex id {v.id!r}")
            if v.color not in self._agent_index:
                raise ModelError(f"vertex {v.id!r} has unknown color {v.color!r}")
            for agent, value in v.label:
                if agent != v.color:
                    raise LabelLocality(
                        f"vertex {v.id!r} of color {v.color!r} carries atom p[{agent},{value}]"
                    )
            table[v.id] = v

        seen: set[Facet] = set()
        ordered: list[Facet] = []
        for raw in facets:
            facet = self._order_facet(raw, table)
            if facet not in seen:
                seen.add(facet)
                ordered.append(facet)

        used = {vid for f in ordered for vid in f}
        unused = [vid for vid in table if vid not in used]
        if unused:
            raise NonPure(f"vertices not contained in any facet: {sorted(unused)[:5]}")
        self.vertices: dict[str, Vertex] = table
        self.facets: tuple[Facet, ...] = tuple(ordered)

    def _order_facet(self, raw: Iterable[str], table: Mapping[str, Vertex]) -> Facet:
        slots: list[str | None] = [None] * len(self.agents)
        ids = list(raw)
        if not ids:
            raise NonPure("empty facet")
        for vid in ids:
            if vid not in table:
                raise ModelError(f"facet refers to unknown vertex {vid!r}")
            i = self._agent_index[table[vid].color]
            if slots[i] is not None:
                raise NonChromatic(
                    f"facet {ids!r} has two vertices of color {table[vid].color!r}"
                )
            slots[i] = vid
        missing = [self.agents[i] for i, s in enumerate(slots) if s is None]
        if missing:
            raise NonPure(f"facet {ids!r} lacks a vertex for agents {missing}")
        return tuple(slots)  # type: ignore[arg-type]

    # -- structure ------------------------------------------------------

    @property
    def dimension(self) -> int:
        return len(self.agents) - 1

    def agent_index(self, agent: str) -> int:
        return self._agent_index[agent]

    def color(self, vid: str) -> str:
        return self.vertices[vid].color

    @cached_property
    def facet_index(self) -> dict[Facet, int]:
        return {f: i for i, f in enumerate(self.facets)}

    @cached_property
    def incidence(self) -> dict[str, tuple[int, ...]]:
        """Vertex id -> indices of the facets containing it."""
        inc: dict[str, list[int]] = defaultdict(list)
        for i, f in enumerate(self.facets):
            for vid in f:
                inc[vid].append(i)
        return {vid: tuple(fs) for vid, fs in inc.items()}

    def facet_label(self, i: int) -> frozenset[Atom]:
        return frozenset().union(*(self.vertices[v].label for v in self.facets[i]))

    def facet_name(self, i: int) -> str:
        parts = [self.vertices[v].values() for v in self.facets[i]]
        if all(len(p) == 1 and len(p[0]) == 1 for p in parts):
            return "".join(p[0] for p in parts)
        return ",".join("/".join(p) if p else "_" for p in parts)

    @cached_property
    def _names(self) -> dict[str, list[int]]:
        names: dict[str, list[int]] = defaultdict(list)
        for i in range(len(self.facets)):
            names[self.facet_name(i)].append(i)
        return names

    def resolve_facet(self, key: Any) -> int:
        """Facet index from an index, ``#i``, a vertex-id tuple, ``u+v+w`` or a unique name."""
        if isinstance(key, bool):
            raise FacetNotInModel(f"invalid facet key {key!r}")
        if isinstance(key, int):
            if 0 <= key < len(self.facets):
                return key
            raise FacetNotInModel(f"facet index {key} out of range")
        if isinstance(key, (tuple, list, frozenset, set)):
            try:
                facet = self._order_facet(key, self.vertices)
            except ModelError as exc:
                raise FacetNotInModel(str(exc)) from None
            if facet in self.facet_index:
                return self.facet_index[facet]
            raise FacetNotInModel(f"{key!r} is not a facet")
        key = str(key)
        hits = self._names.get(key, [])
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise FacetNotInModel(f"facet name {key!r} is ambiguous ({len(hits)} facets)")
        if key.startswith("#") and key[1:].isdigit():
            return self.resolve_facet(int(key[1:]))
        if "+" in key:
            return self.resolve_facet(tuple(key.split("+")))
        raise FacetNotInModel(f"no facet named {key!r}")

    def faces(self, size: int) -> set[frozenset[str]]:
        """All faces with ``size`` vertices (dimension ``size - 1``)."""
        out: set[frozenset[str]] = set()
        for f in self.facets:
            out.update(frozenset(c) for c in itertools.combinations(f, size))
        return out

    def is_empty(self) -> bool:
        return not self.facets

    # -- comparison -----------------------------------------------------

    def _key(self):
        return (self.agents, frozenset(self.vertices.values()), frozenset(self.facets))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChromaticComplex):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(agents={self.agents}, "
            f"vertices={len(self.vertices)}, facets={len(self.facets)})"
        )


class SimplicialModel(ChromaticComplex):
    """Chromatic complex whose vertices carry local atomic propositions."""


def assert_valid(c: ChromaticComplex) -> None:
    """Re-check the chromatic, purity and locality invariants from scratch."""
    n = len(c.agents)
    for f in c.facets:
        if len(f) != n:
            raise NonPure(f"facet {f} has {len(f)} vertices, expected {n}")
        colors = [c.vertices[v].color for v in f]
        if colors != list(c.agents):
            raise NonChromatic(f"facet {f} has colors {colors}")
    for v in c.vertices.values():
        if any(a != v.color for a, _ in v.label):
            raise LabelLocality(f"vertex {v.id!r}")
    if len(set(c.facets)) != len(c.facets):
        raise ModelError("duplicate facets")


# -- construction -------------------------------------------------------


def _as_label(agent: str, spec: Any) -> frozenset[Atom]:
    if spec is None:
        return frozenset()
    if isinstance(spec, (str, int)):
        return frozenset({(agent, str(spec))})
    atoms = set()
    for item in spec:
        if isinstance(item, (tuple, list)):
            atoms.add((str(item[0]), str(item[1])))
        else:
            atoms.add((agent, str(item)))
    return frozenset(atoms)


def _label_text(label: frozenset[Atom]) -> str:
    values = sorted(v for _, v in label)
    if all(len(v) == 1 for v in values):
        return "".join(values)
    return "/".join(values)


def vertex_names(entries: Sequence[tuple[str, frozenset[Atom]]]) -> list[str]:
    """Readable unique ids like ``g0``; repeats get a ``#k`` suffix."""
    names = []
    counts: Counter[str] = Counter()
    for color, label in entries:
        base = f"{color}{_label_text(label)}"
        k = counts[base]
        counts[base] += 1
        names.append(base if k == 0 else f"{base}#{k}")
    return names


def build_model(
    agents: Sequence[str],
    rows: Sequence[Mapping[str, Any] | Sequence[tuple[str, Any]]],
    gluing: str | Sequence[Sequence[tuple[int, str]]] | None = "label",
) -> SimplicialModel:
    """Build a model from one row per facet.

    Each row assigns a value label to every agent. ``gluing`` decides which
    vertices of different rows are the same vertex: ``"label"`` merges all
    equal (color, label) cells, ``None`` keeps rows disjoint, and an explicit
    list of groups of ``(row, agent)`` cells merges exactly those groups.
    """
    agents = tuple(agents)
    agent_set = set(agents)
    cells: list[tuple[int, str]] = []
    labels: dict[tuple[int, str], frozenset[Atom]] = {}
    for r, row in enumerate(rows):
        items = list(row.items()) if isinstance(row, Mapping) else list(row)
        seen = set()
        for agent, spec in items:
            agent = str(agent)
            if agent not in agent_set:
                raise ModelError(f"row {r} names unknown agent {agent!r}")
            if agent in seen:
                raise NonChromatic(f"row {r} assigns agent {agent!r} twice")
            seen.add(agent)
            label = _as_label(agent, spec)
            for a, _ in label:
                if a != agent:
                    raise LabelLocality(f"row {r}: vertex of {agent!r} labeled with atom of {a!r}")
            cells.append((r, agent))
            labels[(r, agent)] = label
        missing = agent_set - seen
        if missing:
            raise NonPure(f"row {r} has no vertex for agents {sorted(missing)}")

    parent = {cell: cell for cell in cells}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        if x[1] != y[1] or labels[x] != labels[y]:
            raise MergeConflict(
                f"cannot identify {x} and {y}: colors or labels differ"
            )
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    if gluing == "label":
        first: dict[tuple[str, frozenset[Atom]], tuple[int, str]] = {}
        for cell in cells:
            key = (cell[1], labels[cell])
            if key in first:
                union(first[key], cell)
            else:
                first[key] = cell
    elif gluing is not None:
        for group in gluing:
            group = [(int(r), str(a)) for r, a in group]
            for cell in group:
                if cell not in parent:
                    raise ModelError(f"gluing refers to unknown cell {cell}")
            for cell in group[1:]:
                union(group[0], cell)

    roots = sorted({find(c) for c in cells}, key=lambda c: (agents.index(c[1]), c[0]))
    ids = dict(zip(roots, vertex_names([(c[1], labels[c]) for c in roots])))
    vertices = [Vertex(ids[c], c[1], labels[c]) for c in roots]
    facets = [[ids[find((r, a))] for a in agents] for r in range(len(rows))]
    return SimplicialModel(agents, vertices, facets)


# -- graph views and invariants -----------------------------------------


def facet_adjacency(c: ChromaticComplex, agents: Iterable[str] | None = None) -> nx.Graph:
    """Graph over facet indices; an edge joins facets sharing a vertex colored in ``agents``.

    Edge attribute ``agents`` lists the shared colors (restricted to ``agents``)
    in agent order.
    """
    allowed = set(c.agents if agents is None else agents)
    g = nx.Graph()
    for i in range(len(c.facets)):
        g.add_node(i, name=c.facet_name(i))
    shared: dict[tuple[int, int], set[str]] = defaultdict(set)
    for vid, fs in c.incidence.items():
        color = c.vertices[vid].color
        if color not in allowed:
            continue
        for i, j in itertools.combinations(fs, 2):
            shared[(i, j)].add(color)
    for (i, j), colors in sorted(shared.items()):
        g.add_edge(i, j, agents=tuple(a for a in c.agents if a in colors))
    return g


def to_dot(c: ChromaticComplex, agents: Iterable[str] | None = None, name: str = "facets") -> str:
    g = facet_adjacency(c, agents)
    lines = [f"graph {name} {{"]
    for i, data in g.nodes(data=True):
        lines.append(f'  f{i} [label="{data["name"]}"];')
    for i, j, data in g.edges(data=True):
        lines.append(f'  f{i} -- f{j} [label="{",".join(data["agents"])}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TopologyReport:
    connected: bool
    strongly_connected: bool
    pseudomanifold_with_boundary: bool
    euler_characteristic: int
    counts: tuple[int, ...]
    components: int

    def to_dict(self) -> dict:
        return {
            "connected": self.connected,
            "strongly_connected": self.strongly_connected,
            "pseudomanifold_with_boundary": self.pseudomanifold_with_boundary,
            "euler_characteristic": self.euler_characteristic,
            "counts": list(self.counts),
            "components": self.components,
        }


def _ridge_map(c: ChromaticComplex) -> dict[tuple[int, Facet], list[int]]:
    # ridge key: (index of dropped agent, remaining vertices)
    ridges: dict[tuple[int, Facet], list[int]] = defaultdict(list)
    for i, f in enumerate(c.facets):
        for k in range(len(f)):
            ridges[(k, f[:k] + f[k + 1 :])].append(i)
    return ridges


def invariants(c: ChromaticComplex) -> TopologyReport:
    nfacets = len(c.facets)
    counts = tuple(len(c.faces(k)) for k in range(1, len(c.agents) + 1))
    euler = sum((-1) ** k * n for k, n in enumerate(counts))
    if nfacets == 0:
        return TopologyReport(False, False, False, 0, counts, 0)

    components = nx.number_connected_components(facet_adjacency(c))
    if c.dimension == 0:
        strong = nfacets == 1
        thin = True
    else:
        ridges = _ridge_map(c)
        thin = all(len(fs) <= 2 for fs in ridges.values())
        rg = nx.Graph()
        rg.add_nodes_from(range(nfacets))
        for fs in ridges.values():
            rg.add_edges_from(itertools.combinations(fs, 2))
        strong = nx.is_connected(rg)
    return TopologyReport(
        connected=components == 1,
        strongly_connected=strong,
        pseudomanifold_with_boundary=strong and thin,
        euler_characteristic=euler,
        counts=counts,
        components=components,
    )


# -- isomorphism ----------------------------------------------------------


def find_isomorphism(a: ChromaticComplex, b: ChromaticComplex) -> dict[str, str] | None:
    """Color- and label-preserving vertex bijection carrying facets onto facets, or None."""
    if set(a.agents) != set(b.agents):
        return None
    if len(a.vertices) != len(b.vertices) or len(a.facets) != len(b.facets):
        return None

    def signature(c: ChromaticComplex, vid: str):
        v = c.vertices[vid]
        return (v.color, v.label, len(c.incidence[vid]))

    sig_a = {v: signature(a, v) for v in a.vertices}
    sig_b = {v: signature(b, v) for v in b.vertices}
    if Counter(sig_a.values()) != Counter(sig_b.values()):
        return None
    b_by_sig: dict[Any, list[str]] = defaultdict(list)
    for v in sorted(b.vertices):
        b_by_sig[sig_b[v]].append(v)
    b_inc = {v: set(fs) for v, fs in b.incidence.items()}
    b_facet_sets = [frozenset(f) for f in b.facets]

    # BFS order so that each vertex after the first in its component has an assigned neighbour.
    rarity = Counter(sig_a.values())
    order: list[str] = []
    placed: set[str] = set()
    for start in sorted(a.vertices, key=lambda v: (rarity[sig_a[v]], v)):
        if start in placed:
            continue
        placed.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            order.append(u)
            nbrs = sorted({w for fi in a.incidence[u] for w in a.facets[fi]} - placed)
            for w in nbrs:
                placed.add(w)
                queue.append(w)

    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(v: str, w: str) -> bool:
        for fi in a.incidence[v]:
            imgs = [mapping[u] for u in a.facets[fi] if u in mapping]
            common = set(b_inc[w])
            for x in imgs:
                common &= b_inc[x]
                if not common:
                    return False
        return True

    def candidates(v: str) -> list[str]:
        pool = b_by_sig[sig_a[v]]
        anchors = [mapping[u] for fi in a.incidence[v] for u in a.facets[fi] if u in mapping]
        if anchors:
            near = {x for fi in b_inc[anchors[0]] for x in b_facet_sets[fi]}
            pool = [w for w in pool if w in near]
        return [w for w in pool if w not in used]

    def search(k: int) -> bool:
        if k == len(order):
            return True
        v = order[k]
        for w in candidates(v):
            if consistent(v, w):
                mapping[v] = w
                used.add(w)
                if search(k + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    limit = sys.getrecursionlimit()
    if len(order) + 100 > limit:
        sys.setrecursionlimit(len(order) + 1000)
    try:
        found = search(0)
    finally:
        sys.setrecursionlimit(limit)
    if not found:
        return None
    image = {frozenset(mapping[v] for v in f) for f in a.facets}
    if image != set(b_facet_sets):
        return None
    return dict(mapping)


# -- JSON -------------------------------------------------------------------


def _label_to_json(label: frozenset[Atom]) -> dict[str, list[str]]:
    out: dict[str, list[str]] = defaultdict(list)
    for agent, value in sorted(label):
        out[agent].append(value)
    return dict(out)


def _label_from_json(color: str, data: Any) -> frozenset[Atom]:
    if data is None:
        return frozenset()
    if isinstance(data, Mapping):
        atoms = set()
        for agent, values in data.items():
            if isinstance(values, (str, int)):
                values = [values]
            atoms.update((str(agent), str(x)) for x in values)
        return frozenset(atoms)
    return _as_label(color, data)


def payload_to_json(payload: Any) -> Any:
    if isinstance(payload, tuple):
        return [payload_to_json(p) for p in payload]
    return payload


def payload_from_json(data: Any) -> Hashable:
    if isinstance(data, list):
        return tuple(payload_from_json(p) for p in data)
    return data


def model_to_dict(c: ChromaticComplex) -> dict:
    vertices = []
    for vid in sorted(c.vertices, key=lambda v: (c.agent_index(c.vertices[v].color), v)):
        v = c.vertices[vid]
        item: dict[str, Any] = {"id": v.id, "color": v.color, "label": _label_to_json(v.label)}
        if v.payload is not None:
            item["payload"] = payload_to_json(v.payload)
        vertices.append(item)
    return {
        "agents": list(c.agents),
        "vertices": vertices,
        "facets": [list(f) for f in c.facets],
    }


def model_from_dict(data: Mapping[str, Any]) -> SimplicialModel:
    try:
        agents = [str(a) for a in data["agents"]]
        vertices = [
            Vertex(
                str(v["id"]),
                str(v["color"]),
                _label_from_json(str(v["color"]), v.get("label")),
                payload_from_json(v.get("payload")),
            )
            for v in data["vertices"]
        ]
        facets = [[str(x) for x in f] for f in data["facets"]]
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed model JSON: {exc!r}") from None
    return SimplicialModel(agents, vertices, facets)
