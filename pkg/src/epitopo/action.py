"""Simplicial action models, cartesian products, product update and morphisms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, NamedTuple, Union

from .complex import (
    ChromaticComplex,
    Facet,
    SimplicialModel,
    Vertex,
    model_from_dict,
    model_to_dict,
)
from .duality import state_names
from .errors import CompositionMismatch, DimensionMismatch, ModelError
from .kripke import KripkeActionModel
from .logic import Formula, extension, is_positive, parse


@dataclass(frozen=True)
class AtFacets:
    """Precondition given extensionally: true exactly at these facets of the input model.

    Used when no formula over the input atoms singles out a facet, e.g. for the
    later rounds of an iterated protocol where many facets share a valuation.
    """

    facets: frozenset[Facet]

    def __str__(self) -> str:
        return "@{" + ", ".join("+".join(f) for f in sorted(self.facets)) + "}"


Precondition = Union[Formula, AtFacets]


class ActionModel:
    """A pure chromatic complex whose facets carry preconditions."""

    def __init__(self, complex: ChromaticComplex, preconditions: Mapping[Any, Precondition]):
        self.complex = complex
        pre: dict[Facet, Precondition] = {}
        for key, phi in preconditions.items():
            i = complex.resolve_facet(key)
            pre[complex.facets[i]] = phi
        missing = [f for f in complex.facets if f not in pre]
        if missing:
            raise ModelError(f"{len(missing)} action facets lack a precondition, e.g. {missing[0]}")
        self.pre = pre

    @property
    def agents(self) -> tuple[str, ...]:
        return self.complex.agents

    @property
    def facets(self) -> tuple[Facet, ...]:
        return self.complex.facets

    def __repr__(self) -> str:
        return f"ActionModel({self.complex!r})"


def precondition_extension(m: ChromaticComplex, pre: Precondition) -> frozenset[int]:
    if isinstance(pre, AtFacets):
        return frozenset(m.facet_index[f] for f in pre.facets if f in m.facet_index)
    return extension(m, pre)


# -- morphisms --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Morphism:
    source: ChromaticComplex
    target: ChromaticComplex
    mapping: Mapping[str, str]

    def __call__(self, vid: str) -> str:
        return self.mapping[vid]

    def facet_image(self, i: int) -> int | None:
        """Index in the target of the image of source facet ``i`` (None if not a facet)."""
        image = tuple(self.mapping.get(v) for v in self.source.facets[i])
        if None in image:
            return None
        try:
            return self.target.resolve_facet(image)
        except KeyError:
            return None


def identity(m: ChromaticComplex) -> Morphism:
    return Morphism(m, m, {v: v for v in m.vertices})


def check_morphism(f: Morphism) -> bool:
    """Color- and label-preserving simplicial map sending facets to facets."""
    src, tgt = f.source, f.target
    for vid, v in src.vertices.items():
        w = f.mapping.get(vid)
        if w is None or w not in tgt.vertices:
            return False
        if tgt.vertices[w].color != v.color or tgt.vertices[w].label != v.label:
            return False
    target_facets = set(tgt.facets)
    for facet in src.facets:
        try:
            image = tgt._order_facet([f.mapping[v] for v in facet], tgt.vertices)
        except ModelError:
            return False
        if image not in target_facets:
            return False
    return True


def _same(a: ChromaticComplex, b: ChromaticComplex) -> bool:
    return a is b or a == b


def compose(f: Morphism, g: Morphism) -> Morphism:
    """``g`` after ``f``."""
    if not _same(f.target, g.source):
        raise CompositionMismatch("target of the first morphism is not the source of the second")
    return Morphism(f.source, g.target, {v: g.mapping[w] for v, w in f.mapping.items()})


def knowledge_gain_violations(f: Morphism, formulas: Iterable[Formula]) -> list[tuple[int, Formula]]:
    """Pairs (facet, formula) where a positive formula holds at the image but not at the facet."""
    out = []
    for phi in formulas:
        if not is_positive(phi):
            raise ValueError(f"not a positive formula: {phi}")
        at_source = extension(f.source, phi)
        at_target = extension(f.target, phi)
        for i in range(len(f.source.facets)):
            j = f.facet_image(i)
            if j is not None and j in at_target and i not in at_source:
                out.append((i, phi))
    return out


# -- products ---------------------------------------------------------------


def _pair_id(u: str, v: str) -> str:
    return f"({u},{v})"


def _check_agents(c: ChromaticComplex, t: ChromaticComplex) -> None:
    if len(c.agents) != len(t.agents):
        raise DimensionMismatch(f"dimensions differ: {c.dimension} vs {t.dimension}")
    if set(c.agents) != set(t.agents):
        raise DimensionMismatch(f"agent sets differ: {c.agents} vs {t.agents}")


def _pair_facets(
    c: ChromaticComplex, t: ChromaticComplex, pairs: Iterable[tuple[Facet, Facet]], model_type=ChromaticComplex
) -> tuple[ChromaticComplex, dict[str, str]]:
    t_cols = [t.agent_index(a) for a in c.agents]
    vertices: dict[str, Vertex] = {}
    keys: dict[str, tuple[str, str]] = {}
    facets = []
    for x, y in pairs:
        row = []
        for col, agent in enumerate(c.agents):
            u, v = x[col], y[t_cols[col]]
            vid = _pair_id(u, v)
            if vid not in vertices:
                vertices[vid] = Vertex(vid, agent, c.vertices[u].label)
                keys[vid] = (u, v)
            elif keys[vid] != (u, v):
                raise ModelError(f"vertex id collision on {vid!r}")
            row.append(vid)
        facets.append(tuple(row))
    facets.sort()
    order = sorted(vertices.values(), key=lambda v: (c.agent_index(v.color), v.id))
    model = model_type(c.agents, order, facets)
    return model, {vid: uv[0] for vid, uv in keys.items()}


def cartesian_product(c: ChromaticComplex, t: ChromaticComplex) -> ChromaticComplex:
    """Color-matched product: one facet ``X x Y`` per pair of facets; labels come from ``c``."""
    _check_agents(c, t)
    product, _ = _pair_facets(c, t, itertools.product(c.facets, t.facets))
    return product


class Update(NamedTuple):
    model: SimplicialModel
    projection: Morphism

    @property
    def empty(self) -> bool:
        return self.model.is_empty()


def product_update(m: ChromaticComplex, a: ActionModel) -> Update:
    """Sub-complex of ``m x a`` induced by the facets ``X x Y`` with ``pre(Y)`` true at ``X``.

    Returns the updated model and the first projection onto ``m``. An empty
    result is reported through ``Update.empty`` rather than raised.
    """
    _check_agents(m, a.complex)
    cache: dict[Precondition, frozenset[int]] = {}
    pairs = []
    for y in a.facets:
        pre = a.pre[y]
        if pre not in cache:
            cache[pre] = precondition_extension(m, pre)
        pairs.extend((m.facets[i], y) for i in sorted(cache[pre]))
    model, proj = _pair_facets(m, a.complex, pairs, SimplicialModel)
    return Update(model, Morphism(model, m, proj))


# -- Kripke counterpart and JSON -------------------------------------------


def to_kripke_action(a: ActionModel) -> KripkeActionModel:
    """The action model seen as a Kripke action model (points are action facets)."""
    c = a.complex
    names = state_names(c)
    relations = {}
    for col, agent in enumerate(c.agents):
        groups: dict[str, list[str]] = {}
        for i, f in enumerate(c.facets):
            groups.setdefault(f[col], []).append(names[i])
        relations[agent] = list(groups.values())
    pre = {}
    for i, f in enumerate(c.facets):
        if isinstance(a.pre[f], AtFacets):
            raise ModelError("extensional preconditions have no Kripke counterpart")
        pre[names[i]] = a.pre[f]
    return KripkeActionModel(c.agents, names, relations, pre)


def action_to_dict(a: ActionModel) -> dict:
    data = model_to_dict(a.complex)
    pre = {}
    for i, f in enumerate(a.facets):
        p = a.pre[f]
        pre[str(i)] = {"at": [list(x) for x in sorted(p.facets)]} if isinstance(p, AtFacets) else str(p)
    data["preconditions"] = pre
    return data


def action_from_dict(data: Mapping[str, Any]) -> ActionModel:
    complex = model_from_dict(data)
    pre: dict[Any, Precondition] = {}
    raw = data.get("preconditions")
    if not isinstance(raw, Mapping):
        raise ModelError("action model JSON needs a 'preconditions' object")
    for key, text in raw.items():
        facet_key: Any = int(key) if str(key).isdigit() else key
        if isinstance(text, Mapping) and "at" in text:
            pre[facet_key] = AtFacets(frozenset(tuple(map(str, f)) for f in text["at"]))
        else:
            pre[facet_key] = parse(str(text), complex.agents)
    return ActionModel(complex, pre)
