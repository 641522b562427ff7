"""Translations between simplicial models and proper local Kripke models."""

from __future__ import annotations

from collections import defaultdict

from .complex import ChromaticComplex, SimplicialModel, Vertex, find_isomorphism, vertex_names
from .errors import NotLocal, NotProper
from .kripke import KripkeModel, find_kripke_isomorphism, is_local, is_proper


def state_names(m: ChromaticComplex) -> list[str]:
    """Facet names when they are unique, ``X0, X1, ...`` otherwise."""
    names = [m.facet_name(i) for i in range(len(m.facets))]
    if len(set(names)) == len(names):
        return names
    return [f"X{i}" for i in range(len(m.facets))]


def to_kripke(m: ChromaticComplex) -> KripkeModel:
    """States are facets; ``a`` relates facets sharing their ``a``-vertex."""
    names = state_names(m)
    relations = {}
    for col, agent in enumerate(m.agents):
        groups: dict[str, list[str]] = defaultdict(list)
        for i, f in enumerate(m.facets):
            groups[f[col]].append(names[i])
        relations[agent] = list(groups.values())
    valuation = {names[i]: m.facet_label(i) for i in range(len(m.facets))}
    return KripkeModel(m.agents, names, relations, valuation)


def to_simplicial(k: KripkeModel) -> SimplicialModel:
    """Glue one facet per state along the agents' indistinguishability classes."""
    if not is_proper(k):
        raise NotProper("Kripke model is not proper")
    if not is_local(k):
        raise NotLocal("Kripke model is not local")
    entries = []
    keys = []
    for a in k.agents:
        for bi, block in enumerate(k.relations[a]):
            rep = min(block, key=k.states.index)
            entries.append((a, k.local_values(a, rep)))
            keys.append((a, bi))
    ids = dict(zip(keys, vertex_names(entries)))
    vertices = [Vertex(ids[key], key[0], label) for key, (_, label) in zip(keys, entries)]
    facets = [[ids[(a, k.block_of[a][s])] for a in k.agents] for s in k.states]
    return SimplicialModel(k.agents, vertices, facets)


def roundtrip_check(m: ChromaticComplex | KripkeModel) -> bool:
    """Whether the round trip through the other representation returns an isomorphic model."""
    if isinstance(m, KripkeModel):
        return find_kripke_isomorphism(to_kripke(to_simplicial(m)), m) is not None
    return find_isomorphism(to_simplicial(to_kripke(m)), m) is not None
