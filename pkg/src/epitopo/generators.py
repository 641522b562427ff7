"""Built-in example models and seeded random model generators."""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from .complex import SimplicialModel, build_model
from .duality import to_simplicial
from .kripke import KripkeModel, is_proper

_NAMES = {1: ("a",), 2: ("g", "w"), 3: ("b", "g", "w")}


def default_agents(n: int) -> tuple[str, ...]:
    if n < 1:
        raise ValueError("need at least one agent")
    return _NAMES.get(n, tuple(f"a{i}" for i in range(n)))


def input_model(agents: Sequence[str] | int, values: Sequence[str] = ("0", "1")) -> SimplicialModel:
    """Every agent independently holds one of ``values``; all combinations are facets."""
    if isinstance(agents, int):
        agents = default_agents(agents)
    values = [str(v) for v in values]
    rows = [dict(zip(agents, combo)) for combo in itertools.product(values, repeat=len(agents))]
    return build_model(agents, rows, gluing="label")


def binary_inputs(n: int) -> SimplicialModel:
    return input_model(default_agents(n), ("0", "1"))


def cards(deck: int, agents: Sequence[str] = ("b", "g", "w")) -> SimplicialModel:
    """One distinct card per agent from ``range(deck)``; the remaining cards stay hidden."""
    if deck < len(agents):
        raise ValueError("deck smaller than the number of agents")
    rows = [
        dict(zip(agents, map(str, hand)))
        for hand in itertools.permutations(range(deck), len(agents))
    ]
    return build_model(agents, rows, gluing="label")


def strip() -> SimplicialModel:
    """Three triangles: the first two glued along the g,w edge, the last two at the b vertex."""
    rows = [
        {"b": "0", "g": "0", "w": "0"},
        {"b": "1", "g": "0", "w": "0"},
        {"b": "1", "g": "1", "w": "1"},
    ]
    return build_model(("b", "g", "w"), rows, gluing="label")


def single_facet(agents: Sequence[str] | int, value: str = "0") -> SimplicialModel:
    if isinstance(agents, int):
        agents = default_agents(agents)
    return build_model(agents, [{a: value for a in agents}], gluing=None)


def random_kripke(
    rng: random.Random,
    max_states: int = 12,
    max_agents: int = 3,
    values: Sequence[str] = ("0", "1", "2"),
) -> KripkeModel:
    """A random proper local Kripke model.

    Each agent's partition is random; each block gets one random value for
    that agent, which makes the model local. States that no agent tells
    apart from an earlier state are dropped to make it proper.
    """
    n_agents = rng.randint(1, max_agents)
    agents = default_agents(n_agents)
    n_states = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n_states)]
    relations = {}
    valuation: dict[str, list[tuple[str, str]]] = {s: [] for s in states}
    for a in agents:
        n_blocks = rng.randint(1, n_states)
        assign = [rng.randrange(n_blocks) for _ in states]
        blocks = [[s for s, b in zip(states, assign) if b == k] for k in range(n_blocks)]
        blocks = [b for b in blocks if b]
        relations[a] = blocks
        for b in blocks:
            value = rng.choice(values)
            for s in b:
                valuation[s].append((a, value))
    keep = []
    seen = set()
    for s in states:
        key = tuple(next(i for i, b in enumerate(relations[a]) if s in b) for a in agents)
        if key not in seen:
            seen.add(key)
            keep.append(s)
    relations = {a: [[s for s in b if s in keep] for b in bs] for a, bs in relations.items()}
    relations = {a: [b for b in bs if b] for a, bs in relations.items()}
    m = KripkeModel(agents, keep, relations, {s: valuation[s] for s in keep})
    assert is_proper(m)
    return m


def random_model(rng: random.Random, max_states: int = 12, max_agents: int = 3) -> SimplicialModel:
    return to_simplicial(random_kripke(rng, max_states, max_agents))


BUILTIN = {
    "binary-inputs": binary_inputs,
    "cards": cards,
    "strip": strip,
}
