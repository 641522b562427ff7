"""Shared generators for tests: seeded random formulas and hypothesis strategies."""

from __future__ import annotations

import random
from typing import Sequence

from hypothesis import strategies as st

from epitopo.logic import (
    FALSE,
    TRUE,
    And,
    Atom,
    C,
    E,
    Formula,
    Implies,
    K,
    Not,
    Or,
)


def _group(rng: random.Random, agents: Sequence[str]) -> tuple[str, ...]:
    k = rng.randint(1, len(agents))
    return tuple(sorted(rng.sample(list(agents), k)))


def random_formula(
    rng: random.Random,
    agents: Sequence[str],
    values: Sequence[str],
    depth: int = 3,
    positive: bool = False,
) -> Formula:
    """A random formula of modal depth at most ``depth``."""

    def atom() -> Formula:
        a = Atom(rng.choice(list(agents)), rng.choice(list(values)))
        if positive and rng.random() < 0.3:
            return Not(a)
        return a

    def gen(d: int, size: int) -> Formula:
        if size <= 0:
            r = rng.random()
            if r < 0.08:
                return TRUE
            if r < 0.12:
                return FALSE
            return atom()
        ops = ["and", "or"] + ([] if positive else ["not", "implies"])
        if d > 0:
            ops += ["K", "K", "E", "C"]
        op = rng.choice(ops)
        if op == "not":
            return Not(gen(d, size - 1))
        if op in ("and", "or", "implies"):
            left = gen(d, size // 2)
            right = gen(d, size - 1 - size // 2)
            return {"and": And, "or": Or, "implies": Implies}[op](left, right)
        if op == "K":
            return K(rng.choice(list(agents)), gen(d - 1, size - 1))
        node = E if op == "E" else C
        return node(_group(rng, agents), gen(d - 1, size - 1))

    return gen(depth, rng.randint(0, 6))


def formulas(agents: Sequence[str] = ("b", "g", "w"), values: Sequence[str] = ("0", "1")):
    """Hypothesis strategy over the full AST."""
    agent = st.sampled_from(list(agents))
    group = st.sets(agent, min_size=1).map(lambda s: tuple(sorted(s)))
    leaves = st.one_of(
        st.just(TRUE),
        st.just(FALSE),
        st.builds(Atom, agent, st.sampled_from(list(values))),
    )

    def extend(inner):
        return st.one_of(
            st.builds(Not, inner),
            st.builds(And, inner, inner),
            st.builds(Or, inner, inner),
            st.builds(Implies, inner, inner),
            st.builds(K, agent, inner),
            st.builds(E, group, inner),
            st.builds(C, group, inner),
        )

    return st.recursive(leaves, extend, max_leaves=12)
