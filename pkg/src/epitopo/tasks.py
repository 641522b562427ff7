"""Tasks as action models whose facets are decision vectors."""

from __future__ import annotations

import itertools
import warnings
from typing import Any, Iterable, Mapping, Sequence

from .action import ActionModel, Update, product_update
from .complex import ChromaticComplex, Vertex
from .errors import TaskSpecError
from .logic import Formula, conj, extension, parse, some_input


class UnsatisfiablePrecondition(UserWarning):
    pass


class Task(ActionModel):
    """Action model with one vertex ``<a, d_a>`` per agent and decision."""

    def __init__(self, complex: ChromaticComplex, preconditions, name: str, params: Mapping | None = None):
        super().__init__(complex, preconditions)
        self.name = name
        self.params = dict(params or {})

    def decisions(self, facet) -> dict[str, str]:
        i = self.complex.resolve_facet(facet)
        f = self.complex.facets[i]
        return {a: self.complex.vertices[v].payload for a, v in zip(self.agents, f)}

    def __repr__(self) -> str:
        return f"Task({self.name!r}, facets={len(self.facets)})"


def decision_vertex_id(agent: str, value: str) -> str:
    return f"{agent}={value}"


def make_task(
    agents: Sequence[str],
    facets: Iterable[tuple[Sequence[str], Formula]],
    name: str,
    params: Mapping | None = None,
) -> Task:
    """Build a task from (decision vector in agent order, precondition) pairs."""
    agents = tuple(agents)
    vertices: dict[str, Vertex] = {}
    rows = []
    pre = {}
    for decision, phi in facets:
        decision = tuple(str(d) for d in decision)
        if len(decision) != len(agents):
            raise TaskSpecError(f"decision vector {decision} does not cover agents {agents}")
        row = []
        for a, d in zip(agents, decision):
            vid = decision_vertex_id(a, d)
            vertices.setdefault(vid, Vertex(vid, a, frozenset(), payload=d))
            row.append(vid)
        row = tuple(row)
        if row in pre:
            raise TaskSpecError(f"decision vector {decision} listed twice")
        rows.append(row)
        pre[row] = phi
    if not rows:
        raise TaskSpecError("a task needs at least one facet")
    order = sorted(vertices.values(), key=lambda v: (agents.index(v.color), v.id))
    complex = ChromaticComplex(agents, order, rows)
    return Task(complex, pre, name, params)


def _values(values: Iterable[Any]) -> list[str]:
    return [str(v) for v in values]


def consensus(m: ChromaticComplex, values: Sequence[Any] = ("0", "1")) -> Task:
    """All agents decide the same value, held as input by at least one of them."""
    vals = _values(values)
    n = len(m.agents)
    facets = [((v,) * n, some_input(m.agents, v)) for v in vals]
    return make_task(m.agents, facets, "consensus", {"values": vals})


def k_set_agreement(m: ChromaticComplex, values: Sequence[Any], k: int) -> Task:
    """At most ``k`` distinct decisions, each the input of some agent."""
    vals = _values(values)
    if k < 1:
        raise TaskSpecError("k must be at least 1")
    facets = []
    for vec in itertools.product(vals, repeat=len(m.agents)):
        distinct = sorted(set(vec), key=vals.index)
        if len(distinct) <= k:
            facets.append((vec, conj(some_input(m.agents, d) for d in distinct)))
    return make_task(m.agents, facets, f"{k}-set-agreement", {"values": vals, "k": k})


def approximate_agreement(m: ChromaticComplex, n: int, low: str = "0", high: str = "1") -> Task:
    """Decisions ``j/n`` (stored as numerators ``j``) at most ``1/n`` apart, within the input range.

    Inputs are ``low`` (=0) and ``high`` (=1). A vector whose smallest
    decision is below 1 needs some input 0; one whose largest decision is
    above 0 needs some input 1.
    """
    if n < 1:
        raise TaskSpecError("granularity must be >= 1")
    facets = []
    for vec in itertools.product(range(n + 1), repeat=len(m.agents)):
        lo, hi = min(vec), max(vec)
        if hi - lo > 1:
            continue
        parts = []
        if lo < n:
            parts.append(some_input(m.agents, low))
        if hi > 0:
            parts.append(some_input(m.agents, high))
        facets.append((tuple(map(str, vec)), conj(parts)))
    return make_task(m.agents, facets, "approximate-agreement", {"N": n, "inputs": [low, high]})


def task_from_dict(spec: Mapping[str, Any], model: ChromaticComplex | None = None) -> Task:
    """Task from ``{name, agents, facets: [{decisions: {agent: value}, pre: "formula"}]}``.

    With ``model`` given, preconditions false on every facet of it trigger an
    :class:`UnsatisfiablePrecondition` warning.
    """
    try:
        agents = tuple(str(a) for a in spec["agents"])
        raw = spec["facets"]
        name = str(spec.get("name", "custom"))
    except (KeyError, TypeError) as exc:
        raise TaskSpecError(f"malformed task JSON: {exc!r}") from None
    if not isinstance(raw, list) or not raw:
        raise TaskSpecError("task needs a nonempty 'facets' list")
    facets = []
    for item in raw:
        try:
            decisions = item["decisions"]
            pre_text = item.get("pre", "true")
        except (KeyError, TypeError, AttributeError):
            raise TaskSpecError(f"malformed task facet {item!r}") from None
        if set(map(str, decisions)) != set(agents):
            raise TaskSpecError(f"facet decisions {decisions} do not match agents {agents}")
        vec = tuple(str(decisions[a]) for a in agents)
        facets.append((vec, parse(str(pre_text), agents)))
    task = make_task(agents, facets, name, spec.get("params"))
    if model is not None:
        for f in task.facets:
            if not extension(model, task.pre[f]):
                warnings.warn(
                    f"precondition {task.pre[f]} of {task.decisions(f)} holds nowhere",
                    UnsatisfiablePrecondition,
                    stacklevel=2,
                )
    return task


custom_task = task_from_dict


def task_to_dict(task: Task) -> dict:
    return {
        "name": task.name,
        "agents": list(task.agents),
        "params": task.params,
        "facets": [
            {"decisions": task.decisions(f), "pre": str(task.pre[f])} for f in task.facets
        ],
    }


def task_model(m: ChromaticComplex, task: Task) -> Update:
    """``m`` updated by the task, with its projection onto ``m``."""
    return product_update(m, task)
