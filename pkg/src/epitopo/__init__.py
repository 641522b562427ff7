"""Simplicial models for epistemic logic, DEL product updates and task solvability."""

from .action import (
    ActionModel,
    AtFacets,
    Morphism,
    Update,
    cartesian_product,
    check_morphism,
    compose,
    identity,
    product_update,
)
from .complex import (
    ChromaticComplex,
    SimplicialModel,
    Vertex,
    build_model,
    facet_adjacency,
    find_isomorphism,
    invariants,
)
from .duality import roundtrip_check, to_kripke, to_simplicial
from .kripke import KripkeActionModel, KripkeModel, check_kripke, is_local, is_proper, product_update_kripke
from .logic import check, is_positive, parse
from .protocols import aview, immediate_snapshot, ordered_partitions, protocol_model
from .solver import SolveResult, connectivity_obstruction, logical_obstruction, solve, verify
from .tasks import Task, approximate_agreement, consensus, custom_task, k_set_agreement, task_model

__all__ = [
    "ActionModel",
    "AtFacets",
    "ChromaticComplex",
    "KripkeActionModel",
    "KripkeModel",
    "Morphism",
    "SimplicialModel",
    "SolveResult",
    "Task",
    "Update",
    "Vertex",
    "approximate_agreement",
    "aview",
    "build_model",
    "cartesian_product",
    "check",
    "check_kripke",
    "check_morphism",
    "compose",
    "connectivity_obstruction",
    "consensus",
    "custom_task",
    "facet_adjacency",
    "find_isomorphism",
    "identity",
    "immediate_snapshot",
    "invariants",
    "is_local",
    "is_positive",
    "is_proper",
    "k_set_agreement",
    "logical_obstruction",
    "ordered_partitions",
    "parse",
    "product_update",
    "product_update_kripke",
    "protocol_model",
    "roundtrip_check",
    "solve",
    "task_model",
    "to_kripke",
    "to_simplicial",
    "verify",
]
