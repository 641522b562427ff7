"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary (see conftest.py) and when the module is run directly.
Tolerances are fixed here and not tuned per run.
"""

from __future__ import annotations

import random
import sys
import time
from contextlib import contextmanager
from functools import cache

from epitopo.complex import find_isomorphism, invariants
from epitopo.duality import to_kripke, to_simplicial
from epitopo.generators import binary_inputs, cards, input_model, random_kripke, random_model, single_facet, strip
from epitopo.kripke import extension_kripke, find_kripke_isomorphism
from epitopo.logic import Atom, C, K, Not, Or, check, modal_depth, some_input
from epitopo.action import check_morphism, compose, knowledge_gain_violations
from epitopo.kripke import check_kripke
from epitopo.protocols import immediate_snapshot, ordered_partitions, protocol_model
from epitopo.solver import SOLVABLE, UNKNOWN, UNSOLVABLE, connectivity_obstruction, logical_obstruction, node_budget, solve, verify
from epitopo.tasks import approximate_agreement, consensus, k_set_agreement, task_model

from helpers import random_formula

# pinned limits (seconds / counts)
C1_SECONDS = 5.0
C2_TRIPLES, C2_DEPTH, C2_SECONDS = 500, 3, 30.0
C3_INSTANCES = 200
C4_SECONDS = 10.0
C6_TWO_AGENT_SECONDS, C6_THREE_AGENT_SECONDS, C6_CONNECTIVITY_SECONDS = 1.0, 600.0, 5.0
C9_FORMULAS = 100

RESULTS: dict[int, str] = {}


@contextmanager
def criterion(num: int, title: str):
    start = time.perf_counter()
    notes: list[str] = []
    try:
        yield notes
    except BaseException as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        RESULTS[num] = f"[FAIL] C{num} {title}: {msg[:160]}"
        print(RESULTS[num])
        raise
    elapsed = time.perf_counter() - start
    extra = f" ({'; '.join(notes)})" if notes else ""
    RESULTS[num] = f"[PASS] C{num} {title} in {elapsed:.2f}s{extra}"
    print(RESULTS[num])


def _timed(fn, *args, **kw):
    start = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - start


def test_c1_duality_round_trips():
    with criterion(1, "duality round trips") as notes:
        start = time.perf_counter()
        fixed = [binary_inputs(2), binary_inputs(3), strip()]
        kripkes = [random_kripke(random.Random(seed)) for seed in range(50)]
        for m in fixed:
            assert find_isomorphism(to_simplicial(to_kripke(m)), m) is not None
            k = to_kripke(m)
            assert find_kripke_isomorphism(to_kripke(to_simplicial(k)), k) is not None
        for k in kripkes:
            assert len(k.states) <= 12 and len(k.agents) <= 3
            assert find_kripke_isomorphism(to_kripke(to_simplicial(k)), k) is not None
            m = to_simplicial(k)
            assert find_isomorphism(to_simplicial(to_kripke(m)), m) is not None
        elapsed = time.perf_counter() - start
        notes.append(f"{len(fixed)} fixed + {len(kripkes)} random models")
        assert elapsed < C1_SECONDS, f"{elapsed:.2f}s >= {C1_SECONDS}s"


def test_c2_semantic_agreement():
    with criterion(2, "simplicial vs Kripke semantics") as notes:
        rng = random.Random(2024)
        start = time.perf_counter()
        done = 0
        while done < C2_TRIPLES:
            m = random_model(rng)
            k = to_kripke(m)
            for _ in range(10):
                phi = random_formula(rng, m.agents, ["0", "1", "2"], depth=C2_DEPTH)
                assert modal_depth(phi) <= C2_DEPTH
                i = rng.randrange(len(m.facets))
                assert check(m, i, phi) == check_kripke(k, k.states[i], phi), (i, str(phi))
                done += 1
        elapsed = time.perf_counter() - start
        notes.append(f"{done} triples")
        assert elapsed < C2_SECONDS


def _violations(m, rng) -> int:
    bad = 0
    values = sorted({v for lab in m.valuation.values() for _, v in lab} | {"0"})
    universe = frozenset(m.states)
    for _ in range(4):
        phi = random_formula(rng, m.agents, values, depth=2)
        psi = random_formula(rng, m.agents, values, depth=1)
        ext = extension_kripke(m, phi)
        for a in m.agents:
            k = extension_kripke(m, K(a, phi))
            bad += len(k - ext)  # T
            bad += len(k - extension_kripke(m, K(a, K(a, phi))))  # 4
            nk = extension_kripke(m, Not(K(a, phi)))
            bad += len(nk - extension_kripke(m, K(a, Not(K(a, phi)))))  # 5
            kimp = extension_kripke(m, K(a, Or(Not(phi), psi)))
            bad += len((kimp & k) - extension_kripke(m, K(a, psi)))  # K
    for a in m.agents:
        for x in values:
            loc = Or(K(a, Atom(a, x)), K(a, Not(Atom(a, x))))
            bad += len(universe - extension_kripke(m, loc))
    return bad


def test_c3_s5_loc_soundness():
    with criterion(3, "S5 + Loc soundness") as notes:
        rng = random.Random(33)
        total = 0
        for seed in range(C3_INSTANCES):
            model_rng = random.Random(seed)
            total += _violations(random_kripke(model_rng), rng)
        # simplicial-born models as well
        for m in (binary_inputs(2), binary_inputs(3), strip(), cards(4)):
            total += _violations(to_kripke(m), rng)
        notes.append(f"{C3_INSTANCES + 4} models, {total} violations")
        assert total == 0


def _brute_force_partition_count(n: int) -> int:
    import itertools

    seen = set()
    for ranks in itertools.product(range(n), repeat=n):
        k = max(ranks) + 1
        if set(ranks) == set(range(k)):
            seen.add(ranks)
    return len(seen)


def test_c4_immediate_snapshot_counts():
    with criterion(4, "immediate snapshot counts") as notes:
        start = time.perf_counter()
        counts = []
        for n in (1, 2, 3, 4):
            got = len(ordered_partitions("abcd"[:n]))
            assert got == _brute_force_partition_count(n)
            counts.append(got)
        assert counts == [1, 3, 13, 75]
        comp = invariants(immediate_snapshot(single_facet(3)).complex)
        assert comp.counts[-1] == 13 and comp.counts[0] == 12 and comp.euler_characteristic == 1
        proto = invariants(protocol_model(binary_inputs(3), 1).model)
        assert proto.counts[-1] == 104 and proto.euler_characteristic == 2
        assert proto.pseudomanifold_with_boundary
        elapsed = time.perf_counter() - start
        notes.append(f"partitions {counts}; component {comp.counts}; protocol {proto.counts}")
        assert elapsed < C4_SECONDS


def test_c5_topology_preserved():
    with criterion(5, "topology preserved by iterated snapshots") as notes:
        inputs = {
            "binary-2": binary_inputs(2),
            "binary-3": binary_inputs(3),
            "strip": strip(),
            "cards-4": cards(4),
            "cards-3": cards(3),
            "single-3": single_facet(3),
        }
        checked = 0
        for name, m in inputs.items():
            base = invariants(m)
            for r in (1, 2):
                rep = invariants(protocol_model(m, r).model)
                assert rep.euler_characteristic == base.euler_characteristic, (name, r)
                assert rep.pseudomanifold_with_boundary == base.pseudomanifold_with_boundary, (name, r)
                checked += 1
        notes.append(f"{checked} (input, rounds) pairs")


def _consensus_instance(n):
    m = binary_inputs(n)
    return m, protocol_model(m, 1), task_model(m, consensus(m))


def test_c6_consensus_impossible():
    with criterion(6, "binary consensus unsolvable") as notes:
        _, p2, t2 = _consensus_instance(2)
        r2, s2 = _timed(solve, p2, t2)
        assert r2.status == UNSOLVABLE and r2.stats["exhausted"] and verify(r2, p2, t2)
        assert s2 < C6_TWO_AGENT_SECONDS

        m3, p3, t3 = _consensus_instance(3)
        r3, s3 = _timed(solve, p3, t3)
        assert r3.status == UNSOLVABLE and r3.stats["exhausted"] and verify(r3, p3, t3)
        assert s3 < C6_THREE_AGENT_SECONDS

        cert, sc = _timed(connectivity_obstruction, p3, t3)
        assert cert is not None and sc < C6_CONNECTIVITY_SECONDS
        fast = solve(p3, t3, obstruction="connectivity")
        assert fast.status == UNSOLVABLE and verify(fast, p3, t3)

        phi = Or(C(m3.agents, some_input(m3.agents, "0")), C(m3.agents, some_input(m3.agents, "1")))
        logic = logical_obstruction(p3, t3, phi)
        assert logic is not None
        res = solve(p3, t3, obstruction=phi)
        assert res.status == UNSOLVABLE and verify(res, p3, t3)
        notes.append(
            f"2 agents {s2:.3f}s, 3 agents {s3:.3f}s exhaustive, connectivity {sc:.3f}s, "
            f"logical certificate at protocol facet {logic.facet}"
        )


@cache
def _approx(n: int, rounds: int):
    m = binary_inputs(2)
    p, t = protocol_model(m, rounds), task_model(m, approximate_agreement(m, n))
    return p, t, solve(p, t)


def test_c7_approximate_agreement():
    with criterion(7, "approximate agreement rounds") as notes:
        expected = {(3, 1): SOLVABLE, (9, 1): UNSOLVABLE, (9, 2): SOLVABLE}
        for (n, r), status in expected.items():
            p, t, res = _approx(n, r)
            assert res.status == status, (n, r, res.status)
            assert verify(res, p, t)
            if status == SOLVABLE:
                assert compose(res.delta, t.projection).mapping == p.projection.mapping
            notes.append(f"N={n} r={r} {res.status}")


def test_c8_two_set_agreement():
    with criterion(8, "2-set agreement, 3 agents, one round (non-gating)") as notes:
        m = input_model(3, ("0", "1", "2"))
        p, t = protocol_model(m, 1), task_model(m, k_set_agreement(m, ("0", "1", "2"), 2))
        assert connectivity_obstruction(p, t) is None
        res = solve(p, t)
        assert res.status in (UNSOLVABLE, UNKNOWN), res.status
        if res.status == UNSOLVABLE:
            assert res.stats["exhausted"] and verify(res, p, t)
        notes.append(f"{res.status} after {res.stats['nodes']} nodes, budget {node_budget()}")


def test_c9_knowledge_gain():
    with criterion(9, "knowledge gain along decision maps") as notes:
        m = binary_inputs(2)
        rng = random.Random(99)
        battery = [random_formula(rng, m.agents, ["0", "1"], depth=3, positive=True) for _ in range(C9_FORMULAS)]
        maps = []
        for n, r in ((3, 1), (9, 2)):
            p, t, res = _approx(n, r)
            assert res.status == SOLVABLE
            maps.append(res.delta)
        # consensus instances of criterion 6 produce no decision map
        for f in maps:
            assert check_morphism(f)
        violations = sum(len(knowledge_gain_violations(f, battery)) for f in maps)
        checks = sum(len(f.source.facets) for f in maps) * len(battery)
        notes.append(f"{len(maps)} maps x {len(battery)} formulas, {checks} facet checks, {violations} violations")
        assert violations == 0


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
