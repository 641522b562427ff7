"""Command-line interface.

Exit status: 0 on success, 1 on domain errors (the error class name is
printed), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import generators
from .action import Update, action_from_dict, product_update
from .complex import ChromaticComplex, build_model, invariants, model_from_dict, model_to_dict, to_dot
from .duality import to_kripke, to_simplicial
from .errors import EpitopoError
from .kripke import KripkeModel, check_kripke, kripke_from_dict, kripke_to_dict
from .logic import check, parse
from .protocols import protocol_model
from .solver import solve, verify
from .tasks import (
    Task,
    approximate_agreement,
    consensus,
    k_set_agreement,
    task_from_dict,
    task_model,
    task_to_dict,
)


class UsageError(Exception):
    pass


def _load_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise EpitopoError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise EpitopoError(f"{path}: invalid JSON ({exc})") from None


def load_any(path: str) -> ChromaticComplex | KripkeModel:
    data = _load_json(path)
    if isinstance(data, dict) and "states" in data:
        return kripke_from_dict(data)
    if not isinstance(data, dict):
        raise EpitopoError(f"{path}: expected a JSON object")
    return model_from_dict(data)


def load_model(path: str) -> ChromaticComplex:
    m = load_any(path)
    if isinstance(m, KripkeModel):
        raise EpitopoError(f"{path} holds a Kripke model; dualize it first")
    return m


def _emit(data: Any, out: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=False) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _update_to_dict(u: Update, **extra) -> dict:
    data = model_to_dict(u.model)
    data["projection"] = dict(sorted(u.projection.mapping.items()))
    data.update(extra)
    return data


def _model_values(m: ChromaticComplex) -> list[str]:
    vals = {v for vert in m.vertices.values() for _, v in vert.label}
    return sorted(vals, key=lambda x: (len(x), x))


def _split(text: str | None) -> list[str] | None:
    return None if text is None else [x.strip() for x in text.split(",") if x.strip()]


def build_task(spec: str, m: ChromaticComplex, values: list[str] | None) -> Task:
    if spec == "consensus":
        return consensus(m, values or _model_values(m))
    if spec.startswith("ksa:"):
        k = _int_arg(spec[4:], "ksa:k")
        return k_set_agreement(m, values or _model_values(m), k)
    if spec.startswith("approx:"):
        n = _int_arg(spec[7:], "approx:N")
        low, high = (values or ["0", "1"])[:2]
        return approximate_agreement(m, n, low, high)
    if spec.endswith(".json") or Path(spec).exists():
        return task_from_dict(_load_json(spec), m)
    raise UsageError(f"unknown task {spec!r}; use consensus, ksa:k, approx:N or a JSON file")


def _int_arg(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"{what}: expected an integer, got {text!r}") from None


def _protocol_rounds(spec: str) -> int:
    if not spec.startswith("is:"):
        raise UsageError(f"unknown protocol {spec!r}; use is:r")
    return _int_arg(spec[3:], "is:r")


# -- commands -----------------------------------------------------------------


def cmd_model_gen(args) -> int:
    kind = args.kind
    if kind == "binary-inputs":
        m = generators.binary_inputs(args.agents)
    elif kind == "inputs":
        m = generators.input_model(args.agents, _split(args.values) or ["0", "1"])
    elif kind == "cards":
        m = generators.cards(args.deck)
    elif kind == "strip":
        m = generators.strip()
    else:
        m = generators.single_facet(args.agents)
    _emit(model_to_dict(m), args.out)
    return 0


def cmd_model_build(args) -> int:
    data = _load_json(args.rows)
    try:
        agents, rows = data["agents"], data["rows"]
    except (KeyError, TypeError):
        raise EpitopoError("rows file needs 'agents' and 'rows'") from None
    gluing = data.get("gluing", "label")
    m = build_model(agents, rows, gluing)
    _emit(model_to_dict(m), args.out)
    return 0


def cmd_model_validate(args) -> int:
    m = load_any(args.file)
    if isinstance(m, KripkeModel):
        from .kripke import is_local, is_proper

        info = {"kind": "kripke", "states": len(m.states), "proper": is_proper(m), "local": is_local(m)}
    else:
        info = {"kind": "simplicial", "vertices": len(m.vertices), "facets": len(m.facets)}
    if args.json:
        _emit({"valid": True, **info}, None)
    else:
        print("valid " + " ".join(f"{k}={v}" for k, v in info.items()))
    return 0


def cmd_model_dualize(args) -> int:
    m = load_any(args.file)
    if isinstance(m, KripkeModel):
        _emit(model_to_dict(to_simplicial(m)), args.out)
    else:
        _emit(kripke_to_dict(to_kripke(m)), args.out)
    return 0


def cmd_check(args) -> int:
    m = load_any(args.model)
    phi = parse(args.formula, m.agents)
    if isinstance(m, KripkeModel):
        if args.state is None:
            raise UsageError("Kripke models need --state")
        value = check_kripke(m, args.state, phi)
    else:
        if args.facet is None:
            raise UsageError("simplicial models need --facet")
        key: Any = args.facet
        value = check(m, key, phi)
    print(json.dumps({"value": value}) if args.json else str(value).lower())
    return 0


def cmd_update(args) -> int:
    m = load_model(args.model)
    a = action_from_dict(_load_json(args.action))
    u = product_update(m, a)
    if u.empty:
        print("warning: empty update (no precondition holds anywhere)", file=sys.stderr)
    _emit(_update_to_dict(u, empty=u.empty), args.out)
    return 0


def cmd_protocol(args) -> int:
    m = load_model(args.input)
    u = protocol_model(m, args.rounds)
    _emit(_update_to_dict(u, rounds=args.rounds), args.out)
    return 0


def cmd_task(args) -> int:
    m = load_model(args.input)
    task = build_task(args.spec, m, _split(args.values))
    if args.product:
        u = task_model(m, task)
        _emit(_update_to_dict(u, task=task.name), args.out)
    else:
        _emit(task_to_dict(task), args.out)
    return 0


def cmd_solve(args) -> int:
    m = load_model(args.input)
    rounds = _protocol_rounds(args.protocol)
    protocol = protocol_model(m, rounds)
    task = build_task(args.task, m, _split(args.values))
    tm = task_model(m, task)
    obstruction: Any = None
    if args.obstruction:
        if args.obstruction == "connectivity":
            obstruction = "connectivity"
        elif args.obstruction.startswith("logic:"):
            obstruction = parse(args.obstruction[6:], m.agents)
        else:
            raise UsageError("--obstruction takes connectivity or logic:<formula>")
    result = solve(protocol, tm, budget=args.budget, obstruction=obstruction)
    seconds = result.stats.pop("seconds", None)
    if args.json:
        data = result.to_dict()
        data["verified"] = verify(result, protocol, tm)
        _emit(data, None)
    else:
        print(result.status)
        if result.certificate is not None:
            print(f"certificate: {json.dumps(result.certificate.to_dict())}", file=sys.stderr)
    print(f"nodes={result.stats.get('nodes')} seconds={seconds:.3f}", file=sys.stderr)
    return 0


def cmd_export(args) -> int:
    m = load_model(args.model)
    sys.stdout.write(to_dot(m, _split(args.agents)))
    return 0


def cmd_stats(args) -> int:
    m = load_model(args.model)
    report = invariants(m)
    if args.json:
        _emit(report.to_dict(), None)
    else:
        for key, value in report.to_dict().items():
            print(f"{key:30} {value}")
    return 0


# -- parser ---------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with status 2
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand from resetting a --json given before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    p = _Parser(prog="epitopo", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    model = sub.add_parser("model", help="build, validate, convert or generate models")
    msub = model.add_subparsers(dest="action", required=True, parser_class=_Parser)
    gen = msub.add_parser("gen", parents=[common], help="built-in example models")
    gen.add_argument("kind", choices=["binary-inputs", "inputs", "cards", "strip", "single"])
    gen.add_argument("--agents", type=int, default=3)
    gen.add_argument("--values", help="comma-separated input values (inputs)")
    gen.add_argument("--deck", type=int, default=4)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_model_gen)
    build = msub.add_parser("build", parents=[common], help="model from a rows file")
    build.add_argument("rows")
    build.add_argument("--out")
    build.set_defaults(func=cmd_model_build)
    val = msub.add_parser("validate", parents=[common])
    val.add_argument("file")
    val.set_defaults(func=cmd_model_validate)
    dual = msub.add_parser("dualize", parents=[common], help="simplicial <-> Kripke")
    dual.add_argument("file")
    dual.add_argument("--out")
    dual.set_defaults(func=cmd_model_dualize)

    chk = sub.add_parser("check", parents=[common], help="evaluate a formula")
    chk.add_argument("--model", required=True)
    chk.add_argument("--facet")
    chk.add_argument("--state")
    chk.add_argument("--formula", required=True)
    chk.set_defaults(func=cmd_check)

    upd = sub.add_parser("update", parents=[common], help="product update with an action model")
    upd.add_argument("--model", required=True)
    upd.add_argument("--action", required=True)
    upd.add_argument("--out")
    upd.set_defaults(func=cmd_update)

    proto = sub.add_parser("protocol", parents=[common], help="protocol model")
    proto.add_argument("kind", choices=["is"])
    proto.add_argument("--rounds", type=int, default=1)
    proto.add_argument("--input", required=True)
    proto.add_argument("--out")
    proto.set_defaults(func=cmd_protocol)

    task = sub.add_parser("task", parents=[common], help="task action model")
    task.add_argument("spec", help="consensus | ksa:k | approx:N | file.json")
    task.add_argument("--input", required=True)
    task.add_argument("--values")
    task.add_argument("--product", action="store_true", help="write the updated input model")
    task.add_argument("--out")
    task.set_defaults(func=cmd_task)

    slv = sub.add_parser("solve", parents=[common], help="decide task solvability")
    slv.add_argument("--input", required=True)
    slv.add_argument("--protocol", default="is:1")
    slv.add_argument("--task", required=True)
    slv.add_argument("--values")
    slv.add_argument("--obstruction")
    slv.add_argument("--budget", type=int)
    slv.set_defaults(func=cmd_solve)

    exp = sub.add_parser("export", parents=[common], help="DOT facet-adjacency graph")
    exp.add_argument("--dot", action="store_true", required=True)
    exp.add_argument("--model", required=True)
    exp.add_argument("--agents")
    exp.set_defaults(func=cmd_export)

    st = sub.add_parser("stats", parents=[common], help="topological invariants")
    st.add_argument("--model", required=True)
    st.set_defaults(func=cmd_stats)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"epitopo: error: {exc}", file=sys.stderr)
        return 2
    except EpitopoError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
