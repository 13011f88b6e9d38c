"""JSON model files.

Single-agent file::

    {
      "spaces": {"W": [...], "S": [...], "C": [...], "A": [...]},
      "kernels": {
        "alpha": {"source": ["A", "W"], "target": ["W"], "rows": [["1/2", "1/2"], ...]},
        "beta": ..., "phi": ..., "pi": ...
      },
      "initial": null | [flat over W x S x C x A] | {"W": [...], "S": [...], ...},
      "memoryless": false,
      "arithmetic": "rational" | {"float": 1e-9}
    }

Two-agent file: ``spaces`` holds only ``W``; ``agents`` is a list of two objects
``{"spaces": {"S", "C", "A"}, "sensors": {"rows"}, "memory": {"rows"},
"policy": {"rows"}, "memoryless"}``; ``alpha`` is ``{"rows"}`` over A1 x A2 x W.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from pathlib import Path

from .arith import Arithmetic
from .model import FiniteSpace, Kernel, LoopModel, ModelError
from .multiagent import AgentSpec, TwoAgentModel
from .partition import Partition

SPACE_NAMES = ("W", "S", "C", "A")
KERNEL_NAMES = ("alpha", "beta", "phi", "pi")


class InputError(ValueError):
    """Unreadable or malformed input file."""


def read_json(path: str | Path) -> tuple[dict, bytes]:
    data = Path(path).read_bytes()
    try:
        return json.loads(data.decode("utf-8")), data
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    except UnicodeDecodeError as e:
        raise InputError(f"{path}: not UTF-8 text ({e})") from None


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def parse_arithmetic(obj) -> Arithmetic:
    if obj is None or obj == "rational":
        return Arithmetic.rational()
    if isinstance(obj, dict) and set(obj) == {"float"}:
        return Arithmetic.floating(float(obj["float"]))
    raise InputError(f"unknown arithmetic {obj!r}")


def _rows(ar: Arithmetic, rows, where: str):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError(f"{where}: rows must be an array of arrays")
    try:
        return tuple(tuple(ar.parse(x) for x in r) for r in rows)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise InputError(f"{where}: bad number ({e})") from None


def _space(name: str, labels) -> FiniteSpace:
    if not isinstance(labels, list) or not labels:
        raise InputError(f"space {name}: expected a non-empty list of labels")
    try:
        return FiniteSpace(name, tuple(str(x) for x in labels))
    except ModelError as e:
        raise InputError(str(e)) from None


def model_from_json(obj: dict) -> LoopModel:
    if not isinstance(obj, dict):
        raise InputError("model file must hold a JSON object")
    ar = parse_arithmetic(obj.get("arithmetic"))
    spaces_obj = obj.get("spaces") or {}
    missing = [n for n in SPACE_NAMES if n not in spaces_obj]
    if missing:
        raise InputError(f"missing spaces: {', '.join(missing)}")
    spaces = {n: _space(n, spaces_obj[n]) for n in spaces_obj}
    kernels = {}
    for name in KERNEL_NAMES:
        spec = (obj.get("kernels") or {}).get(name)
        if spec is None:
            raise InputError(f"missing kernel {name}")
        try:
            src = tuple(spaces[s] for s in spec["source"])
            tgt = tuple(spaces[s] for s in spec["target"])
            kernels[name] = Kernel(src, tgt, _rows(ar, spec["rows"], name))
        except KeyError as e:
            raise InputError(f"kernel {name}: unknown or missing field {e}") from None
        except ModelError as e:
            raise InputError(str(e)) from None
    W, S, C, A = (spaces[n] for n in SPACE_NAMES)
    return LoopModel(W, S, C, A, **kernels, initial=_initial(obj.get("initial"), ar, (W, S, C, A)),
                     memoryless=bool(obj.get("memoryless", False)), arith=ar)


def _initial(obj, ar: Arithmetic, spaces):
    if obj is None:
        return None
    if isinstance(obj, list):
        return tuple(ar.parse(x) for x in obj)
    if isinstance(obj, dict):
        marginals = []
        for sp in spaces:
            m = obj.get(sp.name)
            if m is None and sp.name == "W":
                m = [ar.one / len(sp)] * len(sp)
            elif m is None:
                m = [ar.one] + [ar.zero] * (len(sp) - 1)
            marginals.append([ar.parse(x) for x in m])
        out = []
        for combo in itertools.product(*marginals):
            p = ar.one
            for x in combo:
                p = p * x
            out.append(p)
        return tuple(out)
    raise InputError("initial must be null, a list, or per-space marginals")


def _fmt_rows(ar: Arithmetic, rows):
    return [[ar.fmt(x) for x in r] for r in rows]


def model_to_json(model: LoopModel) -> dict:
    ar = model.arith
    return {
        "spaces": {n: list(getattr(model, n).states) for n in SPACE_NAMES},
        "kernels": {
            name: {
                "source": [s.name for s in getattr(model, name).source],
                "target": [t.name for t in getattr(model, name).target],
                "rows": _fmt_rows(ar, getattr(model, name).rows),
            }
            for name in KERNEL_NAMES
        },
        "initial": None if model.initial is None else [ar.fmt(x) for x in model.initial],
        "memoryless": model.memoryless,
        "arithmetic": ar.to_json(),
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def load_model(path: str | Path) -> tuple[LoopModel, bytes]:
    obj, data = read_json(path)
    return model_from_json(obj), data


def save_model(model: LoopModel, path: str | Path, extra: dict | None = None) -> None:
    obj = model_to_json(model)
    if extra:
        obj.update(extra)
    Path(path).write_text(dumps(obj), encoding="utf-8")


def partition_from_json(obj: dict, space: FiniteSpace | None = None) -> Partition:
    try:
        blocks = [[str(x) for x in b] for b in obj["blocks"]]
    except (KeyError, TypeError):
        raise InputError("partition file needs a 'blocks' array") from None
    if space is None:
        states = obj.get("states") or [x for b in blocks for x in b]
        space = FiniteSpace(str(obj.get("space", "W")), tuple(str(x) for x in states))
    try:
        return Partition.from_blocks(space, blocks)
    except ModelError as e:
        raise InputError(str(e)) from None


def is_two_agent(obj) -> bool:
    return isinstance(obj, dict) and "agents" in obj


def two_agent_from_json(obj: dict) -> TwoAgentModel:
    ar = parse_arithmetic(obj.get("arithmetic"))
    try:
        W = _space("W", obj["spaces"]["W"])
        agents = []
        for k, ag in enumerate(obj["agents"], 1):
            sp = {n: _space(n, ag["spaces"][n]) for n in ("S", "C", "A")}
            agents.append(AgentSpec(
                sp["S"], sp["C"], sp["A"],
                beta=Kernel((W,), (sp["S"],), _rows(ar, ag["sensors"]["rows"], f"agent{k}.sensors")),
                phi=Kernel((sp["S"], sp["C"]), (sp["C"],), _rows(ar, ag["memory"]["rows"], f"agent{k}.memory")),
                pi=Kernel((sp["C"],), (sp["A"],), _rows(ar, ag["policy"]["rows"], f"agent{k}.policy")),
                memoryless=bool(ag.get("memoryless", False)),
            ))
        if len(agents) != 2:
            raise InputError("exactly two agents are supported")
        alpha = Kernel((agents[0].A, agents[1].A, W), (W,), _rows(ar, obj["alpha"]["rows"], "alpha"))
    except KeyError as e:
        raise InputError(f"two-agent file: missing field {e}") from None
    except ModelError as e:
        raise InputError(str(e)) from None
    return TwoAgentModel(W, (agents[0], agents[1]), alpha, ar)


def two_agent_to_json(m: TwoAgentModel) -> dict:
    ar = m.arith
    return {
        "spaces": {"W": list(m.W.states)},
        "agents": [
            {
                "spaces": {"S": list(a.S.states), "C": list(a.C.states), "A": list(a.A.states)},
                "sensors": {"rows": _fmt_rows(ar, a.beta.rows)},
                "memory": {"rows": _fmt_rows(ar, a.phi.rows)},
                "policy": {"rows": _fmt_rows(ar, a.pi.rows)},
                "memoryless": a.memoryless,
            }
            for a in m.agents
        ],
        "alpha": {"rows": _fmt_rows(ar, m.alpha.rows)},
        "arithmetic": ar.to_json(),
    }
