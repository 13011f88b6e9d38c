"""Graphviz export of the world dynamics, grouped by partition blocks."""
from __future__ import annotations

from .model import LoopModel
from .partition import Partition

PALETTE = ("#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
           "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f")


def _q(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r"\""))


def to_dot(model: LoopModel, partition: Partition, title: str = "world") -> str:
    """One node per world state, one edge per (action, successor) with positive mass.

    Nodes of a block share a cluster and a fill colour.
    """
    ar = model.arith
    lines = [f"digraph {_q(title)} {{", "  rankdir=LR;", '  node [shape=circle, style=filled];']
    for b, block in enumerate(partition.blocks):
        color = PALETTE[b % len(PALETTE)]
        lines.append(f"  subgraph cluster_{b} {{")
        lines.append(f"    label={_q('block ' + str(b))};")
        for w in block:
            lines.append(f"    {_q(model.W.states[w])} [fillcolor={_q(color)}];")
        lines.append("  }")
    nw = model.n_world
    for w in range(nw):
        for a, al in enumerate(model.A.states):
            for v, p in enumerate(model.alpha_row(a, w)):
                if not ar.is_zero(p):
                    lines.append(f"  {_q(model.W.states[w])} -> {_q(model.W.states[v])} "
                                 f"[label={_q(al + ', ' + ar.fmt(p))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
