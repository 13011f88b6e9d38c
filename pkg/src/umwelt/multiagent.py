"""Two agents over one world, and partition-lattice views of their Umwelten."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .arith import Arithmetic
from .intrinsic import intrinsic_partition
from .model import (CapExceeded, FiniteSpace, Kernel, LoopModel, ModelError, _check_rows,
                    phi_is_memoryless)
from .partition import Partition, join, meet
from .refinement import sigma_beta, w_am, w_sep

DEFAULT_MAX_JOINT_STATES = 4096


def max_joint_states() -> int:
    return int(os.environ.get("UMWELT_MAX_JOINT_STATES", DEFAULT_MAX_JOINT_STATES))


@dataclass(frozen=True)
class AgentSpec:
    S: FiniteSpace
    C: FiniteSpace
    A: FiniteSpace
    beta: Kernel
    phi: Kernel
    pi: Kernel
    memoryless: bool = False


@dataclass(frozen=True)
class TwoAgentModel:
    """Shared world W; ``alpha`` has source A1 x A2 x W."""

    W: FiniteSpace
    agents: tuple[AgentSpec, AgentSpec]
    alpha: Kernel
    arith: Arithmetic = Arithmetic()

    def validate(self) -> list[str]:
        out = []
        a1, a2 = self.agents
        if self.alpha.source != (a1.A, a2.A, self.W) or self.alpha.target != (self.W,):
            out.append(f"alpha: wired as {self.alpha.describe()}, expected "
                       f"{a1.A.name}x{a2.A.name}x{self.W.name}->{self.W.name}")
        else:
            out.extend(_check_rows("alpha", self.alpha, self.arith))
        for i, ag in enumerate(self.agents, 1):
            for name in ("beta", "phi", "pi"):
                out.extend(_check_rows(f"agent{i}.{name}", getattr(ag, name), self.arith))
            if ag.memoryless and not phi_is_memoryless(ag.phi, self.arith):
                out.append(f"agent{i}.phi: memoryless is set but phi depends on memory")
        return out


@dataclass(frozen=True)
class AgentView:
    """Agent ``index``'s loop, whose world is (w, s_j, c_j, a_j) of the partner j."""

    index: int
    model: LoopModel


def _outer_space(m: TwoAgentModel, j: int) -> FiniteSpace:
    p = m.agents[j]
    labels = tuple(f"{w},{s},{c},{a}" for w in m.W.states for s in p.S.states
                   for c in p.C.states for a in p.A.states)
    return FiniteSpace(f"{m.W.name}^({2 - j})", labels)


def agent_view(m: TwoAgentModel, i: int) -> AgentView:
    """Loop seen by agent ``i`` (1 or 2), with the partner folded into the world.

    One step: w' ~ alpha(a1, a2, w), then the partner senses, updates memory and
    acts: s' ~ beta_j(w'), c' ~ phi_j(s', c), a' ~ pi_j(c').
    """
    if i not in (1, 2):
        raise ValueError("agent index must be 1 or 2")
    me, other = m.agents[i - 1], m.agents[2 - i]
    j = 2 - i
    nw, ns, nc, na = len(m.W), len(other.S), len(other.C), len(other.A)
    n_outer = nw * ns * nc * na
    if n_outer > max_joint_states():
        raise CapExceeded(f"outer world of agent {i} has {n_outer} states (cap {max_joint_states()})")
    Wi = _outer_space(m, j)
    ar = m.arith
    n_me = len(me.A)

    def decode(x):
        w, r = divmod(x, ns * nc * na)
        s, r = divmod(r, nc * na)
        c, a = divmod(r, na)
        return w, s, c, a

    rows = []
    for ai in range(n_me):
        for x in range(n_outer):
            w, _, c, aj = decode(x)
            row = [ar.zero] * n_outer
            src = (ai, aj, w) if i == 1 else (aj, ai, w)
            wrow = m.alpha.row(*src)
            for w2, pw in enumerate(wrow):
                if not pw:
                    continue
                for s2, ps in enumerate(other.beta.rows[w2]):
                    if not ps:
                        continue
                    for c2, pc in enumerate(other.phi.row(s2, c)):
                        if not pc:
                            continue
                        for a2, pa in enumerate(other.pi.rows[c2]):
                            if pa:
                                row[((w2 * ns + s2) * nc + c2) * na + a2] += pw * ps * pc * pa
            rows.append(tuple(row))
    beta = Kernel((Wi,), (me.S,), tuple(me.beta.rows[decode(x)[0]] for x in range(n_outer)))
    model = LoopModel(Wi, me.S, me.C, me.A,
                      alpha=Kernel((me.A, Wi), (Wi,), tuple(rows)), beta=beta,
                      phi=me.phi, pi=me.pi, memoryless=me.memoryless, arith=ar)
    return AgentView(i, model)


@dataclass(frozen=True)
class JointLayout:
    """The full joint space (w, s1, c1, a1, s2, c2, a2) with projections to each view."""

    m: TwoAgentModel

    @property
    def dims(self) -> tuple[int, ...]:
        a1, a2 = self.m.agents
        return (len(self.m.W), len(a1.S), len(a1.C), len(a1.A), len(a2.S), len(a2.C), len(a2.A))

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def space(self) -> FiniteSpace:
        if self.size > max_joint_states():
            raise CapExceeded(f"joint space has {self.size} states (cap {max_joint_states()})")
        a1, a2 = self.m.agents
        spaces = (self.m.W, a1.S, a1.C, a1.A, a2.S, a2.C, a2.A)
        labels = [",".join(sp.states[k] for sp, k in zip(spaces, self.decode(x))) for x in range(self.size)]
        return FiniteSpace("joint", tuple(labels))

    def decode(self, x: int) -> tuple[int, ...]:
        out = []
        for d in reversed(self.dims):
            x, r = divmod(x, d)
            out.append(r)
        return tuple(reversed(out))

    def to_view(self, x: int, i: int) -> int:
        """Index, in agent i's outer world, of joint state x."""
        w, s1, c1, a1, s2, c2, a2 = self.decode(x)
        s, c, a = (s2, c2, a2) if i == 1 else (s1, c1, a1)
        p = self.m.agents[2 - i]
        return ((w * len(p.S) + s) * len(p.C) + c) * len(p.A) + a

    def lift(self, p: Partition, i: int) -> Partition:
        sp = self.space()
        return Partition(sp, tuple(p.labels[self.to_view(x, i)] for x in range(self.size)))

    def w_cylinder(self, p: Partition) -> Partition | None:
        """The partition of W that ``p`` is a cylinder over, if any."""
        by_w: dict[int, int] = {}
        for x in range(self.size):
            w = self.decode(x)[0]
            if by_w.setdefault(w, p.labels[x]) != p.labels[x]:
                return None
        return Partition(self.m.W, tuple(by_w[w] for w in range(len(self.m.W))))


def _meet_report(layout: JointLayout, p1: Partition, p2: Partition) -> dict:
    l1, l2 = layout.lift(p1, 1), layout.lift(p2, 2)
    mt = meet(l1, l2)
    cyl = layout.w_cylinder(mt)
    blocks = [{"size": len(b), "w_cylinder": layout.w_cylinder(_single(mt, k)) is not None}
              for k, b in enumerate(mt.blocks)]
    return {
        "lifted_equal": l1 == l2,
        "meet_blocks": len(mt.blocks),
        "blocks": blocks,
        "all_w_cylinders": cyl is not None,
        "w_partition": cyl.block_labels() if cyl is not None else None,
    }


def _single(p: Partition, k: int) -> Partition:
    """Two-block partition {block k, rest}."""
    return Partition(p.space, tuple(int(b == k) for b in p.labels))


def shared_distinctions(m: TwoAgentModel) -> dict:
    """Meet of both agents' lifted partitions on the joint space, for W_int and W_sep."""
    layout = JointLayout(m)
    layout.space()
    views = [agent_view(m, 1).model, agent_view(m, 2).model]
    intr = [intrinsic_partition(v).partition for v in views]
    sep = [w_sep(v)[0] for v in views]
    # the outer worlds W x S_j x C_j x A_j are identified by label when the agents' spaces agree
    same_spaces = views[0].W.states == views[1].W.states
    return {
        "joint_states": layout.size,
        "umwelten_equal": same_spaces and intr[0].labels == intr[1].labels,
        "intrinsic": _meet_report(layout, *intr),
        "separate": _meet_report(layout, *sep),
        "agent_intrinsic": [p.block_labels() for p in intr],
        "agent_separate": [p.block_labels() for p in sep],
    }


def view_analysis(view: AgentView) -> dict:
    m = view.model
    sep, trace = w_sep(m)
    out = {
        "agent": view.index,
        "world_states": len(m.W),
        "sigma_beta": sigma_beta(m).block_labels(),
        "w_sep": sep.block_labels(),
        "fixpoint_index": trace.fixpoint_index,
        "intrinsic": intrinsic_partition(m).partition.block_labels(),
    }
    if m.memoryless:
        out["w_am"] = w_am(m)[0].block_labels()
    return out


def umwelt_table(model: LoopModel) -> dict:
    """Merkwelt sigma(beta) against W_int, classified for degenerate agents.

    The effector world is not constructed; for a passive observer it is taken
    to be trivial, which fixes W_cap and W_vee.  For a blind actor W_vee would
    equal the effector world and is reported as unavailable.
    """
    merk = sigma_beta(model)
    intr = intrinsic_partition(model).partition
    passive = len(model.A) == 1
    blind = len(model.S) == 1
    kind = ("passive observer and blind actor" if passive and blind else
            "passive observer" if passive else "blind actor" if blind else "general")
    row = {
        "kind": kind,
        "merkwelt": merk.block_labels(),
        "intrinsic": intr.block_labels(),
        "merkwelt_trivial": merk.is_trivial(),
        "intrinsic_trivial": intr.is_trivial(),
        "intrinsic_refines_merkwelt": intr.refines(merk),
    }
    verdicts = []
    if passive:
        wirk = Partition.trivial(model.W)
        row["w_cap"] = meet(merk, wirk).block_labels()
        row["w_vee"] = join(merk, wirk).block_labels()
        verdicts.append("W_int contains Merkwelt" if intr.refines(merk) else "VIOLATION")
    if blind:
        row.setdefault("w_cap", Partition.trivial(model.W).block_labels())
        row.setdefault("w_vee", None)
        verdicts.append("W_int: no Umwelt" if intr.is_trivial() else "VIOLATION")
    if verdicts:
        row["verdict"] = "; ".join(verdicts)
    return row


def partition_lattice_report(p: Partition, q: Partition) -> dict:
    return {"join": join(p, q).to_json(), "meet": meet(p, q).to_json(),
            "p_refines_q": p.refines(q), "q_refines_p": q.refines(p), "equal": p == q}


def as_single_agent(m: TwoAgentModel, i: int) -> LoopModel:
    """Agent i's loop on W alone, valid when the partner is degenerate (one state everywhere)."""
    me, other = m.agents[i - 1], m.agents[2 - i]
    if (len(other.S), len(other.C), len(other.A)) != (1, 1, 1):
        raise ModelError("partner is not degenerate")
    nw = len(m.W)
    rows = tuple(m.alpha.row(*((a, 0, w) if i == 1 else (0, a, w)))
                 for a in range(len(me.A)) for w in range(nw))
    model = LoopModel(m.W, me.S, me.C, me.A, alpha=Kernel((me.A, m.W), (m.W,), rows),
                      beta=me.beta, phi=me.phi, pi=me.pi, memoryless=me.memoryless, arith=m.arith)
    return model
