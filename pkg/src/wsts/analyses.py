"""Verification procedures: coverability, coverability sets, termination.

Backward analysis saturates predecessor bases of an upward-closed target.
Forward analysis builds the Karp-Miller tree (acceleration to omega) or
the reduced reachability tree (branches stop at a dominated ancestor).
A bounded breadth-first oracle provides independent ground truth for
small instances.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import BudgetExceededError, UnsupportedAnalysisError, UsageError
from .orders import (
    MARKING_ORDER,
    OMEGA,
    Configuration,
    MinBasis,
    is_omega,
    maximal_elements,
    minimize,
    omega_add,
)

DEFAULT_BASIS_BUDGET = 10**6
DEFAULT_STATE_BUDGET = 10**6


def _require_backward(model):
    if not hasattr(model, "pre_elements"):
        raise UnsupportedAnalysisError(
            f"backward analysis is not available for {model.kind} models"
        )


@dataclass(frozen=True)
class CoverabilityResult:
    verdict: str  # coverable | not-coverable
    witness: tuple[str, ...] | None
    basis: MinBasis
    iterations: int
    explored: int


def backward_coverability(model, target, init=None, budget_basis=DEFAULT_BASIS_BUDGET):
    """Saturate min-pre bases of the target's upward closure.

    Each new basis element remembers the transition and the element it
    is a predecessor of, so a coverable verdict carries a transition
    sequence leading from above the initial configuration into the
    target's upward closure.
    """
    _require_backward(model)
    init = model.init if init is None else init
    order = model.order
    origin = {target: None}
    basis = minimize([target], order)
    iterations = 0
    while True:
        iterations += 1
        pres = []
        for s in basis.elements:
            for tid, pre in model.pre_elements(s):
                if pre not in origin:
                    origin[pre] = (tid, s)
                pres.append(pre)
        grown = basis.union(minimize(pres, order))
        if basis.includes(grown):
            break
        basis = grown
        if len(basis) > budget_basis:
            raise BudgetExceededError(
                f"backward saturation exceeded {budget_basis} basis elements"
            )
    witness = None
    verdict = "not-coverable"
    for b in basis.elements:
        if order.leq(b, init):
            verdict = "coverable"
            chain = []
            cur = b
            while origin[cur] is not None:
                tid, cur = origin[cur]
                chain.append(tid)
            witness = tuple(chain)
            break
    return CoverabilityResult(verdict, witness, basis, iterations, len(origin))


def control_state_reachability(model, state, init=None, budget_basis=DEFAULT_BASIS_BUDGET):
    """Coverability of the least configuration carrying the given state."""
    _require_backward(model)
    if state not in model.states:
        raise UsageError(f"unknown state {state!r}")
    if model.kind == "lcs":
        payload = ("",) * len(model.channels)
    else:
        payload = (0,) * model.dimension
    target = Configuration(state, payload)
    return backward_coverability(model, target, init, budget_basis)


def replay_witness(model, witness, start=None):
    """Fire a transition sequence, returning every configuration visited.

    Perfect steps for counter models.  For lossy channel machines a recv
    whose letter is buried drops exactly the letters in front of its
    first occurrence; nothing else is ever lost.
    """
    c = model.init if start is None else start
    visited = [c]
    if model.kind == "lcs":
        for tid in witness:
            t = model.transition(tid)
            if t.source != c.state:
                raise UsageError(f"transition {tid} does not fire at {c}")
            payload = c.payload
            if t.action == "send":
                payload = tuple(
                    w + t.letter if i == t.channel else w for i, w in enumerate(payload)
                )
            elif t.action == "recv":
                word = payload[t.channel]
                pos = word.find(t.letter)
                if pos < 0:
                    raise UsageError(f"transition {tid} does not fire at {c}")
                payload = tuple(
                    w[pos + 1 :] if i == t.channel else w for i, w in enumerate(payload)
                )
            c = Configuration(t.target, payload)
            visited.append(c)
        return visited
    for tid in witness:
        nxt = None
        for other, succ in model.successors(c):
            if other == tid:
                nxt = succ
                break
        if nxt is None:
            raise UsageError(f"transition {tid} does not fire at {c}")
        c = nxt
        visited.append(c)
    return visited


@dataclass(eq=False)
class KmNode:
    marking: Configuration
    parent: "KmNode | None"
    tid: str | None
    accelerated: bool = False
    closed: bool = False
    index: int = 0


@dataclass
class KmResult:
    nodes: list[KmNode]
    clover: tuple[Configuration, ...]
    expanded: int

    @property
    def root(self) -> KmNode:
        return self.nodes[0]


def _ancestors(node):
    cur = node.parent
    while cur is not None:
        yield cur
        cur = cur.parent


def _accelerate(marking, parent):
    """Set omega on coordinates pumped above some ancestor, repeatedly."""
    accelerated = False
    changed = True
    while changed:
        changed = False
        for a in _ancestors_inclusive(parent):
            am = a.marking
            if am.state != marking.state or am.payload == marking.payload:
                continue
            if not MARKING_ORDER.leq(am, marking):
                continue
            payload = tuple(
                OMEGA if (not is_omega(v)) and (not is_omega(w)) and v > w else v
                for v, w in zip(marking.payload, am.payload)
            )
            if payload == marking.payload:
                # every strictly increased coordinate is already saturated
                continue
            marking = Configuration(marking.state, payload)
            accelerated = True
            changed = True
            break
    return marking, accelerated


def _ancestors_inclusive(node):
    cur = node
    while cur is not None:
        yield cur
        cur = cur.parent


def karp_miller(model, init=None, budget_states=DEFAULT_STATE_BUDGET):
    """Coverability-set construction by acceleration over extended markings."""
    if model.kind != "vass":
        raise UnsupportedAnalysisError(
            f"coverability sets via acceleration need a vass model, not {model.kind}"
        )
    if model.has_resets:
        raise UnsupportedAnalysisError("acceleration is unsound in the presence of resets")
    init = model.init if init is None else init
    root = KmNode(Configuration(init.state, tuple(init.payload)), None, None)
    nodes = [root]
    queue = deque([root])
    expanded = 0
    while queue:
        node = queue.popleft()
        if any(
            a.marking == node.marking for a in _ancestors(node)
        ):
            node.closed = True
            continue
        expanded += 1
        marking = node.marking
        for t in model.transitions:
            if t.source != marking.state:
                continue
            if any(
                not is_omega(v) and v < g for v, g in zip(marking.payload, t.guard)
            ):
                continue
            payload = tuple(omega_add(v, d) for v, d in zip(marking.payload, t.delta))
            succ = Configuration(t.target, payload)
            succ, accelerated = _accelerate(succ, node)
            child = KmNode(succ, node, t.tid, accelerated, False, len(nodes))
            nodes.append(child)
            queue.append(child)
            if len(nodes) > budget_states:
                raise BudgetExceededError(
                    f"tree construction exceeded {budget_states} nodes"
                )
    clover = maximal_elements([n.marking for n in nodes], MARKING_ORDER)
    return KmResult(nodes, clover, expanded)


@dataclass(eq=False)
class RrtNode:
    config: Configuration
    parent: "RrtNode | None"
    tid: str | None
    status: str = "interior"  # interior | deadend | subsumed
    subsumed_by: "RrtNode | None" = None
    strict: bool = False
    index: int = 0


@dataclass
class RrtResult:
    nodes: list[RrtNode]
    expanded: int


def build_rrt(model, init=None, budget_states=DEFAULT_STATE_BUDGET):
    """Reachability tree whose branches stop at a dominated ancestor.

    When several ancestors lie below a node, a strictly dominated one is
    preferred so unboundedness witnesses are never masked by an equal
    repeat further down the path.
    """
    init = model.init if init is None else init
    order = model.order
    root = RrtNode(Configuration(init.state, tuple(init.payload)), None, None)
    nodes = [root]
    queue = deque([root])
    expanded = 0
    while queue:
        node = queue.popleft()
        equal_anc = None
        strict_anc = None
        for a in _ancestors(node):
            if not order.leq(a.config, node.config):
                continue
            if a.config == node.config:
                equal_anc = equal_anc or a
            else:
                strict_anc = strict_anc or a
        anc = strict_anc or equal_anc
        if anc is not None:
            node.status = "subsumed"
            node.subsumed_by = anc
            node.strict = anc is strict_anc
            continue
        expanded += 1
        succ = model.successors(node.config)
        if not succ:
            node.status = "deadend"
            continue
        for tid, c in succ:
            child = RrtNode(c, node, tid, index=len(nodes))
            nodes.append(child)
            queue.append(child)
            if len(nodes) > budget_states:
                raise BudgetExceededError(
                    f"tree construction exceeded {budget_states} nodes"
                )
    return RrtResult(nodes, expanded)


@dataclass(frozen=True)
class PumpWitness:
    """Path to a configuration plus a segment that can repeat forever."""

    prefix: tuple[str, ...]
    pump: tuple[str, ...]


def _path_witness(node):
    anc = node.subsumed_by
    pump = []
    cur = node
    while cur is not anc:
        pump.append(cur.tid)
        cur = cur.parent
    prefix = []
    while cur.parent is not None:
        prefix.append(cur.tid)
        cur = cur.parent
    return PumpWitness(tuple(reversed(prefix)), tuple(reversed(pump)))


@dataclass
class TerminationResult:
    terminates: bool
    witness: PumpWitness | None
    tree: RrtResult


@dataclass
class BoundednessResult:
    bounded: bool
    witness: PumpWitness | None
    tree: RrtResult


def _require_vass(model, analysis, allow_resets):
    if model.kind != "vass":
        raise UnsupportedAnalysisError(f"{analysis} needs a vass model, not {model.kind}")
    if model.has_resets and not allow_resets:
        raise UnsupportedAnalysisError(f"{analysis} needs strict monotonicity; resets break it")


def termination(model, init=None, budget_states=DEFAULT_STATE_BUDGET):
    """The system has an infinite run iff some branch repeats upward."""
    _require_vass(model, "termination analysis", allow_resets=True)
    tree = build_rrt(model, init, budget_states)
    for node in tree.nodes:
        if node.status == "subsumed":
            return TerminationResult(False, _path_witness(node), tree)
    return TerminationResult(True, None, tree)


def boundedness(model, init=None, budget_states=DEFAULT_STATE_BUDGET):
    """Finitely many reachable configurations iff no strict upward repeat."""
    _require_vass(model, "boundedness analysis", allow_resets=False)
    tree = build_rrt(model, init, budget_states)
    for node in tree.nodes:
        if node.status == "subsumed" and node.strict:
            return BoundednessResult(False, _path_witness(node), tree)
    return BoundednessResult(True, None, tree)


@dataclass(frozen=True)
class OracleResult:
    reachable: frozenset
    conclusive: bool


def _within(config, cutoff):
    for v in config.payload:
        size = len(v) if isinstance(v, str) else v
        if size > cutoff:
            return False
    return True


def bounded_forward_oracle(model, cutoff, init=None, step_budget=DEFAULT_STATE_BUDGET):
    """Breadth-first reachability truncated at a per-coordinate cutoff.

    Conclusive means the exploration closed without ever generating a
    configuration beyond the cutoff; the returned set is then exactly
    the reachable set.
    """
    init = model.init if init is None else init
    if not _within(init, cutoff):
        return OracleResult(frozenset([init]), False)
    conclusive = True
    seen = {init}
    queue = deque([init])
    while queue:
        c = queue.popleft()
        for _, succ in model.successors(c):
            if not _within(succ, cutoff):
                conclusive = False
                continue
            if succ in seen:
                continue
            if len(seen) >= step_budget:
                return OracleResult(frozenset(seen), False)
            seen.add(succ)
            queue.append(succ)
    return OracleResult(frozenset(seen), conclusive)


def _marking_label(c: Configuration) -> str:
    return repr(c)


def km_to_dot(result: KmResult) -> str:
    """Tree rendering: dashed edge into accelerated nodes, double circle on closed ones."""
    lines = ["digraph km {"]
    for n in result.nodes:
        shape = ' shape="doublecircle"' if n.closed else ""
        lines.append(f'  n{n.index} [label="{_marking_label(n.marking)}"{shape}];')
    for n in result.nodes:
        if n.parent is None:
            continue
        style = ' style="dashed"' if n.accelerated else ""
        lines.append(f'  n{n.parent.index} -> n{n.index} [label="{n.tid}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def rrt_to_dot(result: RrtResult) -> str:
    lines = ["digraph rrt {"]
    for n in result.nodes:
        shape = ' shape="doublecircle"' if n.status == "subsumed" else ""
        lines.append(f'  n{n.index} [label="{_marking_label(n.config)}"{shape}];')
    for n in result.nodes:
        if n.parent is None:
            continue
        lines.append(f'  n{n.parent.index} -> n{n.index} [label="{n.tid}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
