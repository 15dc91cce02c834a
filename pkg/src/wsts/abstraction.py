"""Over-approximating transforms that restore monotonicity.

A zero test is the one guard that breaks upward compatibility of steps.
Dropping it, or replacing it by a reset, yields a machine with strictly
more behaviour whose safety implies safety of the original.  The same
holds for reading a perfect fifo machine under lossy semantics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from dataclasses import replace as dc_replace

from .errors import UsageError
from .models import CounterMachine, LossyChannelMachine, VassModel, VassTransition
from .orders import Configuration, leq_dickson


@dataclass
class AbstractionReport:
    source: str
    transform: str
    mapping: dict  # source instruction id -> produced transition id
    notes: str = ""


def _abstract_instruction(ins, dimension, zero_as_reset):
    guard = [0] * dimension
    delta = [0] * dimension
    resets = frozenset()
    if ins.op == "inc":
        delta[ins.counter] = 1
    elif ins.op == "dec":
        guard[ins.counter] = 1
        delta[ins.counter] = -1
    elif zero_as_reset:
        resets = frozenset({ins.counter})
    return VassTransition(
        ins.iid,
        ins.source,
        ins.target,
        f"{ins.op}{ins.counter + 1}",
        tuple(guard),
        tuple(delta),
        resets,
    )


def _abstract_machine(m: CounterMachine, zero_as_reset: bool):
    trs = tuple(
        _abstract_instruction(ins, m.dimension, zero_as_reset) for ins in m.instructions
    )
    model = VassModel(m.dimension, m.states, trs, m.init)
    tests = sum(1 for ins in m.instructions if ins.op == "zero")
    if zero_as_reset:
        transform, notes = "reset", f"{tests} zero tests became resets"
    else:
        transform, notes = "drop-zero", f"{tests} zero tests dropped"
    report = AbstractionReport(
        m.name, transform, {ins.iid: ins.iid for ins in m.instructions}, notes
    )
    return model, report


def drop_zero_tests(m: CounterMachine):
    """Zero tests become unguarded no-op edges; the test always passes."""
    return _abstract_machine(m, zero_as_reset=False)


def zero_tests_to_resets(m: CounterMachine):
    """Zero tests become resets: the tested counter is forced to zero."""
    return _abstract_machine(m, zero_as_reset=True)


def lossy_abstraction(m: LossyChannelMachine) -> LossyChannelMachine:
    """Same syntax read under lossy semantics."""
    return dc_replace(m, semantics="lossy")


@dataclass
class SimulationResult:
    verdict: str  # simulates | counterexample
    bound: int
    counterexample: dict | None = None


def simulation_check_bounded(source, abstract, mapping, bound: int) -> SimulationResult:
    """Exhaustively match source steps with mapped abstract steps.

    Checks every source configuration with counters up to the bound: each
    step must be answered from the same configuration by the mapped
    transition, landing pointwise at or above the source step's result.
    The certificate only speaks for configurations within the bound.
    """
    if set(source.states) != set(abstract.states):
        raise UsageError("simulation check needs identical control states")
    if source.dimension != abstract.dimension:
        raise UsageError("simulation check needs identical counter counts")
    for state in source.states:
        for vec in itertools.product(range(bound + 1), repeat=source.dimension):
            c = Configuration(state, vec)
            for iid, succ in source.successors(c):
                cex = {"config": c, "instruction": iid, "step": succ}
                tid = mapping.get(iid)
                if tid is None:
                    cex["reason"] = "instruction has no mapped transition"
                    return SimulationResult("counterexample", bound, cex)
                matched = None
                for other, asucc in abstract.successors(c):
                    if other == tid:
                        matched = asucc
                        break
                if matched is None:
                    cex["reason"] = f"mapped transition {tid} does not fire"
                    return SimulationResult("counterexample", bound, cex)
                if matched.state != succ.state or not leq_dickson(
                    succ.payload, matched.payload
                ):
                    cex["reason"] = f"mapped transition {tid} falls below the source step"
                    cex["abstract_step"] = matched
                    return SimulationResult("counterexample", bound, cex)
    return SimulationResult("simulates", bound)
