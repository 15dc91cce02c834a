"""Counter and channel machine models.

Each class is an immutable description of a transition system: control
states plus a payload, either a counter vector or a tuple of channel
words.  Classes that are well structured also carry the two operations
the analyses need, one-step successor enumeration and the minimal basis
of one-step predecessors of an upward closure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from .errors import BudgetExceededError, UnsupportedAnalysisError, UsageError
from .orders import CHANNEL_ORDER, VECTOR_ORDER, Configuration, MinBasis, minimize
from .presburger import Formula, conj, eq, free_vars, ge, num, var

# ceiling on per-step subword combinations during lossy enumeration
LOSSY_ENUM_CAP = 4096


def _check_vector_config(c: Configuration, states, dimension, who: str):
    if c.state not in states:
        raise UsageError(f"{who}: unknown state {c.state!r}")
    if len(c.payload) != dimension:
        raise UsageError(f"{who}: payload has {len(c.payload)} entries, expected {dimension}")
    for v in c.payload:
        if not isinstance(v, int) or v < 0:
            raise UsageError(f"{who}: counter values must be nonnegative integers")


@dataclass(frozen=True)
class VassTransition:
    tid: str
    source: str
    target: str
    label: str
    guard: tuple[int, ...]
    delta: tuple[int, ...]
    resets: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "guard", tuple(self.guard))
        object.__setattr__(self, "delta", tuple(self.delta))
        object.__setattr__(self, "resets", frozenset(self.resets))


@dataclass(frozen=True)
class VassModel:
    """Vector addition system with states, optionally with resets.

    Guards are lower bounds on the counters.  Firing applies the delta
    and then zeroes the reset coordinates.  Guards are normalized at
    construction so a non-reset coordinate can never go negative.
    """

    dimension: int
    states: tuple[str, ...]
    transitions: tuple[VassTransition, ...]
    init: Configuration
    name: str = "vass"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if self.dimension < 1:
            raise UsageError("dimension must be at least 1")
        if not self.states or len(set(self.states)) != len(self.states):
            raise UsageError("states must be nonempty and distinct")
        _check_vector_config(self.init, self.states, self.dimension, "initial configuration")
        seen = set()
        normalized = []
        for t in self.transitions:
            if t.tid in seen:
                raise UsageError(f"duplicate transition id {t.tid!r}")
            seen.add(t.tid)
            if t.source not in self.states or t.target not in self.states:
                raise UsageError(f"transition {t.tid}: unknown state")
            if len(t.guard) != self.dimension or len(t.delta) != self.dimension:
                raise UsageError(f"transition {t.tid}: guard and delta must have {self.dimension} entries")
            if any(g < 0 for g in t.guard):
                raise UsageError(f"transition {t.tid}: guards must be nonnegative")
            if any(i < 0 or i >= self.dimension for i in t.resets):
                raise UsageError(f"transition {t.tid}: reset coordinate out of range")
            guard = tuple(
                g if i in t.resets else max(g, -d)
                for i, (g, d) in enumerate(zip(t.guard, t.delta))
            )
            normalized.append(t if guard == t.guard else replace(t, guard=guard))
        object.__setattr__(self, "transitions", tuple(normalized))

    @property
    def kind(self) -> str:
        return "vass"

    @property
    def order(self):
        return VECTOR_ORDER

    @property
    def has_resets(self) -> bool:
        return any(t.resets for t in self.transitions)

    def transition(self, tid: str) -> VassTransition:
        for t in self.transitions:
            if t.tid == tid:
                return t
        raise UsageError(f"unknown transition id {tid!r}")

    def successors(self, c: Configuration):
        """All one-step successors of c, in transition declaration order."""
        _check_vector_config(c, self.states, self.dimension, "configuration")
        out = []
        for t in self.transitions:
            if t.source != c.state:
                continue
            if any(v < g for v, g in zip(c.payload, t.guard)):
                continue
            vec = tuple(
                0 if i in t.resets else v + d
                for i, (v, d) in enumerate(zip(c.payload, t.delta))
            )
            out.append((t.tid, Configuration(t.target, vec)))
        return out

    def pre_elements(self, target: Configuration):
        """Per-transition minimal predecessors of the upward closure of target.

        A transition with a reset on a coordinate the target needs positive
        contributes nothing; otherwise its minimal pre-image is unique.
        """
        _check_vector_config(target, self.states, self.dimension, "target")
        out = []
        for t in self.transitions:
            if t.target != target.state:
                continue
            if any(target.payload[i] > 0 for i in t.resets):
                continue
            vec = tuple(
                t.guard[i] if i in t.resets else max(t.guard[i], target.payload[i] - t.delta[i])
                for i in range(self.dimension)
            )
            out.append((t.tid, Configuration(t.source, vec)))
        return out

    def pre_basis(self, target: Configuration) -> MinBasis:
        return minimize([c for _, c in self.pre_elements(target)], VECTOR_ORDER)


@dataclass(frozen=True)
class CounterInstruction:
    iid: str
    source: str
    target: str
    op: str       # inc | dec | zero
    counter: int  # zero-based coordinate


@dataclass(frozen=True)
class CounterMachine:
    """Minsky-style machine: increments, guarded decrements, zero tests.

    Zero tests make the step relation non-monotone, so this class offers
    no backward interface; it exists as input to the abstractions.
    """

    dimension: int
    states: tuple[str, ...]
    instructions: tuple[CounterInstruction, ...]
    init: Configuration
    name: str = "counter"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self.dimension < 1:
            raise UsageError("dimension must be at least 1")
        if not self.states or len(set(self.states)) != len(self.states):
            raise UsageError("states must be nonempty and distinct")
        _check_vector_config(self.init, self.states, self.dimension, "initial configuration")
        seen = set()
        for ins in self.instructions:
            if ins.iid in seen:
                raise UsageError(f"duplicate instruction id {ins.iid!r}")
            seen.add(ins.iid)
            if ins.source not in self.states or ins.target not in self.states:
                raise UsageError(f"instruction {ins.iid}: unknown state")
            if ins.op not in ("inc", "dec", "zero"):
                raise UsageError(f"instruction {ins.iid}: unknown operation {ins.op!r}")
            if ins.counter < 0 or ins.counter >= self.dimension:
                raise UsageError(f"instruction {ins.iid}: counter out of range")

    @property
    def kind(self) -> str:
        return "counter"

    @property
    def order(self):
        return VECTOR_ORDER

    @property
    def has_zero_tests(self) -> bool:
        return any(ins.op == "zero" for ins in self.instructions)

    def successors(self, c: Configuration):
        _check_vector_config(c, self.states, self.dimension, "configuration")
        out = []
        for ins in self.instructions:
            if ins.source != c.state:
                continue
            v = c.payload[ins.counter]
            if ins.op == "inc":
                nv = v + 1
            elif ins.op == "dec":
                if v < 1:
                    continue
                nv = v - 1
            else:
                if v != 0:
                    continue
                nv = v
            vec = tuple(
                nv if i == ins.counter else w for i, w in enumerate(c.payload)
            )
            out.append((ins.iid, Configuration(ins.target, vec)))
        return out


@dataclass(frozen=True)
class LcsTransition:
    tid: str
    source: str
    target: str
    action: str               # send | recv | internal
    channel: int | None = None
    letter: str | None = None


def _subwords(word: str):
    seen = []
    known = set()
    n = len(word)
    for mask in range((1 << n) - 1, -1, -1):
        w = "".join(word[i] for i in range(n) if mask >> (n - 1 - i) & 1)
        if w not in known:
            known.add(w)
            seen.append(w)
    return seen


def _check_channel_config(c: Configuration, states, channels, alphabets, who: str):
    if c.state not in states:
        raise UsageError(f"{who}: unknown state {c.state!r}")
    if len(c.payload) != len(channels):
        raise UsageError(f"{who}: expected one word per channel")
    for word, letters in zip(c.payload, alphabets):
        if not isinstance(word, str):
            raise UsageError(f"{who}: channel contents must be strings")
        for a in word:
            if a not in letters:
                raise UsageError(f"{who}: letter {a!r} outside the channel alphabet")


@dataclass(frozen=True)
class LossyChannelMachine:
    """Fifo automaton over named channels, perfect or lossy.

    Under lossy semantics any channel content may be replaced by a
    subword of itself before a step fires; that is the semantics under
    which the machine is well structured.
    """

    channels: tuple[str, ...]
    alphabets: tuple[tuple[str, ...], ...]
    states: tuple[str, ...]
    transitions: tuple[LcsTransition, ...]
    init: Configuration
    semantics: str = "lossy"
    name: str = "lcs"

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "alphabets", tuple(tuple(a) for a in self.alphabets))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if not self.channels or len(set(self.channels)) != len(self.channels):
            raise UsageError("channels must be nonempty and distinct")
        if len(self.alphabets) != len(self.channels):
            raise UsageError("one alphabet per channel required")
        if self.semantics not in ("perfect", "lossy"):
            raise UsageError(f"unknown semantics {self.semantics!r}")
        if not self.states or len(set(self.states)) != len(self.states):
            raise UsageError("states must be nonempty and distinct")
        _check_channel_config(self.init, self.states, self.channels, self.alphabets, "initial configuration")
        seen = set()
        for t in self.transitions:
            if t.tid in seen:
                raise UsageError(f"duplicate transition id {t.tid!r}")
            seen.add(t.tid)
            if t.source not in self.states or t.target not in self.states:
                raise UsageError(f"transition {t.tid}: unknown state")
            if t.action == "internal":
                if t.channel is not None or t.letter is not None:
                    raise UsageError(f"transition {t.tid}: internal actions take no channel")
                continue
            if t.action not in ("send", "recv"):
                raise UsageError(f"transition {t.tid}: unknown action {t.action!r}")
            if t.channel is None or t.channel < 0 or t.channel >= len(self.channels):
                raise UsageError(f"transition {t.tid}: channel out of range")
            if t.letter not in self.alphabets[t.channel]:
                raise UsageError(f"transition {t.tid}: letter {t.letter!r} outside the channel alphabet")

    @property
    def kind(self) -> str:
        return "lcs"

    @property
    def order(self):
        return CHANNEL_ORDER

    def transition(self, tid: str) -> LcsTransition:
        for t in self.transitions:
            if t.tid == tid:
                return t
        raise UsageError(f"unknown transition id {tid!r}")

    def perfect_successors(self, c: Configuration):
        _check_channel_config(c, self.states, self.channels, self.alphabets, "configuration")
        out = []
        for t in self.transitions:
            if t.source != c.state:
                continue
            if t.action == "internal":
                out.append((t.tid, Configuration(t.target, c.payload)))
                continue
            word = c.payload[t.channel]
            if t.action == "send":
                new = word + t.letter
            else:
                if not word.startswith(t.letter):
                    continue
                new = word[1:]
            payload = tuple(
                new if i == t.channel else w for i, w in enumerate(c.payload)
            )
            out.append((t.tid, Configuration(t.target, payload)))
        return out

    def successors(self, c: Configuration):
        """One-step successors; under lossy semantics, losses precede the step."""
        if self.semantics == "perfect":
            return self.perfect_successors(c)
        combos = 1
        for w in c.payload:
            combos <<= len(w)
        if combos > LOSSY_ENUM_CAP:
            raise BudgetExceededError(
                f"lossy successor enumeration needs {combos} subword combinations"
            )
        out = []
        emitted = set()
        for sub in itertools.product(*(_subwords(w) for w in c.payload)):
            for item in self.perfect_successors(Configuration(c.state, tuple(sub))):
                if item not in emitted:
                    emitted.add(item)
                    out.append(item)
        return out

    def pre_elements(self, target: Configuration):
        """Per-transition minimal lossy predecessors of the upward closure."""
        if self.semantics != "lossy":
            raise UnsupportedAnalysisError("backward analysis requires lossy semantics")
        _check_channel_config(target, self.states, self.channels, self.alphabets, "target")
        out = []
        for t in self.transitions:
            if t.target != target.state:
                continue
            if t.action == "internal":
                out.append((t.tid, Configuration(t.source, target.payload)))
                continue
            word = target.payload[t.channel]
            if t.action == "send":
                new = word[:-1] if word.endswith(t.letter) else word
            else:
                new = t.letter + word
            payload = tuple(
                new if i == t.channel else w for i, w in enumerate(target.payload)
            )
            out.append((t.tid, Configuration(t.source, payload)))
        return out

    def pre_basis(self, target: Configuration) -> MinBasis:
        return minimize([c for _, c in self.pre_elements(target)], CHANNEL_ORDER)


@dataclass(frozen=True)
class PcmTransition:
    tid: str
    source: str
    target: str
    label: str
    step: Formula


def step_variables(dimension: int):
    """Canonical step-relation variable names: x1..xd and x1'..xd'."""
    xs = tuple(f"x{i + 1}" for i in range(dimension))
    return xs, tuple(x + "'" for x in xs)


@dataclass(frozen=True)
class PcmModel:
    """Machine whose step relations are arbitrary Presburger formulas.

    Step formulas range over x1..xd (before) and x1'..xd' (after).
    Reachability questions are undecidable here; the class exists for
    the monotonicity checker and the ordering search.
    """

    dimension: int
    states: tuple[str, ...]
    transitions: tuple[PcmTransition, ...]
    init: Configuration
    name: str = "pcm"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if self.dimension < 1:
            raise UsageError("dimension must be at least 1")
        if not self.states or len(set(self.states)) != len(self.states):
            raise UsageError("states must be nonempty and distinct")
        _check_vector_config(self.init, self.states, self.dimension, "initial configuration")
        xs, xps = step_variables(self.dimension)
        allowed = set(xs) | set(xps)
        seen = set()
        for t in self.transitions:
            if t.tid in seen:
                raise UsageError(f"duplicate transition id {t.tid!r}")
            seen.add(t.tid)
            if t.source not in self.states or t.target not in self.states:
                raise UsageError(f"transition {t.tid}: unknown state")
            stray = sorted(free_vars(t.step) - allowed)
            if stray:
                raise UsageError(
                    f"transition {t.tid}: step formula uses foreign variables {', '.join(stray)}"
                )

    @property
    def kind(self) -> str:
        return "pcm"

    @property
    def order(self):
        return VECTOR_ORDER

    def step_formula(self, tid: str) -> Formula:
        for t in self.transitions:
            if t.tid == tid:
                return t.step
        raise UsageError(f"unknown transition id {tid!r}")


def vass_to_pcm(m: VassModel) -> PcmModel:
    """Encode each VASS step as a conjunction of guard and update atoms."""
    trs = []
    for t in m.transitions:
        parts = []
        for i in range(m.dimension):
            x = var(f"x{i + 1}")
            xp = var(f"x{i + 1}'")
            if t.guard[i] > 0:
                parts.append(ge(x, num(t.guard[i])))
            if i in t.resets:
                parts.append(eq(xp, num(0)))
            else:
                parts.append(eq(xp, x.add_const(t.delta[i])))
        trs.append(PcmTransition(t.tid, t.source, t.target, t.label, conj(parts)))
    return PcmModel(m.dimension, m.states, tuple(trs), m.init, name=m.name)


def counter_machine_to_pcm(m: CounterMachine) -> PcmModel:
    trs = []
    for ins in m.instructions:
        parts = []
        for j in range(m.dimension):
            x = var(f"x{j + 1}")
            xp = var(f"x{j + 1}'")
            if j != ins.counter:
                parts.append(eq(xp, x))
            elif ins.op == "inc":
                parts.append(eq(xp, x.add_const(1)))
            elif ins.op == "dec":
                parts.append(ge(x, num(1)))
                parts.append(eq(xp, x.add_const(-1)))
            else:
                parts.append(eq(x, num(0)))
                parts.append(eq(xp, x))
        trs.append(PcmTransition(ins.iid, ins.source, ins.target, ins.iid, conj(parts)))
    return PcmModel(m.dimension, m.states, tuple(trs), m.init, name=m.name)
