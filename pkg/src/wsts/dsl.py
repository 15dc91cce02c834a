"""Line-oriented model files and target strings.

One model per file.  `#` starts a comment, blank lines are ignored, and
the first directive names the model class.  Counters in the surface
syntax are numbered from 1; the in-memory models are 0-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .models import (
    CounterInstruction,
    CounterMachine,
    LcsTransition,
    LossyChannelMachine,
    PcmModel,
    PcmTransition,
    VassModel,
    VassTransition,
)
from .orders import Configuration
from .presburger import format_formula, free_vars, parse_formula


@dataclass(frozen=True)
class ParsedModel:
    model: object
    diagnostics: tuple


_MODEL = re.compile(r"^model\s+(vass|counter|lcs|pcm)$")
_VEC = re.compile(r"^\(\s*[+-]?\d+(?:\s*,\s*[+-]?\d+)*\s*\)$")
_NAME = r"[A-Za-z_][\w.'-]*"
_EDGE = rf"({_NAME})\s*:\s*({_NAME})\s*->\s*({_NAME})"
_TRANS_VASS = re.compile(
    rf"^trans\s+{_EDGE}\s+label\s+(\S+)\s+guard\s*(\([^()]*\))\s+delta\s*(\([^()]*\))"
    rf"(?:\s+reset\s*(\([^()]*\)))?$"
)
_TRANS_PCM = re.compile(rf"^trans\s+{_EDGE}\s+label\s+(\S+)\s+when\s+(.+)$")
_TRANS_LCS = re.compile(rf"^trans\s+{_EDGE}\s+(send|recv|internal)(?:\s+(\S+)\s+(\S+))?$")
_INST = re.compile(rf"^inst\s+{_EDGE}\s+(inc|dec|zero)\s+([+-]?\d+)$")


def _vector(text: str, line: int, what: str, allow_negative: bool) -> tuple:
    body = text.strip()
    if not _VEC.match(body):
        raise ParseError(f"malformed {what} vector {text!r}", line)
    values = []
    for entry in body[1:-1].split(","):
        entry = entry.strip()
        if entry.startswith("-") and not allow_negative:
            raise ParseError(f"{what} entries must be nonnegative, got {entry}", line)
        values.append(int(entry))
    return tuple(values)


def _meaningful_lines(text: str):
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((lineno, body))
    return out


def parse_model(text: str) -> ParsedModel:
    """Parse a model file; diagnostics carry notes such as guard lifting."""
    lines = _meaningful_lines(text)
    if not lines:
        raise ParseError("empty model file")
    lineno, head = lines[0]
    m = _MODEL.match(head)
    if m is None:
        raise ParseError("first directive must be 'model vass|counter|lcs|pcm'", lineno)
    kind = m.group(1)
    if kind == "lcs":
        return _parse_lcs(lines[1:])
    return _parse_vector_model(kind, lines[1:])


class _Collector:
    """Shared directive bookkeeping with line-tagged errors."""

    def __init__(self):
        self.states = None
        self.init = None
        self.diagnostics = []

    def set_states(self, names, line):
        if self.states is not None:
            raise ParseError("duplicate states directive", line)
        if len(set(names)) != len(names):
            raise ParseError("state names must be distinct", line)
        self.states = tuple(names)

    def need_states(self, line):
        if self.states is None:
            raise ParseError("states must be declared first", line)

    def check_state(self, name, line):
        self.need_states(line)
        if name not in self.states:
            raise ParseError(f"unknown state {name!r}", line)


def _parse_vector_model(kind: str, lines) -> ParsedModel:
    col = _Collector()
    counters = None
    transitions = []
    ids = set()

    def need_counters(line):
        if counters is None:
            raise ParseError("counters must be declared first", line)

    for lineno, body in lines:
        word = body.split()[0]
        if word == "counters":
            if counters is not None:
                raise ParseError("duplicate counters directive", lineno)
            m = re.match(r"^counters\s+(\d+)$", body)
            if m is None or int(m.group(1)) < 1:
                raise ParseError("counters takes one positive integer", lineno)
            counters = int(m.group(1))
        elif word == "states":
            col.set_states(body.split()[1:], lineno)
        elif word == "init":
            if col.init is not None:
                raise ParseError("duplicate init directive", lineno)
            m = re.match(rf"^init\s+({_NAME})\s*(\(.*\))$", body)
            if m is None:
                raise ParseError("init takes a state and a counter vector", lineno)
            need_counters(lineno)
            col.check_state(m.group(1), lineno)
            vec = _vector(m.group(2), lineno, "init", allow_negative=False)
            if len(vec) != counters:
                raise ParseError(f"init vector needs {counters} entries", lineno)
            col.init = Configuration(m.group(1), vec)
        elif word == "trans" and kind in ("vass", "pcm"):
            need_counters(lineno)
            transitions.append(_parse_trans(kind, body, lineno, col, counters, ids))
        elif word == "inst" and kind == "counter":
            need_counters(lineno)
            transitions.append(_parse_inst(body, lineno, col, counters, ids))
        else:
            raise ParseError(f"unknown directive {word!r} for a {kind} model", lineno)

    if counters is None:
        raise ParseError("missing counters directive")
    if col.states is None:
        raise ParseError("missing states directive")
    if col.init is None:
        raise ParseError("missing init directive")

    if kind == "vass":
        model = VassModel(counters, col.states, tuple(t for t, _ in transitions), col.init)
        for t, lineno in transitions:
            lifted = model.transition(t.tid).guard
            if lifted != t.guard:
                col.diagnostics.append(
                    f"line {lineno}: guard on {t.tid} raised to {lifted} so firing keeps counters nonnegative"
                )
    elif kind == "counter":
        model = CounterMachine(counters, col.states, tuple(t for t, _ in transitions), col.init)
    else:
        model = PcmModel(counters, col.states, tuple(t for t, _ in transitions), col.init)
    return ParsedModel(model, tuple(col.diagnostics))


def _parse_trans(kind, body, lineno, col, counters, ids):
    rx = _TRANS_VASS if kind == "vass" else _TRANS_PCM
    m = rx.match(body)
    if m is None:
        raise ParseError("malformed trans directive", lineno)
    tid, src, tgt = m.group(1), m.group(2), m.group(3)
    if tid in ids:
        raise ParseError(f"duplicate transition id {tid!r}", lineno)
    ids.add(tid)
    col.check_state(src, lineno)
    col.check_state(tgt, lineno)
    label = m.group(4)
    if kind == "vass":
        guard = _vector(m.group(5), lineno, "guard", allow_negative=False)
        delta = _vector(m.group(6), lineno, "delta", allow_negative=True)
        if len(guard) != counters or len(delta) != counters:
            raise ParseError(f"guard and delta need {counters} entries", lineno)
        resets = frozenset()
        if m.group(7) is not None:
            coords = _vector(m.group(7), lineno, "reset", allow_negative=False)
            for c in coords:
                if not 1 <= c <= counters:
                    raise ParseError(f"reset coordinate {c} out of range", lineno)
            resets = frozenset(c - 1 for c in coords)
        return VassTransition(tid, src, tgt, label, guard, delta, resets), lineno
    try:
        step = parse_formula(m.group(5))
    except ParseError as e:
        raise ParseError(f"in when-clause: {e}", lineno) from e
    allowed = {f"x{i + 1}" for i in range(counters)} | {f"x{i + 1}'" for i in range(counters)}
    extra = free_vars(step) - allowed
    if extra:
        raise ParseError(f"when-clause uses unknown variables {sorted(extra)}", lineno)
    return PcmTransition(tid, src, tgt, label, step), lineno


def _parse_inst(body, lineno, col, counters, ids):
    m = _INST.match(body)
    if m is None:
        raise ParseError("malformed inst directive", lineno)
    iid, src, tgt, op, num = m.groups()
    if iid in ids:
        raise ParseError(f"duplicate instruction id {iid!r}", lineno)
    ids.add(iid)
    col.check_state(src, lineno)
    col.check_state(tgt, lineno)
    k = int(num)
    if not 1 <= k <= counters:
        raise ParseError(f"counters are numbered 1..{counters}, got {num}", lineno)
    return CounterInstruction(iid, src, tgt, op, k - 1), lineno


def _parse_lcs(lines) -> ParsedModel:
    col = _Collector()
    channels = None
    alphabet = None
    semantics = None
    transitions = []
    ids = set()
    for lineno, body in lines:
        word = body.split()[0]
        if word == "channels":
            if channels is not None:
                raise ParseError("duplicate channels directive", lineno)
            channels = tuple(body.split()[1:])
            if not channels or len(set(channels)) != len(channels):
                raise ParseError("channels must be nonempty and distinct", lineno)
        elif word == "alphabet":
            if alphabet is not None:
                raise ParseError("duplicate alphabet directive", lineno)
            letters = body.split()[1:]
            if not letters or any(len(a) != 1 for a in letters):
                raise ParseError("alphabet takes single-character letters", lineno)
            if len(set(letters)) != len(letters):
                raise ParseError("alphabet letters must be distinct", lineno)
            alphabet = tuple(letters)
        elif word == "semantics":
            m = re.match(r"^semantics\s+(lossy|perfect)$", body)
            if m is None:
                raise ParseError("semantics is 'lossy' or 'perfect'", lineno)
            semantics = m.group(1)
        elif word == "states":
            col.set_states(body.split()[1:], lineno)
        elif word == "init":
            if col.init is not None:
                raise ParseError("duplicate init directive", lineno)
            m = re.match(rf"^init\s+({_NAME})$", body)
            if m is None:
                raise ParseError("lcs channels start empty; init takes only a state", lineno)
            if channels is None:
                raise ParseError("channels must be declared first", lineno)
            col.check_state(m.group(1), lineno)
            col.init = Configuration(m.group(1), ("",) * len(channels))
        elif word == "trans":
            m = _TRANS_LCS.match(body)
            if m is None:
                raise ParseError("malformed trans directive", lineno)
            tid, src, tgt, action, chan, letter = m.groups()
            if tid in ids:
                raise ParseError(f"duplicate transition id {tid!r}", lineno)
            ids.add(tid)
            col.check_state(src, lineno)
            col.check_state(tgt, lineno)
            if action == "internal":
                if chan is not None:
                    raise ParseError("internal actions name no channel", lineno)
                transitions.append(LcsTransition(tid, src, tgt, "internal", None, None))
                continue
            if chan is None or letter is None:
                raise ParseError(f"{action} takes a channel and a letter", lineno)
            if channels is None or chan not in channels:
                raise ParseError(f"unknown channel {chan!r}", lineno)
            if alphabet is None or letter not in alphabet:
                raise ParseError(f"letter {letter!r} outside the alphabet", lineno)
            transitions.append(
                LcsTransition(tid, src, tgt, action, channels.index(chan), letter)
            )
        else:
            raise ParseError(f"unknown directive {word!r} for a lcs model", lineno)

    if channels is None:
        raise ParseError("missing channels directive")
    if alphabet is None:
        raise ParseError("missing alphabet directive")
    if col.states is None:
        raise ParseError("missing states directive")
    if col.init is None:
        raise ParseError("missing init directive")
    if semantics is None:
        semantics = "lossy"
        col.diagnostics.append("semantics defaulted to lossy")
    model = LossyChannelMachine(
        channels,
        tuple(alphabet for _ in channels),
        col.states,
        tuple(transitions),
        col.init,
        semantics,
    )
    return ParsedModel(model, tuple(col.diagnostics))


def _fmt_vec(values) -> str:
    return "(" + ",".join(str(v) for v in values) + ")"


def model_to_dsl(model) -> str:
    """Deterministic surface text for a model.

    The surface syntax shares one alphabet across channels, so a machine
    with differing per-channel alphabets is emitted with their union.
    """
    lines = [f"model {model.kind}"]
    if model.kind == "lcs":
        lines.append("channels " + " ".join(model.channels))
        first = model.alphabets[0]
        if all(set(a) == set(first) for a in model.alphabets):
            letters = first
        else:
            letters = tuple(sorted(set().union(*(set(a) for a in model.alphabets))))
        lines.append("alphabet " + " ".join(letters))
        lines.append(f"semantics {model.semantics}")
        lines.append("states " + " ".join(model.states))
        lines.append(f"init {model.init.state}")
        for t in model.transitions:
            edge = f"trans {t.tid}: {t.source} -> {t.target}"
            if t.action == "internal":
                lines.append(f"{edge} internal")
            else:
                lines.append(f"{edge} {t.action} {model.channels[t.channel]} {t.letter}")
        return "\n".join(lines) + "\n"

    lines.append(f"counters {model.dimension}")
    lines.append("states " + " ".join(model.states))
    lines.append(f"init {model.init.state} {_fmt_vec(model.init.payload)}")
    if model.kind == "vass":
        for t in model.transitions:
            line = (
                f"trans {t.tid}: {t.source} -> {t.target} label {t.label} "
                f"guard {_fmt_vec(t.guard)} delta {_fmt_vec(t.delta)}"
            )
            if t.resets:
                line += f" reset {_fmt_vec(sorted(c + 1 for c in t.resets))}"
            lines.append(line)
    elif model.kind == "counter":
        for i in model.instructions:
            lines.append(
                f"inst {i.iid}: {i.source} -> {i.target} {i.op} {i.counter + 1}"
            )
    else:
        for t in model.transitions:
            lines.append(
                f"trans {t.tid}: {t.source} -> {t.target} label {t.label} "
                f"when {format_formula(t.step)}"
            )
    return "\n".join(lines) + "\n"


def parse_target(model, text: str) -> Configuration:
    """A target configuration: state plus counter vector or channel words."""
    text = text.strip()
    if model.kind == "lcs":
        parts = text.split()
        if len(parts) != 1 + len(model.channels):
            raise ParseError(
                f"target needs a state and {len(model.channels)} channel words"
            )
        state = parts[0]
        if state not in model.states:
            raise ParseError(f"unknown state {state!r}")
        words = []
        for i, token in enumerate(parts[1:]):
            word = "" if token == "-" else token.replace(".", "")
            for letter in word:
                if letter not in model.alphabets[i]:
                    raise ParseError(f"letter {letter!r} outside channel alphabet")
            words.append(word)
        return Configuration(state, tuple(words))
    m = re.match(rf"^({_NAME})\s*(\(.*\))$", text)
    if m is None:
        raise ParseError("target needs a state and a counter vector")
    state = m.group(1)
    if state not in model.states:
        raise ParseError(f"unknown state {state!r}")
    vec = _vector(m.group(2), None, "target", allow_negative=False)
    if len(vec) != model.dimension:
        raise ParseError(f"target vector needs {model.dimension} entries")
    return Configuration(state, vec)
