"""Quasi-orderings and finite bases of upward-closed sets.

Every analysis in this package manipulates states through one of a small
family of orderings: componentwise ordering on counter vectors (with or
without the top value omega), the subword ordering on channel words, and
their products with equality on control states.  Upward-closed sets of
states are represented canonically by the finite antichain of their
minimal elements (:class:`MinBasis`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

from .errors import UsageError


class _Omega:
    """Top value of the extended naturals; compares above every int."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "ω"


OMEGA = _Omega()


def is_omega(value: Any) -> bool:
    return value is OMEGA or isinstance(value, _Omega)


def omega_add(value, k: int):
    """Saturating addition: omega absorbs any finite offset."""
    if is_omega(value):
        return OMEGA
    return value + k


def omega_leq(a, b) -> bool:
    if is_omega(b):
        return True
    if is_omega(a):
        return False
    return a <= b


def leq_dickson(x: Sequence[int], y: Sequence[int]) -> bool:
    """Componentwise ordering on counter vectors of equal dimension."""
    if len(x) != len(y):
        raise UsageError(f"dimension mismatch: {len(x)} vs {len(y)}")
    return all(a <= b for a, b in zip(x, y))


def leq_omega(x: Sequence, y: Sequence) -> bool:
    """Componentwise ordering on vectors over the naturals extended with omega."""
    if len(x) != len(y):
        raise UsageError(f"dimension mismatch: {len(x)} vs {len(y)}")
    return all(omega_leq(a, b) for a, b in zip(x, y))


def leq_subword(u: Sequence, v: Sequence) -> bool:
    """True iff u is obtained from v by deleting letters (scattered subword).

    Single greedy left-to-right scan, linear in len(v).
    """
    it = iter(v)
    return all(letter in it for letter in u)


def leq_prefix(u: Sequence, v: Sequence) -> bool:
    """True iff u is an initial segment of v.

    Not a well ordering on words and not monotone for fifo machines; kept so
    the tests can demonstrate both failures concretely.
    """
    return len(u) <= len(v) and tuple(v[: len(u)]) == tuple(u)


@dataclass(frozen=True)
class Configuration:
    """A control state paired with a data payload.

    The payload is a tuple of ints for counter models, a tuple of
    ints-or-OMEGA for Karp-Miller markings, or a tuple of words (each word a
    tuple of letters) for channel machines.
    """

    state: str
    payload: tuple

    def __repr__(self) -> str:
        return f"({self.state}, {format_payload(self.payload)})"


def format_payload(payload: tuple) -> str:
    if payload and isinstance(payload[0], tuple):
        words = [".".join(w) if w else "-" for w in payload]
        return "(" + ",".join(words) + ")"
    return "(" + ",".join(str(v) for v in payload) + ")"


def product_leq(c1: Configuration, c2: Configuration, payload_leq: Callable) -> bool:
    """Product of equality on control states with an ordering on payloads."""
    return c1.state == c2.state and payload_leq(c1.payload, c2.payload)


def _leq_word_tuple(x: tuple, y: tuple) -> bool:
    if len(x) != len(y):
        raise UsageError(f"channel count mismatch: {len(x)} vs {len(y)}")
    return all(leq_subword(u, v) for u, v in zip(x, y))


def _omega_entry_key(value):
    return (1, 0) if is_omega(value) else (0, value)


def _vector_key(c: Configuration):
    return (c.state, c.payload)


def _omega_key(c: Configuration):
    return (c.state, tuple(_omega_entry_key(v) for v in c.payload))


def _words_key(c: Configuration):
    return (c.state, c.payload)


@dataclass(frozen=True)
class Order:
    """An ordering bundled with a total sort key for canonical output.

    ``leq`` compares two elements; ``key`` embeds elements into a fixed total
    order so bases serialize byte-for-byte identically across runs.
    """

    name: str
    leq: Callable[[Any, Any], bool]
    key: Callable[[Any], tuple]


VECTOR_ORDER = Order(
    name="dickson-product",
    leq=lambda a, b: product_leq(a, b, leq_dickson),
    key=_vector_key,
)

MARKING_ORDER = Order(
    name="omega-dickson-product",
    leq=lambda a, b: product_leq(a, b, leq_omega),
    key=_omega_key,
)

CHANNEL_ORDER = Order(
    name="subword-product",
    leq=lambda a, b: product_leq(a, b, _leq_word_tuple),
    key=_words_key,
)

PREFIX_ORDER = Order(
    name="prefix-product",
    leq=lambda a, b: product_leq(a, b, lambda x, y: all(leq_prefix(u, v) for u, v in zip(x, y))),
    key=_words_key,
)


@dataclass(frozen=True)
class MinBasis:
    """Finite antichain of minimal elements denoting its upward closure.

    The empty basis denotes the empty upward-closed set.  Elements are kept
    sorted by the order's canonical key.
    """

    elements: tuple
    order: Order

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def contains(self, x) -> bool:
        """True iff x lies in the denoted upward-closed set."""
        return any(self.order.leq(b, x) for b in self.elements)

    def includes(self, other: "MinBasis") -> bool:
        """True iff the upward closure of ``other`` is a subset of this one."""
        if self.order.name != other.order.name:
            raise UsageError("bases compared under different orderings")
        return all(self.contains(x) for x in other.elements)

    def union(self, other: "MinBasis") -> "MinBasis":
        if self.order.name != other.order.name:
            raise UsageError("bases joined under different orderings")
        return minimize(self.elements + other.elements, self.order)


def minimize(candidates: Iterable, order: Order) -> MinBasis:
    """Canonical antichain of minimal elements of a finite candidate set.

    Equal candidates collapse to one representative; dominated candidates are
    dropped.  The upward closure of the result equals that of the input.
    """
    unique = {}
    for c in candidates:
        unique.setdefault(order.key(c), c)
    items = [unique[k] for k in sorted(unique)]
    kept = []
    for i, x in enumerate(items):
        dominated = False
        for j, y in enumerate(items):
            if i != j and order.leq(y, x):
                # ties were removed above, so y is strictly below x
                dominated = True
                break
        if dominated:
            continue
        kept.append(x)
    return MinBasis(tuple(kept), order)


def maximal_elements(candidates: Iterable, order: Order) -> tuple:
    """Canonical antichain of maximal elements of a finite candidate set."""
    unique = {}
    for c in candidates:
        unique.setdefault(order.key(c), c)
    items = [unique[k] for k in sorted(unique)]
    kept = []
    for i, x in enumerate(items):
        if any(i != j and order.leq(x, y) for j, y in enumerate(items)):
            continue
        kept.append(x)
    return tuple(kept)
