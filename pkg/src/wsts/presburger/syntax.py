"""Terms and formulas of linear integer arithmetic.

Terms are kept in a canonical linear form (sorted variables, no zero
coefficients).  Atoms are normalized against zero: ``Le(t)`` means t <= 0,
``Eq(t)`` means t = 0, ``Dvd(k, t)`` means k divides t.  The usual surface
relations (t1 <= t2, t1 < t2, =, !=) are provided as constructors that
desugar into these three atom shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from ..errors import UsageError


@dataclass(frozen=True)
class Term:
    coeffs: tuple  # ((var, coeff), ...) sorted by var, coeff != 0
    const: int = 0

    @staticmethod
    def make(mapping: Mapping[str, int], const: int = 0) -> "Term":
        items = tuple(sorted((v, c) for v, c in mapping.items() if c != 0))
        return Term(items, const)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    @property
    def vars(self) -> frozenset:
        return frozenset(v for v, _ in self.coeffs)

    def coeff(self, name: str) -> int:
        for v, c in self.coeffs:
            if v == name:
                return c
        return 0

    def add(self, other: "Term") -> "Term":
        d = self.as_dict()
        for v, c in other.coeffs:
            d[v] = d.get(v, 0) + c
        return Term.make(d, self.const + other.const)

    def neg(self) -> "Term":
        return Term(tuple((v, -c) for v, c in self.coeffs), -self.const)

    def sub(self, other: "Term") -> "Term":
        return self.add(other.neg())

    def scale(self, k: int) -> "Term":
        if k == 0:
            return Term((), 0)
        return Term(tuple((v, c * k) for v, c in self.coeffs), self.const * k)

    def add_const(self, k: int) -> "Term":
        return Term(self.coeffs, self.const + k)

    def without(self, name: str) -> "Term":
        return Term(tuple((v, c) for v, c in self.coeffs if v != name), self.const)

    def subst(self, name: str, t: "Term") -> "Term":
        c = self.coeff(name)
        if c == 0:
            return self
        return self.without(name).add(t.scale(c))

    def rename(self, mapping: Mapping[str, str]) -> "Term":
        d: dict = {}
        for v, c in self.coeffs:
            w = mapping.get(v, v)
            d[w] = d.get(w, 0) + c
        return Term.make(d, self.const)

    def evaluate(self, env: Mapping[str, int]) -> int:
        total = self.const
        for v, c in self.coeffs:
            if v not in env:
                raise UsageError(f"no value for variable {v!r}")
            total += c * env[v]
        return total


def var(name: str) -> Term:
    return Term(((name, 1),), 0)


def num(k: int) -> Term:
    return Term((), k)


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True)
class Le(Formula):
    term: Term  # term <= 0


@dataclass(frozen=True)
class Eq(Formula):
    term: Term  # term = 0


@dataclass(frozen=True)
class Dvd(Formula):
    k: int
    term: Term  # k | term


@dataclass(frozen=True)
class NotDvd(Formula):
    k: int
    term: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


def le(t1: Term, t2: Term) -> Formula:
    return Le(t1.sub(t2))


def lt(t1: Term, t2: Term) -> Formula:
    return Le(t1.sub(t2).add_const(1))


def ge(t1: Term, t2: Term) -> Formula:
    return le(t2, t1)


def gt(t1: Term, t2: Term) -> Formula:
    return lt(t2, t1)


def eq(t1: Term, t2: Term) -> Formula:
    return Eq(t1.sub(t2))


def ne(t1: Term, t2: Term) -> Formula:
    return Not(eq(t1, t2))


def dvd(k: int, t: Term) -> Formula:
    if k == 0:
        raise UsageError("divisibility modulus must be nonzero")
    return Dvd(abs(k), t)


def neg(f: Formula) -> Formula:
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, Not):
        return f.body
    return Not(f)


def conj(args: Iterable[Formula]) -> Formula:
    out = []
    for a in args:
        if isinstance(a, FalseF):
            return FALSE
        if isinstance(a, TrueF):
            continue
        if isinstance(a, And):
            out.extend(a.args)
        else:
            out.append(a)
    seen, uniq = set(), []
    for a in out:
        if a not in seen:
            seen.add(a)
            uniq.append(a)
    if not uniq:
        return TRUE
    if len(uniq) == 1:
        return uniq[0]
    return And(tuple(uniq))


def disj(args: Iterable[Formula]) -> Formula:
    out = []
    for a in args:
        if isinstance(a, TrueF):
            return TRUE
        if isinstance(a, FalseF):
            continue
        if isinstance(a, Or):
            out.extend(a.args)
        else:
            out.append(a)
    seen, uniq = set(), []
    for a in out:
        if a not in seen:
            seen.add(a)
            uniq.append(a)
    if not uniq:
        return FALSE
    if len(uniq) == 1:
        return uniq[0]
    return Or(tuple(uniq))


def implies(a: Formula, b: Formula) -> Formula:
    return disj([neg(a), b])


def exists(names, body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for n in reversed(list(names)):
        body = Exists(n, body)
    return body


def forall(names, body: Formula) -> Formula:
    if isinstance(names, str):
        names = [names]
    for n in reversed(list(names)):
        body = Forall(n, body)
    return body


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, (TrueF, FalseF)):
        return frozenset()
    if isinstance(f, (Le, Eq)):
        return f.term.vars
    if isinstance(f, (Dvd, NotDvd)):
        return f.term.vars
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        out: frozenset = frozenset()
        for a in f.args:
            out |= free_vars(a)
        return out
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise UsageError(f"unknown formula node {f!r}")


def node_count(f: Formula) -> int:
    """Number of formula nodes; used for size budgets."""
    if isinstance(f, (TrueF, FalseF, Le, Eq, Dvd, NotDvd)):
        return 1
    if isinstance(f, Not):
        return 1 + node_count(f.body)
    if isinstance(f, (And, Or)):
        return 1 + sum(node_count(a) for a in f.args)
    if isinstance(f, (Exists, Forall)):
        return 1 + node_count(f.body)
    raise UsageError(f"unknown formula node {f!r}")


def node_size(f: Formula) -> int:
    """Node count weighted by term width; the budget unit for elimination."""
    if isinstance(f, (Le, Eq)):
        return 1 + len(f.term.coeffs)
    if isinstance(f, (Dvd, NotDvd)):
        return 1 + len(f.term.coeffs)
    if isinstance(f, (TrueF, FalseF)):
        return 1
    if isinstance(f, Not):
        return 1 + node_size(f.body)
    if isinstance(f, (And, Or)):
        return 1 + sum(node_size(a) for a in f.args)
    if isinstance(f, (Exists, Forall)):
        return 1 + node_size(f.body)
    raise UsageError(f"unknown formula node {f!r}")


def subst_var(f: Formula, name: str, t: Term) -> Formula:
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Le):
        return Le(f.term.subst(name, t))
    if isinstance(f, Eq):
        return Eq(f.term.subst(name, t))
    if isinstance(f, Dvd):
        return Dvd(f.k, f.term.subst(name, t))
    if isinstance(f, NotDvd):
        return NotDvd(f.k, f.term.subst(name, t))
    if isinstance(f, Not):
        return Not(subst_var(f.body, name, t))
    if isinstance(f, And):
        return And(tuple(subst_var(a, name, t) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(subst_var(a, name, t) for a in f.args))
    if isinstance(f, (Exists, Forall)):
        if f.var == name:
            return f
        if f.var in t.vars:
            raise UsageError(f"substitution would capture {f.var!r}")
        return type(f)(f.var, subst_var(f.body, name, t))
    raise UsageError(f"unknown formula node {f!r}")


def rename_vars(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Simultaneous renaming of free variables."""
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Le):
        return Le(f.term.rename(mapping))
    if isinstance(f, Eq):
        return Eq(f.term.rename(mapping))
    if isinstance(f, Dvd):
        return Dvd(f.k, f.term.rename(mapping))
    if isinstance(f, NotDvd):
        return NotDvd(f.k, f.term.rename(mapping))
    if isinstance(f, Not):
        return Not(rename_vars(f.body, mapping))
    if isinstance(f, And):
        return And(tuple(rename_vars(a, mapping) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(rename_vars(a, mapping) for a in f.args))
    if isinstance(f, (Exists, Forall)):
        if f.var in mapping.values():
            raise UsageError(f"renaming would capture {f.var!r}")
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return type(f)(f.var, rename_vars(f.body, inner))
    raise UsageError(f"unknown formula node {f!r}")


def eval_assignment(f: Formula, env: Mapping[str, int]) -> bool:
    """Evaluate a quantifier-free formula under a total assignment."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Le):
        return f.term.evaluate(env) <= 0
    if isinstance(f, Eq):
        return f.term.evaluate(env) == 0
    if isinstance(f, Dvd):
        return f.term.evaluate(env) % f.k == 0
    if isinstance(f, NotDvd):
        return f.term.evaluate(env) % f.k != 0
    if isinstance(f, Not):
        return not eval_assignment(f.body, env)
    if isinstance(f, And):
        return all(eval_assignment(a, env) for a in f.args)
    if isinstance(f, Or):
        return any(eval_assignment(a, env) for a in f.args)
    if isinstance(f, (Exists, Forall)):
        raise UsageError("eval_assignment requires a quantifier-free formula")
    raise UsageError(f"unknown formula node {f!r}")


def _gcd_many(values) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, abs(v))
    return g


def _simplify_le(t: Term) -> Formula:
    if not t.coeffs:
        return TRUE if t.const <= 0 else FALSE
    g = _gcd_many(c for _, c in t.coeffs)
    if g > 1:
        # g*s + c <= 0  <=>  s <= floor(-c/g)  <=>  s + ceil(c/g) <= 0
        t = Term(tuple((v, c // g) for v, c in t.coeffs), -((-t.const) // g))
    return Le(t)


def _normalize_eq_sign(t: Term) -> Term:
    if t.coeffs and t.coeffs[0][1] < 0:
        return t.neg()
    return t


def _simplify_eq(t: Term) -> Formula:
    if not t.coeffs:
        return TRUE if t.const == 0 else FALSE
    g = _gcd_many(c for _, c in t.coeffs)
    if g > 1:
        if t.const % g != 0:
            return FALSE
        t = Term(tuple((v, c // g) for v, c in t.coeffs), t.const // g)
    return Eq(_normalize_eq_sign(t))


def _simplify_dvd(k: int, t: Term, positive: bool) -> Formula:
    reduced = Term.make({v: c % k for v, c in t.coeffs}, t.const % k)
    if not reduced.coeffs:
        holds = reduced.const % k == 0
        return (TRUE if holds else FALSE) if positive else (FALSE if holds else TRUE)
    g = math.gcd(_gcd_many(c for _, c in reduced.coeffs), math.gcd(k, abs(reduced.const)))
    if g > 1:
        k //= g
        reduced = Term(tuple((v, c // g) for v, c in reduced.coeffs), reduced.const // g)
    if k == 1:
        return TRUE if positive else FALSE
    reduced = _normalize_eq_sign(reduced)
    return Dvd(k, reduced) if positive else NotDvd(k, reduced)


def _conj_post(args: list) -> Formula:
    """Contradiction detection over flattened, simplified conjuncts."""
    le_best: dict = {}
    eq_consts: dict = {}
    atom_set = set(args)
    for a in args:
        if isinstance(a, Not) and a.body in atom_set:
            return FALSE
        if isinstance(a, NotDvd) and Dvd(a.k, a.term) in atom_set:
            return FALSE
        if isinstance(a, Le):
            key = a.term.coeffs
            prev = le_best.get(key)
            if prev is None or a.term.const > prev:
                le_best[key] = a.term.const
        if isinstance(a, Eq):
            key = a.term.coeffs
            prev = eq_consts.get(key)
            if prev is not None and prev != a.term.const:
                return FALSE
            eq_consts[key] = a.term.const
    for key, c1 in le_best.items():
        flipped = tuple((v, -c) for v, c in key)
        c2 = le_best.get(flipped)
        if c2 is not None and c1 + c2 > 0:
            return FALSE
    kept = []
    seen_le = set()
    for a in args:
        if isinstance(a, Le):
            key = a.term.coeffs
            if a.term.const != le_best[key] or key in seen_le:
                continue
            seen_le.add(key)
        kept.append(a)
    return conj(kept)


def _disj_post(args: list) -> Formula:
    """Tautology detection over flattened, simplified disjuncts."""
    le_best: dict = {}
    atom_set = set(args)
    for a in args:
        if isinstance(a, Not) and a.body in atom_set:
            return TRUE
        if isinstance(a, NotDvd) and Dvd(a.k, a.term) in atom_set:
            return TRUE
        if isinstance(a, Le):
            key = a.term.coeffs
            prev = le_best.get(key)
            if prev is None or a.term.const < prev:
                le_best[key] = a.term.const
    for key, c1 in le_best.items():
        flipped = tuple((v, -c) for v, c in key)
        c2 = le_best.get(flipped)
        if c2 is not None and c1 + c2 <= 1:
            return TRUE
    kept = []
    seen_le = set()
    for a in args:
        if isinstance(a, Le):
            key = a.term.coeffs
            if a.term.const != le_best[key] or key in seen_le:
                continue
            seen_le.add(key)
        kept.append(a)
    return disj(kept)


def simplify(f: Formula) -> Formula:
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Le):
        return _simplify_le(f.term)
    if isinstance(f, Eq):
        return _simplify_eq(f.term)
    if isinstance(f, Dvd):
        return _simplify_dvd(f.k, f.term, positive=True)
    if isinstance(f, NotDvd):
        return _simplify_dvd(f.k, f.term, positive=False)
    if isinstance(f, Not):
        body = simplify(f.body)
        if isinstance(body, TrueF):
            return FALSE
        if isinstance(body, FalseF):
            return TRUE
        if isinstance(body, Not):
            return body.body
        return Not(body)
    if isinstance(f, And):
        flat = conj([simplify(a) for a in f.args])
        if not isinstance(flat, And):
            return flat
        return _conj_post(list(flat.args))
    if isinstance(f, Or):
        flat = disj([simplify(a) for a in f.args])
        if not isinstance(flat, Or):
            return flat
        return _disj_post(list(flat.args))
    if isinstance(f, (Exists, Forall)):
        body = simplify(f.body)
        if isinstance(body, (TrueF, FalseF)) or f.var not in free_vars(body):
            return body
        return type(f)(f.var, body)
    raise UsageError(f"unknown formula node {f!r}")


def _format_term_pair(t: Term) -> tuple:
    """Split t into (positive side, negative side) so t <= 0 reads lhs <= rhs."""
    pos = {v: c for v, c in t.coeffs if c > 0}
    negs = {v: -c for v, c in t.coeffs if c < 0}
    pc = t.const if t.const > 0 else 0
    nc = -t.const if t.const < 0 else 0
    return Term.make(pos, pc), Term.make(negs, nc)


def format_term(t: Term) -> str:
    parts = []
    for v, c in t.coeffs:
        if c == 1:
            parts.append(v)
        else:
            parts.append(f"{c}*{v}")
    if t.const != 0 or not parts:
        parts.append(str(t.const))
    return " + ".join(parts)


def _fmt_cmp(t: Term, op: str) -> str:
    lhs, rhs = _format_term_pair(t)
    return f"{format_term(lhs)} {op} {format_term(rhs)}"


_PREC = {"quant": 0, "imp": 1, "or": 2, "and": 3, "not": 4, "atom": 5}


def _fmt(f: Formula, parent: int) -> str:
    if isinstance(f, TrueF):
        return "0 = 0"
    if isinstance(f, FalseF):
        return "0 = 1"
    if isinstance(f, Le):
        return _fmt_cmp(f.term, "<=")
    if isinstance(f, Eq):
        return _fmt_cmp(f.term, "=")
    if isinstance(f, Dvd):
        return f"{f.k} | {format_term(f.term)}"
    if isinstance(f, NotDvd):
        return f"~ ({f.k} | {format_term(f.term)})"
    if isinstance(f, Not):
        return f"~ ({_fmt(f.body, _PREC['not'])})"
    if isinstance(f, And):
        s = " /\\ ".join(_fmt(a, _PREC["and"]) for a in f.args)
        return _wrap(s, parent, _PREC["and"])
    if isinstance(f, Or):
        s = " \\/ ".join(_fmt(a, _PREC["or"]) for a in f.args)
        return _wrap(s, parent, _PREC["or"])
    if isinstance(f, Exists):
        s = f"E {f.var}. {_fmt(f.body, _PREC['quant'])}"
        return _wrap(s, parent, _PREC["quant"])
    if isinstance(f, Forall):
        s = f"A {f.var}. {_fmt(f.body, _PREC['quant'])}"
        return _wrap(s, parent, _PREC["quant"])
    raise UsageError(f"unknown formula node {f!r}")


def _wrap(s: str, parent: int, mine: int) -> str:
    return f"({s})" if parent > mine else s


def format_formula(f: Formula) -> str:
    return _fmt(f, 0)
