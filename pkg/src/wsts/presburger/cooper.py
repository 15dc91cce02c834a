"""Quantifier elimination for linear integer arithmetic.

Variables range over the integers; analyses that need naturals add explicit
non-negativity conjuncts when they build sentences.  Elimination follows the
classic scheme: normalize the bound variable's coefficients to a common
multiple, then replace the existential by a finite disjunction over the
divisibility period and the boundary terms.  A node budget converts
formula blow-up into an explicit error instead of a hang.
"""

from __future__ import annotations

import math

from ..errors import BudgetExceededError, UsageError
from .syntax import (
    FALSE,
    TRUE,
    And,
    Dvd,
    Eq,
    Exists,
    FalseF,
    Forall,
    Formula,
    Le,
    Not,
    NotDvd,
    Or,
    Term,
    TrueF,
    conj,
    disj,
    eval_assignment,
    free_vars,
    neg,
    node_size,
    num,
    simplify,
    subst_var,
    var,
)

DEFAULT_NODE_BUDGET = 100_000


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def charge(self, n: int) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceededError(
                f"quantifier elimination exceeded {self.limit} formula nodes"
            )


def nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form; negation is absorbed into the atoms."""
    if isinstance(f, TrueF):
        return TRUE if positive else FALSE
    if isinstance(f, FalseF):
        return FALSE if positive else TRUE
    if isinstance(f, Le):
        # not (t <= 0)  <=>  1 - t <= 0
        return f if positive else Le(f.term.neg().add_const(1))
    if isinstance(f, Eq):
        if positive:
            return f
        return Or((Le(f.term.add_const(1)), Le(f.term.neg().add_const(1))))
    if isinstance(f, Dvd):
        return f if positive else NotDvd(f.k, f.term)
    if isinstance(f, NotDvd):
        return f if positive else Dvd(f.k, f.term)
    if isinstance(f, Not):
        return nnf(f.body, not positive)
    if isinstance(f, And):
        parts = tuple(nnf(a, positive) for a in f.args)
        return And(parts) if positive else Or(parts)
    if isinstance(f, Or):
        parts = tuple(nnf(a, positive) for a in f.args)
        return Or(parts) if positive else And(parts)
    if isinstance(f, Exists):
        inner = nnf(f.body, positive)
        return Exists(f.var, inner) if positive else Forall(f.var, inner)
    if isinstance(f, Forall):
        inner = nnf(f.body, positive)
        return Forall(f.var, inner) if positive else Exists(f.var, inner)
    raise UsageError(f"unknown formula node {f!r}")


def qe_cooper(f: Formula, node_budget: int = DEFAULT_NODE_BUDGET) -> Formula:
    """Equivalent quantifier-free formula over the same free variables."""
    budget = _Budget(node_budget)
    return simplify(_qe(f, budget))


def decide_sentence(f: Formula, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Truth value of a closed formula."""
    fv = free_vars(f)
    if fv:
        raise UsageError(f"sentence has free variables: {sorted(fv)}")
    res = qe_cooper(f, node_budget)
    if isinstance(res, TrueF):
        return True
    if isinstance(res, FalseF):
        return False
    return eval_assignment(res, {})


def _qe(f: Formula, budget: _Budget) -> Formula:
    if isinstance(f, (TrueF, FalseF, Le, Eq, Dvd, NotDvd)):
        return f
    if isinstance(f, Not):
        return neg(_qe(f.body, budget))
    if isinstance(f, And):
        return conj([_qe(a, budget) for a in f.args])
    if isinstance(f, Or):
        return disj([_qe(a, budget) for a in f.args])
    if isinstance(f, Exists):
        return _eliminate(f.var, _qe(f.body, budget), budget)
    if isinstance(f, Forall):
        inner = _qe(f.body, budget)
        return simplify(neg(_eliminate(f.var, neg(inner), budget)))
    raise UsageError(f"unknown formula node {f!r}")


def _eliminate(x: str, body: Formula, budget: _Budget) -> Formula:
    """Eliminate one existential over a quantifier-free body."""
    body = simplify(nnf(body))
    if x not in free_vars(body):
        return body
    budget.charge(node_size(body))
    if isinstance(body, Or):
        return simplify(disj([_eliminate(x, d, budget) for d in body.args]))
    if isinstance(body, And):
        outside = [a for a in body.args if x not in free_vars(a)]
        if outside:
            inside = [a for a in body.args if x in free_vars(a)]
            return simplify(conj(outside + [_eliminate(x, conj(inside), budget)]))
    solved = _solve_unit_eq(x, body)
    if solved is not None:
        return solved
    return _cooper(x, body, budget)


def _solve_unit_eq(x: str, body: Formula):
    """Substitute an equality that pins x to a term with unit coefficient."""
    args = body.args if isinstance(body, And) else (body,)
    for i, a in enumerate(args):
        if isinstance(a, Eq):
            c = a.term.coeff(x)
            if c in (1, -1):
                sol = a.term.without(x).scale(-c)
                rest = [b for j, b in enumerate(args) if j != i]
                return simplify(conj([subst_var(b, x, sol) for b in rest]))
    return None


def _expand_eq(f: Formula, x: str) -> Formula:
    """Split equalities mentioning x into two inequalities."""
    if isinstance(f, Eq) and f.term.coeff(x) != 0:
        return And((Le(f.term), Le(f.term.neg())))
    if isinstance(f, And):
        return And(tuple(_expand_eq(a, x) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_expand_eq(a, x) for a in f.args))
    return f


def _atoms(f: Formula):
    if isinstance(f, (And, Or)):
        for a in f.args:
            yield from _atoms(a)
    else:
        yield f


def _normalize_coefficients(f: Formula, x: str, z: str, m: int) -> Formula:
    """Rescale so x's coefficient is +-m everywhere, then set z = m*x."""
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_normalize_coefficients(a, x, z, m) for a in f.args))
    if isinstance(f, (Le, Dvd, NotDvd)):
        t = f.term
        c = t.coeff(x)
        if c == 0:
            return f
        s = m // abs(c)
        scaled = t.scale(s)
        replaced = scaled.without(x).add(var(z).scale(1 if c > 0 else -1))
        if isinstance(f, Le):
            return Le(replaced)
        if isinstance(f, Dvd):
            return Dvd(f.k * s, replaced)
        return NotDvd(f.k * s, replaced)
    if isinstance(f, Eq) and f.term.coeff(x) != 0:
        raise UsageError("equalities must be expanded before normalization")
    return f


def _replace_bounds(f: Formula, z: str, lower_to: Formula, upper_to: Formula) -> Formula:
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_replace_bounds(a, z, lower_to, upper_to) for a in f.args))
    if isinstance(f, Le):
        c = f.term.coeff(z)
        if c == -1:
            return lower_to
        if c == 1:
            return upper_to
    return f


def _cooper(x: str, body: Formula, budget: _Budget) -> Formula:
    g = simplify(_expand_eq(body, x))
    if x not in free_vars(g):
        return g
    coefs = {abs(a.term.coeff(x)) for a in _atoms(g) if not isinstance(a, (TrueF, FalseF)) and a.term.coeff(x) != 0}
    m = math.lcm(*coefs)
    z = x + "$"
    psi = _normalize_coefficients(g, x, z, m)
    if m > 1:
        psi = conj([psi, Dvd(m, var(z))])
    lowers, uppers = [], []
    delta = 1
    for a in _atoms(psi):
        if isinstance(a, (TrueF, FalseF)):
            continue
        c = a.term.coeff(z)
        if isinstance(a, Le):
            if c == -1:
                lowers.append(a.term.without(z))
            elif c == 1:
                uppers.append(a.term.without(z))
        elif isinstance(a, (Dvd, NotDvd)) and c != 0:
            delta = math.lcm(delta, a.k)
    parts = []
    if len(lowers) <= len(uppers):
        inf = _replace_bounds(psi, z, FALSE, TRUE)
        for j in range(1, delta + 1):
            budget.charge(node_size(inf))
            parts.append(simplify(subst_var(inf, z, num(j))))
        for s in lowers:
            # -z + s <= 0 means z >= s, i.e. the boundary term is s - 1
            b = s.add_const(-1)
            for j in range(1, delta + 1):
                budget.charge(node_size(psi))
                parts.append(simplify(subst_var(psi, z, b.add_const(j))))
    else:
        inf = _replace_bounds(psi, z, TRUE, FALSE)
        for j in range(1, delta + 1):
            budget.charge(node_size(inf))
            parts.append(simplify(subst_var(inf, z, num(-j))))
        for s in uppers:
            # z + s <= 0 means z <= -s, i.e. the boundary term is -s + 1
            a_term = s.neg().add_const(1)
            for j in range(1, delta + 1):
                budget.charge(node_size(psi))
                parts.append(simplify(subst_var(psi, z, a_term.add_const(-j))))
    return simplify(disj(parts))
