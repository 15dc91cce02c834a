"""Deciding monotonicity of counter-machine step relations under an ordering.

A machine is strongly monotone for an ordering when every step from a state
has a matching step from every larger state, with the same label, to a
larger successor.  The strict variant additionally requires that strictly
larger inputs admit strictly larger outputs.  Both properties are sentences
of linear integer arithmetic, one per (label, source, target) transition
group, so they are decided exactly by quantifier elimination.

Counter variables range over the naturals; sentences carry explicit
non-negativity conjuncts because the solver itself works over the integers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from ..errors import BudgetExceededError, UsageError
from .cooper import DEFAULT_NODE_BUDGET, decide_sentence, qe_cooper
from .syntax import (
    Exists,
    Forall,
    Formula,
    Le,
    conj,
    disj,
    eval_assignment,
    exists,
    forall,
    free_vars,
    implies,
    neg,
    num,
    rename_vars,
    simplify,
    subst_var,
    var,
)

SEARCH_VALUE_CAP = 64


@dataclass(frozen=True)
class MonotonicityVerdict:
    kind: str
    holds: Optional[bool]  # None when a budget made the check inconclusive
    counterexample: Optional[dict]
    sentences_checked: int = 0
    note: str = ""


def _u_names(d: int) -> list:
    return [f"u{i + 1}" for i in range(d)]


def _v_names(d: int) -> list:
    return [f"v{i + 1}" for i in range(d)]


def dickson_ordering(d: int) -> Formula:
    """Componentwise <= on d counters, over variables u1..ud, v1..vd."""
    return conj([Le(var(u).sub(var(v))) for u, v in zip(_u_names(d), _v_names(d))])


def _check_ordering_vars(ordering: Formula, d: int) -> None:
    allowed = set(_u_names(d)) | set(_v_names(d))
    extra = free_vars(ordering) - allowed
    if extra:
        raise UsageError(
            f"ordering for dimension {d} may only use {sorted(allowed)}; "
            f"found {sorted(extra)}"
        )


def _instantiate(ordering: Formula, d: int, left: Sequence[str], right: Sequence[str]) -> Formula:
    mapping = dict(zip(_u_names(d), left)) | dict(zip(_v_names(d), right))
    return rename_vars(ordering, mapping)


def _instantiate_strict(ordering: Formula, d: int, left, right) -> Formula:
    return conj([
        _instantiate(ordering, d, left, right),
        neg(_instantiate(ordering, d, right, left)),
    ])


def _nonneg(names) -> Formula:
    return conj([Le(var(n).neg()) for n in names])


def _group_sentence(d: int, steps, ordering: Formula, strict: bool) -> Formula:
    """One quantified sentence for a group of same-label, same-edge steps."""
    xs = [f"x{i + 1}" for i in range(d)]
    xps = [f"x{i + 1}'" for i in range(d)]
    ys = [f"y{i + 1}" for i in range(d)]
    yps = [f"y{i + 1}'" for i in range(d)]
    to_y = dict(zip(xps, ys))
    to_prime = dict(zip(xs, xps)) | dict(zip(xps, yps))
    step_xy = disj([rename_vars(s, to_y) for s in steps])
    step_xpyp = disj([rename_vars(s, to_prime) for s in steps])
    if strict:
        ord_in = _instantiate_strict(ordering, d, xs, xps)
        ord_out = _instantiate_strict(ordering, d, ys, yps)
    else:
        ord_in = _instantiate(ordering, d, xs, xps)
        ord_out = _instantiate(ordering, d, ys, yps)
    hyp = conj([_nonneg(xs), _nonneg(xps), _nonneg(ys), step_xy, ord_in])
    con = exists(yps, conj([_nonneg(yps), step_xpyp, ord_out]))
    return forall(xs + xps + ys, implies(hyp, con))


def _grouped(m) -> dict:
    groups: dict = {}
    for t in m.transitions:
        groups.setdefault((t.label, t.source, t.target), []).append(t)
    return groups


def _variants(kind: str) -> list:
    if kind == "strong":
        return [False]
    if kind == "strong-strict":
        return [False, True]
    raise UsageError(f"unknown monotonicity kind {kind!r}")


def monotonicity_sentence(m, ordering: Formula, kind: str, label: Optional[str] = None):
    """The monotonicity sentence per label (or for one requested label).

    A label with no transitions yields the vacuously true sentence.
    """
    d = m.dimension
    _check_ordering_vars(ordering, d)
    variants = _variants(kind)
    by_label: dict = {}
    for (lab, _, _), ts in _grouped(m).items():
        steps = [m.step_formula(t.tid) for t in ts]
        parts = by_label.setdefault(lab, [])
        for strict in variants:
            parts.append(_group_sentence(d, steps, ordering, strict))
    sentences = {lab: conj(parts) for lab, parts in by_label.items()}
    if label is not None:
        return sentences.get(label, conj([]))
    return sentences


def _concrete_truth(f: Formula, env: Mapping[str, int], node_budget: int) -> bool:
    """Truth of f under a total assignment; tolerates quantified subformulas."""
    g = f
    for name, value in env.items():
        g = subst_var(g, name, num(value))
    g = simplify(g)
    if not free_vars(g) and _has_quantifier(g):
        return decide_sentence(g, node_budget)
    return eval_assignment(g, {})


def _has_quantifier(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return True
    args = getattr(f, "args", None)
    if args is not None:
        return any(_has_quantifier(a) for a in args)
    body = getattr(f, "body", None)
    if body is not None:
        return _has_quantifier(body)
    return False


def check_strong_monotonicity(
    m,
    ordering: Formula,
    kind: str = "strong",
    node_budget: int = DEFAULT_NODE_BUDGET,
    find_counterexample: bool = True,
) -> MonotonicityVerdict:
    """Decide the monotonicity sentences; extract a witness on failure.

    The witness search enumerates small concrete values and re-certifies the
    candidate with an independent sentence decision, so a returned
    counterexample is exact even though the search itself is bounded.
    """
    d = m.dimension
    _check_ordering_vars(ordering, d)
    checked = 0
    for (label, source, target), ts in _grouped(m).items():
        steps = [(t.tid, m.step_formula(t.tid)) for t in ts]
        for strict in _variants(kind):
            sentence = _group_sentence(d, [s for _, s in steps], ordering, strict)
            try:
                ok = decide_sentence(sentence, node_budget)
            except BudgetExceededError:
                return MonotonicityVerdict(
                    kind,
                    None,
                    None,
                    checked,
                    note=f"budget exceeded deciding label {label!r} ({source}->{target})",
                )
            checked += 1
            if ok:
                continue
            cex = None
            if find_counterexample:
                cex = _find_counterexample(d, steps, ordering, strict, node_budget)
                if cex is not None:
                    cex["label"] = label
            note = "" if cex or not find_counterexample else "no witness within the search bound"
            return MonotonicityVerdict(kind, False, cex, checked, note=note)
    return MonotonicityVerdict(kind, True, None, checked)


def _completion_sentence(d, steps, ordering, strict, xp, y) -> Formula:
    """Closed formula: some y' completes the square above (xp, y)."""
    xps = [f"x{i + 1}'" for i in range(d)]
    ys = [f"y{i + 1}" for i in range(d)]
    yps = [f"y{i + 1}'" for i in range(d)]
    to_prime = dict(zip([f"x{i + 1}" for i in range(d)], xps)) | dict(zip(xps, yps))
    step_xpyp = disj([rename_vars(s, to_prime) for s in steps])
    ord_out = (
        _instantiate_strict(ordering, d, ys, yps)
        if strict
        else _instantiate(ordering, d, ys, yps)
    )
    body = conj([_nonneg(yps), step_xpyp, ord_out])
    for name, value in zip(xps, xp):
        body = subst_var(body, name, num(value))
    for name, value in zip(ys, y):
        body = subst_var(body, name, num(value))
    return exists(yps, body)


def _find_counterexample(d, steps, ordering, strict, node_budget):
    xs = [f"x{i + 1}" for i in range(d)]
    xps = [f"x{i + 1}'" for i in range(d)]
    qf_ord = qe_cooper(ordering, node_budget)

    def ord_holds(a, b) -> bool:
        env = dict(zip(_u_names(d), a)) | dict(zip(_v_names(d), b))
        return eval_assignment(qf_ord, env)

    def related(a, b) -> bool:
        if strict:
            return ord_holds(a, b) and not ord_holds(b, a)
        return ord_holds(a, b)

    schedule = [2, 4, 8]
    if d == 1:
        schedule += [16, 32, SEARCH_VALUE_CAP]
    for bound in schedule:
        pts = sorted(itertools.product(range(bound + 1), repeat=d), key=lambda p: (sum(p), p))
        for x in pts:
            fired = []
            for y in pts:
                env = dict(zip(xs, x)) | dict(zip(xps, y))
                for tid, s in steps:
                    if _concrete_truth(s, env, node_budget):
                        fired.append((y, tid))
                        break
            if not fired:
                continue
            for xp in pts:
                if xp == x and strict:
                    continue
                if not related(x, xp):
                    continue
                for y, tid in fired:
                    completion = _completion_sentence(d, [s for _, s in steps], ordering, strict, xp, y)
                    try:
                        completable = decide_sentence(completion, node_budget)
                    except BudgetExceededError:
                        continue
                    if not completable:
                        return {
                            "transition": tid,
                            "x": tuple(x),
                            "x_prime": tuple(xp),
                            "y": tuple(y),
                            "variant": "strict" if strict else "strong",
                        }
    return None
