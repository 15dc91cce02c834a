"""Searching for an ordering that makes a counter machine monotone.

The search enumerates candidate ordering formulas over u1..ud, v1..vd from a
small grammar in increasing coefficient rank, keeps the ones that are
reflexive and transitive over the naturals (certified by quantifier
elimination after a cheap grid pre-screen), discards candidates whose finite
grid shows gross non-wellness, and tests each survivor for strong
monotonicity.  Success returns the first verified pair; exhausting the
budget returns statistics and no answer, never a claim of non-existence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from ..errors import BudgetExceededError
from .cooper import DEFAULT_NODE_BUDGET, decide_sentence, qe_cooper
from .monotonicity import (
    MonotonicityVerdict,
    _check_ordering_vars,
    _instantiate,
    _nonneg,
    _u_names,
    _v_names,
    check_strong_monotonicity,
)
from .syntax import (
    And,
    Dvd,
    Eq,
    Formula,
    Le,
    Or,
    Term,
    conj,
    eval_assignment,
    forall,
    implies,
    simplify,
)

PRESCREEN_MAX = 3  # grid [0..3]^d drives the cheap axiom pre-screen
WELLNESS_BOUND = 10


@dataclass(frozen=True)
class AxiomsReport:
    is_quasi_ordering: bool
    failures: tuple


@dataclass(frozen=True)
class WellnessEvidence:
    kind: str  # "descending-chain" | "antichain"
    members: tuple
    conclusive: bool = False  # grid evidence can never prove non-wellness


@dataclass(frozen=True)
class OrderingSearchResult:
    ordering: Optional[Formula]
    verdict: Optional[MonotonicityVerdict]
    stats: dict


def ordering_axioms_check(ordering: Formula, d: int, node_budget: int = DEFAULT_NODE_BUDGET) -> AxiomsReport:
    """Decide reflexivity and transitivity over the naturals."""
    _check_ordering_vars(ordering, d)
    us, vs = _u_names(d), _v_names(d)
    ws = [f"w{i + 1}" for i in range(d)]
    failures = []
    refl = forall(us, implies(_nonneg(us), _instantiate(ordering, d, us, us)))
    if not decide_sentence(refl, node_budget):
        failures.append("reflexivity")
    hyp = conj([
        _nonneg(us),
        _nonneg(vs),
        _nonneg(ws),
        _instantiate(ordering, d, us, vs),
        _instantiate(ordering, d, vs, ws),
    ])
    trans = forall(us + vs + ws, implies(hyp, _instantiate(ordering, d, us, ws)))
    if not decide_sentence(trans, node_budget):
        failures.append("transitivity")
    return AxiomsReport(not failures, tuple(failures))


def refute_wellness_bounded(ordering: Formula, d: int, bound: int = WELLNESS_BOUND) -> Optional[WellnessEvidence]:
    """Grid search for long descent or a wide antichain.

    The returned evidence is suspicion only: every finite grid of a true
    well-quasi-ordering still contains antichains and descents of bounded
    size, so callers must weigh the evidence against the grid size.
    """
    qf = qe_cooper(ordering)
    points = list(itertools.product(range(bound + 1), repeat=d))
    index = {p: i for i, p in enumerate(points)}
    n = len(points)
    us, vs = _u_names(d), _v_names(d)

    def leq(a, b) -> bool:
        env = dict(zip(us, a)) | dict(zip(vs, b))
        return eval_assignment(qf, env)

    rel = [[leq(a, b) for b in points] for a in points]

    antichain = []
    anti_idx = []
    for i, p in enumerate(points):
        if all(not rel[i][j] and not rel[j][i] for j in anti_idx):
            antichain.append(p)
            anti_idx.append(i)
    if len(antichain) >= bound:
        return WellnessEvidence("antichain", tuple(antichain))

    # longest strictly descending chain, walking the (acyclic) strict order
    below: list = [[] for _ in range(n)]
    for i, a in enumerate(points):
        for j, b in enumerate(points):
            if i != j and rel[i][j] and not rel[j][i]:
                below[j].append(i)  # a is strictly below b
    length = [0] * n
    parent = [-1] * n
    order = _topo_order(below, n)
    for j in order:
        for i in below[j]:
            if length[i] + 1 > length[j]:
                length[j] = length[i] + 1
                parent[j] = i
    top = max(range(n), key=lambda j: length[j])
    chain = []
    cur = top
    while cur != -1:
        chain.append(points[cur])
        cur = parent[cur]
    if len(chain) >= bound:
        return WellnessEvidence("descending-chain", tuple(chain))
    return None


def _topo_order(below, n):
    """Topological order of the strict DAG given per-node predecessor lists."""
    indeg = [0] * n
    above: list = [[] for _ in range(n)]
    for j in range(n):
        for i in below[j]:
            above[i].append(j)
            indeg[j] += 1
    queue = [i for i in range(n) if indeg[i] == 0]
    out = []
    while queue:
        nxt = queue.pop()
        out.append(nxt)
        for j in above[nxt]:
            indeg[j] -= 1
            if indeg[j] == 0:
                queue.append(j)
    return out


def _candidate_atoms(d: int, rank: int) -> list:
    """Atoms over u,v with coefficients and constants bounded by rank."""
    rng = range(-rank, rank + 1)
    names = _u_names(d) + _v_names(d)
    atoms = []
    seen = set()
    for coeffs in itertools.product(rng, repeat=2 * d):
        if all(c == 0 for c in coeffs):
            continue
        for k in rng:
            term = Term.make(dict(zip(names, coeffs)), k)
            candidates = [simplify(Le(term)), simplify(Eq(term))]
            for mod in range(2, rank + 1):
                candidates.append(simplify(Dvd(mod, term)))
            for a in candidates:
                if isinstance(a, (Le, Eq, Dvd)) and a not in seen:
                    seen.add(a)
                    atoms.append(a)
    return atoms


def _prescreen_tables(d: int):
    points = list(itertools.product(range(PRESCREEN_MAX + 1), repeat=d))
    n = len(points)
    us, vs = _u_names(d), _v_names(d)
    envs = [dict(zip(us, a)) | dict(zip(vs, b)) for a in points for b in points]
    diag = 0
    for i in range(n):
        diag |= 1 << (i * n + i)
    return points, envs, n, diag


def _atom_mask(atom: Formula, envs) -> int:
    mask = 0
    for bit, env in enumerate(envs):
        if eval_assignment(atom, env):
            mask |= 1 << bit
    return mask


def _mask_reflexive(mask: int, diag: int) -> bool:
    return mask & diag == diag


def _mask_transitive(mask: int, n: int) -> bool:
    full = (1 << n) - 1
    rows = [(mask >> (i * n)) & full for i in range(n)]
    for i in range(n):
        reach = 0
        row = rows[i]
        j = 0
        while row:
            if row & 1:
                reach |= rows[j]
            row >>= 1
            j += 1
        if reach & ~rows[i]:
            return False
    return True


def enumerate_orderings(
    d: int,
    budget: int,
    node_budget: int = DEFAULT_NODE_BUDGET,
    stats: Optional[dict] = None,
    max_rank: int = 4,
) -> Iterator[Formula]:
    """Deterministic stream of certified quasi-orderings over u,v.

    `budget` counts candidate formulas examined, certified or not; the
    stream ends when it runs out.
    """
    if stats is None:
        stats = {}
    stats.setdefault("candidates", 0)
    stats.setdefault("passed_axioms", 0)
    _, envs, n, diag = _prescreen_tables(d)
    emitted = set()
    masks: dict = {}

    def mask_of(f: Formula, atom_masks: dict) -> int:
        if isinstance(f, And):
            out = (1 << (n * n)) - 1
            for a in f.args:
                out &= mask_of(a, atom_masks)
            return out
        if isinstance(f, Or):
            out = 0
            for a in f.args:
                out |= mask_of(a, atom_masks)
            return out
        return atom_masks[f]

    def consider(f: Formula):
        stats["candidates"] += 1
        m = mask_of(f, masks)
        if not _mask_reflexive(m, diag) or not _mask_transitive(m, n):
            return None
        try:
            report = ordering_axioms_check(f, d, node_budget)
        except BudgetExceededError:
            return None
        if not report.is_quasi_ordering:
            return None
        stats["passed_axioms"] += 1
        return f

    for rank in range(1, max_rank + 1):
        atoms = _candidate_atoms(d, rank)
        for a in atoms:
            if a not in masks:
                masks[a] = _atom_mask(a, envs)
        for a in atoms:
            if a in emitted:
                continue
            emitted.add(a)
            if stats["candidates"] >= budget:
                return
            kept = consider(a)
            if kept is not None:
                yield kept
        group_max = max(2, d)
        for size in range(2, group_max + 1):
            for combo in itertools.combinations(atoms, size):
                shapes = [And(combo), Or(combo)] if size == 2 else [And(combo)]
                for f in shapes:
                    if f in emitted:
                        continue
                    emitted.add(f)
                    if stats["candidates"] >= budget:
                        return
                    kept = consider(f)
                    if kept is not None:
                        yield kept


def find_structuring_ordering(
    m,
    budget: int,
    kind: str = "strong",
    node_budget: int = DEFAULT_NODE_BUDGET,
    wellness_bound: int = WELLNESS_BOUND,
) -> OrderingSearchResult:
    """Semi-algorithm: first enumerated ordering that verifies, or nothing.

    An empty result never claims no ordering exists; it only reports how far
    the budgeted enumeration got.
    """
    d = m.dimension
    stats = {"candidates": 0, "passed_axioms": 0, "skipped_wellness": 0, "checked": 0}
    for ordering in enumerate_orderings(d, budget, node_budget, stats):
        evidence = refute_wellness_bounded(ordering, d, wellness_bound)
        if evidence is not None:
            # Any order has grid descents as long as the grid is tall, but
            # only an ill-founded one descends far below a low anchor; an
            # antichain as wide as the bound never has all members swallowed
            # by later points the way componentwise orders do.
            if evidence.kind == "descending-chain":
                damning = sum(evidence.members[0]) <= wellness_bound // 2
            else:
                damning = len(evidence.members) >= wellness_bound
            if damning:
                stats["skipped_wellness"] += 1
                continue
        stats["checked"] += 1
        verdict = check_strong_monotonicity(
            m, ordering, kind, node_budget=node_budget, find_counterexample=False
        )
        if verdict.holds:
            return OrderingSearchResult(ordering, verdict, stats)
    return OrderingSearchResult(None, None, stats)
