"""Queries, dispatch, and deterministic report emission.

A report's JSON form is canonical: keys sorted, compact separators, one
trailing newline.  Identical (model, query, budgets) inputs give
byte-identical output except for the timing field, which measures wall
time and is exempt from that guarantee.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

from .abstraction import (
    AbstractionReport,
    drop_zero_tests,
    lossy_abstraction,
    zero_tests_to_resets,
)
from .analyses import (
    DEFAULT_BASIS_BUDGET,
    DEFAULT_STATE_BUDGET,
    backward_coverability,
    bounded_forward_oracle,
    boundedness,
    control_state_reachability,
    karp_miller,
    km_to_dot,
    termination,
)
from .dsl import model_to_dsl
from .errors import UnsupportedAnalysisError, UsageError
from .models import counter_machine_to_pcm, vass_to_pcm
from .orders import is_omega
from .presburger import (
    check_strong_monotonicity,
    decide_sentence,
    dickson_ordering,
    find_structuring_ordering,
    format_formula,
)
from .presburger.cooper import DEFAULT_NODE_BUDGET

DEFAULT_SEARCH_BUDGET = 400

ANALYSES = (
    "coverability",
    "control-state-reachability",
    "termination",
    "boundedness",
    "karp-miller",
    "check-monotonicity",
    "find-ordering",
    "abstract",
    "decide",
)


@dataclass
class Query:
    analysis: str
    target: object = None
    state: Optional[str] = None
    sentence: object = None
    ordering: object = None  # formula overriding the componentwise default
    kind: str = "strong"
    mode: Optional[str] = None
    budget: int = DEFAULT_SEARCH_BUDGET
    budget_states: int = DEFAULT_STATE_BUDGET
    budget_basis: int = DEFAULT_BASIS_BUDGET
    node_budget: int = DEFAULT_NODE_BUDGET
    oracle_cutoff: Optional[int] = None
    model_name: Optional[str] = None


@dataclass
class Report:
    analysis: str
    model: str
    verdict: str
    ordering: str
    stats: dict
    witness: Optional[list] = None
    basis: Optional[list] = None
    clover: Optional[list] = None
    counterexample: Optional[dict] = None
    extras: dict = field(default_factory=dict)
    attachments: dict = field(default_factory=dict)
    timing_ms: float = 0.0
    exit_code: int = 0


def _payload_json(payload):
    return ["omega" if is_omega(v) else v for v in payload]


def _config_json(c):
    return {"state": c.state, "payload": _payload_json(c.payload)}


def _stats(iterations=0, basis_size=0, nodes=0, **extra):
    out = {"iterations": iterations, "basis_size": basis_size, "nodes": nodes}
    out.update(extra)
    return out


def run_query(model, query: Query) -> Report:
    """Dispatch a query and wrap the outcome in a report."""
    if query.analysis not in ANALYSES:
        raise UsageError(f"unknown analysis {query.analysis!r}")
    start = time.perf_counter()
    report = _dispatch(model, query)
    report.timing_ms = round((time.perf_counter() - start) * 1000.0, 3)
    if (
        query.oracle_cutoff is not None
        and model is not None
        and query.analysis != "abstract"
    ):
        oracle = bounded_forward_oracle(model, query.oracle_cutoff)
        report.extras["oracle"] = {
            "cutoff": query.oracle_cutoff,
            "conclusive": oracle.conclusive,
            "reachable": len(oracle.reachable),
        }
    return report


def _model_name(model, query) -> str:
    if query.model_name is not None:
        return query.model_name
    return model.name if model is not None else "sentence"


def _dispatch(model, query: Query) -> Report:
    analysis = query.analysis
    name = _model_name(model, query)
    if analysis == "decide":
        if query.sentence is None:
            raise UsageError("decide needs a sentence")
        verdict = decide_sentence(query.sentence, query.node_budget)
        return Report(analysis, name, "true" if verdict else "false", "", _stats())
    if model is None:
        raise UsageError(f"{analysis} needs a model")

    if analysis in ("coverability", "control-state-reachability"):
        if analysis == "coverability":
            if query.target is None:
                raise UsageError("coverability needs a target configuration")
            res = backward_coverability(model, query.target, budget_basis=query.budget_basis)
        else:
            if query.state is None:
                raise UsageError("control-state reachability needs a state")
            res = control_state_reachability(model, query.state, budget_basis=query.budget_basis)
        report = Report(
            analysis,
            name,
            res.verdict,
            model.order.name,
            _stats(res.iterations, len(res.basis.elements), res.explored),
            basis=[_config_json(c) for c in res.basis.elements],
        )
        if res.witness is not None:
            report.witness = list(res.witness)
        return report

    if analysis == "termination":
        res = termination(model, budget_states=query.budget_states)
        report = Report(
            analysis,
            name,
            "terminates" if res.terminates else "does-not-terminate",
            model.order.name,
            _stats(res.tree.expanded, 0, len(res.tree.nodes)),
        )
        if res.witness is not None:
            report.counterexample = {
                "prefix": list(res.witness.prefix),
                "pump": list(res.witness.pump),
            }
        return report

    if analysis == "boundedness":
        res = boundedness(model, budget_states=query.budget_states)
        report = Report(
            analysis,
            name,
            "bounded" if res.bounded else "unbounded",
            model.order.name,
            _stats(res.tree.expanded, 0, len(res.tree.nodes)),
        )
        if res.witness is not None:
            report.counterexample = {
                "prefix": list(res.witness.prefix),
                "pump": list(res.witness.pump),
            }
        return report

    if analysis == "karp-miller":
        res = karp_miller(model, budget_states=query.budget_states)
        report = Report(
            analysis,
            name,
            "completed",
            "omega-dickson-product",
            _stats(res.expanded, len(res.clover), len(res.nodes)),
            clover=[_config_json(c) for c in res.clover],
        )
        report.attachments["dot"] = km_to_dot(res)
        return report

    if analysis == "check-monotonicity":
        pcm = _as_pcm(model)
        ordering = query.ordering if query.ordering is not None else dickson_ordering(pcm.dimension)
        verdict = check_strong_monotonicity(pcm, ordering, query.kind, node_budget=query.node_budget)
        if verdict.holds is None:
            word, code = "inconclusive", 4
        elif verdict.holds:
            word, code = "monotone", 0
        else:
            word, code = "not-monotone", 0
        report = Report(
            analysis,
            name,
            word,
            format_formula(ordering),
            _stats(verdict.sentences_checked, 0, 0),
            exit_code=code,
        )
        if verdict.counterexample is not None:
            report.counterexample = {
                k: list(v) if isinstance(v, tuple) else v
                for k, v in verdict.counterexample.items()
            }
        elif verdict.note:
            report.counterexample = {"note": verdict.note}
        return report

    if analysis == "find-ordering":
        pcm = _as_pcm(model)
        res = find_structuring_ordering(
            pcm, budget=query.budget, kind=query.kind, node_budget=query.node_budget
        )
        stats = _stats(res.stats.get("checked", 0), 0, 0, **res.stats)
        if res.ordering is not None:
            return Report(analysis, name, "found", format_formula(res.ordering), stats)
        return Report(analysis, name, "not-found", "", stats, exit_code=4)

    if analysis == "abstract":
        out, areport = _abstract(model, query.mode)
        report = Report(
            analysis,
            name,
            "abstracted",
            out.order.name,
            _stats(0, 0, len(out.transitions)),
        )
        text = model_to_dsl(out)
        report.extras["mapping"] = dict(sorted(areport.mapping.items()))
        report.extras["notes"] = areport.notes
        report.extras["transform"] = areport.transform
        report.extras["model_text"] = text
        report.attachments["model_text"] = text
        return report

    raise UsageError(f"unknown analysis {analysis!r}")


def _as_pcm(model):
    if model.kind == "pcm":
        return model
    if model.kind == "vass":
        return vass_to_pcm(model)
    if model.kind == "counter":
        return counter_machine_to_pcm(model)
    raise UnsupportedAnalysisError(
        f"monotonicity analyses need counter-style models, not {model.kind}"
    )


def _abstract(model, mode):
    if mode is None:
        raise UsageError("abstract needs a mode")
    if model.kind == "counter" and mode == "drop-zero":
        return drop_zero_tests(model)
    if model.kind == "counter" and mode == "reset":
        return zero_tests_to_resets(model)
    if model.kind == "vass" and mode in ("drop-zero", "reset"):
        # Already in the target class: re-abstraction is the identity.
        mapping = {t.tid: t.tid for t in model.transitions}
        return model, AbstractionReport(model.name, mode, mapping, "model has no zero tests")
    if model.kind == "lcs" and mode == "lossy":
        out = lossy_abstraction(model)
        mapping = {t.tid: t.tid for t in model.transitions}
        return out, AbstractionReport(model.name, "lossy", mapping, "semantics read as lossy")
    raise UnsupportedAnalysisError(f"abstraction mode {mode!r} does not apply to a {model.kind} model")


def emit_report(report: Report, fmt: str) -> bytes:
    if fmt == "json":
        return _emit_json(report)
    if fmt == "text":
        return _emit_text(report)
    if fmt == "dot":
        dot = report.attachments.get("dot")
        if dot is None:
            raise UsageError(f"dot output is not defined for {report.analysis}")
        return dot.encode()
    raise UsageError(f"unknown format {fmt!r}")


def _emit_json(report: Report) -> bytes:
    payload = {
        "analysis": report.analysis,
        "model": report.model,
        "verdict": report.verdict,
        "ordering": report.ordering,
        "stats": report.stats,
        "timing_ms": report.timing_ms,
    }
    if report.witness is not None:
        payload["witness"] = report.witness
    if report.basis is not None:
        payload["basis"] = report.basis
    if report.clover is not None:
        payload["clover"] = report.clover
    if report.counterexample is not None:
        payload["counterexample"] = report.counterexample
    payload.update(report.extras)
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode()


def _payload_text(entry) -> str:
    if isinstance(entry, dict):
        inner = ",".join(str(v) for v in entry["payload"])
        return f"{entry['state']} ({inner})"
    return str(entry)


def _emit_text(report: Report) -> bytes:
    if report.analysis == "abstract":
        text = f"# {report.extras.get('transform', '')}: {report.extras.get('notes', '')}\n"
        return (text + report.attachments["model_text"]).encode()
    lines = [
        f"analysis: {report.analysis}",
        f"model: {report.model}",
        f"verdict: {report.verdict}",
    ]
    if report.ordering:
        lines.append(f"ordering: {report.ordering}")
    if report.witness is not None:
        lines.append("witness: " + (" ".join(report.witness) or "(empty)"))
    if report.basis is not None:
        lines.append("basis:")
        lines.extend(f"  {_payload_text(e)}" for e in report.basis)
    if report.clover is not None:
        lines.append("clover:")
        lines.extend(f"  {_payload_text(e)}" for e in report.clover)
    if report.counterexample is not None:
        lines.append("counterexample:")
        lines.extend(f"  {k}: {v}" for k, v in sorted(report.counterexample.items()))
    if "oracle" in report.extras:
        o = report.extras["oracle"]
        lines.append(
            f"oracle: cutoff={o['cutoff']} conclusive={o['conclusive']} reachable={o['reachable']}"
        )
    stats = " ".join(f"{k}={v}" for k, v in report.stats.items())
    lines.append(f"stats: {stats}")
    lines.append(f"time: {report.timing_ms} ms")
    return ("\n".join(lines) + "\n").encode()
