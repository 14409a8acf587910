"""Structured-output contract: parse completions into domain values.

Each schema maps a JSON document to a validated domain value. On a parse or
validation failure the call is repaired once (re-prompted with the errors
appended); a second failure raises SchemaViolation with the field-level
messages.
"""

from __future__ import annotations

import json
from typing import Any, Callable

from ..domain import (
    Assessment,
    Intent,
    LearningPlan,
    PlanStep,
    StepStatus,
    Verdict,
    new_id,
    validate_plan,
)
from .types import Provider, PromptBundle, SchemaId, SchemaViolation, StructuredRequest

REPAIR_INSTRUCTION = (
    "Your previous reply was not a valid JSON document for this task. "
    "Problems: {errors}. Reply again with ONLY the corrected JSON document, "
    "no prose, no code fences."
)


def extract_json(text: str) -> Any:
    """Pull a JSON document out of completion text (tolerates code fences
    and surrounding prose)."""
    candidate = text.strip()
    if candidate.startswith("```"):
        lines = candidate.split("\n")
        body = [ln for ln in lines[1:] if not ln.strip().startswith("```")]
        candidate = "\n".join(body).strip()
    try:
        return json.loads(candidate)
    except json.JSONDecodeError:
        pass
    start = candidate.find("{")
    end = candidate.rfind("}")
    if start != -1 and end > start:
        return json.loads(candidate[start : end + 1])
    raise json.JSONDecodeError("no JSON object found", candidate, 0)


def decode_plan(doc: Any) -> LearningPlan:
    """Build a LearningPlan from {topic, steps:[{title, objective}]}.

    Steps are re-indexed 1..n in array order (any provided indices are
    ignored); the first step starts Active, the rest Pending. The result
    must pass every plan invariant.
    """
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise SchemaViolation(["document: expected a JSON object"])
    topic = doc.get("topic")
    if not isinstance(topic, str) or not topic.strip():
        errors.append("topic: must be a non-empty string")
        topic = ""
    raw_steps = doc.get("steps")
    if not isinstance(raw_steps, list):
        errors.append("steps: must be an array")
        raw_steps = []
    steps: list[PlanStep] = []
    for i, raw in enumerate(raw_steps):
        if not isinstance(raw, dict):
            errors.append(f"steps[{i}]: must be an object")
            continue
        title = raw.get("title")
        objective = raw.get("objective")
        if not isinstance(title, str):
            errors.append(f"steps[{i}].title: must be a string")
            title = ""
        if not isinstance(objective, str):
            errors.append(f"steps[{i}].objective: must be a string")
            objective = ""
        steps.append(
            PlanStep(
                index=i + 1,
                title=title.strip(),
                objective=objective.strip(),
                status=StepStatus.ACTIVE if i == 0 else StepStatus.PENDING,
            )
        )
    plan = LearningPlan(
        plan_id=new_id(),
        topic=topic.strip(),
        steps=tuple(steps),
        created_turn=0,
        revision=0,
    )
    errors.extend(validate_plan(plan))
    if errors:
        raise SchemaViolation(errors)
    return plan


def decode_assessment(doc: Any) -> Assessment:
    if not isinstance(doc, dict):
        raise SchemaViolation(["document: expected a JSON object"])
    errors: list[str] = []
    verdict_raw = doc.get("verdict")
    verdict = None
    try:
        verdict = Verdict(verdict_raw)
    except ValueError:
        errors.append(
            f"verdict: must be one of {[v.value for v in Verdict]}, got {verdict_raw!r}"
        )
    gaps_raw = doc.get("gaps", [])
    if not isinstance(gaps_raw, list) or not all(isinstance(g, str) for g in gaps_raw):
        errors.append("gaps: must be an array of strings")
        gaps_raw = []
    rationale = doc.get("rationale", "")
    if not isinstance(rationale, str):
        errors.append("rationale: must be a string")
        rationale = ""
    if errors:
        raise SchemaViolation(errors)
    assert verdict is not None
    return Assessment(verdict=verdict, gaps=tuple(gaps_raw), rationale=rationale)


def decode_intent(doc: Any) -> Intent:
    if not isinstance(doc, dict):
        raise SchemaViolation(["document: expected a JSON object"])
    raw = doc.get("intent")
    try:
        return Intent(raw)
    except ValueError:
        raise SchemaViolation(
            [f"intent: must be one of {[i.value for i in Intent]}, got {raw!r}"]
        ) from None


_DECODERS: dict[SchemaId, Callable[[Any], Any]] = {
    SchemaId.PLAN: decode_plan,
    SchemaId.ASSESSMENT: decode_assessment,
    SchemaId.INTENT: decode_intent,
}


def _parse(text: str, schema_id: SchemaId) -> Any:
    try:
        doc = extract_json(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation([f"document: not parseable as JSON ({exc.msg})"]) from exc
    return _DECODERS[schema_id](doc)


def complete_structured(provider: Provider, req: StructuredRequest) -> Any:
    """Run the completion and decode it; one repair round, then hard failure."""
    completion = provider.complete(req.bundle)
    try:
        return _parse(completion.text, req.schema_id)
    except SchemaViolation as first:
        repair = req.bundle.appended("assistant", completion.text).appended(
            "user", REPAIR_INSTRUCTION.format(errors="; ".join(first.violations))
        )
        retry = provider.complete(repair)
        try:
            return _parse(retry.text, req.schema_id)
        except SchemaViolation as second:
            raise SchemaViolation(second.violations) from first
