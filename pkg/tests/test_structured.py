from __future__ import annotations

import json

import pytest

from tutor_engine.domain import Intent, Verdict, validate_plan
from tutor_engine.gateway import (
    PromptBundle,
    SchemaId,
    SchemaViolation,
    ScriptedProvider,
    StructuredRequest,
    complete_structured,
)
from tutor_engine.gateway.structured import extract_json

from conftest import rules


def request_for(provider_text: str, schema_id: SchemaId):
    provider = ScriptedProvider(rules(("*", provider_text)))
    req = StructuredRequest(
        bundle=PromptBundle(system_text="task", messages=(("user", "go"),)),
        schema_id=schema_id,
    )
    return provider, req


FIVE_STEP_PLAN = {
    "topic": "Malware Defense",
    "steps": [
        {"title": "Definitions & Vectors", "objective": "Know the categories."},
        {"title": "Baseline Hygiene", "objective": "Patch and back up."},
        {"title": "Anti-malware Tools", "objective": "Operate the tooling."},
        {"title": "Layered Defenses", "objective": "Stack the controls."},
        {"title": "Incident Response", "objective": "Respond and preserve evidence."},
    ],
}


def test_plan_document_decodes_to_valid_plan():
    provider, req = request_for(json.dumps(FIVE_STEP_PLAN), SchemaId.PLAN)
    plan = complete_structured(provider, req)
    assert validate_plan(plan) == []
    assert [s.title for s in plan.steps] == [s["title"] for s in FIVE_STEP_PLAN["steps"]]
    assert plan.steps[0].status.value == "Active"
    assert all(s.status.value == "Pending" for s in plan.steps[1:])


def test_plan_with_permuted_indices_is_reindexed_in_array_order():
    doc = {
        "topic": "T",
        "steps": [
            {"index": 3, "title": "A", "objective": "a"},
            {"index": 1, "title": "B", "objective": "b"},
            {"index": 2, "title": "C", "objective": "c"},
        ],
    }
    provider, req = request_for(json.dumps(doc), SchemaId.PLAN)
    plan = complete_structured(provider, req)
    assert [(s.index, s.title) for s in plan.steps] == [(1, "A"), (2, "B"), (3, "C")]
    assert validate_plan(plan) == []


def test_two_step_plan_cites_the_minimum():
    doc = {"topic": "T", "steps": FIVE_STEP_PLAN["steps"][:2]}
    provider, req = request_for(json.dumps(doc), SchemaId.PLAN)
    with pytest.raises(SchemaViolation) as err:
        complete_structured(provider, req)
    assert any("count 2 below minimum 3" in v for v in err.value.violations)


def test_malformed_text_twice_raises_schema_violation():
    provider, req = request_for("this is not json at all", SchemaId.PLAN)
    with pytest.raises(SchemaViolation):
        complete_structured(provider, req)


def test_repair_round_fixes_first_bad_reply():
    provider = ScriptedProvider(
        rules(("*", "garbage"), once=True)
        + rules(("*", json.dumps(FIVE_STEP_PLAN)))
    )
    req = StructuredRequest(
        bundle=PromptBundle(system_text="task", messages=(("user", "go"),)),
        schema_id=SchemaId.PLAN,
    )
    plan = complete_structured(provider, req)
    assert validate_plan(plan) == []


def test_repair_prompt_carries_the_violations():
    seen: list[str] = []

    class Spy:
        def complete(self, bundle):
            seen.append(bundle.flat_text())
            from tutor_engine.gateway import Completion

            return Completion(text="not json")

    with pytest.raises(SchemaViolation):
        complete_structured(
            Spy(),
            StructuredRequest(
                bundle=PromptBundle(system_text="task", messages=(("user", "go"),)),
                schema_id=SchemaId.INTENT,
            ),
        )
    assert len(seen) == 2
    assert "not parseable as JSON" in seen[1]


def test_assessment_decodes():
    doc = {"verdict": "Mastered", "gaps": ["Worms", "Rootkits"], "rationale": "ok"}
    provider, req = request_for(json.dumps(doc), SchemaId.ASSESSMENT)
    assessment = complete_structured(provider, req)
    assert assessment.verdict is Verdict.MASTERED
    assert assessment.gaps == ("Worms", "Rootkits")


def test_assessment_bad_verdict_is_schema_violation():
    provider, req = request_for(json.dumps({"verdict": "Sorta"}), SchemaId.ASSESSMENT)
    with pytest.raises(SchemaViolation) as err:
        complete_structured(provider, req)
    assert any("verdict" in v for v in err.value.violations)


def test_intent_decodes():
    provider, req = request_for(json.dumps({"intent": "OffTopic"}), SchemaId.INTENT)
    assert complete_structured(provider, req) is Intent.OFF_TOPIC


def test_extract_json_tolerates_code_fences_and_prose():
    assert extract_json('```json\n{"a": 1}\n```') == {"a": 1}
    assert extract_json('Sure! Here it is: {"a": 1} hope that helps') == {"a": 1}
    assert extract_json('{"a": 1}') == {"a": 1}
