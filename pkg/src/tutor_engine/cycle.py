"""The Think–Plan–Act turn orchestrator.

Each turn runs: intent classification (Think), plan creation/adaptation
(Plan), grounding retrieval (Retrieve), and scaffolded response generation
(Act). The orchestrator holds no per-session state: everything flows
through SessionState in and out, and a turn either fully succeeds or
leaves the session value untouched.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

from .domain import (
    Assessment,
    Intent,
    LearnerProfile,
    LearningPlan,
    PendingCheck,
    PlanStep,
    ScaffoldLevel,
    SessionState,
    StepStatus,
    TurnRecord,
    Verdict,
    derived_id,
    validate_plan,
)
from .gateway import (
    DEFAULT_TEACHING_TEMPERATURE,
    GatewayError,
    PromptBundle,
    Provider,
    SchemaId,
    SchemaViolation,
    StructuredRequest,
    complete_structured,
)
from .prompts import (
    assessment_bundle,
    extract_check,
    history_messages,
    intent_bundle,
    plan_bundle,
    teaching_system_text,
)
from .rag import Embedder, GroundingContext, VectorIndex, build_context
from .scaffolding import (
    DEFAULT_POLICY,
    ScaffoldDirective,
    ScaffoldPolicy,
    directive_for,
    initial_level,
    next_level,
)

REMEDIAL_TITLE_PREFIX = "Remediation: "
MAX_REMEDIAL_PER_STEP = 2
REASK_PREFIX = "Let's revisit the check once more. "


class InputError(ValueError):
    """Unusable user input (empty message, empty topic)."""


class PlanGenerationFailed(Exception):
    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations) or "plan generation failed")
        self.violations = violations


class AssessmentFailed(Exception):
    """The assessment call failed; the caller holds level and re-asks."""


class PlanAction(str, Enum):
    CREATED = "Created"
    ADVANCED = "Advanced"
    ADVANCED_WITHIN_STEP = "AdvancedWithinStep"
    REVISED = "Revised"
    HELD = "Held"


@dataclass(frozen=True)
class CycleTrace:
    """Reified internal state of one turn, in Think→Plan→Retrieve→Act order."""

    intent: Intent
    plan_action: PlanAction
    retrieval_ids: tuple[str, ...]
    scaffold_decision: tuple[ScaffoldLevel, ScaffoldLevel]
    timings: dict[str, int]
    intent_fallback: bool = False
    assessment_failed: bool = False

    def to_dict(self) -> dict:
        return {
            "intent": self.intent.value,
            "plan_action": self.plan_action.value,
            "retrieval_ids": list(self.retrieval_ids),
            "scaffold_decision": [s.value for s in self.scaffold_decision],
            "timings": dict(self.timings),
            "intent_fallback": self.intent_fallback,
            "assessment_failed": self.assessment_failed,
        }


@dataclass(frozen=True)
class AgentResponse:
    response_id: str
    text: str
    citations: tuple[str, ...]
    plan_snapshot: Optional[LearningPlan]
    scaffold_used: ScaffoldLevel
    check: Optional[PendingCheck]
    trace: CycleTrace

    def to_dict(self) -> dict:
        return {
            "response_id": self.response_id,
            "text": self.text,
            "citations": list(self.citations),
            "plan_snapshot": self.plan_snapshot.to_dict() if self.plan_snapshot else None,
            "scaffold_used": self.scaffold_used.value,
            "check": self.check.to_dict() if self.check else None,
            "trace": self.trace.to_dict(),
        }


def is_remedial(step: PlanStep) -> bool:
    return step.title.startswith(REMEDIAL_TITLE_PREFIX)


def _remedial_count_before(steps: tuple[PlanStep, ...], idx: int) -> int:
    count = 0
    for i in range(idx - 1, -1, -1):
        if is_remedial(steps[i]):
            count += 1
        else:
            break
    return count


def _activate_next_pending(steps: list[PlanStep], start: int) -> None:
    for i in range(start, len(steps)):
        if steps[i].status is StepStatus.PENDING:
            steps[i] = replace(steps[i], status=StepStatus.ACTIVE)
            return


def _reindexed(steps: list[PlanStep]) -> tuple[PlanStep, ...]:
    return tuple(replace(s, index=i + 1) for i, s in enumerate(steps))


def adapt_plan(
    plan: LearningPlan,
    assessment: Assessment,
    prior_history: tuple[Assessment, ...] = (),
) -> tuple[LearningPlan, PlanAction]:
    """Update the plan after an assessed answer.

    Mastered with no gaps completes the active step; Mastered with gaps holds
    the step and the gaps become the next sub-focus; Partial holds; a second
    consecutive Struggling inserts a remedial step before the active one
    (capped at MAX_REMEDIAL_PER_STEP per original step, after which the step
    is deferred and the next pending step activates). Completed steps are
    never touched; the revision counter increments exactly when the action is
    Revised.
    """
    active = plan.active_step()
    if active is None:
        raise ValueError("adapt_plan requires a plan with an Active step")
    steps = list(plan.steps)
    active_idx = steps.index(active)

    if assessment.verdict is Verdict.MASTERED and not assessment.gaps:
        steps[active_idx] = replace(active, status=StepStatus.COMPLETED)
        _activate_next_pending(steps, active_idx + 1)
        return replace(plan, steps=tuple(steps)), PlanAction.ADVANCED

    if assessment.verdict is Verdict.MASTERED:
        return plan, PlanAction.ADVANCED_WITHIN_STEP

    if assessment.verdict is Verdict.PARTIAL:
        return plan, PlanAction.HELD

    # Struggling.
    prev = prior_history[-1].verdict if prior_history else None
    if prev is not Verdict.STRUGGLING:
        return plan, PlanAction.HELD

    # Two consecutive Struggling verdicts: remediate or defer.
    original_idx = active_idx
    while is_remedial(steps[original_idx]):
        original_idx += 1
    if _remedial_count_before(tuple(steps), original_idx) >= MAX_REMEDIAL_PER_STEP:
        for i in range(active_idx, original_idx + 1):
            if steps[i].status is not StepStatus.COMPLETED:
                steps[i] = replace(steps[i], status=StepStatus.DEFERRED)
        _activate_next_pending(steps, original_idx + 1)
        return (
            replace(plan, steps=_reindexed(steps), revision=plan.revision + 1),
            PlanAction.REVISED,
        )

    focus = "; ".join(assessment.gaps) if assessment.gaps else "the core concepts"
    remedial = PlanStep(
        index=active.index,
        title=REMEDIAL_TITLE_PREFIX + steps[original_idx].title,
        objective=f"Rebuild the foundations before retrying: {focus}",
        status=StepStatus.ACTIVE,
    )
    steps[active_idx] = replace(active, status=StepStatus.PENDING)
    steps.insert(active_idx, remedial)
    return (
        replace(plan, steps=_reindexed(steps), revision=plan.revision + 1),
        PlanAction.REVISED,
    )


class Clock:
    """Time source; swap in a fixed clock for deterministic replays."""

    def now_ms(self) -> int:
        return int(time.time() * 1000)

    def perf_ms(self) -> int:
        return int(time.perf_counter() * 1000)


class FixedClock(Clock):
    """Deterministic clock: wall time steps by a fixed amount per reading,
    monotonic time stays at zero (all phase durations collapse to 0)."""

    def __init__(self, start_ms: int = 0, step_ms: int = 1000) -> None:
        self._now = start_ms
        self._step = step_ms

    def now_ms(self) -> int:
        value = self._now
        self._now += self._step
        return value

    def perf_ms(self) -> int:
        return 0


@dataclass
class EngineConfig:
    retrieval_k: int = 4
    context_budget: int = 4000
    history_window: int = 12


class TutorEngine:
    """Stateless turn processor; all dependencies are injected.

    ``index_source`` returns the current retrieval index (or None before any
    ingestion) so the owner can swap indexes atomically under its own lock.
    ``response_text_for`` resolves a past response id to its text for the
    prompt history window.
    """

    def __init__(
        self,
        provider: Provider,
        embedder: Embedder,
        persona: str,
        index_source: Callable[[], Optional[VectorIndex]] = lambda: None,
        response_text_for: Callable[[str], Optional[str]] = lambda _rid: None,
        policy: ScaffoldPolicy = DEFAULT_POLICY,
        config: EngineConfig | None = None,
        clock: Clock | None = None,
    ) -> None:
        if not persona.strip():
            raise ValueError("persona preamble must be non-empty")
        self.provider = provider
        self.embedder = embedder
        self.persona = persona.strip()
        self.index_source = index_source
        self.response_text_for = response_text_for
        self.policy = policy
        self.config = config or EngineConfig()
        self.clock = clock or Clock()

    # ----------------------------------------------------------------- think
    def classify_intent(self, session: SessionState, message: str) -> Intent:
        intent, _ = self._classify_intent(session, message)
        return intent

    def _classify_intent(self, session: SessionState, message: str) -> tuple[Intent, bool]:
        bundle = intent_bundle(self.persona, session.pending_check, message)
        try:
            intent = complete_structured(
                self.provider, StructuredRequest(bundle=bundle, schema_id=SchemaId.INTENT)
            )
        except (GatewayError, SchemaViolation):
            fallback = (
                Intent.RESPONSE_TO_SCAFFOLD
                if session.pending_check is not None
                else Intent.NEW_INQUIRY
            )
            return fallback, True
        if intent is Intent.RESPONSE_TO_SCAFFOLD and session.pending_check is None:
            return Intent.NEW_INQUIRY, False
        return intent, False

    # ------------------------------------------------------------------ plan
    def generate_plan(self, topic: str, profile: LearnerProfile) -> LearningPlan:
        if not topic.strip():
            raise InputError("plan topic must be non-empty")
        try:
            return complete_structured(
                self.provider,
                StructuredRequest(
                    bundle=plan_bundle(self.persona, topic, profile),
                    schema_id=SchemaId.PLAN,
                ),
            )
        except SchemaViolation:
            pass
        try:
            return complete_structured(
                self.provider,
                StructuredRequest(
                    bundle=plan_bundle(self.persona, topic, profile, strict=True),
                    schema_id=SchemaId.PLAN,
                ),
            )
        except SchemaViolation as exc:
            raise PlanGenerationFailed(exc.violations) from exc

    def assess_response(self, check: PendingCheck, message: str) -> Assessment:
        bundle = assessment_bundle(self.persona, check, message)
        try:
            return complete_structured(
                self.provider,
                StructuredRequest(bundle=bundle, schema_id=SchemaId.ASSESSMENT),
            )
        except (GatewayError, SchemaViolation) as exc:
            raise AssessmentFailed(str(exc)) from exc

    # -------------------------------------------------------------- retrieve
    def _retrieve(
        self, plan: Optional[LearningPlan], message: str
    ) -> tuple[tuple[str, ...], GroundingContext]:
        index = self.index_source()
        if index is None or len(index) == 0:
            return (), GroundingContext(text="", chunk_ids=())
        active = plan.active_step() if plan else None
        query_text = f"{active.objective}\n{message}" if active else message
        hits = index.search(self.embedder.embed(query_text), k=self.config.retrieval_k)
        context = build_context(
            hits, lambda cid: index.chunk(cid).text, self.config.context_budget
        )
        return tuple(h.chunk_id for h in hits), context

    # ------------------------------------------------------------------- act
    def compose(
        self,
        directive: ScaffoldDirective,
        context: GroundingContext,
        session: SessionState,
        user_message: str,
    ) -> PromptBundle:
        plan = session.plan
        active = plan.active_step() if plan else None
        system_text = teaching_system_text(
            self.persona,
            directive,
            context,
            active_step=active,
            step_count=len(plan.steps) if plan else 0,
        )
        return PromptBundle(
            system_text=system_text,
            messages=history_messages(
                session.turns,
                self.response_text_for,
                self.config.history_window,
                user_message,
            ),
            temperature=DEFAULT_TEACHING_TEMPERATURE,
        )

    # ------------------------------------------------------------- full turn
    def handle_turn(
        self, session: SessionState, user_message: str
    ) -> tuple[AgentResponse, SessionState]:
        message = user_message.strip()
        if not message:
            raise InputError("user message must be non-empty")

        turn_index = session.next_turn_index()
        timings: dict[str, int] = {}
        t0 = self.clock.perf_ms()

        intent, intent_fallback = self._classify_intent(session, message)
        timings["think"] = max(self.clock.perf_ms() - t0, 0)

        t1 = self.clock.perf_ms()
        plan = session.plan
        scaffold = session.scaffold
        pending_check = session.pending_check
        assessment: Optional[Assessment] = None
        plan_action = PlanAction.HELD
        assessment_failed = False

        if intent is Intent.NEW_INQUIRY:
            generated = self.generate_plan(message, session.learner)
            plan = replace(
                generated,
                plan_id=derived_id("plan", session.session_id, str(turn_index)),
                created_turn=turn_index,
            )
            active = plan.active_step()
            assert active is not None
            scaffold = initial_level(session.learner, active, self.policy)
            pending_check = None
            plan_action = PlanAction.CREATED
        elif intent is Intent.RESPONSE_TO_SCAFFOLD:
            assert pending_check is not None  # classifier guarantees
            try:
                assessment = self.assess_response(pending_check, message)
            except AssessmentFailed:
                assessment_failed = True
            if assessment is not None:
                assert plan is not None  # pending_check implies plan
                plan, plan_action = adapt_plan(
                    plan, assessment, session.assessment_history
                )
                scaffold = next_level(
                    scaffold,
                    (*session.assessment_history, assessment),
                    self.policy,
                )
                pending_check = None
        timings["plan"] = max(self.clock.perf_ms() - t1, 0)

        t2 = self.clock.perf_ms()
        if assessment_failed:
            retrieval_ids: tuple[str, ...] = ()
            context = GroundingContext(text="", chunk_ids=())
        else:
            retrieval_ids, context = self._retrieve(plan, message)
        timings["retrieve"] = max(self.clock.perf_ms() - t2, 0)

        t3 = self.clock.perf_ms()
        directive = directive_for(scaffold)
        new_check = pending_check
        if assessment_failed:
            assert pending_check is not None
            display_text = REASK_PREFIX + pending_check.question
            citations: tuple[str, ...] = ()
        else:
            bundle = self.compose(directive, context, session, message)
            completion = self.provider.complete(bundle)
            display_text, question, concepts = extract_check(completion.text)
            citations = context.chunk_ids
            new_check = self._next_check(
                intent, directive, plan, question, concepts, assessment, pending_check
            )
        timings["act"] = max(self.clock.perf_ms() - t3, 0)

        response_id = derived_id("response", session.session_id, str(turn_index))
        trace = CycleTrace(
            intent=intent,
            plan_action=plan_action,
            retrieval_ids=retrieval_ids,
            scaffold_decision=(session.scaffold, scaffold),
            timings=timings,
            intent_fallback=intent_fallback,
            assessment_failed=assessment_failed,
        )
        response = AgentResponse(
            response_id=response_id,
            text=display_text,
            citations=citations,
            plan_snapshot=plan,
            scaffold_used=scaffold,
            check=new_check,
            trace=trace,
        )
        record = TurnRecord(
            turn_index=turn_index,
            user_message=message,
            intent=intent,
            scaffold_used=scaffold,
            agent_response_id=response_id,
            citations=citations,
            timestamp=self.clock.now_ms(),
        )
        new_session = replace(
            session,
            turns=session.turns + (record,),
            plan=plan,
            scaffold=scaffold,
            pending_check=new_check,
            assessment_history=(
                session.assessment_history + (assessment,)
                if assessment is not None
                else session.assessment_history
            ),
        )
        return response, new_session

    def _next_check(
        self,
        intent: Intent,
        directive: ScaffoldDirective,
        plan: Optional[LearningPlan],
        question: Optional[str],
        concepts: tuple[str, ...],
        assessment: Optional[Assessment],
        carried_check: Optional[PendingCheck],
    ) -> Optional[PendingCheck]:
        """Decide what comprehension check (if any) is pending after this turn."""
        if intent in (Intent.CLARIFICATION_REQUEST, Intent.OFF_TOPIC):
            # The learner stepped aside; any existing check stays pending.
            return carried_check
        if not directive.require_check or plan is None:
            return None
        active = plan.active_step()
        if active is None:
            return None
        if question is None:
            question = f"In your own words, explain: {active.objective}"
        if not concepts and assessment is not None and assessment.gaps:
            concepts = assessment.gaps
        return PendingCheck(
            question=question, step_index=active.index, expected_concepts=concepts
        )
