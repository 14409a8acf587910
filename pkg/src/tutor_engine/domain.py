"""Shared domain values for the tutoring engine.

Every type here is an immutable value: state changes are made by building
new instances (``dataclasses.replace``), never by mutation, so values are
safe to share across threads. Persistence and the HTTP layer speak the
dict forms produced by ``to_dict`` / ``from_dict``.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

MIN_PLAN_STEPS = 3
MAX_PLAN_STEPS = 9


class Role(str, Enum):
    STUDENT = "Student"
    OFFICER = "Officer"
    LEGAL = "Legal"
    EDUCATOR = "Educator"
    OTHER = "Other"


class Familiarity(str, Enum):
    NONE = "None"
    OCCASIONAL = "Occasional"
    FREQUENT = "Frequent"


class StepStatus(str, Enum):
    PENDING = "Pending"
    ACTIVE = "Active"
    COMPLETED = "Completed"
    DEFERRED = "Deferred"


class ScaffoldLevel(str, Enum):
    """Support level, totally ordered by support intensity (High > Guided > Low)."""

    HIGH_SUPPORT = "HighSupport"
    GUIDED = "Guided"
    LOW = "Low"

    def support_rank(self) -> int:
        """Rank on the support-intensity order: HighSupport=2, Guided=1, Low=0."""
        return _SUPPORT_RANK[self]


_SUPPORT_RANK = {
    ScaffoldLevel.HIGH_SUPPORT: 2,
    ScaffoldLevel.GUIDED: 1,
    ScaffoldLevel.LOW: 0,
}


class Intent(str, Enum):
    NEW_INQUIRY = "NewInquiry"
    RESPONSE_TO_SCAFFOLD = "ResponseToScaffold"
    CLARIFICATION_REQUEST = "ClarificationRequest"
    OFF_TOPIC = "OffTopic"


class Verdict(str, Enum):
    MASTERED = "Mastered"
    PARTIAL = "Partial"
    STRUGGLING = "Struggling"


def new_id() -> str:
    """A fresh opaque id: 128 random bits as lowercase hex."""
    return secrets.token_hex(16)


def derived_id(*parts: str) -> str:
    """A deterministic opaque id (128-bit lowercase hex) from the given parts.

    Used where replayability requires stable ids (responses, plans, chunks);
    the rendered form is indistinguishable from a random id.
    """
    h = hashlib.sha256("\x1f".join(parts).encode("utf-8"))
    return h.hexdigest()[:32]


@dataclass(frozen=True)
class LearnerProfile:
    learner_id: str
    role: Role
    familiarity: Familiarity

    def __post_init__(self) -> None:
        if not self.learner_id:
            raise ValueError("learner_id must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "learner_id": self.learner_id,
            "role": self.role.value,
            "familiarity": self.familiarity.value,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> LearnerProfile:
        return cls(
            learner_id=d["learner_id"],
            role=Role(d["role"]),
            familiarity=Familiarity(d["familiarity"]),
        )


@dataclass(frozen=True)
class PlanStep:
    index: int
    title: str
    objective: str
    status: StepStatus

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "title": self.title,
            "objective": self.objective,
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> PlanStep:
        return cls(
            index=d["index"],
            title=d["title"],
            objective=d["objective"],
            status=StepStatus(d["status"]),
        )


@dataclass(frozen=True)
class LearningPlan:
    """Ordered pedagogical steps; the agent's longitudinal goal structure."""

    plan_id: str
    topic: str
    steps: tuple[PlanStep, ...]
    created_turn: int
    revision: int = 0

    def active_step(self) -> Optional[PlanStep]:
        for step in self.steps:
            if step.status is StepStatus.ACTIVE:
                return step
        return None

    def is_complete(self) -> bool:
        """True once no step remains to work on (all Completed or Deferred)."""
        return all(
            s.status in (StepStatus.COMPLETED, StepStatus.DEFERRED) for s in self.steps
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "plan_id": self.plan_id,
            "topic": self.topic,
            "steps": [s.to_dict() for s in self.steps],
            "created_turn": self.created_turn,
            "revision": self.revision,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> LearningPlan:
        return cls(
            plan_id=d["plan_id"],
            topic=d["topic"],
            steps=tuple(PlanStep.from_dict(s) for s in d["steps"]),
            created_turn=d["created_turn"],
            revision=d["revision"],
        )


@dataclass(frozen=True)
class Assessment:
    verdict: Verdict
    gaps: tuple[str, ...] = ()
    rationale: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "gaps": list(self.gaps),
            "rationale": self.rationale,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Assessment:
        return cls(
            verdict=Verdict(d["verdict"]),
            gaps=tuple(d.get("gaps", ())),
            rationale=d.get("rationale", ""),
        )


@dataclass(frozen=True)
class PendingCheck:
    """The comprehension question currently awaiting the learner's answer."""

    question: str
    step_index: int
    expected_concepts: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "question": self.question,
            "step_index": self.step_index,
            "expected_concepts": list(self.expected_concepts),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> PendingCheck:
        return cls(
            question=d["question"],
            step_index=d["step_index"],
            expected_concepts=tuple(d.get("expected_concepts", ())),
        )


@dataclass(frozen=True)
class TurnRecord:
    turn_index: int
    user_message: str
    intent: Intent
    scaffold_used: ScaffoldLevel
    agent_response_id: str
    citations: tuple[str, ...]
    timestamp: int  # UTC epoch milliseconds

    def to_dict(self) -> dict[str, Any]:
        return {
            "turn_index": self.turn_index,
            "user_message": self.user_message,
            "intent": self.intent.value,
            "scaffold_used": self.scaffold_used.value,
            "agent_response_id": self.agent_response_id,
            "citations": list(self.citations),
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> TurnRecord:
        return cls(
            turn_index=d["turn_index"],
            user_message=d["user_message"],
            intent=Intent(d["intent"]),
            scaffold_used=ScaffoldLevel(d["scaffold_used"]),
            agent_response_id=d["agent_response_id"],
            citations=tuple(d["citations"]),
            timestamp=d["timestamp"],
        )


@dataclass(frozen=True)
class SessionState:
    """One learner's conversation: history, plan, scaffold and check state."""

    session_id: str
    learner: LearnerProfile
    turns: tuple[TurnRecord, ...] = ()
    plan: Optional[LearningPlan] = None
    scaffold: ScaffoldLevel = ScaffoldLevel.HIGH_SUPPORT
    pending_check: Optional[PendingCheck] = None
    assessment_history: tuple[Assessment, ...] = ()

    def next_turn_index(self) -> int:
        return len(self.turns)

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "learner": self.learner.to_dict(),
            "turns": [t.to_dict() for t in self.turns],
            "plan": self.plan.to_dict() if self.plan else None,
            "scaffold": self.scaffold.value,
            "pending_check": self.pending_check.to_dict() if self.pending_check else None,
            "assessment_history": [a.to_dict() for a in self.assessment_history],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> SessionState:
        return cls(
            session_id=d["session_id"],
            learner=LearnerProfile.from_dict(d["learner"]),
            turns=tuple(TurnRecord.from_dict(t) for t in d["turns"]),
            plan=LearningPlan.from_dict(d["plan"]) if d.get("plan") else None,
            scaffold=ScaffoldLevel(d["scaffold"]),
            pending_check=(
                PendingCheck.from_dict(d["pending_check"]) if d.get("pending_check") else None
            ),
            assessment_history=tuple(
                Assessment.from_dict(a) for a in d.get("assessment_history", ())
            ),
        )


def validate_plan(plan: LearningPlan) -> list[str]:
    """Check all LearningPlan invariants; return one message per violation.

    Total function: never raises, an empty list means the plan is valid.
    The single-Active rule applies while the plan is in progress (some step
    still Pending or Active); a terminal plan whose remaining steps are all
    Completed/Deferred has no Active step by design.
    """
    violations: list[str] = []
    n = len(plan.steps)
    if n < MIN_PLAN_STEPS:
        violations.append(f"steps: count {n} below minimum {MIN_PLAN_STEPS}")
    elif n > MAX_PLAN_STEPS:
        violations.append(f"steps: count {n} above maximum {MAX_PLAN_STEPS}")

    for i, step in enumerate(plan.steps):
        if step.index != i + 1:
            violations.append(
                f"steps[{i}].index: expected {i + 1}, got {step.index} (indices must be contiguous from 1)"
            )
        if not step.title.strip():
            violations.append(f"steps[{i}].title: must be non-empty")
        if not step.objective.strip():
            violations.append(f"steps[{i}].objective: must be non-empty")

    in_progress = any(
        s.status in (StepStatus.PENDING, StepStatus.ACTIVE) for s in plan.steps
    )
    active = sum(1 for s in plan.steps if s.status is StepStatus.ACTIVE)
    if in_progress and active != 1:
        violations.append(f"steps: expected exactly one Active step, found {active}")

    if plan.revision < 0:
        violations.append(f"revision: must be non-negative, got {plan.revision}")
    return violations


__all__ = [
    "MIN_PLAN_STEPS",
    "MAX_PLAN_STEPS",
    "Role",
    "Familiarity",
    "StepStatus",
    "ScaffoldLevel",
    "Intent",
    "Verdict",
    "new_id",
    "derived_id",
    "LearnerProfile",
    "PlanStep",
    "LearningPlan",
    "Assessment",
    "PendingCheck",
    "TurnRecord",
    "SessionState",
    "validate_plan",
]
