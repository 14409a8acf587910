"""Support-level state machine and per-level teaching directives.

Three support levels fade as the learner demonstrates mastery and are
reinstated on breakdown. All functions are pure over immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .domain import (
    Assessment,
    Familiarity,
    LearnerProfile,
    PlanStep,
    Role,
    ScaffoldLevel,
    StepStatus,
    Verdict,
)

PHASE_LABELS: Mapping[ScaffoldLevel, str] = {
    ScaffoldLevel.HIGH_SUPPORT: "I Do",
    ScaffoldLevel.GUIDED: "We Do",
    ScaffoldLevel.LOW: "You Do",
}

_STRATEGY_TEXT: Mapping[ScaffoldLevel, str] = {
    ScaffoldLevel.HIGH_SUPPORT: (
        "Teach by direct instruction. Explicitly define every core concept, "
        "model the reasoning process step by step, and establish the foundational "
        "knowledge base before any tactics, keeping cognitive load low. Finish by "
        "posing one short comprehension question about what you just taught."
    ),
    ScaffoldLevel.GUIDED: (
        "Teach by collaborative inquiry. Offer strategic hints, partial templates, "
        "and guiding questions that prompt the learner to bridge the logical gaps "
        "with your assistance; confirm what they already got right instead of "
        "re-explaining it. Finish with a guiding question they should answer."
    ),
    ScaffoldLevel.LOW: (
        "Withdraw scaffolding. Pose open-ended scenarios and complex challenges that "
        "require the learner to synthesize concepts and apply them independently; "
        "do not pre-structure the solution for them."
    ),
}


@dataclass(frozen=True)
class ScaffoldDirective:
    """How to teach at one support level; injected into the system prompt."""

    level: ScaffoldLevel
    phase_label: str
    strategy_text: str
    require_check: bool


_DIRECTIVES: Mapping[ScaffoldLevel, ScaffoldDirective] = {
    level: ScaffoldDirective(
        level=level,
        phase_label=PHASE_LABELS[level],
        strategy_text=_STRATEGY_TEXT[level],
        require_check=level is not ScaffoldLevel.LOW,
    )
    for level in ScaffoldLevel
}

# Roles assumed to bring domain or pedagogy background; they skip the
# highest support tier unless the policy says otherwise.
_DEFAULT_INITIAL_BY_ROLE: Mapping[Role, ScaffoldLevel] = {
    Role.STUDENT: ScaffoldLevel.HIGH_SUPPORT,
    Role.OTHER: ScaffoldLevel.HIGH_SUPPORT,
    Role.OFFICER: ScaffoldLevel.GUIDED,
    Role.LEGAL: ScaffoldLevel.GUIDED,
    Role.EDUCATOR: ScaffoldLevel.GUIDED,
}


@dataclass(frozen=True)
class ScaffoldPolicy:
    """Tunable thresholds for fading and reinstatement.

    fade_on_mastered: step support down one level after a Mastered verdict.
    reset_after_struggling: consecutive Struggling verdicts that force a
      jump straight back to HighSupport.
    initial_by_role: starting level per learner role (familiarity Frequent
      caps the start at Guided regardless of role).
    """

    fade_on_mastered: bool = True
    reset_after_struggling: int = 2
    initial_by_role: Mapping[Role, ScaffoldLevel] = field(
        default_factory=lambda: dict(_DEFAULT_INITIAL_BY_ROLE)
    )


DEFAULT_POLICY = ScaffoldPolicy()

_ORDER = (ScaffoldLevel.LOW, ScaffoldLevel.GUIDED, ScaffoldLevel.HIGH_SUPPORT)


def _step_down(level: ScaffoldLevel) -> ScaffoldLevel:
    return _ORDER[max(level.support_rank() - 1, 0)]


def _step_up(level: ScaffoldLevel) -> ScaffoldLevel:
    return _ORDER[min(level.support_rank() + 1, 2)]


def initial_level(
    profile: LearnerProfile,
    step: PlanStep,
    policy: ScaffoldPolicy = DEFAULT_POLICY,
) -> ScaffoldLevel:
    """Starting support level for a learner beginning the given active step."""
    if step.status is not StepStatus.ACTIVE:
        raise ValueError(f"initial_level requires an Active step, got {step.status.value}")
    level = policy.initial_by_role.get(profile.role, ScaffoldLevel.HIGH_SUPPORT)
    if profile.familiarity is Familiarity.FREQUENT and level is ScaffoldLevel.HIGH_SUPPORT:
        level = ScaffoldLevel.GUIDED
    return level


def next_level(
    current: ScaffoldLevel,
    history: Sequence[Assessment],
    policy: ScaffoldPolicy = DEFAULT_POLICY,
) -> ScaffoldLevel:
    """Support level for the next turn, given the assessment history.

    The last history element is the assessment of the turn just completed.
    Moves are bounded to one level per turn, except that
    ``policy.reset_after_struggling`` consecutive Struggling verdicts jump
    straight back to HighSupport.
    """
    if not history:
        raise ValueError("next_level requires a non-empty assessment history")
    last = history[-1].verdict
    if last is Verdict.MASTERED:
        return _step_down(current) if policy.fade_on_mastered else current
    if last is Verdict.PARTIAL:
        return current
    # Struggling: reinstate support.
    run = 0
    for assessment in reversed(history):
        if assessment.verdict is not Verdict.STRUGGLING:
            break
        run += 1
    if run >= policy.reset_after_struggling:
        return ScaffoldLevel.HIGH_SUPPORT
    return _step_up(current)


def directive_for(level: ScaffoldLevel) -> ScaffoldDirective:
    """The fixed teaching directive for a support level. Pure and total."""
    return _DIRECTIVES[level]


__all__ = [
    "PHASE_LABELS",
    "ScaffoldDirective",
    "ScaffoldPolicy",
    "DEFAULT_POLICY",
    "initial_level",
    "next_level",
    "directive_for",
]
