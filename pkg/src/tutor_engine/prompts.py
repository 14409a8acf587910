"""Prompt assembly for every call the cycle makes.

Each structured task opens with a fixed instruction phrase; scripted test
providers key their match rules on those phrases, and real providers simply
read them as instructions.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .domain import Intent, LearnerProfile, PendingCheck, PlanStep
from .gateway import (
    DEFAULT_STRUCTURED_TEMPERATURE,
    DEFAULT_TEACHING_TEMPERATURE,
    PromptBundle,
)
from .rag import GroundingContext
from .scaffolding import ScaffoldDirective

INTENT_TASK = "Classify the learner's intent."
PLAN_TASK = "Design a learning plan."
ASSESS_TASK = "Evaluate the learner's answer."

CHECK_MARKER = "Check for Understanding:"
CONCEPTS_OPEN = "[CONCEPTS:"

NO_CONTEXT_CLAUSE = (
    "No course materials were found for this request. Answer only from general "
    "pedagogy, and state plainly that course materials were not found."
)

CONTEXT_PREAMBLE = (
    "Ground your answer in the course material below. Each source is marked "
    "with its id. Cite the markers of the sources you actually use, and if the "
    "material does not contain the answer, say so instead of inventing one."
)

CHECK_INSTRUCTION = (
    "End your reply with exactly one short comprehension question on a line "
    f'starting "{CHECK_MARKER}", then a final line "{CONCEPTS_OPEN} ...]" '
    "listing the key concepts the answer should mention, separated by semicolons."
)


def intent_bundle(
    persona: str, pending_check: Optional[PendingCheck], message: str
) -> PromptBundle:
    values = ", ".join(i.value for i in Intent)
    lines = [
        persona,
        "",
        INTENT_TASK,
        f'Reply with ONLY a JSON object {{"intent": "<value>"}} where <value> is one of: {values}.',
        "ResponseToScaffold is valid only when a comprehension check is pending.",
    ]
    if pending_check is not None:
        lines.append(f"A comprehension check is pending: {pending_check.question}")
    else:
        lines.append("No comprehension check is pending.")
    return PromptBundle(
        system_text="\n".join(lines),
        messages=(("user", message),),
        temperature=DEFAULT_STRUCTURED_TEMPERATURE,
    )


def plan_bundle(persona: str, topic: str, profile: LearnerProfile, strict: bool = False) -> PromptBundle:
    lines = [
        persona,
        "",
        PLAN_TASK,
        "Decompose the learner's goal into an ordered pedagogical sequence: "
        "prerequisites first, then progressively advanced material.",
        f"The learner is a {profile.role.value} with {profile.familiarity.value.lower()} "
        "familiarity with this kind of tooling.",
        'Reply with ONLY a JSON object {"topic": "...", "steps": [{"title": "...", '
        '"objective": "..."}]} containing 3 to 9 steps.',
    ]
    if strict:
        lines.append(
            "STRICT MODE: your previous attempt was rejected. Obey the shape and the "
            "3-to-9 step bounds exactly; every title and objective must be non-empty."
        )
    return PromptBundle(
        system_text="\n".join(lines),
        messages=(("user", topic),),
        temperature=DEFAULT_STRUCTURED_TEMPERATURE,
    )


def assessment_bundle(persona: str, check: PendingCheck, message: str) -> PromptBundle:
    expected = "; ".join(check.expected_concepts) if check.expected_concepts else "(none listed)"
    lines = [
        persona,
        "",
        ASSESS_TASK,
        f"The comprehension question was: {check.question}",
        f"Concepts a complete answer should evidence: {expected}",
        'Reply with ONLY a JSON object {"verdict": "Mastered"|"Partial"|"Struggling", '
        '"gaps": ["concepts not evidenced"], "rationale": "..."}.',
        "Mastered means the core concepts are accurate even if some listed concepts "
        "remain to be taught; list those in gaps.",
    ]
    return PromptBundle(
        system_text="\n".join(lines),
        messages=(("user", message),),
        temperature=DEFAULT_STRUCTURED_TEMPERATURE,
    )


def teaching_system_text(
    persona: str,
    directive: ScaffoldDirective,
    context: GroundingContext,
    active_step: Optional[PlanStep] = None,
    step_count: int = 0,
) -> str:
    parts = [persona, ""]
    parts.append(f'Teaching mode "{directive.phase_label}": {directive.strategy_text}')
    if active_step is not None:
        parts.append(
            f"Current learning step {active_step.index} of {step_count}: "
            f"{active_step.title} — {active_step.objective}"
        )
    parts.append("")
    if context.text:
        parts.append(CONTEXT_PREAMBLE)
        parts.append(context.text)
    else:
        parts.append(NO_CONTEXT_CLAUSE)
    if directive.require_check:
        parts.append("")
        parts.append(CHECK_INSTRUCTION)
    return "\n".join(parts)


def history_messages(
    turns: Sequence,
    resolve_response_text,
    window: int,
    current_message: str,
) -> tuple[tuple[str, str], ...]:
    """The last ``window`` turns as (user, assistant) pairs plus the new message."""
    messages: list[tuple[str, str]] = []
    for turn in turns[-window:] if window > 0 else ():
        messages.append(("user", turn.user_message))
        agent_text = resolve_response_text(turn.agent_response_id)
        if agent_text:
            messages.append(("assistant", agent_text))
    messages.append(("user", current_message))
    return tuple(messages)


def extract_check(text: str) -> tuple[str, Optional[str], tuple[str, ...]]:
    """Split a teaching completion into (display_text, question, concepts).

    The question is whatever follows the last CHECK_MARKER; a trailing
    ``[CONCEPTS: a; b]`` line is parsed and stripped from the display text.
    """
    concepts: tuple[str, ...] = ()
    display = text
    open_at = display.rfind(CONCEPTS_OPEN)
    if open_at != -1:
        close_at = display.find("]", open_at)
        if close_at != -1:
            raw = display[open_at + len(CONCEPTS_OPEN) : close_at]
            concepts = tuple(c.strip() for c in raw.split(";") if c.strip())
            display = (display[:open_at] + display[close_at + 1 :]).rstrip()
    question: Optional[str] = None
    marker_at = display.rfind(CHECK_MARKER)
    if marker_at != -1:
        question = display[marker_at + len(CHECK_MARKER) :].strip() or None
    return display, question, concepts
