"""Wiring layer: builds the engine from configuration and runs turns against
the store with leases, event logging and the response archive.

Both the HTTP service and the CLI drive a TutorRuntime; neither contains
tutoring logic of its own.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Any, Optional

from .config import ApiConfig, ConfigError
from .cycle import (
    AgentResponse,
    Clock,
    EngineConfig,
    PlanAction,
    TutorEngine,
)
from .domain import (
    Familiarity,
    LearnerProfile,
    Role,
    SessionState,
    new_id,
)
from .gateway import HttpProvider, Provider, ScriptedProvider
from .persistence import (
    BestEffortJournal,
    EventKind,
    FeedbackRecord,
    InteractionEvent,
    SessionStore,
    aggregate_metrics,
    load_feedback_file,
    render_metrics_table,
)
from .rag import (
    Embedder,
    HashedNgramEmbedder,
    RemoteEmbedder,
    VectorIndex,
    build_index,
    load_corpus,
)

INDEX_FILENAME = "index.json"


def build_provider(cfg: ApiConfig) -> Provider:
    if cfg.provider.kind == "scripted":
        return ScriptedProvider.from_path(cfg.provider.script_path)
    return HttpProvider(
        endpoint=cfg.provider.endpoint,
        model=cfg.provider.model,
        deadline_ms=cfg.provider.deadline_ms,
        max_retries=cfg.provider.max_retries,
    )


def build_embedder(cfg: ApiConfig, provider: Provider) -> Embedder:
    if cfg.embedder.kind == "test":
        return HashedNgramEmbedder(dim=cfg.embedder.dim)
    if not isinstance(provider, HttpProvider):
        raise ConfigError("embedder.kind=http requires provider.kind=http")
    return RemoteEmbedder(provider, model=cfg.embedder.model, dim=cfg.embedder.dim)


class TutorRuntime:
    def __init__(
        self,
        cfg: ApiConfig,
        provider: Provider | None = None,
        embedder: Embedder | None = None,
        clock: Clock | None = None,
    ) -> None:
        self.cfg = cfg
        self.store = SessionStore(cfg.data_dir)
        self.journal = BestEffortJournal(self.store)
        self.provider = provider or build_provider(cfg)
        self.embedder = embedder or build_embedder(cfg, self.provider)
        self.clock = clock or Clock()
        self._index: Optional[VectorIndex] = None
        self._index_lock = threading.Lock()
        self._load_persisted_index()
        persona = cfg.resolved_persona_path().read_text(encoding="utf-8")
        self.engine = TutorEngine(
            provider=self.provider,
            embedder=self.embedder,
            persona=persona,
            index_source=self.current_index,
            response_text_for=self.store.response_text,
            policy=cfg.scaffold.to_policy(),
            config=EngineConfig(
                retrieval_k=cfg.rag.k,
                context_budget=cfg.rag.budget,
                history_window=cfg.history_window,
            ),
            clock=self.clock,
        )

    # ---------------------------------------------------------------- index
    def _index_path(self) -> Path:
        return Path(self.cfg.data_dir) / INDEX_FILENAME

    def _load_persisted_index(self) -> None:
        path = self._index_path()
        if path.exists():
            self._index = VectorIndex.load(path)

    def current_index(self) -> Optional[VectorIndex]:
        with self._index_lock:
            return self._index

    def ingest(self, directory: str | Path) -> tuple[int, int]:
        """Load, chunk, embed and index a corpus directory; atomically swap
        the live index and persist it. Returns (docs, chunks)."""
        docs = load_corpus(directory)
        index = build_index(
            docs,
            self.embedder,
            chunk_size=self.cfg.rag.chunk_size,
            overlap=self.cfg.rag.overlap,
        )
        with self._index_lock:
            index.save(self._index_path())
            self._index = index
        return len(docs), len(index)

    # ------------------------------------------------------------- sessions
    def create_session(self, learner_id: str, role: str, familiarity: str) -> str:
        profile = LearnerProfile(
            learner_id=learner_id,
            role=Role(role),
            familiarity=Familiarity(familiarity),
        )
        state = SessionState(session_id=new_id(), learner=profile)
        self.store.create_session(state)
        return state.session_id

    def post_message(self, session_id: str, text: str) -> AgentResponse:
        """Run one turn: lease, handle, persist, log. Any failure leaves the
        stored session untouched."""
        state = self.store.load_session(session_id)
        token = self.store.acquire_lease(session_id)
        try:
            response, new_state = self.engine.handle_turn(state, text)
        except Exception as exc:
            self.store.release_lease(session_id, token)
            self._log(
                session_id,
                EventKind.GATEWAY_ERROR,
                {"error": type(exc).__name__, "message": str(exc)[:500]},
            )
            raise
        self.store.save_session(new_state, token)
        doc = response.to_dict()
        doc["session_id"] = session_id
        doc["turn_index"] = new_state.turns[-1].turn_index
        self.store.save_response(doc)
        self._log_turn_events(session_id, response, new_state)
        return response

    def _log(self, session_id: str, kind: EventKind, payload: dict[str, Any]) -> None:
        self.journal.append(
            InteractionEvent(
                event_id=new_id(),
                session_id=session_id,
                kind=kind,
                payload=payload,
                timestamp=self.clock.now_ms(),
            )
        )

    def _log_turn_events(
        self, session_id: str, response: AgentResponse, state: SessionState
    ) -> None:
        trace = response.trace
        turn_index = state.turns[-1].turn_index
        if trace.plan_action is PlanAction.CREATED and response.plan_snapshot:
            self._log(
                session_id,
                EventKind.PLAN_CREATED,
                {
                    "turn_index": turn_index,
                    "plan_id": response.plan_snapshot.plan_id,
                    "steps": len(response.plan_snapshot.steps),
                },
            )
        if trace.plan_action is PlanAction.REVISED and response.plan_snapshot:
            self._log(
                session_id,
                EventKind.PLAN_REVISED,
                {
                    "turn_index": turn_index,
                    "plan_id": response.plan_snapshot.plan_id,
                    "revision": response.plan_snapshot.revision,
                },
            )
        before, after = trace.scaffold_decision
        if before is not after:
            self._log(
                session_id,
                EventKind.SCAFFOLD_CHANGED,
                {"turn_index": turn_index, "before": before.value, "after": after.value},
            )
        if trace.retrieval_ids:
            self._log(
                session_id,
                EventKind.RETRIEVAL_PERFORMED,
                {"turn_index": turn_index, "chunk_ids": list(trace.retrieval_ids)},
            )
        self._log(
            session_id,
            EventKind.TURN_COMPLETED,
            {
                "turn_index": turn_index,
                "intent": trace.intent.value,
                "plan_action": trace.plan_action.value,
                "scaffold": after.value,
                "response_id": response.response_id,
                "text": response.text,
            },
        )

    # ----------------------------------------------------------------- views
    def get_plan(self, session_id: str) -> Optional[dict[str, Any]]:
        state = self.store.load_session(session_id)
        return state.plan.to_dict() if state.plan else None

    def get_session_view(self, session_id: str) -> dict[str, Any]:
        state = self.store.load_session(session_id)
        index = self.current_index()
        messages = []
        for turn in state.turns:
            doc = self.store.load_response(turn.agent_response_id) or {}
            messages.append(
                {
                    "turn_index": turn.turn_index,
                    "user_message": turn.user_message,
                    "agent_text": doc.get("text", ""),
                    "intent": turn.intent.value,
                    "scaffold_used": turn.scaffold_used.value,
                    "citations": self.citation_details(turn.citations, index),
                    "timestamp": turn.timestamp,
                }
            )
        from .scaffolding import PHASE_LABELS

        return {
            "session_id": state.session_id,
            "learner": state.learner.to_dict(),
            "scaffold": state.scaffold.value,
            "scaffold_phase": PHASE_LABELS[state.scaffold],
            "plan": state.plan.to_dict() if state.plan else None,
            "pending_check": state.pending_check.to_dict() if state.pending_check else None,
            "messages": messages,
            "assessments": [a.to_dict() for a in state.assessment_history],
        }

    def citation_details(
        self, chunk_ids: tuple[str, ...], index: Optional[VectorIndex]
    ) -> list[dict[str, str]]:
        details = []
        for cid in chunk_ids:
            if index is not None and index.has_chunk(cid):
                chunk = index.chunk(cid)
                details.append(
                    {
                        "chunk_id": cid,
                        "title": index.doc_title(chunk.doc_id),
                        "excerpt": chunk.text[:240],
                    }
                )
            else:
                details.append({"chunk_id": cid, "title": "", "excerpt": ""})
        return details

    # -------------------------------------------------------------- feedback
    def submit_feedback(
        self,
        session_id: str,
        ratings: dict[str, int],
        free_text: Optional[str] = None,
        turn_index: Optional[int] = None,
    ) -> None:
        if not self.store.session_exists(session_id):
            from .persistence import NotFound

            raise NotFound(f"unknown session: {session_id}")
        record = FeedbackRecord(
            session_id=session_id,
            ratings=ratings,
            turn_index=turn_index,
            free_text=free_text,
            timestamp=self.clock.now_ms(),
        )
        self.store.append_feedback(record)
        self._log(
            session_id,
            EventKind.FEEDBACK_SUBMITTED,
            {"turn_index": turn_index, "metrics": sorted(ratings)},
        )

    def eval_table(self, feedback_path: str | Path | None = None) -> str:
        records = (
            load_feedback_file(feedback_path)
            if feedback_path is not None
            else self.store.scan_feedback()
        )
        return render_metrics_table(aggregate_metrics(records))
