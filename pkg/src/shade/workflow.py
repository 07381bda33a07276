"""The three-stage labeling state machine, one session per annotator.

A task opens at the earliest stage that has candidates (links list first,
then noun phrases, manual entry last). Rejecting the current list with
"Not in this list" advances one stage; the manual field only unlocks after
every non-empty list has been rejected. Sessions are transient and live
server-side: re-opening a task always resets to the earliest stage, which is
exactly what a browser reload does, and nothing is ever skipped implicitly.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .annostore import Annotation, AnnotationStore, EntityPage, Source


class WorkflowError(Exception):
    pass


class AlreadyManual(WorkflowError):
    """'Not in this list' pressed while already at the manual stage."""


class LabelNotInList(WorkflowError):
    """Selection does not match the current stage's candidate list."""


class ManualLocked(WorkflowError):
    """Free text submitted while a candidate list is still active."""


class StaleTask(WorkflowError):
    """The request targets an entity that is no longer the current task."""


@dataclass
class AnnotationSession:
    annotator_id: int
    entity_id: int
    stage: Source


def initial_stage(page: EntityPage) -> Source:
    if page.links_list:
        return Source.LINKS
    if page.noun_list:
        return Source.NOUN_PHRASES
    return Source.MANUAL


def labels_for(page: EntityPage, stage: Source) -> list[str]:
    if stage is Source.LINKS:
        return page.links_list
    if stage is Source.NOUN_PHRASES:
        return page.noun_list
    return []


class Workflow:
    """Session registry driving the stage machine on top of the store."""

    def __init__(self, store: AnnotationStore) -> None:
        self._store = store
        self._sessions: dict[int, AnnotationSession] = {}
        self._lock = threading.RLock()

    def open_task(self, annotator_id: int) -> tuple[EntityPage, AnnotationSession] | None:
        """The annotator's current task, with a session reset to the earliest
        non-empty stage; None when every entity is done."""
        with self._lock:
            page = self._store.current_task(annotator_id)
            if page is None:
                self._sessions.pop(annotator_id, None)
                return None
            session = AnnotationSession(
                annotator_id=annotator_id,
                entity_id=page.id,
                stage=initial_stage(page),
            )
            self._sessions[annotator_id] = session
            return page, session

    def _active(self, annotator_id: int, entity_id: int) -> tuple[EntityPage, AnnotationSession]:
        session = self._sessions.get(annotator_id)
        if session is None:
            opened = self.open_task(annotator_id)
            if opened is None:
                raise StaleTask(entity_id)
            _, session = opened
        if session.entity_id != entity_id:
            raise StaleTask(entity_id)
        page = self._store.get_entity(entity_id)
        if page is None:
            raise StaleTask(entity_id)
        return page, session

    def reject_list(self, annotator_id: int, entity_id: int) -> tuple[EntityPage, AnnotationSession]:
        """Advance past the current list; an empty noun list is passed over."""
        with self._lock:
            page, session = self._active(annotator_id, entity_id)
            if session.stage is Source.MANUAL:
                raise AlreadyManual(entity_id)
            if session.stage is Source.LINKS and page.noun_list:
                session.stage = Source.NOUN_PHRASES
            else:
                session.stage = Source.MANUAL
            return page, session

    def submit_label(
        self,
        annotator_id: int,
        entity_id: int,
        label_text: str,
        selection_index: int | None = None,
    ) -> Annotation:
        """Record the annotation for the current stage and close the session.

        At a list stage the submission must reference a list element by index
        and matching text; free text is only accepted at the manual stage.
        """
        with self._lock:
            page, session = self._active(annotator_id, entity_id)
            if session.stage is not Source.MANUAL:
                labels = labels_for(page, session.stage)
                if selection_index is None:
                    raise ManualLocked(entity_id)
                if not 0 <= selection_index < len(labels):
                    raise LabelNotInList(label_text)
                if labels[selection_index] != label_text:
                    raise LabelNotInList(label_text)
            annotation = self._store.save_annotation(
                entity_id, annotator_id, label_text, session.stage
            )
            self._sessions.pop(annotator_id, None)
            return annotation

    def skip_task(self, annotator_id: int, entity_id: int) -> None:
        """Explicitly mark the current task too hard to label."""
        with self._lock:
            session = self._sessions.get(annotator_id)
            if session is not None and session.entity_id != entity_id:
                raise StaleTask(entity_id)
            self._store.mark_skipped(entity_id, annotator_id)
            self._sessions.pop(annotator_id, None)
