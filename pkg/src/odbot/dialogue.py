"""Per-session dialogue state: actions, the event log, and state features.

A Tracker is an append-only event log plus the slot/mode view derived from
it; replaying the log from scratch reconstructs the same view. Each user
message starts a new turn and invalidates the previous turn's search
results.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalog import DatasetRecord
from .intents import INTENTS, LOW_CONFIDENCE

UTTER_GREET = "utter_greet"
UTTER_ASK_MODE = "utter_ask_mode"
UTTER_ASK_TOPIC = "utter_ask_topic"
UTTER_ASK_TOPIC_OPTIONS = "utter_ask_topic_options"
UTTER_ASK_LOCATION_OPTIONS = "utter_ask_location_options"
UTTER_CONFIRM_SEARCH = "utter_confirm_search"
UTTER_NO_RESULTS = "utter_no_results"
UTTER_ANYTHING_ELSE = "utter_anything_else"
UTTER_GOODBYE = "utter_goodbye"
UTTER_YOURE_WELCOME = "utter_youre_welcome"

TEMPLATE_ACTIONS = (
    UTTER_GREET,
    UTTER_ASK_MODE,
    UTTER_ASK_TOPIC,
    UTTER_ASK_TOPIC_OPTIONS,
    UTTER_ASK_LOCATION_OPTIONS,
    UTTER_CONFIRM_SEARCH,
    UTTER_NO_RESULTS,
    UTTER_ANYTHING_ELSE,
    UTTER_GOODBYE,
    UTTER_YOURE_WELCOME,
)

ACTION_SEARCH = "action_search"
ACTION_LISTEN = "action_listen"

# Declaration order doubles as the policy tie-break order.
ACTIONS = TEMPLATE_ACTIONS + (ACTION_SEARCH, ACTION_LISTEN)
ACTION_INDEX = {name: i for i, name in enumerate(ACTIONS)}

SLOT_NAMES = ("topic", "location")
MODES = ("search", "explore")

# Bot actions that ask the user something; used for clarification re-prompts.
QUESTION_ACTIONS = (
    UTTER_ASK_MODE,
    UTTER_ASK_TOPIC,
    UTTER_ASK_TOPIC_OPTIONS,
    UTTER_ASK_LOCATION_OPTIONS,
)


class TrackerError(ValueError):
    pass


class UnknownSlotError(TrackerError):
    """A payload tried to write a slot the tracker does not have."""


@dataclass(frozen=True)
class UserEvent:
    text: str
    intent: str
    entities: tuple[tuple[str, str], ...]  # (entity type, surface)
    slot_writes: tuple[tuple[str, str], ...]
    timestamp: float


@dataclass(frozen=True)
class BotEvent:
    action: str
    result_count: int | None
    timestamp: float


@dataclass(frozen=True)
class ErrorEvent:
    kind: str
    detail: str
    timestamp: float


Event = UserEvent | BotEvent | ErrorEvent


@dataclass
class Tracker:
    """Dialogue state for one session."""

    session_id: str
    slots: dict[str, str | None] = field(
        default_factory=lambda: {name: None for name in SLOT_NAMES}
    )
    mode: str | None = None
    events: list[Event] = field(default_factory=list)
    last_action: str = ACTION_LISTEN
    last_intent: str | None = None
    results_present: bool = False
    # Records from the current turn's search, kept only for rendering.
    search_results: list[DatasetRecord] | None = None

    def apply_user(
        self,
        text: str,
        intent: str,
        entities: Sequence[tuple[str, str]] = (),
        slot_writes: dict[str, str] | None = None,
    ) -> None:
        """Apply one user turn: slot writes, mode switches, event append.

        Topic/location entities fill the matching slots (last mention wins),
        payload slot writes override entity writes, and the search/explore
        intents switch the mode while leaving the other slots alone. An
        unknown slot name in the payload appends an error event and leaves
        the state untouched.
        """
        if intent not in INTENTS and intent != LOW_CONFIDENCE:
            raise TrackerError(f"unknown intent {intent!r}")
        writes = dict(slot_writes or {})
        for name in writes:
            if name not in SLOT_NAMES:
                self.events.append(
                    ErrorEvent(
                        kind="unknown_slot",
                        detail=f"no slot named {name!r}",
                        timestamp=time.time(),
                    )
                )
                raise UnknownSlotError(name)
        event = UserEvent(
            text=text,
            intent=intent,
            entities=tuple((e_type, surface) for e_type, surface in entities),
            slot_writes=tuple(sorted(writes.items())),
            timestamp=time.time(),
        )
        self.events.append(event)
        self._apply_user_event(event)

    def _apply_user_event(self, event: UserEvent) -> None:
        # A new message starts a new turn and invalidates shown results.
        self.search_results = None
        self.results_present = False
        self.last_intent = event.intent
        for e_type, surface in event.entities:
            if e_type in SLOT_NAMES:
                self.slots[e_type] = surface
        for name, value in event.slot_writes:
            self.slots[name] = value
        if event.intent in MODES:
            self.mode = event.intent

    def apply_bot(self, action: str, result_count: int | None = None) -> None:
        if action not in ACTION_INDEX:
            raise TrackerError(f"unknown action {action!r}")
        event = BotEvent(
            action=action, result_count=result_count, timestamp=time.time()
        )
        self.events.append(event)
        self._apply_bot_event(event)

    def _apply_bot_event(self, event: BotEvent) -> None:
        self.last_action = event.action
        if event.action == ACTION_SEARCH:
            self.results_present = bool(event.result_count)

    @property
    def last_question(self) -> str | None:
        """Most recent question the bot asked, if any."""
        for event in reversed(self.events):
            if isinstance(event, BotEvent) and event.action in QUESTION_ACTIONS:
                return event.action
        return None

    def snapshot(self) -> dict:
        """JSON-friendly view for the debug endpoint."""
        return {
            "session_id": self.session_id,
            "slots": dict(self.slots),
            "mode": self.mode,
            "last_action": self.last_action,
            "last_intent": self.last_intent,
            "events": [
                {"type": type(e).__name__, **e.__dict__} for e in self.events
            ],
        }


def new_tracker(session_id: str) -> Tracker:
    if not session_id:
        raise TrackerError("session id must be non-empty")
    return Tracker(session_id=session_id)


def update_tracker(
    tracker: Tracker,
    intent: str,
    entities: Sequence[tuple[str, str]] = (),
    slot_writes: dict[str, str] | None = None,
    text: str = "",
) -> Tracker:
    tracker.apply_user(text=text, intent=intent, entities=entities, slot_writes=slot_writes)
    return tracker


def replay_tracker(session_id: str, events: Sequence[Event]) -> Tracker:
    """Rebuild slots, mode, and last action from an event log."""
    tracker = new_tracker(session_id)
    for event in events:
        tracker.events.append(event)
        if isinstance(event, UserEvent):
            tracker._apply_user_event(event)
        elif isinstance(event, BotEvent):
            tracker._apply_bot_event(event)
    return tracker


# --- state featurization ------------------------------------------------------

# Fixed binary layout, version 1:
#   [0:11]   one-hot last user intent: none, the nine intents, low_confidence
#   [11]     topic slot filled
#   [12]     location slot filled
#   [13:16]  one-hot mode: none, search, explore
#   [16:29]  one-hot previous bot action: none + the 12 actions in declaration
#            order; action_listen marks a turn boundary and folds to none
#   [29]     search results present
STATE_LAYOUT_VERSION = 1
STATE_SIZE = 11 + 2 + 3 + 13 + 1

_INTENT_SLOTS = ("none",) + INTENTS + (LOW_CONFIDENCE,)


def featurize_state(tracker: Tracker) -> np.ndarray:
    """Encode the tracker into the fixed 30-dim binary state vector."""
    vec = np.zeros(STATE_SIZE)
    intent = tracker.last_intent or "none"
    vec[_INTENT_SLOTS.index(intent)] = 1.0
    if tracker.slots.get("topic"):
        vec[11] = 1.0
    if tracker.slots.get("location"):
        vec[12] = 1.0
    mode_offset = 13
    if tracker.mode is None:
        vec[mode_offset] = 1.0
    else:
        vec[mode_offset + 1 + MODES.index(tracker.mode)] = 1.0
    action_offset = 16
    if tracker.last_action == ACTION_LISTEN:
        vec[action_offset] = 1.0  # turn boundary: previous action folds to none
    else:
        vec[action_offset + 1 + ACTION_INDEX[tracker.last_action]] = 1.0
    if tracker.results_present:
        vec[29] = 1.0
    return vec
