"""Story file parsing and unrolling into policy training pairs.

A story alternates user steps (intent plus optional slot values) with bot
steps (action names); every bot run implicitly ends with action_listen.
Unrolling simulates a tracker through the story and records one
(state vector, next action) pair per bot decision, including the closing
listen.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .dialogue import (
    ACTION_INDEX,
    ACTION_LISTEN,
    ACTION_SEARCH,
    ACTIONS,
    SLOT_NAMES,
    Tracker,
    featurize_state,
    new_tracker,
)
from .intents import INTENTS


class StoryError(ValueError):
    pass


@dataclass(frozen=True)
class UserStep:
    intent: str
    slots: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class BotStep:
    action: str
    # Only meaningful for action_search: whether the simulated search finds
    # anything. Real conversations get this from the actual result list.
    results: str = "present"


@dataclass(frozen=True)
class Story:
    name: str
    steps: tuple[UserStep | BotStep, ...]


@dataclass
class TrainingPair:
    state: np.ndarray
    action: int
    story: str


def _parse_user_step(raw: dict, story_name: str) -> UserStep:
    intent = raw.get("user")
    if intent not in INTENTS:
        raise StoryError(f"story {story_name!r}: unknown intent {intent!r}")
    slots = raw.get("slots") or {}
    for name in slots:
        if name not in SLOT_NAMES:
            raise StoryError(f"story {story_name!r}: unknown slot {name!r}")
    return UserStep(intent=intent, slots=tuple(sorted(slots.items())))


def _parse_bot_step(raw: dict, story_name: str) -> BotStep:
    spec = raw.get("bot")
    if isinstance(spec, str):
        action, results = spec, "present"
    elif isinstance(spec, dict):
        action = spec.get("action")
        results = spec.get("results", "present")
    else:
        raise StoryError(f"story {story_name!r}: malformed bot step {raw!r}")
    if action not in ACTION_INDEX:
        raise StoryError(f"story {story_name!r}: unknown action {action!r}")
    if action == ACTION_LISTEN:
        raise StoryError(
            f"story {story_name!r}: action_listen is implicit and cannot be scripted"
        )
    if results not in ("present", "empty"):
        raise StoryError(f"story {story_name!r}: bad results flag {results!r}")
    return BotStep(action=action, results=results)


def load_stories(path: str | Path) -> list[Story]:
    """Parse the YAML story file."""
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict) or "stories" not in raw:
        raise StoryError(f"{path}: expected a top-level 'stories' list")
    stories = []
    for item in raw["stories"]:
        name = item.get("name")
        if not name:
            raise StoryError(f"{path}: story without a name")
        steps: list[UserStep | BotStep] = []
        for step in item.get("steps", []):
            if "user" in step:
                steps.append(_parse_user_step(step, name))
            elif "bot" in step:
                steps.append(_parse_bot_step(step, name))
            else:
                raise StoryError(f"story {name!r}: step is neither user nor bot")
        if not steps or not isinstance(steps[0], UserStep):
            raise StoryError(f"story {name!r}: must start with a user step")
        stories.append(Story(name=name, steps=tuple(steps)))
    return stories


def _simulate(story: Story) -> list[TrainingPair]:
    tracker = new_tracker(f"story:{story.name}")
    pairs: list[TrainingPair] = []
    listen_pending = False
    for step in story.steps:
        if isinstance(step, UserStep):
            if listen_pending:
                pairs.append(
                    TrainingPair(
                        state=featurize_state(tracker),
                        action=ACTION_INDEX[ACTION_LISTEN],
                        story=story.name,
                    )
                )
                tracker.apply_bot(ACTION_LISTEN)
                listen_pending = False
            tracker.apply_user(
                text=f"<{step.intent}>", intent=step.intent, slot_writes=dict(step.slots)
            )
        else:
            pairs.append(
                TrainingPair(
                    state=featurize_state(tracker),
                    action=ACTION_INDEX[step.action],
                    story=story.name,
                )
            )
            count = None
            if step.action == ACTION_SEARCH:
                count = 1 if step.results == "present" else 0
            tracker.apply_bot(step.action, result_count=count)
            listen_pending = True
    if listen_pending:
        pairs.append(
            TrainingPair(
                state=featurize_state(tracker),
                action=ACTION_INDEX[ACTION_LISTEN],
                story=story.name,
            )
        )
    return pairs


def unroll_stories(stories: list[Story]) -> list[TrainingPair]:
    """All (state, action) pairs, checked for cross-story determinism.

    Two stories that reach the same state but demand different actions make
    the training data unlearnable, so that is rejected up front.
    """
    if not stories:
        raise StoryError("no stories to train on")
    pairs: list[TrainingPair] = []
    gold: dict[bytes, TrainingPair] = {}
    for story in stories:
        for pair in _simulate(story):
            key = pair.state.tobytes()
            seen = gold.get(key)
            if seen is None:
                gold[key] = pair
            elif seen.action != pair.action:
                raise StoryError(
                    f"conflicting stories: {seen.story!r} wants "
                    f"{ACTIONS[seen.action]} but {pair.story!r} wants "
                    f"{ACTIONS[pair.action]} in the same state"
                )
            pairs.append(pair)
    return pairs
