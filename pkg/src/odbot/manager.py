"""Action selection: run the policy until it hands the turn back.

The manager owns the loop around the policy network: predict, execute,
render, repeat until action_listen (or the runaway guard trips). The search
action queries the catalog with the tracker's slots and stores the results
on the tracker for rendering and state features.
"""

from __future__ import annotations

import logging

import numpy as np

from . import catalog as catalog_mod
from .catalog import Index, SearchQuery
from .dialogue import (
    ACTION_LISTEN,
    ACTION_SEARCH,
    ACTIONS,
    UTTER_ASK_MODE,
    Tracker,
    featurize_state,
)
from .policy import PolicyModel
from .responses import BotResponse, Renderer

logger = logging.getLogger(__name__)

MAX_ACTIONS_PER_TURN = 10


class DialogueManager:
    def __init__(self, policy: PolicyModel, renderer: Renderer, index: Index):
        self.policy = policy
        self.renderer = renderer
        self.index = index

    def select_actions(self, tracker: Tracker) -> list[BotResponse]:
        """Drive the policy from the current state until action_listen."""
        responses: list[BotResponse] = []
        for _ in range(MAX_ACTIONS_PER_TURN):
            probs = self.policy.predict_probs(featurize_state(tracker))
            action = ACTIONS[int(np.argmax(probs))]
            if action == ACTION_LISTEN:
                tracker.apply_bot(ACTION_LISTEN)
                return responses
            if action == ACTION_SEARCH:
                query = SearchQuery.from_slots(
                    tracker.slots.get("topic"), tracker.slots.get("location")
                )
                results = catalog_mod.search(self.index, query)
                tracker.search_results = results
                tracker.apply_bot(ACTION_SEARCH, result_count=len(results))
                responses.append(self.renderer.render(ACTION_SEARCH, tracker))
            else:
                responses.append(self.renderer.render(action, tracker))
                tracker.apply_bot(action)
        logger.warning(
            "policy fault: session %s exceeded %d actions in one turn",
            tracker.session_id,
            MAX_ACTIONS_PER_TURN,
        )
        return responses

    def reprompt(self, tracker: Tracker) -> list[BotResponse]:
        """Re-ask the last open question; used on low-confidence input."""
        question = tracker.last_question or UTTER_ASK_MODE
        response = self.renderer.render(question, tracker)
        tracker.apply_bot(question)
        tracker.apply_bot(ACTION_LISTEN)
        return [response]
