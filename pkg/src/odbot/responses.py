"""Bot responses and template rendering.

Response wording lives in the templates file, not in code. Templates may
interpolate {topic} and {location}; when a referenced slot is unset the
template's fallback wording is used instead. Option templates source their
buttons from the catalog.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from pathlib import Path

import yaml

from . import catalog as catalog_mod
from .catalog import Index
from .dialogue import (
    ACTION_SEARCH,
    TEMPLATE_ACTIONS,
    UTTER_NO_RESULTS,
    Tracker,
)

MAX_BUTTONS = 6
MAX_LINKS = 5


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class Button:
    title: str
    payload: str


@dataclass(frozen=True)
class Link:
    title: str
    url: str


@dataclass(frozen=True)
class BotResponse:
    text: str
    buttons: tuple[Button, ...] = ()
    links: tuple[Link, ...] = ()

    def __post_init__(self):
        if len(self.buttons) > MAX_BUTTONS:
            raise ValueError(f"at most {MAX_BUTTONS} buttons allowed")
        if len(self.links) > MAX_LINKS:
            raise ValueError(f"at most {MAX_LINKS} links allowed")

    def to_payload(self) -> dict:
        """Wire shape used by the HTTP API."""
        return {
            "text": self.text,
            "buttons": [{"title": b.title, "payload": b.payload} for b in self.buttons],
            "links": [{"title": l.title, "url": l.url} for l in self.links],
        }


@dataclass(frozen=True)
class Template:
    text: str
    fallback: str | None = None
    buttons: tuple[Button, ...] = ()
    button_source: str | None = None  # "topics" or "locations"


def _fields(template_text: str) -> set[str]:
    return {
        name for _, name, _, _ in string.Formatter().parse(template_text) if name
    }


def load_templates(path: str | Path) -> dict[str, Template]:
    """Read the template file and check the full action set is covered."""
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise TemplateError(f"{path}: expected a mapping of action names")
    templates: dict[str, Template] = {}
    for name, entry in raw.items():
        if isinstance(entry, str):
            entry = {"text": entry}
        text = entry.get("text")
        if not text:
            raise TemplateError(f"{path}: template {name!r} has no text")
        buttons = tuple(
            Button(title=b["title"], payload=b["payload"])
            for b in entry.get("buttons", [])
        )
        source = entry.get("button_source")
        if source not in (None, "topics", "locations"):
            raise TemplateError(f"{path}: template {name!r} bad button_source")
        templates[name] = Template(
            text=text,
            fallback=entry.get("fallback"),
            buttons=buttons,
            button_source=source,
        )
    missing = [a for a in TEMPLATE_ACTIONS + (ACTION_SEARCH,) if a not in templates]
    if missing:
        raise TemplateError(f"{path}: missing templates for {missing}")
    return templates


class Renderer:
    """Turns actions into BotResponses using templates, slots, and the catalog."""

    def __init__(self, templates: dict[str, Template], index: Index):
        self.templates = templates
        self.index = index

    def _fill(self, template: Template, tracker: Tracker) -> str:
        referenced = _fields(template.text)
        values = {name: tracker.slots.get(name) for name in referenced}
        if any(v is None for v in values.values()):
            if template.fallback is not None:
                return template.fallback
            # No fallback authored: drop to the raw text with blanks.
            values = {k: (v if v is not None else "") for k, v in values.items()}
        return template.text.format(**values)

    def _option_buttons(self, source: str) -> tuple[Button, ...]:
        if source == "topics":
            options = catalog_mod.list_topics(self.index, MAX_BUTTONS)
            return tuple(
                Button(title=t, payload="/add_keyword" + json.dumps({"topic": t}))
                for t in options
            )
        options = catalog_mod.list_locations(self.index, MAX_BUTTONS)
        return tuple(
            Button(title=loc, payload="/add_location" + json.dumps({"location": loc}))
            for loc in options
        )

    def render(self, action: str, tracker: Tracker) -> BotResponse:
        """Render one action against the tracker's current state."""
        if action == ACTION_SEARCH:
            return self._render_search(tracker)
        template = self.templates.get(action)
        if template is None:
            raise TemplateError(f"no template for action {action!r}")
        buttons = template.buttons
        if template.button_source:
            buttons = self._option_buttons(template.button_source)
        return BotResponse(text=self._fill(template, tracker), buttons=buttons)

    def _render_search(self, tracker: Tracker) -> BotResponse:
        results = tracker.search_results or []
        if not results:
            return self.render(UTTER_NO_RESULTS, tracker)
        template = self.templates[ACTION_SEARCH]
        links = tuple(Link(title=r.title, url=r.url) for r in results[:MAX_LINKS])
        return BotResponse(text=self._fill(template, tracker), links=links)
