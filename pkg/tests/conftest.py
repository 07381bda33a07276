"""Shared fixtures: a demo-wiki article corpus and store/service builders."""

from __future__ import annotations

import pytest

from shade.annostore import AnnotationStore

# Lead paragraph of the demo article, markup form. The nine links, in order:
# lawful evil, dragon, evil dragons, greater gods, Bane, Asmodeus,
# Faerûnian pantheon, Draconic pantheon, Untheric pantheon.
TIAMAT_LEAD = (
    "'''Tiamat''' was the [[lawful evil]] [[dragon]] goddess of greed, "
    "queen of [[evil dragons]] and, for a time, reluctant servant of the "
    "[[greater gods]] [[Bane]] and later [[Asmodeus]]. Before entering the "
    "[[Faerûnian pantheon]], she was a member of the [[Draconic pantheon]], "
    "and for some time she was also a member of the [[Untheric pantheon]]."
)

TIAMAT_LEAD_PLAIN = (
    "Tiamat was the lawful evil dragon goddess of greed, "
    "queen of evil dragons and, for a time, reluctant servant of the "
    "greater gods Bane and later Asmodeus. Before entering the "
    "Faerûnian pantheon, she was a member of the Draconic pantheon, "
    "and for some time she was also a member of the Untheric pantheon."
)

TIAMAT_LINK_TARGETS = [
    "lawful evil",
    "dragon",
    "evil dragons",
    "greater gods",
    "Bane",
    "Asmodeus",
    "Faerûnian pantheon",
    "Draconic pantheon",
    "Untheric pantheon",
]

# Full article body: infobox (with its own link, which must never leak into
# the candidate list), a DEFAULTSORT directive, the lead, more paragraphs.
TIAMAT_ARTICLE = (
    "{{Infobox deity\n"
    "| name = Tiamat\n"
    "| pantheon = [[Draconic pantheon]]\n"
    "| alignment = {{Alignment grid|off|off|off|off|off|off|off|off|on}}\n"
    "}}\n"
    "{{DEFAULTSORT:Tiamat}}\n"
    + TIAMAT_LEAD
    + "\n\nIn the [[Year of the Scourge]], her cult rose again.\n"
)


@pytest.fixture
def store(tmp_path):
    s = AnnotationStore(tmp_path / "shade.db")
    yield s
    s.close()


@pytest.fixture
def mem_store():
    s = AnnotationStore(":memory:")
    yield s
    s.close()
