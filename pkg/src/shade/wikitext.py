"""Lead-section parsing for raw MediaWiki markup.

Articles exported from a MediaWiki site open with template "structures"
(infobox, DEFAULTSORT, grids) wrapped in ``{{ ... }}``, followed by the lead
paragraph. The functions here skip those structures, isolate the lead, pull
out its internal ``[[ ... ]]`` links, and reduce markup to plain text.

Brace pairs are counted non-overlapping: after a ``{{`` or ``}}`` is matched,
the scan advances past both characters, so ``}}}}`` is exactly two closers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class EmptyArticle(Exception):
    """Raised when no lead paragraph can be isolated from an article."""


@dataclass(frozen=True)
class LinkTarget:
    """One internal link: the referenced page title and its rendered text."""

    target: str
    display: str


@dataclass(frozen=True)
class LeadExtract:
    """The isolated lead section of an article.

    ``structures_end`` is the index of the second ``}`` of the last closing
    ``}}`` seen before the lead (0 when the article has no leading
    structures).
    """

    lead_wikitext: str
    lead_plain: str
    links: list[LinkTarget] = field(default_factory=list)
    structures_end: int = 0


_EXCLUDED_NAMESPACES = ("file:", "image:", "category:")


def escape_structures(text: str) -> tuple[str, int]:
    """Skip the leading ``{{ ... }}`` structures of an article.

    Scans left to right counting non-overlapping ``{{`` and ``}}`` pairs.
    The first ``[[`` encountered while the counts are balanced marks the end
    of the structures; the suffix starting there is returned together with
    the index of the second character of the most recent ``}}``. When no
    such link exists the full text is returned unchanged.
    """
    opening = 0
    closing = 0
    last_curl_index = 0
    i = 0
    n = len(text)
    while i < n - 1:
        pair = text[i : i + 2]
        if pair == "{{":
            opening += 1
            i += 2
        elif pair == "}}":
            closing += 1
            last_curl_index = i + 1
            i += 2
        elif pair == "[[" and opening == closing:
            return text[i:], last_curl_index
        else:
            i += 1
    return text, last_curl_index


def _first_paragraph_after_heading(text: str) -> str | None:
    """First non-empty, non-heading line after the first ``==`` heading."""
    lines = text.split("\n")
    for pos, line in enumerate(lines):
        if line.strip().startswith("=="):
            for candidate in lines[pos + 1 :]:
                stripped = candidate.strip()
                if stripped and not stripped.startswith("=="):
                    return stripped
            return None
    return None


def isolate_lead(text: str) -> LeadExtract:
    """Isolate the lead paragraph of an article and derive its candidates.

    The lead is the text after the last structure-closing ``}}``, cut at the
    first newline (a preceding carriage return is trimmed). When that slice
    is empty or is a ``==`` heading, the first non-empty paragraph after the
    first heading is used instead. Links and plain text are derived from the
    isolated lead only, so links living inside an infobox never surface.

    Raises EmptyArticle when neither rule yields any text.
    """
    _, structures_end = escape_structures(text)
    after = text[structures_end + 1 :] if structures_end > 0 else text
    after = after.lstrip()
    lead = after.split("\n", 1)[0].rstrip("\r").strip()
    if not lead or lead.startswith("=="):
        fallback = _first_paragraph_after_heading(after)
        if fallback is None:
            raise EmptyArticle("no lead paragraph found")
        lead = fallback.rstrip("\r").strip()
    return LeadExtract(
        lead_wikitext=lead,
        lead_plain=strip_markup(lead),
        links=extract_internal_links(lead),
        structures_end=structures_end,
    )


def _link_spans(text: str) -> list[tuple[int, int, str]]:
    """All well-formed ``[[ ... ]]`` spans as (start, end, inner) triples.

    ``end`` points past the closing ``]]``. An opener whose span would
    swallow a nested ``[[`` is treated as stray and skipped, so the inner
    link is still found; unterminated openers are skipped likewise.
    """
    spans = []
    i = 0
    n = len(text)
    while i < n:
        start = text.find("[[", i)
        if start < 0:
            break
        end = text.find("]]", start + 2)
        if end < 0:
            break
        inner = text[start + 2 : end]
        nested = inner.find("[[")
        if nested >= 0:
            i = start + 2
            continue
        spans.append((start, end + 2, inner))
        i = end + 2
    return spans


def extract_internal_links(lead_wikitext: str) -> list[LinkTarget]:
    """Internal links of a lead, in order of occurrence.

    Piped links keep only the part before the first ``|`` as the target;
    ``#fragment`` suffixes are stripped from targets. File, Image and
    Category namespace links are dropped, duplicates are removed keeping
    the first occurrence, and malformed spans are skipped.
    """
    links: list[LinkTarget] = []
    seen: set[str] = set()
    for _, _, inner in _link_spans(lead_wikitext):
        target, piped, display = inner.partition("|")
        target = target.split("#", 1)[0].strip().lstrip(":")
        display = display.strip() if piped else inner.strip()
        if not target or "[" in target or "]" in target:
            continue
        if target.lower().startswith(_EXCLUDED_NAMESPACES):
            continue
        if target in seen:
            continue
        seen.add(target)
        links.append(LinkTarget(target=target, display=display))
    return links


def first_link(text: str) -> LinkTarget | None:
    """First internal link of the article's lead; None when the lead has no
    links or no lead can be isolated. Baseline signal for statistics only."""
    try:
        extract = isolate_lead(text)
    except EmptyArticle:
        return None
    return extract.links[0] if extract.links else None


_COMMENT_RE = re.compile(r"<!--.*?(?:-->|$)", re.S)
_REF_SELFCLOSED_RE = re.compile(r"<ref\b[^>]*/\s*>", re.I)
_REF_PAIR_RE = re.compile(r"<ref\b[^>]*>.*?</ref\s*>", re.I | re.S)
_REF_OPEN_RE = re.compile(r"<ref\b.*", re.I | re.S)
_EXT_LINK_TEXT_RE = re.compile(r"\[(?:https?|ftp)://[^\s\]]*\s+([^\]]*)\]", re.I)
_EXT_LINK_BARE_RE = re.compile(r"\[(?:https?|ftp)://[^\s\]]*\]", re.I)
_SPACE_RUN_RE = re.compile(r"[ \t]{2,}")


def _drop_structures(text: str) -> str:
    """Remove balanced ``{{ ... }}`` spans (non-overlapping pair counting).

    An opener that never closes removes everything to the end of the text.
    """
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text.startswith("{{", i):
            depth = 1
            j = i + 2
            while j < n and depth:
                if text.startswith("{{", j):
                    depth += 1
                    j += 2
                elif text.startswith("}}", j):
                    depth -= 1
                    j += 2
                else:
                    j += 1
            if depth:
                break
            i = j
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _replace_links(text: str) -> str:
    """Replace ``[[A|B]]`` with B and ``[[A]]`` with A; stray brackets stay
    behind for the cleanup pass."""
    out = []
    pos = 0
    for start, end, inner in _link_spans(text):
        out.append(text[pos:start])
        _, piped, display = inner.partition("|")
        out.append(display if piped else inner)
        pos = end
    out.append(text[pos:])
    return "".join(out)


def _strip_once(text: str) -> str:
    s = _COMMENT_RE.sub("", text)
    s = _REF_SELFCLOSED_RE.sub("", s)
    s = _REF_PAIR_RE.sub("", s)
    s = _REF_OPEN_RE.sub("", s)
    s = _drop_structures(s)
    s = _replace_links(s)
    s = _EXT_LINK_TEXT_RE.sub(r"\1", s)
    s = _EXT_LINK_BARE_RE.sub("", s)
    s = s.replace("'''", "").replace("''", "")
    for leftover in ("[[", "]]", "{{", "}}"):
        s = s.replace(leftover, "")
    s = _SPACE_RUN_RE.sub(" ", s)
    return s.strip()

def strip_markup(wikitext: str) -> str:
    """Reduce wikitext to plain text.

    Links keep their rendered text, templates, refs and comments vanish,
    bold/italic quoting is unwrapped, external ``[url text]`` links keep
    only the text, and space runs collapse. The pass repeats until the
    text is stable, which also makes the function idempotent on any input.
    """
    current = wikitext
    while True:
        stripped = _strip_once(current)
        if stripped == current:
            return current
        current = stripped
