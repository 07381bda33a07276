"""MediaWiki export ingestion: XML parsing, batched fetching, entity pages.

Exports carry one ``page`` element per article with ``title``, optional
``redirect``, ``revision`` and ``text`` children. Parsing keeps the text
content verbatim; fetching hits a configurable export endpoint in polite,
sequential batches.
"""

from __future__ import annotations

import re
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

import requests

from . import npchunk, wikitext


class IngestError(Exception):
    pass


class MalformedXml(IngestError):
    """XML parse failure, carrying the approximate byte offset."""

    def __init__(self, message: str, byte_offset: int | None = None) -> None:
        suffix = f" (byte offset {byte_offset})" if byte_offset is not None else ""
        super().__init__(message + suffix)
        self.byte_offset = byte_offset


class MissingTitle(IngestError):
    pass


class FetchError(IngestError):
    pass


class HttpError(FetchError):
    def __init__(self, status: int) -> None:
        super().__init__(f"HTTP status {status}")
        self.status = status


class Timeout(FetchError):
    pass


class TooManyRetries(FetchError):
    def __init__(self, attempts: int, last_error: Exception) -> None:
        super().__init__(f"gave up after {attempts} attempts: {last_error}")
        self.attempts = attempts
        self.last_error = last_error


@dataclass(frozen=True)
class WikiArticle:
    title: str
    redirect_target: str | None = None
    wikitext: str = ""
    revision_id: str | None = None


@dataclass(frozen=True)
class NewEntityPage:
    """An entity ready for insertion, with both candidate lists precomputed."""

    entity_name: str
    first_paragraph: str
    links_list: list[str]
    noun_list: list[str]


@dataclass(frozen=True)
class Skipped:
    """An article excluded from annotation, with the reason why."""

    reason: str  # "redirect" | "empty"


@dataclass
class FetchConfig:
    batch_size: int = 50
    delay: float = 1.0
    attempts: int = 3
    backoff: float = 0.5
    timeout: float = 30.0


_REDIRECT_RE = re.compile(r"\s*#REDIRECT\b", re.I)


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _byte_offset(xml: bytes, line: int, column: int) -> int:
    lines = xml.split(b"\n")
    return sum(len(l) + 1 for l in lines[: line - 1]) + column


def parse_export_xml(xml: bytes) -> list[WikiArticle]:
    """All articles of an export document, titles and text kept verbatim."""
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        line, column = exc.position
        raise MalformedXml(str(exc), _byte_offset(xml, line, column)) from exc

    articles = []
    for page in root.iter():
        if _localname(page.tag) != "page":
            continue
        title = None
        redirect = None
        revision_id = None
        text = ""
        for child in page:
            name = _localname(child.tag)
            if name == "title":
                title = child.text or ""
            elif name == "redirect":
                redirect = child.get("title") or (child.text or "")
            elif name == "revision":
                for sub in child:
                    subname = _localname(sub.tag)
                    if subname == "id":
                        revision_id = sub.text
                    elif subname == "text":
                        text = sub.text or ""
        if not title:
            raise MissingTitle("page element without a title")
        if redirect is None and _REDIRECT_RE.match(text):
            links = wikitext.extract_internal_links(text.split("\n", 1)[0])
            redirect = links[0].target if links else ""
        articles.append(
            WikiArticle(
                title=title,
                redirect_target=redirect,
                wikitext=text,
                revision_id=revision_id,
            )
        )
    return articles


def serialize_export_xml(articles: list[WikiArticle]) -> bytes:
    """An export document for the given articles; parse_export_xml inverts it."""
    root = ET.Element("mediawiki")
    for article in articles:
        page = ET.SubElement(root, "page")
        ET.SubElement(page, "title").text = article.title
        if article.redirect_target is not None:
            ET.SubElement(page, "redirect", title=article.redirect_target)
        revision = ET.SubElement(page, "revision")
        if article.revision_id is not None:
            ET.SubElement(revision, "id").text = article.revision_id
        ET.SubElement(revision, "text").text = article.wikitext
    return ET.tostring(root, encoding="UTF-8", xml_declaration=True)


def _request_batch(endpoint: str, batch: list[str], config: FetchConfig) -> bytes:
    last_error: Exception = FetchError("no attempts made")
    for attempt in range(config.attempts):
        if attempt:
            time.sleep(config.backoff * (2 ** (attempt - 1)))
        try:
            response = requests.post(
                endpoint,
                data={"pages": "\n".join(batch), "curonly": "1", "action": "submit"},
                timeout=config.timeout,
            )
        except requests.Timeout as exc:
            last_error = Timeout(str(exc))
            continue
        except requests.RequestException as exc:
            last_error = FetchError(str(exc))
            continue
        if response.status_code >= 500:
            last_error = HttpError(response.status_code)
            continue
        if response.status_code >= 400:
            raise HttpError(response.status_code)
        return response.content
    raise TooManyRetries(config.attempts, last_error)


def fetch_export(
    titles: list[str], endpoint: str, config: FetchConfig | None = None
) -> bytes:
    """Export XML for the titles, fetched in sequential batches.

    Batches are retried with backoff; a politeness delay separates them.
    The per-batch page elements are concatenated into one document.
    """
    config = config or FetchConfig()
    pages: list[ET.Element] = []
    for start in range(0, len(titles), config.batch_size):
        if start and config.delay:
            time.sleep(config.delay)
        batch = titles[start : start + config.batch_size]
        content = _request_batch(endpoint, batch, config)
        try:
            root = ET.fromstring(content)
        except ET.ParseError as exc:
            line, column = exc.position
            raise MalformedXml(str(exc), _byte_offset(content, line, column)) from exc
        pages.extend(el for el in root.iter() if _localname(el.tag) == "page")
    combined = ET.Element("mediawiki")
    combined.extend(pages)
    return ET.tostring(combined, encoding="UTF-8", xml_declaration=True)


def build_entity_page(article: WikiArticle) -> NewEntityPage | Skipped:
    """Turn an article into an annotation unit with both candidate lists.

    Redirects are aliases, not entities, and are skipped; so are articles
    with no extractable lead. Both candidate lists are precomputed here so
    the serving path stays read-only over parse results.
    """
    if article.redirect_target is not None:
        return Skipped("redirect")
    try:
        lead = wikitext.isolate_lead(article.wikitext)
    except wikitext.EmptyArticle:
        return Skipped("empty")
    return NewEntityPage(
        entity_name=article.title,
        first_paragraph=lead.lead_plain,
        links_list=[link.target for link in lead.links],
        noun_list=npchunk.extract_noun_phrases(lead.lead_plain),
    )
