"""Whitelist-based HTML cleaning for assessor display, plus plain-text extraction.

Cleaned documents keep readable structure (headings, paragraphs, lists,
tables, anchors) and lose everything else: scripts, styling, embedded
objects, event handlers and presentational attributes. The output renders
with the browser's default black-on-white styling.
"""

from __future__ import annotations

from html import escape
from html.parser import HTMLParser
from urllib.parse import urlsplit

# Elements removed together with their content. These never contribute
# visible page text, so extract_text skips exactly the same set.
STRIP_WITH_CONTENT = frozenset({
    "script", "style", "object", "iframe", "noscript", "applet", "svg",
    "canvas", "template", "head", "title",
})

# Void elements have no end tag; they must not enter the open-tag stack.
_VOID = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link",
    "meta", "param", "source", "track", "wbr",
})

# Structural tags preserved in the output.
KEEP = frozenset({
    "a", "p", "br", "hr", "h1", "h2", "h3", "h4", "h5", "h6",
    "ul", "ol", "li", "dl", "dt", "dd",
    "table", "thead", "tbody", "tfoot", "tr", "td", "th", "caption",
    "blockquote", "pre", "code", "em", "strong", "b", "i", "u",
    "sub", "sup", "div", "span",
})

_KEPT_ATTRS = {
    "a": ("href",),
    "td": ("colspan", "rowspan"),
    "th": ("colspan", "rowspan"),
}

_SAFE_SCHEMES = frozenset({"", "http", "https", "mailto", "ftp"})


def _safe_href(value: str) -> bool:
    try:
        scheme = urlsplit(value.strip()).scheme.lower()
    except ValueError:
        return False
    return scheme in _SAFE_SCHEMES


class _Cleaner(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self.open_tags: list[str] = []
        self.strip_stack: list[str] = []
        self.emitted_tag = False

    def handle_starttag(self, tag, attrs):
        if tag in _VOID:
            if not self.strip_stack and tag in KEEP:
                self.parts.append(f"<{tag}>")
                self.emitted_tag = True
            return
        if tag in STRIP_WITH_CONTENT:
            self.strip_stack.append(tag)
            return
        if self.strip_stack or tag not in KEEP:
            return
        rendered = ""
        for name, value in attrs:
            if name not in _KEPT_ATTRS.get(tag, ()):
                continue
            if value is None:
                continue
            if tag == "a" and name == "href" and not _safe_href(value):
                continue
            rendered += f' {name}="{escape(value, quote=True)}"'
        self.parts.append(f"<{tag}{rendered}>")
        self.open_tags.append(tag)
        self.emitted_tag = True

    def handle_endtag(self, tag):
        if tag in self.strip_stack:
            while self.strip_stack:
                if self.strip_stack.pop() == tag:
                    break
            return
        if self.strip_stack or tag not in KEEP or tag not in self.open_tags:
            return
        # Close intervening tags so the output is always well formed.
        while self.open_tags:
            top = self.open_tags.pop()
            self.parts.append(f"</{top}>")
            if top == tag:
                break

    def handle_data(self, data):
        if not self.strip_stack:
            self.parts.append(escape(data, quote=False))

    def finish(self) -> str:
        while self.open_tags:
            self.parts.append(f"</{self.open_tags.pop()}>")
        return "".join(self.parts)


class _TextExtractor(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self.strip_stack: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag in _VOID:
            return
        if tag in STRIP_WITH_CONTENT:
            self.strip_stack.append(tag)

    def handle_endtag(self, tag):
        if tag in self.strip_stack:
            while self.strip_stack:
                if self.strip_stack.pop() == tag:
                    break

    def handle_data(self, data):
        if not self.strip_stack:
            self.chunks.append(data)


def decode_html(raw: bytes) -> tuple[str, bool]:
    """Decode document bytes, falling back to lossy replacement.

    Returns (text, lossy): lossy is True when undecodable byte sequences
    were replaced.
    """
    try:
        return raw.decode("utf-8"), False
    except UnicodeDecodeError:
        return raw.decode("utf-8", errors="replace"), True


def clean_document(raw: bytes | str) -> str:
    """Reduce a web page to display-safe markup.

    The result contains only whitelisted structural tags, anchors keep only
    safe href targets, and script/style/object content is gone entirely.
    A page with no markup at all is wrapped in a single <pre> block.
    Cleaning is idempotent.
    """
    text = decode_html(raw)[0] if isinstance(raw, bytes) else raw
    cleaner = _Cleaner()
    cleaner.feed(text)
    cleaner.close()
    out = cleaner.finish()
    if not cleaner.emitted_tag and out.strip():
        out = f"<pre>{out}</pre>"
    return out


def extract_text(html: str) -> str:
    """Whitespace-normalized visible text of a page (scripts, styles and
    other non-rendered content excluded)."""
    extractor = _TextExtractor()
    extractor.feed(html)
    extractor.close()
    return " ".join("".join(extractor.chunks).split())


def word_count(raw: bytes | str) -> int:
    text = decode_html(raw)[0] if isinstance(raw, bytes) else raw
    extracted = extract_text(text)
    return len(extracted.split()) if extracted else 0
