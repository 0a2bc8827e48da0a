"""20 Newsgroups ingestion.

Parses the published tarball layout (one directory per newsgroup, one file
per message, numeric filenames) into an in-memory corpus.  Three dataset
versions are supported; each declares a fixed document count that loading
verifies.

Files are decoded as latin-1: every byte maps to exactly one character, so
nothing is ever dropped, line counts are stable, and re-encoding reproduces
the original bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import UnknownLabel, VersionMismatch

NEWSGROUP_LABELS = (
    "alt.atheism",
    "comp.graphics",
    "comp.os.ms-windows.misc",
    "comp.sys.ibm.pc.hardware",
    "comp.sys.mac.hardware",
    "comp.windows.x",
    "misc.forsale",
    "rec.autos",
    "rec.motorcycles",
    "rec.sport.baseball",
    "rec.sport.hockey",
    "sci.crypt",
    "sci.electronics",
    "sci.med",
    "sci.space",
    "soc.religion.christian",
    "talk.politics.guns",
    "talk.politics.mideast",
    "talk.politics.misc",
    "talk.religion.misc",
)

#: version name -> documented corpus size
VERSION_SIZES = {
    "original": 19997,
    "no-duplicates-18846": 18846,
    "from-subject-18828": 18828,
}

MISSING_AUTHOR = "<missing>"


@dataclass
class RawDocument:
    """One parsed message.

    `headers` is the parsed view (continuation lines joined with a single
    space); `raw_header_lines` keeps the original header block verbatim so
    serialization can round-trip the file byte-for-byte.
    """

    id: int
    label: str
    headers: list[tuple[str, str]]
    body_lines: list[str]
    quote_flags: list[bool]
    raw_header_lines: list[str] = field(default_factory=list, repr=False)
    separator_line: str = ""  # verbatim blank line ("", or "\r" in CRLF files)
    trailing_newline: bool = True
    warnings: list[str] = field(default_factory=list)

    def header(self, name: str) -> str | None:
        """Value of the first header with this name (case-insensitive)."""
        wanted = name.lower()
        for key, value in self.headers:
            if key.lower() == wanted:
                return value
        return None

    def body_text(self) -> str:
        return "\n".join(self.body_lines)


@dataclass
class Corpus:
    version: str
    documents: list[RawDocument]
    label_set: tuple[str, ...] = NEWSGROUP_LABELS

    def __len__(self) -> int:
        return len(self.documents)

    def document(self, doc_id: int, label: str | None = None) -> RawDocument | None:
        for doc in self.documents:
            if doc.id == doc_id and (label is None or doc.label == label):
                return doc
        return None

    def labels(self) -> list[str]:
        return [doc.label for doc in self.documents]


def is_quote_line(line: str) -> bool:
    """True iff the line's first non-whitespace character is '>'.

    Covers nested quotes ('>>') and indented quoting ('  > ...').  Pure and
    position-independent: depends only on this line's text.
    """
    stripped = line.lstrip()
    return stripped.startswith(">")


def _is_blank(line: str) -> bool:
    # a lone '\r' counts as blank so CRLF files split at the right spot
    return line == "" or line == "\r"


def parse_document(raw: bytes, doc_id: int, label: str) -> RawDocument:
    """Parse one raw message file.

    Headers are all lines before the first blank line, split at the first
    ':'; lines starting with whitespace continue the previous header.  When
    no blank line exists the whole file is treated as headers and a warning
    is recorded on the document (not a hard failure).
    """
    text = raw.decode("latin-1")
    trailing_newline = text.endswith("\n")
    lines = text.split("\n")
    if trailing_newline:
        lines = lines[:-1]

    warnings: list[str] = []
    separator = None
    for i, line in enumerate(lines):
        if _is_blank(line):
            separator = i
            break

    separator_line = ""
    if separator is None:
        warnings.append("missing_header_separator: no blank line, whole file treated as headers")
        header_lines = lines
        body_lines: list[str] = []
    else:
        header_lines = lines[:separator]
        separator_line = lines[separator]
        body_lines = lines[separator + 1 :]

    headers: list[tuple[str, str]] = []
    for line in header_lines:
        if line[:1] in (" ", "\t") and headers:
            name, value = headers[-1]
            headers[-1] = (name, f"{value} {line.strip()}".strip())
            continue
        name, sep, value = line.partition(":")
        if not sep:
            # malformed header line: keep it, name only
            headers.append((line.rstrip("\r"), ""))
        else:
            headers.append((name, value.strip()))

    return RawDocument(
        id=doc_id,
        label=label,
        headers=headers,
        body_lines=body_lines,
        quote_flags=[is_quote_line(line) for line in body_lines],
        raw_header_lines=header_lines,
        separator_line=separator_line,
        trailing_newline=trailing_newline,
        warnings=warnings,
    )


def serialize_document(doc: RawDocument) -> bytes:
    """Inverse of parse_document, byte-exact for latin-1 input."""
    lines = list(doc.raw_header_lines)
    if not doc.warnings:  # a separator was present in the original
        lines.append(doc.separator_line)
    lines.extend(doc.body_lines)
    text = "\n".join(lines)
    if doc.trailing_newline:
        text += "\n"
    return text.encode("latin-1")


def author_of(doc: RawDocument) -> str:
    """Author key: the first From header value, trimmed at both ends only.

    No case folding and no address extraction; two From lines identify the
    same author only when their trimmed text is identical.  Returns the
    sentinel "<missing>" when the document has no From header.
    """
    value = doc.header("From")
    if value is None:
        return MISSING_AUTHOR
    return value.strip()


def _label_dirs(root: Path) -> list[tuple[str, Path]]:
    """Newsgroup directories under root.

    The 18846 variant ships as train/test trees; any first-level directory
    that is not a newsgroup name is searched one level deeper, so both flat
    and split layouts load.
    """
    out: list[tuple[str, Path]] = []
    for entry in sorted(root.iterdir()):
        if not entry.is_dir():
            continue
        if entry.name in NEWSGROUP_LABELS:
            out.append((entry.name, entry))
            continue
        subdirs = [p for p in sorted(entry.iterdir()) if p.is_dir()]
        if subdirs and all(p.name in NEWSGROUP_LABELS for p in subdirs):
            out.extend((p.name, p) for p in subdirs)
        else:
            raise UnknownLabel(f"{entry.name!r} is not one of the 20 newsgroup names")
    return out


def load_tree(root_path: str | Path) -> list[RawDocument]:
    """Parse every message under root_path, sorted by (label, numeric id),
    so two loads of the same tree are element-wise identical."""
    root = Path(root_path)
    documents: list[RawDocument] = []
    if root.is_dir():
        for label, directory in _label_dirs(root):
            for path in directory.iterdir():
                if not path.is_file():
                    continue
                doc_id = _numeric_id(path.name)
                if doc_id is None:
                    continue  # stray non-message files (READMEs etc.)
                documents.append(parse_document(path.read_bytes(), doc_id, label))
    documents.sort(key=lambda d: (d.label, d.id))
    return documents


def _numeric_id(filename: str) -> int | None:
    # canonical distributions use bare article numbers; some repackagings
    # prefix the group name ("alt.atheism.53055") - take the numeric tail
    try:
        return int(filename)
    except ValueError:
        tail = filename.rsplit(".", 1)[-1]
        try:
            return int(tail)
        except ValueError:
            return None


def load_corpus(root_path: str | Path, version: str) -> Corpus:
    """Load every document under root_path and verify the version's size."""
    if version not in VERSION_SIZES:
        raise VersionMismatch(
            f"unknown version {version!r}; expected one of {sorted(VERSION_SIZES)}"
        )
    documents = load_tree(root_path)
    expected = VERSION_SIZES[version]
    if len(documents) != expected:
        raise VersionMismatch(
            f"version {version!r} declares {expected} documents, found {len(documents)}"
        )
    return Corpus(version=version, documents=documents)


def export_jsonl(corpus: Corpus, path: str | Path) -> int:
    """Write the normalized corpus as line-delimited JSON records.

    One object per document: {id, label, headers, body, quote_flags}.
    Returns the number of records written.
    """
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            record = {
                "id": doc.id,
                "label": doc.label,
                "headers": [[name, value] for name, value in doc.headers],
                "body": doc.body_lines,
                "quote_flags": doc.quote_flags,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count
