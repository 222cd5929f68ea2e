"""Sentence segmentation and the two chunking regimes.

Word-bounded chunks (whole sentences, sentence overlap) feed the
summarization stage; token-bounded sliding windows feed the vector index.
Both are pure functions, so documents can be processed in parallel.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Legal text is abbreviation-dense; a period after these tokens never ends
# a sentence. Single capital letters (initials like "A. Bhattacharya") are
# handled separately.
ABBREVIATIONS = {
    "Mr", "Mrs", "Ms", "Dr", "Hon'ble", "No", "Nos", "vs", "v",
    "Sec", "Art", "Co", "Ltd", "Pvt", "Smt", "Sri",
}

_TOKEN_RE = re.compile(r"[0-9A-Za-z]+|[^\s0-9A-Za-z]")
_TERMINAL_RE = re.compile(r"[.?!]")


@dataclass(frozen=True)
class Sentence:
    text: str
    index: int
    char_span: tuple[int, int]


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    doc_id: str
    text: str
    unit: str  # "words" | "tokens"
    start: int  # inclusive, in source units (sentence or token index)
    end: int  # exclusive
    oversize: bool = False


@dataclass
class ChunkParams:
    max_words: int = 200
    overlap_sentences: int = 2
    max_tokens: int = 1024
    overlap_tokens: int = 100

    def __post_init__(self) -> None:
        if self.max_words < 1:
            raise ValueError(f"max_words must be >= 1, got {self.max_words}")
        if self.overlap_sentences < 0:
            raise ValueError(f"overlap_sentences must be >= 0, got {self.overlap_sentences}")
        if not self.max_tokens > self.overlap_tokens >= 0:
            raise ValueError(
                f"need max_tokens > overlap_tokens >= 0, got {self.max_tokens}/{self.overlap_tokens}"
            )


def _word_before(text: str, pos: int) -> str:
    """The run of non-space characters immediately before ``pos``."""
    start = pos
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:pos]


def _is_abbreviation(word: str) -> bool:
    return word in ABBREVIATIONS or (len(word) == 1 and word.isupper())


def split_sentences(text: str) -> list[Sentence]:
    """Segment text at '.', '?', '!' followed by whitespace and an
    uppercase letter or digit, skipping known abbreviations and initials.

    Spans exclude surrounding whitespace; joining them with the inter-span
    whitespace reconstructs the source exactly.
    """
    boundaries: list[int] = []  # exclusive end offsets of sentences
    for match in _TERMINAL_RE.finditer(text):
        pos = match.start()
        after = pos + 1
        if after >= len(text) or not text[after].isspace():
            continue
        follow = after
        while follow < len(text) and text[follow].isspace():
            follow += 1
        if follow >= len(text) or not (text[follow].isupper() or text[follow].isdigit()):
            continue
        if match.group() == "." and _is_abbreviation(_word_before(text, pos)):
            continue
        boundaries.append(after)

    sentences: list[Sentence] = []
    cursor = 0
    for boundary in boundaries + [len(text)]:
        segment = text[cursor:boundary]
        stripped = segment.strip()
        if stripped:
            start = cursor + (len(segment) - len(segment.lstrip()))
            sentences.append(Sentence(stripped, len(sentences), (start, start + len(stripped))))
        cursor = boundary
    return sentences


def _word_count(sentence: Sentence) -> int:
    return len(sentence.text.split())


def chunk_by_words(
    sentences: list[Sentence],
    max_words: int = 200,
    overlap_sentences: int = 2,
    doc_id: str = "",
) -> list[Chunk]:
    """Greedy packing of whole sentences into chunks of at most ``max_words``
    words, where each chunk after the first re-starts at the last
    ``overlap_sentences`` sentences of its predecessor.

    A single sentence longer than ``max_words`` becomes its own chunk,
    flagged oversize. The next chunk always starts at least one sentence
    past the previous start, so overlap can never stall progress.
    """
    if max_words < 1:
        raise ValueError(f"max_words must be >= 1, got {max_words}")
    if overlap_sentences < 0:
        raise ValueError(f"overlap_sentences must be >= 0, got {overlap_sentences}")

    chunks: list[Chunk] = []
    n = len(sentences)
    start = 0
    while start < n:
        words = 0
        end = start
        while end < n and words + _word_count(sentences[end]) <= max_words:
            words += _word_count(sentences[end])
            end += 1
        oversize = False
        if end == start:  # single sentence exceeds the budget
            end = start + 1
            oversize = True
        text = " ".join(s.text for s in sentences[start:end])
        chunks.append(Chunk(f"{doc_id}:w{start}-{end}", doc_id, text, "words", start, end, oversize))
        if end >= n:
            break
        start = max(end - overlap_sentences, start + 1)
    return chunks


def _token_spans(text: str) -> list[tuple[int, int]]:
    return [m.span() for m in _TOKEN_RE.finditer(text)]


def tokenize(text: str) -> list[str]:
    """Deterministic tokens: maximal alphanumeric runs, else one token per
    non-whitespace character."""
    return _TOKEN_RE.findall(text)


def count_tokens(text: str) -> int:
    return sum(1 for _ in _TOKEN_RE.finditer(text))


def truncate_to_tokens(text: str, max_tokens: int) -> str:
    """Source prefix covering at most the first ``max_tokens`` tokens."""
    if max_tokens <= 0:
        return ""
    spans = _token_spans(text)
    if len(spans) <= max_tokens:
        return text
    return text[: spans[max_tokens - 1][1]]


def chunk_by_tokens(
    text: str,
    max_tokens: int = 1024,
    overlap_tokens: int = 100,
    doc_id: str = "",
) -> list[Chunk]:
    """Sliding token window with stride ``max_tokens - overlap_tokens``.

    Every chunk except possibly the last holds exactly ``max_tokens``
    tokens, consecutive chunks share exactly ``overlap_tokens``, and the
    windows jointly cover the whole token sequence in order. Chunk text is
    the source slice spanning its tokens, so the original wording survives
    round trips through re-tokenization.
    """
    if not max_tokens > overlap_tokens >= 0:
        raise ValueError(
            f"need max_tokens > overlap_tokens >= 0, got {max_tokens}/{overlap_tokens}"
        )
    spans = _token_spans(text)
    n = len(spans)
    if n == 0:
        return []

    stride = max_tokens - overlap_tokens
    chunks: list[Chunk] = []
    start = 0
    while True:
        end = min(start + max_tokens, n)
        chunk_text = text[spans[start][0] : spans[end - 1][1]]
        chunks.append(Chunk(f"{doc_id}:t{start}-{end}", doc_id, chunk_text, "tokens", start, end))
        if end >= n:
            break
        start += stride
    return chunks
