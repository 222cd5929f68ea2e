"""ROUGE-1/2/L scoring with precision, recall, and F1.

N-gram overlap uses clipped multiset matching (each reference n-gram can be
consumed once), and ROUGE-L is computed over the whole token sequences via
longest common subsequence. Empty candidate or reference sides yield 0 for
the affected ratio instead of raising, so evaluation runs survive degenerate
summaries.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

_WORD_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def normalize_for_rouge(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs. No stemming, no stopwords."""
    return _WORD_RE.findall(text.lower())


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate_tokens: list[str], reference_tokens: list[str], n: int) -> RougeScore:
    """Clipped n-gram overlap score between token lists."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cand = _ngrams(candidate_tokens, n)
    ref = _ngrams(reference_tokens, n)
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    return RougeScore(precision, recall, _f1(precision, recall))


def lcs_length(a_tokens: list[str], b_tokens: list[str]) -> int:
    """Longest common subsequence length, rolling-row dynamic program.

    O(len(a) * len(b)) time, O(min) space. ``lcs_length_reference`` keeps the
    full-table version as an independent check.
    """
    if not a_tokens or not b_tokens:
        return 0
    # Iterate over the longer sequence so the kept row is the shorter one.
    if len(b_tokens) > len(a_tokens):
        a_tokens, b_tokens = b_tokens, a_tokens
    prev = [0] * (len(b_tokens) + 1)
    curr = [0] * (len(b_tokens) + 1)
    for a_tok in a_tokens:
        for j, b_tok in enumerate(b_tokens, start=1):
            if a_tok == b_tok:
                curr[j] = prev[j - 1] + 1
            else:
                curr[j] = max(prev[j], curr[j - 1])
        prev, curr = curr, prev
    return prev[len(b_tokens)]


def lcs_length_reference(a_tokens: list[str], b_tokens: list[str]) -> int:
    """Classic full-table LCS dynamic program, retained as the oracle."""
    m, n = len(a_tokens), len(b_tokens)
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if a_tokens[i - 1] == b_tokens[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[m][n]


def rouge_l(candidate_tokens: list[str], reference_tokens: list[str]) -> RougeScore:
    """LCS-based score over whole token sequences (beta = 1)."""
    lcs = lcs_length(candidate_tokens, reference_tokens)
    precision = lcs / len(candidate_tokens) if candidate_tokens else 0.0
    recall = lcs / len(reference_tokens) if reference_tokens else 0.0
    return RougeScore(precision, recall, _f1(precision, recall))


def score_pair(candidate: str, reference: str) -> dict[str, RougeScore]:
    """All three metrics for one candidate/reference text pair."""
    cand = normalize_for_rouge(candidate)
    ref = normalize_for_rouge(reference)
    return {
        "rouge1": rouge_n(cand, ref, 1),
        "rouge2": rouge_n(cand, ref, 2),
        "rougeL": rouge_l(cand, ref),
    }
