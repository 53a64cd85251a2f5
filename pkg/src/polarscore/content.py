"""Partisan-axis content polarity and cluster term prominence.

The axis is the difference of mean embeddings of each party's most polarized
politicians; a user's content polarity is the cosine of their embedding with
that axis. Prominence compares smoothed relative term frequencies between the
two clusters' tweets as a log-ratio.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .embedding import UserEmbedding
from .errors import InputError

logger = logging.getLogger("polarscore")

DEFAULT_TOP_N = 10
DEFAULT_ALPHA = 0.5
DEFAULT_MIN_COUNT = 10


@dataclass
class PartisanAxis:
    axis: np.ndarray  # x_tilde - y_tilde
    x_tilde: np.ndarray
    y_tilde: np.ndarray
    x_users: list[str]  # top-n INC politicians, most positive r first
    y_users: list[str]  # top-n BJP politicians, most negative r first
    n: int


def partisan_axis(
    user_embeddings: list[UserEmbedding],
    retweet_scores: dict[str, float],
    party_of: dict[str, str],
    n: int = DEFAULT_TOP_N,
) -> PartisanAxis:
    """Difference of mean embeddings of the n most polarized politicians per party.

    INC politicians are taken from the positive end of the retweet-polarity
    scale, BJP from the negative end; each party needs at least n politicians
    holding both a score and an embedding.
    """
    if n < 1:
        raise InputError("content: axis politician count n must be >= 1")
    emb = {e.user_id: e.vector for e in user_embeddings}
    scored = [u for u in retweet_scores if u in emb and party_of.get(u) in ("INC", "BJP")]
    inc = [u for u in scored if party_of[u] == "INC"]
    bjp = [u for u in scored if party_of[u] == "BJP"]
    if len(inc) < n or len(bjp) < n:
        raise InputError(
            f"content: need {n} scored politicians per party, "
            f"have INC={len(inc)}, BJP={len(bjp)}"
        )
    inc.sort(key=lambda u: (-retweet_scores[u], u))
    bjp.sort(key=lambda u: (retweet_scores[u], u))
    x_users, y_users = inc[:n], bjp[:n]
    x_tilde = np.mean([emb[u] for u in x_users], axis=0)
    y_tilde = np.mean([emb[u] for u in y_users], axis=0)
    axis = x_tilde - y_tilde
    if np.linalg.norm(axis) == 0.0:
        raise InputError("content: partisan axis has zero norm; poles coincide")
    return PartisanAxis(axis=axis, x_tilde=x_tilde, y_tilde=y_tilde,
                        x_users=x_users, y_users=y_users, n=n)


def content_polarity(user_vector: np.ndarray, axis: PartisanAxis) -> float | None:
    """Cosine of the user's mean embedding with the partisan axis.

    Zero-norm user vectors cannot be scored and return None.
    """
    norm_u = np.linalg.norm(user_vector)
    if norm_u == 0.0:
        return None
    norm_a = np.linalg.norm(axis.axis)
    c = float(user_vector @ axis.axis / (norm_u * norm_a))
    return max(-1.0, min(1.0, c))


def content_polarity_scores(
    user_embeddings: list[UserEmbedding], axis: PartisanAxis
) -> tuple[dict[str, float], list[str]]:
    """Score every user; returns (scores, unscored user ids)."""
    scores: dict[str, float] = {}
    unscored: list[str] = []
    for e in user_embeddings:
        c = content_polarity(e.vector, axis)
        if c is None:
            unscored.append(e.user_id)
        else:
            scores[e.user_id] = c
    if unscored:
        logger.warning("content: %d users unscored (zero-norm embedding)", len(unscored))
    return scores, unscored


@dataclass
class ProminenceTable:
    rows: list[tuple[str, int, int, float]]  # (term, count_A, count_B, score_A)
    alpha: float
    min_count: int
    top_m: int | None

    def score_a(self, term: str) -> float:
        for t, _, _, s in self.rows:
            if t == term:
                return s
        raise KeyError(term)

    def score_b(self, term: str) -> float:
        return -self.score_a(term)


def prominence(
    tweets_a: list[str],
    tweets_b: list[str],
    min_count: int = DEFAULT_MIN_COUNT,
    top_m: int | None = None,
    alpha: float = DEFAULT_ALPHA,
) -> ProminenceTable:
    """Smoothed log-ratio of relative term frequencies between two tweet sets.

    Terms whose combined count falls below min_count are dropped; scores are
    antisymmetric (score_B = -score_A). With top_m set, the table keeps the
    top_m most prominent terms of each side.
    """
    if not tweets_a or not tweets_b:
        raise InputError("content: prominence needs non-empty tweet sets on both sides")
    counts_a: dict[str, int] = {}
    counts_b: dict[str, int] = {}
    for text in tweets_a:
        for tok in text.split():
            counts_a[tok] = counts_a.get(tok, 0) + 1
    for text in tweets_b:
        for tok in text.split():
            counts_b[tok] = counts_b.get(tok, 0) + 1

    vocab = sorted(t for t in set(counts_a) | set(counts_b)
                   if counts_a.get(t, 0) + counts_b.get(t, 0) >= min_count)
    if not vocab:
        raise InputError(f"content: no terms reach min_count={min_count}")
    v = len(vocab)
    total_a = sum(counts_a.get(t, 0) for t in vocab)
    total_b = sum(counts_b.get(t, 0) for t in vocab)

    rows = []
    for t in vocab:
        ca, cb = counts_a.get(t, 0), counts_b.get(t, 0)
        fa = (ca + alpha) / (total_a + alpha * v)
        fb = (cb + alpha) / (total_b + alpha * v)
        rows.append((t, ca, cb, math.log(fa / fb)))
    rows.sort(key=lambda r: (-r[3], r[0]))
    if top_m is not None and len(rows) > 2 * top_m:
        rows = rows[:top_m] + rows[-top_m:]
    return ProminenceTable(rows=rows, alpha=alpha, min_count=min_count, top_m=top_m)
