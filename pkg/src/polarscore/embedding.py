"""Per-tweet embeddings via pluggable providers, aggregated per user.

The production path reads a precomputed embedding file (any external sentence
encoder can produce it); the fallback builds IDF-weighted means of trained
word vectors so the pipeline runs self-contained.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Tweet
from .errors import InputError
from .lexicon import WordVectors
from .vectorio import read_vectors

logger = logging.getLogger("polarscore")


@dataclass
class TweetEmbeddings:
    ids: list[str]
    matrix: np.ndarray  # (n_tweets, dimension)
    all_oov: set[str]  # ids embedded as zero vectors
    index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.ids)}

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, tweet_id: str) -> bool:
        return tweet_id in self.index

    def __getitem__(self, tweet_id: str) -> np.ndarray:
        return self.matrix[self.index[tweet_id]]


class PrecomputedProvider:
    """Pass-through provider backed by a binary embedding file keyed by tweet id."""

    def __init__(self, path: str | Path):
        keys, matrix = read_vectors(path)
        self.path = str(path)
        self.index = {k: i for i, k in enumerate(keys)}
        self.matrix = matrix

    def embed(self, tweets: list[Tweet]) -> TweetEmbeddings:
        missing = [t.id for t in tweets if t.id not in self.index]
        if missing:
            shown = ", ".join(missing[:10])
            raise InputError(
                f"embedding: {len(missing)} tweet ids missing from {self.path}; "
                f"first missing: {shown}"
            )
        rows = np.array([self.index[t.id] for t in tweets], dtype=np.intp)
        matrix = self.matrix[rows] if len(rows) else self.matrix[:0]
        return TweetEmbeddings(ids=[t.id for t in tweets], matrix=matrix, all_oov=set())


class WordMeanProvider:
    """IDF-weighted mean of word vectors; the self-contained fallback encoder."""

    def __init__(self, vectors: WordVectors, reference_texts: list[str]):
        self.vectors = vectors
        n_docs = len(reference_texts)
        df: dict[str, int] = {}
        for text in reference_texts:
            for tok in set(text.split()):
                if tok in vectors:
                    df[tok] = df.get(tok, 0) + 1
        self.idf = {
            t: math.log((1 + n_docs) / (1 + c)) + 1.0 for t, c in df.items()
        }
        self.default_idf = math.log(1 + n_docs) + 1.0  # unseen in-vocab token

    def embed(self, tweets: list[Tweet]) -> TweetEmbeddings:
        dim = self.vectors.dimension
        matrix = np.zeros((len(tweets), dim))
        all_oov: set[str] = set()
        for row, tweet in enumerate(tweets):
            acc = np.zeros(dim)
            total = 0.0
            for tok in tweet.clean_text.split():
                if tok not in self.vectors:
                    continue
                w = self.idf.get(tok, self.default_idf)
                acc += w * self.vectors.vector(tok)
                total += w
            if total == 0.0:
                all_oov.add(tweet.id)
                continue
            acc /= total
            norm = np.linalg.norm(acc)
            if norm > 0.0:
                acc /= norm
            matrix[row] = acc
        if all_oov:
            logger.warning("embedding: %d tweets had no in-vocabulary tokens", len(all_oov))
        return TweetEmbeddings(ids=[t.id for t in tweets], matrix=matrix, all_oov=all_oov)


def embed_tweets(tweets: list[Tweet], provider) -> TweetEmbeddings:
    """Embed tweets through the given provider; vectors must be finite and uniform."""
    emb = provider.embed(tweets)
    if emb.matrix.size and not np.isfinite(emb.matrix).all():
        raise InputError("embedding: provider produced non-finite vectors")
    return emb


@dataclass
class UserEmbedding:
    user_id: str
    event: str
    vector: np.ndarray
    tweet_count: int


def user_embeddings(
    tweets: list[Tweet],
    event: str,
    tweet_vectors: TweetEmbeddings,
    min_tweets: int = 1,
) -> list[UserEmbedding]:
    """Unweighted mean of each author's tweet vectors for one event.

    Authors with fewer than min_tweets embedded tweets are dropped; the drop
    count is logged, not an error.
    """
    if min_tweets < 1:
        raise InputError("embedding: min_tweets must be >= 1")
    by_user: dict[str, list[int]] = {}
    for t in tweets:
        if t.id not in tweet_vectors:
            raise InputError(f"embedding: tweet {t.id} has no vector")
        by_user.setdefault(t.author_id, []).append(tweet_vectors.index[t.id])

    out = []
    excluded = 0
    for user_id in sorted(by_user):
        rows = by_user[user_id]
        if len(rows) < min_tweets:
            excluded += 1
            continue
        vec = tweet_vectors.matrix[rows].mean(axis=0)
        out.append(UserEmbedding(user_id=user_id, event=event, vector=vec,
                                 tweet_count=len(rows)))
    if excluded:
        logger.info("embedding: excluded %d users below min_tweets=%d for %s",
                    excluded, min_tweets, event)
    return out
