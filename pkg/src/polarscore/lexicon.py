"""Event lexicons: word-vector training, seed expansion, tweet classification.

Word vectors come from a skip-gram/negative-sampling trainer over the
keyword-filtered tweets; seed keyword sets are then grown by mean cosine
similarity against the current set, and tweets are classified by whole-token
match against the expanded vocabularies.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import InputError
from .vectorio import read_vectors, write_vectors

logger = logging.getLogger("polarscore")

LR_FLOOR_FACTOR = 1e-4


@dataclass
class WordVectors:
    dimension: int
    tokens: list[str]
    vectors: np.ndarray  # (vocab, dimension)
    token_counts: dict[str, int]
    index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.tokens)}

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.index[token]]

    def unit_vectors(self) -> np.ndarray:
        norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
        return self.vectors / np.where(norms == 0.0, 1.0, norms)

    def cosine(self, a: str, b: str) -> float:
        va, vb = self.vector(a), self.vector(b)
        na, nb = np.linalg.norm(va), np.linalg.norm(vb)
        if na == 0.0 or nb == 0.0:
            return 0.0
        return float(va @ vb / (na * nb))

    def save(self, path: str | Path) -> None:
        write_vectors(path, self.tokens, self.vectors)

    @classmethod
    def load(cls, path: str | Path) -> "WordVectors":
        tokens, matrix = read_vectors(path)
        return cls(dimension=matrix.shape[1], tokens=tokens, vectors=matrix,
                   token_counts={t: 0 for t in tokens})


@dataclass
class EventLexicon:
    event: str
    seeds: list[str]
    expanded: dict[str, float]  # token -> similarity that admitted it
    tau_add: float
    rounds_run: int

    def vocabulary(self) -> set[str]:
        return set(self.seeds) | set(self.expanded)

    def to_json(self) -> dict:
        return {
            "event": self.event,
            "seeds": sorted(self.seeds),
            "expanded": {t: self.expanded[t] for t in sorted(self.expanded)},
            "tau_add": self.tau_add,
            "rounds_run": self.rounds_run,
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "EventLexicon":
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
        return cls(event=d["event"], seeds=list(d["seeds"]),
                   expanded=dict(d["expanded"]), tau_add=d["tau_add"],
                   rounds_run=d["rounds_run"])


def _build_vocab(sentences, min_count):
    counts: dict[str, int] = {}
    for sent in sentences:
        for tok in sent:
            counts[tok] = counts.get(tok, 0) + 1
    kept = {t: c for t, c in counts.items() if c >= min_count}
    # frequency-descending, token as tie break, so indices are reproducible
    tokens = sorted(kept, key=lambda t: (-kept[t], t))
    return tokens, kept


def _epoch_pairs(token_ids, sent_ids, window, rng):
    """Skip-gram (center, context) pairs with per-position reduced windows."""
    n = token_ids.shape[0]
    b = rng.integers(1, window + 1, size=n)
    centers = []
    contexts = []
    for d in range(1, window + 1):
        same = sent_ids[: n - d] == sent_ids[d:]
        left = np.nonzero(same & (b[: n - d] >= d))[0]
        centers.append(left)
        contexts.append(left + d)
        right = np.nonzero(same & (b[d:] >= d))[0]
        centers.append(right + d)
        contexts.append(right)
    centers = np.concatenate(centers)
    contexts = np.concatenate(contexts)
    order = np.argsort(centers, kind="stable")  # position-major update order
    return (token_ids[centers[order]].astype(np.int32),
            token_ids[contexts[order]].astype(np.int32))


def train_word_vectors(
    sentences: list[list[str]],
    dimension: int = 100,
    window: int = 5,
    negative_samples: int = 5,
    epochs: int = 5,
    min_count: int = 5,
    seed: int = 0,
    learning_rate: float = 0.025,
) -> WordVectors:
    """Train skip-gram word vectors with negative sampling.

    Deterministic for a fixed seed and kernel backend. Tokens occurring fewer
    than min_count times are dropped; an empty resulting vocabulary is fatal.
    """
    if dimension < 2:
        raise InputError("lexicon: dimension must be >= 2")
    if window < 1:
        raise InputError("lexicon: window must be >= 1")
    tokens, counts = _build_vocab(sentences, min_count)
    if not tokens:
        raise InputError(
            f"lexicon: empty vocabulary after min_count={min_count} filtering"
        )
    index = {t: i for i, t in enumerate(tokens)}
    vocab_size = len(tokens)

    encoded = []
    for sent in sentences:
        ids = [index[t] for t in sent if t in index]
        if len(ids) >= 2:
            encoded.append(np.asarray(ids, dtype=np.int32))
    rng = np.random.default_rng(seed)
    W = (rng.random((vocab_size, dimension)) - 0.5) / dimension
    C = np.zeros((vocab_size, dimension))
    if not encoded:
        logger.warning("lexicon: no trainable sentences (all shorter than 2 in-vocab tokens)")
        return WordVectors(dimension, tokens, W, counts)

    freq = np.array([counts[t] for t in tokens], dtype=np.float64)
    noise = freq**0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    lengths = np.array([len(s) for s in encoded])
    for epoch in range(epochs):
        order = rng.permutation(len(encoded))
        token_ids = np.concatenate([encoded[i] for i in order])
        sent_ids = np.repeat(np.arange(len(encoded)), lengths[order])
        centers, contexts = _epoch_pairs(token_ids, sent_ids, window, rng)
        n_pairs = centers.shape[0]
        # the cumsum can top out a hair below 1.0, so clamp the lookup
        negatives = np.minimum(
            np.searchsorted(noise_cdf, rng.random((n_pairs, negative_samples))),
            vocab_size - 1,
        ).astype(np.int32)
        # global-style linear decay, split across epochs
        lr_hi = learning_rate * max(1.0 - epoch / epochs, LR_FLOOR_FACTOR)
        lr_lo = learning_rate * max(1.0 - (epoch + 1) / epochs, LR_FLOOR_FACTOR)
        lrs = np.linspace(lr_hi, lr_lo, n_pairs)
        kernels.sgns_train_epoch(W, C, centers, contexts, negatives, lrs)

    if not np.isfinite(W).all():
        raise InputError("lexicon: training diverged to non-finite vectors")
    return WordVectors(dimension, tokens, W, counts)


def expand_keywords(
    seeds: set[str],
    vectors: WordVectors,
    tau_add: float = 0.7,
    max_rounds: int = 5,
    exclusion: set[str] | None = None,
) -> EventLexicon:
    """Grow a seed keyword set by mean cosine similarity to the current set.

    Each round admits every vocabulary token whose mean cosine similarity to
    the current keyword set reaches tau_add and which no other event claims;
    stops at max_rounds or at the first round that adds nothing. The admitting
    similarity is recorded per token.
    """
    exclusion = exclusion or set()
    seeds = set(seeds)
    in_vocab = sorted(s for s in seeds if s in vectors)
    if not in_vocab:
        missing = sorted(seeds)
        raise InputError(f"lexicon: no seed present in vocabulary; missing: {missing}")

    unit = vectors.unit_vectors()
    current_idx = [vectors.index[s] for s in in_vocab]
    blocked = np.zeros(len(vectors.tokens), dtype=bool)
    for i in current_idx:
        blocked[i] = True
    for t in exclusion | seeds:
        if t in vectors:
            blocked[vectors.index[t]] = True

    expanded: dict[str, float] = {}
    rounds_run = 0
    for _ in range(max_rounds):
        rounds_run += 1
        centroid = unit[current_idx].mean(axis=0)
        sims = np.clip(unit @ centroid, -1.0, 1.0)
        admit = np.nonzero(~blocked & (sims >= tau_add))[0]
        if admit.size == 0:
            break
        for i in admit:
            expanded[vectors.tokens[i]] = float(sims[i])
            blocked[i] = True
        current_idx.extend(int(i) for i in admit)
    return EventLexicon(event="", seeds=sorted(seeds), expanded=expanded,
                        tau_add=tau_add, rounds_run=rounds_run)


def classify_tweet(clean_text: str, lexicons: dict[str, EventLexicon]) -> set[str]:
    """Events whose keyword vocabulary shares at least one whole token with the text."""
    toks = set(clean_text.split())
    return {event for event, lex in lexicons.items() if toks & lex.vocabulary()}


@dataclass
class PrecisionReport:
    per_event: dict[str, float | None]  # None when an event had no positives
    macro: float | None
    positives: dict[str, int]


def evaluate_precision(labeled_sample: list[tuple[str, str, bool]]) -> PrecisionReport:
    """Precision of classifier positives against human labels.

    ``labeled_sample`` rows are (tweet_text, event, human_confirms) drawn from
    the classifier's positive set; precision per event is the confirmed
    fraction. Events with zero positives report None.
    """
    totals: dict[str, int] = {}
    confirmed: dict[str, int] = {}
    for _, event, ok in labeled_sample:
        totals[event] = totals.get(event, 0) + 1
        confirmed[event] = confirmed.get(event, 0) + (1 if ok else 0)
    per_event: dict[str, float | None] = {
        e: confirmed[e] / totals[e] for e in sorted(totals)
    }
    defined = [v for v in per_event.values() if v is not None]
    macro = sum(defined) / len(defined) if defined else None
    return PrecisionReport(per_event=per_event, macro=macro, positives=totals)
