"""Synthetic-world generator with a recorded ground truth.

Every pipeline stage gets a planted signal it can be scored against: stance
vocabularies and antipodal embedding directions per event, a two-community
stochastic block model for retweets (with a per-side spine so each side is
connected), log-normal followers, and retweet counts tied to planted
regression coefficients. One RNG drives everything, so output files are
byte-identical for a fixed spec.
"""

import json
import math
import re
from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path

import numpy as np

from .corpus import (
    CATEGORIES,
    Tweet,
    UserProfile,
    format_timestamp,
    parse_timestamp,
    preprocess,
    write_tweets_jsonl,
    write_users_csv,
)
from .errors import InputError
from .vectorio import write_vectors

EVENT_NAME_RE = re.compile(r"^[a-z0-9]+$")
KNOWN_EVENT_SEEDS = {
    "farmers": ["#farmersprotests", "#delhichalo"],
    "citizenship": ["#caanrc", "#caa"],
    "pandemic": ["covid2019", "coronavirus"],
}
WEEK_SECONDS = 7 * 24 * 3600


@dataclass
class WorldSpec:
    seed: int = 7
    politicians_per_party: int = 100
    influencers: int = 300
    events: tuple = ("farmers", "citizenship")
    seed_keywords: dict | None = None  # event -> list of keywords
    p_in: float = 0.03
    p_out: float = 0.002
    embedding_dimension: int = 64
    embedding_noise: float = 0.06
    side_vocab_size: int = 30
    common_vocab_size: int = 20
    filler_vocab_size: int = 40
    offtopic_vocab_size: int = 40
    politician_event_tweets: tuple = (6, 10)
    influencer_event_tweets: tuple = (5, 9)
    offtopic_tweets: tuple = (5, 9)
    adversarial_fraction: float = 0.05
    followers_mu: float = 8.0
    followers_sigma: float = 1.5
    regression_intercept: float = 2.0
    beta_polarity: float = 1.9
    beta_log_followers: float = 0.8
    regression_noise: float = 0.3
    start: str = "2021-01-04T00:00:00Z"
    weeks: int = 8
    burst_week_index: int = 2
    burst_fraction: float = 0.4
    cohort_event_higher: int | None = None  # None = 84% of the cohort, rounded

    def __post_init__(self):
        if not self.events:
            raise InputError("datagen: need at least one event")
        for e in self.events:
            if not EVENT_NAME_RE.match(e):
                raise InputError(f"datagen: event name {e!r} must be lowercase alphanumeric")
        for p, name in ((self.p_in, "p_in"), (self.p_out, "p_out"),
                        (self.adversarial_fraction, "adversarial_fraction"),
                        (self.burst_fraction, "burst_fraction")):
            if not 0.0 <= p <= 1.0:
                raise InputError(f"datagen: {name}={p} outside [0, 1]")
        if min(self.side_vocab_size, self.common_vocab_size,
               self.filler_vocab_size, self.offtopic_vocab_size) < 1:
            raise InputError("datagen: vocabulary blocks must be non-empty")
        if self.politicians_per_party < 2 or self.influencers < 4:
            raise InputError("datagen: need >= 2 politicians per party and >= 4 influencers")
        if not 0 <= self.burst_week_index < self.weeks:
            raise InputError("datagen: burst_week_index outside the generated weeks")
        if self.embedding_dimension < 2:
            raise InputError("datagen: embedding_dimension must be >= 2")

    def keywords_for(self, event: str) -> list[str]:
        if self.seed_keywords and event in self.seed_keywords:
            kws = list(self.seed_keywords[event])
        else:
            kws = KNOWN_EVENT_SEEDS.get(event, [f"#{event}", f"#{event}live"])
        for kw in kws:
            if preprocess(kw) != kw:
                raise InputError(f"datagen: seed keyword {kw!r} not normalization-stable")
        return kws


@dataclass
class GeneratedWorld:
    spec: WorldSpec
    output_dir: Path
    tweets_path: Path
    users_path: Path
    ground_truth_path: Path
    embeddings_path: Path
    ground_truth: dict = field(repr=False, default_factory=dict)


def _vocab_block(prefix: str, size: int) -> list[str]:
    return [f"{prefix}{i:02d}" for i in range(size)]


def _unit_vector(rng, dim: int) -> np.ndarray:
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def generate(spec: WorldSpec, output_dir: str | Path) -> GeneratedWorld:
    """Write tweets.jsonl, users.csv, embeddings.bin, and ground_truth.json."""
    rng = np.random.default_rng(spec.seed)
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    users: dict[str, UserProfile] = {}
    side_of: dict[str, str] = {}
    for party, tag in (("INC", "inc"), ("BJP", "bjp")):
        for i in range(spec.politicians_per_party):
            uid = f"pol_{tag}_{i:03d}"
            users[uid] = UserProfile(
                id=uid, handle=uid, role="politician", party_or_category=party,
                followers_count=int(rng.lognormal(spec.followers_mu + 1.0,
                                                  spec.followers_sigma)),
            )
            side_of[uid] = "X" if party == "INC" else "Y"
    influencer_ids = [f"inf_{i:03d}" for i in range(spec.influencers)]
    for i, uid in enumerate(influencer_ids):
        users[uid] = UserProfile(
            id=uid, handle=uid, role="influencer",
            party_or_category=CATEGORIES[i % len(CATEGORIES)],
            followers_count=int(rng.lognormal(spec.followers_mu, spec.followers_sigma)),
        )
        side_of[uid] = "X" if i % 2 == 0 else "Y"

    # planted polarity magnitudes: distinct values so quartile cuts are crisp
    magnitudes = dict(zip(influencer_ids,
                          rng.permutation(np.linspace(0.2, 0.95, spec.influencers))))
    for uid in users:
        if users[uid].is_politician:
            magnitudes[uid] = float(rng.uniform(0.5, 0.98))

    # fourth-quartile cohort and its planted event-vs-other outcome flags
    inf_mags = np.array([magnitudes[u] for u in influencer_ids])
    q3 = float(np.quantile(inf_mags, 0.75))
    cohort = sorted(u for u in influencer_ids if magnitudes[u] > q3)
    n_higher = (spec.cohort_event_higher if spec.cohort_event_higher is not None
                else round(0.84 * len(cohort)))
    if n_higher > len(cohort):
        raise InputError(
            f"datagen: cohort_event_higher={n_higher} exceeds cohort size {len(cohort)}"
        )
    cohort_order = [cohort[i] for i in rng.permutation(len(cohort))]
    event_higher = {u: i < n_higher for i, u in enumerate(cohort_order)}
    for u in influencer_ids:
        if u not in event_higher:
            event_higher[u] = bool(rng.random() < 0.5)

    # per-user retweet-count constants from the planted regression
    rc_event: dict[str, int] = {}
    rc_other: dict[str, int] = {}
    y_planted: dict[str, float] = {}
    for u in influencer_ids:
        y = (spec.regression_intercept
             + spec.beta_polarity * magnitudes[u]
             + spec.beta_log_followers * math.log1p(users[u].followers_count)
             + rng.normal(0.0, spec.regression_noise))
        y_planted[u] = y
        ev = max(2, round(math.expm1(y)))
        if event_higher[u]:
            other = ev // 2
        elif rng.random() < 0.5:
            other = ev  # equal medians: strictly-greater flag stays false
        else:
            other = ev * 2 + 1
        rc_event[u], rc_other[u] = ev, other

    events = list(spec.events)
    seeds = {e: spec.keywords_for(e) for e in events}
    side_vocab = {e: {"X": _vocab_block(f"{e}x", spec.side_vocab_size),
                      "Y": _vocab_block(f"{e}y", spec.side_vocab_size)}
                  for e in events}
    common_vocab = {e: _vocab_block(f"{e}common", spec.common_vocab_size)
                    for e in events}
    filler = _vocab_block("filler", spec.filler_vocab_size)
    offtopic_vocab = _vocab_block("chat", spec.offtopic_vocab_size)
    directions = {e: _unit_vector(rng, spec.embedding_dimension) for e in events}

    base_time = parse_timestamp(spec.start)
    tweets: list[Tweet] = []
    vectors: dict[str, np.ndarray] = {}
    classifier_sample: list[dict] = []
    counter = 0

    def next_id() -> str:
        nonlocal counter
        counter += 1
        return f"t{counter:07d}"

    def stamp(burst_biased: bool):
        if burst_biased and rng.random() < spec.burst_fraction:
            week = spec.burst_week_index
        else:
            week = int(rng.integers(0, spec.weeks))
        offset = int(rng.integers(0, WEEK_SECONDS))
        return base_time + timedelta(seconds=week * WEEK_SECONDS + offset)

    def decorate(text: str) -> str:
        roll = rng.random()
        if roll < 0.25:
            return text + f" https://t.co/{counter:x}"
        if roll < 0.35:
            return text + " \U0001F525"
        if roll < 0.5:
            return text + "!!!"
        return text

    def event_text(event: str, side: str) -> str:
        # event tweets draw only from the event's own blocks so the planted
        # lexicons stay separable under cosine expansion
        kw = seeds[event][int(rng.integers(0, len(seeds[event])))]
        toks = [kw]
        toks += list(rng.choice(side_vocab[event][side], size=int(rng.integers(4, 8))))
        toks += list(rng.choice(common_vocab[event], size=int(rng.integers(2, 4))))
        return decorate(" ".join(toks))

    def stance_vector(event: str, side: str) -> np.ndarray:
        sign = 1.0 if side == "X" else -1.0
        return (sign * directions[event]
                + rng.normal(0.0, spec.embedding_noise, spec.embedding_dimension))

    def noise_vector() -> np.ndarray:
        return rng.normal(0.0, spec.embedding_noise, spec.embedding_dimension)

    def tweet_rc(uid: str, on_event: bool) -> int:
        if users[uid].is_politician:
            return int(rng.lognormal(3.0, 1.0))
        return rc_event[uid] if on_event else rc_other[uid]

    ordered_users = sorted(users)
    for event in events:
        for uid in ordered_users:
            lo, hi = (spec.politician_event_tweets if users[uid].is_politician
                      else spec.influencer_event_tweets)
            for _ in range(int(rng.integers(lo, hi + 1))):
                tid = next_id()
                tweets.append(Tweet(id=tid, author_id=uid, created_at=stamp(False),
                                    raw_text=event_text(event, side_of[uid]),
                                    retweet_count=tweet_rc(uid, True)))
                vectors[tid] = stance_vector(event, side_of[uid])
                classifier_sample.append({"tweet_id": tid, "event": event,
                                          "on_topic": True})

    for uid in ordered_users:
        if users[uid].is_politician:
            continue
        for _ in range(int(rng.integers(spec.offtopic_tweets[0],
                                        spec.offtopic_tweets[1] + 1))):
            tid = next_id()
            toks = list(rng.choice(offtopic_vocab, size=int(rng.integers(4, 8))))
            toks += list(rng.choice(filler, size=int(rng.integers(2, 4))))
            adversarial = rng.random() < spec.adversarial_fraction
            if adversarial:
                event = events[int(rng.integers(0, len(events)))]
                kw = seeds[event][int(rng.integers(0, len(seeds[event])))]
                toks.insert(int(rng.integers(0, len(toks))), kw)
                classifier_sample.append({"tweet_id": tid, "event": event,
                                          "on_topic": False})
            tweets.append(Tweet(id=tid, author_id=uid, created_at=stamp(False),
                                raw_text=decorate(" ".join(toks)),
                                retweet_count=tweet_rc(uid, False)))
            vectors[tid] = noise_vector()

    # retweet relations per event: block model plus a per-side spine so each
    # side forms one connected component
    retweet_pairs: dict[str, list[tuple[str, str]]] = {}
    for event in events:
        x_side = [u for u in ordered_users if side_of[u] == "X"]
        y_side = [u for u in ordered_users if side_of[u] == "Y"]
        linked: list[tuple[str, str]] = []
        for side in (x_side, y_side):
            iu, ju = np.triu_indices(len(side), 1)
            hit = rng.random(iu.size) < spec.p_in
            linked += [(side[a], side[b]) for a, b in zip(iu[hit], ju[hit])]
            for a, b in zip(side, side[1:]):
                linked.append((a, b))
        gx, gy = np.meshgrid(np.arange(len(x_side)), np.arange(len(y_side)),
                             indexing="ij")
        hit = rng.random(gx.size) < spec.p_out
        linked += [(x_side[a], y_side[b])
                   for a, b in zip(gx.ravel()[hit], gy.ravel()[hit])]
        retweet_pairs[event] = linked
        for a, b in linked:
            roll = rng.random()
            if roll < 0.6:
                directions_pair = ((a, b), (b, a))
            elif roll < 0.8:
                directions_pair = ((a, b), (a, b))
            else:
                directions_pair = ((b, a), (b, a))
            for src, dst in directions_pair:
                tid = next_id()
                text = f"RT @{users[dst].handle}: {event_text(event, side_of[dst])}"
                tweets.append(Tweet(id=tid, author_id=src, created_at=stamp(True),
                                    raw_text=text, retweeted_user_id=dst,
                                    retweet_count=tweet_rc(src, True)))
                vectors[tid] = stance_vector(event, side_of[src])
                classifier_sample.append({"tweet_id": tid, "event": event,
                                          "on_topic": True})

    burst_start = base_time + timedelta(seconds=spec.burst_week_index * WEEK_SECONDS)
    iso = burst_start.isocalendar()
    ground_truth = {
        "seed": spec.seed,
        "counts": {
            "users": len(users),
            "tweets": len(tweets),
            "politicians_per_party": spec.politicians_per_party,
            "influencers": spec.influencers,
        },
        "users": {
            uid: {
                "role": users[uid].role,
                "party": users[uid].party,
                "category": users[uid].category,
                "stance": side_of[uid],
                "polarity": magnitudes[uid],
                "followers": users[uid].followers_count,
                "event_higher": event_higher.get(uid),
                "median_event_retweets": rc_event.get(uid),
                "median_other_retweets": rc_other.get(uid),
                "y_planted": y_planted.get(uid),
            }
            for uid in ordered_users
        },
        "events": {
            e: {
                "seed_keywords": seeds[e],
                "side_vocab": side_vocab[e],
                "common_vocab": common_vocab[e],
                "direction": directions[e].tolist(),
                "p_in": spec.p_in,
                "p_out": spec.p_out,
                "retweet_pair_count": len(retweet_pairs[e]),
            }
            for e in events
        },
        "filler_vocab": filler,
        "offtopic_vocab": offtopic_vocab,
        "classifier_sample": sorted(classifier_sample,
                                    key=lambda r: (r["tweet_id"], r["event"])),
        "regression": {
            "intercept": spec.regression_intercept,
            "beta_polarity": spec.beta_polarity,
            "beta_log_followers": spec.beta_log_followers,
            "noise_sigma": spec.regression_noise,
        },
        "cohort": {
            "q3_polarity": q3,
            "members": cohort,
            "event_higher_count": n_higher,
            "expected_fraction": n_higher / len(cohort) if cohort else 0.0,
        },
        "burst_week": f"{iso[0]}-W{iso[1]:02d}",
        "weeks": spec.weeks,
        "start": spec.start,
        "embedding": {
            "dimension": spec.embedding_dimension,
            "noise_sigma": spec.embedding_noise,
            "file": "embeddings.bin",
        },
    }

    tweets_path = outdir / "tweets.jsonl"
    users_path = outdir / "users.csv"
    gt_path = outdir / "ground_truth.json"
    emb_path = outdir / "embeddings.bin"
    write_tweets_jsonl(tweets, tweets_path)
    write_users_csv(users, users_path)
    keys = sorted(vectors)
    write_vectors(emb_path, keys, np.array([vectors[k] for k in keys]))
    with open(gt_path, "w", encoding="utf-8") as fh:
        json.dump(ground_truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return GeneratedWorld(spec=spec, output_dir=outdir, tweets_path=tweets_path,
                          users_path=users_path, ground_truth_path=gt_path,
                          embeddings_path=emb_path, ground_truth=ground_truth)
