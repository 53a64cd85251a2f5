"""Tweet/user ingestion, retweet-relation extraction, and text normalization.

Input formats: tweets arrive as JSONL (one object per line with keys
``id, author_id, created_at, text, retweeted_user_id (optional),
retweet_count``), user tables as CSV with header
``id,handle,role,party_or_category,followers_count``.
"""

import csv
import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import InputError

logger = logging.getLogger("polarscore")

PARTIES = ("INC", "BJP", "other")
CATEGORIES = (
    "Academia",
    "Activist",
    "Business",
    "Entertainment",
    "Fan Account",
    "Journalist",
    "Law & Policy",
    "Media House",
    "Platform Celebrity",
    "Social Work",
    "Sports",
    "Writer",
)

URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
RT_MENTION_RE = re.compile(r"\brt @\w+:?", re.IGNORECASE)
MENTION_RE = re.compile(r"@\w+")
# Kept alphabet is ASCII alphanumerics plus '#' so hashtag keywords stay matchable.
NON_KEPT_RE = re.compile(r"[^A-Za-z0-9# ]")
WS_RE = re.compile(r" +")
RT_PREFIX_RE = re.compile(r"^RT @(\w+):?", re.IGNORECASE)

# Code-point ranges covering the common emoji blocks (pictographs, transport,
# supplemental symbols, flags, dingbats, variation selectors). Deliberately a
# plain range list rather than a third-party emoji table.
_EMOJI_RANGES = [
    (0x1F300, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F700, 0x1F77F),
    (0x1F900, 0x1F9FF),
    (0x1FA00, 0x1FAFF),
    (0x2600, 0x27BF),
    (0x2B00, 0x2BFF),
    (0x1F1E6, 0x1F1FF),
    (0xFE00, 0xFE0F),
    (0x200D, 0x200D),
    (0x20E3, 0x20E3),
]
EMOJI_RE = re.compile(
    "[" + "".join(f"{chr(a)}-{chr(b)}" for a, b in _EMOJI_RANGES) + "]"
)


@dataclass
class Tweet:
    id: str
    author_id: str
    created_at: datetime
    raw_text: str
    retweeted_user_id: str | None = None
    retweet_count: int = 0
    clean_text: str = ""


@dataclass
class UserProfile:
    id: str
    handle: str
    role: str  # "politician" | "influencer"
    party_or_category: str
    followers_count: int

    @property
    def is_politician(self) -> bool:
        return self.role == "politician"

    @property
    def party(self) -> str | None:
        return self.party_or_category if self.role == "politician" else None

    @property
    def category(self) -> str | None:
        return self.party_or_category if self.role == "influencer" else None


@dataclass
class Corpus:
    """Immutable after construction; tweets ordered by (created_at, id)."""

    tweets: list[Tweet]
    users: dict[str, UserProfile]
    skipped_count: int = 0
    handle_to_id: dict[str, str] = field(default_factory=dict)

    @property
    def time_span(self) -> tuple[datetime, datetime] | None:
        if not self.tweets:
            return None
        return (self.tweets[0].created_at, self.tweets[-1].created_at)

    def tweets_by_user(self) -> dict[str, list[Tweet]]:
        out: dict[str, list[Tweet]] = {}
        for t in self.tweets:
            out.setdefault(t.author_id, []).append(t)
        return out


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp into an aware UTC datetime (second precision)."""
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    dt = datetime.fromisoformat(value)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def preprocess(raw_text: str) -> str:
    """Normalize tweet text.

    Applies, in order: hyperlink removal, emoji removal, retweet/user mention
    removal, removal of punctuation and non-alphanumerics (keeping ``#``),
    lowercasing. Repeated whitespace collapses to single spaces; the result is
    trimmed. Total function: any string in, possibly empty string out.
    """
    text = URL_RE.sub(" ", raw_text)
    text = EMOJI_RE.sub(" ", text)
    text = RT_MENTION_RE.sub(" ", text)
    text = MENTION_RE.sub(" ", text)
    text = NON_KEPT_RE.sub(" ", text)
    text = text.lower()
    return WS_RE.sub(" ", text).strip()


def load_users(path: str | Path) -> dict[str, UserProfile]:
    """Load the user table from CSV. Validates roles and category vocabulary."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"corpus: user table not found: {path}")
    users: dict[str, UserProfile] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = ["id", "handle", "role", "party_or_category", "followers_count"]
        if reader.fieldnames != expected:
            raise InputError(
                f"corpus: user CSV header must be {','.join(expected)}, "
                f"got {reader.fieldnames}"
            )
        for row in reader:
            role = row["role"]
            label = row["party_or_category"]
            if role == "politician":
                if label not in PARTIES:
                    raise InputError(f"corpus: unknown party {label!r} for user {row['id']}")
            elif role == "influencer":
                if label not in CATEGORIES:
                    raise InputError(
                        f"corpus: unknown influencer category {label!r} for user {row['id']}"
                    )
            else:
                raise InputError(f"corpus: unknown role {role!r} for user {row['id']}")
            followers = int(row["followers_count"])
            if followers < 0:
                raise InputError(f"corpus: negative followers_count for user {row['id']}")
            if row["id"] in users:
                raise InputError(f"corpus: duplicate user id {row['id']!r}")
            users[row["id"]] = UserProfile(
                id=row["id"],
                handle=row["handle"],
                role=role,
                party_or_category=label,
                followers_count=followers,
            )
    return users


def _parse_tweet_record(rec: dict, handle_to_id: dict[str, str]) -> Tweet:
    for key in ("id", "author_id", "created_at", "text"):
        if key not in rec or rec[key] in (None, ""):
            raise ValueError(f"missing field {key}")
    created = parse_timestamp(str(rec["created_at"]))
    count = rec.get("retweet_count", 0)
    if count is None:
        count = 0
    count = int(count)
    if count < 0:
        raise ValueError("negative retweet_count")
    text = str(rec["text"])
    retweeted = rec.get("retweeted_user_id") or None
    if retweeted is None:
        # Retweet linkage must be pulled from the raw "RT @handle:" prefix here,
        # before preprocess() destroys the marker.
        m = RT_PREFIX_RE.match(text)
        if m:
            retweeted = handle_to_id.get(m.group(1).lower())
    retweeted = str(retweeted) if retweeted is not None else None
    author = str(rec["author_id"])
    if retweeted == author:  # self-retweet: drop the linkage, keep the tweet
        retweeted = None
    return Tweet(
        id=str(rec["id"]),
        author_id=author,
        created_at=created,
        raw_text=text,
        retweeted_user_id=retweeted,
        retweet_count=count,
    )


def ingest_tweets(
    path: str | Path,
    format: str = "jsonl",
    users: dict[str, UserProfile] | None = None,
) -> Corpus:
    """Stream tweets from a JSONL file into a Corpus.

    Malformed records are counted and skipped; more than 50% malformed is
    fatal. ``clean_text`` is filled for every loaded tweet.
    """
    path = Path(path)
    if format == "csv":
        raise InputError("corpus: CSV input is accepted for user tables only; tweets are JSONL")
    if format != "jsonl":
        raise InputError(f"corpus: unknown tweet format {format!r} (expected 'jsonl')")
    if not path.exists():
        raise InputError(f"corpus: tweet file not found: {path}")

    users = users or {}
    handle_to_id = {u.handle.lower(): u.id for u in users.values()}

    tweets: list[Tweet] = []
    seen_ids: set[str] = set()
    skipped = 0
    total = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            total += 1
            try:
                rec = json.loads(line)
                tweet = _parse_tweet_record(rec, handle_to_id)
                if users and tweet.author_id not in users:
                    raise ValueError(f"unknown author_id {tweet.author_id}")
                if tweet.id in seen_ids:
                    raise ValueError(f"duplicate tweet id {tweet.id}")
            except (ValueError, TypeError, KeyError) as exc:
                skipped += 1
                logger.debug("corpus: skipping malformed record: %s", exc)
                continue
            seen_ids.add(tweet.id)
            tweet.clean_text = preprocess(tweet.raw_text)
            tweets.append(tweet)

    if total > 0 and skipped > total / 2:
        raise InputError(
            f"corpus: {skipped} of {total} records malformed (>50%), refusing to proceed"
        )
    if not tweets:
        logger.warning("corpus: %s produced an empty corpus (time span undefined)", path)
    tweets.sort(key=lambda t: (t.created_at, t.id))
    return Corpus(tweets=tweets, users=dict(users), skipped_count=skipped,
                  handle_to_id=handle_to_id)


def retweet_edge_list(
    corpus: Corpus, tweet_ids: set[str] | None = None
) -> Counter[tuple[str, str]]:
    """Multiset of (retweeter_id, retweeted_id) pairs, one per retweet event.

    Self-pairs are dropped and both endpoints must be in the user table.
    ``tweet_ids`` restricts the count to a subset of tweets (e.g. one event).
    """
    pairs: Counter[tuple[str, str]] = Counter()
    for t in corpus.tweets:
        if t.retweeted_user_id is None:
            continue
        if tweet_ids is not None and t.id not in tweet_ids:
            continue
        if t.retweeted_user_id == t.author_id:
            continue
        if t.author_id not in corpus.users or t.retweeted_user_id not in corpus.users:
            continue
        pairs[(t.author_id, t.retweeted_user_id)] += 1
    return pairs


def write_tweets_jsonl(tweets: list[Tweet], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in tweets:
            rec = {
                "id": t.id,
                "author_id": t.author_id,
                "created_at": format_timestamp(t.created_at),
                "text": t.raw_text,
                "retweet_count": t.retweet_count,
            }
            if t.retweeted_user_id is not None:
                rec["retweeted_user_id"] = t.retweeted_user_id
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def write_users_csv(users: dict[str, UserProfile], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "handle", "role", "party_or_category", "followers_count"])
        for uid in sorted(users):
            u = users[uid]
            writer.writerow([u.id, u.handle, u.role, u.party_or_category, u.followers_count])
