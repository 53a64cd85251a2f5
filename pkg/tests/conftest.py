import numpy as np
import pytest

from polarscore.corpus import Tweet, UserProfile, parse_timestamp
from polarscore.datagen import WorldSpec, generate


def make_tweet(tid, author, text, when="2021-01-04T10:00:00Z", retweeted=None,
               count=0):
    from polarscore.corpus import preprocess
    return Tweet(id=tid, author_id=author, created_at=parse_timestamp(when),
                 raw_text=text, retweeted_user_id=retweeted,
                 retweet_count=count, clean_text=preprocess(text))


def make_user(uid, role="influencer", label="Journalist", followers=100,
              handle=None):
    return UserProfile(id=uid, handle=handle or uid, role=role,
                       party_or_category=label, followers_count=followers)


@pytest.fixture(scope="session")
def small_world(tmp_path_factory):
    """One modest synthetic world shared by every test that only reads it."""
    out = tmp_path_factory.mktemp("world")
    spec = WorldSpec(seed=11, politicians_per_party=30, influencers=60, weeks=4)
    world = generate(spec, out)
    return spec, world, out


@pytest.fixture
def rng():
    return np.random.default_rng(0)
