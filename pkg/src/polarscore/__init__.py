"""Influencer-polarization analytics over retweet corpora.

Pipeline: keyword-lexicon tweet classification, embedding-based stance
clustering, random-walk retweet polarity on the thresholded retweet graph,
partisan-axis content polarity, and the downstream reward/category statistics.
"""

from .content import PartisanAxis, content_polarity, partisan_axis, prominence
from .corpus import Corpus, Tweet, UserProfile, ingest_tweets, load_users, preprocess
from .datagen import GeneratedWorld, WorldSpec, generate
from .embedding import (
    PrecomputedProvider,
    UserEmbedding,
    WordMeanProvider,
    embed_tweets,
    user_embeddings,
)
from .errors import ConfigError, InputError, PolarscoreError, UnpolarizedEventError
from .lexicon import (
    EventLexicon,
    WordVectors,
    classify_tweet,
    evaluate_precision,
    expand_keywords,
    train_word_vectors,
)
from .rtgraph import (
    AnchorSets,
    HittingProfile,
    RetweetGraph,
    build_graph,
    hitting_times,
    retweet_polarity,
    select_anchors,
)
from .stance import Projection2D, StanceClusters, cluster, label_clusters, project_2d
from .stats import (
    aggregate_polarity,
    category_medians,
    follower_quartiles,
    ols_regression,
    one_way_anova,
    retweet_rate_comparison,
    welch_pairwise,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorSets",
    "ConfigError",
    "Corpus",
    "EventLexicon",
    "GeneratedWorld",
    "HittingProfile",
    "InputError",
    "PartisanAxis",
    "PolarscoreError",
    "PrecomputedProvider",
    "Projection2D",
    "RetweetGraph",
    "StanceClusters",
    "Tweet",
    "UnpolarizedEventError",
    "UserEmbedding",
    "UserProfile",
    "WordMeanProvider",
    "WordVectors",
    "WorldSpec",
    "aggregate_polarity",
    "build_graph",
    "category_medians",
    "classify_tweet",
    "cluster",
    "content_polarity",
    "embed_tweets",
    "evaluate_precision",
    "expand_keywords",
    "follower_quartiles",
    "generate",
    "hitting_times",
    "ingest_tweets",
    "label_clusters",
    "load_users",
    "ols_regression",
    "one_way_anova",
    "partisan_axis",
    "preprocess",
    "prominence",
    "project_2d",
    "retweet_polarity",
    "retweet_rate_comparison",
    "select_anchors",
    "train_word_vectors",
    "user_embeddings",
    "welch_pairwise",
]
