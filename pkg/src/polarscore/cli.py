"""Config-driven pipeline orchestration and artifact emission.

Subcommands: ``generate`` (synthetic world), ``run`` (full pipeline),
``timeline`` (weekly retweet-of-party series), ``report`` (pretty-print a
finished run's summary). All outputs are written atomically and every number
in them is deterministic for a fixed (config, seed) pair.
"""

import argparse
import hashlib
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import content as content_mod
from . import corpus as corpus_mod
from . import datagen, embedding, lexicon, rtgraph, stance, stats
from .errors import ConfigError, InputError, PolarscoreError

logger = logging.getLogger("polarscore")

OUTPUT_DIR_ENV = "POLARSCORE_OUTPUT_DIR"

CONFIG_DEFAULTS = {
    "tweets": None,
    "users": None,
    "embeddings": None,  # null -> word-vector-mean fallback provider
    "output_dir": "out",
    "events": {},
    "seed": 0,
    "tau_add": 0.7,
    "expansion_rounds": 5,
    "vector_dimension": 100,
    "vector_window": 5,
    "vector_epochs": 5,
    "vector_min_count": 5,
    "negative_samples": 5,
    "min_tweets": 1,
    "n_neighbors": 15,
    "projection_epochs": 300,
    "min_cluster_size": 15,
    "edge_threshold": 2,
    "anchor_k": 100,
    "axis_n": 10,
    "hitting_method": "auto",
    "max_steps": 200,
    "walks_per_vertex": 1000,
    "weighted_walks": False,
    "include_noise_in_ranks": True,
    "prominence_min_count": 10,
    "prominence_top_m": 50,
}


@dataclass
class PipelineConfig:
    raw: dict
    tweets: Path
    users: Path
    embeddings: Path | None
    output_dir: Path
    events: dict[str, list[str]]

    def __getattr__(self, name):
        if name in self.raw:
            return self.raw[name]
        raise AttributeError(name)

    def hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def load_config(path: str | Path, overrides: list[str] | None = None) -> PipelineConfig:
    """Read the JSON config, apply key=value overrides, validate everything.

    Relative input paths resolve against the config file's directory; the
    output directory may be overridden by the POLARSCORE_OUTPUT_DIR variable.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"cli: config file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cli: config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("cli: config root must be a JSON object")
    unknown = set(raw) - set(CONFIG_DEFAULTS)
    if unknown:
        raise ConfigError(f"cli: unknown config keys: {sorted(unknown)}")
    merged = {**CONFIG_DEFAULTS, **raw}
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"cli: override {item!r} is not key=value")
        key, value = item.split("=", 1)
        if key not in CONFIG_DEFAULTS:
            raise ConfigError(f"cli: unknown config key {key!r} in override")
        try:
            merged[key] = json.loads(value)
        except json.JSONDecodeError:
            merged[key] = value
    env_out = os.environ.get(OUTPUT_DIR_ENV)
    if env_out:
        merged["output_dir"] = env_out
    return _validate_config(merged, path.parent)


def _validate_config(merged: dict, base_dir: Path) -> PipelineConfig:
    def resolve(p: str) -> Path:
        q = Path(p)
        return q if q.is_absolute() else base_dir / q

    for key in ("tweets", "users"):
        if not merged.get(key):
            raise ConfigError(f"cli: config key {key!r} is required")
    tweets = resolve(merged["tweets"])
    users = resolve(merged["users"])
    for p in (tweets, users):
        if not p.exists():
            raise ConfigError(f"cli: input path does not exist: {p}")
    embeddings = None
    if merged.get("embeddings"):
        embeddings = resolve(merged["embeddings"])
        if not embeddings.exists():
            raise ConfigError(f"cli: embeddings file does not exist: {embeddings}")
    events = merged.get("events")
    if not isinstance(events, dict) or not events:
        raise ConfigError("cli: config needs a non-empty 'events' map of event -> seed keywords")
    for event, seeds in events.items():
        if not isinstance(seeds, list) or not seeds:
            raise ConfigError(f"cli: event {event!r} needs >= 1 seed keyword")
    if not 0.0 < merged["tau_add"] <= 1.0:
        raise ConfigError(f"cli: tau_add={merged['tau_add']} outside (0, 1]")
    for key in ("edge_threshold", "anchor_k", "axis_n", "min_tweets",
                "vector_dimension", "min_cluster_size", "walks_per_vertex",
                "max_steps", "n_neighbors"):
        if int(merged[key]) < 1:
            raise ConfigError(f"cli: {key} must be a positive integer")
    if merged["hitting_method"] not in ("auto", "exact", "monte-carlo"):
        raise ConfigError(f"cli: unknown hitting_method {merged['hitting_method']!r}")
    return PipelineConfig(
        raw=merged,
        tweets=tweets,
        users=users,
        embeddings=embeddings,
        output_dir=resolve(str(merged["output_dir"])),
        events={e: list(s) for e, s in sorted(events.items())},
    )


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


class _ArtifactLog:
    """Names of files a run wrote, so the summary never picks up strays."""

    def __init__(self):
        self.names: set[str] = set()

    def write(self, path: Path, text: str) -> None:
        _atomic_write(path, text)
        self.names.add(path.name)

    def note(self, path: Path) -> None:
        self.names.add(path.name)


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _csv_text(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def timeline(corpus: corpus_mod.Corpus, party: str) -> list[tuple[str, int]]:
    """Weekly counts of influencer retweets of the given party's politicians.

    Buckets are ISO weeks in UTC, labeled like 2021-W05.
    """
    if party not in ("INC", "BJP"):
        raise InputError(f"cli: timeline party must be INC or BJP, got {party!r}")
    counts: dict[str, int] = {}
    for t in corpus.tweets:
        if t.retweeted_user_id is None:
            continue
        author = corpus.users.get(t.author_id)
        target = corpus.users.get(t.retweeted_user_id)
        if author is None or target is None:
            continue
        if author.is_politician or target.party != party:
            continue
        iso = t.created_at.isocalendar()
        label = f"{iso[0]}-W{iso[1]:02d}"
        counts[label] = counts.get(label, 0) + 1
    return sorted(counts.items())


def histogram_buckets(totals: dict[str, int]) -> dict:
    """Right-closed retweet-total buckets [1,50], (50,100], (100,150], (150,max]."""
    out = {"[1,50]": 0, "(50,100]": 0, "(100,150]": 0, "(150,max]": 0, "max": 0}
    for v in totals.values():
        if v < 1:
            continue
        out["max"] = max(out["max"], v)
        if v <= 50:
            out["[1,50]"] += 1
        elif v <= 100:
            out["(50,100]"] += 1
        elif v <= 150:
            out["(100,150]"] += 1
        else:
            out["(150,max]"] += 1
    return out


def _scatter_svg(proj: stance.Projection2D, clusters: stance.StanceClusters,
                 users: dict[str, corpus_mod.UserProfile]) -> str:
    width, height, margin = 640, 480, 40
    xs, ys = proj.coords[:, 0], proj.coords[:, 1]
    spanx = max(xs.max() - xs.min(), 1e-9)
    spany = max(ys.max() - ys.min(), 1e-9)
    palette = {"X": "#2b6cb0", "Y": "#c05621", "unlabeled": "#718096", "none": "#cbd5e0"}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for uid in proj.user_ids:
        x, y = proj.point(uid)
        px = margin + (x - xs.min()) / spanx * (width - 2 * margin)
        py = height - margin - (y - ys.min()) / spany * (height - 2 * margin)
        cid = clusters.labels.get(uid, stance.NOISE)
        side = clusters.party_labels.get(cid, "none" if cid == stance.NOISE else "unlabeled")
        profile = users.get(uid)
        r = 5 if profile is not None and profile.is_politician else 3
        parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{r}" '
                     f'fill="{palette.get(side, "#cbd5e0")}" fill-opacity="0.8">'
                     f'<title>{uid}</title></circle>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _prominence_svg(table: content_mod.ProminenceTable, per_side: int = 20) -> str:
    rows = table.rows
    top_a = rows[:per_side]
    top_b = list(reversed(rows[-per_side:]))
    n = max(len(top_a), len(top_b))
    row_h, width = 18, 640
    height = 40 + n * row_h
    biggest = max(abs(r[3]) for r in rows) or 1.0
    half = (width - 40) / 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width * 0.25:.0f}" y="16" font-size="12" text-anchor="middle">cluster Y terms</text>',
        f'<text x="{width * 0.75:.0f}" y="16" font-size="12" text-anchor="middle">cluster X terms</text>',
    ]
    mid = width / 2
    for i in range(n):
        y = 30 + i * row_h
        if i < len(top_a):
            term, _, _, score = top_a[i]
            bar = abs(score) / biggest * half
            parts.append(f'<rect x="{mid:.1f}" y="{y}" width="{bar:.1f}" height="12" fill="#2b6cb0"/>')
            parts.append(f'<text x="{mid + bar + 4:.1f}" y="{y + 10}" font-size="10">{term}</text>')
        if i < len(top_b):
            term, _, _, score = top_b[i]
            bar = abs(score) / biggest * half
            parts.append(f'<rect x="{mid - bar:.1f}" y="{y}" width="{bar:.1f}" height="12" fill="#c05621"/>')
            parts.append(f'<text x="{mid - bar - 4:.1f}" y="{y + 10}" font-size="10" '
                         f'text-anchor="end">{term}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _event_pipeline(config: PipelineConfig, corpus, vectors, event: str,
                    event_index: int, lexicons: dict,
                    artifacts: _ArtifactLog) -> dict:
    """Run one event end to end; writes the event's artifact files and
    returns its summary block."""
    outdir = config.output_dir
    seed = int(config.seed)
    event_tweets = [t for t in corpus.tweets
                    if event in lexicon.classify_tweet(t.clean_text, lexicons)]
    if not event_tweets:
        raise InputError(f"cli: event {event} matched zero tweets")

    if config.embeddings is not None:
        provider = embedding.PrecomputedProvider(config.embeddings)
    else:
        provider = embedding.WordMeanProvider(
            vectors, [t.clean_text for t in event_tweets])
    tweet_vecs = embedding.embed_tweets(event_tweets, provider)
    user_embs = embedding.user_embeddings(event_tweets, event, tweet_vecs,
                                          min_tweets=int(config.min_tweets))

    proj = stance.project_2d(user_embs, n_neighbors=int(config.n_neighbors),
                             seed=seed + event_index,
                             n_epochs=int(config.projection_epochs))
    clusters = stance.cluster(proj, min_cluster_size=int(config.min_cluster_size))
    clusters = stance.label_clusters(clusters, corpus.users)
    partition = {u: clusters.partition_of(u) for u in clusters.labels}

    event_ids = {t.id for t in event_tweets}
    pairs = corpus_mod.retweet_edge_list(corpus, tweet_ids=event_ids)
    participant_ids = sorted({t.author_id for t in event_tweets}
                             | {u for pair in pairs for u in pair})
    graph = rtgraph.build_graph(pairs, threshold=int(config.edge_threshold),
                                vertices=participant_ids)
    anchors = rtgraph.select_anchors(graph, partition, k=int(config.anchor_k))
    hit_x = rtgraph.hitting_times(graph, anchors.x_star, method=config.hitting_method,
                                  max_steps=int(config.max_steps),
                                  walks_per_vertex=int(config.walks_per_vertex),
                                  seed=seed + 1000 * (event_index + 1),
                                  weighted=bool(config.weighted_walks))
    hit_y = rtgraph.hitting_times(graph, anchors.y_star, method=config.hitting_method,
                                  max_steps=int(config.max_steps),
                                  walks_per_vertex=int(config.walks_per_vertex),
                                  seed=seed + 1000 * (event_index + 1) + 1,
                                  weighted=bool(config.weighted_walks))
    rank_vertices = None
    if not config.include_noise_in_ranks:
        rank_vertices = {u for u, side in partition.items() if side in ("X", "Y")}
    polarity = rtgraph.retweet_polarity(graph, hit_x, hit_y,
                                        rank_vertices=rank_vertices)

    party_of = {u.id: u.party for u in corpus.users.values() if u.is_politician}
    axis = content_mod.partisan_axis(user_embs, polarity.scores, party_of,
                                     n=int(config.axis_n))
    c_scores, c_unscored = content_mod.content_polarity_scores(user_embs, axis)

    side_users = {"X": {u for u, s in partition.items() if s == "X"},
                  "Y": {u for u, s in partition.items() if s == "Y"}}
    texts_x = [t.clean_text for t in event_tweets if t.author_id in side_users["X"]]
    texts_y = [t.clean_text for t in event_tweets if t.author_id in side_users["Y"]]
    prom = content_mod.prominence(texts_x, texts_y,
                                  min_count=int(config.prominence_min_count),
                                  top_m=int(config.prominence_top_m))

    influencers = {u.id for u in corpus.users.values() if not u.is_politician}
    event_rc: dict[str, list[int]] = {}
    other_rc: dict[str, list[int]] = {}
    for t in corpus.tweets:
        if t.author_id not in influencers:
            continue
        box = event_rc if t.id in event_ids else other_rc
        box.setdefault(t.author_id, []).append(t.retweet_count)
    comparisons, excluded = stats.retweet_rate_comparison(event_rc, other_rc)
    inf_polarity = {u: abs(s) for u, s in polarity.scores.items() if u in influencers}
    if inf_polarity:
        cohort_frac, cohort_n = stats.fourth_quartile_cohort_fraction(
            comparisons, inf_polarity)
    else:
        cohort_frac, cohort_n = 0.0, 0

    categories = {u.id: u.category for u in corpus.users.values()
                  if not u.is_politician and u.category}
    median_rc = {u: float(np.median(v)) for u, v in event_rc.items()}
    cat_medians = stats.category_medians(categories, polarity.scores, c_scores,
                                         median_rc)

    anova_block = None
    welch_block = None
    quartiles = stats.follower_quartiles(
        {u: corpus.users[u].followers_count for u in influencers})
    groups: dict[str, list[float]] = {}
    for u, score in inf_polarity.items():
        groups.setdefault(quartiles.categories[u], []).append(score)
    usable = {g: v for g, v in groups.items() if len(v) >= 2}
    if len(usable) >= 2:
        anova = stats.one_way_anova([usable[g] for g in sorted(usable)])
        anova_block = {
            "groups": sorted(usable),
            "f": anova.f,
            "p": anova.p,
            "df": [anova.df_between, anova.df_within],
            "group_means": anova.group_means,
            "confidence_intervals": stats.group_confidence_intervals(anova),
        }
        welch_block = [
            {"pair": [w.group_a, w.group_b], "t": w.t, "p_adjusted": w.p_adjusted,
             "significant": w.significant, "correction": "bonferroni"}
            for w in stats.welch_pairwise(usable)
        ]

    regression_block = None
    reg_users = sorted(u for u in inf_polarity if u in median_rc)
    if len(reg_users) > 3:
        reg = stats.ols_regression(
            [math.log1p(median_rc[u]) for u in reg_users],
            {
                "polarity": [inf_polarity[u] for u in reg_users],
                "log_followers": [math.log1p(corpus.users[u].followers_count)
                                  for u in reg_users],
            },
        )
        regression_block = {
            "names": reg.names,
            "coefficients": reg.coefficients.tolist(),
            "standard_errors": reg.standard_errors.tolist(),
            "p_values": reg.p_values.tolist(),
            "r_squared": reg.r_squared,
            "n": reg.n,
        }

    # event artifacts
    method_tag = hit_x.method
    score_rows = []
    for u in sorted(polarity.scores):
        score_rows.append([
            u, event, _fmt(polarity.scores[u]),
            _fmt(hit_x.value(graph, u)), _fmt(hit_y.value(graph, u)),
            method_tag, _fmt(c_scores.get(u)),
        ])
    artifacts.write(outdir / f"scores_{event}.csv",
                    _csv_text(["user_id", "event", "r_score", "l_x", "l_y",
                               "method", "c_score"], score_rows))

    cluster_rows = []
    for u in sorted(clusters.labels):
        cid = clusters.labels[u]
        side = clusters.party_labels.get(cid, "none" if cid == stance.NOISE
                                         else "unlabeled")
        x, y = proj.point(u)
        cluster_rows.append([u, cid, side, f"{x:.6f}", f"{y:.6f}"])
    artifacts.write(outdir / f"clusters_{event}.csv",
                    _csv_text(["user_id", "cluster_id", "party_label", "x", "y"],
                              cluster_rows))
    artifacts.write(outdir / f"clusters_{event}.svg",
                    _scatter_svg(proj, clusters, corpus.users))

    gexf_tmp = outdir / f"graph_{event}.gexf.tmp"
    node_attrs = {}
    for v in graph.vertices:
        profile = corpus.users.get(v)
        node_attrs[v] = {
            "party": profile.party if profile else None,
            "category": profile.category if profile else None,
            "r_score": polarity.scores.get(v),
        }
    rtgraph.write_gexf(graph, gexf_tmp, node_attrs)
    os.replace(gexf_tmp, outdir / f"graph_{event}.gexf")
    artifacts.note(outdir / f"graph_{event}.gexf")

    artifacts.write(outdir / f"prominence_{event}.csv",
                    _csv_text(["term", "count_A", "count_B", "score"],
                              [[t, ca, cb, _fmt(s)]
                               for t, ca, cb, s in prom.rows]))
    artifacts.write(outdir / f"prominence_{event}.svg", _prominence_svg(prom))

    cat_rows = []
    for cat in sorted(cat_medians):
        m = cat_medians[cat]
        cat_rows.append([cat, _fmt(m.median_retweet_polarity),
                         _fmt(m.median_abs_content_polarity),
                         _fmt(m.median_retweet_count), m.n])
    artifacts.write(outdir / f"categories_{event}.csv",
                    _csv_text(["category", "median_retweet_polarity",
                               "median_abs_content_polarity",
                               "median_retweet_count", "n"], cat_rows))

    lexicons[event].save(outdir / f"lexicon_{event}.json")
    artifacts.note(outdir / f"lexicon_{event}.json")

    cluster_sizes = {str(cid): len(clusters.members(cid))
                     for cid in clusters.cluster_ids()}
    party_map = {side: cid for cid, side in clusters.party_labels.items()
                 if side in ("X", "Y")}
    return {
        "n_event_tweets": len(event_tweets),
        "n_user_embeddings": len(user_embs),
        "n_clusters": len(cluster_sizes),
        "cluster_sizes": cluster_sizes,
        "party_clusters": party_map,
        "noise_users": sum(1 for c in clusters.labels.values() if c == stance.NOISE),
        "n_graph_vertices": graph.n,
        "n_graph_edges": graph.edge_count(),
        "anchor_sizes": [len(anchors.x_star), len(anchors.y_star)],
        "hitting_method": method_tag,
        "n_scored": len(polarity.scores),
        "n_unscored": len(polarity.unscored),
        "n_content_unscored": len(c_unscored),
        "axis_politicians": {"X": axis.x_users, "Y": axis.y_users},
        "anova": anova_block,
        "welch": welch_block,
        "regression": regression_block,
        "cohort": {"fraction": cohort_frac, "size": cohort_n,
                   "excluded_users": excluded},
        "prominence_top": {
            "X": [t for t, _, _, _ in prom.rows[:5]],
            "Y": [t for t, _, _, _ in reversed(prom.rows[-5:])],
        },
        "expanded_keywords": len(lexicons[event].expanded),
    }


def run(config: PipelineConfig) -> dict:
    """Execute the full pipeline and write the report bundle.

    Returns the summary document (also written to summary.json).
    """
    config.output_dir.mkdir(parents=True, exist_ok=True)
    artifacts = _ArtifactLog()
    users = corpus_mod.load_users(config.users)
    corpus = corpus_mod.ingest_tweets(config.tweets, users=users)
    if not corpus.tweets:
        raise InputError("cli: corpus is empty, nothing to analyze")

    logger.info("cli: training word vectors on %d tweets", len(corpus.tweets))
    sentences = [t.clean_text.split() for t in corpus.tweets if t.clean_text]
    vectors = lexicon.train_word_vectors(
        sentences,
        dimension=int(config.vector_dimension),
        window=int(config.vector_window),
        negative_samples=int(config.negative_samples),
        epochs=int(config.vector_epochs),
        min_count=int(config.vector_min_count),
        seed=int(config.seed),
    )
    vec_tmp = config.output_dir / "word_vectors.bin.tmp"
    vectors.save(vec_tmp)
    os.replace(vec_tmp, config.output_dir / "word_vectors.bin")
    artifacts.note(config.output_dir / "word_vectors.bin")

    lexicons: dict[str, lexicon.EventLexicon] = {}
    for event, seeds in config.events.items():
        exclusion = {kw for other, kws in config.events.items() if other != event
                     for kw in kws}
        lex = lexicon.expand_keywords(set(seeds), vectors,
                                      tau_add=float(config.tau_add),
                                      max_rounds=int(config.expansion_rounds),
                                      exclusion=exclusion)
        lex.event = event
        lexicons[event] = lex

    summary: dict = {"config_hash": config.hash(), "events": {}}
    for idx, event in enumerate(sorted(config.events)):
        logger.info("cli: running event %s", event)
        summary["events"][event] = _event_pipeline(config, corpus, vectors,
                                                   event, idx, lexicons,
                                                   artifacts)

    timeline_rows = []
    burst = {}
    for party in ("INC", "BJP"):
        series = timeline(corpus, party)
        for week, count in series:
            timeline_rows.append([week, party, count])
        if series:
            burst[party] = max(series, key=lambda wc: wc[1])[0]
    timeline_rows.sort()
    artifacts.write(config.output_dir / "timeline.csv",
                    _csv_text(["week", "party", "count"], timeline_rows))
    summary["timeline"] = {"peak_week": burst}

    totals: dict[str, dict[str, int]] = {"INC": {}, "BJP": {}}
    for t in corpus.tweets:
        if t.retweeted_user_id is None:
            continue
        author = corpus.users.get(t.author_id)
        target = corpus.users.get(t.retweeted_user_id)
        if author is None or target is None or author.is_politician:
            continue
        if target.party in totals:
            bucket = totals[target.party]
            bucket[t.author_id] = bucket.get(t.author_id, 0) + 1
    summary["histograms"] = {p: histogram_buckets(v) for p, v in totals.items()}

    events = sorted(config.events)
    r_all = {}
    c_all = {}
    for event in events:
        scores_csv = config.output_dir / f"scores_{event}.csv"
        r_event, c_event = {}, {}
        for line in scores_csv.read_text(encoding="utf-8").splitlines()[1:]:
            cells = line.split(",")
            r_event[cells[0]] = float(cells[2])
            if cells[6]:
                c_event[cells[0]] = float(cells[6])
        r_all[event] = r_event
        c_all[event] = c_event
    aggregates = stats.aggregate_polarity(r_all, c_all)
    summary["aggregate_polarity"] = {
        a.user_id: {
            "median_abs_r": a.median_abs_retweet_polarity,
            "median_abs_c": a.median_abs_content_polarity,
            "events": a.events_covered,
        }
        for a in aggregates
    }

    summary["artifacts"] = sorted(artifacts.names | {"summary.json"})
    _atomic_write(config.output_dir / "summary.json",
                  json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def _cmd_generate(args) -> int:
    spec_kwargs = {}
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec_kwargs = json.load(fh)
    if args.seed is not None:
        spec_kwargs["seed"] = args.seed
    if args.influencers is not None:
        spec_kwargs["influencers"] = args.influencers
    if args.politicians is not None:
        spec_kwargs["politicians_per_party"] = args.politicians
    if "events" in spec_kwargs:
        spec_kwargs["events"] = tuple(spec_kwargs["events"])
    world = datagen.generate(datagen.WorldSpec(**spec_kwargs), args.output)
    print(f"world written to {world.output_dir}", file=sys.stderr)
    return 0


def _cmd_run(args) -> int:
    config = load_config(args.config, overrides=args.set or [])
    run(config)
    print(f"run complete: {config.output_dir / 'summary.json'}", file=sys.stderr)
    return 0


def _cmd_timeline(args) -> int:
    config = load_config(args.config, overrides=args.set or [])
    users = corpus_mod.load_users(config.users)
    corpus = corpus_mod.ingest_tweets(config.tweets, users=users)
    rows = [[week, args.party, count] for week, count in timeline(corpus, args.party)]
    text = _csv_text(["week", "party", "count"], rows)
    if args.out:
        _atomic_write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_report(args) -> int:
    summary_path = Path(args.output_dir) / "summary.json"
    if not summary_path.exists():
        raise ConfigError(f"cli: no summary.json under {args.output_dir}")
    with open(summary_path, encoding="utf-8") as fh:
        summary = json.load(fh)
    print(f"config hash: {summary['config_hash']}")
    for event, block in sorted(summary.get("events", {}).items()):
        print(f"\nevent {event}:")
        print(f"  tweets {block['n_event_tweets']}, embedded users "
              f"{block['n_user_embeddings']}, clusters {block['n_clusters']} "
              f"(noise {block['noise_users']})")
        print(f"  graph: {block['n_graph_vertices']} vertices, "
              f"{block['n_graph_edges']} edges, scored {block['n_scored']} "
              f"({block['hitting_method']})")
        if block.get("anova"):
            a = block["anova"]
            print(f"  ANOVA: F={a['f']:.4g} p={a['p']:.4g} groups={a['groups']}")
        if block.get("regression"):
            r = block["regression"]
            coefs = ", ".join(f"{n}={c:.4g} (se {s:.3g})"
                              for n, c, s in zip(r["names"], r["coefficients"],
                                                 r["standard_errors"]))
            print(f"  OLS: {coefs}, R2={r['r_squared']:.4g}, n={r['n']}")
        cohort = block.get("cohort", {})
        print(f"  event-higher fraction (Q4 cohort of {cohort.get('size', 0)}): "
              f"{cohort.get('fraction', 0.0):.4g}")
    print(f"\ntimeline peak weeks: {summary.get('timeline', {}).get('peak_week', {})}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarscore",
        description="Influencer polarization pipeline on retweet corpora",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic world with ground truth")
    g.add_argument("--spec", help="WorldSpec JSON file")
    g.add_argument("--output", required=True, help="output directory")
    g.add_argument("--seed", type=int)
    g.add_argument("--influencers", type=int)
    g.add_argument("--politicians", type=int)
    g.set_defaults(func=_cmd_generate)

    r = sub.add_parser("run", help="run the full pipeline from a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config key")
    r.set_defaults(func=_cmd_run)

    t = sub.add_parser("timeline", help="weekly retweet-of-party counts")
    t.add_argument("--config", required=True)
    t.add_argument("--party", required=True, choices=["INC", "BJP"])
    t.add_argument("--out", help="write CSV here instead of stdout")
    t.add_argument("--set", action="append", metavar="KEY=VALUE")
    t.set_defaults(func=_cmd_timeline)

    p = sub.add_parser("report", help="pretty-print a finished run's summary")
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PolarscoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
