import math

import numpy as np
import pytest

from polarscore.content import (
    content_polarity,
    content_polarity_scores,
    partisan_axis,
    prominence,
)
from polarscore.embedding import UserEmbedding
from polarscore.errors import InputError


def emb(uid, vec):
    return UserEmbedding(user_id=uid, event="e", vector=np.asarray(vec, float),
                         tweet_count=1)


def simple_axis():
    """Axis along +x from two politicians per side."""
    embeddings = [
        emb("inc_a", [1.0, 0.2]), emb("inc_b", [1.0, -0.2]),
        emb("bjp_a", [-1.0, 0.1]), emb("bjp_b", [-1.0, -0.1]),
    ]
    scores = {"inc_a": 0.8, "inc_b": 0.6, "bjp_a": -0.7, "bjp_b": -0.9}
    party = {"inc_a": "INC", "inc_b": "INC", "bjp_a": "BJP", "bjp_b": "BJP"}
    return partisan_axis(embeddings, scores, party, n=2)


class TestPartisanAxis:
    def test_means_and_direction(self):
        axis = simple_axis()
        np.testing.assert_allclose(axis.x_tilde, [1.0, 0.0])
        np.testing.assert_allclose(axis.y_tilde, [-1.0, 0.0])
        np.testing.assert_allclose(axis.axis, [2.0, 0.0])
        assert axis.n == 2

    def test_top_n_selection_by_signed_score(self):
        embeddings = [emb(u, [v, 0.0]) for u, v in
                      [("inc_hot", 5.0), ("inc_mild", 1.0), ("inc_cold", 0.0),
                       ("bjp_hot", -5.0), ("bjp_mild", -1.0), ("bjp_cold", 0.0)]]
        scores = {"inc_hot": 0.9, "inc_mild": 0.5, "inc_cold": 0.1,
                  "bjp_hot": -0.9, "bjp_mild": -0.5, "bjp_cold": -0.1}
        party = {u: ("INC" if u.startswith("inc") else "BJP") for u in scores}
        axis = partisan_axis(embeddings, scores, party, n=2)
        assert axis.x_users == ["inc_hot", "inc_mild"]
        assert axis.y_users == ["bjp_hot", "bjp_mild"]

    def test_tie_broken_by_user_id(self):
        embeddings = [emb(u, [1.0, 0.0]) for u in ("inc_b", "inc_a", "inc_c")]
        embeddings += [emb(u, [-1.0, 0.0]) for u in ("bjp_a", "bjp_b")]
        scores = {"inc_a": 0.5, "inc_b": 0.5, "inc_c": 0.5,
                  "bjp_a": -0.5, "bjp_b": -0.5}
        party = {u: ("INC" if u.startswith("inc") else "BJP") for u in scores}
        axis = partisan_axis(embeddings, scores, party, n=2)
        assert axis.x_users == ["inc_a", "inc_b"]

    def test_insufficient_politicians(self):
        embeddings = [emb("inc_a", [1, 0]), emb("bjp_a", [-1, 0])]
        scores = {"inc_a": 0.5, "bjp_a": -0.5}
        party = {"inc_a": "INC", "bjp_a": "BJP"}
        with pytest.raises(InputError, match="INC=1, BJP=1"):
            partisan_axis(embeddings, scores, party, n=2)

    def test_unscored_or_unembedded_excluded(self):
        embeddings = [emb("inc_a", [1, 0]), emb("bjp_a", [-1, 0])]
        scores = {"inc_a": 0.5, "bjp_a": -0.5, "inc_ghost": 0.9}
        party = {"inc_a": "INC", "bjp_a": "BJP", "inc_ghost": "INC"}
        axis = partisan_axis(embeddings, scores, party, n=1)
        assert axis.x_users == ["inc_a"]

    def test_zero_axis_fatal(self):
        embeddings = [emb("inc_a", [1, 1]), emb("bjp_a", [1, 1])]
        scores = {"inc_a": 0.5, "bjp_a": -0.5}
        party = {"inc_a": "INC", "bjp_a": "BJP"}
        with pytest.raises(InputError, match="zero norm"):
            partisan_axis(embeddings, scores, party, n=1)

    def test_n_validation(self):
        with pytest.raises(InputError, match="n must be"):
            partisan_axis([], {}, {}, n=0)


class TestContentPolarity:
    def test_analytic_cosines(self):
        axis = simple_axis()
        assert content_polarity(np.array([3.0, 0.0]), axis) == pytest.approx(1.0, abs=1e-9)
        assert content_polarity(np.array([-0.5, 0.0]), axis) == pytest.approx(-1.0, abs=1e-9)
        assert content_polarity(np.array([0.0, 2.0]), axis) == pytest.approx(0.0, abs=1e-9)

    def test_scale_invariance(self):
        axis = simple_axis()
        base = np.array([0.3, 0.7])
        expect = content_polarity(base, axis)
        for lam in (1e-6, 1.0, 1e6):
            assert content_polarity(lam * base, axis) == pytest.approx(expect, abs=1e-9)

    def test_zero_vector_unscored(self):
        axis = simple_axis()
        assert content_polarity(np.zeros(2), axis) is None

    def test_clipped_to_unit_interval(self):
        axis = simple_axis()
        c = content_polarity(np.array([1.0, 1e-12]), axis)
        assert -1.0 <= c <= 1.0

    def test_batch_scores(self, caplog):
        axis = simple_axis()
        users = [emb("u1", [1.0, 0.0]), emb("u2", [0.0, 0.0])]
        with caplog.at_level("WARNING", logger="polarscore"):
            scores, unscored = content_polarity_scores(users, axis)
        assert scores == {"u1": pytest.approx(1.0)}
        assert unscored == ["u2"]
        assert "zero-norm" in caplog.text


class TestProminence:
    def test_hand_computed_scores(self):
        a = ["apple apple banana"]
        b = ["banana banana cherry"]
        table = prominence(a, b, min_count=1, alpha=0.5)
        terms = {row[0]: row for row in table.rows}
        v = 3
        fa_apple = (2 + 0.5) / (3 + 0.5 * v)
        fb_apple = (0 + 0.5) / (3 + 0.5 * v)
        assert terms["apple"][3] == pytest.approx(math.log(fa_apple / fb_apple))
        assert terms["apple"][1] == 2 and terms["apple"][2] == 0
        assert table.score_b("apple") == -table.score_a("apple")

    def test_rows_sorted_descending(self):
        a = ["x x x y"]
        b = ["y y y x"]
        table = prominence(a, b, min_count=1)
        assert [r[0] for r in table.rows] == ["x", "y"]
        assert table.rows[0][3] > 0 > table.rows[1][3]

    def test_min_count_filters_combined(self):
        a = ["common common rare"]
        b = ["common common"]
        table = prominence(a, b, min_count=4)
        assert [r[0] for r in table.rows] == ["common"]
        with pytest.raises(InputError, match="min_count"):
            prominence(a, b, min_count=99)

    def test_top_m_keeps_both_tails(self):
        a = [" ".join(f"a{i}" for i in range(6)) * 1]
        b = [" ".join(f"b{i}" for i in range(6)) * 1]
        table = prominence(a, b, min_count=1, top_m=2)
        assert len(table.rows) == 4
        heads = {r[0] for r in table.rows[:2]}
        tails = {r[0] for r in table.rows[2:]}
        assert heads <= {f"a{i}" for i in range(6)}
        assert tails <= {f"b{i}" for i in range(6)}

    def test_empty_side_fatal(self):
        with pytest.raises(InputError, match="non-empty"):
            prominence([], ["x"], min_count=1)

    def test_score_lookup_missing(self):
        table = prominence(["x x"], ["y y"], min_count=1)
        with pytest.raises(KeyError):
            table.score_a("ghost")
