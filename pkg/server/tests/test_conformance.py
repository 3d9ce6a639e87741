"""Protocol conformance: vector normalization, determinism, order
preservation, readiness gating, and error statuses, all with the tiny
offline models."""

import math
import os
import time

import pytest
from fastapi.testclient import TestClient

from conftest import SESSION_START
from ldfs_server.app import create_app
from ldfs_server.config import ServerConfig

TEXTS = ["the cat sat on the mat", "magnesium ribbon burns quickly", "unseen wording here"]


def norm(vector):
    return math.sqrt(sum(v * v for v in vector))


class TestHealthGating:
    def test_not_ready_before_startup(self, server_config):
        app = create_app(server_config)
        unstarted = TestClient(app)  # no context manager: lifespan never runs
        assert unstarted.get("/healthz").status_code == 503
        assert unstarted.get("/v1/info").status_code == 503
        assert unstarted.post("/v1/embed", json={"texts": ["x"]}).status_code == 503
        assert unstarted.post(
            "/v1/score", json={"pairs": [{"context": "a", "target": "b"}]}
        ).status_code == 503

    def test_ready_after_startup(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}


class TestInfo:
    def test_declares_backends_and_variant(self, client, server_config):
        info = client.get("/v1/info").json()
        assert info["embed"]["backend_id"] == server_config.embed_model
        assert info["embed"]["dim"] == 32
        assert info["embed"]["token_limit"] > 0
        assert info["score"]["variant"] == "mean"
        assert info["score"]["token_limit"] > 0
        assert info["max_batch_size"] == 128


class TestEmbed:
    def test_unit_norm_within_tolerance(self, client):
        body = client.post("/v1/embed", json={"texts": TEXTS}).json()
        assert body["dim"] == 32
        assert len(body["vectors"]) == len(TEXTS)
        for vector in body["vectors"]:
            assert abs(norm(vector) - 1.0) <= 1e-6

    def test_deterministic_across_repeated_requests(self, client):
        first = client.post("/v1/embed", json={"texts": TEXTS}).json()
        second = client.post("/v1/embed", json={"texts": TEXTS}).json()
        assert first["vectors"] == second["vectors"]

    def test_order_preserving(self, client):
        forward = client.post("/v1/embed", json={"texts": TEXTS}).json()["vectors"]
        backward = client.post("/v1/embed", json={"texts": TEXTS[::-1]}).json()["vectors"]
        for a, b in zip(forward, backward[::-1]):
            assert a == pytest.approx(b, abs=1e-6)

    def test_identical_texts_identical_vectors(self, client):
        vectors = client.post("/v1/embed", json={"texts": ["a cat", "a cat"]}).json()["vectors"]
        assert vectors[0] == vectors[1]

    def test_empty_text_is_zero_vector(self, client):
        vectors = client.post("/v1/embed", json={"texts": ["", "the cat"]}).json()["vectors"]
        assert all(v == 0.0 for v in vectors[0])
        assert abs(norm(vectors[1]) - 1.0) <= 1e-6

    def test_overlong_input_truncated_and_flagged(self, client):
        long_text = "cat " * 400
        body = client.post("/v1/embed", json={"texts": [long_text, "short"]}).json()
        assert body["truncated"] == [True, False]
        assert abs(norm(body["vectors"][0]) - 1.0) <= 1e-6

    def test_empty_array_is_400(self, client):
        assert client.post("/v1/embed", json={"texts": []}).status_code == 400

    def test_malformed_body_is_400(self, client):
        assert client.post("/v1/embed", json={"wrong": 1}).status_code == 400
        assert client.post("/v1/embed", json={"texts": [1, 2]}).status_code == 400

    def test_oversized_batch_is_413(self, client):
        assert client.post("/v1/embed", json={"texts": ["x"] * 129}).status_code == 413


class TestScore:
    def pairs(self):
        return [
            {"context": "the cat sat on the mat", "target": "the cat sat"},
            {"context": "magnesium ribbon burns quickly", "target": "copper sulfate turns blue"},
        ]

    def test_deterministic(self, client):
        first = client.post("/v1/score", json={"pairs": self.pairs()}).json()
        second = client.post("/v1/score", json={"pairs": self.pairs()}).json()
        assert first["scores"] == second["scores"]
        assert first["variant"] == "mean"

    def test_order_preserving(self, client):
        forward = client.post("/v1/score", json={"pairs": self.pairs()}).json()["scores"]
        backward = client.post("/v1/score", json={"pairs": self.pairs()[::-1]}).json()["scores"]
        assert forward == pytest.approx(backward[::-1], abs=1e-6)

    def test_repeated_pair_in_one_batch(self, client):
        pairs = [self.pairs()[0], self.pairs()[0]]
        scores = client.post("/v1/score", json={"pairs": pairs}).json()["scores"]
        assert scores[0] == scores[1]

    def test_hundred_pair_batch_all_finite(self, client):
        pairs = [
            {"context": f"the cat sat w{i}", "target": f"dog ran w{i}"} for i in range(100)
        ]
        scores = client.post("/v1/score", json={"pairs": pairs}).json()["scores"]
        assert len(scores) == 100
        assert all(math.isfinite(s) for s in scores)

    def test_truncation_flagged_per_item(self, client):
        pairs = [
            {"context": "cat " * 400, "target": "the cat"},
            {"context": "the cat", "target": "the cat"},
        ]
        body = client.post("/v1/score", json={"pairs": pairs}).json()
        assert body["truncated"] == [True, False]

    def test_empty_pairs_is_400(self, client):
        assert client.post("/v1/score", json={"pairs": []}).status_code == 400

    def test_oversized_batch_is_413(self, client):
        pairs = [{"context": "a", "target": "b"}] * 129
        assert client.post("/v1/score", json={"pairs": pairs}).status_code == 413

    def test_sum_variant_declared(self, tiny_model_dirs):
        embed_dir, score_dir = tiny_model_dirs
        config = ServerConfig(embed_model=embed_dir, score_model=score_dir, score_variant="sum")
        with TestClient(create_app(config)) as client:
            body = client.post("/v1/score", json={"pairs": self.pairs()}).json()
            assert body["variant"] == "sum"


@pytest.mark.skipif(
    not os.environ.get("LDFS_SERVER_REAL_MODELS"),
    reason="ordering check needs trained checkpoints (set LDFS_SERVER_REAL_MODELS=1)",
)
def test_entailed_target_scores_higher_with_real_models(client):
    # random tiny weights carry no semantics, so this ordering is only
    # meaningful against pretrained models
    context = "the cat sat on the mat"
    pairs = [
        {"context": context, "target": "the cat sat on the mat"},
        {"context": context, "target": "magnesium ribbon burns quickly"},
    ]
    scores = client.post("/v1/score", json={"pairs": pairs}).json()["scores"]
    assert scores[0] > scores[1]


def test_zz_conformance_budget():
    elapsed = time.perf_counter() - SESSION_START
    assert elapsed < 120.0, f"conformance suite took {elapsed:.0f}s with small models"
