import time

import pytest
from fastapi.testclient import TestClient

from ldfs_server.app import create_app
from ldfs_server.config import ServerConfig
from ldfs_server.tiny import build_tiny_models

SESSION_START = time.perf_counter()


@pytest.fixture(scope="session")
def tiny_model_dirs(tmp_path_factory):
    return build_tiny_models(tmp_path_factory.mktemp("models"))


@pytest.fixture(scope="session")
def server_config(tiny_model_dirs):
    embed_dir, score_dir = tiny_model_dirs
    return ServerConfig(embed_model=embed_dir, score_model=score_dir, max_batch_size=128)


@pytest.fixture(scope="session")
def client(server_config):
    app = create_app(server_config)
    with TestClient(app) as test_client:
        yield test_client
