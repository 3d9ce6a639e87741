"""Run the model server: python -m ldfs_server [flags]."""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app
from .config import DEFAULT_EMBED_MODEL, DEFAULT_SCORE_MODEL, ServerConfig
from .tiny import build_tiny_models


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldfs-server", description=__doc__)
    parser.add_argument("--embed-model", default=DEFAULT_EMBED_MODEL)
    parser.add_argument("--score-model", default=DEFAULT_SCORE_MODEL)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--variant", choices=("mean", "sum"), default="mean")
    parser.add_argument("--max-batch-size", type=int, default=256)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument(
        "--tiny",
        metavar="DIR",
        help="build tiny offline models under DIR and serve those instead",
    )
    return parser


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    embed_model, score_model = args.embed_model, args.score_model
    if args.tiny:
        embed_model, score_model = build_tiny_models(args.tiny)
    config = ServerConfig(
        embed_model=embed_model,
        score_model=score_model,
        device=args.device,
        score_variant=args.variant,
        max_batch_size=args.max_batch_size,
    )
    uvicorn.run(create_app(config), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
