"""Shared fixtures: the hand-written demo collection and its delta records."""
from __future__ import annotations

import pytest

from mtpairs import build_delta_records

from helpers import tiny_collection


@pytest.fixture(scope="session")
def demo_collection():
    return tiny_collection()


@pytest.fixture(scope="session")
def demo_records(demo_collection):
    return build_delta_records(demo_collection)


@pytest.fixture()
def demo_path(tmp_path):
    path = tmp_path / "demo.jsonl"
    from helpers import tiny_builder

    tiny_builder().write(path)
    return path
