from pathlib import Path

import pytest

from modex.cli import load_system

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


@pytest.fixture
def data_dir():
    return DATA


def load_demo(system: str, instance: str):
    """(flat, oracles, instance) for a system file in demos/data."""
    flat, oracles, inst = load_system(DATA / system, DATA / instance)
    names = [n for n in inst.vocabulary if n in flat.search_vocab]
    return flat, oracles, inst.restrict(names)


@pytest.fixture
def k3():
    return load_demo("k3.mx", "k3.inst")
