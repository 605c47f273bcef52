import os

import numpy as np
import pytest

import pycml

FIG1 = os.path.join(os.path.dirname(__file__), "..", "..", "data", "fig1.json")


@pytest.fixture(scope="module")
def example():
    return pycml.Network.load(FIG1)


def arcs(result):
    return {(e[0], e[1], e[2], e[3]) for e in result["edges"]}


def test_network_loading(example):
    assert example.p == 13
    assert len(example.edges) == 14
    assert example.names[0] == "1"
    assert example.markov_blanket(2) == [0, 1, 3, 4]


def test_cyclic_network_is_rejected():
    with pytest.raises(ValueError):
        pycml.Network(3, [(0, 1), (1, 2), (2, 0)])


def test_oracle_runs_on_the_example(example):
    snl = pycml.discover_oracle(example, ["3", "8"], "snl")
    assert snl["metrics"]["pra_f1_loose"] == 1.0
    assert snl["metrics"]["pra_f1_strict"] == pytest.approx(2 / 3)
    cml = pycml.discover_oracle(example, ["3", "8"], "cml")
    assert cml["metrics"]["bne_count"] == 3
    assert (0, 2, "t", "a") in arcs(cml)


def test_sample_discovery_is_deterministic(example):
    data = pycml.simulate(example, 2000, seed=4)
    assert data.shape == (2000, 13)
    a = pycml.discover(data, [2, 7], network=example)
    b = pycml.discover(data, ["3", "8"], network=example)
    assert a == b
    assert a["ci_tests"] >= a["mb_tests"] > 0
    assert 0.0 <= a["metrics"]["overall_f1"] <= 1.0


def test_thread_count_does_not_change_results(example):
    data = pycml.simulate(example, 1000, seed=9)
    pycml.set_num_threads(1)
    single = pycml.discover(data, [2, 7], "cml")
    pycml.set_num_threads(4)
    try:
        multi = pycml.discover(data, [2, 7], "cml")
    finally:
        pycml.set_num_threads(1)
    assert single == multi


def test_invalid_arguments(example):
    data = np.zeros((10, 3))
    with pytest.raises(ValueError):
        pycml.discover(data, [5])
    with pytest.raises(ValueError):
        pycml.discover_oracle(example, ["3"], "ges")
    with pytest.raises(ValueError):
        pycml.kfold_split(3, 4, 1)


def test_kfold_split_partitions():
    folds = pycml.kfold_split(23, 5, 7)
    rows = sorted(r for f in folds for r in f)
    assert rows == list(range(23))
    assert {len(f) for f in folds} <= {4, 5}
