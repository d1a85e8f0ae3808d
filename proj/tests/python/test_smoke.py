import numpy as np
import pytest

import oversmooth as ov


def test_graph_generate_and_operator():
    g = ov.Graph.generate("path:3")
    assert len(g) == 3
    assert g.is_connected()
    a = ov.build_operator(g, "adjacency")
    assert a.kind == ov.OperatorKind.Adjacency
    values, _ = ov.symmetric_eig(a)
    assert np.allclose(sorted(values), [-np.sqrt(2), 0.0, np.sqrt(2)])


def test_parse_error_maps_to_python():
    with pytest.raises(ov.ParseError):
        ov.Graph.generate("nosuch:3")
    assert issubclass(ov.DegenerateColumnError, ov.DomainError)


def test_numerical_rank_and_metrics():
    x = np.ones((4, 3))
    x[:, 1] = [1.0, -1.0, 1.0, -1.0]
    assert ov.numerical_rank(x) == 2
    v = np.full(4, 0.5)
    assert ov.mu(np.outer(v, [1.0, 2.0]), v) == pytest.approx(0.0, abs=1e-14)
    assert ov.col_distance(np.outer(v, [1.0, 2.0])) == pytest.approx(0.0, abs=1e-14)


def test_batch_norm_columns():
    x = ov.random_features(10, 3, 7)
    y = ov.batch_norm(x)
    assert np.allclose(y.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(np.linalg.norm(y, axis=0), 1.0)


def test_wl_refine_star():
    m, colors = ov.wl_refine(ov.Graph.generate("star:5"))
    assert m == 2
    assert len(set(colors[1:])) == 1 and colors[0] != colors[1]


def test_vanilla_trajectory_collapses():
    g = ov.Graph.generate("er:60,0.2", 3).largest_component()
    a = ov.build_operator(g, "symnorm")
    x0 = ov.random_features(len(g), 4, 1)
    out = ov.run_trajectory(a, x0, "vanilla", steps=64, seed=2, weight_std=0.25)
    assert out["steps_done"] == 64
    assert out["aborted"] is None
    assert out["mu_v"][-1] < 1e-6 * ov.mu(x0, a.dominant_vector())


def test_pairnorm_abort_reported():
    g = ov.Graph.generate("cycle:6")
    a = ov.build_operator(g, "symnorm")
    x0 = np.ones((6, 2))
    out = ov.run_trajectory(a, x0, "pairnorm", steps=4)
    assert out["aborted"] is not None


def test_prop7_report():
    report = ov.check_prop7(ov.Graph.generate("star:4"))
    assert report["verdict"] == "pass"


def test_cli_spectrum():
    code, out, err = ov.cli(["spectrum", "--graph", "path:3", "--operator", "adjacency"])
    assert code == 0, err
    assert "1.41421356237" in out
