import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orderflow.errors import DimensionMismatchError
from orderflow.flowpoly import decode_path, enumerate_paths, path_to_flow
from orderflow.networks import NodeKey, build_network
from orderflow.projections import build_projection
from orderflow.relations import characteristic_vector, pair_list

from oracles import brute_vertices

KINDS = ["lo", "wo", "io", "so"]


def row_of(pm, i, j):
    return set(pm.row(pair_list(pm.n).index((i, j))).tolist())


def defining_row(net, i, j):
    """Arcs selected by the membership condition, read off the node keys."""
    out = set()
    for a in range(net.num_arcs):
        tail, head = net.arc(a)
        base = tail.x if tail.y is None else tail.y
        if base >> i & 1 and (head.x & ~tail.x) >> j & 1:
            out.add(a)
    return out


class TestRows:
    def test_linear_two(self):
        net = build_network(2, "lo")
        pm = build_projection(net)
        assert row_of(pm, 0, 1) == {net.arc_index((1,), (3,))}

    def test_weak_two_excludes_jump(self):
        net = build_network(2, "wo")
        pm = build_projection(net)
        row = row_of(pm, 0, 1)
        assert net.arc_index((1,), (3,)) in row
        assert net.arc_index((0,), (3,)) not in row

    def test_interval_two(self):
        net = build_network(2, "io")
        pm = build_projection(net)
        expected = {a for a in range(net.num_arcs)
                    if net.arc(a)[0].y & 1 and net.arc(a)[1].x & ~net.arc(a)[0].x & 2}
        assert row_of(pm, 0, 1) == expected and len(expected) == 1
        assert net.arc(next(iter(expected))) == (NodeKey(1, 1), NodeKey(3, 1))

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("n", range(2, 5))
    def test_rows_match_definition(self, kind, n):
        net = build_network(n, kind)
        pm = build_projection(net)
        assert set(np.unique(pm.matrix.data).tolist()) <= {1.0}
        for i, j in pair_list(n):
            assert row_of(pm, i, j) == defining_row(net, i, j)


class TestApply:
    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("n", range(1, 5))
    def test_vertex_images(self, kind, n):
        net = build_network(n, kind)
        pm = build_projection(net)
        images = set()
        for p in enumerate_paths(net):
            img = pm.apply(path_to_flow(net, p))
            np.testing.assert_array_equal(img, characteristic_vector(decode_path(net, p)))
            np.testing.assert_array_equal(pm.path_image(p), img)
            images.add(img.tobytes())
        assert images == {v.tobytes() for v in brute_vertices(n, kind)}

    def test_zero_flow(self):
        pm = build_projection(build_network(3, "io"))
        np.testing.assert_array_equal(pm.apply(np.zeros(pm.network.num_arcs)), 0.0)

    def test_uniform_linear_mixture_is_half(self):
        net = build_network(3, "lo")
        pm = build_projection(net)
        paths = enumerate_paths(net)
        f = sum(path_to_flow(net, p) for p in paths) / len(paths)
        np.testing.assert_allclose(pm.apply(f), 0.5)

    @pytest.mark.parametrize("kind", KINDS)
    @given(seed=st.integers(0, 2 ** 32 - 1))
    def test_linearity_and_unit_cube(self, kind, seed):
        net = build_network(3, kind)
        pm = build_projection(net)
        rng = np.random.default_rng(seed)
        f1, f2 = rng.normal(size=(2, net.num_arcs))
        a, b = rng.normal(size=2)
        np.testing.assert_allclose(pm.apply(a * f1 + b * f2),
                                   a * pm.apply(f1) + b * pm.apply(f2), atol=1e-12)
        paths = enumerate_paths(net)
        w = rng.dirichlet(np.ones(len(paths)))
        img = pm.apply(sum(wi * path_to_flow(net, p) for wi, p in zip(w, paths)))
        assert np.all(img >= -1e-12) and np.all(img <= 1 + 1e-12)

    def test_dimension_checks(self):
        pm = build_projection(build_network(3, "lo"))
        with pytest.raises(DimensionMismatchError):
            pm.apply(np.zeros(3))
        with pytest.raises(DimensionMismatchError):
            pm.apply_adjoint(np.zeros(5))


class TestAdjoint:
    def test_zero(self):
        pm = build_projection(build_network(3, "so"))
        np.testing.assert_array_equal(pm.apply_adjoint(np.zeros(6)), 0.0)

    def test_indicator_linear_two(self):
        net = build_network(2, "lo")
        pm = build_projection(net)
        c = pm.apply_adjoint(np.array([1.0, 0.0]))
        expected = np.zeros(net.num_arcs)
        expected[net.arc_index((1,), (3,))] = 1.0
        np.testing.assert_array_equal(c, expected)

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("n", range(1, 5))
    def test_bilinear_identity_and_dense_agreement(self, kind, n):
        net = build_network(n, kind)
        pm = build_projection(net)
        dense = pm.matrix.toarray()
        rng = np.random.default_rng(n)
        for _ in range(25):
            f = rng.normal(size=net.num_arcs)
            g = rng.normal(size=n * (n - 1))
            assert abs(pm.apply(f) @ g - f @ pm.apply_adjoint(g)) <= 1e-12 * max(1.0, abs(f @ pm.apply_adjoint(g)))
            np.testing.assert_allclose(pm.apply_adjoint(g), dense.T @ g, atol=1e-12)


def test_json_export():
    pm = build_projection(build_network(2, "lo"))
    obj = json.loads(json.dumps(pm.to_json()))
    assert obj["pairs"] == [[0, 1], [1, 0]]
    assert len(obj["rows"]) == 2 and all(len(r) == 1 for r in obj["rows"])
