import itertools
import json
import math

import numpy as np
import pytest

from orderflow.errors import ArcNotInNetworkError, CapExceededError
from orderflow.networks import (NETWORK_CAPS, NodeKey, build_network, count_arcs_formula,
                                count_nodes_formula, expected_arc_count, semiorder_arc_count,
                                word_decode_arc, word_encode_arc)
from orderflow.relations import OrderKind

from oracles import brute_paths, fubini


def rule_arcs(n, kind):
    """Arc set generated directly from the move rules, as key pairs."""
    full = (1 << n) - 1
    arcs = set()
    if kind in ("lo", "wo"):
        for x in range(full + 1):
            for z in range(full + 1):
                if x & ~z or x == z:
                    continue
                if kind == "lo" and bin(z & ~x).count("1") != 1:
                    continue
                arcs.add((NodeKey(x), NodeKey(z)))
        return arcs
    if kind == "io":
        for x in range(full + 1):
            for y in range(full + 1):
                if y & ~x:
                    continue
                for k in range(n):
                    if not x >> k & 1:
                        arcs.add((NodeKey(x, y), NodeKey(x | 1 << k, y)))
                    elif not y >> k & 1:
                        arcs.add((NodeKey(x, y), NodeKey(x, y | 1 << k)))
        return arcs
    # semiorders: open any outside element at the end of L, or close L[0]
    start = NodeKey(0, 0, ())
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        succ = [NodeKey(v.x | 1 << k, v.y, v.order + (k,)) for k in range(n) if not v.x >> k & 1]
        if v.order:
            succ.append(NodeKey(v.x, v.y | 1 << v.order[0], v.order[1:]))
        for w in succ:
            arcs.add((v, w))
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return arcs


KINDS = ["lo", "wo", "io", "so"]


class TestSmallNetworks:
    def test_linear_one(self):
        net = build_network(1, "lo")
        assert net.num_nodes == 2 and net.num_arcs == 1
        assert net.keys == [NodeKey(0), NodeKey(1)]

    def test_semiorder_one_has_three_nodes(self):
        net = build_network(1, "so")
        assert net.keys == [NodeKey(0, 0, ()), NodeKey(1, 0, (0,)), NodeKey(1, 1, ())]
        assert count_nodes_formula(1, "so") == 3

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("n", range(1, 5))
    def test_arc_set_matches_move_rules(self, kind, n):
        net = build_network(n, kind)
        got = {net.arc(a) for a in range(net.num_arcs)}
        assert got == rule_arcs(n, kind)
        assert len(got) == net.num_arcs

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("n", range(1, 6))
    def test_structure(self, kind, n):
        net = build_network(n, kind)
        assert net.is_topologically_indexed()
        assert len(set(net.keys)) == net.num_nodes
        pairs = set(zip(net.tails.tolist(), net.heads.tolist()))
        assert len(pairs) == net.num_arcs
        assert net.source not in set(net.heads.tolist())
        assert net.sink not in set(net.tails.tolist())
        order = sorted(
            net.keys, key=lambda k: (bin(k.x).count("1"), bin(k.y or 0).count("1"),
                                     k.x, k.y or 0, k.order or ()))
        assert order == net.keys
        assert list(np.lexsort((net.heads, net.tails))) == list(range(net.num_arcs))


class TestCounts:
    @pytest.mark.parametrize("kind", ["lo", "wo", "io"])
    @pytest.mark.parametrize("n", range(1, 9))
    def test_built_counts_equal_closed_forms(self, kind, n):
        net = build_network(n, kind)
        assert net.num_nodes == count_nodes_formula(n, kind)
        assert net.num_arcs == count_arcs_formula(n, kind)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_semiorder_counts(self, n):
        net = build_network(n, "so")
        assert net.num_nodes == count_nodes_formula(n, "so")
        assert net.num_arcs == semiorder_arc_count(n) == expected_arc_count(n, "so")

    def test_published_values(self):
        assert count_arcs_formula(8, "lo") == 1024
        assert count_arcs_formula(5, "wo") == 211
        assert [count_arcs_formula(n, "io") for n in range(3, 8)] == [54, 216, 810, 2916, 10206]
        assert count_arcs_formula(4, "so") == 520
        assert count_nodes_formula(4, "io") == 81
        assert count_nodes_formula(5, "wo") == 32

    def test_semiorder_closed_form_differs_from_built_network(self):
        # the published closed form counts n - |Y| arcs out of every node
        assert [count_arcs_formula(n, "so") for n in range(1, 6)] == [2, 14, 84, 520, 3520]
        assert [semiorder_arc_count(n) for n in range(1, 6)] == [2, 12, 60, 304, 1680]

    @pytest.mark.parametrize("n", range(1, 8))
    def test_semiorder_bounds(self, n):
        net = build_network(n, "so")
        f = math.factorial(n)
        assert f <= net.num_nodes <= math.e ** 2 * f
        assert f <= net.num_arcs <= math.e ** 2 * n * f

    def test_reference_sizes(self):
        assert build_network(8, "lo").num_arcs == 1024
        assert build_network(5, "wo").num_arcs == 211
        assert build_network(6, "io").num_arcs == 2916


class TestPaths:
    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("n", range(1, 5))
    def test_lengths_and_counts(self, kind, n):
        net = build_network(n, kind)
        paths = brute_paths(net.tails, net.heads, net.source, net.sink)
        lengths = {len(p) for p in paths}
        if kind == "lo":
            assert lengths == {n}
            assert len(paths) == math.factorial(n)
        elif kind == "wo":
            assert lengths <= set(range(1, n + 1))
            assert len(paths) == fubini(n)
        else:
            assert lengths == {2 * n}
        if kind == "io" and n == 2:
            assert len(paths) == 6


class TestLookupsAndCaps:
    def test_node_and_arc_index(self):
        net = build_network(3, "lo")
        a = net.arc_index((0b001,), (0b011,))
        assert net.arc(a) == (NodeKey(1), NodeKey(3))
        with pytest.raises(ArcNotInNetworkError):
            net.arc_index((0,), (0b011,))
        with pytest.raises(KeyError):
            net.node_index((0b1000,))

    @pytest.mark.parametrize("kind", KINDS)
    def test_caps(self, kind):
        cap = NETWORK_CAPS[OrderKind.parse(kind)]
        with pytest.raises(CapExceededError):
            build_network(cap + 1, kind)

    def test_cap_override(self):
        with pytest.raises(CapExceededError):
            build_network(3, "io", cap=2)
        assert build_network(3, "io", cap=3).num_nodes == 27

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            build_network(0, "lo")


class TestWords:
    def test_examples(self):
        assert word_encode_arc(2, "wo", (NodeKey(0), NodeKey(3))) == "bb"
        assert word_encode_arc(1, "io", (NodeKey(0, 0), NodeKey(1, 0))) == "d"
        assert word_encode_arc(1, "io", (NodeKey(1, 0), NodeKey(1, 1))) == "e"

    def test_weak_word_count(self):
        words = {"".join(w) for w in itertools.product("abc", repeat=3)}
        valid = [w for w in words if "b" in w]
        assert len(valid) == 3 ** 3 - 2 ** 3 == 19

    @pytest.mark.parametrize("kind", ["wo", "io"])
    @pytest.mark.parametrize("n", range(1, 5))
    def test_roundtrip_is_bijective(self, kind, n):
        net = build_network(n, kind)
        words = set()
        for a in range(net.num_arcs):
            w = word_encode_arc(n, kind, net.arc(a))
            assert word_decode_arc(n, kind, w) == net.arc(a)
            words.add(w)
        assert len(words) == net.num_arcs

    def test_rejects_non_arcs(self):
        with pytest.raises(ArcNotInNetworkError):
            word_encode_arc(2, "wo", (NodeKey(1), NodeKey(1)))
        with pytest.raises(ArcNotInNetworkError):
            word_encode_arc(2, "io", (NodeKey(0, 0), NodeKey(3, 0)))
        with pytest.raises(ValueError):
            word_decode_arc(2, "wo", "aa")
        with pytest.raises(ValueError):
            word_encode_arc(2, "lo", (NodeKey(0), NodeKey(1)))


class TestExports:
    def test_json(self):
        net = build_network(2, "io")
        obj = json.loads(json.dumps(net.to_json()))
        assert obj["n"] == 2 and obj["kind"] == "io"
        assert len(obj["nodes"]) == 9 and len(obj["arcs"]) == 12
        assert obj["nodes"][obj["source"]] == {"x": [], "y": []}
        assert obj["nodes"][obj["sink"]] == {"x": [0, 1], "y": [0, 1]}

    def test_semiorder_json_keeps_sequence(self):
        obj = build_network(2, "so").to_json()
        assert {"x": [0, 1], "y": [], "order": [1, 0]} in obj["nodes"]

    def test_dot(self):
        text = build_network(2, "lo").to_dot()
        assert text.startswith('digraph "lo_2"')
        assert text.count("->") == 4
        assert 'label="{0,1}"' in text
