import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sbnet.netcore import (
    BRUTEFORCE_CAP,
    CapacityError,
    Kernel,
    Layer,
    Network,
    compose,
    joint_from_kernel,
    kernel_from_dict,
    kernel_to_dict,
    layer_kernel,
    logit,
    mutual_information,
    network_from_dict,
    network_kernel,
    network_kernel_bruteforce,
    network_to_dict,
    product_expand,
    random_network,
    sample,
    sigmoid,
)

GAMMA = math.log(39.0)  # logit(0.975)


def copy_net(n_layers, gamma=GAMMA):
    return Network(1, tuple(Layer([[2 * gamma]], [-gamma]) for _ in range(n_layers)))


class TestSigmoid:
    def test_values(self):
        assert sigmoid(0.0) == 0.5
        assert logit(0.975) == pytest.approx(3.6635616461296463, abs=1e-12)
        assert sigmoid(logit(0.3)) == pytest.approx(0.3, abs=1e-15)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_logit_domain(self, p):
        with pytest.raises(ValueError):
            logit(p)

    def test_sigmoid_saturates_without_warnings(self):
        with np.errstate(all="raise"):
            assert sigmoid(-800.0) == 0.0 and sigmoid(800.0) == 1.0


class TestTypes:
    def test_layer_shape_mismatch(self):
        with pytest.raises(ValueError):
            Layer(np.zeros((2, 3)), np.zeros(3))

    def test_layer_nonfinite(self):
        with pytest.raises(ValueError):
            Layer([[np.inf]], [0.0])

    def test_network_chain_check(self):
        with pytest.raises(ValueError):
            Network(2, (Layer(np.zeros((3, 2)), np.zeros(3)), Layer(np.zeros((1, 2)), np.zeros(1))))

    def test_layers_are_read_only(self):
        layer = Layer([[1.0]], [0.0])
        with pytest.raises(ValueError):
            layer.weights[0, 0] = 2.0

    def test_kernel_shape(self):
        with pytest.raises(ValueError):
            Kernel(np.ones((3, 2)) / 2)
        assert (Kernel(np.ones((4, 8)) / 8).d, Kernel(np.ones((4, 8)) / 8).s) == (2, 3)

    def test_param_count(self):
        net = random_network((2, 3, 2), np.random.default_rng(0))
        assert net.param_count == 3 * 3 + 2 * 4 == net.parameters().size
        assert net.unit_count == 5 and net.hidden_widths == [3]


class TestLayerKernel:
    def test_unbiased_unit(self):
        np.testing.assert_allclose(layer_kernel(Layer([[0.0]], [0.0])).probs, [[0.5, 0.5]] * 2)

    def test_copy_unit(self):
        K = layer_kernel(Layer([[2 * GAMMA]], [-GAMMA])).probs
        np.testing.assert_allclose(K, [[0.975, 0.025], [0.025, 0.975]], atol=1e-15)

    def test_bias_only_layer(self):
        K = layer_kernel(Layer(np.zeros((2, 0)), [logit(0.3), logit(0.8)]))
        assert K.d == 0
        np.testing.assert_allclose(K.probs[0], [0.7 * 0.2, 0.3 * 0.2, 0.7 * 0.8, 0.3 * 0.8], atol=1e-15)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            layer_kernel(Layer(np.zeros((1, 21)), np.zeros(1)))


class TestNetworkKernel:
    def test_single_layer(self):
        net = random_network((2, 3), np.random.default_rng(1))
        np.testing.assert_array_equal(network_kernel(net).probs, layer_kernel(net.layers[0]).probs)

    def test_two_copies(self):
        K = network_kernel(copy_net(2)).probs
        assert K[0, 0] == pytest.approx(0.951250, abs=1e-12)
        assert K[1, 1] == pytest.approx(0.975**2 + 0.025**2, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_matches_bruteforce(self, seed):
        rng = np.random.default_rng(seed)
        widths = tuple(int(w) for w in rng.integers(1, 4, size=rng.integers(2, 5)))
        net = random_network((int(rng.integers(0, 3)),) + widths, rng)
        K = network_kernel(net)
        np.testing.assert_allclose(K.probs, network_kernel_bruteforce(net).probs, atol=1e-12, rtol=0)
        assert K.is_stochastic(1e-12)

    def test_zero_hidden_layers(self):
        net = random_network((2, 3), np.random.default_rng(4))
        np.testing.assert_allclose(
            network_kernel_bruteforce(net).probs, layer_kernel(net.layers[0]).probs, atol=1e-15
        )

    def test_bruteforce_cap(self):
        net = random_network((1, 13, 12, 1), np.random.default_rng(0))
        assert sum(net.hidden_widths) > BRUTEFORCE_CAP
        with pytest.raises(CapacityError):
            network_kernel_bruteforce(net)

    def test_composition_is_associative(self):
        net = random_network((2, 3, 2, 3, 2), np.random.default_rng(5))
        for k in range(1, len(net.layers)):
            head = network_kernel(Network(net.d, net.layers[:k]))
            tail = network_kernel(Network(head.s, net.layers[k:]))
            np.testing.assert_allclose(compose(head, tail).probs, network_kernel(net).probs, atol=1e-12)

    def test_chunked_propagation_matches_dense(self, monkeypatch):
        import sbnet.netcore as nc

        net = random_network((3, 4, 2), np.random.default_rng(6))
        dense = network_kernel(net).probs
        monkeypatch.setattr(nc, "_CHUNK", 3)
        np.testing.assert_allclose(network_kernel(net).probs, dense, atol=1e-15)


class TestProductExpand:
    def test_uniform(self):
        np.testing.assert_allclose(product_expand([0.5, 0.5]), [0.25] * 4)

    def test_point_mass(self):
        np.testing.assert_array_equal(product_expand([1.0]), [0.0, 1.0])

    def test_zero_state(self):
        row = product_expand([2 / 3, 6 / 7, 7 / 8])
        assert row[0] == pytest.approx((1 / 3) * (1 / 7) * (1 / 8), abs=1e-15)

    @given(st.lists(st.floats(0, 1), min_size=0, max_size=8))
    def test_normalized(self, p):
        row = product_expand(p)
        assert row.size == 1 << len(p)
        assert row.sum() == pytest.approx(1.0, abs=1e-12)


class TestSampling:
    def test_point_mass(self):
        net = Network(1, (Layer([[200.0]], [-100.0]), Layer([[-200.0], [200.0]], [100.0, -100.0])))
        counts = sample(net, (1,), 500, seed=3)
        assert counts[2] == 500 and counts.sum() == 500

    def test_fair_unit(self):
        counts = sample(Network(0, (Layer(np.zeros((1, 0)), [0.0]),)), (), 100_000, seed=11)
        assert abs(counts[1] / 1e5 - 0.5) < 0.01

    def test_deterministic(self):
        net = random_network((2, 3, 2), np.random.default_rng(2))
        a = sample(net, (0, 1), 1000, seed=9, key=(1, 2))
        np.testing.assert_array_equal(a, sample(net, (0, 1), 1000, seed=9, key=(1, 2)))
        assert not np.array_equal(a, sample(net, (0, 1), 1000, seed=10, key=(1, 2)))

    def test_clt_band(self):
        n, hits, total = 25_000, 0, 0
        for t in range(20):
            net = random_network((2, 3, 2), np.random.default_rng(100 + t), scale=1.5)
            K = network_kernel(net).probs
            for x in range(4):
                freq = sample(net, ((x >> 0) & 1, (x >> 1) & 1), n, seed=t, key=(x,)) / n
                band = 3 * np.sqrt(K[x] * (1 - K[x]) / n) + 1e-12
                hits += int(np.sum(np.abs(freq - K[x]) <= band))
                total += K.shape[1]
        assert hits / total >= 0.99

    def test_input_length(self):
        with pytest.raises(ValueError):
            sample(copy_net(1), (0, 1), 10, seed=0)


class TestMutualInformation:
    def test_independent(self):
        assert mutual_information(np.full((2, 2), 0.25)) == pytest.approx(0.0, abs=1e-15)

    def test_identity_channel(self):
        assert mutual_information(np.eye(4) / 4) == pytest.approx(2.0, abs=1e-12)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            mutual_information(np.full((2, 2), 0.3))

    @pytest.mark.parametrize("seed", range(10))
    def test_bottleneck(self, seed):
        net = random_network((3, 4, 1, 4, 3), np.random.default_rng(seed), scale=4.0)
        assert mutual_information(joint_from_kernel(network_kernel(net))) <= 1.0 + 1e-9


class TestJson:
    def test_network_round_trip(self):
        net = random_network((2, 3, 2), np.random.default_rng(8))
        back = network_from_dict(network_to_dict(net))
        for a, b in zip(net.layers, back.layers):
            np.testing.assert_array_equal(a.weights, b.weights)
            np.testing.assert_array_equal(a.biases, b.biases)

    def test_bias_only_round_trip(self):
        import json

        net = Network(0, (Layer(np.zeros((2, 0)), [0.1, 0.2]), Layer(np.ones((1, 2)), [0.0])))
        back = network_from_dict(json.loads(json.dumps(network_to_dict(net))))
        assert back.d == 0 and back.layers[0].weights.shape == (2, 0)

    def test_kernel_round_trip(self):
        import json

        K = Kernel(np.array([[1 / 3, 2 / 3], [0.1, 0.9]]))
        back = kernel_from_dict(json.loads(json.dumps(kernel_to_dict(K))))
        np.testing.assert_array_equal(back.probs, K.probs)

    def test_kernel_schema_mismatch(self):
        with pytest.raises(ValueError):
            kernel_from_dict({"d": 2, "s": 1, "rows": [[0.5, 0.5], [0.5, 0.5]]})
