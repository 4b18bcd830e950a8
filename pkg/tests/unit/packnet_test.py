import numpy as np
import pytest

from lifelong_skill_policy.core.nn import Linear, Module
from lifelong_skill_policy.core.optim import AdamW, optimizer_step
from lifelong_skill_policy.core.tensor import Parameter
from lifelong_skill_policy.lifelong.packnet import FREE, PackNetState, is_exempt


class ToyCodebook(Module):
    def __init__(self):
        self.K = Parameter(np.ones((2, 4)))


class Toy(Module):
    def __init__(self):
        rng = np.random.default_rng(0)
        self.layer = Linear(4, 1, rng)
        self.layer.weight.data = np.array([[0.1], [-0.9], [0.5], [0.05]])
        self.layer.bias.data = np.array([0.3])
        self.codebook = ToyCodebook()


def test_top_magnitudes_are_assigned():
    toy = Toy()
    packnet = PackNetState(toy, keep_ratio=0.5)
    packnet.begin_task(0)
    packnet.prune_and_freeze(0)
    owners = packnet.owners['layer.weight'].reshape(-1)
    assert owners.tolist() == [FREE, 0, 0, FREE]
    assert toy.layer.weight.data.reshape(-1).tolist() == [0.0, -0.9, 0.5, 0.0]
    # Vectors are assigned whole.
    assert packnet.owners['layer.bias'].tolist() == [0]
    assert packnet.history == [(0, 3, 2)]


def test_exempt_parameters_are_not_tracked():
    packnet = PackNetState(Toy(), keep_ratio=0.5)
    assert set(packnet.parameters) == {'layer.weight', 'layer.bias'}
    assert is_exempt('codebook.subsets.0.K')
    assert is_exempt('skill_transformer.blocks.1.adapter.U')
    assert is_exempt('perception.language_table')
    assert not is_exempt('head.mlp.layers.0.weight')


def test_later_tasks_only_train_free_elements():
    toy = Toy()
    packnet = PackNetState(toy, keep_ratio=0.5)
    packnet.begin_task(0)
    packnet.prune_and_freeze(0)
    packnet.finish_task(0)

    owned = toy.layer.weight.data.copy()
    optimizer = AdamW(toy.named_parameters(), lr=0.1, weight_decay=0.0)
    toy.layer.weight.grad = np.ones((4, 1))
    optimizer_step(optimizer)
    weight = toy.layer.weight.data.reshape(-1)
    assert weight[1] == owned[1, 0] and weight[2] == owned[2, 0]
    assert weight[0] != 0.0 and weight[3] != 0.0


def test_masked_forward_hides_free_and_later_elements():
    toy = Toy()
    packnet = PackNetState(toy, keep_ratio=0.5)
    packnet.begin_task(0)
    packnet.prune_and_freeze(0)
    packnet.finish_task(0)
    toy.layer.weight.data = np.array([[0.7], [-0.9], [0.5], [-0.2]])
    packnet.begin_task(1)
    packnet.prune_and_freeze(1)

    assert packnet.owners['layer.weight'].reshape(-1).tolist() == [1, 0, 0, FREE]
    x = np.ones((1, 4))
    with packnet.masked_forward(0):
        assert toy.layer(x).item() == pytest.approx(-0.9 + 0.5 + 0.3)
    with packnet.masked_forward(1):
        assert toy.layer(x).item() == pytest.approx(0.7 - 0.9 + 0.5 + 0.3)
    assert toy.layer.weight.data.reshape(-1).tolist() == [0.7, -0.9, 0.5, 0.0]


def test_free_elements_are_visible_while_training():
    toy = Toy()
    packnet = PackNetState(toy, keep_ratio=0.5)
    with packnet.masked_forward(0, include_free=True):
        assert toy.layer.weight.data.reshape(-1).tolist() == [0.1, -0.9, 0.5, 0.05]
    with packnet.masked_forward(0):
        assert not toy.layer.weight.data.any()


def test_fine_tuning_only_moves_owned_elements():
    toy = Toy()
    packnet = PackNetState(toy, keep_ratio=0.5)
    packnet.begin_task(0)
    packnet.prune_and_freeze(0)
    packnet.train_owned(0)
    optimizer = AdamW(toy.named_parameters(), lr=0.1, weight_decay=0.0)
    toy.layer.weight.grad = np.ones((4, 1))
    optimizer_step(optimizer)
    weight = toy.layer.weight.data.reshape(-1)
    assert weight[0] == 0.0 and weight[3] == 0.0
    assert weight[1] != -0.9 and weight[2] != 0.5


def test_state_round_trip():
    toy = Toy()
    packnet = PackNetState(toy, keep_ratio=0.5)
    packnet.begin_task(0)
    packnet.prune_and_freeze(0)
    restored = PackNetState(Toy(), keep_ratio=0.5)
    restored.restore(packnet.state(), packnet.arrays())
    assert restored.history == packnet.history
    for name, owners in packnet.owners.items():
        assert np.array_equal(restored.owners[name], owners)
