from typing import Callable, Dict, List, Tuple, Union

import numpy as np
from hypothesis import example

from lifelong_skill_policy.envs.world import PROPRIO_DIM, VIEW_DIM
from lifelong_skill_policy.policy.perception import WindowBatch


def examples(example_list: List[Union[Tuple, Dict]]) -> Callable:
    """A decorator which ensures a specific list of examples is always tested.

    Generalizes @hypothesis.example decorator to a list of examples.
    """
    def accept(test):
        for ex in reversed(example_list):
            if isinstance(ex, dict):
                test = example(**ex)(test)
            else:
                test = example(*ex)(test)
        return test

    return accept


def numerical_gradient(f, x, h=1e-6):
    """Central finite differences of the scalar function `f` at array `x`."""
    grad = np.zeros_like(x)
    for index in np.ndindex(*x.shape):
        saved = x[index]
        x[index] = saved + h
        upper = f()
        x[index] = saved - h
        lower = f()
        x[index] = saved
        grad[index] = (upper - lower) / (2 * h)
    return grad


def relative_error(a, b):
    return float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(a)), np.max(np.abs(b))))


def random_window_batch(rng, batch_size, window, n_languages=1):
    """WindowBatch of Gaussian features with the observation layout of the world."""
    return WindowBatch(
        rng.normal(size=(batch_size, window, VIEW_DIM)),
        rng.normal(size=(batch_size, window, VIEW_DIM)),
        rng.normal(size=(batch_size, window, PROPRIO_DIM)),
        rng.integers(0, n_languages, size=batch_size)
    )
