import json
import os

import numpy as np

from lifelong_skill_policy.core.checkpoint import (MANIFEST_FILENAME, has_checkpoint,
                                                   load_checkpoint, save_checkpoint)


def test_arrays_flags_and_metadata_survive(tmp_path):
    directory = str(tmp_path / 'task-00')
    rng = np.random.default_rng(3)
    arrays = {
        'head.weight': rng.normal(size=(3, 4)),
        'head.bias': rng.normal(size=4),
        'scalar': np.array(2.5)
    }
    flags = {'head.weight': {'frozen': True, 'trainable': True}}
    metadata = {'finished': np.int64(1), 'record': {'c': [[0.5, None]]}}

    assert not has_checkpoint(directory)
    save_checkpoint(directory, arrays, flags=flags, metadata=metadata)
    assert has_checkpoint(directory)

    loaded, loaded_flags, loaded_metadata = load_checkpoint(directory)
    assert sorted(loaded) == sorted(arrays)
    for name, array in arrays.items():
        assert loaded[name].shape == array.shape
        assert np.array_equal(loaded[name], array)
    assert loaded_flags['head.weight'] == {'frozen': True, 'trainable': True}
    assert loaded_flags['head.bias'] == {}
    assert loaded_metadata == {'finished': 1, 'record': {'c': [[0.5, None]]}}


def test_manifest_is_versioned(tmp_path):
    directory = str(tmp_path)
    save_checkpoint(directory, {'x': np.zeros(2)})
    with open(os.path.join(directory, MANIFEST_FILENAME)) as fd:
        manifest = json.load(fd)
    assert manifest['version'] == 1
    assert manifest['entries']['x'] == {'shape': [2], 'offset': 0}
