"""Versioned parameter checkpoints.

A checkpoint is a directory holding `manifest.json` (format version, one entry
per array with shape, flags and byte offset, plus free-form metadata) and
`payload.bin`, the little-endian float64 concatenation of all arrays.
"""
import json
import logging
import os

import numpy as np

from .util import jsonify_numeric

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
MANIFEST_FILENAME = 'manifest.json'
PAYLOAD_FILENAME = 'payload.bin'
PAYLOAD_DTYPE = np.dtype('<f8')


def save_checkpoint(directory, arrays, flags=None, metadata=None):
    """Write `arrays` (name -> ndarray) with optional per-name flag dicts."""
    flags = flags or {}
    os.makedirs(directory, exist_ok=True)

    entries = {}
    offset = 0
    with open(os.path.join(directory, PAYLOAD_FILENAME), 'wb') as payload:
        for name, array in arrays.items():
            data = np.ascontiguousarray(array, dtype=PAYLOAD_DTYPE)
            payload.write(data.tobytes())
            entries[name] = {
                'shape': list(data.shape),
                'offset': offset,
                **flags.get(name, {})
            }
            offset += data.nbytes

    manifest = {
        'version': CHECKPOINT_VERSION,
        'entries': entries,
        'metadata': jsonify_numeric(metadata or {})
    }
    with open(os.path.join(directory, MANIFEST_FILENAME), 'w') as fd:
        json.dump(manifest, fd, indent=2, sort_keys=True)
    logger.debug("Saved %s arrays (%s bytes) to '%s'.", len(entries), offset, directory)


def load_checkpoint(directory):
    """Return (arrays, flags, metadata) as written by `save_checkpoint`."""
    with open(os.path.join(directory, MANIFEST_FILENAME), 'r') as fd:
        manifest = json.load(fd)
    assert manifest['version'] == CHECKPOINT_VERSION, manifest['version']

    with open(os.path.join(directory, PAYLOAD_FILENAME), 'rb') as fd:
        payload = fd.read()

    arrays = {}
    flags = {}
    for name, entry in manifest['entries'].items():
        shape = tuple(entry['shape'])
        count = int(np.prod(shape, dtype=np.int64))
        data = np.frombuffer(
            payload, dtype=PAYLOAD_DTYPE, count=count, offset=entry['offset']
        )
        arrays[name] = data.astype(np.float64).reshape(shape)
        flags[name] = {
            k: v for k, v in entry.items() if k not in ('shape', 'offset')
        }
    return arrays, flags, manifest['metadata']


def has_checkpoint(directory):
    return os.path.isfile(os.path.join(directory, MANIFEST_FILENAME))
