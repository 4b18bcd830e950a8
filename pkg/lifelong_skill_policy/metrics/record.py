"""Success-rate records of lifelong runs.

`c[i, j, e]` is the success rate on task j after training tasks 0..i, the
last one for `eval_points[e]` epochs. Only j <= i is defined; unset entries
are NaN.
"""
import json
import logging

import attr
import numpy as np

from ..core.errors import DataError
from ..core.util import jsonify_numeric

logger = logging.getLogger(__name__)

RECORD_VERSION = 1


def _as_success_array(value):
    return np.array(value, dtype=np.float64)


@attr.s(eq=False)
class SuccessRecord:
    task_ids = attr.ib(converter=tuple)
    eval_points = attr.ib(converter=tuple)
    c = attr.ib(converter=_as_success_array)

    @c.validator
    def _check_c(self, attribute, value):
        K, E = len(self.task_ids), len(self.eval_points)
        assert value.shape == (K, K, E), (value.shape, (K, K, E))
        defined = value[~np.isnan(value)]
        assert np.all((defined >= 0) & (defined <= 1)), "success rates lie in [0, 1]"
        upper = np.triu(np.ones((K, K), dtype=bool), k=1)
        assert np.all(np.isnan(value[upper])), "entries above the diagonal are undefined"

    @classmethod
    def empty(cls, task_ids, eval_points):
        K, E = len(task_ids), len(eval_points)
        return cls(task_ids, eval_points, np.full((K, K, E), np.nan))

    @property
    def K(self):
        return len(self.task_ids)

    @property
    def E(self):
        return len(self.eval_points)

    def set(self, i, j, e, value):
        assert j <= i, (i, j)
        assert 0.0 <= value <= 1.0, value
        self.c[i, j, e] = value

    def missing(self, diagonal_only=False):
        """(i, j, e) indices of unset entries needed by the metrics."""
        return [
            (i, j, e)
            for i in range(self.K)
            for j in (range(i, i + 1) if diagonal_only else range(i + 1))
            for e in range(self.E)
            if np.isnan(self.c[i, j, e])
        ]

    def require_complete(self, diagonal_only=False):
        missing = self.missing(diagonal_only)
        if missing:
            raise DataError("incomplete success record", missing)

    def best_index(self, i):
        """e_i*: the earliest eval point with the best success on task i."""
        return int(np.argmax(self.c[i, i]))

    def best(self, i):
        return float(self.c[i, i, self.best_index(i)])

    def clamped(self):
        """Copy with c[i, i, e] = c_ii for every eval point after e_i*."""
        c = self.c.copy()
        for i in range(self.K):
            if np.isnan(c[i, i]).any():
                continue
            c[i, i, self.best_index(i):] = self.best(i)
        return SuccessRecord(self.task_ids, self.eval_points, c)

    def final(self):
        """K x K matrix of c_ij = c[i, j, e_i*] (NaN above the diagonal)."""
        result = np.full((self.K, self.K), np.nan)
        for i in range(self.K):
            if np.isnan(self.c[i, i]).any():
                continue
            result[i, :i + 1] = self.c[i, :i + 1, self.best_index(i)]
        return result

    def scaled(self, factor):
        return SuccessRecord(self.task_ids, self.eval_points, self.c * factor)

    def to_dict(self):
        c = [[[None if np.isnan(v) else float(v) for v in row] for row in plane]
             for plane in self.c]
        return jsonify_numeric({
            'version': RECORD_VERSION,
            'task_ids': list(self.task_ids),
            'eval_points': list(self.eval_points),
            'c': c
        })

    @classmethod
    def from_dict(cls, d):
        assert d['version'] == RECORD_VERSION, d['version']
        c = [[[np.nan if v is None else v for v in row] for row in plane]
             for plane in d['c']]
        return cls(d['task_ids'], d['eval_points'], c)

    def save(self, filename):
        with open(filename, 'w') as fd:
            json.dump(self.to_dict(), fd, indent=2)
        logger.debug("Success record written to '%s'.", filename)

    @classmethod
    def load(cls, filename):
        with open(filename, 'r') as fd:
            return cls.from_dict(json.load(fd))


@attr.s(eq=False)
class MultitaskRecord:
    """Per-task success curves (K, E) of one policy trained on all tasks."""
    task_ids = attr.ib(converter=tuple)
    eval_points = attr.ib(converter=tuple)
    curves = attr.ib(converter=_as_success_array)

    @classmethod
    def empty(cls, task_ids, eval_points):
        return cls(task_ids, eval_points, np.full((len(task_ids), len(eval_points)), np.nan))

    def best_index(self):
        return int(np.argmax(np.mean(self.curves, axis=0)))

    def success(self):
        """Average success over all tasks at the best eval point."""
        missing = [(int(j), int(e)) for j, e in zip(*np.nonzero(np.isnan(self.curves)))]
        if missing:
            raise DataError("incomplete multitask record", missing)
        return float(np.mean(self.curves[:, self.best_index()]))

    def to_dict(self):
        return jsonify_numeric({
            'version': RECORD_VERSION,
            'task_ids': list(self.task_ids),
            'eval_points': list(self.eval_points),
            'curves': [[None if np.isnan(v) else float(v) for v in row] for row in self.curves]
        })

    @classmethod
    def from_dict(cls, d):
        assert d['version'] == RECORD_VERSION, d['version']
        curves = [[np.nan if v is None else v for v in row] for row in d['curves']]
        return cls(d['task_ids'], d['eval_points'], curves)
