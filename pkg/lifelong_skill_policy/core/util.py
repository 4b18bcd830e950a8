import logging

import numpy as np


def transform(obj, transformer):
    if isinstance(obj, dict):
        obj = {k: transform(v, transformer) for k, v in obj.items()}
    elif isinstance(obj, list):
        obj = [transform(i, transformer) for i in obj]
    elif isinstance(obj, tuple):
        obj = tuple(transform(i, transformer) for i in obj)
    obj = transformer(obj)
    return obj


def jsonify_numeric(obj):
    """Convert numpy scalars and arrays (recursively) into plain python values."""
    def transformer(obj):
        if isinstance(obj, np.ndarray):
            return jsonify_numeric(obj.tolist())
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        return obj
    return transform(obj, transformer)


class PrettyFloat(float):
    def __str__(self):
        return '%.3e' % self

    def __repr__(self):
        return self.__str__()


class PrettyArray:
    def __init__(self, array):
        self._array = array

    def __str__(self):
        return np.array2string(
            self._array, precision=3, threshold=16, floatmode='maxprec'
        )

    def __repr__(self):
        return self.__str__()


class LoggerFormatter(logging.Formatter):
    def __init__(self, *args, **kwargs):
        self.precise = 'precise' in kwargs.keys() and kwargs['precise']
        kwargs.pop('precise', None)
        super().__init__(*args, **kwargs)

    def prettify_numbers(self, obj):
        if isinstance(obj, np.ndarray):
            return PrettyArray(obj)
        if isinstance(obj, (float, np.floating)):
            return PrettyFloat(obj)
        return obj

    def format(self, record):
        if not self.precise:
            record.args = transform(record.args, self.prettify_numbers)
        text = f'{record.levelname:7s}::{record.module:<11s}: {record.getMessage()}'
        return text


class classproperty(property):
    def __get__(self, cls, owner):
        return classmethod(self.fget).__get__(None, owner)()
