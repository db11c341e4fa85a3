"""Arithmetic instrumentation.

:class:`CountingFloat` is a float stand-in that records every arithmetic
operation it takes part in on a shared :class:`OpCounter`. Feeding object
arrays of them through the un-jitted kernels yields exact operation tallies
for the very code that runs in production.

Divisions are reported with multiplies and subtractions with additions,
the usual convention for hardware complexity tables. Comparisons, negation
and square roots are not counted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class OpCounter:
    mul: int = 0
    div: int = 0
    add: int = 0
    sub: int = 0

    @property
    def multiplies(self) -> int:
        return self.mul + self.div

    @property
    def additions(self) -> int:
        return self.add + self.sub

    def snapshot(self) -> tuple[int, int]:
        return self.multiplies, self.additions

    def reset(self) -> None:
        self.mul = self.div = self.add = self.sub = 0


def _val(x):
    return x.v if isinstance(x, CountingFloat) else x


class CountingFloat:
    __slots__ = ("v", "ctr")

    def __init__(self, v: float, ctr: OpCounter):
        self.v = float(v)
        self.ctr = ctr

    def _wrap(self, v):
        return CountingFloat(v, self.ctr)

    def __add__(self, o):
        self.ctr.add += 1
        return self._wrap(self.v + _val(o))

    __radd__ = __add__

    def __sub__(self, o):
        self.ctr.sub += 1
        return self._wrap(self.v - _val(o))

    def __rsub__(self, o):
        self.ctr.sub += 1
        return self._wrap(_val(o) - self.v)

    def __mul__(self, o):
        self.ctr.mul += 1
        return self._wrap(self.v * _val(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        self.ctr.div += 1
        return self._wrap(self.v / _val(o))

    def __rtruediv__(self, o):
        self.ctr.div += 1
        return self._wrap(_val(o) / self.v)

    def __neg__(self):
        return self._wrap(-self.v)

    def __float__(self):
        return self.v

    def __lt__(self, o):
        return self.v < _val(o)

    def __le__(self, o):
        return self.v <= _val(o)

    def __gt__(self, o):
        return self.v > _val(o)

    def __ge__(self, o):
        return self.v >= _val(o)

    def __eq__(self, o):
        return self.v == _val(o)

    def __hash__(self):
        return hash(self.v)

    def __repr__(self):
        return f"CountingFloat({self.v!r})"


def counting_array(values, ctr: OpCounter) -> np.ndarray:
    """Object array of :class:`CountingFloat` sharing one counter."""
    values = np.asarray(values, dtype=np.float64)
    out = np.empty(values.shape[0], dtype=object)
    for i, v in enumerate(values):
        out[i] = CountingFloat(v, ctr)
    return out


def scratch(n: int) -> np.ndarray:
    return np.zeros(n, dtype=object)


def to_float(values) -> np.ndarray:
    return np.array([float(v) for v in values], dtype=np.float64)
