"""Fixed test corpora for the inequality samplers.

Changing any member requires bumping ``CORPUS_VERSION`` so that recorded
scan results stay attributable.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .duhamel import SourceTerm
from .fields import bump

__all__ = ["CORPUS_VERSION", "Profile", "glassey_corpus", "source_corpus", "DILATIONS"]

CORPUS_VERSION = "2026.1"

DILATIONS = (0.25, 1.0, 4.0)


@dataclass(frozen=True)
class Profile:
    """Function on ``(0, inf)`` supported in ``support`` and smooth between ``breaks``."""

    name: str
    func: Callable
    support: tuple
    breaks: tuple = ()

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def dilate(self, lam):
        """``x -> g(lam x)``."""
        a, b = self.support
        return Profile(f"{self.name}@{lam:g}", _Dilated(float(lam), self.func),
                       (a / lam, b / lam), tuple(v / lam for v in self.breaks))

    @property
    def edges(self):
        a, b = self.support
        return (a,) + tuple(self.breaks) + (b,)


# module-level callables keep profiles picklable
@dataclass(frozen=True)
class _Dilated:
    lam: float
    func: Callable

    def __call__(self, x):
        return self.func(self.lam * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class _Indicator:
    lo: float
    hi: float

    def __call__(self, x):
        return ((x >= self.lo) & (x <= self.hi)).astype(float)


@dataclass(frozen=True)
class _Bump:
    radius: float
    center: float

    def __call__(self, x):
        return bump(x, self.radius, self.center)


@dataclass(frozen=True)
class _Ramp:
    lo: float
    hi: float

    def __call__(self, x):
        return np.where((x >= self.lo) & (x <= self.hi), x - self.lo, 0.0)


@dataclass(frozen=True)
class _Hat:
    center: float
    half_width: float

    def __call__(self, x):
        return np.clip(1.0 - np.abs(x - self.center) / self.half_width, 0.0, None)


def glassey_corpus():
    """Profiles with jumps, kinks and smooth bumps at several positions."""
    return [
        Profile("indicator_1_2", _Indicator(1.0, 2.0), (1.0, 2.0)),
        Profile("bump_1", _Bump(0.5, 1.0), (0.5, 1.5)),
        Profile("bump_4", _Bump(1.0, 4.0), (3.0, 5.0)),
        Profile("ramp_1_3", _Ramp(1.0, 3.0), (1.0, 3.0)),
        Profile("hat_0p5_2", _Hat(1.25, 0.75), (0.5, 2.0), (1.25,)),
    ]


def source_corpus():
    """Five smooth sources supported in ``|y| <= phi(s) - 1``."""
    centres = [(1.8, 0.0), (2.2, 0.4), (2.6, -0.8), (3.0, 1.2), (2.4, 0.0)]
    return [SourceTerm.bump_source(s, 0.2, y, 0.3, label=f"src{k}")
            for k, (s, y) in enumerate(centres)]
