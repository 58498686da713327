"""Deterministic random-number streams.

A stream is identified by ``(master_seed, stream_id)``. The stream id is a hash
of a label path such as ``["iter", 12]`` so every Monte Carlo iteration and
every drone owns an independent substream, and the samples it yields do not
depend on how many draws other streams have made or in which order they ran.

The bit generator is Philox, a counter-based generator keyed directly with the
128-bit ``(stream_id, master_seed)`` pair, which makes stream construction cheap
and platform independent.
"""
import enum
import hashlib
import math
from typing import Optional, Sequence, Union

import numpy as np

from swarmnet.utils.errors import ParameterError

_MASK64 = (1 << 64) - 1

Label = Union[int, str]


class RngStream:
    """Single-owner random stream; do not share one instance between threads."""

    __slots__ = ("master_seed", "stream_id", "_generator")

    def __init__(self, master_seed: int, stream_id: int):
        self.master_seed = int(master_seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self._generator: Optional[np.random.Generator] = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            key = (self.stream_id << 64) | self.master_seed
            self._generator = np.random.Generator(np.random.Philox(key=key))
        return self._generator

    def unit_interval(self, size: Optional[int] = None):
        """Uniform draw on the half-open interval (0, 1]."""
        return 1.0 - self.generator.random(size)

    def uniform(self, low: float = 0.0, high: float = 1.0, size: Optional[int] = None):
        return self.generator.uniform(low, high, size)

    def normal(self, size: Optional[int] = None):
        return self.generator.standard_normal(size)

    def integers(self, low: int, high: int, size: Optional[int] = None):
        return self.generator.integers(low, high, size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RngStream):
            return NotImplemented
        return (self.master_seed, self.stream_id) == (other.master_seed, other.stream_id)

    def __hash__(self) -> int:
        return hash((self.master_seed, self.stream_id))

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id:#018x})"


def _encode_label(label: Label) -> bytes:
    if isinstance(label, enum.Enum):
        label = label.value
    if isinstance(label, bool) or not isinstance(label, (int, str)):
        raise ParameterError(f"stream labels must be integers or strings, got {label!r}")
    tag = b"i" if isinstance(label, int) else b"s"
    return tag + str(label).encode("utf-8") + b"\x1f"


def derive_stream(master_seed: int, labels: Sequence[Label]) -> RngStream:
    digest = hashlib.blake2b(digest_size=8)
    for label in labels:
        digest.update(_encode_label(label))
    return RngStream(master_seed, int.from_bytes(digest.digest(), "big"))


def _check_mean(mean: float) -> None:
    if not (isinstance(mean, (int, float)) and math.isfinite(mean) and mean > 0):
        raise ParameterError(f"mean must be a positive finite number, got {mean!r}")


def sample_exponential(stream: RngStream, mean: float, size: Optional[int] = None):
    """Inverse-transform exponential draw ``-mean * ln(u)`` with ``u`` on (0, 1]."""
    _check_mean(mean)
    u = stream.unit_interval(size)
    if size is None:
        return -mean * math.log(u) + 0.0
    return -mean * np.log(u) + 0.0


def sample_poisson(stream: RngStream, mean: float, size: Optional[int] = None):
    _check_mean(mean)
    draws = stream.generator.poisson(mean, size)
    if size is None:
        return int(draws)
    return draws


def sample_normal(stream: RngStream, mean: float = 0.0, std: float = 1.0, size: Optional[int] = None):
    if std < 0:
        raise ParameterError(f"std must be non-negative, got {std!r}")
    z = stream.normal(size)
    if size is None:
        return mean + std * float(z)
    return mean + std * z


def sample_uniform(stream: RngStream, low: float = 0.0, high: float = 1.0, size: Optional[int] = None):
    if high < low:
        raise ParameterError(f"empty interval [{low}, {high})")
    draws = stream.uniform(low, high, size)
    if size is None:
        return float(draws)
    return draws
