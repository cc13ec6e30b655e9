"""Seeded string-pair generators for experiments and tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

Generator = Literal["random", "mutate", "adversarial-skew"]


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    alphabet: int = 4
    generator: Generator = "mutate"
    rate: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not 2 <= self.alphabet <= 256:
            raise ValueError("alphabet size must lie in [2, 256]")
        if not 0 <= self.rate <= 1:
            raise ValueError("rate must lie in [0, 1]")


def _symbols(alphabet: int) -> np.ndarray:
    # printable letters when they suffice, raw byte values otherwise
    start = 97 if alphabet <= 26 else 0
    return np.arange(start, start + alphabet, dtype=np.uint8)


def plant_edits(a: bytes, count: int, alphabet: int, rng: np.random.Generator) -> bytes:
    """Apply ``count`` random edits, balancing insertions and deletions so the length is kept."""
    syms = _symbols(alphabet)
    out = bytearray(a)
    pairs, single = divmod(count, 2)
    kinds = ["sub"] * single
    for _ in range(pairs):
        kinds += ["sub", "sub"] if rng.random() < 1 / 3 else ["ins", "del"]
    rng.shuffle(kinds)
    for kind in kinds:
        if kind == "ins":
            out.insert(int(rng.integers(len(out) + 1)), int(rng.choice(syms)))
        elif kind == "del" and out:
            del out[int(rng.integers(len(out)))]
        elif out:
            p = int(rng.integers(len(out)))
            choices = syms[syms != out[p]]
            out[p] = int(rng.choice(choices))
    return bytes(out)


def generate(inst: InstanceSpec) -> tuple[bytes, bytes, int | None]:
    """Return ``(a, b, planted)`` where ``planted`` bounds ED(a, b) from above."""
    rng = np.random.default_rng(inst.seed)
    syms = _symbols(inst.alphabet)
    a = bytes(rng.choice(syms, size=inst.n))
    if inst.generator == "random":
        return a, bytes(rng.choice(syms, size=inst.n)), None
    if inst.generator == "mutate":
        count = round(inst.rate * inst.n)
        return a, plant_edits(a, count, inst.alphabet, rng), count
    if inst.generator == "adversarial-skew":
        # a long shift: drop a prefix and pad the tail, forcing skewed window matches
        shift = max(1, round(inst.rate * inst.n)) if inst.n else 0
        b = a[shift:] + bytes(rng.choice(syms, size=shift))
        return a, b[: inst.n], 2 * shift
    raise ValueError(f"unknown generator {inst.generator!r}")
