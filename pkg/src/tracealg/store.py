"""Finite bit stores over a fixed, ordered list of memory locations.

A store assigns one bit to every location.  Stores render as bitstrings in
declared location order, so with locations ``(x, y)`` the string ``"10"``
means x=1, y=0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple


class Store(NamedTuple):
    """A total assignment of bits, positionally aligned with a location list."""

    bits: tuple[int, ...]

    def get(self, index: int) -> int:
        return self.bits[index]

    def set(self, index: int, bit: int) -> "Store":
        return Store(self.bits[:index] + (bit,) + self.bits[index + 1 :])

    def render(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __str__(self) -> str:
        return self.render()


class Transition(NamedTuple):
    """A guarantee step: relies on store ``pre``, leaves store ``post``."""

    pre: Store
    post: Store

    def is_stutter(self) -> bool:
        return self.pre == self.post

    def render(self) -> str:
        return f"({self.pre.render()},{self.post.render()})"


@dataclass(frozen=True)
class StoreSpace:
    """The set of all stores over an ordered location list (default ``x, y``)."""

    locations: tuple[str, ...] = ("x", "y")
    stores: tuple[Store, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.locations:
            raise ValueError("at least one location is required")
        if len(set(self.locations)) != len(self.locations):
            raise ValueError(f"duplicate locations in {self.locations}")
        all_stores = tuple(
            Store(bits) for bits in itertools.product((0, 1), repeat=len(self.locations))
        )
        object.__setattr__(self, "stores", all_stores)

    def __len__(self) -> int:
        return len(self.stores)

    def index(self, location: str) -> int:
        try:
            return self.locations.index(location)
        except ValueError:
            raise KeyError(f"unknown location {location!r}") from None

    def parse_store(self, text: str) -> Store:
        if len(text) != len(self.locations) or any(c not in "01" for c in text):
            raise ValueError(
                f"store {text!r} must be {len(self.locations)} bits over 0/1"
            )
        return Store(tuple(int(c) for c in text))
