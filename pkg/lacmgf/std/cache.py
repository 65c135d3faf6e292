# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

from __future__ import annotations

__all__: tuple[str, ...] = ("Memory",)

import collections.abc as collections
import logging
import typing

from . import errors

_LOG: typing.Final[logging.Logger] = logging.getLogger("lacmgf.cache")

MKT = typing.TypeVar("MKT")
MVT = typing.TypeVar("MVT")


class Memory(collections.MutableMapping[MKT, MVT]):
    """In-memory store that refuses to grow past a fixed number of entries.

    Going over `budget` raises `Infeasible` instead of silently evicting,
    since every stored state is needed for an exact result.
    """

    __slots__ = ("_data", "_budget", "_name")

    def __init__(self, budget: int | None = None, *, name: str = "memory") -> None:
        self._data: dict[MKT, MVT] = {}
        self._budget = budget
        self._name = name

    @property
    def budget(self) -> int | None:
        return self._budget

    def put(self, key: MKT, value: MVT) -> Memory[MKT, MVT]:
        self[key] = value
        return self

    def add(self, key: MKT, value: MVT) -> None:
        """Accumulates `value` onto whatever is already stored under `key`."""
        if key in self._data:
            self._data[key] = self._data[key] + value  # type: ignore[operator]
        else:
            self[key] = value

    def view(self) -> str:
        return repr(self)

    def __getitem__(self, key: MKT) -> MVT:
        return self._data[key]

    def __setitem__(self, key: MKT, value: MVT) -> None:
        if (
            self._budget is not None
            and key not in self._data
            and len(self._data) >= self._budget
        ):
            _LOG.debug("%s hit its budget of %d entries", self._name, self._budget)
            raise errors.Infeasible(
                f"{self._name} needs more than {self._budget} states "
                "(raise LACMGF_MEMO_BUDGET)",
                required=len(self._data) + 1,
                limit=self._budget,
            )
        self._data[key] = value

    def __delitem__(self, key: MKT) -> None:
        del self._data[key]

    def __iter__(self) -> collections.Iterator[MKT]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __repr__(self) -> str:
        if not self._data:
            return f"Memory({self._name}, empty)"
        return f"Memory({self._name}, {len(self._data)}/{self._budget or '∞'} entries)"
