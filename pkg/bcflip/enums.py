# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

import enum


class Party(enum.Enum):
    ALICE = enum.auto()
    BOB = enum.auto()

    # Registers in flight belong to neither player.
    CHANNEL = enum.auto()

    @property
    def other(self) -> "Party":
        if self is Party.ALICE:
            return Party.BOB
        if self is Party.BOB:
            return Party.ALICE
        raise ValueError("the channel has no counterpart")


class RevealItem(enum.Enum):
    BIT = enum.auto()
    SIGN = enum.auto()


class Family(enum.Enum):
    PN = enum.auto()
    THREE = enum.auto()
    FIVE = enum.auto()


class Suite(enum.Enum):
    LEMMAS = enum.auto()
    ATTACKS = enum.auto()
    SCHEDULES = enum.auto()
