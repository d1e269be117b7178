# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

"""Simulate and attack bit-commitment based quantum coin flipping protocols."""

__version__ = "0.1.0"
