# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

import csv
import json
from typing import Any, Iterable, TextIO

from . import analysis


class BiasTableOutput:
    """CSV with one row per (n, eps); empty simulation columns when not simulated.

    max_cheat is the larger of the two cheating probabilities; the bias of the
    protocol is max_cheat - 1/2.
    """

    def __init__(self, fp: TextIO):
        self.fp = fp

    def output(self, rows: Iterable[analysis.BiasRow]) -> None:
        writer = csv.writer(self.fp, lineterminator="\n")
        writer.writerow(analysis.CSV_HEADER)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row.csv_fields()])


class JSONOutput:
    def __init__(self, fp: TextIO):
        self.fp = fp

    def output(self, doc: Any) -> None:
        json.dump(doc, self.fp, sort_keys=True, indent=2)
        print(file=self.fp)
