# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

import csv
import io
import json

from bcflip import cli


def run_main(*args, **kwargs):
    """Run the CLI; keyword arguments become --flag=value (True becomes a bare flag)."""
    flags = []
    for k, v in kwargs.items():
        name = k.replace("_", "-")
        if v is True:
            flags.append(f"--{name}")
        else:
            flags.append(f"--{name}={v}")
    return cli.cli_main(list(args) + flags)


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def read_json(path):
    with open(path, "r") as fp:
        return json.load(fp)


def read_json_text(text):
    return json.loads(text)
