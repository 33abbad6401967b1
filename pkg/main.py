#!/usr/bin/env python
# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""Command line entry point, see `spikeloom.cli`."""

import sys

from spikeloom.cli import main

if __name__ == '__main__':  # pragma: no cover
    sys.exit(main())
