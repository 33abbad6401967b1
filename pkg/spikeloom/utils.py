# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""This module provides file helpers for rasters, configuration files and result statistics."""

import configparser
import json
import logging
import os
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from spikeloom.engine import Raster  # noqa: E402
from spikeloom.exceptions import ConfigError  # noqa: E402
from spikeloom.memory import (ADDRESS_PORTS, ANSWER_PORTS,  # noqa: E402
                              ATTRIBUTE_PORTS)

logger = logging.getLogger(__name__)

STREAM_LABELS = (*ADDRESS_PORTS, 'M', 'R', 'E', *ATTRIBUTE_PORTS)
_SECTION = 'spikeloom'


def write_text(path: str, text: str):
    """Writes `text` to `path`, creating missing parent directories."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as file:
        file.write(text)


def save_raster_csv(raster: Raster, path: str):
    write_text(path, raster.to_csv())
    logger.info('Wrote %d spikes to %s', len(raster), path)


def load_raster_csv(path: str, labels: Optional[List[str]] = None) -> Raster:
    with open(path) as file:
        return Raster.from_csv(file.read(), labels)


def read_key_values(path: str) -> Dict[str, str]:
    """Reads a plain `key=value` file. `#` starts a comment line.

    Raises:
        ConfigError: The file is missing or malformed.
    """
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=('#',), inline_comment_prefixes=('#',))
    try:
        with open(path) as file:
            parser.read_string(f'[{_SECTION}]\n' + file.read(), source=path)
    except OSError as ex:
        raise ConfigError(f'Cannot read config file {path}: {ex}') from None
    except configparser.Error as ex:
        raise ConfigError(f'Malformed config file {path}: {ex}') from None
    return dict(parser[_SECTION])


def raster_rows(labels: List[str]) -> List[int]:
    """Orders neuron ids for plotting from bottom to top: stream inputs, everything else, answer neurons."""
    stream = [labels.index(label) for label in STREAM_LABELS if label in labels]
    answers = [labels.index(label) for label in ANSWER_PORTS if label in labels]
    middle = [nid for nid in range(len(labels)) if nid not in stream and nid not in answers]
    return stream + middle + answers


def render_raster_svg(raster: Raster, path: str, title: str = 'Raster', silent_rows: bool = False):
    """Draws one row per neuron with a tick per spike and saves it as SVG.

    Args:
        raster: The `spikeloom.engine.Raster` to draw.
        path: Target file.
        title: Plot title.
        silent_rows: Also draw rows of neurons that never fired.
    """
    active = {nid for _, nid in raster.events}
    order = [nid for nid in raster_rows(raster.labels) if silent_rows or nid in active]
    row_of = {nid: row for row, nid in enumerate(order)}
    fig, ax = plt.subplots(figsize=(12, max(3.0, 0.18 * len(order))))
    n_stream = sum(1 for nid in order if raster.labels[nid] in STREAM_LABELS)
    if n_stream:
        ax.axhspan(-0.5, n_stream - 0.5, color='#dddddd', zorder=0)
    times = [t for t, nid in raster.events if nid in row_of]
    rows = [row_of[nid] for t, nid in raster.events if nid in row_of]
    ax.vlines(times, [r - 0.4 for r in rows], [r + 0.4 for r in rows], color='#000000', lw=0.8)
    ax.set_yticks(range(len(order)))
    ax.set_yticklabels([raster.labels[nid] for nid in order], fontsize=6)
    ax.set_ylim(-0.5, max(len(order), 1) - 0.5)
    ax.set_xlabel('time (ms)')
    ax.set_title(title)
    fig.tight_layout()
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    fig.savefig(path, format='svg')
    plt.close(fig)
    logger.info('Wrote raster plot to %s', path)


@dataclass
class Stats:
    """Base class of result records that can be stored as JSON."""

    def save(self, path: str) -> str:
        write_text(path, json.dumps(asdict(self), indent=4, sort_keys=True))
        return path

    @classmethod
    def load_dict(cls, path: str) -> dict:
        with open(path) as file:
            return json.load(file)
