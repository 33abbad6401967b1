# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""This module contains the exceptions raised by spikeloom."""


class SpikeloomError(Exception):
    """Base class of every error raised on purpose by spikeloom."""


class CalibrationError(SpikeloomError):
    """Raised if the firing threshold current of a neuron cannot be determined."""


class CircuitError(SpikeloomError):
    """Raised for unknown neurons, invalid synapses or duplicate ports."""


class ScheduleError(SpikeloomError):
    """Raised if an external spike is scheduled before the current simulation time."""


class BuildError(SpikeloomError):
    """Raised if a block builder is called with unsupported parameters."""


class StreamError(SpikeloomError):
    """Raised for invalid values or transactions of an input stream."""


class ScenarioParseError(StreamError):
    """Raised if a scenario file contains an invalid line.

    Attributes:
        line: The 1-based number of the offending line.
    """

    def __init__(self, line: int, message: str):
        super().__init__(f'line {line}: {message}')
        self.line = line


class ConfigError(SpikeloomError):
    """Raised for unknown configuration keys or unparsable values."""
