# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""This module provides the enumerations shared by circuits, streams and reports."""
from __future__ import annotations

from enum import Enum

from colorama import Fore, Style


class NeuronModel(Enum):
    """Enumeration of the supported point-neuron models."""
    value: str
    LIF = 'lif'
    """Leaky integrate-and-fire neuron."""
    SM = 'sm'
    """Two-variable quadratic simple model (regular spiking by default)."""

    @classmethod
    def from_name(cls, name: str) -> NeuronModel:
        """Looks up a model by its case-insensitive command-line name."""
        return cls(name.strip().lower())


class CodeScheme(Enum):
    """Enumeration of the 4-bit value encodings of an input stream."""
    value: str
    BINARY = 'binary'
    """Standard positional binary code."""
    GRAY = 'gray'
    """Reflected binary (Gray) code."""

    @classmethod
    def from_name(cls, name: str) -> CodeScheme:
        """Looks up a scheme by its case-insensitive name."""
        return cls(name.strip().lower())


class Operation(Enum):
    """Enumeration of memory transactions."""
    value: str
    STORE = 'M'
    """Memorize the attributes of a value."""
    RETRIEVE = 'R'
    """Read back the attributes of a value."""
    ERASE = 'E'
    """Silence the cell that holds a value."""

    @property
    def port(self) -> str:
        """The control input port of the draft memory that carries this operation."""
        return self.value


class GateKind(Enum):
    """Enumeration of coincidence gate kinds."""
    value: str
    AND = 'and'
    """Fires only on the coincidence of all inputs."""
    OR = 'or'
    """Fires on any input."""


class Answer(Enum):
    """Enumeration of the answers a retrieve can produce."""
    value: str
    NONE = 'none'
    """Neither answer neuron fired."""
    NON_PRIME = 'nPi'
    """Only the non-prime answer neuron fired."""
    PRIME = 'Pi'
    """Only the prime answer neuron fired."""
    CONFLICT = 'both'
    """Both answer neurons fired."""

    def __str__(self) -> str:
        if self is Answer.PRIME:
            return Fore.CYAN + self.value + Fore.RESET
        if self is Answer.NON_PRIME:
            return Fore.YELLOW + self.value + Fore.RESET
        if self is Answer.CONFLICT:
            return Fore.RED + self.value + Fore.RESET
        return Style.DIM + self.value + Style.NORMAL


class Block(Enum):
    """Enumeration of the blocks `spikeloom.cli.cmd_truthtable` can exercise."""
    value: str
    SELECTOR = 'selector'
    """Multiplexer from 2^omega inputs to one output."""
    DECODER = 'decoder'
    """Demultiplexer from one input to 2^omega outputs."""
    GENERATOR = 'generator'
    """Selector whose inputs are tied to a truth table."""
