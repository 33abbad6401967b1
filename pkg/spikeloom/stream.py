# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""This module encodes memory transactions into spikes aligned to the φ1 onsets of a pacemaker."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

from spikeloom.blocks import PacemakerHandle
from spikeloom.engine import Circuit, schedule_external_spike
from spikeloom.enums import CodeScheme, Operation
from spikeloom.exceptions import ScenarioParseError, StreamError
from spikeloom.memory import ADDRESS_PORTS, ATTRIBUTE_PORTS

WIDTH = len(ADDRESS_PORTS)
PRIME_RETRIEVE_ORDER = (0, 8, 4, 3, 1, 12, 6, 7, 2, 9, 5, 11, 13)

Schedule = List[Tuple[int, str]]
"""`(time, port name)` pairs ordered by time."""


@dataclass(frozen=True)
class StreamOp:
    """One memory transaction.

    Attributes:
        value: The value 0..15 that addresses the cell.
        op: The `spikeloom.enums.Operation`.
        attributes: `(nPi, Pi)` bits of a store, `None` otherwise.
    """
    value: int
    op: Operation
    attributes: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        """Raises `spikeloom.exceptions.StreamError` if the transaction is malformed."""
        if not isinstance(self.value, int) or not 0 <= self.value < 2 ** WIDTH:
            raise StreamError(f'Value must lie in 0..{2 ** WIDTH - 1}, got {self.value!r}')
        if self.op is Operation.STORE:
            if self.attributes is None:
                raise StreamError(f'Store of {self.value} needs an attribute')
            if sorted(self.attributes) != [0, 1]:
                raise StreamError(f'Store of {self.value} needs exactly one of nPi/Pi, got {self.attributes}')
        elif self.attributes is not None:
            raise StreamError(f'{self.op.name.capitalize()} of {self.value} carries no attributes')

    @classmethod
    def store(cls, value: int, prime: bool) -> StreamOp:
        return cls(value, Operation.STORE, (0, 1) if prime else (1, 0))

    @classmethod
    def retrieve(cls, value: int) -> StreamOp:
        return cls(value, Operation.RETRIEVE)

    @classmethod
    def erase(cls, value: int) -> StreamOp:
        return cls(value, Operation.ERASE)

    @property
    def prime(self) -> Optional[bool]:
        return None if self.attributes is None else bool(self.attributes[1])

    def __str__(self) -> str:
        if self.op is Operation.STORE:
            return f'STORE {self.value} {"PRIME" if self.prime else "NONPRIME"}'
        return f'{self.op.name} {self.value}'


@dataclass
class Scenario:
    """A code scheme and the transactions presented one per pacemaker cycle."""
    scheme: CodeScheme = CodeScheme.BINARY
    ops: List[StreamOp] = field(default_factory=list)

    def __iter__(self) -> Iterator[StreamOp]:
        return iter(self.ops)

    def __len__(self) -> int:
        return len(self.ops)


def encode_value(value: int, scheme: CodeScheme, width: int = WIDTH) -> Tuple[int, ...]:
    """Returns the bits of `value`, most significant first.

    Example:
        ```python
        encode_value(5, CodeScheme.BINARY)  # (0, 1, 0, 1)
        encode_value(5, CodeScheme.GRAY)    # (0, 1, 1, 1)
        ```

    Raises:
        StreamError: `value` does not fit into `width` bits.
    """
    if not isinstance(value, int) or not 0 <= value < 2 ** width:
        raise StreamError(f'Value must lie in 0..{2 ** width - 1}, got {value!r}')
    if scheme is CodeScheme.GRAY:
        value ^= value >> 1
    return tuple((value >> shift) & 1 for shift in range(width - 1, -1, -1))


def decode_value(bits: Sequence[int], scheme: CodeScheme) -> int:
    """Inverse of `encode_value`; Gray words are decoded by a running XOR from the most significant bit."""
    value = 0
    previous = 0
    for bit in bits:
        if bit not in (0, 1):
            raise StreamError(f'Bits must be 0 or 1, got {bit!r}')
        if scheme is CodeScheme.GRAY:
            bit ^= previous
            previous = bit
        value = (value << 1) | bit
    return value


def compile_stream(ops: Sequence[StreamOp], scheme: CodeScheme, pacemaker: PacemakerHandle) -> Schedule:
    """Maps transaction i to spikes at the i-th φ1 onset.

    A transaction fires the address lines whose bit is 1, the port of its operation and, for a store, the one
    attribute line that is set.
    """
    schedule: Schedule = []
    for i, op in enumerate(ops):
        op.validate()
        time = pacemaker.phase_time(1, i)
        bits = encode_value(op.value, scheme)
        schedule.extend((time, port) for port, bit in zip(ADDRESS_PORTS, bits) if bit)
        schedule.append((time, op.op.port))
        if op.attributes is not None:
            schedule.extend((time, port) for port, bit in zip(ATTRIBUTE_PORTS, op.attributes) if bit)
    schedule.sort(key=lambda entry: entry[0])
    return schedule


def apply_schedule(circuit: Circuit, schedule: Schedule):
    """Schedules every compiled spike on the port of `circuit` it names."""
    for time, port in schedule:
        schedule_external_spike(circuit, circuit.port(port), time)


def prime_scenario(scheme: CodeScheme = CodeScheme.BINARY) -> Scenario:
    """Stores 0 … 15 flagged prime or non-prime, then retrieves 0, 8, 4, 3, 1, 12, 6, 7, 2, 9, 5, 11, 13."""
    from spikeloom.oracle import is_prime

    ops = [StreamOp.store(value, is_prime(value)) for value in range(2 ** WIDTH)]
    ops.extend(StreamOp.retrieve(value) for value in PRIME_RETRIEVE_ORDER)
    return Scenario(scheme, ops)


def _parse_value(token: str, line: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ScenarioParseError(line, f'{token!r} is not a number') from None
    if not 0 <= value < 2 ** WIDTH:
        raise ScenarioParseError(line, f'value {value} outside 0..{2 ** WIDTH - 1}')
    return value


def parse_scenario(text: str, scheme: CodeScheme = CodeScheme.BINARY) -> Scenario:
    """Parses a scenario file.

    ```
    CODE GRAY
    STORE 5 PRIME
    RETRIEVE 5
    ERASE 5
    ```

    `#` starts a comment, blank lines are ignored and the optional `CODE` header must precede every transaction.
    Without a header the scenario uses `scheme`.

    Raises:
        ScenarioParseError: With the 1-based number of the first invalid line.
    """
    scenario = Scenario(scheme)
    seen_code = False
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split('#', 1)[0].upper().split()
        if not tokens:
            continue
        keyword, args = tokens[0], tokens[1:]
        if keyword == 'CODE':
            if seen_code or scenario.ops:
                raise ScenarioParseError(number, 'CODE must appear once, before any transaction')
            if len(args) != 1 or args[0] not in ('BINARY', 'GRAY'):
                raise ScenarioParseError(number, 'expected CODE BINARY|GRAY')
            scenario.scheme = CodeScheme.from_name(args[0])
            seen_code = True
        elif keyword == 'STORE':
            if len(args) != 2 or args[1] not in ('PRIME', 'NONPRIME'):
                raise ScenarioParseError(number, 'expected STORE <value> PRIME|NONPRIME')
            scenario.ops.append(StreamOp.store(_parse_value(args[0], number), args[1] == 'PRIME'))
        elif keyword in ('RETRIEVE', 'ERASE'):
            if len(args) != 1:
                raise ScenarioParseError(number, f'expected {keyword} <value>')
            value = _parse_value(args[0], number)
            scenario.ops.append(StreamOp.retrieve(value) if keyword == 'RETRIEVE' else StreamOp.erase(value))
        else:
            raise ScenarioParseError(number, f'unknown keyword {tokens[0]!r}')
    return scenario


def format_scenario(scenario: Scenario) -> str:
    lines = [f'CODE {scenario.scheme.name}']
    lines.extend(str(op) for op in scenario.ops)
    return '\n'.join(lines) + '\n'
