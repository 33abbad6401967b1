# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""This module provides the reference models spiking circuits are checked against."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from spikeloom.blocks import PacemakerHandle
from spikeloom.engine import Raster
from spikeloom.enums import Answer, CodeScheme, Operation
from spikeloom.memory import ANSWER_PORTS, cell_index
from spikeloom.stream import StreamOp, encode_value


def _word(bits: Sequence[int]) -> int:
    value = 0
    for bit in bits:
        value = (value << 1) | (1 if bit else 0)
    return value


def selector_truth(s: Sequence[int], i: Sequence[int]) -> int:
    """Selector output for controls `s` (S_(Ω-1) … S_0) and inputs `i` (`i[j]` is I_j)."""
    if len(i) != 2 ** len(s):
        raise ValueError(f'{len(s)} controls select among {2 ** len(s)} inputs, got {len(i)}')
    return 1 if i[_word(s)] else 0


def decoder_truth(s: Sequence[int], i: int) -> Tuple[int, ...]:
    """Decoder outputs Y_0 … Y_(2^Ω-1) for controls `s` (most significant first) and input `i`."""
    outputs = [0] * 2 ** len(s)
    if i:
        outputs[_word(s)] = 1
    return tuple(outputs)


def function_truth(table: Sequence[int], s: Sequence[int]) -> int:
    """Value of the Boolean function `table` (indexed by the control word) for controls `s`."""
    return 1 if table[_word(s)] else 0


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    divisor = 2
    while divisor * divisor <= n:
        if n % divisor == 0:
            return False
        divisor += 1
    return True


@dataclass(frozen=True)
class RefMemory:
    """Abstract draft memory: cell index to the `(nPi, Pi)` bits it holds. Absent cells are empty."""
    cells: Tuple[Tuple[int, Tuple[int, int]], ...] = ()

    def as_dict(self) -> Dict[int, Tuple[int, int]]:
        return dict(self.cells)

    def get(self, index: int) -> Optional[Tuple[int, int]]:
        return self.as_dict().get(index)

    def with_cell(self, index: int, attributes: Optional[Tuple[int, int]]) -> RefMemory:
        cells = self.as_dict()
        if attributes is None:
            cells.pop(index, None)
        else:
            cells[index] = attributes
        return RefMemory(tuple(sorted(cells.items())))


def answer_of(attributes: Optional[Tuple[int, int]]) -> Answer:
    if attributes is None:
        return Answer.NONE
    non_prime, prime = attributes
    if prime and non_prime:
        return Answer.CONFLICT
    return Answer.PRIME if prime else Answer.NON_PRIME


def ref_apply(memory: RefMemory, op: StreamOp, scheme: CodeScheme) -> Tuple[RefMemory, Optional[Answer]]:
    """Applies one transaction to the reference memory.

    Returns:
        The new memory and, for a retrieve, the expected `spikeloom.enums.Answer` (`None` otherwise).
    """
    index = cell_index(encode_value(op.value, scheme))
    if op.op is Operation.STORE:
        return memory.with_cell(index, op.attributes), None
    if op.op is Operation.ERASE:
        return memory.with_cell(index, None), None
    return memory, answer_of(memory.get(index))


@dataclass(frozen=True)
class TimelineEntry:
    index: int
    op: StreamOp
    time: int
    expected: Answer


AnswerTimeline = List[TimelineEntry]


def transaction_timeline(ops: Sequence[StreamOp], scheme: CodeScheme,
                         pacemaker: PacemakerHandle) -> Tuple[AnswerTimeline, RefMemory]:
    """Runs `ops` through the reference memory and lists the expected answer of every transaction.

    Stores and erases expect silence of the answer neurons during their cycle.
    """
    memory = RefMemory()
    timeline: AnswerTimeline = []
    for i, op in enumerate(ops):
        memory, expected = ref_apply(memory, op, scheme)
        expected = Answer.NONE if expected is None else expected
        timeline.append(TimelineEntry(i, op, pacemaker.phase_time(1, i), expected))
    return timeline, memory


def answer_timeline(ops: Sequence[StreamOp], scheme: CodeScheme,
                    pacemaker: PacemakerHandle) -> Tuple[AnswerTimeline, RefMemory]:
    """Like `transaction_timeline`, restricted to retrieves."""
    timeline, memory = transaction_timeline(ops, scheme, pacemaker)
    return [entry for entry in timeline if entry.op.op is Operation.RETRIEVE], memory


def observed_answer(raster: Raster, start: int, stop: int) -> Answer:
    """Reads the answer neurons of a draft memory within `[start, stop)`."""
    non_prime, prime = (raster.fired(label, start, stop) for label in ANSWER_PORTS)
    return answer_of((int(non_prime), int(prime)) if non_prime or prime else None)


@dataclass(frozen=True)
class ReportLine:
    index: int
    op: StreamOp
    expected: Answer
    observed: Answer

    @property
    def passed(self) -> bool:
        return self.expected is self.observed

    def format(self) -> str:
        return f'{self.index} {self.op} {self.expected.value} {self.observed.value} {"PASS" if self.passed else "FAIL"}'


@dataclass
class Report:
    """Per-transaction comparison of a raster with the reference memory."""
    lines: List[ReportLine] = field(default_factory=list)

    @property
    def mismatches(self) -> List[ReportLine]:
        return [line for line in self.lines if not line.passed]

    @property
    def pass_rate(self) -> float:
        """Fraction of passing transactions; an empty report passes."""
        if not self.lines:
            return 1.0
        return 1 - len(self.mismatches) / len(self.lines)

    def format(self) -> str:
        return ''.join(line.format() + '\n' for line in self.lines)


def compare_answers(raster: Raster, timeline: AnswerTimeline, window: int) -> Report:
    """Checks the answer neurons within `window` ms after every timeline entry against its expected answer."""
    return Report([ReportLine(entry.index, entry.op, entry.expected,
                              observed_answer(raster, entry.time, entry.time + window))
                   for entry in timeline])
