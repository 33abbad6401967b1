# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""This module builds activation-based memory out of bistable spiking loops.

A memory cell holds a kernel pair (K_a, K_b) that reverberates once the cell has been written, and one loop pair
(a_j, b_j) per stored bit. Each loop neuron needs half of θ from its partner and half from the kernel, so a bit loop
survives only while the kernel runs. The draft memory addresses sixteen such cells through two tied-high decoders.

Timeline of a transaction presented at φ1 (tick `t`) of the draft memory:

```
t          D3..D0, M/R/E, nPi/Pi fire
t + Δ      decoder outputs
t + Δ + 1  wipe gate of the addressed cell (stores only)
t + 2Δ     Sel_k; wipe inhibition lands on the cell
t + 3Δ     GK / GM / GR / GE gates of the cell
t + 3Δ + 1 answer neurons
t + 4Δ     K_a and a_j start reverberating, K_b is held back; first erase inhibition
t + 5Δ     second erase inhibition
```
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from spikeloom.blocks import (INHIBITION, DecoderHandle, PacemakerHandle,
                              build_decoder, tie_input_high)
from spikeloom.engine import Circuit
from spikeloom.exceptions import BuildError

logger = logging.getLogger(__name__)

Tap = Tuple[int, int]
"""A `(neuron id, delay)` pair feeding a cell gate."""

ADDRESS_PORTS = ('D3', 'D2', 'D1', 'D0')
ATTRIBUTE_PORTS = ('nPi', 'Pi')
ANSWER_PORTS = ('nPiAns', 'PiAns')
CELL_COUNT = 16
MIN_PHASES = 4
KERNEL_REPHASE = -0.5


@dataclass
class MemoryCellHandle:
    """Neuron ids of one memory cell. Bit lists are indexed by bit, 0-based."""
    index: int
    kernel_a: int
    kernel_b: int
    kernel_gate: int
    a: List[int]
    b: List[int]
    store_gates: List[int]
    read_gates: List[int]
    erase_gate: int
    erase_relay: int
    taps: Dict[str, Tap] = field(default_factory=dict)
    bit_taps: List[Tap] = field(default_factory=list)

    def neurons(self) -> List[int]:
        """The kernel and loop neurons that hold the content of the cell."""
        return [self.kernel_a, self.kernel_b, *self.a, *self.b]


@dataclass
class DraftMemoryHandle:
    """Ports, addressing layers, cells and answer neurons of the sixteen-cell draft memory."""
    circuit: Circuit = field(repr=False, compare=False)
    pacemaker: PacemakerHandle
    ports: Dict[str, int]
    decoders: Tuple[DecoderHandle, DecoderHandle]
    select: List[int]
    wipe: List[int]
    cells: List[MemoryCellHandle]


def cell_index(bits: Sequence[int]) -> int:
    """Returns the cell addressed by the bits D3 … D0 (most significant first).

    Raises:
        BuildError: Not exactly four bits, or a bit that is neither 0 nor 1.
    """
    if len(bits) != len(ADDRESS_PORTS):
        raise BuildError(f'An address has {len(ADDRESS_PORTS)} bits, got {len(bits)}')
    index = 0
    for bit in bits:
        if bit not in (0, 1):
            raise BuildError(f'Address bits must be 0 or 1, got {bit}')
        index = (index << 1) | bit
    return index


def phase_of_trapped_spike(store_phase: int, loops: int, n: int) -> int:
    """Returns the pacemaker phase at which an a-column neuron fires after `loops` round trips of its 2Δt loop.

    With an odd phase count the phase drifts through every phase; with an even one it keeps its parity.
    """
    if n < 2 or not 1 <= store_phase <= n:
        raise BuildError(f'Phase {store_phase} is not a phase of a {n}-phase pacemaker')
    return ((store_phase - 1) + 2 * loops) % n + 1


def _inhibit(circuit: Circuit, source: int, targets: Sequence[int], delay: int):
    for target in targets:
        circuit.connect(source, target, INHIBITION, delay)


def _check_latency(circuit: Circuit):
    # answer and wipe synapses are one tick long
    if circuit.latency() != 0:
        raise BuildError(f'Memory needs neurons that fire in the tick their input arrives, '
                         f'{circuit.default_spec.model.value} neurons fire {circuit.latency()} tick(s) later')


def build_memory_cell(circuit: Circuit, pacemaker: PacemakerHandle, n_bits: int = 2, index: int = 0,
                      taps: Optional[Dict[str, Tap]] = None,
                      bit_taps: Optional[Sequence[Tap]] = None) -> MemoryCellHandle:
    """Builds one memory cell.

    Commands reach the gates through taps. Missing taps are created as ports named `<tap>_<index>` (bits as
    `in_<j>_<index>`, 1-based) with a delay of Δt, so a standalone cell answers one phase after its command.

    Args:
        circuit: The circuit to extend.
        pacemaker: Supplies Δt.
        n_bits: Number of bit loops.
        index: Cell number used in labels.
        taps: Sources for `select`, `store`, `read`, `erase` and optionally `wipe`.
        bit_taps: One source per bit.

    Returns:
        A `spikeloom.memory.MemoryCellHandle`.

    Raises:
        BuildError: `n_bits < 1`, the number of bit taps does not match or the circuit's neurons fire later than the
            tick their input arrives in.
    """
    if n_bits < 1:
        raise BuildError(f'A memory cell needs at least one bit, got {n_bits}')
    _check_latency(circuit)
    delta = pacemaker.delta_t
    taps = dict(taps or {})
    for name in ('select', 'store', 'read', 'erase'):
        if name not in taps:
            taps[name] = (circuit.add_port(f'{name}_{index}'), delta)
    if bit_taps is None:
        bit_taps = [(circuit.add_port(f'in_{j}_{index}'), delta) for j in range(1, n_bits + 1)]
    elif len(bit_taps) != n_bits:
        raise BuildError(f'Expected {n_bits} bit taps, got {len(bit_taps)}')

    kernel_a = circuit.add_neuron(f'Ka_{index}')
    kernel_b = circuit.add_neuron(f'Kb_{index}')
    circuit.connect(kernel_a, kernel_b, 1.0, delta)
    circuit.connect(kernel_b, kernel_a, 1.0, delta)
    kernel_gate = circuit.add_neuron(f'GK_{index}')
    for source, delay in (taps['select'], taps['store']):
        circuit.connect(source, kernel_gate, 0.5, delay)
    circuit.connect(kernel_gate, kernel_a, 1.0, delta)
    circuit.connect(kernel_gate, kernel_b, KERNEL_REPHASE, delta)

    a, b, store_gates, read_gates = [], [], [], []
    for j in range(1, n_bits + 1):
        a_j = circuit.add_neuron(f'a_{j}_{index}')
        b_j = circuit.add_neuron(f'b_{j}_{index}')
        circuit.connect(a_j, b_j, 0.5, delta)
        circuit.connect(b_j, a_j, 0.5, delta)
        circuit.connect(kernel_a, b_j, 0.5, delta)
        circuit.connect(kernel_b, a_j, 0.5, delta)

        gm = circuit.add_neuron(f'GM_{j}_{index}')
        for source, delay in (taps['select'], taps['store'], bit_taps[j - 1]):
            circuit.connect(source, gm, 1 / 3, delay)
        circuit.connect(gm, a_j, 1.0, delta)

        gr = circuit.add_neuron(f'GR_{j}_{index}')
        for source, delay in (taps['select'], taps['read']):
            circuit.connect(source, gr, 1 / 3, delay)
        circuit.connect(a_j, gr, 1 / 3, delta)
        circuit.connect(b_j, gr, 1 / 3, delta)

        a.append(a_j)
        b.append(b_j)
        store_gates.append(gm)
        read_gates.append(gr)

    content = [kernel_a, kernel_b, *a, *b]
    erase_gate = circuit.add_neuron(f'GE_{index}')
    for source, delay in (taps['select'], taps['erase']):
        circuit.connect(source, erase_gate, 0.5, delay)
    erase_relay = circuit.add_neuron(f'ER_{index}')
    circuit.connect(erase_gate, erase_relay, 1.0, delta)
    _inhibit(circuit, erase_gate, content, delta)
    _inhibit(circuit, erase_relay, content, delta)

    if 'wipe' in taps:
        source, delay = taps['wipe']
        _inhibit(circuit, source, content, delay)

    return MemoryCellHandle(index, kernel_a, kernel_b, kernel_gate, a, b, store_gates, read_gates, erase_gate,
                            erase_relay, taps, list(bit_taps))


def build_draft_memory(circuit: Circuit, pacemaker: PacemakerHandle) -> DraftMemoryHandle:
    """Builds the sixteen-cell draft memory with two bits (non-prime, prime) per cell.

    Ports: D3 … D0, M, R, E, nPi, Pi as inputs sampled at φ1 and nPiAns, PiAns as answers.

    Raises:
        BuildError: The pacemaker has fewer than four phases or the circuit is made of simple-model neurons.
    """
    if pacemaker.n < MIN_PHASES:
        raise BuildError(f'The draft memory needs a pacemaker with at least {MIN_PHASES} phases, got {pacemaker.n}')
    _check_latency(circuit)
    delta = pacemaker.delta_t
    ports = {name: circuit.add_port(name) for name in (*ADDRESS_PORTS, 'M', 'R', 'E', *ATTRIBUTE_PORTS)}
    d3, d2, d1, d0 = (ports[name] for name in ADDRESS_PORTS)
    high = tie_input_high(build_decoder(circuit, pacemaker, 2, prefix='DA.', controls=[d2, d3]))
    low = tie_input_high(build_decoder(circuit, pacemaker, 2, prefix='DB.', controls=[d0, d1]))

    answers = [circuit.add_port(name) for name in ANSWER_PORTS]
    ports.update(zip(ANSWER_PORTS, answers))

    select, wipe, cells = [], [], []
    for k in range(CELL_COUNT):
        hi_line, lo_line = high.outputs[k >> 2], low.outputs[k & 3]
        sel = circuit.add_neuron(f'Sel_{k}')
        circuit.connect(hi_line, sel, 0.5, delta)
        circuit.connect(lo_line, sel, 0.5, delta)
        gw = circuit.add_neuron(f'GW_{k}')
        circuit.connect(hi_line, gw, 1 / 3, 1)
        circuit.connect(lo_line, gw, 1 / 3, 1)
        circuit.connect(ports['M'], gw, 1 / 3, delta + 1)

        taps = {
            'select': (sel, delta),
            'store': (ports['M'], 3 * delta),
            'read': (ports['R'], 3 * delta),
            'erase': (ports['E'], 3 * delta),
            'wipe': (gw, delta - 1),
        }
        bit_taps = [(ports[name], 3 * delta) for name in ATTRIBUTE_PORTS]
        cell = build_memory_cell(circuit, pacemaker, len(ATTRIBUTE_PORTS), k, taps, bit_taps)
        for gr, answer in zip(cell.read_gates, answers):
            circuit.connect(gr, answer, 1.0, 1)
        select.append(sel)
        wipe.append(gw)
        cells.append(cell)

    logger.debug('Draft memory built: %d neurons, %d synapses', len(circuit), len(circuit.synapses))
    return DraftMemoryHandle(circuit, pacemaker, ports, (high, low), select, wipe, cells)
