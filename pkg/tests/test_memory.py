# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""Unit tests for `spikeloom.memory`"""

import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from spikeloom.blocks import build_pacemaker, drive
from spikeloom.cli import RunConfig, simulate_scenario
from spikeloom.engine import Circuit, NeuronSpec, run
from spikeloom.enums import Answer, CodeScheme
from spikeloom.exceptions import BuildError
from spikeloom.memory import (build_draft_memory, build_memory_cell,
                              cell_index, phase_of_trapped_spike)
from spikeloom.stream import Scenario, StreamOp, encode_value


def _cell_circuit(phases=5):
    circuit = Circuit()
    pacemaker = build_pacemaker(circuit, phases)
    cell = build_memory_cell(circuit, pacemaker, 2)
    return circuit, pacemaker, cell


def _command(circuit, cell, tap, time, bits=(0, 0)):
    drive(circuit, [cell.taps['select'][0], cell.taps[tap][0]], [1, 1], time)
    drive(circuit, [source for source, _ in cell.bit_taps], bits, time)


def _phase(time, pacemaker):
    return (time - pacemaker.onset) // pacemaker.delta_t % pacemaker.n + 1


class TestAddressing(unittest.TestCase):
    """Test case for global methods in `spikeloom.memory`."""

    def test_cell_index(self):
        """Test `spikeloom.memory.cell_index`"""
        self.assertEqual(cell_index((0, 1, 0, 1)), 5)
        self.assertEqual(cell_index((0, 0, 0, 0)), 0)
        self.assertEqual(cell_index(encode_value(2, CodeScheme.GRAY)), 3)
        self.assertEqual(cell_index(encode_value(3, CodeScheme.GRAY)), 2)
        self.assertRaises(BuildError, lambda: cell_index((1, 0, 1)))
        self.assertRaises(BuildError, lambda: cell_index((1, 0, 2, 0)))

    def test_phase_of_trapped_spike(self):
        """Test `spikeloom.memory.phase_of_trapped_spike`"""
        self.assertEqual([phase_of_trapped_spike(1, k, 5) for k in range(6)], [1, 3, 5, 2, 4, 1])
        self.assertEqual([phase_of_trapped_spike(1, k, 4) for k in range(4)], [1, 3, 1, 3])
        self.assertEqual(phase_of_trapped_spike(4, 0, 5), 4)
        self.assertRaises(BuildError, lambda: phase_of_trapped_spike(6, 0, 5))


class TestMemoryCell(unittest.TestCase):
    """Test case for `spikeloom.memory.build_memory_cell`."""

    def test_store_and_read(self):
        """Test that a stored bit is read back three cycles later"""
        circuit, pacemaker, cell = _cell_circuit()
        _command(circuit, cell, 'store', 1, (1, 0))
        _command(circuit, cell, 'read', 301)
        raster = run(circuit, 400)
        self.assertEqual(raster.times('GR_1_0'), [321])
        self.assertEqual(raster.times('GR_2_0'), [])

    def test_zero_store_starts_kernel(self):
        """Test that storing 0 in a one-bit cell starts the kernel, holds K_b back and leaves the loop silent"""
        circuit = Circuit()
        pacemaker = build_pacemaker(circuit)
        cell = build_memory_cell(circuit, pacemaker, 1)
        _command(circuit, cell, 'store', 1, (0,))
        _command(circuit, cell, 'read', 301)
        raster = run(circuit, 400)
        self.assertEqual(raster.times('GK_0'), [21])
        self.assertEqual(raster.times('Ka_0'), list(range(41, 400, 40)))
        self.assertEqual(raster.times('Kb_0'), list(range(61, 400, 40)))
        self.assertEqual(raster.times('a_1_0') + raster.times('b_1_0'), [])
        self.assertEqual(raster.times('GR_1_0'), [])

    def test_store_rephases_kernel(self):
        """Test that the kernel follows the phase of the latest store"""
        circuit, _, cell = _cell_circuit()
        _command(circuit, cell, 'store', 1)
        _command(circuit, cell, 'store', 21)
        raster = run(circuit, 200)
        self.assertEqual(raster.times('Ka_0'), [41, 61, 101, 141, 181])
        self.assertEqual(raster.times('Kb_0'), [81, 121, 161])

    def test_one_of_pair_fires(self):
        """Test that exactly one neuron of an active bit loop fires every Δt"""
        circuit, _, cell = _cell_circuit()
        _command(circuit, cell, 'store', 1, (0, 1))
        raster = run(circuit, 600)
        spikes = sorted(raster.times('a_2_0') + raster.times('b_2_0'))
        self.assertEqual(spikes, list(range(41, 600, 20)))

    def test_erase(self):
        """Test that an erase silences the whole cell within one period"""
        circuit, pacemaker, cell = _cell_circuit()
        _command(circuit, cell, 'store', 1, (1, 1))
        _command(circuit, cell, 'erase', 401)
        raster = run(circuit, 1000)
        late = raster.window(401 + pacemaker.period, 1000)
        for nid in cell.neurons():
            self.assertFalse([t for t, n in late.events if n == nid], circuit.label(nid))
        self.assertTrue(raster.fired('Ka_0', 300, 401))

    def test_phase_bookkeeping(self):
        """Test the phases of a trapped spike against `spikeloom.memory.phase_of_trapped_spike`"""
        for phases in (5, 4):
            circuit, pacemaker, cell = _cell_circuit(phases)
            _command(circuit, cell, 'store', 1, (1, 0))
            times = run(circuit, 1000).times('a_1_0')
            store_phase = _phase(times[0], pacemaker)
            self.assertGreaterEqual(len(times), 10)
            for k, time in enumerate(times):
                self.assertEqual(_phase(time, pacemaker), phase_of_trapped_spike(store_phase, k, phases))

    def test_invalid(self):
        """Test the preconditions of `spikeloom.memory.build_memory_cell`"""
        circuit = Circuit()
        pacemaker = build_pacemaker(circuit)
        self.assertRaises(BuildError, lambda: build_memory_cell(circuit, pacemaker, 0))
        one_tap = [(pacemaker.phase(1), 20)]
        self.assertRaises(BuildError, lambda: build_memory_cell(circuit, pacemaker, 2, bit_taps=one_tap))

    def test_simple_model_rejected(self):
        """Test that memory cells refuse neurons that fire a tick after their input"""
        circuit = Circuit(spec=NeuronSpec.sm())
        pacemaker = build_pacemaker(circuit, 5)
        self.assertRaises(BuildError, lambda: build_memory_cell(circuit, pacemaker))
        self.assertRaises(BuildError, lambda: build_draft_memory(circuit, pacemaker))


def _simulate(ops, scheme=CodeScheme.BINARY, phases=5):
    return simulate_scenario(Scenario(scheme, list(ops)), RunConfig(phases=phases))


class TestDraftMemory(unittest.TestCase):
    """Test case for `spikeloom.memory.build_draft_memory`."""

    def test_store_activates_cell(self):
        """Test that storing 5 as prime starts the kernel and the prime loop of cell 5"""
        raster = _simulate([StreamOp.store(5, True)]).raster
        self.assertEqual(raster.times('Ka_5')[0], 81)
        self.assertEqual(raster.times('a_2_5')[0], 81)
        self.assertEqual(raster.times('a_1_5'), [])
        self.assertEqual(raster.times('Ka_4'), [])

    def test_store_then_retrieve(self):
        """Test that retrieving 5 fires the prime answer within one cycle"""
        result = _simulate([StreamOp.store(5, True), StreamOp.retrieve(5)])
        self.assertEqual(result.raster.times('PiAns'), [101 + 61])
        self.assertEqual(result.raster.times('nPiAns'), [])
        self.assertFalse(result.report.mismatches)

    def test_retrieve_empty_cell(self):
        """Test that an empty cell answers with silence"""
        result = _simulate([StreamOp.retrieve(9)])
        self.assertEqual(result.raster.times('PiAns') + result.raster.times('nPiAns'), [])
        self.assertIs(result.report.lines[0].observed, Answer.NONE)

    def test_address_one_hot(self):
        """Test that exactly one selection neuron fires per cycle"""
        ops = [StreamOp.store(v, False) for v in (3, 12, 15)]
        result = _simulate(ops)
        selections = [t for t, nid in result.raster.events if result.raster.labels[nid].startswith('Sel_')]
        self.assertEqual(len(selections), len(set(selections)))
        self.assertEqual(result.raster.times('Sel_3'), [41])
        self.assertEqual(result.raster.times('Sel_12'), [141])
        self.assertEqual(result.raster.times('Sel_15'), [241])

    def test_overwrite(self):
        """Test that a store into an active cell replaces its content"""
        result = _simulate([StreamOp.store(5, True), StreamOp.store(5, False), StreamOp.retrieve(5)])
        self.assertFalse(result.report.mismatches)
        self.assertIs(result.report.lines[2].observed, Answer.NON_PRIME)
        late = [t for t in result.raster.times('a_2_5') + result.raster.times('b_2_5') if t >= 141]
        self.assertEqual(late, [])

    def test_erase_and_isolation(self):
        """Test that erasing one cell leaves the others intact"""
        ops = [StreamOp.store(5, True), StreamOp.store(6, False), StreamOp.erase(6), StreamOp.retrieve(5),
               StreamOp.retrieve(6)]
        result = _simulate(ops)
        self.assertEqual([line.observed for line in result.report.lines],
                         [Answer.NONE, Answer.NONE, Answer.NONE, Answer.PRIME, Answer.NONE])
        self.assertFalse([t for t in result.raster.times('Ka_6') + result.raster.times('Kb_6') if t >= 301])
        self.assertTrue(result.raster.fired('Ka_5', 401, 500))

    def test_non_destructive_read(self):
        """Test that two consecutive retrieves give identical answers"""
        result = _simulate([StreamOp.store(3, True), StreamOp.retrieve(3), StreamOp.retrieve(3)])
        _, first, second = result.report.lines
        self.assertIs(first.observed, Answer.PRIME)
        self.assertIs(second.observed, Answer.PRIME)

    def test_four_phases(self):
        """Test the draft memory on a four-phase pacemaker"""
        ops = [StreamOp.store(7, True), StreamOp.retrieve(7), StreamOp.store(7, False), StreamOp.retrieve(7),
               StreamOp.erase(7), StreamOp.retrieve(7)]
        result = _simulate(ops, phases=4)
        self.assertEqual([line.observed for line in result.report.lines],
                         [Answer.NONE, Answer.PRIME, Answer.NONE, Answer.NON_PRIME, Answer.NONE, Answer.NONE])

    def test_gray_cells(self):
        """Test that Gray coding stores 2 in cell 3"""
        raster = _simulate([StreamOp.store(2, True)], CodeScheme.GRAY).raster
        self.assertTrue(raster.times('Ka_3'))
        self.assertFalse(raster.times('Ka_2'))

    def test_phase_count(self):
        """Test that the draft memory needs four phases"""
        circuit = Circuit()
        self.assertRaises(BuildError, lambda: build_draft_memory(circuit, build_pacemaker(circuit, 3)))

    def test_handle(self):
        """Test `spikeloom.memory.DraftMemoryHandle`"""
        circuit = Circuit()
        memory = build_draft_memory(circuit, build_pacemaker(circuit))
        self.assertEqual(len(memory.cells), 16)
        self.assertEqual([len(cell.a) for cell in memory.cells], [2] * 16)
        self.assertEqual(memory.ports['PiAns'], circuit.port('PiAns'))
        self.assertEqual(circuit.label(memory.select[5]), 'Sel_5')
        self.assertEqual(circuit.label(memory.cells[5].kernel_gate), 'GK_5')
        self.assertEqual([decoder.omega for decoder in memory.decoders], [2, 2])
        self.assertTrue(all(decoder.tied for decoder in memory.decoders))


_OPS = st.one_of(
    st.builds(StreamOp.store, st.integers(0, 15), st.booleans()),
    st.builds(StreamOp.retrieve, st.integers(0, 15)),
    st.builds(StreamOp.erase, st.integers(0, 15)),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(_OPS, max_size=48), st.sampled_from(list(CodeScheme)))
def test_matches_reference_memory(ops, scheme):
    """Test random transaction sequences against the reference memory"""
    report = _simulate(ops, scheme).report
    assert [line.format() for line in report.mismatches] == []


if __name__ == '__main__':
    unittest.main()
