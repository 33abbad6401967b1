# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""This module builds the functional blocks of assembly computing into a `spikeloom.engine.Circuit`.

Every builder returns a handle with the neuron ids of its ports. Blocks driven by a pacemaker sample their inputs and
controls at φ1: the control layer (A_i, B_i) fires 1 ms later, the coincidence layer (C_j) at φ2 and a selector output
at φ3.

Delays are nominal: a synapse of delay d makes its target fire d ticks after the source. Neurons that fire a tick after
their input arrives (simple-model neurons) get their synapses shortened by that latency, and their control layer fires
2 ms after φ1.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

from spikeloom.engine import Circuit, schedule_external_spike
from spikeloom.enums import GateKind, NeuronModel
from spikeloom.exceptions import BuildError

logger = logging.getLogger(__name__)

MAX_AND_FAN_IN = 4
MAX_SM_FAN_IN = 3
MAX_OMEGA = MAX_AND_FAN_IN - 1
INHIBITION = -2.0
VETO = -1.0
DEFAULT_ONSET = 1


@dataclass
class PacemakerHandle:
    """A closed ring P1 → P2 → … → Pn → P1.

    Attributes:
        phases: Neuron ids of P1 … Pn.
        delta_t: Delay between consecutive phases in ms.
        onset: Tick of the kick-start spike on P1.
    """
    phases: List[int]
    delta_t: int
    onset: int = DEFAULT_ONSET

    @property
    def n(self) -> int:
        return len(self.phases)

    @property
    def period(self) -> int:
        return self.n * self.delta_t

    def phase(self, k: int) -> int:
        """Neuron id of phase `k` (1-based)."""
        if not 1 <= k <= self.n:
            raise BuildError(f'Phase {k} outside 1..{self.n}')
        return self.phases[k - 1]

    def phase_time(self, k: int, cycle: int = 0) -> int:
        """Tick at which φ`k` fires in `cycle` (0-based)."""
        if not 1 <= k <= self.n:
            raise BuildError(f'Phase {k} outside 1..{self.n}')
        return self.onset + (k - 1) * self.delta_t + cycle * self.period


@dataclass
class GateHandle:
    kind: GateKind
    inputs: List[int]
    output: int

    @property
    def n(self) -> int:
        return len(self.inputs)


@dataclass
class SelectorHandle:
    """Multiplexer of 2^omega inputs. `controls[i]` is S_i, `inputs[j]` is I_j, `c[j]` is C_j."""
    circuit: Circuit = field(repr=False, compare=False)
    omega: int
    pacemaker: PacemakerHandle
    controls: List[int]
    inputs: List[int]
    a: List[int]
    b: List[int]
    c: List[int]
    output: int
    table: Optional[List[int]] = field(default=None)


@dataclass
class DecoderHandle:
    """Demultiplexer of one input. `outputs[j]` is Y_j, which doubles as the coincidence neuron C_j."""
    circuit: Circuit = field(repr=False, compare=False)
    omega: int
    pacemaker: PacemakerHandle
    controls: List[int]
    input: int
    a: List[int]
    b: List[int]
    outputs: List[int]
    tied: bool = False


def max_fan_in(circuit: Circuit) -> int:
    """Largest number of θ/n inputs a coincidence neuron of `circuit` can take.

    A simple-model neuron fires on any kick beyond the gap between its rest and its unstable point, so n-1 of n inputs
    must stay below that gap.
    """
    return MAX_SM_FAN_IN if circuit.default_spec.model is NeuronModel.SM else MAX_AND_FAN_IN


def _hop(circuit: Circuit, post: int, delay: int) -> int:
    """Synaptic delay that makes `post` fire `delay` ticks after the presynaptic spike."""
    hop = delay - circuit.latency(post)
    if hop < 1:
        raise BuildError(f'A delay of {delay} ms is shorter than the spike latency of {circuit.label(post)}')
    return hop


def _sampling_delay(circuit: Circuit) -> int:
    """Ticks from φ1 to the control layer."""
    return 1 + circuit.latency()


def build_pacemaker(circuit: Circuit, n: int = 5, delta_t: Optional[int] = None, onset: int = DEFAULT_ONSET,
                    prefix: str = '') -> PacemakerHandle:
    """Builds a ring of `n` phase neurons and schedules the kick-start spike on P1.

    Args:
        circuit: The circuit to extend.
        n: Number of phases.
        delta_t: Delay between phases, `circuit.delta_t` by default.
        onset: Tick of the kick-start spike.
        prefix: Label prefix of the phase neurons.

    Returns:
        A `spikeloom.blocks.PacemakerHandle`. φk fires at `onset + (k-1)·Δt` and every `n·Δt` thereafter.

    Raises:
        BuildError: `n < 2` or `delta_t` not longer than the spike latency.
    """
    delta_t = circuit.delta_t if delta_t is None else delta_t
    if n < 2:
        raise BuildError(f'A pacemaker needs at least 2 phases, got {n}')
    if delta_t < 1:
        raise BuildError(f'Pacemaker delta t must be at least 1 ms, got {delta_t}')
    phases = [circuit.add_port(f'{prefix}P{k}') for k in range(1, n + 1)]
    for k, nid in enumerate(phases):
        target = phases[(k + 1) % n]
        circuit.connect(nid, target, 1.0, _hop(circuit, target, delta_t))
        circuit.phase_map[k + 1] = nid
    schedule_external_spike(circuit, phases[0], onset)
    logger.debug('Pacemaker with %d phases, period %d ms', n, n * delta_t)
    return PacemakerHandle(phases, delta_t, onset)


def _gate(circuit: Circuit, kind: GateKind, n: int, weight: float, inputs: Optional[Sequence[int]], prefix: str,
          delay: Optional[int]) -> GateHandle:
    delay = circuit.delta_t if delay is None else delay
    if inputs is None:
        inputs = [circuit.add_port(f'{prefix}I{k}') for k in range(n)]
    elif len(inputs) != n:
        raise BuildError(f'{kind.name} gate expects {n} inputs, got {len(inputs)}')
    output = circuit.add_port(f'{prefix}Y')
    for nid in inputs:
        circuit.connect(nid, output, weight, _hop(circuit, output, delay))
    return GateHandle(kind, list(inputs), output)


def build_and_gate(circuit: Circuit, n: int, inputs: Optional[Sequence[int]] = None, prefix: str = '',
                   delay: Optional[int] = None) -> GateHandle:
    """Builds a coincidence neuron with `n` inputs at θ/n each.

    The output fires Δt after all inputs spike in the same tick. Every input also vetoes the output with -θ one tick
    after its nominal firing time, so inputs that arrive a tick or more apart never add up to θ. After a spike the
    output needs about 2Δt to recover from its own vetoes.

    Raises:
        BuildError: `n` outside 2..4 (2..3 for simple-model circuits).
    """
    limit = max_fan_in(circuit)
    if not 2 <= n <= limit:
        raise BuildError(f'AND gates support 2 to {limit} inputs, got {n}')
    gate = _gate(circuit, GateKind.AND, n, 1.0 / n, inputs, prefix, delay)
    delay = circuit.delta_t if delay is None else delay
    for nid in gate.inputs:
        circuit.connect(nid, gate.output, VETO, delay + 1)
    return gate


def build_or_gate(circuit: Circuit, n: int, inputs: Optional[Sequence[int]] = None, prefix: str = '',
                  delay: Optional[int] = None) -> GateHandle:
    """Builds a neuron that fires Δt after any of its `n` inputs, each connected at θ.

    Several simultaneous inputs of a simple-model OR fire it one tick early.
    """
    if n < 1:
        raise BuildError(f'OR gates need at least one input, got {n}')
    return _gate(circuit, GateKind.OR, n, 1.0, inputs, prefix, delay)


def _check_omega(circuit: Circuit, omega: int, pacemaker: PacemakerHandle):
    limit = max_fan_in(circuit) - 1
    if not 1 <= omega <= limit:
        raise BuildError(f'Omega must lie in 1..{limit}, got {omega}')
    shortest = _sampling_delay(circuit) + 1 + circuit.latency()
    if pacemaker.delta_t < shortest:
        raise BuildError(f'Phase-sampled blocks need a pacemaker delta t of at least {shortest} ms')


def _control_layer(circuit: Circuit, pacemaker: PacemakerHandle, omega: int, controls: Optional[Sequence[int]],
                   prefix: str):
    """Creates the S_i ports (unless given) and the A_i/B_i pairs sampled by φ1."""
    if controls is None:
        controls = [circuit.add_port(f'{prefix}S{i}') for i in range(omega)]
    elif len(controls) != omega:
        raise BuildError(f'Expected {omega} control neurons, got {len(controls)}')
    p1 = pacemaker.phase(1)
    sampling = _sampling_delay(circuit)
    a, b = [], []
    for i, s in enumerate(controls):
        a.append(circuit.add_neuron(f'{prefix}A{i}'))
        b.append(circuit.add_neuron(f'{prefix}B{i}'))
        hop = _hop(circuit, a[i], sampling)
        circuit.connect(p1, a[i], 1.0, hop)
        circuit.connect(p1, b[i], 0.5, hop)
        circuit.connect(s, a[i], INHIBITION, hop)
        circuit.connect(s, b[i], 0.5, hop)
    return list(controls), a, b


def _select_lines(circuit: Circuit, a: List[int], b: List[int], targets: List[int], pacemaker: PacemakerHandle):
    """Connects A_i or B_i to every target j according to bit i of j."""
    weight = 1.0 / (len(a) + 1)
    delay = pacemaker.delta_t - _sampling_delay(circuit)
    for j, target in enumerate(targets):
        for i in range(len(a)):
            source = b[i] if (j >> i) & 1 else a[i]
            circuit.connect(source, target, weight, _hop(circuit, target, delay))


def build_selector(circuit: Circuit, pacemaker: PacemakerHandle, omega: int = 2, prefix: str = '',
                   controls: Optional[Sequence[int]] = None,
                   inputs: Optional[Sequence[int]] = None) -> SelectorHandle:
    """Builds a selector: Y fires at φ3 iff the input I_j addressed by the controls fired at φ1.

    Args:
        circuit: The circuit to extend.
        pacemaker: The `spikeloom.blocks.PacemakerHandle` whose φ1 samples controls and inputs.
        omega: Number of controls; the block has `2**omega` inputs.
        prefix: Label prefix for every neuron of the block.
        controls: Existing neurons to use as S_0 … S_(omega-1).
        inputs: Existing neurons to use as I_0 … I_(2**omega - 1).

    Raises:
        BuildError: `omega` outside 1..3 (1..2 for simple-model circuits) or a pacemaker delta t too short for the
            control layer.
    """
    _check_omega(circuit, omega, pacemaker)
    controls, a, b = _control_layer(circuit, pacemaker, omega, controls, prefix)
    width = 2 ** omega
    if inputs is None:
        inputs = [circuit.add_port(f'{prefix}I{j}') for j in range(width)]
    elif len(inputs) != width:
        raise BuildError(f'Expected {width} input neurons, got {len(inputs)}')
    c = [circuit.add_neuron(f'{prefix}C{j}') for j in range(width)]
    _select_lines(circuit, a, b, c, pacemaker)
    output = circuit.add_port(f'{prefix}Y')
    for j in range(width):
        circuit.connect(inputs[j], c[j], 1.0 / (omega + 1), _hop(circuit, c[j], pacemaker.delta_t))
        circuit.connect(c[j], output, 1.0, _hop(circuit, output, pacemaker.delta_t))
    return SelectorHandle(circuit, omega, pacemaker, controls, list(inputs), a, b, c, output)


def build_decoder(circuit: Circuit, pacemaker: PacemakerHandle, omega: int = 2, prefix: str = '',
                  controls: Optional[Sequence[int]] = None) -> DecoderHandle:
    """Builds a decoder: Y_j fires at φ2 iff the controls address j and the input I fired at φ1.

    Raises:
        BuildError: `omega` outside 1..3 (1..2 for simple-model circuits) or a pacemaker delta t too short for the
            control layer.
    """
    _check_omega(circuit, omega, pacemaker)
    controls, a, b = _control_layer(circuit, pacemaker, omega, controls, prefix)
    enable = circuit.add_port(f'{prefix}I')
    outputs = [circuit.add_port(f'{prefix}Y{j}') for j in range(2 ** omega)]
    _select_lines(circuit, a, b, outputs, pacemaker)
    for y in outputs:
        circuit.connect(enable, y, 1.0 / (omega + 1), _hop(circuit, y, pacemaker.delta_t))
    return DecoderHandle(circuit, omega, pacemaker, controls, enable, a, b, outputs)


def _tie(circuit: Circuit, pacemaker: PacemakerHandle, source: int, target: int, omega: int):
    circuit.remove_synapses(source, target)
    circuit.connect(pacemaker.phase(1), target, 1.0 / (omega + 1), _hop(circuit, target, pacemaker.delta_t))


def tie_input_high(handle: DecoderHandle) -> DecoderHandle:
    """Replaces the decoder input by a constant '1': φ1 reaches every Y_j together with the control lines."""
    if handle.tied:
        return handle
    circuit = handle.circuit
    for y in handle.outputs:
        _tie(circuit, handle.pacemaker, handle.input, y, handle.omega)
    handle.tied = True
    return handle


def configure_function_generator(selector: SelectorHandle, table: Sequence[int]) -> SelectorHandle:
    """Turns a selector into a generator of the Boolean function `table` of its controls.

    `table[j]` is the function value for the control word j (S_0 is the least significant bit). Inputs with a 1 are
    tied to φ1, inputs with a 0 lose their synapse altogether.

    Raises:
        BuildError: `table` does not have `2**omega` entries.
    """
    width = 2 ** selector.omega
    if len(table) != width:
        raise BuildError(f'A function of {selector.omega} variables needs {width} table entries, got {len(table)}')
    circuit = selector.circuit
    for j, value in enumerate(table):
        circuit.remove_synapses(selector.inputs[j], selector.c[j])
        circuit.remove_synapses(selector.pacemaker.phase(1), selector.c[j])
        if value:
            _tie(circuit, selector.pacemaker, selector.inputs[j], selector.c[j], selector.omega)
    selector.table = [1 if value else 0 for value in table]
    return selector


def drive(circuit: Circuit, neurons: Sequence[int], bits: Iterable[int], time: int):
    """Schedules a spike at `time` on every neuron whose bit is 1; a 0 leaves the neuron silent."""
    for nid, bit in zip(neurons, bits):
        if bit:
            schedule_external_spike(circuit, nid, time)

