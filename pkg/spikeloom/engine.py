# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""This module serves the representation of spiking circuits and their simulation on 1 ms ticks.

A `Circuit` is a table of neurons, a table of delayed synapses and a map of named ports. Synaptic weights are given in
units of θ, the single-tick current that reliably fires the postsynaptic neuron. `run` advances a `SimulationState`
tick by tick and records every spike in a `Raster`.
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt

from spikeloom.enums import NeuronModel
from spikeloom.exceptions import (CalibrationError, CircuitError, ConfigError,
                                  ScheduleError)

logger = logging.getLogger(__name__)

SM_APEX = 30.0
SM_SUBSTEPS = 10
OVERFLOW_LIMIT = 1e4
DEFAULT_DELTA_T = 20
DEFAULT_HEADROOM = {NeuronModel.LIF: 1.2, NeuronModel.SM: 1.05}
EXTERNAL_WEIGHT = 2.0
CSV_HEADER = ('time_ms', 'neuron_id', 'label')


@dataclass(frozen=True)
class LIFParams:
    """Parameters of a leaky integrate-and-fire neuron (ms and mV)."""
    tau: float = 10.0
    v_rest: float = -65.0
    v_threshold: float = -50.0
    v_reset: float = -65.0


@dataclass(frozen=True)
class SMParams:
    """Parameters of the quadratic simple model, fast-spiking set by default.

    The fast-spiking set shares its resting point, and so θ*, with the regular-spiking set, but its recovery variable
    settles within one pacemaker cycle. Use `SMParams.regular_spiking()` for the adapting variant.
    """
    a: float = 0.1
    b: float = 0.2
    c: float = -65.0
    d: float = 2.0

    @classmethod
    def regular_spiking(cls) -> SMParams:
        return cls(a=0.02, b=0.2, c=-65.0, d=8.0)


@dataclass(frozen=True)
class NeuronSpec:
    """Model choice and parameters of a neuron. Specs are hashable so that θ is calibrated once per spec."""
    model: NeuronModel = NeuronModel.LIF
    params: Union[LIFParams, SMParams] = field(default_factory=LIFParams)

    def __post_init__(self):
        expected = LIFParams if self.model is NeuronModel.LIF else SMParams
        if not isinstance(self.params, expected):
            raise CircuitError(f'{self.model.name} neuron needs {expected.__name__}, got {type(self.params).__name__}')
        values = [getattr(self.params, name) for name in self.params.__dataclass_fields__]
        if not all(math.isfinite(value) for value in values):
            raise CircuitError(f'Non-finite neuron parameter in {self.params}')
        if self.model is NeuronModel.LIF:
            if self.params.tau <= 0:
                raise CircuitError('LIF time constant must be positive')
            if self.params.v_threshold <= self.params.v_reset:
                raise CircuitError('LIF threshold must lie above the reset potential')

    @classmethod
    def lif(cls, **kwargs) -> NeuronSpec:
        return cls(NeuronModel.LIF, LIFParams(**kwargs))

    @classmethod
    def sm(cls, **kwargs) -> NeuronSpec:
        return cls(NeuronModel.SM, SMParams(**kwargs))

    @classmethod
    def for_model(cls, model: NeuronModel) -> NeuronSpec:
        """Returns the default spec of `model`."""
        return cls.lif() if model is NeuronModel.LIF else cls.sm()


def _sm_resting_state(params: SMParams) -> Tuple[float, float]:
    """Returns the stable fixed point `(v, u)` of the simple model, or its reset point if there is none."""
    p = 5.0 - params.b
    discriminant = p * p - 4 * 0.04 * 140.0
    if discriminant < 0:
        return params.c, params.b * params.c
    v = (-p - math.sqrt(discriminant)) / 0.08
    return v, params.b * v


@dataclass(frozen=True)
class Synapse:
    """A directed, delayed connection. `weight` is a signed multiple of the postsynaptic θ."""
    pre: int
    post: int
    weight: float
    delay: int


@dataclass(frozen=True)
class NoiseConfig:
    """Gaussian synaptic noise. `sigma` is a fraction of θ* per synapse carrying current in a tick."""
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not math.isfinite(self.sigma) or self.sigma < 0:
            raise ConfigError(f'Noise sigma must be a finite non-negative number, got {self.sigma}')


class NeuronState:
    """Membrane variables of a population of neurons, advanced one tick at a time.

    Attributes:
        v: Membrane potentials in mV.
        u: Recovery variables (zero for LIF neurons).
        pending: Summed input current applied in the most recent tick.
    """

    def __init__(self, specs: List[NeuronSpec]):
        n = len(specs)
        self.is_sm = np.array([spec.model is NeuronModel.SM for spec in specs], dtype=bool)
        self.v = np.zeros(n)
        self.u = np.zeros(n)
        self.pending = np.zeros(n)
        # LIF columns
        self.decay = np.ones(n)
        self.v_rest = np.zeros(n)
        self.v_threshold = np.zeros(n)
        self.v_reset = np.zeros(n)
        # SM columns
        self.a = np.zeros(n)
        self.b = np.zeros(n)
        self.c = np.zeros(n)
        self.d = np.zeros(n)
        for i, spec in enumerate(specs):
            params = spec.params
            if spec.model is NeuronModel.LIF:
                self.decay[i] = math.exp(-1.0 / params.tau)
                self.v_rest[i] = params.v_rest
                self.v_threshold[i] = params.v_threshold
                self.v_reset[i] = params.v_reset
                self.v[i] = params.v_rest
            else:
                self.a[i], self.b[i], self.c[i], self.d[i] = params.a, params.b, params.c, params.d
                self.v[i], self.u[i] = _sm_resting_state(params)
                self.v_reset[i] = params.c

    def __len__(self) -> int:
        return len(self.v)

    def advance(self, current: npt.NDArray[np.float64]) -> npt.NDArray[np.bool_]:
        """Applies `current` as an instantaneous kick and advances every neuron by 1 ms.

        Args:
            current: Input current per neuron for this tick.

        Returns:
            A boolean mask of the neurons that fired. Fired neurons are left at their reset values.
        """
        self.pending = np.asarray(current, dtype=float)
        fired = np.zeros(len(self), dtype=bool)
        lif = ~self.is_sm
        if lif.any():
            fired[lif] = self._advance_lif(lif)
        if self.is_sm.any():
            fired[self.is_sm] = self._advance_sm(self.is_sm)
        self._clamp_overflow()
        return fired

    def _advance_lif(self, mask: npt.NDArray[np.bool_]) -> npt.NDArray[np.bool_]:
        rest = self.v_rest[mask]
        v = rest + (self.v[mask] - rest) * self.decay[mask] + self.pending[mask]
        spiked = v >= self.v_threshold[mask]
        v[spiked] = self.v_reset[mask][spiked]
        self.v[mask] = v
        return spiked

    def _advance_sm(self, mask: npt.NDArray[np.bool_]) -> npt.NDArray[np.bool_]:
        # a spike is the apex crossing itself; integration stops there for the rest of the tick
        a, b, c, d = self.a[mask], self.b[mask], self.c[mask], self.d[mask]
        v = self.v[mask] + self.pending[mask]
        u = self.u[mask].copy()
        spiked = v >= SM_APEX
        h = 1.0 / SM_SUBSTEPS
        for _ in range(SM_SUBSTEPS):
            live = ~spiked
            dv = 0.04 * v * v + 5.0 * v + 140.0 - u
            du = a * (b * v - u)
            v = np.where(live, v + h * dv, v)
            u = np.where(live, u + h * du, u)
            spiked |= live & (v >= SM_APEX)
        v[spiked] = c[spiked]
        u[spiked] += d[spiked]
        self.v[mask] = v
        self.u[mask] = u
        return spiked

    def _clamp_overflow(self):
        bad = ~np.isfinite(self.v) | (np.abs(self.v) > OVERFLOW_LIMIT) | ~np.isfinite(self.u)
        if bad.any():
            logger.warning('Clamping %d neuron(s) with overflowing membrane state to reset', int(bad.sum()))
            self.v[bad] = self.v_reset[bad]
            self.u[bad] = np.where(self.is_sm[bad], self.b[bad] * self.c[bad], 0.0)


def _fires_within_two_ticks(spec: NeuronSpec, amplitude: float) -> bool:
    trial = NeuronState([spec])
    if trial.advance(np.array([amplitude]))[0]:
        return True
    return bool(trial.advance(np.zeros(1))[0])


@lru_cache(maxsize=None)
def calibrate_theta(spec: NeuronSpec, max_doublings: int = 40, max_bisections: int = 60,
                    tolerance: float = 1e-4) -> float:
    """Determines θ*, the smallest single-tick current that fires a resting neuron within 2 ms.

    Args:
        spec: The `spikeloom.engine.NeuronSpec` to calibrate.
        max_doublings: Budget for finding an upper bound that fires.
        max_bisections: Budget for narrowing the bracket.
        tolerance: Relative width of the final bracket.

    Returns:
        The upper end of the converged bracket, so the returned current always fires.

    Raises:
        CalibrationError: The neuron fires without input, never fires or the bisection does not converge.
    """
    if _fires_within_two_ticks(spec, 0.0):
        raise CalibrationError(f'{spec} fires without any input')
    lo, hi = 0.0, 1.0
    for _ in range(max_doublings):
        if _fires_within_two_ticks(spec, hi):
            break
        lo, hi = hi, hi * 2
    else:
        raise CalibrationError(f'No input current up to {hi} fires {spec}')
    for _ in range(max_bisections):
        if hi - lo <= tolerance * hi:
            logger.debug('Calibrated theta %.6f for %s', hi, spec)
            return hi
        mid = (lo + hi) / 2
        if _fires_within_two_ticks(spec, mid):
            hi = mid
        else:
            lo = mid
    raise CalibrationError(f'Bisection for {spec} did not converge in {max_bisections} steps')


def default_headroom(model: NeuronModel) -> float:
    return DEFAULT_HEADROOM[model]


@lru_cache(maxsize=None)
def spike_latency(spec: NeuronSpec, headroom: float) -> int:
    """Returns the tick, counted from the arrival tick, in which a resting neuron kicked by θ fires.

    LIF neurons fire in the arrival tick. A simple-model neuron climbs towards its apex for more than a millisecond
    and fires one tick later.

    Raises:
        CalibrationError: θ does not fire the neuron within 2 ms.
    """
    trial = NeuronState([spec])
    current = np.array([headroom * calibrate_theta(spec)])
    for latency in range(2):
        if trial.advance(current)[0]:
            return latency
        current = np.zeros(1)
    raise CalibrationError(f'{headroom} theta* does not fire {spec} within 2 ms')


class Circuit:
    """Neuron table, synapse table and named ports of a spiking circuit.

    Attributes:
        neurons: `(spec, label)` per neuron id. Labels are unique.
        synapses: Every `spikeloom.engine.Synapse` of the circuit.
        ports: Port name to neuron id.
        phase_map: Pacemaker phase index (1-based) to neuron id, filled by `spikeloom.blocks.build_pacemaker`.
        delta_t: Base delay Δt in ms.
        tick: Simulation resolution in ms.
        headroom: Factor between θ and the calibrated θ*, by default 1.2 for LIF and 1.05 for simple-model circuits.
        schedule: Tick to the neuron ids forced to fire at that tick.
        now: Simulation time reached by the most recent step.
    """

    def __init__(self, delta_t: int = DEFAULT_DELTA_T, spec: Optional[NeuronSpec] = None,
                 headroom: Optional[float] = None):
        self.default_spec = spec if spec is not None else NeuronSpec()
        headroom = default_headroom(self.default_spec.model) if headroom is None else headroom
        if delta_t < 1:
            raise CircuitError(f'Delta t must be at least 1 ms, got {delta_t}')
        if not math.isfinite(headroom) or headroom < 1:
            raise CircuitError(f'Headroom must be at least 1, got {headroom}')
        self.neurons: List[Tuple[NeuronSpec, str]] = []
        self.synapses: List[Synapse] = []
        self.ports: Dict[str, int] = {}
        self.phase_map: Dict[int, int] = {}
        self.delta_t = delta_t
        self.tick = 1
        self.headroom = headroom
        self.schedule: Dict[int, List[int]] = {}
        self.now = 0
        self._by_label: Dict[str, int] = {}

    def __len__(self) -> int:
        return len(self.neurons)

    def add_neuron(self, label: str, spec: Optional[NeuronSpec] = None) -> int:
        """Adds a neuron and returns its id.

        Raises:
            CircuitError: `label` is already taken.
        """
        if label in self._by_label:
            raise CircuitError(f'Duplicate neuron label {label!r}')
        self.neurons.append((spec if spec is not None else self.default_spec, label))
        self._by_label[label] = len(self.neurons) - 1
        return len(self.neurons) - 1

    def add_port(self, name: str, spec: Optional[NeuronSpec] = None) -> int:
        """Adds a neuron labelled `name` and registers it as a port."""
        if name in self.ports:
            raise CircuitError(f'Duplicate port {name!r}')
        nid = self.add_neuron(name, spec)
        self.ports[name] = nid
        return nid

    def port(self, name: str) -> int:
        try:
            return self.ports[name]
        except KeyError:
            raise CircuitError(f'Unknown port {name!r}') from None

    def neuron(self, label: str) -> int:
        """Returns the id of the neuron labelled `label`."""
        try:
            return self._by_label[label]
        except KeyError:
            raise CircuitError(f'Unknown neuron {label!r}') from None

    def label(self, nid: int) -> str:
        self._check(nid)
        return self.neurons[nid][1]

    def labels(self) -> List[str]:
        return [label for _, label in self.neurons]

    def _check(self, nid: int):
        if not isinstance(nid, (int, np.integer)) or not 0 <= nid < len(self.neurons):
            raise CircuitError(f'Unknown neuron id {nid}')

    def connect(self, pre: int, post: int, weight: float, delay: int) -> Synapse:
        """Adds a synapse from `pre` to `post`.

        Args:
            pre: Presynaptic neuron id.
            post: Postsynaptic neuron id.
            weight: Signed multiple of θ, e.g. `1.0`, `0.5` or `-2.0`.
            delay: Propagation delay in ms.

        Raises:
            CircuitError: Unknown endpoint, zero weight or a delay below one tick.
        """
        self._check(pre)
        self._check(post)
        if weight == 0 or not math.isfinite(weight):
            raise CircuitError(f'Synapse {pre}->{post} needs a finite non-zero weight')
        if int(delay) != delay or delay < 1:
            raise CircuitError(f'Synapse {pre}->{post} needs an integer delay of at least 1 ms, got {delay}')
        synapse = Synapse(pre, post, float(weight), int(delay))
        self.synapses.append(synapse)
        return synapse

    def remove_synapses(self, pre: int, post: int) -> int:
        """Removes every synapse from `pre` to `post` and returns how many were removed."""
        kept = [s for s in self.synapses if not (s.pre == pre and s.post == post)]
        removed = len(self.synapses) - len(kept)
        self.synapses = kept
        return removed

    def theta_star(self, nid: int) -> float:
        """Calibrated θ* of neuron `nid`."""
        self._check(nid)
        return calibrate_theta(self.neurons[nid][0])

    def theta(self, nid: int) -> float:
        """The weight unit θ of neuron `nid`."""
        return self.headroom * self.theta_star(nid)

    def latency(self, nid: Optional[int] = None) -> int:
        """`spikeloom.engine.spike_latency` of neuron `nid`, or of the default spec if `nid` is None."""
        if nid is None:
            return spike_latency(self.default_spec, self.headroom)
        self._check(nid)
        return spike_latency(self.neurons[nid][0], self.headroom)

    def max_delay(self) -> int:
        return max((s.delay for s in self.synapses), default=0)


def schedule_external_spike(circuit: Circuit, nid: int, time: int) -> Dict[int, List[int]]:
    """Forces neuron `nid` to fire at tick `time` by injecting 2θ.

    Returns:
        The updated schedule of `circuit`.

    Raises:
        CircuitError: Unknown neuron id.
        ScheduleError: `time` lies before the current simulation time.
    """
    circuit._check(nid)
    if time < circuit.now:
        raise ScheduleError(f'Cannot schedule a spike at {time} ms, simulation is already at {circuit.now} ms')
    circuit.schedule.setdefault(int(time), []).append(int(nid))
    return circuit.schedule


class SimulationState:
    """Dynamic state of one simulation run of a `Circuit`.

    The synapse table is frozen into CSR arrays at construction. Pending currents live in a ring buffer with one row
    per tick up to the longest delay.
    """

    def __init__(self, circuit: Circuit, seed: int = 0):
        n = len(circuit)
        self.time = 0
        circuit.now = self.time
        self.neurons = NeuronState([spec for spec, _ in circuit.neurons])
        self.theta_star = np.array([circuit.theta_star(i) for i in range(n)])
        self.theta = circuit.headroom * self.theta_star
        self.horizon = circuit.max_delay() + 1
        self.pending = np.zeros((self.horizon, n))
        self.carriers = np.zeros((self.horizon, n), dtype=np.int64)
        self.rng = np.random.default_rng(seed)

        synapses = sorted(circuit.synapses, key=lambda s: s.pre)
        self.post = np.array([s.post for s in synapses], dtype=np.int64)
        self.delay = np.array([s.delay for s in synapses], dtype=np.int64)
        self.current = np.array([s.weight for s in synapses]) * self.theta[self.post] if synapses else np.zeros(0)
        counts = np.bincount([s.pre for s in synapses], minlength=n) if synapses else np.zeros(n, dtype=np.int64)
        self.indptr = np.concatenate(([0], np.cumsum(counts)))


def step(circuit: Circuit, state: SimulationState, noise: NoiseConfig) -> List[int]:
    """Advances `state` by one tick.

    Delayed synaptic currents, noise and scheduled external spikes are summed per neuron, the neuron models are
    advanced and every spike is enqueued on the outgoing synapses of its neuron.

    Returns:
        The ids of the neurons that fired in this tick, ascending.
    """
    t = state.time
    slot = t % state.horizon
    current = state.pending[slot].copy()
    carriers = state.carriers[slot].copy()
    state.pending[slot] = 0.0
    state.carriers[slot] = 0
    if noise.sigma > 0:
        carrying = carriers > 0
        if carrying.any():
            std = noise.sigma * state.theta_star[carrying] * np.sqrt(carriers[carrying])
            current[carrying] += state.rng.standard_normal(int(carrying.sum())) * std
    for nid in circuit.schedule.get(t, ()):
        current[nid] += EXTERNAL_WEIGHT * state.theta[nid]

    fired = np.flatnonzero(state.neurons.advance(current))
    if fired.size:
        idx = np.concatenate([np.arange(state.indptr[i], state.indptr[i + 1]) for i in fired])
        if idx.size:
            slots = (t + state.delay[idx]) % state.horizon
            np.add.at(state.pending, (slots, state.post[idx]), state.current[idx])
            np.add.at(state.carriers, (slots, state.post[idx]), 1)
    state.time = t + 1
    circuit.now = state.time
    return fired.tolist()


@dataclass
class Raster:
    """Recorded spikes of a run.

    Attributes:
        events: `(time, neuron id)` pairs ordered by time, then neuron id.
        labels: Label per neuron id.
    """
    events: List[Tuple[int, int]] = field(default_factory=list)
    labels: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.events)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise CircuitError(f'Unknown neuron {label!r}') from None

    def times(self, label: str) -> List[int]:
        """Spike times of the neuron labelled `label`."""
        nid = self.index(label)
        return [t for t, n in self.events if n == nid]

    def count(self, label: str) -> int:
        return len(self.times(label))

    def window(self, start: int, stop: int) -> Raster:
        """Returns the events with `start <= time < stop`."""
        return Raster([(t, n) for t, n in self.events if start <= t < stop], list(self.labels))

    def fired(self, label: str, start: int, stop: int) -> bool:
        return any(start <= t < stop for t in self.times(label))

    def to_csv(self) -> str:
        """Serializes the raster as `time_ms,neuron_id,label` lines with a header."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for t, nid in self.events:
            writer.writerow((t, nid, self.labels[nid]))
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text: str, labels: Optional[Iterable[str]] = None) -> Raster:
        """Parses the output of `to_csv`. Neurons that never fired keep their label only if `labels` is given."""
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(rows[0]) != CSV_HEADER:
            raise CircuitError('Raster CSV must start with the header ' + ','.join(CSV_HEADER))
        names: Dict[int, str] = dict(enumerate(labels)) if labels is not None else {}
        events = []
        for row in rows[1:]:
            t, nid, label = int(row[0]), int(row[1]), row[2]
            names[nid] = label
            events.append((t, nid))
        size = max(names, default=-1) + 1
        return cls(sorted(events), [names.get(i, f'n{i}') for i in range(size)])


def run(circuit: Circuit, duration: int, noise: Optional[NoiseConfig] = None,
        state: Optional[SimulationState] = None) -> Raster:
    """Simulates `circuit` for `duration` ticks.

    Args:
        circuit: The `spikeloom.engine.Circuit` to simulate. Its schedule is read, not consumed.
        duration: Number of 1 ms ticks.
        noise: Optional `spikeloom.engine.NoiseConfig`, noiseless by default.
        state: Continue from this state instead of starting fresh at t = 0.

    Returns:
        The `spikeloom.engine.Raster` of the simulated ticks.
    """
    if duration < 0:
        raise ScheduleError(f'Duration must be non-negative, got {duration}')
    noise = noise if noise is not None else NoiseConfig()
    if state is None:
        state = SimulationState(circuit, noise.seed)
    logger.info('Simulating %d ms of %d neurons and %d synapses from t=%d (sigma=%g, seed=%d)',
                duration, len(circuit), len(circuit.synapses), state.time, noise.sigma, noise.seed)
    events: List[Tuple[int, int]] = []
    for _ in range(duration):
        t = state.time
        events.extend((t, nid) for nid in step(circuit, state, noise))
    logger.info('Recorded %d spikes', len(events))
    return Raster(events, circuit.labels())
