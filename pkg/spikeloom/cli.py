# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""This module implements the `run`, `truthtable` and `sweep` commands."""
from __future__ import annotations

import argparse
import itertools
import logging
import math
import os
import time
from dataclasses import dataclass, field, fields
from multiprocessing import Pool
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import colorama
from colorama import Fore, Style

from spikeloom.blocks import (build_decoder, build_pacemaker, build_selector,
                              configure_function_generator, drive)
from spikeloom.engine import Circuit, NeuronSpec, NoiseConfig, Raster, run
from spikeloom.enums import Block, CodeScheme, NeuronModel
from spikeloom.exceptions import ConfigError, SpikeloomError
from spikeloom.memory import build_draft_memory
from spikeloom.oracle import (Report, compare_answers, decoder_truth,
                              function_truth, selector_truth,
                              transaction_timeline)
from spikeloom.stream import (Scenario, apply_schedule, compile_stream,
                              parse_scenario, prime_scenario)
from spikeloom.utils import (Stats, read_key_values, render_raster_svg,
                             save_raster_csv, write_text)

logger = logging.getLogger(__name__)

ENV_PREFIX = 'SPIKELOOM_'
DEFAULT_SIGMAS = (0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0)
BUILTIN_SCENARIO = 'primes'

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_ERROR = 2


def _parse_sigmas(text: str) -> Tuple[float, ...]:
    return tuple(float(part) for part in text.split(',') if part.strip())


def _optional_path(text: str) -> Optional[str]:
    return text.strip() or None


_PARSERS = {
    'scenario': str,
    'code': CodeScheme.from_name,
    'model': NeuronModel.from_name,
    'phases': int,
    'delta_t': int,
    'sigma': float,
    'seed': int,
    'out_raster': _optional_path,
    'out_svg': _optional_path,
    'report': _optional_path,
    'repeats': int,
    'sigmas': _parse_sigmas,
    'workers': int,
    'headroom': float,
}


@dataclass
class RunConfig:
    """Settings of a simulation run or noise sweep.

    Values are layered, lowest precedence first: these defaults, a `key=value` file, `SPIKELOOM_<KEY>` environment
    variables and command-line flags.
    """
    scenario: str = BUILTIN_SCENARIO
    code: CodeScheme = CodeScheme.BINARY
    model: NeuronModel = NeuronModel.LIF
    phases: int = 5
    delta_t: int = 20
    sigma: float = 0.0
    seed: int = 0
    out_raster: Optional[str] = None
    out_svg: Optional[str] = None
    report: Optional[str] = None
    repeats: int = 10
    sigmas: Tuple[float, ...] = DEFAULT_SIGMAS
    workers: int = 1
    headroom: Optional[float] = None

    def update(self, values: Mapping[str, object], source: str = 'config') -> RunConfig:
        """Applies `values`; strings are parsed, other values are taken as they are.

        Raises:
            ConfigError: Unknown key or unparsable value.
        """
        for key, value in values.items():
            key = key.strip().lower().replace('-', '_')
            if key not in _PARSERS:
                raise ConfigError(f'Unknown {source} key {key!r}')
            if isinstance(value, str):
                try:
                    value = _PARSERS[key](value)
                except ValueError as ex:
                    raise ConfigError(f'Invalid {source} value for {key!r}: {ex}') from None
            setattr(self, key, value)
        self.validate()
        return self

    def validate(self):
        if not math.isfinite(self.sigma) or self.sigma < 0:
            raise ConfigError(f'sigma must be non-negative, got {self.sigma}')
        if any(not math.isfinite(s) or s < 0 for s in self.sigmas):
            raise ConfigError(f'sigmas must be non-negative, got {self.sigmas}')
        if self.repeats < 1 or self.workers < 1:
            raise ConfigError('repeats and workers must be at least 1')
        if self.delta_t < 2:
            raise ConfigError(f'delta_t must be at least 2 ms, got {self.delta_t}')
        if self.headroom is not None and (not math.isfinite(self.headroom) or self.headroom < 1):
            raise ConfigError(f'headroom must be at least 1, got {self.headroom}')

    def circuit(self) -> Circuit:
        """An empty circuit of the configured model, Δt and headroom."""
        return Circuit(self.delta_t, NeuronSpec.for_model(self.model), self.headroom)

    @classmethod
    def load(cls, path: Optional[str] = None, environ: Optional[Mapping[str, str]] = None,
             overrides: Optional[Mapping[str, object]] = None) -> RunConfig:
        config = cls()
        if path is not None:
            config.update(read_key_values(path), source=path)
        environ = os.environ if environ is None else environ
        env = {f.name: environ[ENV_PREFIX + f.name.upper()] for f in fields(cls)
               if ENV_PREFIX + f.name.upper() in environ}
        config.update(env, source='environment')
        config.update({key: value for key, value in (overrides or {}).items() if value is not None}, source='flag')
        return config


def load_scenario(config: RunConfig) -> Scenario:
    """Returns the built-in scenario or parses the scenario file named by `config.scenario`."""
    if config.scenario == BUILTIN_SCENARIO:
        return prime_scenario(config.code)
    try:
        with open(config.scenario) as file:
            text = file.read()
    except OSError as ex:
        raise ConfigError(f'Cannot read scenario {config.scenario}: {ex}') from None
    return parse_scenario(text, config.code)


@dataclass
class ScenarioResult:
    raster: Raster
    report: Report
    period: int
    duration: int


def simulate_scenario(scenario: Scenario, config: RunConfig, sigma: Optional[float] = None,
                      seed: Optional[int] = None) -> ScenarioResult:
    """Builds a pacemaker and a draft memory, presents `scenario` one transaction per cycle and checks the answers."""
    circuit = config.circuit()
    pacemaker = build_pacemaker(circuit, config.phases)
    build_draft_memory(circuit, pacemaker)
    apply_schedule(circuit, compile_stream(scenario.ops, scenario.scheme, pacemaker))
    duration = pacemaker.onset + (len(scenario) + 1) * pacemaker.period
    noise = NoiseConfig(config.sigma if sigma is None else sigma, config.seed if seed is None else seed)
    raster = run(circuit, duration, noise)
    timeline, _ = transaction_timeline(scenario.ops, scenario.scheme, pacemaker)
    report = compare_answers(raster, timeline, pacemaker.period)
    return ScenarioResult(raster, report, pacemaker.period, duration)


def _status(passed: bool) -> str:
    return (Fore.GREEN + 'PASS' if passed else Fore.RED + 'FAIL') + Fore.RESET


def print_report(report: Report):
    print(Style.DIM + 'index op expected observed result' + Style.NORMAL)
    for line in report.lines:
        print(f'{line.index} {line.op} {line.expected} {line.observed} {_status(line.passed)}')
    print(f'{len(report.lines) - len(report.mismatches)}/{len(report.lines)} transactions correct')


def cmd_run(config: RunConfig) -> int:
    """Simulates a scenario and writes the raster, plot and report.

    Returns:
        0 if every transaction matched the reference memory, 1 otherwise.
    """
    scenario = load_scenario(config)
    start = time.time()
    result = simulate_scenario(scenario, config)
    logger.info('Simulated %d ms in %.2f s', result.duration, time.time() - start)
    if config.out_raster:
        save_raster_csv(result.raster, config.out_raster)
    if config.out_svg:
        render_raster_svg(result.raster, config.out_svg,
                          f'{config.scenario} ({scenario.scheme.value}, sigma={config.sigma})')
    if config.report:
        write_text(config.report, result.report.format())
    print_report(result.report)
    return EXIT_OK if not result.report.mismatches else EXIT_MISMATCH


@dataclass
class TruthTableRow:
    """One simulated evaluation. `inputs` holds controls (most significant first) then data inputs."""
    inputs: Tuple[int, ...]
    expected: Tuple[int, ...]
    observed: Tuple[int, ...]
    on_phase: bool = True

    @property
    def passed(self) -> bool:
        return self.expected == self.observed and self.on_phase


@dataclass
class TruthTable:
    block: Block
    omega: int
    rows: List[TruthTableRow] = field(default_factory=list)

    @property
    def matches(self) -> int:
        return sum(row.passed for row in self.rows)

    def format(self) -> str:
        lines = [f'{self.block.value} omega={self.omega}']
        for row in self.rows:
            bits = ''.join(map(str, row.inputs))
            expected = ''.join(map(str, row.expected))
            observed = ''.join(map(str, row.observed))
            lines.append(f'{bits} {expected} {observed} {"PASS" if row.passed else "FAIL"}')
        lines.append(f'{self.matches}/{len(self.rows)} match')
        return '\n'.join(lines) + '\n'


def _observe(raster: Raster, label: str, start: int, period: int, phase_time: int) -> Tuple[int, bool]:
    """Returns whether `label` fired in the cycle and whether every spike fell on `phase_time`."""
    times = [t for t in raster.times(label) if start <= t < start + period]
    return int(bool(times)), all(t == phase_time for t in times)


def _controls(omega: int) -> List[Tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=omega))


def _simulate_table(block: Block, omega: int, config: RunConfig,
                    table: Optional[Sequence[int]] = None) -> List[TruthTableRow]:
    circuit = config.circuit()
    pacemaker = build_pacemaker(circuit, config.phases)
    if block is Block.DECODER:
        handle = build_decoder(circuit, pacemaker, omega)
        combos = [(s, (i,)) for s in _controls(omega) for i in (0, 1)]
        outputs, out_phase = [circuit.label(y) for y in handle.outputs], 2
        data_inputs = [handle.input]
    else:
        handle = build_selector(circuit, pacemaker, omega)
        if block is Block.GENERATOR:
            configure_function_generator(handle, table)
            combos = [(s, ()) for s in _controls(omega)]
        else:
            combos = [(s, i) for s in _controls(omega) for i in itertools.product((0, 1), repeat=2 ** omega)]
        outputs, out_phase = [circuit.label(handle.output)], 3
        data_inputs = handle.inputs

    for cycle, (s, i) in enumerate(combos):
        onset = pacemaker.phase_time(1, cycle)
        # S_i is bit i of the control word, s lists the most significant bit first
        drive(circuit, handle.controls, reversed(s), onset)
        drive(circuit, data_inputs, i, onset)
    raster = run(circuit, pacemaker.phase_time(1, len(combos)) + pacemaker.period)

    rows = []
    for cycle, (s, i) in enumerate(combos):
        onset = pacemaker.phase_time(1, cycle)
        observations = [_observe(raster, label, onset, pacemaker.period, pacemaker.phase_time(out_phase, cycle))
                        for label in outputs]
        if block is Block.DECODER:
            expected = decoder_truth(s, i[0])
        elif block is Block.GENERATOR:
            expected = (function_truth(table, s),)
        else:
            expected = (selector_truth(s, i),)
        rows.append(TruthTableRow(tuple(s) + tuple(i), expected, tuple(o for o, _ in observations),
                                  all(ok for _, ok in observations)))
    return rows


def truth_table(block: Block, omega: int = 2, config: Optional[RunConfig] = None) -> TruthTable:
    """Simulates every control and input combination of a block, one per pacemaker cycle.

    The model, Δt, headroom and phase count come from `config`. For `Block.GENERATOR` all `2**(2**omega)` functions
    are configured in turn and every row is prefixed with the function's table.
    """
    config = RunConfig() if config is None else config
    result = TruthTable(block, omega)
    if block is Block.GENERATOR:
        for table in itertools.product((0, 1), repeat=2 ** omega):
            for row in _simulate_table(block, omega, config, table):
                row.inputs = tuple(table) + row.inputs
                result.rows.append(row)
    else:
        result.rows = _simulate_table(block, omega, config)
    return result


def cmd_truthtable(block: Block, omega: int, config: RunConfig) -> int:
    table = truth_table(block, omega, config)
    text = table.format().splitlines()
    print(Style.DIM + text[0] + Style.NORMAL)
    for line in text[1:-1]:
        print(line.replace('PASS', _status(True)).replace('FAIL', _status(False)))
    print(text[-1])
    if config.report:
        write_text(config.report, table.format())
    return EXIT_OK if table.matches == len(table.rows) else EXIT_MISMATCH


@dataclass
class SweepRow:
    sigma: float
    pass_rate: float
    full_passes: int
    repeats: int


@dataclass
class SweepStats(Stats):
    """Outcome of a noise sweep, one row per σ in ascending order."""
    scenario: str
    code: str
    model: str
    rows: List[SweepRow]
    sigma_star: Optional[float]
    monotone: bool


def _sweep_task(args: Tuple[Scenario, RunConfig, float, int]) -> Tuple[float, int, float, int]:
    scenario, config, sigma, seed = args
    report = simulate_scenario(scenario, config, sigma, seed).report
    return sigma, seed, report.pass_rate, len(report.mismatches)


def noise_sweep(config: RunConfig, scenario: Optional[Scenario] = None) -> SweepStats:
    """Repeats a scenario `config.repeats` times per σ with seeds `config.seed`, `config.seed + 1`, …

    σ* is the largest σ whose repeats all pass. Degradation counts as monotone if no pass rate exceeds the one of a
    smaller σ by more than the sampling error of the repeats.
    """
    scenario = load_scenario(config) if scenario is None else scenario
    sigmas = sorted(set(config.sigmas))
    tasks = [(scenario, config, sigma, config.seed + r) for sigma in sigmas for r in range(config.repeats)]
    if config.workers > 1:
        with Pool(config.workers) as pool:
            results = pool.map(_sweep_task, tasks)
    else:
        results = [_sweep_task(task) for task in tasks]

    by_sigma: Dict[float, List[Tuple[float, int]]] = {sigma: [] for sigma in sigmas}
    for sigma, _, rate, mismatches in results:
        by_sigma[sigma].append((rate, mismatches))
    rows = [SweepRow(sigma, sum(rate for rate, _ in runs) / len(runs), sum(1 for _, m in runs if m == 0), len(runs))
            for sigma, runs in by_sigma.items()]
    passing = [row.sigma for row in rows if row.full_passes == row.repeats]
    tolerance = 0.5 / math.sqrt(config.repeats)
    monotone = all(later.pass_rate <= earlier.pass_rate + tolerance for earlier, later in zip(rows, rows[1:]))
    return SweepStats(config.scenario, scenario.scheme.value, config.model.value, rows,
                      max(passing) if passing else None, monotone)


def cmd_noise_sweep(config: RunConfig, out_json: Optional[str] = None) -> int:
    stats = noise_sweep(config)
    lines = ['sigma pass_rate full_passes']
    lines.extend(f'{row.sigma:g} {row.pass_rate:.3f} {row.full_passes}/{row.repeats}' for row in stats.rows)
    lines.append(f'sigma*: {stats.sigma_star if stats.sigma_star is not None else "none"}')
    lines.append(f'monotone: {"yes" if stats.monotone else "no"}')
    print(Style.DIM + lines[0] + Style.NORMAL)
    print('\n'.join(lines[1:]))
    if config.report:
        write_text(config.report, '\n'.join(lines) + '\n')
    if out_json:
        stats.save(out_json)
    return EXIT_OK if stats.rows and stats.rows[0].full_passes == stats.rows[0].repeats else EXIT_MISMATCH


def _circuit_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--log-level', default=None,
                        help='logging level, default from SPIKELOOM_LOG_LEVEL or WARNING')
    parser.add_argument('--config', help='key=value file with run settings')
    parser.add_argument('--model', choices=[m.value for m in NeuronModel])
    parser.add_argument('--phases', type=int, help='pacemaker phase count')
    parser.add_argument('--delta-t', type=int, help='base delay in ms')
    parser.add_argument('--headroom', type=float, help='theta as a multiple of the calibrated threshold current')
    parser.add_argument('--report', help='write the text report to this file')
    return parser


def _scenario_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--scenario', help=f'scenario file or "{BUILTIN_SCENARIO}"')
    parser.add_argument('--code', choices=[s.value for s in CodeScheme])
    parser.add_argument('--seed', type=int)
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _circuit_options()
    scenario = _scenario_options()

    parser = argparse.ArgumentParser(prog='spikeloom', description='Spiking assembly circuits with synaptic delays')
    commands = parser.add_subparsers(dest='command', required=True)

    run_parser = commands.add_parser('run', parents=[common, scenario], help='simulate a memory scenario')
    run_parser.add_argument('--sigma', type=float, help='noise as a fraction of theta')
    run_parser.add_argument('--out-raster', help='raster CSV file')
    run_parser.add_argument('--out-svg', help='raster plot SVG file')

    table_parser = commands.add_parser('truthtable', parents=[common], help='check a block against its truth table')
    table_parser.add_argument('--block', required=True, choices=[b.value for b in Block])
    table_parser.add_argument('--omega', type=int, default=2)

    sweep_parser = commands.add_parser('sweep', parents=[common, scenario], help='repeat a scenario under noise')
    sweep_parser.add_argument('--sigmas', help='comma separated noise levels')
    sweep_parser.add_argument('--repeats', type=int)
    sweep_parser.add_argument('--workers', type=int)
    sweep_parser.add_argument('--out-json', help='write the sweep table as JSON')
    return parser


_FLAG_KEYS = ('scenario', 'code', 'model', 'phases', 'delta_t', 'seed', 'headroom', 'report', 'sigma', 'out_raster',
              'out_svg', 'sigmas', 'repeats', 'workers')


def main(argv: Optional[Sequence[str]] = None, environ: Optional[Mapping[str, str]] = None) -> int:
    """Entry point of the command line. Returns the exit status."""
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)
    level = (args.log_level or environ.get(ENV_PREFIX + 'LOG_LEVEL') or 'WARNING').upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    colorama.init(autoreset=True)
    try:
        overrides = {key: getattr(args, key) for key in _FLAG_KEYS if hasattr(args, key)}
        config = RunConfig.load(args.config, environ, overrides)
        if args.command == 'truthtable':
            return cmd_truthtable(Block(args.block), args.omega, config)
        if args.command == 'run':
            return cmd_run(config)
        return cmd_noise_sweep(config, args.out_json)
    except SpikeloomError as ex:
        print(Fore.RED + f'error: {ex}' + Fore.RESET)
        return EXIT_ERROR
