# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

"""Unit tests for `spikeloom.cli`"""

import os
import unittest

import pytest

from spikeloom.cli import (EXIT_ERROR, EXIT_MISMATCH, EXIT_OK, RunConfig,
                           build_parser, load_scenario, main, noise_sweep,
                           simulate_scenario, truth_table)
from spikeloom.enums import Block, CodeScheme, NeuronModel
from spikeloom.exceptions import BuildError, ConfigError, ScenarioParseError
from spikeloom.stream import Scenario, StreamOp, prime_scenario
from spikeloom.utils import Stats

SHORT_SCENARIO = Scenario(CodeScheme.BINARY, [StreamOp.store(5, True), StreamOp.store(6, False), StreamOp.retrieve(5),
                                              StreamOp.retrieve(6), StreamOp.retrieve(5)])


class TestRunConfig(unittest.TestCase):
    """Test case for `spikeloom.cli.RunConfig`."""

    def test_defaults(self):
        """Test the defaults of `spikeloom.cli.RunConfig`"""
        config = RunConfig.load(environ={})
        self.assertEqual(config.scenario, 'primes')
        self.assertIs(config.model, NeuronModel.LIF)
        self.assertEqual((config.phases, config.delta_t, config.sigma, config.seed), (5, 20, 0.0, 0))

    def test_circuit(self):
        """Test that `spikeloom.cli.RunConfig.circuit` applies model, Δt and headroom"""
        self.assertEqual(RunConfig().circuit().headroom, 1.2)
        circuit = RunConfig(model=NeuronModel.SM, delta_t=25).circuit()
        self.assertEqual((circuit.headroom, circuit.delta_t), (1.05, 25))
        self.assertIs(circuit.default_spec.model, NeuronModel.SM)
        self.assertEqual(RunConfig(headroom=1.5).circuit().headroom, 1.5)

    def test_update(self):
        """Test that `spikeloom.cli.RunConfig.update` parses strings"""
        config = RunConfig().update({'code': 'Gray', 'delta-t': '25', 'sigmas': '0, 0.5', 'out_svg': ''})
        self.assertIs(config.code, CodeScheme.GRAY)
        self.assertEqual(config.delta_t, 25)
        self.assertEqual(config.sigmas, (0.0, 0.5))
        self.assertIsNone(config.out_svg)

    def test_errors(self):
        """Test that invalid settings raise `spikeloom.exceptions.ConfigError`"""
        self.assertRaises(ConfigError, lambda: RunConfig().update({'colour': 'red'}))
        self.assertRaises(ConfigError, lambda: RunConfig().update({'phases': 'five'}))
        self.assertRaises(ConfigError, lambda: RunConfig().update({'code': 'hex'}))
        self.assertRaises(ConfigError, lambda: RunConfig().update({'sigma': '-0.1'}))
        self.assertRaises(ConfigError, lambda: RunConfig().update({'repeats': '0'}))
        self.assertRaises(ConfigError, lambda: RunConfig().update({'delta_t': '1'}))
        self.assertRaises(ConfigError, lambda: RunConfig().update({'headroom': '0.9'}))
        self.assertRaises(ConfigError, lambda: RunConfig().update({'headroom': 'nan'}))
        self.assertRaises(ConfigError, lambda: RunConfig.load('/nonexistent/spikeloom.cfg', {}))


def test_config_precedence(tmp_path):
    """Test that flags override the environment, which overrides the config file"""
    path = tmp_path / 'run.cfg'
    path.write_text('# settings\nphases = 4\nsigma = 0.1\ncode = gray\n')
    environ = {'SPIKELOOM_PHASES': '6', 'SPIKELOOM_SEED': '3'}
    config = RunConfig.load(str(path), environ, {'phases': 7, 'seed': None})
    assert config.phases == 7
    assert config.seed == 3
    assert config.sigma == 0.1
    assert config.code is CodeScheme.GRAY
    assert RunConfig.load(str(path), environ).phases == 6


def test_load_scenario(tmp_path):
    """Test `spikeloom.cli.load_scenario`"""
    assert load_scenario(RunConfig(code=CodeScheme.GRAY)) == prime_scenario(CodeScheme.GRAY)
    path = tmp_path / 'short.txt'
    path.write_text('STORE 1 NONPRIME\nRETRIEVE 1\n')
    assert len(load_scenario(RunConfig(scenario=str(path)))) == 2
    path.write_text('STORE 1\n')
    with pytest.raises(ScenarioParseError):
        load_scenario(RunConfig(scenario=str(path)))
    with pytest.raises(ConfigError):
        load_scenario(RunConfig(scenario=str(tmp_path / 'missing.txt')))


class TestTruthTables(unittest.TestCase):
    """Test case for `spikeloom.cli.truth_table`."""

    def test_selector(self):
        """Test that the selector matches all 64 rows"""
        table = truth_table(Block.SELECTOR, 2)
        self.assertEqual(len(table.rows), 64)
        self.assertEqual(table.matches, 64)

    def test_decoder(self):
        """Test that the decoder matches all 8 rows"""
        table = truth_table(Block.DECODER, 2)
        self.assertEqual((len(table.rows), table.matches), (8, 8))
        self.assertTrue(table.format().endswith('8/8 match\n'))

    def test_small_blocks(self):
        """Test single-control blocks"""
        self.assertEqual(truth_table(Block.DECODER, 1).matches, 4)
        self.assertEqual(truth_table(Block.SELECTOR, 1).matches, 8)

    def test_generator(self):
        """Test that all sixteen two-input functions evaluate correctly"""
        table = truth_table(Block.GENERATOR, 2)
        self.assertEqual((len(table.rows), table.matches), (64, 64))
        self.assertEqual(table.rows[5].inputs, (0, 0, 0, 1, 0, 1))

    def test_config(self):
        """Test that truth tables run on the configured pacemaker"""
        table = truth_table(Block.DECODER, 1, RunConfig(phases=4, delta_t=25))
        self.assertEqual((len(table.rows), table.matches), (4, 4))
        self.assertRaises(BuildError, lambda: truth_table(Block.SELECTOR, 3, RunConfig(model=NeuronModel.SM)))


class TestScenarios(unittest.TestCase):
    """Test case for `spikeloom.cli.simulate_scenario`."""

    def test_prime_scenario(self):
        """Test that every transaction of the prime scenario passes in both codes"""
        for scheme in CodeScheme:
            result = simulate_scenario(prime_scenario(scheme), RunConfig())
            self.assertEqual(len(result.report.lines), 29)
            self.assertEqual(result.report.mismatches, [], scheme)

    def test_duration(self):
        """Test that the run covers one extra cycle after the last transaction"""
        result = simulate_scenario(SHORT_SCENARIO, RunConfig())
        self.assertEqual(result.period, 100)
        self.assertEqual(result.duration, 1 + 6 * 100)

    def test_strong_noise(self):
        """Test that noise of the order of θ breaks the memory"""
        result = simulate_scenario(prime_scenario(), RunConfig(), sigma=1.0, seed=1)
        self.assertLess(result.report.pass_rate, 1.0)


class TestNoiseSweep(unittest.TestCase):
    """Test case for `spikeloom.cli.noise_sweep`."""

    def test_sweep(self):
        """Test the sweep table, σ* and monotonicity"""
        stats = noise_sweep(RunConfig(sigmas=(1.0, 0.0, 0.01), repeats=2), SHORT_SCENARIO)
        self.assertEqual([row.sigma for row in stats.rows], [0.0, 0.01, 1.0])
        self.assertEqual(stats.rows[0].pass_rate, 1.0)
        self.assertEqual(stats.rows[1].full_passes, 2)
        self.assertLess(stats.rows[2].pass_rate, 1.0)
        self.assertEqual(stats.sigma_star, 0.01)
        self.assertTrue(stats.monotone)

    def test_prime_sweep(self):
        """Test the prime scenario over the default noise levels with ten seeds each"""
        stats = noise_sweep(RunConfig(sigmas=(0.0, 0.01, 0.02, 0.05, 0.1), repeats=10))
        self.assertEqual([row.repeats for row in stats.rows], [10] * 5)
        self.assertEqual(stats.rows[0].pass_rate, 1.0)
        self.assertGreater(stats.sigma_star, 0)
        self.assertTrue(stats.monotone)

    def test_workers(self):
        """Test that a worker pool gives the same rows as a serial sweep"""
        config = RunConfig(sigmas=(0.0, 0.5), repeats=2)
        serial = noise_sweep(config, SHORT_SCENARIO)
        config.workers = 2
        self.assertEqual(noise_sweep(config, SHORT_SCENARIO).rows, serial.rows)


def test_main_run(tmp_path, capsys):
    """Test `spikeloom.cli.main` with output files"""
    scenario = tmp_path / 'short.txt'
    scenario.write_text('CODE GRAY\nSTORE 2 PRIME\nRETRIEVE 2\nRETRIEVE 4\n')
    raster, svg, report = (str(tmp_path / name) for name in ('raster.csv', 'raster.svg', 'report.txt'))
    status = main(['run', '--scenario', str(scenario), '--out-raster', raster, '--out-svg', svg, '--report', report],
                  environ={})
    assert status == EXIT_OK
    assert 'PASS' in capsys.readouterr().out
    assert os.path.getsize(svg) > 0
    with open(raster) as file:
        assert file.readline().strip() == 'time_ms,neuron_id,label'
    with open(report) as file:
        assert file.read() == '0 STORE 2 PRIME none none PASS\n1 RETRIEVE 2 Pi Pi PASS\n2 RETRIEVE 4 none none PASS\n'


def test_main_exit_codes(tmp_path):
    """Test the exit codes of `spikeloom.cli.main`"""
    empty = tmp_path / 'empty.txt'
    empty.write_text('# nothing to do\n')
    assert main(['run', '--scenario', str(empty)], environ={}) == EXIT_OK
    assert main(['run', '--sigma', '1.0', '--seed', '1'], environ={}) == EXIT_MISMATCH
    assert main(['run', '--scenario', str(tmp_path / 'missing.txt')], environ={}) == EXIT_ERROR
    assert main(['run', '--sigma', '-1'], environ={}) == EXIT_ERROR
    assert main(['truthtable', '--block', 'decoder'], environ={}) == EXIT_OK
    assert main(['truthtable', '--block', 'selector', '--omega', '4'], environ={}) == EXIT_ERROR
    assert main(['run', '--model', 'sm'], environ={}) == EXIT_ERROR


def test_main_truthtable_settings(tmp_path):
    """Test that truth tables read the config file, the environment and the circuit flags"""
    path = tmp_path / 'run.cfg'
    path.write_text('phases = 4\n')
    report = tmp_path / 'table.txt'
    args = ['truthtable', '--block', 'decoder', '--omega', '1', '--config', str(path), '--report', str(report)]
    assert main(args, environ={}) == EXIT_OK
    assert report.read_text().endswith('4/4 match\n')
    assert main(['truthtable', '--block', 'decoder'], environ={'SPIKELOOM_PHASES': '1'}) == EXIT_ERROR
    assert main(['truthtable', '--block', 'decoder', '--headroom', '0.5'], environ={}) == EXIT_ERROR
    assert main(['truthtable', '--block', 'selector', '--omega', '3', '--model', 'sm'], environ={}) == EXIT_ERROR


def test_main_sweep(tmp_path):
    """Test the sweep command and its JSON output"""
    scenario = tmp_path / 'short.txt'
    scenario.write_text('STORE 3 PRIME\nRETRIEVE 3\n')
    out = str(tmp_path / 'sweep.json')
    status = main(['sweep', '--scenario', str(scenario), '--sigmas', '0,0.01', '--repeats', '2', '--out-json', out],
                  environ={'SPIKELOOM_LOG_LEVEL': 'info'})
    assert status == EXIT_OK
    stats = Stats.load_dict(out)
    assert [row['sigma'] for row in stats['rows']] == [0.0, 0.01]
    assert stats['sigma_star'] == 0.01


def test_parser():
    """Test `spikeloom.cli.build_parser`"""
    args = build_parser().parse_args(['sweep', '--sigmas', '0,0.1', '--workers', '3', '--delta-t', '25'])
    assert (args.command, args.sigmas, args.workers, args.delta_t) == ('sweep', '0,0.1', 3, 25)
    with pytest.raises(SystemExit):
        build_parser().parse_args(['run', '--code', 'hex'])


if __name__ == '__main__':
    unittest.main()
