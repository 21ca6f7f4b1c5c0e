import json
import math
from pathlib import Path

import pytest

import main
from src.errors import ConfigError, InvalidArgumentError
from src.workbench.config_loader import ExperimentConfig, default_workers
from src.workbench.output import SweepResult, config_from_preamble
from src.workbench.runners import RUNNERS, frequency_grid, run_experiment

CONFIGS = Path(__file__).resolve().parent.parent / 'configs'

DEVICE = {'f_m_ghz': 7.0, 'f_b_ghz': 6.0, 'eta_ghz': 0.2, 'g_m_ghz': 0.025, 'g_b_ghz': 0.025}


def _config(experiment, parameters=None, **top):
    data = {'experiment': experiment, 'device': dict(DEVICE)}
    if parameters is not None:
        data['parameters'] = parameters
    data.update(top)
    return ExperimentConfig.from_dict(data)


class TestConfig:
    def test_defaults_filled(self):
        cfg = _config('lz-estimate')
        assert cfg.parameters['sweep_rates_ghz_per_ns'] == [0.5]
        assert cfg.device['include_gd'] is False
        assert cfg.output == {'path': None, 'format': 'csv'}
        assert (cfg.seed, cfg.workers) == (0, default_workers())

    @pytest.mark.parametrize("data, key_path", [
        ({'experiment': 'lz-estimate', 'device': DEVICE, 'colour': 'blue'}, 'colour'),
        ({'experiment': 'lz-estimate', 'device': DEVICE, 'parameters': {'g': 1.0}}, 'parameters.g'),
        ({'experiment': 'lz-estimate', 'device': {'f_m_ghz': 7.0}}, 'device.f_b_ghz'),
        ({'experiment': 'lz-estimate', 'device': dict(DEVICE, g_m_ghz='25 MHz')}, 'device.g_m_ghz'),
        ({'experiment': 'lz-estimate', 'device': dict(DEVICE, include_gd=1)}, 'device.include_gd'),
        ({'experiment': 'lz-estimate', 'device': dict(DEVICE, eta_ghz=True)}, 'device.eta_ghz'),
        ({'experiment': 'lz-estimate', 'device': DEVICE, 'workers': 0}, 'workers'),
        ({'experiment': 'lz-estimate', 'device': DEVICE, 'output': {'format': 'xml'}}, 'output.format'),
        ({'experiment': 'lz-estimate', 'device': DEVICE,
          'parameters': {'sweep_rates_ghz_per_ns': [0.5, 'fast']}}, 'parameters.sweep_rates_ghz_per_ns[1]'),
        ({'experiment': 'teleport', 'device': DEVICE}, 'experiment'),
        ({'device': DEVICE}, 'experiment'),
    ])
    def test_rejections_name_the_key(self, data, key_path):
        with pytest.raises(ConfigError) as caught:
            ExperimentConfig.from_dict(data)
        assert caught.value.key_path == key_path

    def test_invalid_device_values(self):
        with pytest.raises(ConfigError) as caught:
            ExperimentConfig.from_dict({'experiment': 'lz-estimate', 'device': dict(DEVICE, f_m_ghz=5.0)})
        assert caught.value.key_path == 'device'

    def test_canonical_round_trip(self):
        cfg = _config('error-budget', {'n_ops_values': [1, 100]}, seed=3)
        again = ExperimentConfig.from_dict(json.loads(cfg.canonical_json()))
        assert again == cfg
        assert again.sha256() == cfg.sha256()
        assert _config('error-budget').sha256() != cfg.sha256()

    def test_worker_count_leaves_hash_alone(self):
        cfg = _config('error-budget')
        assert cfg.with_overrides(workers=3).sha256() == cfg.sha256()
        assert 'workers' not in json.loads(cfg.canonical_json())

    def test_overrides(self, tmp_path):
        cfg = _config('measurement').with_overrides(out=str(tmp_path / 'out.json'), fmt='json', workers=2)
        assert cfg.output == {'path': str(tmp_path / 'out.json'), 'format': 'json'}
        assert cfg.workers == 2
        with pytest.raises(ConfigError):
            cfg.with_overrides(workers=0)

    def test_shipped_configs_parse(self):
        for path in sorted(CONFIGS.glob('*.json')):
            cfg = ExperimentConfig.load(str(path))
            assert cfg.experiment in RUNNERS

    def test_load_errors(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.load(str(tmp_path / 'missing.json'))
        broken = tmp_path / 'broken.json'
        broken.write_text('{"experiment": ')
        with pytest.raises(ConfigError):
            ExperimentConfig.load(str(broken))


class TestFrequencyGrid:
    def test_default_grid(self):
        grid = frequency_grid(_config('spectrum'))
        assert len(grid) == 81
        assert (grid[0], grid[-1]) == (6.1, 6.9)

    @pytest.mark.parametrize("parameters, key_path", [
        ({'f_q_step_ghz': 0.0}, 'parameters.f_q_step_ghz'),
        ({'f_q_start_ghz': 6.0}, 'parameters.f_q_start_ghz'),
        ({'f_q_stop_ghz': 7.2}, 'parameters.f_q_stop_ghz'),
        ({'f_q_start_ghz': 6.8, 'f_q_stop_ghz': 6.2}, 'parameters.f_q_stop_ghz'),
    ])
    def test_rejects(self, parameters, key_path):
        with pytest.raises(ConfigError) as caught:
            frequency_grid(_config('spectrum', parameters))
        assert caught.value.key_path == key_path


class TestOutput:
    def test_row_width_checked(self):
        result = SweepResult(_config('lz-estimate'), ['a', 'b'])
        with pytest.raises(InvalidArgumentError):
            result.add_row([1.0])

    def test_reproducible_csv(self):
        result = SweepResult(_config('lz-estimate'), ['a', 'b'], summary={'best': 0.5})
        result.add_row([1.0, math.nan])
        text = result.to_csv(reproducible=True)
        assert text == result.to_csv(reproducible=True)
        assert '# generated' not in text
        assert text.splitlines()[-1] == '1,nan'
        assert '# generated' in result.to_csv()

    def test_preamble_carries_config(self):
        cfg = _config('error-budget', {'n_qubits_values': [2]}, seed=9)
        text = SweepResult(cfg, ['a']).to_csv(reproducible=True)
        assert config_from_preamble(text) == cfg
        with pytest.raises(InvalidArgumentError):
            config_from_preamble('a,b\n1,2\n')

    def test_json_nan_is_null(self):
        result = SweepResult(_config('lz-estimate'), ['a'])
        result.add_row([math.nan])
        document = json.loads(result.to_json(reproducible=True))
        assert document['columns']['a'] == [None]
        assert document['metadata']['config_sha256'] == result.config.sha256()

    def test_write_with_records(self, tmp_path):
        path = tmp_path / 'move.csv'
        result = SweepResult(_config('lz-estimate'), ['a'], records={'design': 'family = erf\n'})
        result.add_row([1])
        assert result.write(str(path)) is None
        assert path.read_text().endswith('a\n1\n')
        assert (tmp_path / 'move.csv.design.txt').read_text() == 'family = erf\n'


class TestRunners:
    def test_lz_estimate(self):
        result = run_experiment(_config('lz-estimate'))
        assert len(result.rows) == 1
        assert result.column('lz_qubit_qubit')[0] == pytest.approx(1.234e-4, rel=1e-3)
        assert result.column('lz_qubit_memory')[0] < result.column('lz_qubit_qubit')[0]
        assert 0.5 <= result.column('oracle_ratio')[0] <= 2.0

    def test_lz_rejects_bad_rate(self):
        with pytest.raises(ConfigError) as caught:
            run_experiment(_config('lz-estimate', {'sweep_rates_ghz_per_ns': [0.5, -1.0]}))
        assert caught.value.key_path == 'parameters.sweep_rates_ghz_per_ns[1]'

    def test_error_budget(self):
        result = run_experiment(_config('error-budget'))
        assert len(result.rows) == 8
        first = dict(zip(result.columns, result.rows[0]))
        assert (first['n_qubits'], first['n_ops']) == (1, 1)
        assert first['idle_rezqu'] == pytest.approx(2.5e-9, rel=1e-9)
        assert first['ratio_rezqu_conventional'] == pytest.approx(6.25e-6, rel=1e-9)

    def test_spectrum(self):
        result = run_experiment(_config('spectrum', {'f_q_start_ghz': 6.4, 'f_q_stop_ghz': 6.6,
                                                     'f_q_step_ghz': 0.1}))
        assert result.column('f_q_ghz') == [6.4, 6.5, 6.6]
        assert len(result.columns) == 11
        assert result.column('e_100_ghz')[1] == pytest.approx(7.00125, abs=1e-5)
        assert result.column('e_000_ghz') == [0.0, 0.0, 0.0]

    def test_spectrum_keeps_labeled_blocks_at_degeneracy(self):
        result = run_experiment(_config('spectrum', {'f_q_start_ghz': 6.1, 'f_q_stop_ghz': 6.1}))
        row = dict(zip(result.columns, result.rows[0]))
        assert row['e_000_ghz'] == 0.0
        assert all(math.isfinite(row[f'e_{name}_ghz']) for name in ('100', '010', '001'))
        assert math.isnan(row['e_020_ghz'])
        assert math.isnan(row['e_002_ghz'])

    def test_idling_sweep_columns(self):
        result = run_experiment(_config('idling-sweep', {'f_q_start_ghz': 6.5, 'f_q_stop_ghz': 6.5,
                                                         'g_values_ghz': [0.025]}))
        assert len(result.rows) == 1
        row = dict(zip(result.columns, result.rows[0]))
        assert row['omega_zz_4th_mhz'] == 0.0
        assert abs(row['omega_zz_exact_nogd_mhz']) < 1e-4

    def test_tail_sweep(self):
        result = run_experiment(_config('tail-sweep', {'sigma_values_ns': [0.35, 1.0]}))
        narrow, wide = result.column('tail_error_ramp')
        assert wide < narrow

    @pytest.mark.slow
    def test_tail_sweep_tracks_optimized_move(self):
        result = run_experiment(_config('tail-sweep', {'sigma_values_ns': [0.35, 0.5], 'include_move_error': True}))
        for optimized, tail in zip(result.column('move_error_two_param'), result.column('tail_error_design')):
            assert tail / 3 <= optimized <= 3 * tail
            assert optimized < 1e-4

    def test_measurement(self):
        result = run_experiment(_config('measurement', {'t_meas_ns': 2.0, 'sample_ns': 0.5}))
        assert result.columns == ['t_ns', 'alpha2_bare', 'beta2_bare', 'alpha2_eigen', 'beta2_eigen']
        assert len(result.rows) == 5
        assert result.rows[0][2] == pytest.approx(1.0)
        assert 'ratio_closed' in result.summary

    def test_measurement_rejects_rate(self):
        with pytest.raises(ConfigError):
            run_experiment(_config('measurement', {'gamma_per_ns': 0.0}))

    def test_move_rejects_family(self):
        with pytest.raises(ConfigError) as caught:
            run_experiment(_config('move-analytic', {'family': 'gaussian'}))
        assert caught.value.key_path == 'parameters.family'

    def test_move_rejects_mode(self):
        with pytest.raises(ConfigError) as caught:
            run_experiment(_config('move-optimize', {'mode': 'analytic'}))
        assert caught.value.key_path == 'parameters.mode'


class TestCommandLine:
    def test_writes_to_stdout(self, capsys):
        path = str(CONFIGS / 'error_budget.json')
        assert main.main(['error-budget', '--config', path, '--reproducible', '--quiet']) == main.EXIT_OK
        first = capsys.readouterr().out
        assert first.startswith('# tool: rezqu-workbench')
        assert main.main(['error-budget', '--config', path, '--reproducible', '--quiet']) == main.EXIT_OK
        assert capsys.readouterr().out == first

    def test_writes_file(self, tmp_path):
        out = tmp_path / 'lz.json'
        code = main.main(['lz-estimate', '--config', str(CONFIGS / 'lz_estimate.json'),
                          '--out', str(out), '--format', 'json', '--quiet'])
        assert code == main.EXIT_OK
        document = json.loads(out.read_text())
        assert document['column_order'][0] == 'sweep_rate_ghz_per_ns'
        assert len(document['columns']['lz_qubit_qubit']) == 3

    def test_wrong_experiment(self, capsys):
        code = main.main(['spectrum', '--config', str(CONFIGS / 'lz_estimate.json'), '--quiet'])
        assert code == main.EXIT_CONFIG
        assert capsys.readouterr().out == ''

    def test_missing_file(self, tmp_path):
        assert main.main(['measurement', '--config', str(tmp_path / 'none.json'), '--quiet']) == main.EXIT_CONFIG

    def test_invalid_worker_count(self):
        code = main.main(['error-budget', '--config', str(CONFIGS / 'error_budget.json'),
                          '--workers', '0', '--quiet'])
        assert code == main.EXIT_CONFIG
