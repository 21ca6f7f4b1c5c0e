"""Strict experiment configuration: unit-suffixed keys, per-experiment defaults."""

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from ..errors import ConfigError, InvalidArgumentError
from ..hamiltonian.system import DeviceParams

EXPERIMENTS = (
    'spectrum', 'idling-sweep', 'move-analytic', 'move-optimize',
    'tail-sweep', 'lz-estimate', 'measurement', 'error-budget',
)
FORMATS = ('csv', 'json')

REQUIRED = object()


def default_workers() -> int:
    return os.cpu_count() or 1


# key: (kind, default); kinds are float, int, bool, str, floats (list of float), ints
DEVICE_SCHEMA = {
    'f_m_ghz': ('float', REQUIRED),
    'f_b_ghz': ('float', REQUIRED),
    'eta_ghz': ('float', REQUIRED),
    'g_m_ghz': ('float', REQUIRED),
    'g_b_ghz': ('float', REQUIRED),
    'include_gd': ('bool', False),
}

_FREQUENCY_GRID = {
    'f_q_start_ghz': ('float', 6.1),
    'f_q_stop_ghz': ('float', 6.9),
    'f_q_step_ghz': ('float', 0.01),
}

_MOVE = {
    'family': ('str', 'piecewise-linear'),
    'direction': ('str', 'qubit->memory'),
    'f_q_start_ghz': ('float', 6.7),
    'f_q_end_ghz': ('float', 6.5),
    'sigma_ns': ('float', 1.0),
    'dt_ns': ('float', 1e-3),
    'sample_ns': ('float', 0.05),
}

PARAMETER_SCHEMAS = {
    'spectrum': dict(_FREQUENCY_GRID),
    'idling-sweep': dict(_FREQUENCY_GRID, g_values_ghz=('floats', [0.025, 0.05])),
    'move-analytic': dict(_MOVE),
    'move-optimize': dict(_MOVE, mode=('str', 'four_param'), n_starts=('int', 5)),
    'tail-sweep': {
        'sigma_values_ns': ('floats', [0.35, 0.45, 0.6, 0.8, 1.0, 1.2, 1.5]),
        'f_q_start_ghz': ('float', 6.5),
        'f_q_end_ghz': ('float', 6.5),
        'margin_sigmas': ('float', 3.0),
        'include_move_error': ('bool', False),
        'n_starts': ('int', 5),
        'dt_ns': ('float', 1e-3),
    },
    'lz-estimate': {
        'g_ghz': ('float', 0.025),
        'delta_b_ghz': ('float', 0.5),
        'sweep_rates_ghz_per_ns': ('floats', [0.5]),
        'half_window_ns': ('float', 20.0),
        'delta_mk_ghz': ('float', 0.5),
    },
    'measurement': {
        'f_q_ghz': ('float', 6.5),
        'gamma_per_ns': ('float', 1.0),
        't_meas_ns': ('float', 40.0),
        'sample_ns': ('float', 0.05),
    },
    'error-budget': {
        'g_ghz': ('float', 0.025),
        'delta_ghz': ('float', 0.5),
        'sweep_rate_ghz_per_ns': ('float', 0.5),
        'n_qubits_values': ('ints', [1, 2, 4, 8]),
        'n_ops_values': ('ints', [1, 10]),
    },
}

OUTPUT_SCHEMA = {
    'path': ('path', None),
    'format': ('str', 'csv'),
}

TOP_LEVEL = ('experiment', 'device', 'parameters', 'output', 'seed', 'workers')


def _coerce(kind: str, value: Any, key_path: str):
    if kind == 'float':
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key_path, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(key_path, "must be finite")
        return float(value)
    if kind == 'int':
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key_path, f"expected an integer, got {value!r}")
        return value
    if kind == 'bool':
        if not isinstance(value, bool):
            raise ConfigError(key_path, f"expected true or false, got {value!r}")
        return value
    if kind == 'str':
        if not isinstance(value, str):
            raise ConfigError(key_path, f"expected a string, got {value!r}")
        return value
    if kind == 'path':
        if value is not None and not isinstance(value, str):
            raise ConfigError(key_path, f"expected a path string or null, got {value!r}")
        return value
    if kind in ('floats', 'ints'):
        if not isinstance(value, list) or not value:
            raise ConfigError(key_path, "expected a non-empty list")
        item_kind = kind[:-1]
        return [_coerce(item_kind, item, f"{key_path}[{i}]") for i, item in enumerate(value)]
    raise ConfigError(key_path, f"unknown kind {kind}")


def parse_section(data: Any, schema: Dict[str, tuple], prefix: str) -> Dict[str, Any]:
    """Validate one mapping against its schema; fills defaults and rejects unknown keys."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(prefix, "expected an object")
    unknown = sorted(set(data) - set(schema))
    if unknown:
        raise ConfigError(f"{prefix}.{unknown[0]}", "unknown key")
    section = {}
    for key, (kind, default) in schema.items():
        key_path = f"{prefix}.{key}"
        if key in data:
            section[key] = _coerce(kind, data[key], key_path)
        elif default is REQUIRED:
            raise ConfigError(key_path, "missing required key")
        else:
            section[key] = list(default) if isinstance(default, list) else default
    return section


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    device: Dict[str, Any]
    parameters: Dict[str, Any]
    output: Dict[str, Any] = field(default_factory=lambda: {'path': None, 'format': 'csv'})
    seed: int = 0
    workers: int = field(default_factory=default_workers)

    @classmethod
    def from_dict(cls, data: Any) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError('', "configuration must be a JSON object")
        unknown = sorted(set(data) - set(TOP_LEVEL))
        if unknown:
            raise ConfigError(unknown[0], "unknown key")
        if 'experiment' not in data:
            raise ConfigError('experiment', "missing required key")
        experiment = data['experiment']
        if experiment not in EXPERIMENTS:
            raise ConfigError('experiment', f"must be one of {list(EXPERIMENTS)}, got {experiment!r}")
        if 'device' not in data:
            raise ConfigError('device', "missing required key")
        device = parse_section(data['device'], DEVICE_SCHEMA, 'device')
        parameters = parse_section(data.get('parameters'), PARAMETER_SCHEMAS[experiment], 'parameters')
        output = parse_section(data.get('output'), OUTPUT_SCHEMA, 'output')
        if output['format'] not in FORMATS:
            raise ConfigError('output.format', f"must be one of {list(FORMATS)}")
        seed = _coerce('int', data.get('seed', 0), 'seed')
        workers = _coerce('int', data.get('workers', default_workers()), 'workers')
        if workers < 1:
            raise ConfigError('workers', "must be at least 1")
        config = cls(experiment, device, parameters, output, seed, workers)
        config.device_params()
        return config

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                data = json.load(handle)
        except FileNotFoundError:
            raise ConfigError('', f"config file not found: {path}") from None
        except json.JSONDecodeError as error:
            raise ConfigError('', f"invalid JSON in {path}: {error}") from None
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        """Canonical form with every default filled in."""
        return {
            'experiment': self.experiment,
            'device': dict(self.device),
            'parameters': dict(self.parameters),
            'output': dict(self.output),
            'seed': self.seed,
            'workers': self.workers,
        }

    def canonical_json(self) -> str:
        """Sorted compact JSON of the result-determining settings (all but the worker count)."""
        data = self.to_dict()
        del data['workers']
        return json.dumps(data, sort_keys=True, separators=(',', ':'))

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode('utf-8')).hexdigest()

    def with_overrides(self, out: Optional[str] = None, fmt: Optional[str] = None,
                       seed: Optional[int] = None, workers: Optional[int] = None) -> "ExperimentConfig":
        data = self.to_dict()
        if out is not None:
            data['output']['path'] = out
        if fmt is not None:
            data['output']['format'] = fmt
        if seed is not None:
            data['seed'] = seed
        if workers is not None:
            data['workers'] = workers
        return ExperimentConfig.from_dict(data)

    def device_params(self, **changes) -> DeviceParams:
        values = dict(
            f_m=self.device['f_m_ghz'],
            f_b=self.device['f_b_ghz'],
            eta=self.device['eta_ghz'],
            g_m=self.device['g_m_ghz'],
            g_b=self.device['g_b_ghz'],
            include_gd=self.device['include_gd'],
        )
        values.update(changes)
        try:
            return DeviceParams(**values)
        except InvalidArgumentError as error:
            raise ConfigError('device', str(error)) from None
