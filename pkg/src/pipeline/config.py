"""
Configuration management for the surgery pipeline.

Provides:
- Default CONFIG sections, read once from config_example.json
- Overrides from JSON/YAML files and from command-line flags, merged section
  by section and revalidated after every change
- Accessors that turn CONFIG sections into the typed parameters the
  library expects (Fractions, caps tuples, Novikov settings)
"""

import copy
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from Pyfloer import novikov
from utils.validation import REQUIRED_SECTIONS, ValidationError, validate_config

# sections whose values are free-form mappings rather than fixed keys
OPEN_KEYS = {("SURGERY", "sign_flags")}


class ConfigError(Exception):
    """Configuration file missing, unreadable or out of range."""


def _default_config_path() -> Path:
    path = Path(__file__).parent.parent.parent / 'config_example.json'
    return path if path.exists() else Path.cwd() / 'config_example.json'


def _load_default_config() -> Dict[str, Any]:
    path = _default_config_path()
    if not path.exists():
        raise ConfigError(f"Default config file not found: {path}")
    with open(path) as f:
        return json.load(f)


DEFAULT_CONFIG: Dict[str, Any] = _load_default_config()


def _read_mapping(path: Path) -> Dict[str, Any]:
    readers = {'.json': json.load, '.yaml': yaml.safe_load, '.yml': yaml.safe_load}
    if path.suffix not in readers:
        raise ConfigError(f"Unsupported config format '{path.suffix}' (use .json, .yaml or .yml)")
    with open(path) as f:
        try:
            data = readers[path.suffix](f)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ConfigError(f"Cannot parse {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} does not hold a mapping")
    return data


class ConfigManager:
    """
    Pipeline configuration: the defaults with overrides merged on top.

    Overrides must name known sections and keys (sign_flags excepted), so a
    misspelled key fails loudly instead of being ignored.
    """

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = copy.deepcopy(DEFAULT_CONFIG)
        if config:
            self.update(config)
        else:
            self.validate()

    def _merge(self, overrides: Dict[str, Any]) -> None:
        for section, values in overrides.items():
            if section not in self.config:
                raise ConfigError(f"Unknown config section '{section}', expected one of {REQUIRED_SECTIONS}")
            if not isinstance(values, dict):
                raise ConfigError(f"Config section '{section}' must be a mapping")
            for key, value in values.items():
                if key not in self.config[section]:
                    raise ConfigError(f"Unknown config key '{section}.{key}'")
                if (section, key) in OPEN_KEYS and isinstance(value, dict):
                    self.config[section][key] = {**self.config[section][key], **value}
                else:
                    self.config[section][key] = copy.deepcopy(value)

    def validate(self) -> None:
        try:
            validate_config(self.config)
        except (ValidationError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid configuration: {e}")

    def update(self, overrides: Dict[str, Any]) -> None:
        """
        Merge overrides (file contents or command-line flags) and revalidate.
        A rejected update leaves the configuration unchanged.
        """
        previous = copy.deepcopy(self.config)
        try:
            self._merge(overrides)
            self.validate()
        except ConfigError:
            self.config = previous
            raise

    def get(self, dotted: str, default: Any = None) -> Any:
        """Value at 'SECTION' or 'SECTION.key'."""
        node: Any = self.config
        for part in dotted.split('.'):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def set(self, dotted: str, value: Any) -> None:
        section, _, key = dotted.partition('.')
        if not key:
            raise ConfigError(f"set() needs 'SECTION.key', got '{dotted}'")
        self.update({section: {key: value}})

    def to_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.config)

    def save(self, path: Path) -> None:
        """Write the configuration; the suffix (.json, .yaml, .yml) selects the format."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w') as f:
            if path.suffix == '.json':
                json.dump(self.config, f, indent=2)
            elif path.suffix in ('.yaml', '.yml'):
                yaml.safe_dump(self.config, f, default_flow_style=False, sort_keys=False)
            else:
                raise ConfigError(f"Unsupported config format '{path.suffix}'")

    @classmethod
    def from_file(cls, path: Path) -> 'ConfigManager':
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Config file not found: {path}")
        return cls(_read_mapping(path))



def get_novikov_params(config: Dict[str, Any]) -> Dict[str, Any]:
    nov = config['NOVIKOV']
    return {
        'zero_tol': float(nov['zero_tol']),
        'default_precision': Fraction(str(nov['default_precision'])),
        'log_branch': int(nov['log_branch']),
    }


def apply_novikov_settings(config: Dict[str, Any]) -> None:
    """Push the NOVIKOV section into the module settings of Pyfloer.novikov."""
    novikov.configure(**get_novikov_params(config))


def get_truncation(config: Dict[str, Any]) -> Any:
    return novikov.parse_truncation(config['TRUNCATION']['order'])


def get_surgery_params(config: Dict[str, Any]) -> Dict[str, Any]:
    sg = config['SURGERY']
    caps: Tuple[int, int] = tuple(int(c) for c in sg['caps'])
    return {
        'caps': caps,
        'sign_flags': dict(sg.get('sign_flags', {})),
        'example_mode': bool(sg.get('example_mode', False)),
        'local_system_form': sg.get('local_system_form'),
    }


def get_verification_params(config: Dict[str, Any]) -> Dict[str, Any]:
    vf = config['VERIFICATION']
    return {
        'tolerance': float(vf['tolerance']),
        'safety_gap': Fraction(str(vf['safety_gap'])),
        'n_random': int(vf['n_random']),
        'n_gauge': int(vf['n_gauge']),
        'seed': int(vf['seed']),
    }


def print_config(config: Dict[str, Any]) -> None:
    """Print configuration in readable format."""
    from utils.logging import print_header, print_section

    print_header("PIPELINE CONFIGURATION")

    print_section("Novikov field")
    for key, value in get_novikov_params(config).items():
        print(f"  {key}: {value}")
    print(f"  truncation: {config['TRUNCATION']['order']}")

    print_section("Surgery")
    sg = get_surgery_params(config)
    print(f"  Caps (R, S): {sg['caps']}")
    print(f"  Sign flags: {sg['sign_flags']}")
    print(f"  Example mode: {sg['example_mode']}")
    print(f"  Local-system form: {sg['local_system_form'] or 'none'}")
    print(f"  Unit convention: {config['ALGEBRA']['unit_convention']}")

    print_section("Verification")
    for key, value in get_verification_params(config).items():
        print(f"  {key}: {value}")
