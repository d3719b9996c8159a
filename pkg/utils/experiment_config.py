"""
Experiment Config - Load sweep definitions from flat YAML files

Scalar keys set the scenario and detector; list-valued keys (p, snr_db,
bits, K) are the sweep axes. A scalar given for an axis is a one-value axis.
"""

import os
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv

import config
from core.errors import ParameterError
from core.harness import ExperimentConfig
from core.signal_model import SpectrumConfig

# Load environment variables
load_dotenv()

SPECTRUM_KEYS = {
    "channels": "L",
    "bandwidth_hz": "W",
    "frame_len": "frame_len_N",
    "subcarriers": "subcarriers_C",
    "noise_var": "noise_var",
    "pu_powers": "pu_powers",
}
AXIS_KEYS = {"p": "p_values", "snr_db": "snr_values", "bits": "bits_values", "K": "k_values"}
SCALAR_KEYS = {
    "trials": int,
    "master_seed": int,
    "p_false": float,
    "order_method": str,
    "covariance": str,
    "threads": int,
    "out": str,
    "eigs_out": str,
    "record_timing": bool,
}
KNOWN_KEYS = set(SPECTRUM_KEYS) | set(AXIS_KEYS) | set(SCALAR_KEYS)


def parse_bits(value: Any) -> Optional[int]:
    """1..64, or None for 'none' / null"""
    if value is None or (isinstance(value, str) and value.strip().lower() == "none"):
        return None
    if isinstance(value, bool):
        raise ParameterError(f"bits must be an integer or 'none', got {value!r}")
    try:
        bits = int(value)
    except (TypeError, ValueError):
        raise ParameterError(f"bits must be an integer or 'none', got {value!r}") from None
    if not 1 <= bits <= 64:
        raise ParameterError(f"bits must lie in 1..64 or be none, got {bits}")
    return bits


def parse_snr(value: Any) -> float:
    """Decibels; 'inf' selects the noiseless scenario"""
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"snr_db must be a number or 'inf', got {value!r}") from None


def _as_list(value: Any) -> List[Any]:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ParameterError(f"'{key}' must be an integer, got {value!r}")
    return int(value)


def parse_experiment(data: Dict[str, Any]) -> ExperimentConfig:
    """Validate a mapping loaded from YAML and build the ExperimentConfig"""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ParameterError("experiment file must hold a key/value mapping")
    unknown = sorted(set(data) - KNOWN_KEYS)
    if unknown:
        raise ParameterError(f"unknown config key(s): {', '.join(map(str, unknown))}")

    spectrum = {}
    for key, field_name in SPECTRUM_KEYS.items():
        if key not in data:
            continue
        if key == "pu_powers":
            spectrum[field_name] = tuple(float(e) for e in _as_list(data[key]))
        elif key in ("channels", "frame_len", "subcarriers"):
            spectrum[field_name] = _as_int(key, data[key])
        else:
            spectrum[field_name] = float(data[key])

    kwargs: Dict[str, Any] = {}
    if "snr_db" in data:
        kwargs["snr_values"] = tuple(parse_snr(s) for s in _as_list(data["snr_db"]))
        if kwargs["snr_values"]:
            spectrum["snr_db"] = kwargs["snr_values"][0]
    kwargs["base"] = SpectrumConfig(**spectrum)
    if "p" in data:
        kwargs["p_values"] = tuple(_as_int("p", p) for p in _as_list(data["p"]))
    if "K" in data:
        kwargs["k_values"] = tuple(_as_int("K", k) for k in _as_list(data["K"]))
    if "bits" in data:
        kwargs["bits_values"] = tuple(parse_bits(b) for b in _as_list(data["bits"]))

    for key, kind in SCALAR_KEYS.items():
        if key not in data:
            continue
        value = data[key]
        if kind is int:
            value = _as_int(key, value)
        elif kind is bool:
            if not isinstance(value, bool):
                raise ParameterError(f"'{key}' must be true or false, got {value!r}")
        else:
            value = kind(value)
        kwargs["covariance_domain" if key == "covariance" else key] = value

    if kwargs.get("order_method", config.ORDER_METHOD) not in ("eft", "mdl", "aic"):
        raise ParameterError(f"order_method must be eft, mdl or aic, got {kwargs['order_method']!r}")
    if kwargs.get("covariance_domain", config.COVARIANCE_DOMAIN) not in ("aligned", "time"):
        raise ParameterError(f"covariance must be aligned or time, got {kwargs['covariance_domain']!r}")
    return ExperimentConfig(**kwargs)


def load_experiment(path: str) -> ExperimentConfig:
    """Read and validate a YAML experiment file"""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except OSError as exc:
        raise ParameterError(f"cannot read config '{path}': {exc}") from exc
    except yaml.YAMLError as exc:
        raise ParameterError(f"malformed YAML in '{path}': {exc}") from exc
    return parse_experiment(data)


def resolve_threads(flag: Optional[int] = None, configured: Optional[int] = None) -> int:
    """--threads flag, then the config file, then ONEBIT_WSS_THREADS, then 1"""
    if flag is not None:
        threads = flag
    elif configured is not None:
        threads = configured
    else:
        raw = os.getenv(config.THREADS_ENV_VAR, "").strip()
        if not raw:
            return 1
        try:
            threads = int(raw)
        except ValueError:
            raise ParameterError(f"{config.THREADS_ENV_VAR} must be an integer, got {raw!r}") from None
    if threads < 1:
        raise ParameterError(f"thread count must be >= 1, got {threads}")
    return threads
