"""
IQ I/O - Interleaved float32 I/Q captures with a YAML sidecar

The binary holds I,Q,I,Q,... as little-endian float32 with no header. The
sidecar `<file>.yaml` records the sample rate and frame geometry, plus the
true support when the frame was synthesized.
"""

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
import yaml

from core.errors import ParameterError, ShapeError
from core.signal_model import NyquistSignal, SpectrumConfig, SupportSet

IQ_DTYPE = "<f4"


@dataclass(frozen=True)
class IQMetadata:
    sample_rate_hz: float
    channels: int
    frame_len: int
    support: Optional[SupportSet] = None

    def as_dict(self) -> dict:
        data = {
            "sample_rate_hz": float(self.sample_rate_hz),
            "channels": int(self.channels),
            "frame_len": int(self.frame_len),
            "dtype": "float32",
            "byte_order": "little",
        }
        if self.support is not None:
            data["support"] = list(self.support.indices)
        return data


def sidecar_path(path: str) -> str:
    return f"{path}.yaml"


def export_iq(signal: NyquistSignal, path: str, cfg: SpectrumConfig) -> str:
    """Write one frame and its sidecar; returns the binary path"""
    samples = np.asarray(signal.samples)
    if len(samples) != cfg.frame_samples:
        raise ShapeError(f"frame has {len(samples)} samples, expected L*N = {cfg.frame_samples}")

    interleaved = np.empty(2 * len(samples), dtype=IQ_DTYPE)
    interleaved[0::2] = samples.real
    interleaved[1::2] = samples.imag
    interleaved.tofile(path)

    meta = IQMetadata(signal.sample_rate, cfg.L, cfg.frame_len_N, signal.truth)
    with open(sidecar_path(path), "w", encoding="utf-8") as handle:
        yaml.safe_dump(meta.as_dict(), handle, sort_keys=False)
    print(f"💾 IQ frame saved: {path}")
    return path


def read_metadata(path: str) -> IQMetadata:
    meta_file = sidecar_path(path)
    if not os.path.exists(meta_file):
        raise ParameterError(f"missing sidecar '{meta_file}'")
    with open(meta_file, "r", encoding="utf-8") as handle:
        try:
            data = yaml.safe_load(handle) or {}
        except yaml.YAMLError as exc:
            raise ParameterError(f"malformed sidecar '{meta_file}': {exc}") from exc

    for key in ("sample_rate_hz", "channels", "frame_len"):
        if key not in data:
            raise ParameterError(f"sidecar '{meta_file}' lacks '{key}'")
    if data.get("dtype", "float32") != "float32" or data.get("byte_order", "little") != "little":
        raise ParameterError("only little-endian float32 captures are supported")

    channels = int(data["channels"])
    support = SupportSet(tuple(data["support"]), channels) if "support" in data else None
    return IQMetadata(float(data["sample_rate_hz"]), channels, int(data["frame_len"]), support)


def load_iq(path: str) -> NyquistSignal:
    """Read a capture back as a NyquistSignal (truth from the sidecar, if any)"""
    meta = read_metadata(path)
    raw = np.fromfile(path, dtype=IQ_DTYPE)
    if raw.size % 2:
        raise ShapeError(f"'{path}' holds an odd number of float32 values")
    samples = raw[0::2].astype(np.float64) + 1j * raw[1::2].astype(np.float64)

    expected = meta.channels * meta.frame_len
    if samples.size < expected:
        raise ShapeError(f"'{path}' holds {samples.size} complex samples, sidecar promises {expected}")
    return NyquistSignal(samples[:expected], meta.support, sample_rate=meta.sample_rate_hz)
