import csv
import io
import json
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from tclplus.constants import CSV_FLOAT_FORMAT
from tclplus.exceptions import ConfigError
from tclplus.logger import log

from ..version import __version__ as version


def format_value(value):
    """CSV cell text; floats keep 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), CSV_FLOAT_FORMAT)
    return str(value)


def create_directory_if_not_exists(path):
    """Create a directory if it doesn't exist"""
    if not path or os.path.isdir(path):
        return True
    try:
        os.makedirs(path, exist_ok=True)
        return True
    except OSError as e:
        log.error(f"Failed to create directory {path}: {e}")
        return False


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` through a temp file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    create_directory_if_not_exists(directory)
    fd, tmp_path = tempfile.mkstemp(prefix=".tmp_", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    log.debug(f"Wrote {path}")
    return path


def write_csv(path, header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return atomic_write_text(path, buffer.getvalue())


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=False, default=_json_default)
    return atomic_write_text(path, text + "\n")


def load_json_config(path):
    """Read a JSON config file into a dict."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must contain a JSON object")
    return data


def read_manifest(path):
    """Load a manifest, or ``None`` when it is missing or unreadable."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        log.warning(f"Failed to read manifest {path}: {e}")
        return None


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: Optional[int] = None
    version: str = version
    outputs: List[str] = field(default_factory=list)
    truncated: List[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    duration_s: float = 0.0
    _started: float = field(default_factory=time.perf_counter, repr=False)

    def add_output(self, path):
        self.outputs.append(os.path.basename(path))

    def flag_truncated(self, name, time_value):
        self.truncated.append({"output": name, "divergence_time": time_value})

    def as_dict(self):
        data = asdict(self)
        data.pop("_started")
        return data

    def write(self, out_dir, name="manifest.json"):
        self.duration_s = time.perf_counter() - self._started
        return write_json(os.path.join(out_dir, name), self.as_dict())
