import io
import logging
import os
import sys

PACKAGE_NAME = os.path.basename(os.path.dirname(__file__))

# Debug log files go here
log_dir = os.path.join(os.path.expanduser("~"), ".tclplus", "logs")

log = logging.getLogger(PACKAGE_NAME)

log_level = os.getenv("TCLPLUS_LOG_LEVEL")
debug_enabled = bool(os.getenv("TCLPLUS_DEBUG", ""))


def _resolve_level(name):
    if not name:
        return logging.INFO
    return getattr(logging, str(name).upper(), logging.INFO)


if debug_enabled:
    log.setLevel(logging.DEBUG)
else:
    log.setLevel(_resolve_level(log_level))

for handler in log.handlers[:]:
    log.removeHandler(handler)

log.propagate = False


class SafeStreamHandler(logging.StreamHandler):
    """Stream handler that falls back to an in-memory buffer.

    Long sweeps run in worker threads and under pytest capture, where the
    original stderr can be closed or swapped underneath us.
    """

    def __init__(self, stream=None):
        self.fallback_stream = io.StringIO()
        super().__init__(stream or self.fallback_stream)

    def emit(self, record):
        try:
            if self.stream is None or not callable(getattr(self.stream, "write", None)):
                self.stream = self.fallback_stream
            super().emit(record)
        except (AttributeError, OSError, ValueError):
            try:
                if self.stream is not self.fallback_stream:
                    self.stream = self.fallback_stream
                    super().emit(record)
            except Exception:
                pass


if debug_enabled:
    try:
        os.makedirs(log_dir, exist_ok=True)
        file_handler = logging.FileHandler(
            os.path.join(log_dir, f"{PACKAGE_NAME}_debug.log"), encoding="utf-8"
        )
        file_handler.setFormatter(
            logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        )
        file_handler.setLevel(logging.DEBUG)
        log.addHandler(file_handler)
    except OSError:
        sys.stderr.write(f"Failed to create log file in {log_dir}\n")

stream_handler = SafeStreamHandler(stream=sys.stderr)
stream_handler.setFormatter(logging.Formatter("%(name)s - %(levelname)s - %(message)s"))
stream_handler.setLevel(logging.DEBUG)
log.addHandler(stream_handler)


def set_level(name):
    """Override the package log level, e.g. from a CLI flag."""
    level = _resolve_level(name)
    log.setLevel(level)
    return level


def get_logger(name):
    """Child logger that reports through the package handlers."""
    return log.getChild(name)
