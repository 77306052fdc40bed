# coding=utf-8
# Copyright 2026 The risnoma Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
""" Logging of the risnoma library: one root logger, levels set from the environment or the CLI flags. """

import logging
import os
import sys
import threading
from logging import DEBUG, INFO, WARNING  # NOQA
from typing import Optional, Union


_lock = threading.Lock()
_default_handler: Optional[logging.Handler] = None

log_levels = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
    "critical": logging.CRITICAL,
}

_default_log_level = logging.WARNING

_EXPLICIT_FORMAT = "[%(levelname)s|%(filename)s:%(lineno)s] %(asctime)s >> %(message)s"


def _level(verbosity: Union[int, str]) -> int:
    if isinstance(verbosity, str):
        if verbosity.lower() not in log_levels:
            raise ValueError(f"Unknown verbosity {verbosity!r}, has to be one of: {', '.join(log_levels)}")
        return log_levels[verbosity.lower()]
    return int(verbosity)


def _get_default_logging_level() -> int:
    """
    Level named by the RISNOMA_VERBOSITY env var, or ``_default_log_level`` when it is unset or unknown.
    """
    env_level_str = os.getenv("RISNOMA_VERBOSITY", None)
    if env_level_str:
        try:
            return _level(env_level_str)
        except ValueError as e:
            logging.getLogger().warning(f"Ignoring RISNOMA_VERBOSITY: {e}")
    return _default_log_level


def _get_library_root_logger() -> logging.Logger:
    return logging.getLogger(__name__.split(".")[0])


def _configure_library_root_logger() -> None:
    global _default_handler

    with _lock:
        if _default_handler:
            return
        _default_handler = logging.StreamHandler()
        _default_handler.flush = sys.stderr.flush

        library_root_logger = _get_library_root_logger()
        library_root_logger.addHandler(_default_handler)
        library_root_logger.setLevel(_get_default_logging_level())
        library_root_logger.propagate = False


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Return a logger with the specified name, attached below the `risnoma` root logger.
    """
    _configure_library_root_logger()
    return logging.getLogger(name or _get_library_root_logger().name)


def set_verbosity(verbosity: Union[int, str]) -> None:
    """
    Set the verbosity level of the `risnoma` root logger.

    Args:
        verbosity (`int` or `str`):
            Logging level, e.g. `risnoma.utils.logging.INFO`, or its lower-case name such as `"debug"`.
    """
    _configure_library_root_logger()
    _get_library_root_logger().setLevel(_level(verbosity))


def enable_explicit_format() -> None:
    """
    Prefix every record of the `risnoma` handlers with `[LEVELNAME|FILENAME:LINE] TIME >>`.
    """
    for handler in _get_library_root_logger().handlers:
        handler.setFormatter(logging.Formatter(_EXPLICIT_FORMAT))


def configure_from_flags(verbose: bool = False, quiet: bool = False) -> int:
    """
    Apply the `--verbose` / `--quiet` CLI flags: debug records with the explicit format, warnings only, or progress
    at the info level by default. Returns the level that was set.
    """
    if verbose and quiet:
        raise ValueError("verbose and quiet are mutually exclusive")
    level = DEBUG if verbose else WARNING if quiet else INFO
    set_verbosity(level)
    if verbose:
        enable_explicit_format()
    return level
