"""Logging setup shared by the CLI and the test suite

`dara-alloc` loads `.env`, reads `DARA_LOG_LEVEL` (default WARNING) and hands
it to `load_config`; the tests configure INFO from `tests/conftest.py`. Level
names are permissive (`dbg`, `Warn`, `10`) and anything unknown falls back to
the default.
"""
import logging
from logging.config import dictConfig


def _to_log_level_map(log_map: dict) -> dict:
    result = {}
    for level, arr in log_map.items():
        for item in arr:
            result[item] = level
    return result


_LOG_LEVEL_MAP_DEFINITION = {
    logging.CRITICAL: ['critical', 'c', 'crit'],
    logging.ERROR: ['error', 'e', 'err'],
    logging.WARNING: ['warning', 'w', 'warn'],
    logging.INFO: ['info', 'i', 'inf'],
    logging.DEBUG: ['debug', 'd', 'dbg'],
    logging.NOTSET: ['notset', 'n', 'nst'],
}

LOG_LEVEL_MAP = _to_log_level_map(_LOG_LEVEL_MAP_DEFINITION)


def to_log_level(level, default=logging.NOTSET) -> int:
    if isinstance(level, int):
        return level

    if level is not None:
        level = level.strip()
        if level.isdigit():
            return int(level)
        return LOG_LEVEL_MAP.get(level.lower(), default)
    return default


def load_config(level: str = "INFO", handler_level=None, package_level=None, tests_level=None):
    """Configure the package and test loggers
    Args:
        level: Default level name or number for everything not set explicitly
        handler_level: Level of the console handler
        package_level: Level of the `dara_alloc` logger
        tests_level: Level of the `tests` logger
    """
    default = to_log_level(level, default=logging.INFO)
    config = dict(
        version=1,
        disable_existing_loggers=False,
        formatters={
            'verbose': {
                'format':
                    '%(asctime)s %(name)-12s %(levelname)-8s %(message)s'
            }
        },
        handlers={
            'console': {
                'class': 'logging.StreamHandler',
                'formatter': 'verbose',
                'level': to_log_level(handler_level, default=default),
                'stream': 'ext://sys.stderr',
            }
        },
        loggers={
            'dara_alloc': {
                'handlers': ['console'],
                'level': to_log_level(package_level, default=default)
            },
            'tests': {
                'handlers': ['console'],
                'level': to_log_level(tests_level, default=default)
            }
        },
    )

    dictConfig(config)
