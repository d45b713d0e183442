"""
Logging setup for command-line use. Library modules only create loggers.
"""

import logging
import sys

LOG_FORMAT = '[%(name)s %(asctime)s] %(levelname)s: %(message)s'
DATE_FORMAT = '%H:%M:%S'
ROOT_LOGGER = 'periocular_eval'


def setup_logging(debug: bool = False) -> logging.Logger:
    """Attach one stderr handler to the package logger; repeated calls replace it."""
    logger = logging.getLogger(ROOT_LOGGER)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if debug else logging.INFO)
    logger.propagate = False
    return logger
