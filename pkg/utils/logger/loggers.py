import logging
from logging import config

from utils.filePath.filePath import get_filePath, get_project_root

# Loggers whose level follows --log-level
SIMULATION_LOGGERS = ("NPU1S01", "NPU1T01")

LOG_LEVELS = {
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


def setup_logging():
    config_file = get_filePath("logConfig")
    log_dir = get_project_root() / "logs"

    try:
        log_dir.mkdir(parents=True, exist_ok=True)
        config.fileConfig(config_file, defaults={"logdir": log_dir.as_posix()}, disable_existing_loggers=False)
    except Exception as e:
        print(f"Error setting up logging: {e}")


def get_logger(logger_name):
    """Retrieve a logger by name."""
    return logging.getLogger(logger_name)


def set_log_level(level_name):
    """Apply a CLI level name ('info' or 'debug') to the simulation loggers."""
    level = LOG_LEVELS.get(str(level_name).lower())
    if level is None:
        raise ValueError(f"Unknown log level '{level_name}', expected one of {sorted(LOG_LEVELS)}")

    for name in SIMULATION_LOGGERS:
        logging.getLogger(name).setLevel(level)


# Setup logging on module import
setup_logging()
