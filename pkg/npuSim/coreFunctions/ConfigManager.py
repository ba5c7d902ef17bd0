"""
    Purpose:
    Configuration management: reads INI files into a central hash map and builds the
    validated EngineConfig the simulator runs with.

    Description:
    - Reads INI files (engine defaults) into the global HASH_MAP.
    - load_engine_config() maps [ENGINE], [OVERHEAD], [DMA] and [PERF] keys onto EngineConfig
      fields, applies manifest overrides, and validates the result.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import configparser
import os

from pydantic import ValidationError

from npuSim.models.EngineModel import EngineConfig
from utils.customerExceptions.cust_exceptions import ConfigError
from utils.filePath.filePath import get_filePath
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion

# region Global Configuration
HASH_MAP = {}

CONFIG_FILES = {
    "engine": get_filePath("engineConfig"),
}

# (section, key) -> EngineConfig field
ENGINE_FIELDS = {
    ("ENGINE", "mac_units"): "mac_units",
    ("ENGINE", "scratchpad_size"): "scratchpad_size",
    ("ENGINE", "dma_burst_size"): "dma_burst_size",
    ("ENGINE", "data_width"): "data_width",
    ("ENGINE", "addr_width"): "addr_width",
    ("ENGINE", "clock_hz"): "clock_hz",
    ("ENGINE", "frac_bits"): "frac_bits",
    ("OVERHEAD", "setup_cycles"): "setup_cycles",
    ("OVERHEAD", "writeback_bytes_per_beat"): "writeback_bytes_per_beat",
    ("DMA", "queue_depth"): "dma_queue_depth",
    ("PERF", "ops_per_mac"): "ops_per_mac",
    ("PERF", "board_reported_gemm_cycles"): "board_reported_gemm_cycles",
}
# endregion


# region Read INI File
def read_ini_file(file_path):
    """
    Reads an INI file and returns its contents as a nested dictionary.

    Args:
        file_path (str): Full path to the INI file.

    Returns:
        dict: Dictionary representation of the INI file (section -> key/value pairs).
    """
    config = configparser.ConfigParser(interpolation=None)
    try:
        config.read(file_path)
    except configparser.Error as e:
        raise ConfigError(f"{file_path}: {e}")
    return {section: dict(config.items(section)) for section in config.sections()}
# endregion


# region Initialize Hash Maps
def initialize_hash_maps():
    """
    Initializes the global HASH_MAP with contents of all configured INI files.

    Returns:
        bool: False if any config file is missing.
    """
    for name, path in CONFIG_FILES.items():
        if path and os.path.exists(path):
            HASH_MAP[name] = read_ini_file(path)
            logger_NPU1S01.debug(f"Hash map for {name} is read.")
        else:
            logger_NPU1S01.error(f"{path} not found. Skipping...")
            return False
    return True
# endregion


# region Get Configuration
def get_config(category, key=None):
    """
    Retrieves configuration values from the loaded HASH_MAP.

    Args:
        category (str): The category of config to retrieve (e.g., 'engine').
        key (str, optional): Section name within the category.

    Returns:
        dict | None: Full category dict if key is None, otherwise the section dict.
    """
    if key:
        return HASH_MAP.get(category, {}).get(key, None)
    return HASH_MAP.get(category, {})
# endregion


# region Engine Configuration
def _to_int(value, where):
    try:
        return int(str(value).strip(), 0)
    except ValueError:
        raise ConfigError(f"{where}: '{value}' is not an integer")


def load_engine_config(path=None, overrides=None) -> EngineConfig:
    """
    Build an EngineConfig from an INI file plus optional overrides.

    Args:
        path (str | Path, optional): INI file; defaults to the engineConfig entry of CoreConfig.ini.
        overrides (dict, optional): field name -> value, applied after the file (manifest [engine] section).

    Raises:
        ConfigError: unreadable file, unknown override key, or a value out of range.
    """
    if path is None:
        if "engine" not in HASH_MAP and not initialize_hash_maps():
            raise ConfigError("Default engine configuration not found")
        sections = get_config("engine")
        source = CONFIG_FILES["engine"]
    else:
        if not os.path.exists(path):
            raise ConfigError(f"{path} not found")
        sections = read_ini_file(path)
        source = path

    values = {}
    for (section, key), field in ENGINE_FIELDS.items():
        raw = sections.get(section, {}).get(key)
        if raw is not None:
            values[field] = _to_int(raw, f"[{section}] {key}")

    for key, raw in (overrides or {}).items():
        if key not in EngineConfig.model_fields:
            raise ConfigError(f"Unknown engine override '{key}'")
        values[key] = _to_int(raw, f"[engine] {key}")

    try:
        cfg = EngineConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"{source}: {e.errors()[0]['loc'][0]} {e.errors()[0]['msg']}")

    logger_NPU1S01.debug(f"Engine configuration loaded from {source}: {cfg.model_dump()}")
    return cfg
# endregion
