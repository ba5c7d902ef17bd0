import configparser
import platform
from pathlib import Path


def get_project_root():
    """
    Returns the project root directory dynamically.
    Assumes this script is inside the project directory.
    """
    return Path(__file__).resolve().parent.parent.parent


def get_filePath(key):
    """
    Resolve a config file path registered in Config/CoreConfig.ini.

    Args:
        key (str): 'logConfig' or 'engineConfig'.

    Returns:
        Path | bool: Absolute path to the file, or False when it cannot be resolved.
    """
    import logging
    logger_NPU1S01 = logging.getLogger('NPU1S01')

    try:
        config = configparser.ConfigParser()

        project_root = get_project_root()
        config_file_path = project_root / "Config" / "CoreConfig.ini"

        if not config_file_path.is_file():
            raise FileNotFoundError(f"Configuration file '{config_file_path}' not found.")

        config.read(str(config_file_path))

        # 'WIN' or 'LIN' key prefix
        os_suffix = "WIN" if platform.system() == 'Windows' else "LIN"

        section_mapping = {
            "logConfig": "LogConfigFile_path",
            "engineConfig": "EngineConfigFile_path",
        }

        section = section_mapping.get(key)
        if not section:
            raise KeyError(f"Key '{key}' does not have a mapped section.")

        if section in config:
            requested_key = f"{os_suffix}_{key}"
            path = config[section].get(requested_key, "").strip()

            if not path:
                raise KeyError(f"Key '{requested_key}' not found in section '{section}'.")

            path = Path(path)
            return path if path.is_absolute() else project_root / path

        else:
            raise KeyError(f"Section '{section}' is missing in the configuration file.")

    except FileNotFoundError as fnf_error:
        logger_NPU1S01.error(f"Error: {fnf_error}")
        return False
    except KeyError as key_error:
        logger_NPU1S01.error(f"Error: {key_error}")
        return False
    except Exception as e:
        logger_NPU1S01.error(f"Error: Unexpected error occurred - {e}")
        return False
