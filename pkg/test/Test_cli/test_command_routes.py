from pathlib import Path
from unittest.mock import patch

import pytest

from main import main
from npuSim.coreFunctions.ConfigManager import load_engine_config
from npuSim.routes.CommandRoutes import EXIT_BAD_INPUT, EXIT_FAILED, EXIT_OK, dispatch
from utils.customerExceptions.cust_exceptions import ConfigError

ROOT = Path(__file__).resolve().parents[2]
EXAMPLES = ROOT / "docs" / "examples"
RUN_WORKLOAD_PATH = "npuSim.routes.CommandRoutes.run_workload"


# region Configuration
def test_default_engine_config():
    cfg = load_engine_config()
    assert (cfg.mac_units, cfg.scratchpad_size, cfg.dma_burst_size, cfg.clock_hz) == (16, 8192, 64, 100_000_000)
    assert cfg.board_reported_gemm_cycles == 156


def test_engine_config_file_and_overrides(tmp_path):
    path = tmp_path / "tile.ini"
    path.write_text("[ENGINE]\nmac_units = 8\nscratchpad_size = 0x1000\n[OVERHEAD]\nsetup_cycles = 0\n")
    cfg = load_engine_config(path, {"mac_units": "32"})
    assert (cfg.mac_units, cfg.scratchpad_size, cfg.setup_cycles) == (32, 4096, 0)


@pytest.mark.parametrize("text", [
    "[ENGINE]\nmac_units = 64\n",
    "[ENGINE]\nmac_units = sixteen\n",
    "[ENGINE]\nscratchpad_size = 16384\n",
    "[ENGINE]\ndata_width = 8\n",
])
def test_invalid_engine_config(tmp_path, text):
    path = tmp_path / "tile.ini"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_engine_config(path)


def test_missing_engine_config(tmp_path):
    with pytest.raises(ConfigError):
        load_engine_config(tmp_path / "absent.ini")
# endregion


# region Commands
def test_run_script_exit_codes(tmp_path):
    assert main(["run-script", str(EXAMPLES / "board_validation.script")]) == EXIT_OK

    timeout = tmp_path / "timeout.script"
    timeout.write_text("write 0x10000004 0x00000011\npoll 0x10000000 0x2 0x2 10\n")
    assert dispatch(["run-script", str(timeout)]) == EXIT_FAILED

    broken = tmp_path / "broken.script"
    broken.write_text("poke 0x0\n")
    assert dispatch(["run-script", str(broken)]) == EXIT_BAD_INPUT


def test_run_script_writes_the_trace(tmp_path):
    out = tmp_path / "trace.log"
    dispatch(["run-script", str(EXAMPLES / "board_validation.script"), "--report", str(out)])
    assert out.read_text().splitlines()[-1] == "[INFO] Status = 0x00000002 (DONE) after 400 cycles"


def test_run_workload_prints_or_writes_the_report(tmp_path, capsys):
    assert dispatch(["run-workload", str(EXAMPLES / "gemm16.ini"), "--seed", "0x2A"]) == EXIT_OK
    printed = capsys.readouterr().out
    assert printed.startswith("[report]")
    assert "seed = 42" in printed

    out = tmp_path / "report.ini"
    assert dispatch(["run-workload", str(EXAMPLES / "gemm16.ini"), "--seed", "42", "--report", str(out)]) == EXIT_OK
    assert out.read_text() == printed


def test_run_workload_failures_map_to_exit_codes(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[op.x]\nkind = tensor\n")
    assert dispatch(["run-workload", str(bad)]) == EXIT_BAD_INPUT

    with patch("npuSim.services.WorkloadService._oracle", return_value=[]):
        assert dispatch(["run-workload", str(EXAMPLES / "gemm16.ini")]) == EXIT_FAILED


def test_run_workload_passes_seed_and_config():
    with patch(RUN_WORKLOAD_PATH) as run_workload:
        run_workload.return_value.success = False
        run_workload.return_value.error = ConfigError("stop")
        dispatch(["run-workload", "w.ini", "--seed", "7", "--config", "tile.ini"])
    run_workload.assert_called_once_with("w.ini", seed=7, config_path="tile.ini")


def test_bad_config_file_is_bad_input(tmp_path):
    assert dispatch(["perf", "--config", str(tmp_path / "absent.ini")]) == EXIT_BAD_INPUT


@pytest.mark.parametrize("seed", ["-1", str(1 << 64), "abc"])
def test_seed_must_be_64_bit(seed):
    with pytest.raises(SystemExit) as exit_info:
        dispatch(["run-workload", "w.ini", "--seed", seed])
    assert exit_info.value.code == 2


def test_register_map_matches_the_docs(capsys):
    assert dispatch(["register-map"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == (ROOT / "docs" / "register_map.txt").read_text().strip()


def test_perf_command(capsys):
    assert dispatch(["perf"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "peak_ops_per_sec (ops_per_mac=2) = 3200000000" in out
    assert "peak_ops_per_sec (ops_per_mac=1) = 1600000000" in out
    assert "min_cycles_gemm(16, 16, 16, 16) = 256" in out
    assert "156 cycles, efficiency 1.641 (anomaly: below the compute minimum)" in out
# endregion
