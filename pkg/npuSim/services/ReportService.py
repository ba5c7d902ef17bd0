"""
    Purpose:
    Renders a workload run as a deterministic INI-style key/value report.

    Description:
    Sections, always in this order: [report], [config], one [op.<name>] per op in run
    order, [counters], [throughput], [summary], [anomalies]. No timestamps or host paths
    are written, so identical runs give identical bytes. Fields that depend on the
    generated data: output_crc32, overflow_count, oracle.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import configparser
import io
from pathlib import Path

from npuSim.coreFunctions.PerfCounters import BOARD_REPORTED_EFFICIENCY_TEXT, efficiency
from npuSim.models.WorkloadModel import WorkloadRun
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion

REPORT_FORMAT_VERSION = 1
# the board log's figure was taken on a 16x16x16 GEMM
BOARD_GEMM_SHAPE = (16, 16, 16)


def _text(value):
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.4f}"
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def emit_report(run: WorkloadRun) -> str:
    report = configparser.ConfigParser(interpolation=None)

    report["report"] = {"format_version": REPORT_FORMAT_VERSION, "manifest": run.manifest_name}

    config = {"seed": run.seed, "oracle_check": _text(run.oracle_check)}
    config.update({key: _text(value) for key, value in run.config.model_dump().items()})
    report["config"] = config

    for op in run.ops:
        report[f"op.{op.name}"] = {key: _text(value) for key, value in op.model_dump().items() if key != "name"}

    report["counters"] = {key: _text(value) for key, value in run.counters.model_dump().items()}
    report["throughput"] = {
        "total_cycles": run.total_cycles,
        "peak_ops_per_sec": run.peak_ops_per_sec,
        "achieved_ops_per_sec": _text(run.achieved_ops_per_sec),
    }
    report["summary"] = {
        "ops": len(run.ops),
        "oracle_failures": run.oracle_failures,
        "poll_timeouts": run.poll_timeouts,
        "faults": run.faults,
        "exit_status": run.exit_status,
    }

    board = efficiency(run.config.board_reported_gemm_cycles, *BOARD_GEMM_SHAPE, run.config.mac_units)
    above_one = [op.name for op in run.ops if op.efficiency is not None and op.efficiency > 1]
    report["anomalies"] = {
        "board_reported_gemm_cycles": board.measured_cycles,
        "board_min_cycles": board.min_cycles,
        "board_efficiency": _text(board.ratio),
        "board_efficiency_anomaly": _text(board.anomaly),
        "board_reported_efficiency": BOARD_REPORTED_EFFICIENCY_TEXT,
        "ops_with_efficiency_above_one": ", ".join(above_one) if above_one else "none",
    }

    buffer = io.StringIO()
    report.write(buffer)
    return buffer.getvalue()


def write_report(run: WorkloadRun, path):
    text = emit_report(run)
    Path(path).write_text(text)
    logger_NPU1S01.info(f"Report written to {path}")
    return text
