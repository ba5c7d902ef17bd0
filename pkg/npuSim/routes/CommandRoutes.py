"""
    Purpose:
    Command-line routes: each sub-command parses its arguments, calls a service and
    turns the service response into a process exit status.

    Description:
    - run-script <path>     replay a register-transaction script
    - run-workload <path>   run a workload manifest and print/write its report
    - register-map          print the neural register reference
    - perf                  peak throughput, minimum cycles and the scaling/buffer sweeps
    Common flags: --config, --seed, --report, --log-level.
    Exit status: 0 success, 1 failed expect/poll/oracle, 2 unusable input (parse or config error).

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import argparse
import sys
from datetime import datetime
from pathlib import Path

from npuSim.coreFunctions.ConfigManager import load_engine_config
from npuSim.coreFunctions.PerfCounters import buffer_sweep, efficiency, min_cycles_gemm, peak_ops_per_sec, scaling_sweep
from npuSim.coreFunctions.RegisterFile import format_register_reference
from npuSim.models.PerfModel import PerfModel
from npuSim.services.ReportService import emit_report, write_report
from npuSim.services.ScriptService import ScriptServiceResponse, run_script
from npuSim.services.WorkloadService import WorkloadServiceResponse, run_workload
from utils.customerExceptions.cust_exceptions import ConfigError
from utils.logger.loggers import LOG_LEVELS, get_logger, set_log_level
# endregion

# region Logger
logger_System = get_logger('System_logger')
# endregion

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_INPUT = 2


# region Parser
def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="engine INI file (default Config/engineConfig.ini)")
    common.add_argument("--seed", type=_seed, default=0, help="64-bit run seed (default 0)")
    common.add_argument("--report", help="write the report / trace to this file")
    common.add_argument("--log-level", choices=sorted(LOG_LEVELS), default="info")

    parser = argparse.ArgumentParser(prog="npusim", description="Cycle-accounting NPU tile emulator")
    commands = parser.add_subparsers(dest="command", required=True)

    script = commands.add_parser("run-script", parents=[common], help="replay a register-transaction script")
    script.add_argument("path")
    script.set_defaults(handler=run_script_command)

    workload = commands.add_parser("run-workload", parents=[common], help="run a workload manifest")
    workload.add_argument("path")
    workload.set_defaults(handler=run_workload_command)

    regmap = commands.add_parser("register-map", parents=[common], help="print the neural register reference")
    regmap.set_defaults(handler=register_map_command)

    perf = commands.add_parser("perf", parents=[common], help="analytical performance figures")
    perf.add_argument("--m", type=int, default=16)
    perf.add_argument("--n", type=int, default=16)
    perf.add_argument("--k", type=int, default=16)
    perf.set_defaults(handler=perf_command)
    return parser
# endregion


# region Commands
def _emit(text, report_path=None):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if report_path:
        Path(report_path).write_text(text if text.endswith("\n") else text + "\n")


def run_script_command(args):
    cfg = load_engine_config(args.config)
    result: ScriptServiceResponse = run_script(args.path, cfg)
    if not result.success:
        sys.stderr.write(f"{args.path}: {result.error}\n")
        return EXIT_BAD_INPUT

    if args.report:
        Path(args.report).write_text("\n".join(result.data.log_lines) + "\n")
    return result.data.exit_status


def run_workload_command(args):
    result: WorkloadServiceResponse = run_workload(args.path, seed=args.seed, config_path=args.config)
    if not result.success:
        sys.stderr.write(f"{args.path}: {result.error}\n")
        return EXIT_BAD_INPUT

    if args.report:
        write_report(result.data, args.report)
    else:
        _emit(emit_report(result.data))
    return result.data.exit_status


def register_map_command(args):
    _emit(format_register_reference(), args.report)
    return EXIT_OK


def perf_command(args):
    cfg = load_engine_config(args.config)
    lines = []
    for ops_per_mac in (2, 1):
        model = PerfModel(mac_units=cfg.mac_units, clock_hz=cfg.clock_hz, ops_per_mac=ops_per_mac)
        lines.append(f"peak_ops_per_sec (ops_per_mac={ops_per_mac}) = {peak_ops_per_sec(model)}")
    minimum = min_cycles_gemm(args.m, args.n, args.k, cfg.mac_units)
    lines.append(f"min_cycles_gemm({args.m}, {args.n}, {args.k}, {cfg.mac_units}) = {minimum}")

    board = efficiency(cfg.board_reported_gemm_cycles, 16, 16, 16, cfg.mac_units)
    lines.append(f"board-reported 16x16x16 GEMM: {board.measured_cycles} cycles, efficiency {board.ratio:.3f}"
                 f"{' (anomaly: below the compute minimum)' if board.anomaly else ''}")

    lines.append("")
    lines.append(f"scaling sweep, GEMM {args.m}x{args.n}x{args.k}")
    lines.append(f"{'mac_units':>9} {'peak_ops/s':>14} {'min_cycles':>10} {'cycles_total':>12} {'utilization':>11}")
    for point in scaling_sweep(cfg, args.m, args.n, args.k):
        lines.append(f"{point.mac_units:>9} {point.peak_ops_per_sec:>14} {point.min_cycles:>10} "
                     f"{point.cycles_total:>12} {point.utilization:>11.4f}")

    lines.append("")
    lines.append("buffer sweep, largest square GEMM per buffer")
    lines.append(f"{'buffer':>7} {'mac_units':>9} {'dim':>4} {'cycles_total':>12} {'utilization':>11}")
    for point in buffer_sweep(cfg):
        lines.append(f"{point.buffer_bytes:>7} {point.mac_units:>9} {point.gemm_dim:>4} "
                     f"{point.cycles_total:>12} {point.utilization:>11.4f}")
    _emit("\n".join(lines), args.report)
    return EXIT_OK
# endregion


# region Dispatch
def dispatch(argv=None):
    """Parse argv, run the selected command and return its exit status."""
    args = build_parser().parse_args(argv)
    set_log_level(args.log_level)

    logger_System.info(f"Starting {args.command}")
    started = datetime.now()
    try:
        status = args.handler(args)
    except ConfigError as e:
        sys.stderr.write(f"{e}\n")
        status = EXIT_BAD_INPUT

    duration = (datetime.now() - started).total_seconds()
    logger_System.info(f"{args.command} finished with exit status {status} in {duration:.6f} seconds")
    return status
# endregion
