"""
    Purpose:
    Runs a workload manifest on one simulator and collects per-op results, perf
    counters and oracle verdicts for the report.

    Description:
    For each op, in manifest order:
    - generate the input operands (seeded from --seed and the op index, or the op's own seed);
    - place them in main RAM as a host loader would, then move each one into the scratchpad
      with a LOAD operation driven over MMIO;
    - program the op's registers, START, poll STATUS until DONE;
    - STORE the output back to main RAM and read it from there;
    - compare against the reference oracle when oracle_check is on.
    A fault or poll timeout aborts the op and is recorded; later ops still run.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import zlib

import numpy as np

from npuSim.coreFunctions.ConfigManager import load_engine_config
from npuSim.coreFunctions.ManifestParser import build_operation, generate_input, parse_manifest
from npuSim.coreFunctions.Oracles import conv_oracle, gemm_oracle, pool_oracle, relu_oracle
from npuSim.coreFunctions.PerfCounters import achieved_ops_per_sec, efficiency, peak_ops_per_sec
from npuSim.coreFunctions.Simulator import NEURAL_REGS_BASE, SCRATCHPAD_BASE, NpuSimulator
from npuSim.models.EngineModel import EngineConfig, TransferParams
from npuSim.models.PerfModel import PerfModel
from npuSim.models.RegisterModel import STATUS_ERROR, EngineState, Opcode, RegisterOffset
from npuSim.models.WorkloadModel import OpKind, OpReport, OracleOutcome, PlannedOperation, WorkloadManifest, WorkloadRun
from utils.customerExceptions.cust_exceptions import ConfigError, ParseError, PollTimeout, SimulationFault
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion

STATUS_ADDR = NEURAL_REGS_BASE + RegisterOffset.STATUS
DONE_POLL_TIMEOUT = 1_000_000

OPCODES = {
    OpKind.GEMM: Opcode.GEMM,
    OpKind.CONV: Opcode.CONV,
    OpKind.POOL: Opcode.POOL,
    OpKind.RELU: Opcode.RELU,
}


# region Response Class
class WorkloadServiceResponse:
    def __init__(self, success: bool, data: WorkloadRun = None, error: Exception = None):
        self.success = success
        self.data = data
        self.error = error
# endregion


# region Helpers
def _shape_text(planned: PlannedOperation):
    p = planned.params
    if planned.spec.kind == OpKind.GEMM:
        return f"{p.m}x{p.n}x{p.k}"
    if planned.spec.kind == OpKind.CONV:
        return (f"{p.in_c}x{p.in_h}x{p.in_w} * {p.out_c}x{p.in_c}x{p.kernel_h}x{p.kernel_w} "
                f"s{p.stride} p{p.padding}")
    if planned.spec.kind == OpKind.POOL:
        return f"{p.mode.value} {p.channels}x{p.in_h}x{p.in_w} w{p.window_h}x{p.window_w} s{p.stride}"
    return f"{p.count}"


def _await_done(sim: NpuSimulator, timeout=DONE_POLL_TIMEOUT):
    """Poll STATUS over the bus until DONE; returns the status word."""
    start = sim.cycle
    while True:
        word = sim.read32(STATUS_ADDR)
        if word & EngineState.DONE.value:
            return word
        if sim.cycle - start >= timeout:
            raise PollTimeout(f"STATUS 0x{word:08X} not DONE after {sim.cycle - start} cycles")


def _run_engine_op(sim: NpuSimulator, opcode: Opcode, params):
    """Program, START and wait; returns CYCLE_COUNT. Raises SimulationFault when DONE carries the error bit."""
    sim.program(opcode, params)
    word = _await_done(sim)
    if word & STATUS_ERROR:
        raise sim.last_fault or SimulationFault(f"{opcode.name} finished with the error bit set")
    return sim.registers.reg_read(RegisterOffset.CYCLE_COUNT)


def _oracle(planned: PlannedOperation, inputs):
    p = planned.params
    kind = planned.spec.kind
    if kind == OpKind.GEMM:
        return gemm_oracle(inputs["a"].tolist(), inputs["b"].tolist(), p.scale)
    if kind == OpKind.CONV:
        return conv_oracle(inputs["input"].tolist(), inputs["weights"].tolist(), p.stride, p.padding, p.scale)
    if kind == OpKind.POOL:
        return pool_oracle(inputs["input"].tolist(), p.window_h, p.window_w, p.stride, p.mode.value)
    return relu_oracle(inputs["input"].tolist())
# endregion


# region Op Execution
def _execute_op(sim: NpuSimulator, planned: PlannedOperation, index, seed, manifest: WorkloadManifest, run: WorkloadRun):
    op = planned.spec
    report = OpReport(name=op.name, kind=op.kind, shape=_shape_text(planned))
    rng = np.random.default_rng(np.random.SeedSequence([seed, index if op.seed is None else op.seed]))
    inputs = {operand.name: generate_input(operand, rng, manifest.base_dir) for operand in planned.operands}

    ram_cursor = 0
    try:
        for operand in planned.operands:
            sim.load_bytes(ram_cursor, inputs[operand.name].astype("<i2").tobytes())
            transfer = TransferParams(src_addr=ram_cursor, dst_addr=SCRATCHPAD_BASE + operand.offset,
                                      length=operand.nbytes)
            report.load_cycles += _run_engine_op(sim, Opcode.LOAD, transfer)
            ram_cursor = (ram_cursor + operand.nbytes + 3) & ~3

        report.busy_cycles = _run_engine_op(sim, OPCODES[op.kind], planned.params)
        result = sim.last_result
        report.cycles_compute = result.cycles_compute
        report.cycles_total = result.cycles_total
        report.mac_ops = result.mac_ops
        report.overflow_count = result.overflow_count
        if op.kind == OpKind.GEMM:
            p = planned.params
            eff = efficiency(result.cycles_total, p.m, p.n, p.k, sim.cfg.mac_units)
            report.min_cycles = eff.min_cycles
            report.efficiency = eff.ratio

        output = planned.output
        store = TransferParams(src_addr=SCRATCHPAD_BASE + output.offset, dst_addr=ram_cursor, length=output.nbytes)
        report.store_cycles = _run_engine_op(sim, Opcode.STORE, store)
        produced = np.frombuffer(sim.read_bytes(ram_cursor, output.nbytes), dtype="<i2").reshape(output.shape)
        report.output_crc32 = zlib.crc32(produced.tobytes())
    except PollTimeout as e:
        run.poll_timeouts += 1
        report.fault = str(e)
    except SimulationFault as e:
        run.faults += 1
        report.fault = str(e)

    if report.fault is not None:
        logger_NPU1S01.error(f"Op {op.name} aborted: {report.fault}")
        return report

    if manifest.oracle_check:
        expected = _oracle(planned, inputs)
        if produced.tolist() == expected:
            report.oracle = OracleOutcome.PASS
        else:
            report.oracle = OracleOutcome.FAIL
            run.oracle_failures += 1
            logger_NPU1S01.error(f"Op {op.name}: output differs from the reference")
    return report
# endregion


# region Main Function
def run_manifest(manifest: WorkloadManifest, seed=0, cfg: EngineConfig = None) -> WorkloadRun:
    """
    Run an already parsed manifest.

    Raises:
        ConfigError: an op does not describe a valid operation for cfg.
    """
    cfg = cfg or EngineConfig()
    planned_ops = [build_operation(op, cfg) for op in manifest.ops]

    sim = NpuSimulator(cfg)
    run = WorkloadRun(manifest_name=manifest.name, seed=seed, config=cfg, oracle_check=manifest.oracle_check)
    compute_cycles = 0
    for index, planned in enumerate(planned_ops):
        report = _execute_op(sim, planned, index, seed, manifest, run)
        compute_cycles += report.busy_cycles
        run.ops.append(report)
        logger_NPU1S01.info(f"Op {report.name} ({report.kind.value} {report.shape}): {report.cycles_total} cycles, "
                            f"oracle {report.oracle.value}")

    run.counters = sim.perf.snapshot()
    run.total_cycles = sim.cycle
    model = PerfModel(mac_units=cfg.mac_units, clock_hz=cfg.clock_hz, ops_per_mac=cfg.ops_per_mac)
    run.peak_ops_per_sec = peak_ops_per_sec(model)
    run.achieved_ops_per_sec = achieved_ops_per_sec(run.counters.mac_ops_retired, compute_cycles, cfg.clock_hz,
                                                    cfg.ops_per_mac)
    return run


def run_workload(path, seed=0, config_path=None) -> WorkloadServiceResponse:
    """
    Parse a manifest file, apply its [engine] overrides on top of the engine config and run it.

    Args:
        path (str | Path): Manifest file.
        seed (int): Run seed; all generated data derives from it.
        config_path (str | Path, optional): Engine INI replacing Config/engineConfig.ini.

    Returns:
        WorkloadServiceResponse: success False when the manifest or config is invalid.
    """
    try:
        manifest = parse_manifest(path)
        cfg = load_engine_config(config_path, manifest.engine_overrides)
        run = run_manifest(manifest, seed, cfg)
    except (ParseError, ConfigError) as e:
        logger_NPU1S01.error(f"{path}: {e}")
        return WorkloadServiceResponse(success=False, error=e)

    logger_NPU1S01.info(f"Workload {manifest.name}: {len(run.ops)} op(s), {run.oracle_failures} oracle failure(s), "
                        f"{run.faults} fault(s)")
    return WorkloadServiceResponse(success=True, data=run)
# endregion
