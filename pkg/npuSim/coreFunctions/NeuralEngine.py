"""
    Purpose:
    Executes the engine's microcoded operations (GEMM, CONV, POOL, RELU) over
    scratchpad data with deterministic cycle accounting.

    Description:
    - Operands are row-major int16 arrays at scratchpad byte offsets (2 bytes per element).
    - cycles_compute = ceil(work / mac_units), where work is the MAC count (GEMM, CONV)
      or the element count (POOL window reads, RELU elements).
    - cycles_total = cycles_compute + setup_cycles + ceil(output_bytes / writeback_bytes_per_beat).
    - Every operation validates its footprints first and raises FootprintFault before touching data.
    - decode_parameters() turns the parameter registers into typed parameters for an opcode.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from pydantic import ValidationError

from npuSim.coreFunctions.Numerics import relu_array, requantize_array, saturate48_array
from npuSim.models.EngineModel import (
    BYTES_PER_ELEMENT, ConvParams, EngineConfig, GemmParams, OpResult, PoolMode, PoolParams,
    ReluParams, TransferParams,
)
from npuSim.models.NumericsModel import Rounding, ScaleSpec
from npuSim.models.RegisterModel import SCALE_ROUND_BIT, SCALE_SHIFT_MASK, Opcode, RegisterOffset
from utils.customerExceptions.cust_exceptions import FootprintFault
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion


def ceil_div(numerator, denominator):
    return -(-numerator // denominator)


# region Footprints
def check_footprints(spm_size, inputs, output, allow_in_place=False):
    """
    Validate (name, offset, nbytes) footprints against the scratchpad.

    Raises:
        FootprintFault: misaligned offset, footprint past the scratchpad end, or an
            output overlapping an input (exact in-place is allowed when requested).
    """
    for name, start, nbytes in (*inputs, output):
        if start % BYTES_PER_ELEMENT:
            raise FootprintFault(f"{name} offset 0x{start:X} is not element aligned")
        if start + nbytes > spm_size:
            raise FootprintFault(f"{name} [0x{start:X}, 0x{start + nbytes:X}) exceeds the {spm_size}-byte scratchpad")

    out_name, out_start, out_bytes = output
    for name, start, nbytes in inputs:
        if allow_in_place and start == out_start and nbytes == out_bytes:
            continue
        if start < out_start + out_bytes and out_start < start + nbytes:
            raise FootprintFault(f"{out_name} overlaps {name}")


def gemm_footprints(p: GemmParams):
    return (
        [("A", p.a_addr, p.m * p.k * BYTES_PER_ELEMENT), ("B", p.b_addr, p.k * p.n * BYTES_PER_ELEMENT)],
        ("C", p.c_addr, p.m * p.n * BYTES_PER_ELEMENT),
    )


def conv_footprints(p: ConvParams):
    return (
        [("input", p.input_addr, p.in_c * p.in_h * p.in_w * BYTES_PER_ELEMENT),
         ("weights", p.weight_addr, p.out_c * p.in_c * p.kernel_h * p.kernel_w * BYTES_PER_ELEMENT)],
        ("output", p.output_addr, p.out_c * p.out_h * p.out_w * BYTES_PER_ELEMENT),
    )


def pool_footprints(p: PoolParams):
    return (
        [("input", p.input_addr, p.channels * p.in_h * p.in_w * BYTES_PER_ELEMENT)],
        ("output", p.output_addr, p.channels * p.out_h * p.out_w * BYTES_PER_ELEMENT),
    )


def relu_footprints(p: ReluParams):
    nbytes = p.count * BYTES_PER_ELEMENT
    return [("src", p.src_addr, nbytes)], ("dst", p.dst_addr, nbytes)
# endregion


# region Cost Model
def op_cost(cfg: EngineConfig, work, output_bytes, mac_ops=0, overflow_count=0, output_addr=0):
    cycles_compute = ceil_div(work, cfg.mac_units)
    cycles_writeback = ceil_div(output_bytes, cfg.writeback_bytes_per_beat)
    return OpResult(
        cycles_compute=cycles_compute,
        cycles_total=cycles_compute + cfg.setup_cycles + cycles_writeback,
        overflow_count=overflow_count,
        work=work,
        mac_ops=mac_ops,
        output_addr=output_addr,
        output_bytes=output_bytes,
    )


def gemm_work(p: GemmParams):
    return p.m * p.n * p.k


def conv_work(p: ConvParams):
    return p.out_c * p.out_h * p.out_w * p.in_c * p.kernel_h * p.kernel_w


def pool_work(p: PoolParams):
    return p.channels * p.out_h * p.out_w * p.window_h * p.window_w


def plan(cfg: EngineConfig, params, spm_size=None):
    """Validate footprints and cost an operation without touching data."""
    spm_size = spm_size or cfg.scratchpad_size
    if isinstance(params, GemmParams):
        inputs, output = gemm_footprints(params)
        check_footprints(spm_size, inputs, output)
        work, macs = gemm_work(params), gemm_work(params)
    elif isinstance(params, ConvParams):
        inputs, output = conv_footprints(params)
        check_footprints(spm_size, inputs, output)
        work, macs = conv_work(params), conv_work(params)
    elif isinstance(params, PoolParams):
        inputs, output = pool_footprints(params)
        check_footprints(spm_size, inputs, output)
        work, macs = pool_work(params), 0
    elif isinstance(params, ReluParams):
        inputs, output = relu_footprints(params)
        check_footprints(spm_size, inputs, output, allow_in_place=True)
        work, macs = params.count, 0
    else:
        raise TypeError(f"No engine operation for {type(params).__name__}")
    return op_cost(cfg, work, output[2], mac_ops=macs, output_addr=output[1])
# endregion


# region Operations
def execute_gemm(cfg: EngineConfig, p: GemmParams, spm) -> OpResult:
    """C[m][n] = requantize(sum_k A[m][k] * B[k][n]) written at c_addr."""
    planned = plan(cfg, p, spm.size)

    a = spm.read_elements(p.a_addr, p.m * p.k).astype(np.int64).reshape(p.m, p.k)
    b = spm.read_elements(p.b_addr, p.k * p.n).astype(np.int64).reshape(p.k, p.n)
    # partial sums of scratchpad-resident operands stay well inside 48 bits
    acc, acc_saturated = saturate48_array(a @ b)
    out, out_saturated = requantize_array(acc, p.scale)
    spm.write_elements(p.c_addr, out)

    overflow = int(np.count_nonzero(acc_saturated | out_saturated))
    logger_NPU1S01.debug(f"GEMM {p.m}x{p.n}x{p.k}: {planned.cycles_compute} compute cycles, {overflow} saturated")
    return planned.model_copy(update={"overflow_count": overflow})


def execute_conv(cfg: EngineConfig, p: ConvParams, spm) -> OpResult:
    """Zero-padded cross-correlation, accumulated one kernel tap at a time."""
    planned = plan(cfg, p, spm.size)

    x = spm.read_elements(p.input_addr, p.in_c * p.in_h * p.in_w).astype(np.int64).reshape(p.in_c, p.in_h, p.in_w)
    w = spm.read_elements(p.weight_addr, p.out_c * p.in_c * p.kernel_h * p.kernel_w).astype(np.int64)
    w = w.reshape(p.out_c, p.in_c, p.kernel_h, p.kernel_w)
    xp = np.pad(x, ((0, 0), (p.padding, p.padding), (p.padding, p.padding)))

    out_h, out_w, s = p.out_h, p.out_w, p.stride
    acc = np.zeros((p.out_c, out_h, out_w), dtype=np.int64)
    for i in range(p.kernel_h):
        for j in range(p.kernel_w):
            patch = xp[:, i:i + s * (out_h - 1) + 1:s, j:j + s * (out_w - 1) + 1:s]
            acc += np.tensordot(w[:, :, i, j], patch, axes=([1], [0]))

    acc, acc_saturated = saturate48_array(acc)
    out, out_saturated = requantize_array(acc, p.scale)
    spm.write_elements(p.output_addr, out)

    overflow = int(np.count_nonzero(acc_saturated | out_saturated))
    logger_NPU1S01.debug(f"CONV {p.in_c}x{p.in_h}x{p.in_w} -> {p.out_c}x{out_h}x{out_w}: {planned.cycles_compute} compute cycles")
    return planned.model_copy(update={"overflow_count": overflow})


def execute_pool(cfg: EngineConfig, p: PoolParams, spm) -> OpResult:
    """Max: window maximum. Avg: window sum divided by window size, truncated toward zero."""
    planned = plan(cfg, p, spm.size)

    x = spm.read_elements(p.input_addr, p.channels * p.in_h * p.in_w).astype(np.int64)
    x = x.reshape(p.channels, p.in_h, p.in_w)
    windows = sliding_window_view(x, (p.window_h, p.window_w), axis=(1, 2))[:, ::p.stride, ::p.stride]

    if p.mode == PoolMode.MAX:
        out = windows.max(axis=(-2, -1))
    else:
        sums = windows.sum(axis=(-2, -1))
        quotient = np.abs(sums) // (p.window_h * p.window_w)
        out = np.where(sums < 0, -quotient, quotient)

    spm.write_elements(p.output_addr, out.astype(np.int16))
    return planned


def execute_relu(cfg: EngineConfig, count, src, dst, spm) -> OpResult:
    p = ReluParams(count=count, src_addr=src, dst_addr=dst)
    planned = plan(cfg, p, spm.size)
    spm.write_elements(dst, relu_array(spm.read_elements(src, count)))
    return planned
# endregion


# region Register Decoding
def decode_scale(word) -> ScaleSpec:
    rounding = Rounding.ROUND_HALF_UP if word & SCALE_ROUND_BIT else Rounding.TRUNCATE
    return ScaleSpec(right_shift=min(word & SCALE_SHIFT_MASK, 47), rounding=rounding)


def encode_scale(scale: ScaleSpec) -> int:
    return scale.right_shift | (SCALE_ROUND_BIT if scale.rounding == Rounding.ROUND_HALF_UP else 0)


def decode_parameters(opcode: Opcode, registers):
    """
    Build typed parameters from the parameter registers (offset -> word).

    Raises:
        FootprintFault: the register values do not describe a valid operation.
    """
    r = {RegisterOffset(offset): value for offset, value in registers.items()}
    try:
        if opcode == Opcode.GEMM:
            return GemmParams(m=r[RegisterOffset.M], n=r[RegisterOffset.N], k=r[RegisterOffset.K],
                              a_addr=r[RegisterOffset.SRC_A], b_addr=r[RegisterOffset.SRC_B],
                              c_addr=r[RegisterOffset.DST], scale=decode_scale(r[RegisterOffset.SCALE]))
        if opcode == Opcode.CONV:
            return ConvParams(in_h=r[RegisterOffset.M], in_w=r[RegisterOffset.N], in_c=r[RegisterOffset.K],
                              out_c=r[RegisterOffset.PARAM0], kernel_h=r[RegisterOffset.PARAM1],
                              kernel_w=r[RegisterOffset.PARAM2], stride=r[RegisterOffset.PARAM3],
                              padding=r[RegisterOffset.PARAM4], input_addr=r[RegisterOffset.SRC_A],
                              weight_addr=r[RegisterOffset.SRC_B], output_addr=r[RegisterOffset.DST],
                              scale=decode_scale(r[RegisterOffset.SCALE]))
        if opcode == Opcode.POOL:
            return PoolParams(mode=PoolMode.AVG if r[RegisterOffset.PARAM0] & 1 else PoolMode.MAX,
                              window_h=r[RegisterOffset.PARAM1], window_w=r[RegisterOffset.PARAM2],
                              stride=r[RegisterOffset.PARAM3], in_h=r[RegisterOffset.M], in_w=r[RegisterOffset.N],
                              channels=r[RegisterOffset.K], input_addr=r[RegisterOffset.SRC_A],
                              output_addr=r[RegisterOffset.DST])
        if opcode == Opcode.RELU:
            return ReluParams(count=r[RegisterOffset.M], src_addr=r[RegisterOffset.SRC_A], dst_addr=r[RegisterOffset.DST])
        return TransferParams(src_addr=r[RegisterOffset.SRC_A], dst_addr=r[RegisterOffset.DST],
                              length=r[RegisterOffset.M], stride=r[RegisterOffset.PARAM0])
    except ValidationError as e:
        raise FootprintFault(f"Invalid {opcode.name} parameters: {e.error_count()} field error(s)") from e


def encode_parameters(params):
    """Inverse of decode_parameters: parameter register values (offset -> word) for params."""
    words = {}
    if isinstance(params, GemmParams):
        words = {RegisterOffset.M: params.m, RegisterOffset.N: params.n, RegisterOffset.K: params.k,
                 RegisterOffset.SRC_A: params.a_addr, RegisterOffset.SRC_B: params.b_addr,
                 RegisterOffset.DST: params.c_addr, RegisterOffset.SCALE: encode_scale(params.scale)}
    elif isinstance(params, ConvParams):
        words = {RegisterOffset.M: params.in_h, RegisterOffset.N: params.in_w, RegisterOffset.K: params.in_c,
                 RegisterOffset.SRC_A: params.input_addr, RegisterOffset.SRC_B: params.weight_addr,
                 RegisterOffset.DST: params.output_addr, RegisterOffset.SCALE: encode_scale(params.scale),
                 RegisterOffset.PARAM0: params.out_c, RegisterOffset.PARAM1: params.kernel_h,
                 RegisterOffset.PARAM2: params.kernel_w, RegisterOffset.PARAM3: params.stride,
                 RegisterOffset.PARAM4: params.padding}
    elif isinstance(params, PoolParams):
        words = {RegisterOffset.M: params.in_h, RegisterOffset.N: params.in_w, RegisterOffset.K: params.channels,
                 RegisterOffset.SRC_A: params.input_addr, RegisterOffset.DST: params.output_addr,
                 RegisterOffset.PARAM0: 1 if params.mode == PoolMode.AVG else 0,
                 RegisterOffset.PARAM1: params.window_h, RegisterOffset.PARAM2: params.window_w,
                 RegisterOffset.PARAM3: params.stride}
    elif isinstance(params, ReluParams):
        words = {RegisterOffset.M: params.count, RegisterOffset.SRC_A: params.src_addr,
                 RegisterOffset.DST: params.dst_addr}
    elif isinstance(params, TransferParams):
        words = {RegisterOffset.M: params.length, RegisterOffset.SRC_A: params.src_addr,
                 RegisterOffset.DST: params.dst_addr, RegisterOffset.PARAM0: params.stride}
    return {int(offset): int(value) & 0xFFFFFFFF for offset, value in words.items()}
# endregion


# region Engine
class NeuralEngine:
    """Dispatches decoded operations to the datapath for one engine configuration."""

    def __init__(self, cfg: EngineConfig):
        self.cfg = cfg

    def plan(self, params, spm_size=None) -> OpResult:
        return plan(self.cfg, params, spm_size)

    def execute(self, params, spm) -> OpResult:
        if isinstance(params, GemmParams):
            return execute_gemm(self.cfg, params, spm)
        if isinstance(params, ConvParams):
            return execute_conv(self.cfg, params, spm)
        if isinstance(params, PoolParams):
            return execute_pool(self.cfg, params, spm)
        if isinstance(params, ReluParams):
            return execute_relu(self.cfg, params.count, params.src_addr, params.dst_addr, spm)
        raise TypeError(f"No engine operation for {type(params).__name__}")
# endregion
