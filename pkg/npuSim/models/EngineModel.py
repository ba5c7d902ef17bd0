from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from npuSim.models.NumericsModel import ScaleSpec

BYTES_PER_ELEMENT = 2


class EngineConfig(BaseModel):
    """Neural engine tile parameters; defaults are the reference tile."""
    model_config = ConfigDict(frozen=True)

    mac_units: int = Field(default=16, ge=4, le=32)
    # bounded by the 8 KB scratchpad window of the memory map
    scratchpad_size: int = Field(default=8192, ge=64, le=8192, multiple_of=4)
    dma_burst_size: int = Field(default=64, gt=0)
    data_width: Literal[16] = 16
    addr_width: Literal[32] = 32
    clock_hz: int = Field(default=100_000_000, gt=0)
    frac_bits: int = Field(default=8, ge=0, le=15)
    setup_cycles: int = Field(default=16, ge=0)
    writeback_bytes_per_beat: int = Field(default=4, gt=0)
    dma_queue_depth: int = Field(default=8, gt=0)
    ops_per_mac: Literal[1, 2] = 2
    board_reported_gemm_cycles: int = Field(default=156, gt=0)


class GemmParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int = Field(gt=0)
    n: int = Field(gt=0)
    k: int = Field(gt=0)
    a_addr: int = Field(ge=0)
    b_addr: int = Field(ge=0)
    c_addr: int = Field(ge=0)
    scale: ScaleSpec = ScaleSpec()


class ConvParams(BaseModel):
    """Input [in_c][in_h][in_w], weights [out_c][in_c][kernel_h][kernel_w], output [out_c][out_h][out_w]."""
    model_config = ConfigDict(frozen=True)

    in_h: int = Field(gt=0)
    in_w: int = Field(gt=0)
    in_c: int = Field(gt=0)
    out_c: int = Field(gt=0)
    kernel_h: int = Field(gt=0)
    kernel_w: int = Field(gt=0)
    stride: int = Field(default=1, gt=0)
    padding: int = Field(default=0, ge=0)
    input_addr: int = Field(ge=0)
    weight_addr: int = Field(ge=0)
    output_addr: int = Field(ge=0)
    scale: ScaleSpec = ScaleSpec()

    @property
    def out_h(self):
        return (self.in_h + 2 * self.padding - self.kernel_h) // self.stride + 1

    @property
    def out_w(self):
        return (self.in_w + 2 * self.padding - self.kernel_w) // self.stride + 1

    @model_validator(mode="after")
    def check_output_dims(self):
        if self.in_h + 2 * self.padding < self.kernel_h or self.in_w + 2 * self.padding < self.kernel_w:
            raise ValueError("kernel larger than padded input; output dims must be positive")
        return self


class PoolMode(str, Enum):
    MAX = "max"
    AVG = "avg"


class PoolParams(BaseModel):
    """Input [channels][in_h][in_w], output [channels][out_h][out_w]."""
    model_config = ConfigDict(frozen=True)

    mode: PoolMode = PoolMode.MAX
    window_h: int = Field(gt=0)
    window_w: int = Field(gt=0)
    stride: int = Field(gt=0)
    in_h: int = Field(gt=0)
    in_w: int = Field(gt=0)
    channels: int = Field(default=1, gt=0)
    input_addr: int = Field(ge=0)
    output_addr: int = Field(ge=0)

    @property
    def out_h(self):
        return (self.in_h - self.window_h) // self.stride + 1

    @property
    def out_w(self):
        return (self.in_w - self.window_w) // self.stride + 1

    @model_validator(mode="after")
    def check_windows(self):
        if self.window_h > self.in_h or self.window_w > self.in_w:
            raise ValueError("pooling window larger than input; output dims must be positive")
        return self


class ReluParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    count: int = Field(gt=0)
    src_addr: int = Field(ge=0)
    dst_addr: int = Field(ge=0)


class TransferParams(BaseModel):
    """LOAD/STORE: bus addresses on both sides."""
    model_config = ConfigDict(frozen=True)

    src_addr: int = Field(ge=0)
    dst_addr: int = Field(ge=0)
    length: int = Field(gt=0)
    stride: int = Field(default=0, ge=0)


class OpResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    cycles_compute: int = Field(ge=0)
    cycles_total: int = Field(ge=0)
    overflow_count: int = Field(default=0, ge=0)
    work: int = Field(default=0, ge=0)
    mac_ops: int = Field(default=0, ge=0)
    output_addr: int = 0
    output_bytes: int = 0

    @model_validator(mode="after")
    def check_totals(self):
        if self.cycles_total < self.cycles_compute:
            raise ValueError("cycles_total must be >= cycles_compute")
        return self
