from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class PerfModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    mac_units: int = Field(default=16, gt=0)
    clock_hz: int = Field(default=100_000_000, gt=0)
    # 2 counts multiply and add separately, 1 counts a MAC as one op
    ops_per_mac: Literal[1, 2] = 2


class PerfSnapshot(BaseModel):
    model_config = ConfigDict(frozen=True)

    total_cycles: int = 0
    engine_busy_cycles: int = 0
    mac_ops_retired: int = 0
    dma_bytes_moved: int = 0
    cpu_stall_cycles: int = 0


class EfficiencyResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    min_cycles: int
    measured_cycles: int
    ratio: float
    anomaly: bool


class ScalingPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    mac_units: int
    peak_ops_per_sec: int
    peak_macs_per_sec: int
    min_cycles: int
    cycles_total: int
    utilization: float
    achieved_ops_per_sec: float


class BufferPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    buffer_bytes: int
    mac_units: int
    gemm_dim: int
    cycles_total: int
    utilization: float
