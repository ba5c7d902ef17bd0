from enum import Enum
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field

from npuSim.models.EngineModel import ConvParams, EngineConfig, GemmParams, PoolParams, ReluParams
from npuSim.models.PerfModel import PerfSnapshot


class OpKind(str, Enum):
    GEMM = "gemm"
    CONV = "conv"
    POOL = "pool"
    RELU = "relu"


class OracleOutcome(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class OpSpec(BaseModel):
    """One [op.<name>] section: params are the op's fields, inputs map operand name -> data source."""
    name: str
    kind: OpKind
    params: Dict[str, str] = {}
    inputs: Dict[str, str] = {}
    seed: Optional[int] = None


class WorkloadManifest(BaseModel):
    name: str = "workload"
    oracle_check: bool = True
    engine_overrides: Dict[str, str] = {}
    ops: List[OpSpec] = []
    base_dir: str = "."


class OpReport(BaseModel):
    name: str
    kind: OpKind
    shape: str
    cycles_compute: int = 0
    cycles_total: int = 0
    busy_cycles: int = 0
    min_cycles: Optional[int] = None
    efficiency: Optional[float] = None
    mac_ops: int = 0
    overflow_count: int = 0
    load_cycles: int = 0
    store_cycles: int = 0
    oracle: OracleOutcome = OracleOutcome.SKIPPED
    output_crc32: Optional[int] = None
    fault: Optional[str] = None


class WorkloadRun(BaseModel):
    manifest_name: str
    seed: int
    config: EngineConfig
    oracle_check: bool
    ops: List[OpReport] = []
    counters: PerfSnapshot = PerfSnapshot()
    peak_ops_per_sec: int = 0
    achieved_ops_per_sec: float = 0.0
    oracle_failures: int = 0
    poll_timeouts: int = 0
    faults: int = 0
    total_cycles: int = Field(default=0, ge=0)

    @property
    def exit_status(self):
        return 1 if self.oracle_failures or self.poll_timeouts else 0


class StagedOperand(BaseModel):
    """An operand placed in the scratchpad: byte offset and element shape."""
    name: str
    offset: int = Field(ge=0)
    shape: List[int]
    source: str = "random"

    @property
    def nbytes(self):
        count = 1
        for dim in self.shape:
            count *= dim
        return count * 2


class PlannedOperation(BaseModel):
    spec: OpSpec
    params: Union[GemmParams, ConvParams, PoolParams, ReluParams]
    operands: List[StagedOperand]
    output: StagedOperand
