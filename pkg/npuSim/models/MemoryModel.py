from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator

ADDR_MASK = 0xFFFFFFFF
WORD_MASK = 0xFFFFFFFF


class RegionKind(str, Enum):
    MAIN_RAM = "MainRam"
    NEURAL_REGS = "NeuralRegs"
    SCRATCHPAD = "Scratchpad"
    UART = "Uart"
    PERF_COUNTERS = "PerfCounters"


class Region(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: int = Field(ge=0, le=ADDR_MASK)
    limit: int = Field(ge=0, le=ADDR_MASK)
    kind: RegionKind

    @property
    def size(self):
        return self.limit - self.base + 1

    def contains(self, addr):
        return self.base <= addr <= self.limit

    @model_validator(mode="after")
    def check_bounds(self):
        if self.limit < self.base:
            raise ValueError(f"region {self.kind.value}: limit below base")
        return self


class MemoryMap(BaseModel):
    model_config = ConfigDict(frozen=True)

    regions: List[Region]

    @model_validator(mode="after")
    def check_disjoint(self):
        ordered = sorted(self.regions, key=lambda region: region.base)
        for left, right in zip(ordered, ordered[1:]):
            if right.base <= left.limit:
                raise ValueError(f"regions {left.kind.value} and {right.kind.value} overlap")
        return self

    def region_of(self, kind: RegionKind) -> Region:
        for region in self.regions:
            if region.kind == kind:
                return region
        raise KeyError(kind)


DEFAULT_REGIONS = (
    Region(base=0x00000000, limit=0x00003FFF, kind=RegionKind.MAIN_RAM),
    Region(base=0x10000000, limit=0x100000FF, kind=RegionKind.NEURAL_REGS),
    Region(base=0x10001000, limit=0x10002FFF, kind=RegionKind.SCRATCHPAD),
    Region(base=0x20000000, limit=0x200000FF, kind=RegionKind.UART),
    Region(base=0x30000000, limit=0x300000FF, kind=RegionKind.PERF_COUNTERS),
)


def default_memory_map(scratchpad_size=8192) -> MemoryMap:
    """SoC address space; the scratchpad window shrinks when the tile has a smaller scratchpad."""
    regions = list(DEFAULT_REGIONS)
    scratchpad = regions[2]
    if scratchpad_size > scratchpad.size:
        raise ValueError(f"scratchpad of {scratchpad_size} bytes does not fit its {scratchpad.size}-byte window")
    if scratchpad_size != scratchpad.size:
        regions[2] = Region(base=scratchpad.base, limit=scratchpad.base + scratchpad_size - 1, kind=RegionKind.SCRATCHPAD)
    return MemoryMap(regions=regions)


class TransactionKind(str, Enum):
    READ32 = "Read32"
    WRITE32 = "Write32"


class BusMaster(str, Enum):
    CPU = "Cpu"
    DMA = "Dma"


class BusTransaction(BaseModel):
    model_config = ConfigDict(frozen=True)

    addr: int = Field(ge=0, le=ADDR_MASK)
    kind: TransactionKind
    data: int = Field(default=0, ge=0, le=WORD_MASK)
    master: BusMaster = BusMaster.CPU


class FaultRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    cycle: int
    master: BusMaster
    addr: int
    reason: str
