"""
    Purpose:
    The SoC address space: main RAM, neural registers, scratchpad, UART and
    performance counters, with address decoding and the CPU/DMA bus arbiter.

    Description:
    - decode() maps a 32-bit address to its region or raises BusFault.
    - MemorySystem routes 32-bit CPU transactions and DMA block transfers to the
      RAM arrays and the memory-mapped devices attached to it.
    - Faults are raised to the initiating master and kept in a fault log.
    - BusArbiter grants one transaction per cycle, DMA before CPU, and counts CPU stalls.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
from collections import deque
from pathlib import Path

import numpy as np

from npuSim.models.MemoryModel import (
    ADDR_MASK, BusMaster, BusTransaction, FaultRecord, MemoryMap, Region, RegionKind,
    TransactionKind, default_memory_map,
)
from utils.customerExceptions.cust_exceptions import AlignmentFault, ArbitrationError, BusFault
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion

MASTER_PRIORITY = {BusMaster.DMA: 0, BusMaster.CPU: 1}
BLOCK_REGIONS = (RegionKind.MAIN_RAM, RegionKind.SCRATCHPAD)

UART_DATA = 0x00
UART_STATUS = 0x04


# region Address Decode
def decode(memory_map: MemoryMap, addr: int) -> Region:
    """Return the unique region containing addr; raise BusFault when there is none."""
    if not 0 <= addr <= ADDR_MASK:
        raise BusFault("Address outside the 32-bit space", addr=addr & ADDR_MASK)
    for region in memory_map.regions:
        if region.contains(addr):
            return region
    raise BusFault("Address not mapped", addr=addr)
# endregion


# region Memories
class Ram:
    """Byte-addressable little-endian memory array."""

    def __init__(self, size: int):
        self.size = size
        self.data = np.zeros(size, dtype=np.uint8)

    def reset(self):
        self.data.fill(0)

    def read32(self, offset: int) -> int:
        return int(self.data[offset:offset + 4].view('<u4')[0])

    def write32(self, offset: int, word: int):
        self.data[offset:offset + 4] = np.frombuffer(int(word).to_bytes(4, 'little'), dtype=np.uint8)

    def read_bytes(self, offset: int, length: int) -> bytes:
        return self.data[offset:offset + length].tobytes()

    def write_bytes(self, offset: int, payload: bytes):
        self.data[offset:offset + len(payload)] = np.frombuffer(bytes(payload), dtype=np.uint8)


class Scratchpad(Ram):
    """
    Dual-port scratchpad. The bus port uses the Ram word/byte methods, the engine
    port reads and writes 16-bit elements.
    """

    def read_elements(self, offset: int, count: int) -> np.ndarray:
        return self.data[offset:offset + 2 * count].view('<i2').copy()

    def write_elements(self, offset: int, values):
        values = np.ascontiguousarray(values, dtype='<i2').ravel()
        self.data[offset:offset + 2 * values.size] = values.view(np.uint8)

    def dual_port_access(self, engine_offset: int, engine_count: int, bus_offset: int, word: int) -> np.ndarray:
        """
        One cycle with an engine-port read and a bus-port write.
        Same-address conflicts resolve write-first: the engine observes the new word.
        """
        self.write32(bus_offset, word)
        return self.read_elements(engine_offset, engine_count)


class UartModel:
    """Serial port without line timing: a write sends one byte, a read pops one byte (0 when empty)."""

    def __init__(self):
        self.tx_sink = bytearray()
        self.rx_source = deque()

    def reset(self):
        self.tx_sink.clear()
        self.rx_source.clear()

    def feed(self, payload: bytes):
        self.rx_source.extend(bytes(payload))

    def reg_read(self, offset: int) -> int:
        if offset == UART_DATA:
            return self.rx_source.popleft() if self.rx_source else 0
        if offset == UART_STATUS:
            # bit0 rx data available, bit1 tx ready
            return (1 if self.rx_source else 0) | 0x2
        return 0

    def reg_write(self, offset: int, word: int):
        if offset == UART_DATA:
            self.tx_sink.append(word & 0xFF)
# endregion


# region Arbitration
def arbitrate(pending):
    """
    Order the transactions presented in one cycle by grant priority (DMA first).

    Raises:
        ArbitrationError: more than one transaction from the same master.
    """
    pending = list(pending)
    masters = [txn.master for txn in pending]
    if len(set(masters)) != len(masters):
        raise ArbitrationError()
    return sorted(pending, key=lambda txn: MASTER_PRIORITY[txn.master])


class BusArbiter:
    """One grant per cycle; a CPU transaction loses a cycle whenever DMA contends."""

    def __init__(self):
        self.cpu_stall_cycles = 0
        self.grants = 0

    def reset(self):
        self.cpu_stall_cycles = 0
        self.grants = 0

    def grant_cycle(self, pending):
        order = arbitrate(pending)
        if not order:
            return None
        self.grants += 1
        self.cpu_stall_cycles += sum(1 for txn in order[1:] if txn.master == BusMaster.CPU)
        return order[0]
# endregion


# region Memory System
class MemorySystem:
    def __init__(self, memory_map: MemoryMap = None, scratchpad_size: int = 8192, clock=None):
        self.memory_map = memory_map or default_memory_map(scratchpad_size)
        self.ram = Ram(self.memory_map.region_of(RegionKind.MAIN_RAM).size)
        self.scratchpad = Scratchpad(self.memory_map.region_of(RegionKind.SCRATCHPAD).size)
        self.uart = UartModel()
        self.arbiter = BusArbiter()
        self.fault_log = []
        self._clock = clock or (lambda: 0)
        self._devices = {RegionKind.UART: self.uart}
        self._arrays = {RegionKind.MAIN_RAM: self.ram, RegionKind.SCRATCHPAD: self.scratchpad}

    def attach(self, kind: RegionKind, device):
        """Attach a memory-mapped device exposing reg_read(offset) / reg_write(offset, word)."""
        self._devices[kind] = device

    def reset(self):
        self.ram.reset()
        self.scratchpad.reset()
        self.uart.reset()
        self.arbiter.reset()
        self.fault_log.clear()

    def decode(self, addr: int) -> Region:
        return decode(self.memory_map, addr)

    # region Word Access
    def _locate(self, addr, master):
        try:
            if addr % 4:
                raise AlignmentFault(addr=addr)
            return self.decode(addr)
        except (BusFault, AlignmentFault) as fault:
            self._record(master, addr, fault)
            raise

    def _record(self, master, addr, fault):
        self.fault_log.append(FaultRecord(cycle=self._clock(), master=master, addr=addr & ADDR_MASK, reason=str(fault)))
        logger_NPU1S01.warning(f"{master.value} fault: {fault}")

    def read32(self, addr: int, master: BusMaster = BusMaster.CPU) -> int:
        region = self._locate(addr, master)
        offset = addr - region.base
        if region.kind in self._arrays:
            return self._arrays[region.kind].read32(offset)
        device = self._devices.get(region.kind)
        return device.reg_read(offset) if device else 0

    def write32(self, addr: int, word: int, master: BusMaster = BusMaster.CPU):
        region = self._locate(addr, master)
        offset = addr - region.base
        word &= 0xFFFFFFFF
        if region.kind in self._arrays:
            self._arrays[region.kind].write32(offset, word)
            return
        device = self._devices.get(region.kind)
        if device:
            device.reg_write(offset, word)

    def execute(self, txn: BusTransaction):
        """Perform a granted transaction; returns the read word, or None for writes."""
        if txn.kind == TransactionKind.READ32:
            return self.read32(txn.addr, txn.master)
        self.write32(txn.addr, txn.data, txn.master)
        return None
    # endregion

    # region Block Access
    def _block_target(self, addr, length, master):
        try:
            region = self.decode(addr)
            if region.kind not in BLOCK_REGIONS:
                raise BusFault(f"Block transfer into {region.kind.value}", addr=addr)
            if not region.contains(addr + length - 1):
                raise BusFault(f"Block of {length} bytes crosses the end of {region.kind.value}", addr=addr)
            return self._arrays[region.kind], addr - region.base
        except BusFault as fault:
            self._record(master, addr, fault)
            raise

    def check_block(self, addr: int, length: int, master: BusMaster = BusMaster.DMA):
        """Raise BusFault unless [addr, addr+length) lies inside one RAM or scratchpad region."""
        self._block_target(addr, length, master)

    def read_block(self, addr: int, length: int, master: BusMaster = BusMaster.DMA) -> bytes:
        array, offset = self._block_target(addr, length, master)
        return array.read_bytes(offset, length)

    def write_block(self, addr: int, payload: bytes, master: BusMaster = BusMaster.DMA):
        array, offset = self._block_target(addr, len(payload), master)
        array.write_bytes(offset, payload)
    # endregion

    # region Memory Images
    def load_image(self, path, base: int) -> int:
        """Copy a raw little-endian image file into memory at base; returns the byte count."""
        payload = Path(path).read_bytes()
        if payload:
            self.write_block(base, payload, BusMaster.CPU)
        logger_NPU1S01.debug(f"Loaded {len(payload)} bytes from {path} at 0x{base:08X}")
        return len(payload)

    def dump_image(self, path, base: int, length: int) -> int:
        payload = self.read_block(base, length, BusMaster.CPU) if length else b""
        Path(path).write_bytes(payload)
        logger_NPU1S01.debug(f"Dumped {length} bytes at 0x{base:08X} to {path}")
        return length
    # endregion
# endregion
