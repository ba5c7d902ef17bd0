"""
    Purpose:
    Single-clock, cycle-stepped model of the NPU SoC: memory system, neural
    registers, neural engine, DMA engine, performance counters and PCPI bridge.

    Description:
    - step() advances one clock: the bus arbiter grants one transaction (DMA before CPU),
      the DMA engine moves at most one burst, and the engine state machine ticks.
    - read32()/write32() are CPU transactions; each takes one cycle plus one stall
      cycle for every cycle the DMA holds the bus.
    - A START latched in the register file begins the operation on the same clock:
      compute operations are costed up front and their results are committed on the
      completion cycle; LOAD/STORE submit one DMA descriptor and complete with it.
    - Parameters that fail validation put the engine through one BUSY cycle and then
      DONE with the error bit set.
    - reset() is the synchronous reset: every component returns to its reset state.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
from npuSim.coreFunctions.DmaEngine import BackpressureSchedule, DmaEngine
from npuSim.coreFunctions.MemorySystem import MemorySystem
from npuSim.coreFunctions.NeuralEngine import NeuralEngine, decode_parameters, encode_parameters
from npuSim.coreFunctions.PcpiBridge import PcpiBridge
from npuSim.coreFunctions.PerfCounters import PerfCounters
from npuSim.coreFunctions.RegisterFile import RegisterFile
from npuSim.models.DmaModel import DmaDescriptor, TransferStatus
from npuSim.models.EngineModel import EngineConfig, OpResult, TransferParams
from npuSim.models.MemoryModel import BusMaster, BusTransaction, RegionKind, TransactionKind
from npuSim.models.RegisterModel import EngineState, Opcode, RegisterOffset
from utils.customerExceptions.cust_exceptions import SimulationFault
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion

NEURAL_REGS_BASE = 0x10000000
SCRATCHPAD_BASE = 0x10001000
PERF_COUNTERS_BASE = 0x30000000


class _ActiveOp:
    def __init__(self, opcode, params=None, planned=None, ticket=None, fault=None):
        self.opcode = opcode
        self.params = params
        self.planned = planned
        self.remaining = planned.cycles_total if planned else 0
        self.ticket = ticket
        self.fault = fault
        self.busy_cycles = 0


class _CycleOutcome:
    def __init__(self):
        self.cpu_granted = False
        self.value = None
        self.error = None


class NpuSimulator:
    def __init__(self, cfg: EngineConfig = None, backpressure: BackpressureSchedule = None):
        self.cfg = cfg or EngineConfig()
        self.memory = MemorySystem(scratchpad_size=self.cfg.scratchpad_size, clock=lambda: self.cycle)
        self.registers = RegisterFile()
        self.perf = PerfCounters()
        self.engine = NeuralEngine(self.cfg)
        self.dma = DmaEngine(burst_size=self.cfg.dma_burst_size, queue_depth=self.cfg.dma_queue_depth,
                             backpressure=backpressure)
        self.memory.attach(RegionKind.NEURAL_REGS, self.registers)
        self.memory.attach(RegionKind.PERF_COUNTERS, self.perf)
        self.pcpi = PcpiBridge(self)
        self.cycle = 0
        self.last_result = None
        self.last_fault = None
        self.history = []
        self._active = None

    def reset(self):
        self.memory.reset()
        self.registers.reset()
        self.perf.reset()
        self.dma.reset()
        self.pcpi.reset()
        self.cycle = 0
        self.last_result = None
        self.last_fault = None
        self.history = []
        self._active = None
        logger_NPU1S01.debug("Synchronous reset")

    @property
    def state(self) -> EngineState:
        return self.registers.state

    @property
    def scratchpad(self):
        return self.memory.scratchpad

    # region Clock
    def step(self, cycles=1):
        for _ in range(cycles):
            self._clock_cycle(None)

    def _clock_cycle(self, cpu_txn):
        self.cycle += 1
        self.perf.add("total_cycles", 1)
        outcome = _CycleOutcome()

        pending = [cpu_txn] if cpu_txn is not None else []
        dma_txn = self.dma.bus_request() if self.dma.wants_bus() else None
        if dma_txn is not None:
            pending.append(dma_txn)

        stalls_before = self.memory.arbiter.cpu_stall_cycles
        granted = self.memory.arbiter.grant_cycle(pending)
        self.perf.add("cpu_stall_cycles", self.memory.arbiter.cpu_stall_cycles - stalls_before)

        progress = self.dma.dma_step(self.memory, granted=dma_txn is not None and granted is dma_txn)
        if progress.moved is not None:
            self.perf.add("dma_bytes_moved", progress.moved.length)

        if cpu_txn is not None and granted is cpu_txn:
            outcome.cpu_granted = True
            try:
                outcome.value = self.memory.execute(cpu_txn)
            except SimulationFault as fault:
                outcome.error = fault

        self._tick_engine()
        return outcome

    def _cpu_access(self, txn):
        while True:
            outcome = self._clock_cycle(txn)
            if outcome.cpu_granted:
                if outcome.error is not None:
                    raise outcome.error
                return outcome.value

    def run_until_idle(self, max_cycles=1_000_000):
        """Step until the engine leaves BUSY and the DMA queue drains; returns cycles stepped."""
        start = self.cycle
        while self.registers.state == EngineState.BUSY or self.dma.busy:
            if self.cycle - start >= max_cycles:
                raise RuntimeError(f"engine still busy after {max_cycles} cycles")
            self._clock_cycle(None)
        return self.cycle - start
    # endregion

    # region Engine Sequencing
    def _begin(self, opcode: Opcode):
        try:
            params = decode_parameters(opcode, self.registers.parameters)
            if isinstance(params, TransferParams):
                descriptor = DmaDescriptor(src_addr=params.src_addr, dst_addr=params.dst_addr,
                                           length=params.length, stride=params.stride)
                ticket = self.dma.submit(descriptor, bus=self.memory)
                self._active = _ActiveOp(opcode, params, ticket=ticket)
            else:
                self._active = _ActiveOp(opcode, params, planned=self.engine.plan(params, self.scratchpad.size))
            self.last_fault = None
            logger_NPU1S01.info(f"{opcode.name} started at cycle {self.cycle}")
        except SimulationFault as fault:
            logger_NPU1S01.error(f"{opcode.name} rejected: {fault}")
            self.last_fault = fault
            self._active = _ActiveOp(opcode, fault=fault)

    def _tick_engine(self):
        opcode = self.registers.consume_start()
        if opcode is not None:
            self._begin(opcode)
        if self.registers.state != EngineState.BUSY or self._active is None:
            return

        active = self._active
        active.busy_cycles += 1
        self.perf.add("engine_busy_cycles", 1)
        result = None

        if active.fault is not None:
            self.registers.flag_error()
        elif active.ticket is not None:
            ticket = self.dma.status(active.ticket)
            if ticket.status == TransferStatus.IN_FLIGHT:
                self.registers.step_state(False)
                return
            self.dma.collect(active.ticket)
            if ticket.status == TransferStatus.FAILED:
                self.last_fault = SimulationFault(ticket.error)
                self.registers.flag_error()
            result = OpResult(cycles_compute=0, cycles_total=active.busy_cycles, work=ticket.bytes_moved,
                              output_addr=active.params.dst_addr, output_bytes=ticket.bytes_moved)
        else:
            active.remaining -= 1
            if active.remaining > 0:
                self.registers.step_state(False)
                return
            result = self.engine.execute(active.params, self.scratchpad)
            self.perf.add("mac_ops_retired", result.mac_ops)

        self.last_result = result
        if result is not None:
            self.history.append((active.opcode, result))
        self._active = None
        self.registers.step_state(True)
        logger_NPU1S01.info(f"{active.opcode.name} finished at cycle {self.cycle} after {active.busy_cycles} cycles")
    # endregion

    # region CPU Transactions
    def read32(self, addr) -> int:
        return self._cpu_access(BusTransaction(addr=addr & 0xFFFFFFFF, kind=TransactionKind.READ32))

    def write32(self, addr, word):
        self._cpu_access(BusTransaction(addr=addr & 0xFFFFFFFF, kind=TransactionKind.WRITE32, data=word & 0xFFFFFFFF))

    def program(self, opcode: Opcode, params=None, start=True):
        """MMIO sequence: write the parameter registers, then CONTROL."""
        words = encode_parameters(params) if params is not None else {}
        for offset, word in words.items():
            self.write32(NEURAL_REGS_BASE + offset, word)
        if start:
            self.write32(NEURAL_REGS_BASE + RegisterOffset.CONTROL, int(opcode) | 0x10)
    # endregion

    # region Backdoor Access
    def load_bytes(self, addr, payload: bytes):
        """Zero-cycle host write, as a debugger or image loader would do it."""
        self.memory.write_block(addr, payload, BusMaster.CPU)

    def read_bytes(self, addr, length) -> bytes:
        return self.memory.read_block(addr, length, BusMaster.CPU)

    def load_image(self, path, base):
        return self.memory.load_image(path, base)

    def dump_image(self, path, base, length):
        return self.memory.dump_image(path, base, length)

    def submit_dma(self, chain: DmaDescriptor) -> int:
        return self.dma.submit(chain, bus=self.memory)
    # endregion
