"""
    Purpose:
    Replays a register-transaction script against a fresh simulator and returns the
    trace and exit status.

    Description:
    - Parses the whole script first; a ParseError stops the run before any command executes.
    - Executes commands in order. Every bus transaction is traced in the board log format.
    - A failed expect or a poll that runs out of cycles is logged at [ERROR] and counted;
      execution carries on with the next command.
    - Bus and engine faults are logged at [ERROR] and counted. A fault only changes the exit
      status when it breaks an expect or a wait: a poll whose read faults, or a dma-wait
      covering a transfer that was rejected or failed, counts as a failed poll. So does a
      pcpi-poll whose response carries the error bit.
    - Exit status: 0 with no expect mismatches, poll timeouts or failed polls, 1 otherwise.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
from pathlib import Path

from npuSim.coreFunctions.PcpiBridge import encode_instruction
from npuSim.coreFunctions.RegisterFile import describe_status
from npuSim.coreFunctions.ScriptParser import parse_script
from npuSim.coreFunctions.Simulator import NEURAL_REGS_BASE, NpuSimulator
from npuSim.coreFunctions.TransactionTrace import TransactionTrace
from npuSim.models.DmaModel import DmaDescriptor, TransferStatus
from npuSim.models.EngineModel import EngineConfig
from npuSim.models.PcpiModel import PcpiFunction, PcpiRequest
from npuSim.models.RegisterModel import STATUS_ERROR, Opcode, RegisterOffset
from npuSim.models.ScriptModel import (
    DmaCommand, DmaWaitCommand, DumpImageCommand, LoadImageCommand, PcpiIssueCommand, PcpiPollCommand, PollCommand,
    ReadCommand, ScriptRunResult, StepCommand, WriteCommand,
)
from utils.customerExceptions.cust_exceptions import ExpectMismatch, ParseError, PollTimeout, SimulationFault
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion

STATUS_ADDR = NEURAL_REGS_BASE + RegisterOffset.STATUS


# region Response Class
class ScriptServiceResponse:
    def __init__(self, success: bool, data: ScriptRunResult = None, error: Exception = None):
        self.success = success
        self.data = data
        self.error = error
# endregion


# region Script Runner
class _ScriptRun:
    def __init__(self, sim: NpuSimulator):
        self.sim = sim
        self.trace = TransactionTrace(sim.memory)
        self.expect_mismatches = 0
        self.poll_timeouts = 0
        self.faults = 0
        self.failed_polls = 0
        self.tickets = []
        self.rejected_transfers = 0

    def fault(self, error):
        self.faults += 1
        self.trace.error(str(error))

    def mismatch(self, error: ExpectMismatch):
        self.expect_mismatches += 1
        self.trace.error(str(error))

    def timeout(self, error: PollTimeout):
        self.poll_timeouts += 1
        self.trace.error(str(error))

    def failed_poll(self, error):
        self.fault(error)
        self.failed_polls += 1

    # region Commands
    def write(self, cmd: WriteCommand):
        self.trace.action("Writing", cmd.addr)
        try:
            self.sim.write32(cmd.addr, cmd.word)
        except SimulationFault as e:
            self.fault(e)
            return
        self.trace.value(cmd.addr, cmd.word)

    def read(self, cmd: ReadCommand):
        self.trace.action("Reading", cmd.addr)
        try:
            word = self.sim.read32(cmd.addr)
        except SimulationFault as e:
            self.fault(e)
            if cmd.expect is not None:
                self.mismatch(ExpectMismatch(f"Expected 0x{cmd.expect:08X} @ 0x{cmd.addr:08X}, access faulted"))
            return
        self.trace.value(cmd.addr, word)
        if cmd.expect is not None and word != cmd.expect:
            self.mismatch(ExpectMismatch(f"Expected 0x{cmd.expect:08X}, got 0x{word:08X} @ 0x{cmd.addr:08X}"))

    def poll(self, cmd: PollCommand):
        if cmd.addr == STATUS_ADDR:
            self.trace.info("Polling for completion...")
        else:
            self.trace.action("Polling", cmd.addr)

        start = self.sim.cycle
        while True:
            try:
                word = self.sim.read32(cmd.addr)
            except SimulationFault as e:
                self.failed_poll(e)
                return
            elapsed = self.sim.cycle - start
            if word & cmd.mask == cmd.value:
                break
            if elapsed >= cmd.timeout:
                self.timeout(PollTimeout(f"Poll timed out after {elapsed} cycles @ 0x{cmd.addr:08X}: "
                                         f"0x{word:08X} & 0x{cmd.mask:08X} != 0x{cmd.value:08X}"))
                return

        if cmd.addr == STATUS_ADDR:
            cycles = self.sim.registers.reg_read(RegisterOffset.CYCLE_COUNT)
        else:
            cycles = elapsed
        self.trace.value(cmd.addr, word, suffix=f" after {cycles} cycles")

    def step(self, cmd: StepCommand):
        self.sim.step(cmd.cycles)
        logger_NPU1S01.debug(f"Stepped {cmd.cycles} cycles, now at cycle {self.sim.cycle}")

    def load_image(self, cmd: LoadImageCommand):
        try:
            count = self.sim.load_image(cmd.path, cmd.base)
        except (OSError, SimulationFault) as e:
            self.fault(e)
            return
        self.trace.info(f"Loaded {count} bytes from {Path(cmd.path).name} @ 0x{cmd.base:08X}")

    def dump_image(self, cmd: DumpImageCommand):
        try:
            count = self.sim.dump_image(cmd.path, cmd.base, cmd.length)
        except (OSError, SimulationFault) as e:
            self.fault(e)
            return
        self.trace.info(f"Dumped {count} bytes @ 0x{cmd.base:08X} to {Path(cmd.path).name}")

    def pcpi_issue(self, cmd: PcpiIssueCommand):
        if cmd.opcode == "STATUS":
            insn = encode_instruction(PcpiFunction.QUERY_STATUS)
        else:
            insn = encode_instruction(PcpiFunction.START_OP, Opcode[cmd.opcode])
        self.trace.info(f"Issuing PCPI {cmd.opcode} (insn 0x{insn:08X}, rs1 0x{cmd.rs1:08X})")
        try:
            self.sim.pcpi.pcpi_issue(PcpiRequest(insn=insn, rs1=cmd.rs1))
        except SimulationFault as e:
            self.fault(e)
            return
        # the custom instruction occupies one clock
        self.sim.step(1)

    def pcpi_poll(self, cmd: PcpiPollCommand):
        start = self.sim.cycle
        while True:
            response = self.sim.pcpi.pcpi_poll()
            elapsed = self.sim.cycle - start
            if response.ready:
                break
            if elapsed >= cmd.timeout:
                self.timeout(PollTimeout(f"PCPI response not ready after {elapsed} cycles"))
                return
            self.sim.step(1)
        self.trace.info(f"PCPI rd = 0x{response.rd:08X} ({describe_status(response.rd)}) after {elapsed} cycles")
        if response.rd & STATUS_ERROR:
            self.failed_polls += 1
            self.trace.error("PCPI operation completed with the error bit set")

    def dma(self, cmd: DmaCommand):
        head = None
        for spec in reversed(cmd.chain):
            head = DmaDescriptor(src_addr=spec.src_addr, dst_addr=spec.dst_addr, length=spec.length,
                                 stride=spec.stride, next=head)
        try:
            ticket = self.sim.submit_dma(head)
        except SimulationFault as e:
            self.fault(e)
            self.rejected_transfers += 1
            return
        self.tickets.append(ticket)
        total = sum(spec.length for spec in cmd.chain)
        self.trace.info(f"DMA ticket {ticket}: {len(cmd.chain)} descriptor(s), {total} bytes "
                        f"from 0x{cmd.chain[0].src_addr:08X} to 0x{cmd.chain[0].dst_addr:08X}")

    def dma_wait(self, cmd: DmaWaitCommand):
        start = self.sim.cycle
        while self.sim.dma.busy:
            if self.sim.cycle - start >= cmd.timeout:
                self.timeout(PollTimeout(f"DMA still busy after {self.sim.cycle - start} cycles"))
                return
            self.sim.step(1)
        self.trace.info(f"DMA idle after {self.sim.cycle - start} cycles")

        for ticket in self.tickets:
            status = self.sim.dma.status(ticket)
            if status.status == TransferStatus.FAILED:
                self.failed_poll(SimulationFault(f"DMA ticket {ticket} failed: {status.error}"))
            self.sim.dma.collect(ticket)
        if self.rejected_transfers:
            self.failed_polls += self.rejected_transfers
            self.trace.error(f"{self.rejected_transfers} DMA transfer(s) were rejected at submit")
        self.tickets = []
        self.rejected_transfers = 0
    # endregion

    def execute(self, command):
        handlers = {
            WriteCommand: self.write,
            ReadCommand: self.read,
            PollCommand: self.poll,
            StepCommand: self.step,
            LoadImageCommand: self.load_image,
            DumpImageCommand: self.dump_image,
            PcpiIssueCommand: self.pcpi_issue,
            PcpiPollCommand: self.pcpi_poll,
            DmaCommand: self.dma,
            DmaWaitCommand: self.dma_wait,
        }
        handlers[type(command)](command)

    def result(self) -> ScriptRunResult:
        failed = self.expect_mismatches or self.poll_timeouts or self.failed_polls
        return ScriptRunResult(exit_status=1 if failed else 0, log_lines=list(self.trace.lines),
                               expect_mismatches=self.expect_mismatches, poll_timeouts=self.poll_timeouts,
                               failed_polls=self.failed_polls, faults=self.faults, cycles=self.sim.cycle)
# endregion


# region Main Function
def run_script(path, cfg: EngineConfig = None) -> ScriptServiceResponse:
    """
    Replay a script on a fresh simulator.

    Args:
        path (str | Path): Script file; relative image paths resolve against its directory.
        cfg (EngineConfig, optional): Engine configuration, reference tile when omitted.

    Returns:
        ScriptServiceResponse: success is False only when the script does not parse;
            data holds the trace and exit status of an executed script.
    """
    try:
        lines = parse_script(path)
    except ParseError as e:
        logger_NPU1S01.error(f"{path}: {e}")
        return ScriptServiceResponse(success=False, error=e)

    run = _ScriptRun(NpuSimulator(cfg))
    for line in lines:
        logger_NPU1S01.debug(f"{path}:{line.line} {line.command.op}")
        run.execute(line.command)

    result = run.result()
    logger_NPU1S01.info(f"Script {path} finished at cycle {result.cycles}: exit status {result.exit_status}")
    return ScriptServiceResponse(success=True, data=result)
# endregion
