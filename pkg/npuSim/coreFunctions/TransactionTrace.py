"""
    Purpose:
    Register-transaction trace in the board validation log format:
        [INFO] Reading status register @ 0x10000000
        [INFO] Status = 0x00000001 (IDLE)

    Description:
    - describe_address() names the target of an access and picks the decoder for its value.
    - TransactionTrace keeps every emitted line (for the run result) and forwards each one to
      the NPU1T01 logger, whose formatter prints the same "[LEVEL] message" layout.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
from npuSim.coreFunctions.MemorySystem import UART_DATA, UART_STATUS
from npuSim.coreFunctions.PerfCounters import COUNTER_LAYOUT
from npuSim.coreFunctions.RegisterFile import describe_control, describe_status
from npuSim.models.MemoryModel import RegionKind
from npuSim.models.RegisterModel import RegisterOffset
from utils.customerExceptions.cust_exceptions import BusFault
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1T01 = get_logger('NPU1T01')
# endregion


class AccessTarget:
    """How one address reads in the trace: '<action> <noun> @ addr' and '<Name> = value (<decoded>)'."""

    def __init__(self, noun, name, decode=str):
        self.noun = noun
        self.name = name
        self.decode = decode


def _char(word):
    byte = word & 0xFF
    return repr(chr(byte)) if 0x20 <= byte < 0x7F else f"0x{byte:02X}"


def _perf_target(offset):
    for counter, base in COUNTER_LAYOUT.items():
        if offset in (base, base + 4):
            half = "lo" if offset == base else "hi"
            return AccessTarget(f"{counter} counter ({half})", f"{counter} {half}")
    return AccessTarget("perf counter window", "Counter")


def _register_target(offset):
    if offset == RegisterOffset.STATUS:
        return AccessTarget("status register", "Status", describe_status)
    if offset == RegisterOffset.CONTROL:
        return AccessTarget("control register", "Control", describe_control)
    if offset == RegisterOffset.CYCLE_COUNT:
        return AccessTarget("cycle count register", "Cycle count", lambda word: f"{word} cycles")
    try:
        name = RegisterOffset(offset).name
    except ValueError:
        return AccessTarget("neural register", "Register")
    return AccessTarget(f"{name} register", name)


def describe_address(memory, addr) -> AccessTarget:
    try:
        region = memory.decode(addr)
    except BusFault:
        return AccessTarget("address", "Word")

    offset = addr - region.base
    if region.kind == RegionKind.NEURAL_REGS:
        return _register_target(offset)
    if region.kind == RegionKind.PERF_COUNTERS:
        return _perf_target(offset)
    if region.kind == RegionKind.UART:
        if offset == UART_DATA:
            return AccessTarget("UART data register", "UART data", _char)
        if offset == UART_STATUS:
            return AccessTarget("UART status register", "UART status")
        return AccessTarget("UART window", "UART")
    if region.kind == RegionKind.SCRATCHPAD:
        return AccessTarget("scratchpad", "Scratchpad")
    return AccessTarget("memory", "Memory")


class TransactionTrace:
    def __init__(self, memory):
        self.memory = memory
        self.lines = []

    def _emit(self, level, message):
        self.lines.append(f"[{level}] {message}")
        getattr(logger_NPU1T01, level.lower())(message)

    def info(self, message):
        self._emit("INFO", message)

    def warning(self, message):
        self._emit("WARNING", message)

    def error(self, message):
        self._emit("ERROR", message)

    def action(self, verb, addr):
        self.info(f"{verb} {describe_address(self.memory, addr).noun} @ 0x{addr:08X}")

    def value(self, addr, word, suffix=""):
        target = describe_address(self.memory, addr)
        self.info(f"{target.name} = 0x{word:08X} ({target.decode(word)}){suffix}")
