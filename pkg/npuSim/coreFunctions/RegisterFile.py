"""
    Purpose:
    Memory-mapped control/status registers of the neural engine and its
    IDLE -> BUSY -> DONE state machine.

    Description:
    - STATUS (0x00) is one-hot IDLE/BUSY/DONE plus a sticky error bit (cleared by a valid START).
    - CONTROL (0x04) carries the opcode in bits[3:0] and START in bit 4.
    - 0x08-0x3C hold operation parameters, 0x40 the cycle count of the last operation.
    - Reserved offsets read as 0 and ignore writes; offsets outside the 0x100 window fault.
    - step_state() is called once per clock; BUSY -> DONE happens on the engine's completion signal.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
from npuSim.models.RegisterModel import (
    CONTROL_OPCODE_MASK, CONTROL_START, PARAMETER_OFFSETS, PARAMETER_RESET_VALUES, REGISTER_WINDOW,
    STATUS_ERROR, EngineState, Opcode, RegisterOffset, RegisterSnapshot, RegisterSpec,
)
from utils.customerExceptions.cust_exceptions import AlignmentFault, BusFault, StartWhileBusy
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion

VALID_OPCODES = {int(opcode) for opcode in Opcode}


# region Word Decoding
def encode_control(opcode, start=True):
    return (int(opcode) & CONTROL_OPCODE_MASK) | (CONTROL_START if start else 0)


def describe_status(word):
    """'IDLE', 'DONE | ERROR', ... for a STATUS word."""
    names = [state.name for state in EngineState if word & state.value]
    if word & STATUS_ERROR:
        names.append("ERROR")
    return " | ".join(names) if names else "NONE"


def describe_control(word):
    opcode = word & CONTROL_OPCODE_MASK
    names = [Opcode(opcode).name if opcode in VALID_OPCODES else f"OP{opcode:X}"] if opcode else []
    if word & CONTROL_START:
        names.append("START")
    return " | ".join(names) if names else "NONE"
# endregion


# region Register File
class RegisterFile:
    def __init__(self):
        self.reset()

    def reset(self):
        self.state = EngineState.IDLE
        self.error = False
        self.control = 0
        self.latched_opcode = 0
        self.cycle_count = 0
        self.parameters = {offset: PARAMETER_RESET_VALUES.get(offset, 0) for offset in PARAMETER_OFFSETS}
        self.start_pending = False
        self._busy_cycles = 0

    @property
    def status(self):
        return self.state.value | (STATUS_ERROR if self.error else 0)

    def parameter(self, offset):
        return self.parameters[RegisterOffset(offset)]

    @staticmethod
    def _check_offset(offset):
        if not 0 <= offset < REGISTER_WINDOW:
            raise BusFault("Register offset outside the neural register window", addr=offset & 0xFFFFFFFF)
        if offset % 4:
            raise AlignmentFault(addr=offset)

    # region Access
    def reg_read(self, offset):
        self._check_offset(offset)
        if offset == RegisterOffset.STATUS:
            return self.status
        if offset == RegisterOffset.CONTROL:
            return self.control
        if offset == RegisterOffset.CYCLE_COUNT:
            return self.cycle_count & 0xFFFFFFFF
        return self.parameters.get(offset, 0)

    def reg_write(self, offset, word):
        """
        Raises:
            StartWhileBusy: START while BUSY; the write is ignored and the error bit set.
        """
        self._check_offset(offset)
        word &= 0xFFFFFFFF

        if offset == RegisterOffset.CONTROL:
            self._write_control(word)
        elif offset in self.parameters:
            if self.state == EngineState.BUSY:
                self.error = True
                logger_NPU1S01.warning(f"Parameter write to 0x{offset:02X} rejected while BUSY")
                return
            self.parameters[offset] = word
        else:
            # STATUS, CYCLE_COUNT and reserved offsets
            logger_NPU1S01.debug(f"Write to read-only/reserved register 0x{offset:02X} ignored")

    def _write_control(self, word):
        if word & ~(CONTROL_OPCODE_MASK | CONTROL_START):
            logger_NPU1S01.warning(f"Reserved CONTROL bits ignored: 0x{word:08X}")
            word &= CONTROL_OPCODE_MASK | CONTROL_START

        if self.state == EngineState.BUSY:
            if word & CONTROL_START:
                self.error = True
                raise StartWhileBusy()
            return

        self.control = word
        if not word & CONTROL_START:
            return

        opcode = word & CONTROL_OPCODE_MASK
        if opcode not in VALID_OPCODES:
            self.error = True
            logger_NPU1S01.warning(f"START with undefined opcode 0x{opcode:X} rejected")
            return

        self.latched_opcode = opcode
        self.error = False
        self._busy_cycles = 0
        self.start_pending = True
        self._transition(EngineState.BUSY)
    # endregion

    # region State Machine
    def _transition(self, new_state):
        logger_NPU1S01.debug(f"Engine state {self.state.name} -> {new_state.name}")
        self.state = new_state

    def step_state(self, engine_done):
        """One clock of the state machine; CYCLE_COUNT latches on BUSY -> DONE."""
        if self.state != EngineState.BUSY:
            return
        self._busy_cycles += 1
        if engine_done:
            self.cycle_count = self._busy_cycles
            self._transition(EngineState.DONE)

    def consume_start(self):
        """Return the latched opcode once per START, for the engine to act on."""
        if not self.start_pending:
            return None
        self.start_pending = False
        return Opcode(self.latched_opcode)

    def flag_error(self):
        self.error = True
    # endregion

    def snapshot(self) -> RegisterSnapshot:
        return RegisterSnapshot(
            state=self.state,
            status=self.status,
            control=self.control,
            latched_opcode=self.latched_opcode,
            cycle_count=self.cycle_count,
            parameters={int(offset): value for offset, value in self.parameters.items()},
        )
# endregion


# region Register Reference
REGISTER_DESCRIPTIONS = {
    RegisterOffset.STATUS: "IDLE=0x1 DONE=0x2 BUSY=0x4, bit31 error",
    RegisterOffset.CONTROL: "bits[3:0] opcode (GEMM=1 CONV=2 POOL=3 RELU=4 LOAD=5 STORE=6), bit4 START",
    RegisterOffset.M: "GEMM m | CONV in_h | POOL in_h | RELU count | LOAD/STORE length (bytes)",
    RegisterOffset.N: "GEMM n | CONV in_w | POOL in_w",
    RegisterOffset.K: "GEMM k | CONV in_c | POOL channels",
    RegisterOffset.SRC_A: "GEMM A | CONV input | POOL input | RELU src (scratchpad offsets); LOAD/STORE source bus address",
    RegisterOffset.SRC_B: "GEMM B | CONV weights (scratchpad offsets)",
    RegisterOffset.DST: "GEMM C | CONV/POOL output | RELU dst (scratchpad offsets); LOAD/STORE destination bus address",
    RegisterOffset.SCALE: "bits[5:0] right shift, bit8 round-half-up (0 = truncate)",
    RegisterOffset.PARAM0: "CONV out_c | POOL mode (0 max, 1 avg) | LOAD/STORE source stride",
    RegisterOffset.PARAM1: "CONV kernel_h | POOL window_h",
    RegisterOffset.PARAM2: "CONV kernel_w | POOL window_w",
    RegisterOffset.PARAM3: "CONV stride | POOL stride",
    RegisterOffset.PARAM4: "CONV padding",
    RegisterOffset.PARAM5: "reserved for op use",
    RegisterOffset.PARAM6: "reserved for op use",
    RegisterOffset.CYCLE_COUNT: "busy cycles of the last completed operation",
}


def register_reference():
    specs = []
    for offset in RegisterOffset:
        if offset == RegisterOffset.STATUS:
            access, reset = "RO", EngineState.IDLE.value
        elif offset == RegisterOffset.CYCLE_COUNT:
            access, reset = "RO", 0
        else:
            access, reset = "RW", PARAMETER_RESET_VALUES.get(offset, 0)
        specs.append(RegisterSpec(offset=int(offset), name=offset.name, access=access, reset=reset,
                                  description=REGISTER_DESCRIPTIONS[offset]))
    return specs


def format_register_reference(base=0x10000000):
    lines = [f"{'OFFSET':<8}{'ADDRESS':<12}{'NAME':<13}{'ACCESS':<8}{'RESET':<12}DESCRIPTION"]
    for spec in register_reference():
        lines.append(
            f"0x{spec.offset:02X}    0x{base + spec.offset:08X}  {spec.name:<13}{spec.access:<8}"
            f"0x{spec.reset:08X}  {spec.description}"
        )
    lines.append("0x44-0xFC reserved: read as 0, writes ignored")
    return "\n".join(lines) + "\n"
# endregion
