"""
    Purpose:
    Engine side of the PicoRV32 co-processor interface (PCPI), so operations can be
    started by a custom instruction as well as by MMIO.

    Description:
    - Custom instructions use the R-type layout with the custom-0 major opcode (0x0B):
        funct3 = 0 start an operation, funct7[3:0] holds the engine opcode;
        funct3 = 1 query status, answered immediately.
    - For a start, rs1 is the scratchpad offset of a parameter block: one 32-bit word per
      parameter register, 0x08 through 0x3C in register order.
    - The bridge writes the block into the parameter registers and CONTROL exactly as the
      MMIO path does; pcpi_poll() reports ready (with the status word in rd) once DONE.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import numpy as np

from npuSim.coreFunctions.RegisterFile import VALID_OPCODES, encode_control
from npuSim.models.PcpiModel import CUSTOM0_OPCODE, DecodedInstruction, PcpiFunction, PcpiRequest, PcpiResponse
from npuSim.models.RegisterModel import PARAMETER_OFFSETS, EngineState, Opcode, RegisterOffset
from utils.customerExceptions.cust_exceptions import FootprintFault, IllegalInstruction, StartWhileBusy
from utils.logger.loggers import get_logger
# endregion

# region Logger
logger_NPU1S01 = get_logger('NPU1S01')
# endregion

PARAM_BLOCK_WORDS = len(PARAMETER_OFFSETS)
PARAM_BLOCK_BYTES = 4 * PARAM_BLOCK_WORDS


# region Encoding
def encode_instruction(function, engine_opcode=0, rd=0, rs1=0, rs2=0):
    return ((int(engine_opcode) & 0x7F) << 25 | (rs2 & 0x1F) << 20 | (rs1 & 0x1F) << 15
            | (int(function) & 0x7) << 12 | (rd & 0x1F) << 7 | CUSTOM0_OPCODE)


def decode_instruction(insn) -> DecodedInstruction:
    return DecodedInstruction(
        opcode=insn & 0x7F,
        rd=(insn >> 7) & 0x1F,
        funct3=(insn >> 12) & 0x7,
        rs1=(insn >> 15) & 0x1F,
        rs2=(insn >> 20) & 0x1F,
        funct7=(insn >> 25) & 0x7F,
    )


def pack_parameter_block(words) -> bytes:
    """Parameter block bytes from a mapping of register offset -> word (missing registers are 0)."""
    values = [int(words.get(int(offset), 0)) & 0xFFFFFFFF for offset in PARAMETER_OFFSETS]
    return np.array(values, dtype='<u4').tobytes()
# endregion


# region Bridge
class PcpiBridge:
    def __init__(self, sim):
        self.sim = sim
        self.reset()

    def reset(self):
        self._issued = False
        self._response = None
        self._query_response = None

    def _check(self, req: PcpiRequest) -> DecodedInstruction:
        decoded = decode_instruction(req.insn)
        if decoded.opcode != CUSTOM0_OPCODE:
            raise IllegalInstruction("Not a custom-0 instruction", insn=req.insn)
        if decoded.funct3 not in {int(f) for f in PcpiFunction}:
            raise IllegalInstruction(f"Undefined funct3 {decoded.funct3}", insn=req.insn)
        if decoded.funct3 == PcpiFunction.START_OP and (decoded.funct7 > 0xF or decoded.funct7 not in VALID_OPCODES):
            raise IllegalInstruction(f"Undefined engine opcode {decoded.funct7}", insn=req.insn)
        return decoded

    def pcpi_issue(self, req: PcpiRequest):
        """
        Raises:
            IllegalInstruction: not custom-0, or undefined funct3 / engine opcode (not handled).
            StartWhileBusy: start while the engine is BUSY.
            FootprintFault: the parameter block does not fit the scratchpad.
        """
        decoded = self._check(req)
        registers = self.sim.registers

        if decoded.funct3 == PcpiFunction.QUERY_STATUS:
            # answered from its own slot; a pending start keeps its state
            self._query_response = PcpiResponse(ready=True, wr=True, rd=registers.status)
            return

        if registers.state == EngineState.BUSY:
            registers.flag_error()
            raise StartWhileBusy()

        spm = self.sim.scratchpad
        if req.rs1 % 4 or req.rs1 + PARAM_BLOCK_BYTES > spm.size:
            registers.flag_error()
            raise FootprintFault(f"Parameter block at 0x{req.rs1:X} does not fit the scratchpad")

        block = np.frombuffer(spm.read_bytes(req.rs1, PARAM_BLOCK_BYTES), dtype='<u4')
        for offset, word in zip(PARAMETER_OFFSETS, block):
            registers.reg_write(offset, int(word))
        registers.reg_write(RegisterOffset.CONTROL, encode_control(Opcode(decoded.funct7)))

        self._issued = True
        self._response = None
        self._query_response = None
        logger_NPU1S01.debug(f"PCPI start {Opcode(decoded.funct7).name}, parameter block @ 0x{req.rs1:X}")

    def pcpi_poll(self) -> PcpiResponse:
        if self._query_response is not None:
            response, self._query_response = self._query_response, None
            return response
        if self._response is not None:
            return self._response
        if self._issued and self.sim.registers.state == EngineState.DONE:
            self._response = PcpiResponse(ready=True, wr=True, rd=self.sim.registers.status)
            return self._response
        return PcpiResponse()
# endregion
