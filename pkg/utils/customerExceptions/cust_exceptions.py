class SimulationFault(Exception):
    """Base class for faults raised by the simulated hardware."""
    def __init__(self, message="Simulation fault"):
        super().__init__(message)


class BusFault(SimulationFault):
    """Raised when an address decodes to no region of the memory map."""
    def __init__(self, message="Bus fault", addr=None):
        self.addr = addr
        full_message = f"{message} @ 0x{addr:08X}" if addr is not None else f"{message}"
        super().__init__(full_message)


class AlignmentFault(SimulationFault):
    """Raised when a 32-bit access is not 4-byte aligned."""
    def __init__(self, message="Unaligned 32-bit access", addr=None):
        self.addr = addr
        full_message = f"{message} @ 0x{addr:08X}" if addr is not None else f"{message}"
        super().__init__(full_message)


class StartWhileBusy(SimulationFault):
    """Raised when START is written while the engine is BUSY."""
    def __init__(self, message="START written while engine is BUSY"):
        super().__init__(message)


class FootprintFault(SimulationFault):
    """Raised when operands or results do not fit the scratchpad."""
    def __init__(self, message="Operand footprint exceeds the scratchpad"):
        super().__init__(message)


class QueueFull(SimulationFault):
    """Raised when the DMA queue already holds the maximum number of transfers."""
    def __init__(self, message="DMA queue full"):
        super().__init__(message)


class CyclicChain(SimulationFault):
    """Raised when a descriptor chain links back to itself."""
    def __init__(self, message="DMA descriptor chain contains a loop"):
        super().__init__(message)


class IllegalInstruction(SimulationFault):
    """Raised when the PCPI bridge does not handle an instruction word."""
    def __init__(self, message="Illegal instruction", insn=None):
        self.insn = insn
        full_message = f"{message}: 0x{insn:08X}" if insn is not None else f"{message}"
        super().__init__(full_message)


class ArbitrationError(Exception):
    """Raised when a master presents more than one transaction in a cycle."""
    def __init__(self, message="More than one pending transaction per master"):
        super().__init__(message)


class ParseError(Exception):
    """Raised when a script or manifest cannot be parsed."""
    def __init__(self, message="Parse error", line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            full_message = f"line {line}, column {column or 1}: {message}"
        else:
            full_message = f"{message}"
        super().__init__(full_message)


class ExpectMismatch(Exception):
    def __init__(self, message="Read value does not match expectation"):
        super().__init__(message)


class PollTimeout(Exception):
    def __init__(self, message="Poll timed out"):
        super().__init__(message)


class ConfigError(Exception):
    """Raised when engine configuration or manifest values are invalid."""
    def __init__(self, message="Invalid configuration"):
        super().__init__(message)
