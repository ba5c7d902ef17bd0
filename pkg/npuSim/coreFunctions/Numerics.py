"""
    Purpose:
    Bit-exact fixed-point arithmetic for the MAC datapath.

    Description:
    - Operands are raw 16-bit two's-complement integers (Fixed16).
    - Products accumulate into a 48-bit accumulator (Acc48) that saturates instead of wrapping.
    - requantize narrows an accumulator back to 16 bits by shift, rounding and saturation.
    - Array variants (numpy int64) give the engine the same results as the scalar ops.
    - to_fixed / to_real convert real values using the host-side Q format only; the
      datapath never sees fractional bits.

    Created Date: 2026-10-19
    Version: V1
"""

# region Imports
import numpy as np

from npuSim.models.NumericsModel import (
    ACC48_MAX, ACC48_MIN, FIXED16_MAX, FIXED16_MIN, Acc48, Fixed16, Rounding, ScaleSpec,
)
# endregion

DEFAULT_SCALE = ScaleSpec()


# region Scalar Operations
def saturate48(value):
    """
    Clamp an unbounded integer into the 48-bit accumulator range.

    Returns:
        tuple[int, bool]: (clamped value, True if clamping happened)
    """
    if value > ACC48_MAX:
        return ACC48_MAX, True
    if value < ACC48_MIN:
        return ACC48_MIN, True
    return value, False


def mac(acc: Acc48, a: Fixed16, b: Fixed16) -> Acc48:
    """acc + a*b with 48-bit saturation; overflow is set iff this accumulation saturated."""
    raw, saturated = saturate48(acc.raw + a.raw * b.raw)
    return Acc48(raw=raw, overflow=saturated)


def shift_round(value, right_shift, rounding=Rounding.TRUNCATE):
    # Python >> on ints is an arithmetic (floor) shift
    if right_shift == 0:
        return value
    if rounding == Rounding.ROUND_HALF_UP:
        value += 1 << (right_shift - 1)
    return value >> right_shift


def wrap16(value):
    value &= 0xFFFF
    return value - 0x10000 if value & 0x8000 else value


def requantize(acc: Acc48, scale: ScaleSpec = DEFAULT_SCALE) -> Fixed16:
    shifted = shift_round(acc.raw, scale.right_shift, scale.rounding)
    if not scale.saturate:
        return Fixed16(raw=wrap16(shifted))
    return Fixed16(raw=min(max(shifted, FIXED16_MIN), FIXED16_MAX))


def relu_scalar(x: Fixed16) -> Fixed16:
    return x if x.raw > 0 else Fixed16(raw=0)
# endregion


# region Array Operations
def saturate48_array(values: np.ndarray):
    """
    Vectorised saturate48 over an int64 array.

    Returns:
        tuple[np.ndarray, np.ndarray]: (clamped int64 array, boolean mask of saturated elements)
    """
    values = np.asarray(values, dtype=np.int64)
    clamped = np.clip(values, ACC48_MIN, ACC48_MAX)
    return clamped, clamped != values


def requantize_array(acc: np.ndarray, scale: ScaleSpec = DEFAULT_SCALE):
    """
    Vectorised requantize over int64 accumulators.

    Returns:
        tuple[np.ndarray, np.ndarray]: (int16 results, boolean mask of saturated writebacks)
    """
    acc = np.asarray(acc, dtype=np.int64)
    shifted = acc
    if scale.right_shift > 0:
        if scale.rounding == Rounding.ROUND_HALF_UP:
            shifted = acc + (1 << (scale.right_shift - 1))
        shifted = shifted >> scale.right_shift

    if not scale.saturate:
        return shifted.astype(np.int16), np.zeros(shifted.shape, dtype=bool)

    clamped = np.clip(shifted, FIXED16_MIN, FIXED16_MAX)
    return clamped.astype(np.int16), clamped != shifted


def relu_array(values: np.ndarray) -> np.ndarray:
    return np.maximum(np.asarray(values, dtype=np.int16), 0).astype(np.int16)
# endregion


# region Host-side Q Format
def to_fixed(real, frac_bits=8) -> Fixed16:
    """Encode a real value as Q(15-frac_bits).frac_bits, rounding half up and saturating."""
    scaled = int(np.floor(real * (1 << frac_bits) + 0.5))
    return Fixed16(raw=min(max(scaled, FIXED16_MIN), FIXED16_MAX))


def to_real(value: Fixed16, frac_bits=8) -> float:
    return value.raw / (1 << frac_bits)
# endregion
