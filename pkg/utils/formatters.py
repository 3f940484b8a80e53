"""
Text formatting utilities for CLI output and formula files
"""
from fractions import Fraction
from typing import Iterable


def format_weight(weight: float) -> str:
    """
    Canonical text for a hyperedge weight

    Args:
        weight: Positive weight

    Returns:
        '4' for integral weights, the shortest round-trip repr otherwise
    """
    weight = float(weight)
    if weight.is_integer():
        return str(int(weight))
    return repr(weight)


def format_fraction(value: Fraction) -> str:
    """
    Format an exact coefficient

    Args:
        value: Fraction

    Returns:
        '-3/8', '1' or '0'
    """
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_subset(mask: int, arity: int) -> str:
    """
    Format a subset bitmask as its 1-based positions

    Args:
        mask: Bitmask, bit i is position i+1
        arity: Number of positions

    Returns:
        '{1,3}' or '{}'
    """
    positions = [str(i + 1) for i in range(arity) if mask >> i & 1]
    return "{" + ",".join(positions) + "}"


def format_vector(values: Iterable[float], precision: int = 6) -> str:
    """Format a real vector compactly"""
    return "(" + ", ".join(f"{v:.{precision}g}" for v in values) + ")"


def format_rate(value: float) -> str:
    """Format a success rate as a percentage"""
    return f"{value * 100:.1f}%"
