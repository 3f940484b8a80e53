"""
Hybrid formula text format: parsing and canonical serialization

    c <comment>
    p hybrid <n> <num_constraints>
    [w <weight>] xor  <lit> ... 0
    [w <weight>] card <k> <lit> ... 0
    [w <weight>] cnf  <lit> ... 0
"""
import logging
import math
from typing import List, Optional

from pydantic import ValidationError

from models.constraint import Constraint, ConstraintKind
from models.formula import HybridFormula, WeightedConstraint
from utils.constants import (
    FORMULA_HEADER_TAG,
    TAG_CARD,
    TAG_CLAUSE,
    TAG_COMMENT,
    TAG_PROBLEM,
    TAG_WEIGHT,
    TAG_XOR,
)
from utils.formatters import format_weight

logger = logging.getLogger(__name__)

TAG_TO_KIND = {
    TAG_XOR: ConstraintKind.XOR,
    TAG_CARD: ConstraintKind.CARD_GE,
    TAG_CLAUSE: ConstraintKind.CLAUSE,
}
KIND_TO_TAG = {kind: tag for tag, kind in TAG_TO_KIND.items()}


class FormulaParseError(ValueError):
    """Malformed formula text, tagged with the offending line"""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        self.message = message
        super().__init__(f"line {line_number}: {message}")


def _parse_int(token: str, line_number: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormulaParseError(line_number, f"{what} must be an integer (received '{token}')")


def _parse_header(tokens: List[str], line_number: int):
    if len(tokens) != 4 or tokens[1] != FORMULA_HEADER_TAG:
        raise FormulaParseError(
            line_number, f"malformed header, expected 'p {FORMULA_HEADER_TAG} <n> <num_constraints>'"
        )
    n = _parse_int(tokens[2], line_number, "variable count")
    count = _parse_int(tokens[3], line_number, "constraint count")
    if n < 0 or count < 0:
        raise FormulaParseError(line_number, "malformed header, counts must be non-negative")
    return n, count


def _parse_constraint(tokens: List[str], n: int, line_number: int) -> WeightedConstraint:
    weight: Optional[float] = None
    if tokens[0] == TAG_WEIGHT:
        if len(tokens) < 2:
            raise FormulaParseError(line_number, "weight prefix without a value")
        try:
            weight = float(tokens[1])
        except ValueError:
            raise FormulaParseError(line_number, f"weight must be a decimal number (received '{tokens[1]}')")
        if not math.isfinite(weight):
            raise FormulaParseError(line_number, f"weight must be finite (received '{tokens[1]}')")
        if weight <= 0:
            raise FormulaParseError(line_number, f"non-positive weight {tokens[1]}")
        tokens = tokens[2:]
        if not tokens:
            raise FormulaParseError(line_number, "weight prefix without a constraint")

    tag = tokens[0]
    if tag not in TAG_TO_KIND:
        raise FormulaParseError(line_number, f"unknown constraint tag '{tag}'")
    kind = TAG_TO_KIND[tag]
    body = tokens[1:]

    threshold = None
    if kind == ConstraintKind.CARD_GE:
        if not body:
            raise FormulaParseError(line_number, "cardinality constraint without a threshold")
        threshold = _parse_int(body[0], line_number, "threshold")
        body = body[1:]

    values = [_parse_int(tok, line_number, "literal") for tok in body]
    if not values or values[-1] != 0:
        raise FormulaParseError(line_number, "missing terminating 0")
    if 0 in values[:-1]:
        raise FormulaParseError(line_number, "tokens after terminating 0")
    literals = values[:-1]
    if not literals:
        raise FormulaParseError(line_number, "constraint without literals")
    for value in literals:
        if abs(value) > n:
            raise FormulaParseError(line_number, f"literal {value} out of range 1..{n}")

    try:
        constraint = Constraint.from_dimacs(kind, literals, threshold=threshold)
    except ValidationError as e:
        details = "; ".join(err['msg'] for err in e.errors())
        raise FormulaParseError(line_number, f"invalid {tag} constraint: {details}")
    return WeightedConstraint(constraint=constraint, weight=weight)


def parse(text: str) -> HybridFormula:
    """
    Parse hybrid formula text

    Args:
        text: File contents

    Returns:
        HybridFormula

    Raises:
        FormulaParseError: With the 1-based line number of the problem
    """
    comments: List[str] = []
    constraints: List[WeightedConstraint] = []
    header = None
    last_line = 0

    for line_number, raw in enumerate(text.splitlines(), start=1):
        last_line = line_number
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()

        if tokens[0] == TAG_COMMENT:
            comments.append(line[len(TAG_COMMENT):].strip())
            continue

        if tokens[0] == TAG_PROBLEM:
            if header is not None:
                raise FormulaParseError(line_number, "duplicate header")
            header = _parse_header(tokens, line_number)
            continue

        if header is None:
            raise FormulaParseError(line_number, "constraint before the 'p hybrid' header")
        constraints.append(_parse_constraint(tokens, header[0], line_number))

    if header is None:
        raise FormulaParseError(max(last_line, 1), "missing 'p hybrid' header")
    n, count = header
    if count != len(constraints):
        raise FormulaParseError(
            max(last_line, 1), f"header declares {count} constraints but {len(constraints)} were found"
        )

    return HybridFormula(n=n, constraints=constraints, comments=comments)


def read_formula(path: str) -> HybridFormula:
    """Parse a formula file (UTF-8)"""
    with open(path, 'r', encoding='utf-8') as f:
        formula = parse(f.read())
    logger.info(f"Loaded {path}: {formula.n} variables, {formula.num_constraints} constraints")
    return formula


def serialize(f: HybridFormula) -> str:
    """
    Canonical text: comments, header, constraints in order, literals ascending,
    single spaces, LF line endings

    Args:
        f: HybridFormula (truth-table constraints have no text form)

    Returns:
        Formula text
    """
    lines = [f"{TAG_COMMENT} {text}" if text else TAG_COMMENT for text in f.comments]
    lines.append(f"{TAG_PROBLEM} {FORMULA_HEADER_TAG} {f.n} {f.num_constraints}")

    for idx, item in enumerate(f.constraints):
        c = item.constraint.canonical()
        if c.kind not in KIND_TO_TAG:
            raise ValueError(f"Constraint {idx} of kind {c.kind.value} has no text form")
        parts = []
        if item.weight is not None:
            parts += [TAG_WEIGHT, format_weight(item.weight)]
        parts.append(KIND_TO_TAG[c.kind])
        if c.kind == ConstraintKind.CARD_GE:
            parts.append(str(c.threshold))
        parts += [str(lit.to_dimacs()) for lit in c.literals]
        parts.append("0")
        lines.append(" ".join(parts))

    return "\n".join(lines) + "\n"


def write_formula(f: HybridFormula, path: str):
    """Write canonical text (UTF-8, LF)"""
    with open(path, 'w', encoding='utf-8', newline='\n') as fh:
        fh.write(serialize(f))
