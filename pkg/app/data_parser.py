"""
Parsers for the versioned plain-text reference tables in app/resources.

Every parser reads line by line, skips comments and blank lines, and keeps
going after a bad line so that a single run reports every problem with its
line number. Callers decide whether collected errors are fatal.
"""

from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, FrozenSet, List, Optional, Tuple
import logging
import re

from .hypersimplex import Edge, edges_of_level, make_edge
from .tetra_common import DataFormatError

logger = logging.getLogger(__name__)

PLACEHOLDERS = "ijkl"
MASK_RE = re.compile(r"^[01]{3}$")
FIBER_TOKEN_RE = re.compile(r"^(I|II|III)(\^([1-9]))?$")
VERSION_RE = re.compile(r"^#\s*version:\s*(\S+)")


@dataclass
class ParseResult:
    """Parsed payload plus every diagnostic found on the way."""

    path: str
    version: Optional[str] = None
    rows: list = field(default_factory=list)
    errors: List[DataFormatError] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, line: int, message: str) -> None:
        err = DataFormatError(self.path, line, message)
        logger.warning(f"[PARSER] {err}")
        self.errors.append(err)

    def raise_if_failed(self) -> None:
        if self.errors:
            raise self.errors[0]


@dataclass(frozen=True)
class ExpectedType:
    """Row of the expected stratum-type table."""

    type: str
    mask: str
    codim: int
    multiplicity: int
    line: int = 0


@dataclass(frozen=True)
class RawCountRow:
    type: str
    mask: str
    multiplicity: int
    coefficients: Tuple[int, ...]
    fiber: Tuple[str, ...]
    line: int = 0


def _data_lines(path: str, result: ParseResult):
    with open(path, "r", encoding="utf-8") as f:
        for number, raw in enumerate(f, start=1):
            text = raw.strip()
            if not text:
                continue
            if text.startswith("#"):
                match = VERSION_RE.match(text)
                if match and result.version is None:
                    result.version = match.group(1)
                continue
            yield number, text.split()


def _instantiate_token(token: str, values: Dict[str, int]) -> Edge:
    left, sep, right = token.partition("-")
    if not sep or not left or not right:
        raise ValueError(f"malformed edge pattern {token!r}")
    try:
        a = frozenset(values[ch] for ch in left)
        b = frozenset(values[ch] for ch in right)
    except KeyError as e:
        raise ValueError(f"unknown placeholder {e.args[0]!r} in {token!r}")
    if len(a) != len(left) or len(b) != len(right):
        raise ValueError(f"repeated placeholder in {token!r}")
    return make_edge(a, b)


def parse_divisor_file(path: str) -> ParseResult:
    """
    Parse divisor definitions and instantiate index patterns.

    Args:
        path: Path to divisors.txt

    Returns:
        ParseResult whose rows are (name, frozenset of edges) in file order,
        one per instantiated divisor.
    """
    result = ParseResult(path)
    instances: Dict[str, FrozenSet[Edge]] = {}
    order: List[str] = []

    for number, cols in _data_lines(path, result):
        try:
            if len(cols) < 2:
                raise ValueError("expected a name followed by edge patterns")
            base, _, index_spec = cols[0].partition("_")
            if any(ch not in PLACEHOLDERS for ch in index_spec):
                raise ValueError(f"bad index placeholders {index_spec!r}")

            if cols[1].startswith("level:"):
                level = int(cols[1].split(":", 1)[1])
                if level not in (1, 2, 3) or len(cols) != 2 or index_spec:
                    raise ValueError("level patterns take one level 1..3 and no index")
                edges = frozenset(edges_of_level(level))
                if base in instances:
                    raise ValueError(f"duplicate divisor {base}")
                instances[base] = edges
                order.append(base)
                continue

            seen_here: Dict[str, FrozenSet[Edge]] = {}
            for perm in permutations((1, 2, 3, 4)):
                values = dict(zip(PLACEHOLDERS, perm))
                edges = frozenset(_instantiate_token(t, values) for t in cols[1:])
                index = "".join(str(v) for v in sorted(values[ch] for ch in index_spec))
                name = f"{base}{index}"
                previous = seen_here.get(name)
                if previous is not None and previous != edges:
                    raise ValueError(
                        f"{cols[0]} is not symmetric in its unnamed placeholders"
                    )
                seen_here[name] = edges
            for name in sorted(seen_here):
                if name in instances:
                    raise ValueError(f"duplicate divisor {name}")
                instances[name] = seen_here[name]
                order.append(name)
        except ValueError as e:
            result.error(number, str(e))
            continue

    result.rows = [(name, instances[name]) for name in order]
    logger.info(f"[PARSER] Loaded {len(result.rows)} divisors from {path}")
    return result


def parse_strata_types(path: str) -> ParseResult:
    """Parse the expected type / mask / codim / multiplicity table."""
    result = ParseResult(path)
    seen: Dict[Tuple[str, str], int] = {}

    for number, cols in _data_lines(path, result):
        try:
            if len(cols) != 4:
                raise ValueError(f"expected 4 columns, found {len(cols)}")
            type_name, mask, codim_text, mult_text = cols
            if not MASK_RE.match(mask):
                raise ValueError(f"bad shift mask {mask!r}")
            codim, multiplicity = int(codim_text), int(mult_text)
            if not 0 <= codim <= 6 or multiplicity <= 0:
                raise ValueError("codim must be 0..6 and multiplicity positive")
            key = (type_name, mask)
            if key in seen:
                raise ValueError(f"duplicate row {type_name} {mask} (first at line {seen[key]})")
            seen[key] = number
            result.rows.append(
                ExpectedType(type_name, mask, codim, multiplicity, number)
            )
        except ValueError as e:
            result.error(number, str(e))
            continue

    logger.info(f"[PARSER] Loaded {len(result.rows)} expected stratum types")
    return result


def parse_fiber(text: str) -> Tuple[str, ...]:
    """"II^2" -> ("II", "II"); "-" -> ()."""
    if text == "-":
        return ()
    factors: List[str] = []
    for token in text.split("*"):
        match = FIBER_TOKEN_RE.match(token)
        if not match:
            raise ValueError(f"bad fiber annotation {text!r}")
        factors.extend([match.group(1)] * int(match.group(3) or 1))
    return tuple(factors)


def parse_count_table(
    path: str, split_codims: Optional[Dict[str, int]] = None
) -> ParseResult:
    """
    Parse the point-count table.

    Args:
        path: Path to count_table.txt
        split_codims: Optional split-type codimensions; when given, rows of
            unknown type and rows whose degree differs from 6 - codim are
            rejected.

    Returns:
        ParseResult with RawCountRow rows.
    """
    result = ParseResult(path)
    seen: Dict[Tuple[str, str], int] = {}

    for number, cols in _data_lines(path, result):
        try:
            if len(cols) != 5:
                raise ValueError(f"expected 5 columns, found {len(cols)}")
            type_name, mask, mult_text, coeff_text, fiber_text = cols
            if not MASK_RE.match(mask):
                raise ValueError(f"bad shift mask {mask!r}")
            multiplicity = int(mult_text)
            if multiplicity <= 0:
                raise ValueError("multiplicity must be positive")
            coefficients = tuple(int(c) for c in coeff_text.split(","))
            if coefficients[-1] == 0:
                raise ValueError("leading coefficient is zero")
            fiber = parse_fiber(fiber_text)

            key = (type_name, mask)
            if key in seen:
                raise ValueError(f"duplicate row {type_name} {mask} (first at line {seen[key]})")
            seen[key] = number

            if split_codims is not None:
                if type_name not in split_codims:
                    raise ValueError(f"unknown split type {type_name!r}")
                codim = split_codims[type_name] + mask.count("1")
                degree = len(coefficients) - 1
                if degree != 6 - codim:
                    raise ValueError(
                        f"degree {degree} of {type_name} {mask} differs from 6 - codim = {6 - codim}"
                    )

            result.rows.append(
                RawCountRow(type_name, mask, multiplicity, coefficients, fiber, number)
            )
        except ValueError as e:
            result.error(number, str(e))
            continue

    logger.info(f"[PARSER] Loaded {len(result.rows)} count rows from {path}")
    return result
