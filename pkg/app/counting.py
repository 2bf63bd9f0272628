"""
Point-count bookkeeping: the per-stratum count table, the fiber total, the
Poincaré polynomial, Betti numbers and zeta exponents.

All polynomials live in Z[q] and are exact; evaluation at q = p^r is the
point count over F_{p^r}.
"""

from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union
import csv
import io
import logging

from pydantic import BaseModel
from sympy import ZZ, Poly, symbols

from .tetra_common import (
    COUNT_TABLE_FILE,
    CheckResult,
    SectionReport,
    check,
    section_from_checks,
)

logger = logging.getLogger(__name__)

Q = symbols("q")

EXPECTED_ROWS = 160
EXPECTED_FIBER = (1, 23, 114, 189, 114, 23, 1)
NONNEGATIVE_AT = (2, 3, 5)


class IntPolynomial:
    """
    Integer polynomial in q, backed by a sympy Poly over ZZ.

    Coefficients are read low to high; the zero polynomial has none.
    """

    __slots__ = ("poly",)

    def __init__(self, value: Union[Poly, Sequence[int], int] = 0):
        if isinstance(value, Poly):
            poly = value
        elif isinstance(value, int):
            poly = Poly(value, Q, domain=ZZ)
        else:
            coeffs = [int(c) for c in value]
            poly = Poly(list(reversed(coeffs)) or [0], Q, domain=ZZ)
        if poly.get_domain() != ZZ:
            poly = poly.set_domain(ZZ)
        self.poly = poly

    @classmethod
    def q(cls) -> "IntPolynomial":
        return cls([0, 1])

    @property
    def coefficients(self) -> List[int]:
        if self.poly.is_zero:
            return []
        return [int(c) for c in reversed(self.poly.all_coeffs())]

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return -1 if self.poly.is_zero else int(self.poly.degree())

    def coefficient(self, power: int) -> int:
        coeffs = self.coefficients
        return coeffs[power] if 0 <= power < len(coeffs) else 0

    def evaluate(self, q: int) -> int:
        return int(self.poly.eval(q))

    def substitute_power(self, r: int) -> "IntPolynomial":
        """q -> q^r"""
        if r < 1:
            raise ValueError("power must be positive")
        out = [0] * (r * max(self.degree, 0) + 1)
        for i, c in enumerate(self.coefficients):
            out[i * r] = c
        return IntPolynomial(out)

    def divides(self, other: "IntPolynomial") -> bool:
        """True when self | other in Z[q]."""
        if self.poly.is_zero:
            return other.poly.is_zero
        quotient, remainder = other.poly.div(self.poly)
        return remainder.is_zero and all(c.is_integer for c in quotient.all_coeffs())

    def is_palindromic(self) -> bool:
        coeffs = self.coefficients
        return coeffs == coeffs[::-1]

    def has_nonnegative_coefficients(self) -> bool:
        return all(c >= 0 for c in self.coefficients)

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPolynomial(other)
        return IntPolynomial(self.poly + other.poly)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = IntPolynomial(other)
        return IntPolynomial(self.poly - other.poly)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(self.poly * other)
        return IntPolynomial(self.poly * other.poly)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return IntPolynomial(self.poly ** n)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = IntPolynomial(other)
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(tuple(self.coefficients))

    def __repr__(self) -> str:
        return f"IntPolynomial({self.coefficients})"

    def __str__(self) -> str:
        return str(self.poly.as_expr()) if not self.poly.is_zero else "0"


def _q_minus(a: int) -> IntPolynomial:
    return IntPolynomial([-a, 1])


# Fiber factors named in the table annotations
FIBER_FACTORS: Dict[str, IntPolynomial] = {
    "I": IntPolynomial([6, -5, 1]),
    "II": _q_minus(2),
    "III": _q_minus(1),
}


def fiber_factor(annotations: Iterable[str]) -> IntPolynomial:
    product = IntPolynomial(1)
    for name in annotations:
        product = product * FIBER_FACTORS[name]
    return product


# Closed forms of the shifting-stratum rows (split type X0)
_QQ = IntPolynomial.q()
SHIFT_FACTORIZATIONS: Dict[str, IntPolynomial] = {
    "100": _QQ ** 3 * _q_minus(1) ** 2,
    "001": _QQ ** 3 * _q_minus(1) ** 2,
    "010": _QQ ** 2 * _q_minus(1) ** 2 * _q_minus(2),
    "110": FIBER_FACTORS["I"] * _QQ * _q_minus(1),
    "011": FIBER_FACTORS["I"] * _QQ * _q_minus(1),
    "101": _QQ * _q_minus(1) * IntPolynomial([3, -3, 1]),
    "111": FIBER_FACTORS["I"] * _q_minus(3),
}


@dataclass(frozen=True)
class CountRow:
    split_type: str
    shift_mask: str
    multiplicity: int
    count: IntPolynomial
    fiber: Tuple[str, ...] = ()
    line: int = 0

    @property
    def key(self) -> Tuple[str, str]:
        return self.split_type, self.shift_mask

    @property
    def fiber_annotation(self) -> str:
        if not self.fiber:
            return "-"
        counts = Counter(self.fiber)
        return "*".join(
            name if counts[name] == 1 else f"{name}^{counts[name]}"
            for name in ("I", "II", "III")
            if counts[name]
        )


@dataclass
class CountTable:
    rows: List[CountRow]
    version: Optional[str] = None

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[CountRow]:
        return iter(self.rows)

    def row(self, split_type: str, shift_mask: str) -> CountRow:
        for r in self.rows:
            if r.key == (split_type, shift_mask):
                return r
        raise KeyError(f"no row {split_type} {shift_mask}")

    def by_key(self) -> Dict[Tuple[str, str], CountRow]:
        return {r.key: r for r in self.rows}


class BettiProfile(BaseModel):
    """Even Betti numbers b0, b2, ...; every odd Betti number is zero."""

    even_betti: List[int]

    @property
    def betti_numbers(self) -> List[int]:
        out: List[int] = []
        for i, b in enumerate(self.even_betti):
            if i:
                out.append(0)
            out.append(b)
        return out

    @property
    def euler_characteristic(self) -> int:
        return sum(self.even_betti)

    def is_palindromic(self) -> bool:
        return self.even_betti == self.even_betti[::-1]


# ---------------------------------------------------------------------------
# Loading


def _duality_problems(rows: Sequence[CountRow]) -> List[Tuple[CountRow, str]]:
    from .strata import dual_mask, dual_type_name

    by_key = {r.key: r for r in rows}
    problems = []
    for r in rows:
        partner = by_key.get((dual_type_name(r.split_type), dual_mask(r.shift_mask)))
        if partner is None:
            problems.append((r, "dual row missing"))
        elif partner.count != r.count:
            problems.append((r, f"count differs from dual row {partner.split_type} {partner.shift_mask}"))
        elif partner.multiplicity != r.multiplicity:
            problems.append((r, "multiplicity differs from dual row"))
    return problems


def load_count_table(
    path: Optional[str] = None, split_codims: Optional[Dict[str, int]] = None
) -> CountTable:
    """
    Load and validate the count table.

    Args:
        path: Table file, defaults to the embedded resource
        split_codims: Codimension per split type; defaults to the
            expected-type table

    Returns:
        CountTable

    Raises:
        DataFormatError: first of the collected diagnostics (degree,
            duplicate, malformed or duality problems)
    """
    result, rows = check_count_table(path, split_codims)
    result.raise_if_failed()

    logger.info(f"[COUNTS] Count table version {result.version}: {len(rows)} rows")
    return CountTable(rows=rows, version=result.version)


def check_count_table(
    path: Optional[str] = None, split_codims: Optional[Dict[str, int]] = None
):
    """Parse the table and collect every diagnostic, duality included, without raising."""
    from .data_parser import parse_count_table
    from .strata import split_type_codims

    path = path or COUNT_TABLE_FILE
    codims = split_codims if split_codims is not None else split_type_codims()
    result = parse_count_table(path, codims)

    rows = [
        CountRow(
            split_type=raw.type,
            shift_mask=raw.mask,
            multiplicity=raw.multiplicity,
            count=IntPolynomial(raw.coefficients),
            fiber=raw.fiber,
            line=raw.line,
        )
        for raw in result.rows
    ]
    for row, message in _duality_problems(rows):
        result.error(row.line, message)
    return result, rows


_TABLE: Optional[CountTable] = None


def default_table() -> CountTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = load_count_table()
    return _TABLE


# ---------------------------------------------------------------------------
# Operations


def flag_poly() -> IntPolynomial:
    """Point count of the complete flag variety of C^4: (1+q+q²+q³)(1+q+q²)(1+q)."""
    return IntPolynomial([1, 1, 1, 1]) * IntPolynomial([1, 1, 1]) * IntPolynomial([1, 1])


def fiber_sum(table: CountTable) -> IntPolynomial:
    total = IntPolynomial(0)
    for row in table:
        total = total + row.count * row.multiplicity
    return total


def betti_from_count(p: IntPolynomial) -> BettiProfile:
    """
    Read even Betti numbers off a point count.

    Raises:
        ValueError: if a coefficient is negative
    """
    coeffs = p.coefficients
    if any(c < 0 for c in coeffs):
        raise ValueError(f"negative coefficient in {p}")
    return BettiProfile(even_betti=coeffs or [0])


def total_poincare(table: CountTable) -> BettiProfile:
    return betti_from_count(fiber_sum(table) * flag_poly())


def zeta_exponents(table: CountTable) -> List[Tuple[int, int]]:
    """Exponents a_i of Z(s) = prod_i (1 - q^i s)^(-a_i)."""
    return list(enumerate(total_poincare(table).even_betti))


def euler_characteristic(table: CountTable) -> int:
    return total_poincare(table).euler_characteristic


def point_count(table: CountTable, q: int, r: int = 1) -> int:
    """Number of F_{q^r}-points of the whole space."""
    qr = q ** r
    return flag_poly().evaluate(qr) * sum(
        row.multiplicity * row.count.evaluate(qr) for row in table
    )


# ---------------------------------------------------------------------------
# Verification


@dataclass
class RowCheck:
    row: CountRow
    expected_degree: Optional[int]
    dual_ok: bool
    multiplicity_ok: bool
    fiber_ok: bool
    nonnegative_ok: bool

    @property
    def degree_ok(self) -> bool:
        return self.expected_degree is None or self.row.count.degree == self.expected_degree

    @property
    def passed(self) -> bool:
        return (
            self.degree_ok and self.dual_ok and self.multiplicity_ok
            and self.fiber_ok and self.nonnegative_ok
        )


def row_checks(table: CountTable, strata: Optional[Sequence] = None) -> List[RowCheck]:
    """Per-row consistency against the stratum records."""
    from .strata import enumerate_strata

    strata = strata if strata is not None else enumerate_strata()
    sizes = Counter((r.type_name, r.shift_mask) for r in strata)
    split_codims = {
        r.type_name: r.codim - r.shift_mask.count("1") for r in strata
    }
    dual_bad = {id(r) for r, _ in _duality_problems(table.rows)}

    out = []
    for row in table:
        base = split_codims.get(row.split_type)
        expected_degree = None if base is None else 6 - (base + row.shift_mask.count("1"))
        out.append(
            RowCheck(
                row=row,
                expected_degree=expected_degree,
                dual_ok=id(row) not in dual_bad,
                multiplicity_ok=sizes.get(row.key, 0) == row.multiplicity,
                fiber_ok=fiber_factor(row.fiber).divides(row.count),
                nonnegative_ok=all(row.count.evaluate(q) >= 0 for q in NONNEGATIVE_AT),
            )
        )
    return out


def _failing(rows: List[RowCheck], attr: str) -> List[str]:
    return [f"{rc.row.split_type} {rc.row.shift_mask}" for rc in rows if not getattr(rc, attr)]


def _listing(name: str, failures: List[str], detail: Optional[str] = None) -> CheckResult:
    return CheckResult(name=name, passed=not failures, expected=[], actual=failures, detail=detail)


def verify_table(
    table: Optional[CountTable] = None, strata: Optional[Sequence] = None
) -> SectionReport:
    """
    Run every count-table check and return the "counts" section.

    Args:
        table: Count table, defaults to the embedded resource
        strata: Stratum records, defaults to the full enumeration

    Returns:
        SectionReport with itemized checks and the Betti / zeta data
    """
    start_time = datetime.now()
    table = table or default_table()
    rows = row_checks(table, strata)
    checks: List[CheckResult] = [check("row_count", EXPECTED_ROWS, len(table))]

    checks.append(_listing("degree", _failing(rows, "degree_ok")))
    checks.append(_listing("duality", _failing(rows, "dual_ok")))
    checks.append(_listing("multiplicities", _failing(rows, "multiplicity_ok")))

    total = fiber_sum(table)
    checks.append(check("fiber_sum", list(EXPECTED_FIBER), total.coefficients))
    checks.append(check("fiber_sum_palindromic", True, total.is_palindromic()))
    checks.append(_listing("fiber_factors", _failing(rows, "fiber_ok")))

    shift_bad = []
    for mask, closed_form in SHIFT_FACTORIZATIONS.items():
        try:
            if table.row("X0", mask).count != closed_form:
                shift_bad.append(mask)
        except KeyError:
            shift_bad.append(mask)
    checks.append(_listing("shift_factorizations", shift_bad))

    checks.append(
        _listing(
            "nonnegative_small_q",
            _failing(rows, "nonnegative_ok"),
            detail=f"evaluated at q in {list(NONNEGATIVE_AT)}",
        )
    )

    # q -> q^2 must commute with summing the rows
    squared = IntPolynomial(0)
    for row in table:
        squared = squared + row.count.substitute_power(2) * row.multiplicity
    checks.append(check("power_substitution", True, squared == total.substitute_power(2)))

    betti = total_poincare(table) if total.has_nonnegative_coefficients() else None
    data: Dict = {"fiber_poly": total.coefficients, "flag_poly": flag_poly().coefficients}
    if betti is not None:
        checks.append(check("poincare_palindromic", True, betti.is_palindromic()))
        checks.append(check("euler_characteristic", 11160, betti.euler_characteristic))
        data.update(
            {
                "even_betti": betti.even_betti,
                "euler_characteristic": betti.euler_characteristic,
                "zeta_exponents": [[i, a] for i, a in zeta_exponents(table)],
            }
        )

    elapsed = (datetime.now() - start_time).total_seconds()
    logger.info(f"[COUNTS] Verified {len(table)} rows in {elapsed:.2f}s")
    return section_from_checks("counts", checks, data)


def counts_to_csv(table: Optional[CountTable] = None, strata: Optional[Sequence] = None) -> str:
    """Per-row checks as CSV."""
    table = table or default_table()
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["type", "mask", "multiplicity", "degree", "expected_degree", "dual",
         "multiplicity_ok", "fiber", "fiber_ok", "nonnegative", "count"]
    )
    for rc in row_checks(table, strata):
        r = rc.row
        writer.writerow(
            [r.split_type, r.shift_mask, r.multiplicity, r.count.degree,
             rc.expected_degree, rc.dual_ok, rc.multiplicity_ok,
             r.fiber_annotation, rc.fiber_ok, rc.nonnegative_ok,
             " ".join(str(c) for c in r.count.coefficients)]
        )
    return buffer.getvalue()
