"""
Common utilities and models for the verification services.

This module contains shared functionality used by the CLI, the HTTP mirror
and the section services: paths, configuration, error types and the
pydantic report models.
"""

from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field
from dotenv import load_dotenv
import logging
import json
import os

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
RESOURCES_DIR = os.path.join(os.path.dirname(__file__), "resources")
REPORTS_DIR = os.path.join(os.path.dirname(__file__), "..", "reports")

DIVISORS_FILE = os.path.join(RESOURCES_DIR, "divisors.txt")
STRATA_TYPES_FILE = os.path.join(RESOURCES_DIR, "strata_types.txt")
COUNT_TABLE_FILE = os.path.join(RESOURCES_DIR, "count_table.txt")

SECTION_NAMES = ("strata", "counts", "oracle", "ring")


class TetraError(Exception):
    """Base class for engine errors"""


class DataFormatError(TetraError):
    """A data file could not be parsed or failed a consistency rule"""

    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        self.message = message
        super().__init__(f"{os.path.basename(path)}:{line}: {message}")


class AdmissibilityError(TetraError):
    """A generated diagram broke an admissibility rule"""

    def __init__(self, rule: str, location: str):
        self.rule = rule
        self.location = location
        super().__init__(f"{rule} violated at {location}")


class VerificationError(TetraError):
    """One or more checks failed; `failures` itemizes them"""

    def __init__(self, failures: List[str]):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures) or "verification failed")


class BudgetExceededError(TetraError):
    """The Groebner computation ran out of its resource budget"""

    def __init__(self, degree_reached: int, reason: str):
        self.degree_reached = degree_reached
        self.reason = reason
        super().__init__(f"{reason} (completed through degree {degree_reached})")


class CheckResult(BaseModel):
    """Single verification item"""

    name: str
    passed: bool
    expected: Any = None
    actual: Any = None
    detail: Optional[str] = None


class SectionReport(BaseModel):
    """Result of one report section (strata, counts, oracle or ring)"""

    section: str
    passed: bool
    checks: List[CheckResult] = []
    data: Dict[str, Any] = {}

    @property
    def failures(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]


class VerificationReport(BaseModel):
    """Full report; field order is fixed for byte-identical output"""

    schema_version: str = SCHEMA_VERSION
    passed: bool
    sections: List[SectionReport] = []
    timings: Optional[Dict[str, float]] = None

    def failures(self) -> List[str]:
        return [
            f"{s.section}:{name}" for s in self.sections for name in s.failures
        ]


class OracleResult(BaseModel):
    """Brute-force count compared against the table row"""

    type: str
    q: int
    oracle_count: int
    table_count: int
    match: bool
    detail: Optional[str] = None


def section_from_checks(
    section: str, checks: List[CheckResult], data: Optional[Dict[str, Any]] = None
) -> SectionReport:
    return SectionReport(
        section=section,
        passed=all(c.passed for c in checks),
        checks=checks,
        data=data or {},
    )


def check(name: str, expected: Any, actual: Any, detail: Optional[str] = None):
    """Build a CheckResult comparing expected and actual by equality."""
    return CheckResult(
        name=name, passed=expected == actual, expected=expected, actual=actual,
        detail=detail,
    )


def ensure_reports_dir(reports_dir: Optional[str] = None) -> str:
    """Create reports directory if missing"""
    target = reports_dir or REPORTS_DIR
    os.makedirs(target, exist_ok=True)
    return target


def report_to_json(report: BaseModel) -> str:
    """Serialize a report with deterministic layout"""
    return json.dumps(
        report.model_dump(exclude_none=True), indent=2, ensure_ascii=False
    )


def save_report(report: BaseModel, path: str) -> Optional[str]:
    """
    Save a report as pretty-printed JSON.

    Args:
        report: Report or section to save
        path: Target file path; parent directories are created

    Returns:
        Path to the saved JSON file, or None when writing failed
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(report_to_json(report))
            f.write("\n")
        logger.info(f"[REPORT] Report saved as: {path}")
        return path
    except OSError as e:
        logger.error(f"[REPORT] Error saving report: {e}")
        return None


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


DEFAULT_TRUNCATION_DEGREE = 13
DEFAULT_GROEBNER_MAX_SECONDS = 7200
DEFAULT_GROEBNER_MAX_PAIRS = 5_000_000


def get_default_engine_config() -> dict:
    """
    Return the default engine configuration used when the caller passes no
    explicit values. The Gröbner budgets and truncation degree are fixed
    here and overridden only by command-line flags; the environment
    (optionally a .env file) sets the worker count and the reports directory.

    Returns:
        dict: { truncation_degree, groebner_max_seconds, groebner_max_pairs,
                workers, reports_dir }
    """
    load_dotenv()
    return {
        "truncation_degree": DEFAULT_TRUNCATION_DEGREE,
        "groebner_max_seconds": DEFAULT_GROEBNER_MAX_SECONDS,
        "groebner_max_pairs": DEFAULT_GROEBNER_MAX_PAIRS,
        "workers": _env_int("TETRA_WORKERS", 1),
        "reports_dir": os.getenv("TETRA_REPORTS_DIR", REPORTS_DIR),
    }
