"""
Service orchestrating the report sections.

Each section is CPU-bound and runs off the event loop; oracle primes can
be spread over a process pool. Sections and oracle results are always
reassembled in request order, so the report does not depend on scheduling.
"""

from concurrent.futures import ProcessPoolExecutor
from datetime import datetime
from typing import Dict, List, Optional, Sequence
import asyncio
import logging

from .cohomology import RING_CHECKS, verify_ring
from .counting import check_count_table, load_count_table, verify_table
from .data_parser import parse_divisor_file, parse_strata_types
from .diagrams import load_divisors
from .projgeom import DEFAULT_PRIMES, ORACLE_TYPES, run_oracle, verify_oracles
from .strata import enumerate_strata, split_type_codims, verify_strata
from .tetra_common import (
    COUNT_TABLE_FILE,
    DIVISORS_FILE,
    SECTION_NAMES,
    STRATA_TYPES_FILE,
    DataFormatError,
    OracleResult,
    SectionReport,
    VerificationReport,
    get_default_engine_config,
)

logger = logging.getLogger(__name__)


def validate_data(
    divisors_path: str = DIVISORS_FILE,
    strata_types_path: str = STRATA_TYPES_FILE,
    count_table_path: str = COUNT_TABLE_FILE,
) -> List[str]:
    """
    Parse every data file and collect all diagnostics.

    Returns:
        Messages formatted "file:line: message"; empty when everything is valid
    """
    diagnostics: List[DataFormatError] = []

    divisors = parse_divisor_file(divisors_path)
    diagnostics.extend(divisors.errors)
    if divisors.ok:
        try:
            load_divisors(divisors_path)
        except DataFormatError as e:
            diagnostics.append(e)

    types = parse_strata_types(strata_types_path)
    diagnostics.extend(types.errors)

    table, _ = check_count_table(count_table_path, split_type_codims(types.rows))
    diagnostics.extend(table.errors)

    messages = [str(e) for e in diagnostics]
    if messages:
        logger.warning(f"[PARSER] {len(messages)} data problems found")
    else:
        logger.info("[PARSER] All data files valid")
    return messages


def _oracle_task(type_name: str, q: int, table_path: Optional[str]) -> OracleResult:
    table = load_count_table(table_path) if table_path else None
    return run_oracle(type_name, q, table)


async def run_oracle_results(
    primes: Sequence[int] = DEFAULT_PRIMES,
    types: Sequence[str] = ORACLE_TYPES,
    table_path: Optional[str] = None,
    workers: int = 1,
) -> List[OracleResult]:
    """
    Run every (type, prime) oracle, optionally in a process pool.

    Args:
        primes: Primes to run
        types: Oracle types
        table_path: Count table to compare with; None for the embedded one
        workers: Pool size; 1 runs in a worker thread

    Returns:
        Results in (type, prime) input order
    """
    jobs = [(t, q) for t in types for q in primes]
    if workers <= 1:
        return await asyncio.to_thread(
            lambda: [_oracle_task(t, q, table_path) for t, q in jobs]
        )

    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            loop.run_in_executor(pool, _oracle_task, t, q, table_path) for t, q in jobs
        ]
        return list(await asyncio.gather(*futures))


async def run_section(
    name: str,
    primes: Sequence[int] = DEFAULT_PRIMES,
    types: Sequence[str] = ORACLE_TYPES,
    table_path: Optional[str] = None,
    field: str = "GF2",
    include_rationals: bool = False,
    ring_checks: Sequence[str] = RING_CHECKS,
    workers: int = 1,
    config: Optional[dict] = None,
) -> SectionReport:
    """
    Run one report section.

    Raises:
        ValueError: unknown section name
        DataFormatError: a data file failed to load
    """
    if name not in SECTION_NAMES:
        raise ValueError(f"unknown section {name!r}, expected one of {SECTION_NAMES}")
    config = config or get_default_engine_config()

    if name == "strata":
        return await asyncio.to_thread(verify_strata)
    if name == "counts":
        table = load_count_table(table_path) if table_path else None
        return await asyncio.to_thread(verify_table, table, enumerate_strata())
    if name == "oracle":
        results = await run_oracle_results(primes, types, table_path, workers)
        table = load_count_table(table_path) if table_path else None
        return await asyncio.to_thread(
            verify_oracles, primes, types, table, results
        )
    return await asyncio.to_thread(
        verify_ring, field, config, include_rationals, ring_checks
    )


async def build_report(
    sections: Sequence[str] = SECTION_NAMES,
    primes: Sequence[int] = DEFAULT_PRIMES,
    types: Sequence[str] = ORACLE_TYPES,
    table_path: Optional[str] = None,
    field: str = "GF2",
    include_rationals: bool = False,
    ring_checks: Sequence[str] = RING_CHECKS,
    workers: Optional[int] = None,
    timings: bool = False,
    config: Optional[dict] = None,
) -> VerificationReport:
    """
    Run the requested sections in order and assemble the report.

    Args:
        sections: Section names, a subset of strata/counts/oracle/ring
        primes: Oracle primes
        types: Oracle types
        table_path: Count table override
        field: Primary field of the ring section
        include_rationals: Also run the ring over QQ
        ring_checks: Ring checks to run
        workers: Oracle pool size; defaults to the engine config
        timings: Add the per-section timings block
        config: Engine config, defaults to get_default_engine_config()

    Returns:
        VerificationReport; passed only when every section passed
    """
    config = config or get_default_engine_config()
    workers = workers if workers is not None else config["workers"]
    start_time = datetime.now()
    logger.info(f"[REPORT] Running sections: {', '.join(sections)}")

    reports: List[SectionReport] = []
    elapsed: Dict[str, float] = {}
    for name in sections:
        section_start = datetime.now()
        section = await run_section(
            name,
            primes=primes,
            types=types,
            table_path=table_path,
            field=field,
            include_rationals=include_rationals,
            ring_checks=ring_checks,
            workers=workers,
            config=config,
        )
        elapsed[name] = round((datetime.now() - section_start).total_seconds(), 2)
        status = "passed" if section.passed else f"FAILED {section.failures}"
        logger.info(f"[REPORT] Section {name} {status} in {elapsed[name]:.2f}s")
        reports.append(section)

    report = VerificationReport(
        passed=all(s.passed for s in reports),
        sections=reports,
        timings=elapsed if timings else None,
    )
    total = (datetime.now() - start_time).total_seconds()
    logger.info(f"[SUCCESS] Report assembled in {total:.2f}s, passed={report.passed}")
    return report
