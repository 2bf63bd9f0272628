"""
Tests for section dispatch, the oracle worker pool and report assembly.
"""

import pytest

from app.tetra_common import report_to_json
from app.verification_service import build_report, run_oracle_results, run_section


@pytest.mark.asyncio
async def test_unknown_section():
    with pytest.raises(ValueError):
        await run_section("homology")


@pytest.mark.asyncio
async def test_counts_section():
    section = await run_section("counts")
    assert section.section == "counts"
    assert section.passed, section.failures


@pytest.mark.asyncio
@pytest.mark.parametrize("workers", [1, 2])
async def test_oracle_results_keep_input_order(workers):
    results = await run_oracle_results(primes=(3, 2), types=("A", "X0"), workers=workers)
    assert [(r.type, r.q) for r in results] == [("A", 3), ("A", 2), ("X0", 3), ("X0", 2)]
    assert all(r.match for r in results)


@pytest.mark.asyncio
async def test_report_sections_in_requested_order():
    report = await build_report(sections=("oracle", "counts"), primes=(2,), types=("X0",))
    assert [s.section for s in report.sections] == ["oracle", "counts"]
    assert report.passed
    assert report.timings is None
    assert report.failures() == []


@pytest.mark.asyncio
async def test_report_is_deterministic_without_timings():
    first = await build_report(sections=("counts",))
    second = await build_report(sections=("counts",))
    assert report_to_json(first) == report_to_json(second)


@pytest.mark.asyncio
async def test_failed_section_fails_report(table_lines, write_table):
    lines = list(table_lines)
    lines[5] = "X0           000  1   0,0,0,0,0,0,2      -\n"
    report = await build_report(
        sections=("counts", "oracle"), primes=(2,), types=("X0",),
        table_path=write_table(lines), timings=True,
    )
    assert not report.passed
    assert "counts:fiber_sum" in report.failures()
    # X0 at q = 2 reads 2 * 64 from the edited table
    assert "oracle:X0:q=2" in report.failures()
    assert set(report.timings) == {"counts", "oracle"}


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
