"""
Tests for the count table, polynomial arithmetic, Betti numbers and zeta
exponents.
"""

import pytest

from app.counting import (
    EXPECTED_FIBER,
    FIBER_FACTORS,
    SHIFT_FACTORIZATIONS,
    BettiProfile,
    IntPolynomial,
    betti_from_count,
    counts_to_csv,
    euler_characteristic,
    fiber_factor,
    fiber_sum,
    flag_poly,
    point_count,
    row_checks,
    total_poincare,
    verify_table,
    zeta_exponents,
)

HILBERT = [1, 26, 188, 652, 1394, 2112, 2414, 2112, 1394, 652, 188, 26, 1]


class TestIntPolynomial:
    def test_coefficients_are_low_to_high(self):
        p = IntPolynomial([6, -5, 1])
        assert p.coefficients == [6, -5, 1]
        assert p.degree == 2
        assert p.coefficient(1) == -5
        assert p.coefficient(7) == 0

    def test_zero(self):
        zero = IntPolynomial(0)
        assert zero.coefficients == []
        assert zero.degree == -1
        assert IntPolynomial([0, 0]) == zero

    def test_arithmetic(self):
        q = IntPolynomial.q()
        assert (q - 2) * (q - 3) == FIBER_FACTORS["I"]
        assert q ** 2 - 1 == (q - 1) * (q + 1)
        assert 3 * q == q + q + q
        assert (q - 1) * 0 == 0

    def test_evaluate_and_substitute(self):
        p = IntPolynomial([1, 1])
        assert p.evaluate(4) == 5
        assert p.substitute_power(2) == IntPolynomial([1, 0, 1])
        with pytest.raises(ValueError):
            p.substitute_power(0)

    def test_divides(self):
        q = IntPolynomial.q()
        assert (q - 2).divides(q ** 3 * (q - 2))
        assert not (q - 2).divides(q ** 3 * (q - 1))
        assert not (2 * q).divides(q)

    def test_palindromic(self):
        assert IntPolynomial(list(EXPECTED_FIBER)).is_palindromic()
        assert not IntPolynomial([1, 2]).is_palindromic()


class TestTable:
    def test_rows(self, table):
        assert len(table) == 160
        assert table.row("X0", "000").count == IntPolynomial.q() ** 6
        with pytest.raises(KeyError):
            table.row("X0", "222")

    def test_fiber_annotations(self, table):
        row = table.row("CCstar_op", "000")
        assert row.fiber_annotation == "II"
        assert fiber_factor(row.fiber).divides(row.count)
        assert fiber_factor(("II", "II")) == IntPolynomial([-2, 1]) ** 2

    @pytest.mark.parametrize("mask", sorted(SHIFT_FACTORIZATIONS))
    def test_shift_rows_factor(self, table, mask):
        assert table.row("X0", mask).count == SHIFT_FACTORIZATIONS[mask]

    def test_row_checks_all_pass(self, table, records):
        failing = [rc for rc in row_checks(table, records) if not rc.passed]
        assert failing == []


class TestTotals:
    def test_fiber_sum(self, table):
        assert fiber_sum(table).coefficients == list(EXPECTED_FIBER)

    def test_flag_variety(self):
        assert flag_poly().coefficients == [1, 3, 5, 6, 5, 3, 1]
        assert flag_poly().evaluate(1) == 24

    def test_betti_numbers(self, table):
        betti = total_poincare(table)
        assert betti.even_betti == HILBERT
        assert betti.is_palindromic()
        assert betti.betti_numbers[:4] == [1, 0, 26, 0]
        assert len(betti.betti_numbers) == 25

    def test_euler_characteristic(self, table):
        assert euler_characteristic(table) == 11160
        assert euler_characteristic(table) == sum(HILBERT)

    def test_zeta_exponents(self, table):
        exponents = zeta_exponents(table)
        assert exponents[0] == (0, 1)
        assert exponents[6] == (6, 2414)

    def test_point_count(self, table):
        assert point_count(table, 2) == 1461285
        assert point_count(table, 2, r=2) == point_count(table, 4)

    def test_negative_coefficient_rejected(self):
        with pytest.raises(ValueError):
            betti_from_count(IntPolynomial([1, -1]))
        assert betti_from_count(IntPolynomial(0)) == BettiProfile(even_betti=[0])


class TestVerifyTable:
    def test_section_passes(self, table, records):
        section = verify_table(table, records)
        assert section.passed, section.failures
        assert section.data["euler_characteristic"] == 11160
        assert section.data["even_betti"] == HILBERT

    def test_broken_row_is_itemized(self, table, records):
        from dataclasses import replace

        from app.counting import CountTable

        rows = list(table.rows)
        rows[0] = replace(rows[0], count=IntPolynomial([0, 0, 0, 0, 0, 1]))
        section = verify_table(CountTable(rows=rows), records)
        failed = {c.name for c in section.checks if not c.passed}
        assert "degree" in failed
        assert "fiber_sum" in failed

    def test_csv(self, table, records):
        lines = counts_to_csv(table, records).splitlines()
        assert lines[0].startswith("type,mask,multiplicity,degree")
        assert len(lines) == 161


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
