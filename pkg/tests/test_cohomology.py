"""
Tests for the ring section: S4 stability controls, budgets and the full
Hilbert / pairing / witness computation (slow).
"""

import pytest

from app.cohomology import (
    EXPECTED_HILBERT,
    WITNESS_EXPONENTS,
    field_ring,
    ideal_equality,
    monomial,
    ring_context,
    s4_stability_check,
    socle_witness,
    verify_ring,
)
from app.presentation import VARIABLES, Presentation, Relation, build_presentation, polynomial_ring


@pytest.fixture(scope="module")
def full():
    return build_presentation()


def _with_family_i(full, extra):
    return Presentation(VARIABLES, full.family("i") + extra)


class TestHelpers:
    def test_witness_has_top_degree(self):
        assert sum(WITNESS_EXPONENTS.values()) == 12

    def test_monomial(self):
        R = field_ring("GF2")
        m = monomial(R, {"y1": 2, "a": 1})
        assert len(m.terms()) == 1
        assert sum(m.LM) == 3


class TestStability:
    def test_symmetric_relations_are_stable(self, full):
        custom = _with_family_i(full, full.family("ii"))
        stable, violations = s4_stability_check(custom, "GF2", truncation_degree=2)
        assert stable
        assert violations == []

    def test_single_relation_breaks_symmetry(self, full):
        R = polynomial_ring(VARIABLES)
        names = dict(zip(VARIABLES, R.gens))
        custom = _with_family_i(full, [Relation("ii", names["c1"] * names["d12"])])
        stable, violations = s4_stability_check(custom, "GF2", truncation_degree=2)
        assert not stable
        assert any(v.startswith("2134:") for v in violations)


class TestVerifyRing:
    def test_unknown_check(self):
        with pytest.raises(ValueError):
            verify_ring(selected=("hilbert", "magic"))

    def test_budget_overrun_is_a_failed_check(self):
        config = {"truncation_degree": 13, "groebner_max_seconds": 7200, "groebner_max_pairs": 0}
        section = verify_ring("GF2", config=config, selected=())
        assert not section.passed
        assert "groebner_budget" in section.failures
        assert section.data["degree_reached"] == 2
        # presentation checks run before the basis is computed
        passed = {c.name for c in section.checks if c.passed}
        assert {"family_size:i", "family_size:ii", "family_size:iv", "family_i_rank"} <= passed

    @pytest.mark.slow
    def test_truncated_basis_cannot_read_the_top(self):
        config = {"truncation_degree": 4, "groebner_max_seconds": 7200, "groebner_max_pairs": 5_000_000}
        section = verify_ring("GF2", config=config, selected=("hilbert",))
        assert section.failures == ["hilbert"]


@pytest.mark.slow
class TestFullRing:
    @pytest.fixture(scope="class")
    def ctx(self, full):
        return ring_context(full, "GF2")

    def test_socle_witness(self, ctx):
        witness = socle_witness(ctx)
        assert witness.ok, witness

    def test_s4_stability(self, full, ctx):
        stable, violations = s4_stability_check(full, ctx=ctx)
        assert stable, violations[:5]

    def test_flag_relations_on_one_chain_suffice(self):
        equal, missing = ideal_equality("GF2")
        assert equal, missing[:5]

    def test_section(self):
        section = verify_ring("GF2")
        assert section.passed, section.failures
        assert section.data["hilbert"] == EXPECTED_HILBERT
        assert section.data["pairing_ranks"] == EXPECTED_HILBERT


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
