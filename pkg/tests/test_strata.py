"""
Tests for the stratum census, type names, orbits, duality, decomposition
and the rule-based enumeration.
"""

from collections import Counter

import pytest

from app.diagrams import (
    COUPLING_RULES,
    EMPTY_DIAGRAM,
    FULL_RULES,
    RULE_CHART,
    RULE_I,
    RULE_II,
    Diagram,
    admissibility_failures,
    divisor,
)
from app.hypersimplex import S4
from app.strata import (
    dual_mask,
    dual_record,
    dual_type_name,
    decompose,
    diagram_index,
    exhaustive_rule_enumeration,
    make_record,
    mask_display,
    orbits,
    recompose,
    record_index,
    rule_difference,
    s4_act_record,
    split_type_codims,
    split_type_name,
    strata_summary,
    strata_to_csv,
    verify_strata,
)


def _record(records, *names):
    wanted = set(names)
    return next(r for r in records if {d.name for d in r.clique} == wanted)


class TestCensus:
    def test_total(self, records):
        assert len(records) == 1424

    def test_codimension_profile(self, records):
        by_codim = Counter(r.codim for r in records)
        assert dict(by_codim) == {0: 1, 1: 23, 2: 142, 3: 376, 4: 491, 5: 313, 6: 78}

    def test_split_cliques(self, records):
        split = [r for r in records if r.shift_mask == "000"]
        assert len(split) == 178
        assert sum(1 for r in split if r.codim == 3) == 78

    def test_distinct_diagrams(self, records):
        assert len({r.diagram for r in records}) == len(records)

    def test_summary(self, records):
        summary = strata_summary(records)
        assert summary["strata"] == 1424
        assert summary["divisors"] == 23
        assert summary["max_codim"] == 6

    def test_csv_has_one_row_per_stratum(self, records):
        lines = strata_to_csv(records).splitlines()
        assert lines[0].startswith("clique,type,mask,codim")
        assert len(lines) == 1425


class TestTypes:
    @pytest.mark.parametrize(
        "names,type_name",
        [
            (("C1", "Cstar1"), "CCstar_op"),
            (("C1", "Cstar2"), "CCstar_nop"),
            (("D12", "D34"), "DD_op"),
            (("D12", "E12"), "DE"),
            (("D12", "E34"), "DEstar"),
            (("C1", "D23"), "CD"),
        ],
    )
    def test_split_type_names(self, names, type_name):
        assert split_type_name([divisor(n) for n in names]) == type_name

    def test_shifting_divisors_do_not_change_split_type(self, records):
        r = _record(records, "A", "C1")
        assert r.type_name == "C"
        assert r.shift_mask == "100"
        assert r.display_type == "C (•∘∘)"

    def test_split_codims(self):
        codims = split_type_codims()
        assert codims["X0"] == 0
        assert codims["CCstar_opD"] == 3

    def test_duality_helpers(self):
        assert dual_type_name("CD") == "CstarD"
        assert dual_type_name("DE") == "DEstar"
        assert dual_type_name("DD_op") == "DD_op"
        assert dual_mask("100") == "001"
        assert mask_display("010") == "∘•∘"


class TestSymmetry:
    def test_orbits_match_multiplicities(self, records):
        grouped = orbits(records)
        c_orbit = grouped[_record(records, "C1").orbit_id]
        assert len(c_orbit) == 4
        e_orbit = grouped[_record(records, "E12").orbit_id]
        assert len(e_orbit) == 6

    def test_orbit_id_is_least_clique(self, records):
        assert _record(records, "C3").orbit_id == "{C1}"
        assert _record(records, "D23", "E23").orbit_id == "{D12,E12}"

    def test_s4_action_preserves_type(self, records):
        index = record_index(records)
        r = _record(records, "C1", "D23", "B")
        for perm in S4:
            image = s4_act_record(perm, r, index)
            assert (image.type_name, image.shift_mask, image.codim) == (
                r.type_name, r.shift_mask, r.codim
            )

    def test_duality_is_involution(self, records):
        index = record_index(records)
        r = _record(records, "A", "C1", "D23")
        image = dual_record(r, index)
        assert {d.name for d in image.clique} == {"Astar", "Cstar1", "D23"}
        assert image.shift_mask == "001"
        assert dual_record(image, index) == r


class TestDecomposition:
    def test_decompose_recompose(self, records):
        index = diagram_index(records)
        r = _record(records, "A", "B", "C1")
        split, mask = decompose(r.diagram, index)
        assert mask == "110"
        assert split == make_record([divisor("C1")]).diagram
        assert recompose(split, mask) == r.diagram

    def test_decompose_unknown_diagram(self, records):
        from app.diagrams import Diagram
        from app.hypersimplex import parse_edge

        with pytest.raises(ValueError):
            decompose(Diagram(marked=frozenset({parse_edge("1-2")})), diagram_index(records))


@pytest.mark.slow
class TestRuleEnumeration:
    def test_full_rules_reproduce_census(self, records):
        found = exhaustive_rule_enumeration(FULL_RULES)
        assert len(found) == 1424
        assert rule_difference(records, found) == ([], [])

    def test_rules_i_ii_contain_census(self, records):
        found = exhaustive_rule_enumeration()
        missing, extra = rule_difference(records, found)
        assert len(found) == 1880
        assert missing == []
        assert len(extra) == 456
        assert all(admissibility_failures(d, COUPLING_RULES) for d in extra)

    def test_chart_rule_alone(self):
        assert len(exhaustive_rule_enumeration((RULE_I, RULE_II, RULE_CHART))) == 1808

    def test_verify_strata_section(self, records):
        diagrams = {r.diagram for r in records}
        section = verify_strata(records, rule_diagrams=diagrams, basic_diagrams=diagrams)
        assert section.passed, section.failures
        assert section.data["strata"] == 1424
        assert section.data["rule_enumeration"] == {"rules_i_ii": 1424, "coupled": 1424}

    def test_section_accepts_excess_rejected_by_coupling(self, records):
        diagrams = {r.diagram for r in records}
        rates = _record(records, "C4", "Cstar4", "D23").diagram
        # the D23 rate on the points 2,3 without the matching rate on the planes
        uncoupled = Diagram(
            rates.marked,
            frozenset(s for s in rates.sharp if s.face.name not in ("T2s_4", "T3_4")),
        )
        assert uncoupled not in diagrams
        section = verify_strata(
            records, rule_diagrams=diagrams, basic_diagrams=diagrams | {uncoupled}
        )
        assert section.passed, section.failures
        excess = next(c for c in section.checks if c.name == "rules_i_ii_excess_fails_coupling")
        assert excess.detail == "1 diagrams beyond the census"

    def test_section_reports_census_diagram_missed_by_rules(self, records):
        diagrams = {r.diagram for r in records}
        section = verify_strata(
            records, rule_diagrams=diagrams, basic_diagrams=diagrams - {EMPTY_DIAGRAM}
        )
        assert "rules_i_ii_cover_census" in section.failures


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
