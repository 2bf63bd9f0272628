"""
Stratification census: cliques of compatible divisors, their diagrams,
type names, S4 orbits, the closure poset and the rule-based enumeration
that must reproduce the same diagram set.
"""

from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import datetime
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple
import csv
import io
import logging

import networkx as nx

from .data_parser import ExpectedType, parse_strata_types
from .diagrams import (
    BASIC_RULES,
    COUPLING_RULES,
    EMPTY_DIAGRAM,
    FULL_RULES,
    SHIFT_DIVISOR,
    Diagram,
    Divisor,
    admissibility_failures,
    clique_name,
    compatible,
    complementary_triangles,
    diagram_of,
    divisors,
    dual_divisor,
    full_level_edges,
    local_patterns,
    poset_leq,
    s4_act_divisor,
    sort_clique,
)
from .hypersimplex import (
    ALL_COMPONENTS,
    ALL_EDGES,
    LEVELS,
    S4,
    Perm,
    SharpEdge,
    affine_component,
    dual_edge,
    hypersimplex,
    related_pairs,
)
from .tetra_common import (
    STRATA_TYPES_FILE,
    AdmissibilityError,
    CheckResult,
    SectionReport,
    VerificationError,
    check,
    section_from_checks,
)

logger = logging.getLogger(__name__)

SPLIT_TYPES: Tuple[str, ...] = (
    "X0",
    "C",
    "Cstar",
    "D",
    "E",
    "CCstar_nop",
    "CCstar_op",
    "CD",
    "CstarD",
    "CE",
    "CstarE",
    "DD_op",
    "DE",
    "DEstar",
    "CCstar_opD",
    "CCstar_nopD",
    "CCstarE",
    "CDE",
    "CstarDE",
    "DD_opE",
)

SHIFT_MASKS: Tuple[str, ...] = (
    "000", "100", "010", "001", "110", "101", "011", "111",
)

DUAL_TYPE: Dict[str, str] = {
    "C": "Cstar",
    "Cstar": "C",
    "CD": "CstarD",
    "CstarD": "CD",
    "CE": "CstarE",
    "CstarE": "CE",
    "DE": "DEstar",
    "DEstar": "DE",
    "CDE": "CstarDE",
    "CstarDE": "CDE",
}

EXPECTED_STRATA = 1424
EXPECTED_SPLIT_CLIQUES = 178
MASK_SYMBOLS = {"1": "•", "0": "∘"}


def dual_type_name(type_name: str) -> str:
    return DUAL_TYPE.get(type_name, type_name)


def dual_mask(mask: str) -> str:
    """Duality swaps Δ1 and Δ3."""
    return mask[::-1]


def mask_display(mask: str) -> str:
    """"100" -> "•∘∘"."""
    return "".join(MASK_SYMBOLS[ch] for ch in mask)


def shift_mask_of(clique: Iterable[Divisor]) -> str:
    names = {d.name for d in clique}
    return "".join("1" if SHIFT_DIVISOR[k] in names else "0" for k in LEVELS)


def split_type_name(clique: Iterable[Divisor]) -> str:
    """
    Canonical type of the split part of a clique.

    Raises:
        ValueError: if the split part matches no known type
    """
    split = [d for d in clique if not d.is_shifting]
    letters = sorted(d.letter for d in split)
    by_letter = {d.letter: d for d in split}

    if not split:
        return "X0"
    if len(split) == 1:
        return letters[0]

    def same_index(a: str, b: str) -> bool:
        return by_letter[a].index == by_letter[b].index

    if letters == ["C", "Cstar"]:
        return "CCstar_op" if same_index("C", "Cstar") else "CCstar_nop"
    if letters == ["D", "D"]:
        return "DD_op"
    if letters == ["D", "E"]:
        return "DE" if same_index("D", "E") else "DEstar"
    if len(split) == 2 and letters in (["C", "D"], ["C", "E"], ["Cstar", "D"], ["Cstar", "E"]):
        return "".join(letters)
    if letters == ["C", "Cstar", "D"]:
        return "CCstar_opD" if same_index("C", "Cstar") else "CCstar_nopD"
    if letters == ["C", "Cstar", "E"]:
        return "CCstarE"
    if letters == ["C", "D", "E"]:
        return "CDE"
    if letters == ["Cstar", "D", "E"]:
        return "CstarDE"
    if letters == ["D", "D", "E"]:
        return "DD_opE"
    raise ValueError(f"no split type for {clique_name(split)}")


# ---------------------------------------------------------------------------
# Records


def clique_key(clique: Iterable[Divisor]) -> Tuple:
    return tuple(d.sort_key for d in sort_clique(clique))


def orbit_id(clique: Iterable[Divisor]) -> str:
    """Name of the least clique in the S4-orbit."""
    clique = tuple(clique)
    images = (sort_clique(s4_act_divisor(p, d) for d in clique) for p in S4)
    least = min(images, key=clique_key)
    return clique_name(least)


@dataclass(frozen=True)
class StratumRecord:
    clique: Tuple[Divisor, ...]
    diagram: Diagram
    type_name: str
    shift_mask: str
    codim: int
    orbit_id: str

    @property
    def name(self) -> str:
        return clique_name(self.clique)

    @property
    def display_type(self) -> str:
        return f"{self.type_name} ({mask_display(self.shift_mask)})"

    @property
    def sort_key(self):
        return self.codim, clique_key(self.clique)

    def to_dict(self) -> dict:
        return {
            "clique": [d.name for d in self.clique],
            "type": self.type_name,
            "mask": self.shift_mask,
            "codim": self.codim,
            "orbit": self.orbit_id,
            "diagram": self.diagram.serialize(),
        }


def make_record(clique: Iterable[Divisor]) -> StratumRecord:
    clique = sort_clique(clique)
    return StratumRecord(
        clique=clique,
        diagram=diagram_of(clique),
        type_name=split_type_name(clique),
        shift_mask=shift_mask_of(clique),
        codim=len(clique),
        orbit_id=orbit_id(clique),
    )


def codim(record: StratumRecord) -> int:
    return len(record.clique)


def split_codim(record: StratumRecord) -> int:
    return record.codim - record.shift_mask.count("1")


# ---------------------------------------------------------------------------
# Enumeration


def compatibility_graph(divs: Optional[Sequence[Divisor]] = None) -> nx.Graph:
    divs = tuple(divs or divisors())
    graph = nx.Graph()
    graph.add_nodes_from(divs)
    for i, d1 in enumerate(divs):
        for d2 in divs[i + 1:]:
            if compatible(d1, d2):
                graph.add_edge(d1, d2)
    logger.info(
        f"[STRATA] Compatibility graph: {graph.number_of_nodes()} divisors, "
        f"{graph.number_of_edges()} compatible pairs"
    )
    return graph


def enumerate_cliques(graph: nx.Graph) -> List[Tuple[Divisor, ...]]:
    """All cliques, the empty one included, in canonical order."""
    cliques = [()] + [sort_clique(c) for c in nx.enumerate_all_cliques(graph)]
    cliques.sort(key=lambda c: (len(c), clique_key(c)))
    return cliques


def load_expected_types(path: Optional[str] = None) -> List[ExpectedType]:
    result = parse_strata_types(path or STRATA_TYPES_FILE)
    result.raise_if_failed()
    return result.rows


def split_type_codims(expected: Optional[Sequence[ExpectedType]] = None) -> Dict[str, int]:
    expected = expected if expected is not None else load_expected_types()
    return {row.type: row.codim for row in expected if row.mask == "000"}


_STRATA: Optional[List[StratumRecord]] = None


def enumerate_strata(
    expected: Optional[Sequence[ExpectedType]] = None,
) -> List[StratumRecord]:
    """
    Build one record per clique of compatible divisors.

    Raises:
        AdmissibilityError: a clique diagram breaks a rule or two cliques
            give the same diagram
        VerificationError: the census disagrees with the expected-type table
    """
    global _STRATA
    if _STRATA is not None and expected is None:
        return _STRATA

    start_time = datetime.now()
    records = [make_record(c) for c in enumerate_cliques(compatibility_graph())]

    seen: Dict[Diagram, str] = {}
    for r in records:
        failures = admissibility_failures(r.diagram, FULL_RULES)
        if failures:
            raise failures[0].to_error()
        if r.diagram in seen:
            raise AdmissibilityError("injectivity", f"{r.name} and {seen[r.diagram]}")
        seen[r.diagram] = r.name

    mismatches = census_mismatches(records, expected or load_expected_types())
    if mismatches:
        raise VerificationError(mismatches)

    records.sort(key=lambda r: r.sort_key)
    elapsed = (datetime.now() - start_time).total_seconds()
    logger.info(f"[STRATA] Enumerated {len(records)} strata in {elapsed:.2f}s")
    if expected is None:
        _STRATA = records
    return records


def census_mismatches(
    records: Sequence[StratumRecord], expected: Sequence[ExpectedType]
) -> List[str]:
    """Compare (type, mask) counts and codimensions with the expected table."""
    split_rows = {row.type: row for row in expected if row.type != "X0" or row.mask == "000"}
    shift_rows = {row.mask: row for row in expected if row.type == "X0"}
    counts = Counter((r.type_name, r.shift_mask) for r in records)
    problems = []

    for type_name, row in split_rows.items():
        for mask, shift in shift_rows.items():
            want = row.multiplicity * shift.multiplicity
            got = counts.get((type_name, mask), 0)
            if got != want:
                problems.append(f"{type_name} {mask}: {got} strata, expected {want}")
    unexpected = {k for k in counts if k[0] not in split_rows or k[1] not in shift_rows}
    problems.extend(f"{t} {m}: unexpected type" for t, m in sorted(unexpected))

    for r in records:
        if r.type_name not in split_rows or r.shift_mask not in shift_rows:
            continue
        want_codim = split_rows[r.type_name].codim + shift_rows[r.shift_mask].codim
        if r.codim != want_codim:
            problems.append(f"{r.name}: codim {r.codim}, expected {want_codim}")
    return problems


def record_index(records: Sequence[StratumRecord]) -> Dict[Tuple, StratumRecord]:
    return {clique_key(r.clique): r for r in records}


def s4_act_record(
    perm: Perm, record: StratumRecord, index: Optional[Dict[Tuple, StratumRecord]] = None
) -> StratumRecord:
    image = sort_clique(s4_act_divisor(perm, d) for d in record.clique)
    if index is not None and clique_key(image) in index:
        return index[clique_key(image)]
    return make_record(image)


def dual_record(
    record: StratumRecord, index: Optional[Dict[Tuple, StratumRecord]] = None
) -> StratumRecord:
    image = sort_clique(dual_divisor(d) for d in record.clique)
    if index is not None and clique_key(image) in index:
        return index[clique_key(image)]
    return make_record(image)


def orbits(records: Sequence[StratumRecord]) -> Dict[str, List[StratumRecord]]:
    grouped: Dict[str, List[StratumRecord]] = defaultdict(list)
    for r in records:
        grouped[r.orbit_id].append(r)
    return dict(grouped)


# ---------------------------------------------------------------------------
# Decomposition and poset


def shift_edges(mask: str) -> FrozenSet:
    edges = frozenset()
    for k, bit in zip(LEVELS, mask):
        if bit == "1":
            edges |= full_level_edges(k)
    return edges


def diagram_index(records: Sequence[StratumRecord]) -> Dict[Diagram, StratumRecord]:
    return {r.diagram: r for r in records}


def decompose(
    d: Diagram, index: Optional[Dict[Diagram, StratumRecord]] = None
) -> Tuple[Diagram, str]:
    """
    Split a diagram into its split part and shift mask.

    Raises:
        ValueError: if no clique produces the diagram
    """
    by_diagram = index if index is not None else diagram_index(enumerate_strata())
    record = by_diagram.get(d)
    if record is None:
        raise ValueError(f"diagram is not produced by any clique: {d.serialize()}")
    split = diagram_of(c for c in record.clique if not c.is_shifting)
    return split, record.shift_mask


def recompose(split: Diagram, mask: str) -> Diagram:
    return Diagram(split.marked | shift_edges(mask), split.sharp)


def divisors_above(d: Diagram) -> List[Divisor]:
    """Divisors whose diagram lies above d in the closure order."""
    return [div for div in divisors() if poset_leq(d, diagram_of([div]))]


# ---------------------------------------------------------------------------
# Rule-based enumeration


class _RuleSearch:
    """Component-by-component backtracking over edge bitmasks."""

    def __init__(self, rules: Sequence[str]):
        self.rules = tuple(rules)
        self.edge_bit = {e: 1 << i for i, e in enumerate(ALL_EDGES)}
        # affine components first so the chart rule can force projective ones
        self.components = list(ALL_COMPONENTS)
        self.position = {c: i for i, c in enumerate(self.components)}
        self.patterns = [
            [self.mask(p) for p in local_patterns(c)] for c in self.components
        ]
        self.patterns_set = [set(p) for p in self.patterns]
        self.face_mask = {c.face: self.mask(c.edges) for c in self.components if c.is_projective}
        self.pairs_at: Dict[int, list] = defaultdict(list)
        for pair in related_pairs():
            a, b = self.position[pair.first.component], self.position[pair.second.component]
            image = {
                self.edge_bit[x]: self.edge_bit[y] for x, y in pair.correspondence
            }
            self.pairs_at[max(a, b)].append(
                (a, self.mask(pair.first.triangle.edges), b,
                 self.mask(pair.second.triangle.edges), image)
            )
        self.dual_bit = {self.edge_bit[e]: self.edge_bit[dual_edge(e)] for e in ALL_EDGES}
        self.complements_at: Dict[int, list] = defaultdict(list)
        for t, u in complementary_triangles():
            pt = self.position[_projective(t)]
            pu = self.position[_projective(u)]
            ht = self.position[_projective(hypersimplex(t.level))]
            hu = self.position[_projective(hypersimplex(u.level))]
            self.complements_at[max(pt, pu, ht, hu)].append(
                (pt, pu, ht, hu, self.face_mask[t], self.face_mask[u])
            )
        self.found: List[Diagram] = []
        self.assigned = [0] * len(self.components)

    def mask(self, edges: Iterable) -> int:
        m = 0
        for e in edges:
            m |= self.edge_bit[e]
        return m

    def dual_mask(self, m: int) -> int:
        out = 0
        for bit, image in self.dual_bit.items():
            if m & bit:
                out |= image
        return out

    def pair_ok(self, a: int, ta: int, b: int, tb: int, image: Dict[int, int]) -> bool:
        ma, mb = self.assigned[a] & ta, self.assigned[b] & tb
        na, nb = bin(ma).count("1"), bin(mb).count("1")
        counts = (min(na, nb), max(na, nb))
        if counts not in ((0, 0), (1, 1), (0, 3), (1, 3), (3, 3)):
            return False
        if counts == (1, 1):
            return image[ma] == mb
        return True

    def candidates(self, i: int) -> List[int]:
        comp = self.components[i]
        if comp.is_projective and "chart" in self.rules:
            s = self.assigned[0] | self.assigned[1] | self.assigned[2]
            fm = self.face_mask[comp.face]
            if s & fm != fm:
                forced = s & fm
                return [forced] if forced in self.patterns_set[i] else []
        return self.patterns[i]

    def run(self) -> List[Diagram]:
        self._descend(0)
        return self.found

    def _descend(self, i: int) -> None:
        if i == len(self.components):
            self.found.append(self.to_diagram())
            return
        for pattern in self.candidates(i):
            self.assigned[i] = pattern
            if not all(self.pair_ok(*p) for p in self.pairs_at.get(i, ())):
                continue
            if "complement" in self.rules and not all(
                self.complement_ok(*c) for c in self.complements_at.get(i, ())
            ):
                continue
            self._descend(i + 1)
        self.assigned[i] = 0

    def complement_ok(self, pt, pu, ht, hu, tmask, umask) -> bool:
        t_full = self.assigned[ht] & tmask == tmask
        u_full = self.assigned[hu] & umask == umask
        if not (t_full and u_full):
            return True
        return self.dual_mask(self.assigned[pt]) == self.assigned[pu]

    def to_diagram(self) -> Diagram:
        marked = set()
        sharp = set()
        for comp, m in zip(self.components, self.assigned):
            edges = [e for e in comp.edges if m & self.edge_bit[e]]
            if comp.is_projective:
                sharp.update(SharpEdge(e, comp.face) for e in edges)
            else:
                marked.update(edges)
        return Diagram(frozenset(marked), frozenset(sharp))


def _projective(face):
    for comp in ALL_COMPONENTS:
        if comp.face == face:
            return comp
    raise KeyError(face)


def exhaustive_rule_enumeration(rules: Sequence[str] = BASIC_RULES) -> Set[Diagram]:
    """Every diagram satisfying the selected rules, by backtracking."""
    start_time = datetime.now()
    found = _RuleSearch(rules).run()
    elapsed = (datetime.now() - start_time).total_seconds()
    logger.info(
        f"[STRATA] Rule enumeration ({', '.join(rules)}) found {len(found)} diagrams "
        f"in {elapsed:.2f}s"
    )
    return set(found)


def rule_difference(
    records: Sequence[StratumRecord], rule_diagrams: Set[Diagram]
) -> Tuple[List[Diagram], List[Diagram]]:
    """(clique diagrams the rules miss, rule diagrams no clique gives)."""
    clique_diagrams = {r.diagram for r in records}
    missing = sorted(clique_diagrams - rule_diagrams, key=lambda d: d.sort_key)
    extra = sorted(rule_diagrams - clique_diagrams, key=lambda d: d.sort_key)
    return missing, extra


# ---------------------------------------------------------------------------
# Verification


def _poset_problems(records: Sequence[StratumRecord]) -> Tuple[int, int]:
    """(records whose codim differs from divisors above, down-set mismatches)."""
    singles = [(d, diagram_of([d])) for d in divisors()]
    codim_bad = 0
    for r in records:
        above = sum(1 for _, g in singles if poset_leq(r.diagram, g))
        if above != r.codim:
            codim_bad += 1

    keys = [frozenset(r.clique) for r in records]
    downset_bad = 0
    for i, r in enumerate(records):
        for j, other in enumerate(records):
            if poset_leq(other.diagram, r.diagram) != (keys[j] >= keys[i]):
                downset_bad += 1
    return codim_bad, downset_bad


def verify_strata(
    records: Optional[Sequence[StratumRecord]] = None,
    expected: Optional[Sequence[ExpectedType]] = None,
    rule_diagrams: Optional[Set[Diagram]] = None,
    basic_diagrams: Optional[Set[Diagram]] = None,
) -> SectionReport:
    """Run every stratification check and return the "strata" section."""
    records = list(records or enumerate_strata())
    expected = list(expected or load_expected_types())
    index = record_index(records)
    checks: List[CheckResult] = []

    split_count = sum(1 for r in records if r.shift_mask == "000")
    checks.append(check("strata_total", EXPECTED_STRATA, len(records)))
    checks.append(check("split_cliques", EXPECTED_SPLIT_CLIQUES, split_count))
    checks.append(check("divisor_count", 23, sum(1 for r in records if r.codim == 1)))
    checks.append(check("max_codim", 6, max(r.codim for r in records)))
    checks.append(
        check(
            "split_codim3_cliques",
            78,
            sum(1 for r in records if r.shift_mask == "000" and r.codim == 3),
        )
    )

    mismatches = census_mismatches(records, expected)
    checks.append(
        CheckResult(
            name="type_table", passed=not mismatches, expected=[], actual=mismatches
        )
    )
    checks.append(
        check("distinct_diagrams", len(records), len({r.diagram for r in records}))
    )
    checks.append(
        check(
            "local_patterns",
            [15, 15],
            [len(local_patterns(affine_component(k))) for k in (1, 3)],
        )
    )
    checks.append(
        check("empty_diagram_present", True, any(r.diagram == EMPTY_DIAGRAM for r in records))
    )

    # orbit sizes equal per-type multiplicities
    mult = {(row.type, "000"): row.multiplicity for row in expected if row.mask == "000"}
    orbit_problems = []
    for oid, members in sorted(orbits(records).items()):
        r = members[0]
        want = mult.get((r.type_name, "000"))
        if want is not None and len(members) != want:
            orbit_problems.append(f"{oid}: {len(members)} != {want}")
    checks.append(
        CheckResult(
            name="orbit_sizes", passed=not orbit_problems, expected=[], actual=orbit_problems
        )
    )

    dual_problems = []
    for r in records:
        image = dual_record(r, index)
        if clique_key(image.clique) not in index:
            dual_problems.append(f"{r.name}: dual missing")
        elif (image.type_name, image.shift_mask) != (
            dual_type_name(r.type_name), dual_mask(r.shift_mask)
        ):
            dual_problems.append(f"{r.name}: dual type {image.type_name} {image.shift_mask}")
        elif dual_record(image, index) != r:
            dual_problems.append(f"{r.name}: dual is not an involution")
    checks.append(
        CheckResult(name="duality", passed=not dual_problems, expected=[], actual=dual_problems)
    )

    recompose_bad = 0
    by_diagram = diagram_index(records)
    for r in records:
        split, mask = decompose(r.diagram, by_diagram)
        if mask != r.shift_mask or recompose(split, mask) != r.diagram:
            recompose_bad += 1
    checks.append(check("decompose_recompose", 0, recompose_bad))

    codim_bad, downset_bad = _poset_problems(records)
    checks.append(check("codim_equals_divisors_above", 0, codim_bad))
    checks.append(check("downsets_are_supercliques", 0, downset_bad))

    basic_diagrams = (
        basic_diagrams if basic_diagrams is not None else exhaustive_rule_enumeration()
    )
    basic_missing, basic_extra = rule_difference(records, basic_diagrams)
    checks.append(check("rules_i_ii_cover_census", 0, len(basic_missing)))
    uncoupled = [d for d in basic_extra if not admissibility_failures(d, COUPLING_RULES)]
    checks.append(
        CheckResult(
            name="rules_i_ii_excess_fails_coupling",
            passed=not uncoupled,
            expected=0,
            actual=len(uncoupled),
            detail=f"{len(basic_extra)} diagrams beyond the census",
        )
    )

    rule_diagrams = (
        rule_diagrams if rule_diagrams is not None else exhaustive_rule_enumeration(FULL_RULES)
    )
    missing, extra = rule_difference(records, rule_diagrams)
    checks.append(
        CheckResult(
            name="rule_enumeration",
            passed=not missing and not extra,
            expected=len(records),
            actual=len(rule_diagrams),
            detail=None if not (missing or extra) else (
                f"{len(missing)} missing, {len(extra)} extra"
            ),
        )
    )

    data = strata_summary(records)
    data["rule_enumeration"] = {"rules_i_ii": len(basic_diagrams), "coupled": len(rule_diagrams)}
    return section_from_checks("strata", checks, data)


def strata_summary(records: Sequence[StratumRecord]) -> dict:
    by_codim = Counter(r.codim for r in records)
    by_type = Counter((r.type_name, r.shift_mask) for r in records)
    return {
        "strata": len(records),
        "divisors": len(divisors()),
        "max_codim": max(r.codim for r in records),
        "by_codim": {str(k): by_codim[k] for k in sorted(by_codim)},
        "types": [
            {"type": t, "mask": m, "count": by_type[(t, m)]}
            for t in SPLIT_TYPES
            for m in SHIFT_MASKS
            if by_type.get((t, m))
        ],
    }


def strata_to_csv(records: Sequence[StratumRecord]) -> str:
    """CSV view of the census, one row per stratum."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["clique", "type", "mask", "codim", "orbit", "diagram"])
    for r in records:
        writer.writerow(
            [" ".join(d.name for d in r.clique), r.type_name, r.shift_mask,
             r.codim, r.orbit_id, r.diagram.serialize()]
        )
    return buffer.getvalue()
