"""
Diagrams (S, S#), the 23 divisors and the admissibility rules.

A diagram marks edges of the three hypersimplices (S, read by the affine
components) and edge/face incidences (S#, read by the projective
components). Divisor coincidence sets are loaded from
app/resources/divisors.txt; the marks of a clique of divisors come from the
rate rule in sharp_marks().
"""

from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple
import logging
import re

import networkx as nx

from .data_parser import parse_divisor_file
from .hypersimplex import (
    ALL_FACES,
    Component,
    Edge,
    Face,
    LEVELS,
    Perm,
    RelatedPair,
    SharpEdge,
    TRIANGLES,
    TriangleInstance,
    act_edge,
    act_sharp,
    dual_edge,
    dual_face,
    dual_sharp,
    edges_of_level,
    hypersimplex,
    labels_of_level,
    parse_edge,
    parse_sharp_edge,
    related_pairs,
    triangle_instances,
)
from .tetra_common import DIVISORS_FILE, AdmissibilityError, DataFormatError

logger = logging.getLogger(__name__)

DIVISOR_LETTERS = ("A", "B", "Astar", "C", "Cstar", "D", "E")
SHIFT_LEVEL = {"A": 1, "B": 2, "Astar": 3}
SHIFT_DIVISOR = {level: name for name, level in SHIFT_LEVEL.items()}
EXPECTED_DIVISOR_COUNT = 23

_NAME_RE = re.compile(r"^(Astar|Cstar|A|B|C|D|E)([1-4]*)$")


# ---------------------------------------------------------------------------
# Divisors


@dataclass(frozen=True)
class Divisor:
    """Codimension-one stratum closure with its set of collapsed edges."""

    name: str
    sset: FrozenSet[Edge]

    @property
    def letter(self) -> str:
        return split_divisor_name(self.name)[0]

    @property
    def index(self) -> Tuple[int, ...]:
        return split_divisor_name(self.name)[1]

    @property
    def is_shifting(self) -> bool:
        return self.name in SHIFT_LEVEL

    @property
    def shift_level(self) -> Optional[int]:
        return SHIFT_LEVEL.get(self.name)

    @property
    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return DIVISOR_LETTERS.index(self.letter), self.index

    @property
    def display_name(self) -> str:
        """"Cstar1" -> "C*_1", "D12" -> "D_12"."""
        base = self.letter.replace("star", "*")
        if not self.index:
            return base
        return f"{base}_{''.join(map(str, self.index))}"

    def __repr__(self) -> str:
        return f"Divisor({self.name})"


def split_divisor_name(name: str) -> Tuple[str, Tuple[int, ...]]:
    match = _NAME_RE.match(name)
    if not match:
        raise ValueError(f"invalid divisor name {name!r}")
    return match.group(1), tuple(int(ch) for ch in match.group(2))


def load_divisors(path: Optional[str] = None) -> Tuple[Divisor, ...]:
    """
    Load and validate the divisor table.

    Args:
        path: Optional path; defaults to the embedded divisors.txt

    Returns:
        The divisors in canonical order (A, B, Astar, C_i, Cstar_i, D_ij, E_ij)

    Raises:
        DataFormatError: on the first collected parse or consistency problem
    """
    path = path or DIVISORS_FILE
    result = parse_divisor_file(path)
    result.raise_if_failed()

    divisors = []
    for name, sset in result.rows:
        try:
            split_divisor_name(name)
        except ValueError as e:
            raise DataFormatError(path, 0, str(e))
        divisors.append(Divisor(name, sset))
    divisors.sort(key=lambda d: d.sort_key)

    if len(divisors) != EXPECTED_DIVISOR_COUNT:
        raise DataFormatError(
            path, 0, f"expected {EXPECTED_DIVISOR_COUNT} divisors, found {len(divisors)}"
        )
    seen: Dict[FrozenSet[Edge], str] = {}
    for d in divisors:
        if d.sset in seen:
            raise DataFormatError(
                path, 0, f"{d.name} and {seen[d.sset]} have the same coincidence set"
            )
        seen[d.sset] = d.name
    return tuple(divisors)


_DIVISORS: Optional[Tuple[Divisor, ...]] = None
_BY_NAME: Dict[str, Divisor] = {}
_BY_SSET: Dict[FrozenSet[Edge], Divisor] = {}


def divisors() -> Tuple[Divisor, ...]:
    """The embedded divisor catalogue, loaded once."""
    global _DIVISORS
    if _DIVISORS is None:
        _DIVISORS = load_divisors()
        _BY_NAME.update({d.name: d for d in _DIVISORS})
        _BY_SSET.update({d.sset: d for d in _DIVISORS})
        logger.info(f"[STRATA] Divisor catalogue ready ({len(_DIVISORS)} divisors)")
    return _DIVISORS


def divisor(name: str) -> Divisor:
    divisors()
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown divisor {name!r}") from None


def divisor_by_sset(sset: Iterable[Edge]) -> Divisor:
    divisors()
    return _BY_SSET[frozenset(sset)]


def s4_act_divisor(perm: Perm, d: Divisor) -> Divisor:
    return divisor_by_sset(act_edge(perm, e) for e in d.sset)


def dual_divisor(d: Divisor) -> Divisor:
    return divisor_by_sset(dual_edge(e) for e in d.sset)


def sort_clique(clique: Iterable[Divisor]) -> Tuple[Divisor, ...]:
    return tuple(sorted(set(clique), key=lambda d: d.sort_key))


def clique_name(clique: Iterable[Divisor]) -> str:
    names = [d.name for d in sort_clique(clique)]
    return "{" + ",".join(names) + "}"


# ---------------------------------------------------------------------------
# Diagrams


def _edge_key(e: Edge):
    return e.sort_key


def _sharp_key(s: SharpEdge):
    return s.sort_key


@dataclass(frozen=True)
class Diagram:
    """Marked edges S and marked incidences S#."""

    marked: FrozenSet[Edge] = frozenset()
    sharp: FrozenSet[SharpEdge] = frozenset()

    def sharp_on(self, face: Face) -> FrozenSet[Edge]:
        return frozenset(s.edge for s in self.sharp if s.face == face)

    def component_marks(self, comp: Component) -> FrozenSet[Edge]:
        """Marked edges of a component: S for affine, S# for projective."""
        if comp.is_projective:
            return self.sharp_on(comp.face)
        return frozenset(e for e in self.marked if e.level == comp.level)

    def marks_on(self, inst: TriangleInstance) -> Tuple[Edge, ...]:
        edges = inst.triangle.edges
        if inst.component.is_projective:
            face = inst.component.face
            return tuple(e for e in edges if SharpEdge(e, face) in self.sharp)
        return tuple(e for e in edges if e in self.marked)

    @property
    def sort_key(self):
        return (
            tuple(_edge_key(e) for e in sorted(self.marked, key=_edge_key)),
            tuple(_sharp_key(s) for s in sorted(self.sharp, key=_sharp_key)),
        )

    def serialize(self) -> str:
        """One-line canonical form: "S: 1-2 ... | S#: 2-3@H1 ..."."""
        s_part = "".join(
            f" {e.name}" for e in sorted(self.marked, key=_edge_key)
        )
        sharp_part = "".join(
            f" {s.name}" for s in sorted(self.sharp, key=_sharp_key)
        )
        return f"S:{s_part} | S#:{sharp_part}"

    @classmethod
    def parse(cls, text: str) -> "Diagram":
        left, sep, right = text.partition("|")
        left, right = left.strip(), right.strip()
        if not sep or not left.startswith("S:") or not right.startswith("S#:"):
            raise ValueError(f"invalid diagram line {text!r}")
        marked = frozenset(parse_edge(t) for t in left[2:].split())
        sharp = frozenset(parse_sharp_edge(t) for t in right[3:].split())
        return cls(marked, sharp)

    def __repr__(self) -> str:
        return f"Diagram({self.serialize()})"


EMPTY_DIAGRAM = Diagram()


def s4_act_diagram(perm: Perm, d: Diagram) -> Diagram:
    return Diagram(
        frozenset(act_edge(perm, e) for e in d.marked),
        frozenset(act_sharp(perm, s) for s in d.sharp),
    )


def dual_diagram(d: Diagram) -> Diagram:
    return Diagram(
        frozenset(dual_edge(e) for e in d.marked),
        frozenset(dual_sharp(s) for s in d.sharp),
    )


def poset_leq(g: Diagram, h: Diagram) -> bool:
    """g <= h iff g marks everything h marks (deeper strata mark more)."""
    return g.marked >= h.marked and g.sharp >= h.sharp


def sharp_marks(clique: Iterable[Divisor]) -> FrozenSet[SharpEdge]:
    """
    Rate rule: an incidence (α, β) is marked when more divisors of the
    clique collapse α than collapse the least collapsed edge of β.
    """
    level = Counter(e for d in clique for e in d.sset)
    marks = set()
    for face in ALL_FACES:
        floor = min(level[e] for e in face.edges)
        marks.update(SharpEdge(e, face) for e in face.edges if level[e] > floor)
    return frozenset(marks)


def diagram_of(clique: Iterable[Divisor]) -> Diagram:
    clique = tuple(clique)
    marked = frozenset(e for d in clique for e in d.sset)
    return Diagram(marked, sharp_marks(clique))


# ---------------------------------------------------------------------------
# Admissibility

RULE_I = "rule-i"
RULE_II = "rule-ii"
RULE_CHART = "chart"
RULE_COMPLEMENT = "complement"

BASIC_RULES: Tuple[str, ...] = (RULE_I, RULE_II)
# Rule-ii only sees one related family at a time; these tie a projective
# face to its own affine coordinates and the (T1_ijk, T3_l) / (T2_ijk, T2s_l)
# families to each other.
COUPLING_RULES: Tuple[str, ...] = (RULE_CHART, RULE_COMPLEMENT)
FULL_RULES: Tuple[str, ...] = BASIC_RULES + COUPLING_RULES

# unordered (min, max) mark counts of a related pair
ALLOWED_PAIR_COUNTS = frozenset({(0, 0), (1, 1), (0, 3), (1, 3), (3, 3)})
ALLOWED_TRIANGLE_COUNTS = frozenset({0, 1, 3})


@dataclass(frozen=True)
class AdmissibilityFailure:
    rule: str
    location: str
    detail: str = ""

    def to_error(self) -> AdmissibilityError:
        return AdmissibilityError(self.rule, self.location)

    def __str__(self) -> str:
        suffix = f" ({self.detail})" if self.detail else ""
        return f"{self.rule} at {self.location}{suffix}"


def pair_violation(
    pair: RelatedPair, first: Sequence[Edge], second: Sequence[Edge]
) -> Optional[str]:
    """Reason why the marks on a related pair are not an allowed pattern."""
    counts = (min(len(first), len(second)), max(len(first), len(second)))
    if counts not in ALLOWED_PAIR_COUNTS:
        return f"mark counts {len(first)}/{len(second)}"
    if counts == (1, 1) and pair.image(first[0]) != second[0]:
        return f"{first[0].name} does not correspond to {second[0].name}"
    return None


def complementary_triangles() -> Tuple[Tuple[Face, Face], ...]:
    """(T1_ijk, T3_l) and (T2_ijk, T2s_l) for each triple."""
    return tuple(
        (t, dual_face(t)) for t in TRIANGLES if t.kind in ("T1", "T2")
    )


def admissibility_failures(
    d: Diagram, rules: Sequence[str] = BASIC_RULES
) -> List[AdmissibilityFailure]:
    """
    Check a diagram against the selected rules.

    Args:
        d: Diagram to check
        rules: Subset of FULL_RULES. Rule-i: every projective component
            keeps an unmarked edge. Rule-ii: related triangle pairs carry
            one of the five allowed patterns. The coupling rules tie
            components that no related pair reaches. Chart: a projective
            face that is not fully collapsed in S is marked exactly where
            S is.
            Complement: complementary triangles that are fully marked in
            their hypersimplex components carry dual marks.

    Returns:
        Every failure found, empty when the diagram passes.
    """
    failures: List[AdmissibilityFailure] = []

    if RULE_I in rules:
        for face in ALL_FACES:
            if len(d.sharp_on(face)) == len(face.edges):
                failures.append(
                    AdmissibilityFailure(RULE_I, f"P({face.name})", "all edges marked")
                )

    if RULE_II in rules:
        for pair in related_pairs():
            reason = pair_violation(pair, d.marks_on(pair.first), d.marks_on(pair.second))
            if reason:
                failures.append(AdmissibilityFailure(RULE_II, pair.name, reason))

    if RULE_CHART in rules:
        for face in ALL_FACES:
            edges = frozenset(face.edges)
            if edges <= d.marked:
                continue
            if d.sharp_on(face) != edges & d.marked:
                failures.append(
                    AdmissibilityFailure(
                        RULE_CHART, f"P({face.name})", "S# differs from S on a live face"
                    )
                )

    if RULE_COMPLEMENT in rules:
        for t, u in complementary_triangles():
            t_full = set(t.edges) <= d.sharp_on(hypersimplex(t.level))
            u_full = set(u.edges) <= d.sharp_on(hypersimplex(u.level))
            if not (t_full and u_full):
                continue
            t_marks, u_marks = d.sharp_on(t), d.sharp_on(u)
            if frozenset(dual_edge(e) for e in t_marks) != u_marks:
                failures.append(
                    AdmissibilityFailure(
                        RULE_COMPLEMENT, f"P({t.name})~P({u.name})", "marks are not dual"
                    )
                )

    return failures


def is_admissible(d: Diagram, rules: Sequence[str] = BASIC_RULES) -> bool:
    return not admissibility_failures(d, rules)


def local_patterns(
    comp: Component, rules: Sequence[str] = BASIC_RULES
) -> List[FrozenSet[Edge]]:
    """
    Mark patterns on a single component allowed by the per-triangle
    0/1/3 rule (and Rule-i for projective components).
    """
    edges = comp.edges
    triangles = [i.triangle for i in triangle_instances() if i.component == comp]
    patterns = []
    for bits in product((False, True), repeat=len(edges)):
        chosen = frozenset(e for e, b in zip(edges, bits) if b)
        if comp.is_projective and RULE_I in rules and len(chosen) == len(edges):
            continue
        if all(
            len(chosen & set(t.edges)) in ALLOWED_TRIANGLE_COUNTS for t in triangles
        ):
            patterns.append(chosen)
    patterns.sort(key=lambda p: (len(p), sorted(_edge_key(e) for e in p)))
    return patterns


# ---------------------------------------------------------------------------
# Realizability (split condition)


def collapsed_vertex_count(marked: Iterable[Edge], level: int) -> int:
    """Vertices of Δ_level left after collapsing the marked edges."""
    graph = nx.Graph()
    graph.add_nodes_from(labels_of_level(level))
    graph.add_edges_from((e.first, e.second) for e in marked if e.level == level)
    return nx.number_connected_components(graph)


def collapsed_levels(marked: Iterable[Edge]) -> Tuple[int, ...]:
    marked = tuple(marked)
    return tuple(k for k in LEVELS if collapsed_vertex_count(marked, k) == 1)


def realizability_failures(clique: Iterable[Divisor]) -> List[AdmissibilityFailure]:
    """
    A clique is realizable when its diagram passes every rule and each
    hypersimplex collapses to a point exactly when its shifting divisor
    is in the clique.
    """
    clique = tuple(clique)
    d = diagram_of(clique)
    failures = admissibility_failures(d, FULL_RULES)
    names = {c.name for c in clique}
    for k in LEVELS:
        full = collapsed_vertex_count(d.marked, k) == 1
        if full != (SHIFT_DIVISOR[k] in names):
            failures.append(
                AdmissibilityFailure(
                    "split",
                    f"H{k}",
                    "collapsed without its shifting divisor"
                    if full
                    else "shifting divisor leaves vertices apart",
                )
            )
    return failures


def is_realizable(clique: Iterable[Divisor]) -> bool:
    return not realizability_failures(clique)


def compatible(d1: Divisor, d2: Divisor) -> bool:
    """
    Whether the two divisors meet, i.e. {d1, d2} is a realizable clique.

    Admissibility of the union diagram alone is not enough: E12 and E34
    collapse all of Δ2 between them and give the diagram of {B, D12, D34}.
    """
    if d1 == d2:
        return False
    return is_realizable((d1, d2))


def full_level_edges(level: int) -> FrozenSet[Edge]:
    return frozenset(edges_of_level(level))
