"""
Edge complex of the three hypersimplices of <4> = {1,2,3,4}.

Face labels are the proper nonempty subsets of <4>; Δ_k has the k-subsets
as vertices and an edge between I and J when |I ∩ J| = k - 1. The module
also builds the 19 faces (three hypersimplices and their 16 triangles), the
22 diagram components and the eight families of related triangles, and
implements the S4 action and complementation duality on all of these.
"""

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple
import logging

logger = logging.getLogger(__name__)

UNIVERSE: FrozenSet[int] = frozenset({1, 2, 3, 4})
LEVELS = (1, 2, 3)

Label = FrozenSet[int]
Perm = Tuple[int, int, int, int]


def label(text: str) -> Label:
    """Parse "12" into frozenset({1, 2})."""
    members = frozenset(int(ch) for ch in text)
    if not members or not members < UNIVERSE or len(members) != len(text):
        raise ValueError(f"invalid face label {text!r}")
    return members


def label_name(lab: Label) -> str:
    return "".join(str(i) for i in sorted(lab))


def label_key(lab: Label) -> Tuple[int, int]:
    """Canonical order: by size, then by bitmask."""
    return len(lab), sum(1 << (i - 1) for i in lab)


ALL_LABELS: Tuple[Label, ...] = tuple(
    sorted(
        (frozenset(c) for k in LEVELS for c in combinations(sorted(UNIVERSE), k)),
        key=label_key,
    )
)


def labels_of_level(level: int) -> Tuple[Label, ...]:
    return tuple(lab for lab in ALL_LABELS if len(lab) == level)


@dataclass(frozen=True)
class Edge:
    """Unordered pair {I, J} of same-level labels with |I ∩ J| = |I| - 1."""

    first: Label
    second: Label

    @property
    def level(self) -> int:
        return len(self.first)

    @property
    def name(self) -> str:
        return f"{label_name(self.first)}-{label_name(self.second)}"

    @property
    def sort_key(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return label_key(self.first), label_key(self.second)

    def __repr__(self) -> str:
        return f"Edge({self.name})"


def make_edge(a: Label, b: Label) -> Edge:
    a, b = frozenset(a), frozenset(b)
    if len(a) != len(b) or len(a & b) != len(a) - 1 or a == b:
        raise ValueError(
            f"{label_name(a)} and {label_name(b)} are not joined by an edge"
        )
    if label_key(b) < label_key(a):
        a, b = b, a
    return Edge(a, b)


def parse_edge(text: str) -> Edge:
    """Parse "12-13"."""
    left, sep, right = text.partition("-")
    if not sep:
        raise ValueError(f"invalid edge {text!r}")
    return make_edge(label(left), label(right))


def is_edge(a: Label, b: Label) -> bool:
    return len(a) == len(b) and a != b and len(a & b) == len(a) - 1


ALL_EDGES: Tuple[Edge, ...] = tuple(
    sorted(
        (
            make_edge(a, b)
            for a, b in combinations(ALL_LABELS, 2)
            if is_edge(a, b)
        ),
        key=lambda e: e.sort_key,
    )
)


def edges_of_level(level: int) -> Tuple[Edge, ...]:
    return tuple(e for e in ALL_EDGES if e.level == level)


FACE_KINDS = ("H", "T1", "T2", "T2s", "T3")


@dataclass(frozen=True)
class Face:
    """A hypersimplex (kind "H") or one of its triangular faces."""

    kind: str
    index: Tuple[int, ...]
    vertices: Tuple[Label, ...]

    @property
    def name(self) -> str:
        if self.kind == "H":
            return f"H{self.index[0]}"
        return f"{self.kind}_{''.join(str(i) for i in self.index)}"

    @property
    def level(self) -> int:
        return len(self.vertices[0])

    @property
    def is_triangle(self) -> bool:
        return self.kind != "H"

    @property
    def edges(self) -> Tuple[Edge, ...]:
        if self.kind == "H":
            return edges_of_level(self.index[0])
        return tuple(
            sorted(
                (make_edge(a, b) for a, b in combinations(self.vertices, 2)),
                key=lambda e: e.sort_key,
            )
        )

    @property
    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return FACE_KINDS.index(self.kind), self.index

    def __repr__(self) -> str:
        return f"Face({self.name})"


def _sorted_labels(labels) -> Tuple[Label, ...]:
    return tuple(sorted((frozenset(x) for x in labels), key=label_key))


def _build_faces() -> Tuple[Face, ...]:
    faces: List[Face] = [Face("H", (k,), labels_of_level(k)) for k in LEVELS]
    for triple in combinations(sorted(UNIVERSE), 3):
        faces.append(Face("T1", triple, _sorted_labels({x} for x in triple)))
    for triple in combinations(sorted(UNIVERSE), 3):
        pairs = (frozenset(p) for p in combinations(triple, 2))
        faces.append(Face("T2", triple, _sorted_labels(pairs)))
    for i in sorted(UNIVERSE):
        star = ({i, j} for j in sorted(UNIVERSE - {i}))
        faces.append(Face("T2s", (i,), _sorted_labels(star)))
    for i in sorted(UNIVERSE):
        containing = (lab for lab in labels_of_level(3) if i in lab)
        faces.append(Face("T3", (i,), _sorted_labels(containing)))
    return tuple(faces)


ALL_FACES: Tuple[Face, ...] = _build_faces()
TRIANGLES: Tuple[Face, ...] = tuple(f for f in ALL_FACES if f.is_triangle)
HYPERSIMPLICES: Tuple[Face, ...] = ALL_FACES[:3]

_FACE_BY_VERTICES: Dict[FrozenSet[Label], Face] = {
    frozenset(f.vertices): f for f in ALL_FACES
}
_FACE_BY_NAME: Dict[str, Face] = {f.name: f for f in ALL_FACES}


def face_by_vertices(vertices) -> Face:
    return _FACE_BY_VERTICES[frozenset(frozenset(v) for v in vertices)]


def face_by_name(name: str) -> Face:
    try:
        return _FACE_BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown face {name!r}") from None


def hypersimplex(level: int) -> Face:
    return HYPERSIMPLICES[level - 1]


@dataclass(frozen=True)
class SharpEdge:
    """Incidence (α, β) of an edge α with a face β containing it."""

    edge: Edge
    face: Face

    @property
    def name(self) -> str:
        return f"{self.edge.name}@{self.face.name}"

    @property
    def sort_key(self):
        return self.face.sort_key, self.edge.sort_key

    def __repr__(self) -> str:
        return f"SharpEdge({self.name})"


ALL_SHARP_EDGES: Tuple[SharpEdge, ...] = tuple(
    SharpEdge(e, f) for f in ALL_FACES for e in f.edges
)


def parse_sharp_edge(text: str) -> SharpEdge:
    """Parse "12-13@T2_123"."""
    edge_text, sep, face_text = text.partition("@")
    if not sep:
        raise ValueError(f"invalid sharp edge {text!r}")
    edge, face = parse_edge(edge_text), face_by_name(face_text)
    if edge not in face.edges:
        raise ValueError(f"{edge.name} is not an edge of {face.name}")
    return SharpEdge(edge, face)


@dataclass(frozen=True)
class Component:
    """Affine hypersimplex component (reads S) or projective face component
    (reads S#)."""

    kind: str  # "affine" | "projective"
    level: int
    face: Optional[Face] = None

    @property
    def is_projective(self) -> bool:
        return self.kind == "projective"

    @property
    def edges(self) -> Tuple[Edge, ...]:
        if self.face is not None:
            return self.face.edges
        return edges_of_level(self.level)

    @property
    def name(self) -> str:
        if self.face is None:
            return f"A{self.level}"
        return f"P({self.face.name})"

    @property
    def sort_key(self):
        if self.face is None:
            return 0, (self.level,)
        return 1, self.face.sort_key

    def __repr__(self) -> str:
        return f"Component({self.name})"


AFFINE_COMPONENTS: Tuple[Component, ...] = tuple(
    Component("affine", k) for k in LEVELS
)
PROJECTIVE_COMPONENTS: Tuple[Component, ...] = tuple(
    Component("projective", f.level, f) for f in ALL_FACES
)
ALL_COMPONENTS: Tuple[Component, ...] = AFFINE_COMPONENTS + PROJECTIVE_COMPONENTS


def affine_component(level: int) -> Component:
    return AFFINE_COMPONENTS[level - 1]


def projective_component(face: Face) -> Component:
    return Component("projective", face.level, face)


@dataclass(frozen=True)
class TriangleInstance:
    """A triangle read inside one component."""

    component: Component
    triangle: Face

    @property
    def name(self) -> str:
        return f"{self.triangle.name}@{self.component.name}"


@dataclass(frozen=True)
class RelatedPair:
    """Two related triangles and the edge correspondence between them."""

    first: TriangleInstance
    second: TriangleInstance
    correspondence: Tuple[Tuple[Edge, Edge], ...]

    def image(self, edge: Edge) -> Edge:
        for a, b in self.correspondence:
            if a == edge:
                return b
        raise KeyError(edge)

    @property
    def name(self) -> str:
        return f"{self.first.name}~{self.second.name}"


@dataclass(frozen=True)
class RelatedFamily:
    """Six triangle instances sharing one original triangle shape."""

    name: str
    instances: Tuple[TriangleInstance, ...]
    pairs: Tuple[RelatedPair, ...]


# ---------------------------------------------------------------------------
# S4 action and duality


def perm_from_cycle(*cycle: int) -> Perm:
    """Permutation of <4> given by one cycle, e.g. perm_from_cycle(1, 2)."""
    images = {i: i for i in UNIVERSE}
    for pos, i in enumerate(cycle):
        images[i] = cycle[(pos + 1) % len(cycle)]
    return tuple(images[i] for i in sorted(UNIVERSE))  # type: ignore[return-value]


IDENTITY: Perm = (1, 2, 3, 4)
S4: Tuple[Perm, ...] = tuple(permutations((1, 2, 3, 4)))  # type: ignore[assignment]
TRANSPOSITIONS: Tuple[Perm, ...] = tuple(
    perm_from_cycle(i, j) for i, j in combinations(sorted(UNIVERSE), 2)
)
ADJACENT_TRANSPOSITIONS: Tuple[Perm, ...] = tuple(
    perm_from_cycle(i, i + 1) for i in (1, 2, 3)
)


def compose(p: Perm, r: Perm) -> Perm:
    """(p ∘ r)(i) = p(r(i))."""
    return tuple(p[r[i] - 1] for i in range(4))  # type: ignore[return-value]


def act_label(perm: Perm, lab: Label) -> Label:
    return frozenset(perm[i - 1] for i in lab)


def act_edge(perm: Perm, edge: Edge) -> Edge:
    return make_edge(act_label(perm, edge.first), act_label(perm, edge.second))


def act_face(perm: Perm, face: Face) -> Face:
    return face_by_vertices(act_label(perm, v) for v in face.vertices)


def act_component(perm: Perm, comp: Component) -> Component:
    if comp.face is None:
        return comp
    return projective_component(act_face(perm, comp.face))


def act_sharp(perm: Perm, sharp: SharpEdge) -> SharpEdge:
    return SharpEdge(act_edge(perm, sharp.edge), act_face(perm, sharp.face))


def dual_label(lab: Label) -> Label:
    return UNIVERSE - lab


def dual_edge(edge: Edge) -> Edge:
    return make_edge(dual_label(edge.first), dual_label(edge.second))


def dual_face(face: Face) -> Face:
    return face_by_vertices(dual_label(v) for v in face.vertices)


def dual_component(comp: Component) -> Component:
    if comp.face is None:
        return affine_component(4 - comp.level)
    return projective_component(dual_face(comp.face))


def dual_sharp(sharp: SharpEdge) -> SharpEdge:
    return SharpEdge(dual_edge(sharp.edge), dual_face(sharp.face))


# ---------------------------------------------------------------------------
# Related triangles


def rotate_edge(edge: Edge, triple: Sequence[int]) -> Edge:
    """Rotation correspondence T1_ijk -> T2_ijk: the edge opposite vertex {x}
    goes to the edge whose endpoints both contain x."""
    (x,) = set(triple) - edge.first - edge.second
    return make_edge(edge.first | {x}, edge.second | {x})


def _family_pairs(
    instances: Sequence[TriangleInstance], lower_count: int, rotation
) -> Tuple[RelatedPair, ...]:
    pairs = []
    for a, b in combinations(range(len(instances)), 2):
        first, second = instances[a], instances[b]
        cross = (a < lower_count) != (b < lower_count)
        if cross:
            mapping = tuple((e, rotation(e)) for e in first.triangle.edges)
        else:
            mapping = tuple((e, e) for e in first.triangle.edges)
        pairs.append(RelatedPair(first, second, mapping))
    return tuple(pairs)


def _triple_family(triple: Tuple[int, ...]) -> RelatedFamily:
    t1 = face_by_vertices(frozenset({x}) for x in triple)
    t2 = face_by_vertices(frozenset(p) for p in combinations(triple, 2))
    instances = (
        TriangleInstance(affine_component(1), t1),
        TriangleInstance(projective_component(hypersimplex(1)), t1),
        TriangleInstance(projective_component(t1), t1),
        TriangleInstance(affine_component(2), t2),
        TriangleInstance(projective_component(hypersimplex(2)), t2),
        TriangleInstance(projective_component(t2), t2),
    )
    pairs = _family_pairs(instances, 3, lambda e: rotate_edge(e, triple))
    return RelatedFamily(f"triple_{''.join(map(str, triple))}", instances, pairs)


def _dual_instance(inst: TriangleInstance) -> TriangleInstance:
    return TriangleInstance(dual_component(inst.component), dual_face(inst.triangle))


def _dual_family(family: RelatedFamily, missing: int) -> RelatedFamily:
    instances = tuple(_dual_instance(i) for i in family.instances)
    pairs = tuple(
        RelatedPair(
            _dual_instance(p.first),
            _dual_instance(p.second),
            tuple((dual_edge(a), dual_edge(b)) for a, b in p.correspondence),
        )
        for p in family.pairs
    )
    return RelatedFamily(f"star_{missing}", instances, pairs)


_FAMILIES: Optional[Tuple[RelatedFamily, ...]] = None


def related_triangle_families() -> Tuple[RelatedFamily, ...]:
    """The 8 families: one per triple {i,j,k} (T1 and T2 copies) and their
    complements, one per index l (T2s_l and T3_l copies)."""
    global _FAMILIES
    if _FAMILIES is None:
        triples = [_triple_family(t) for t in combinations(sorted(UNIVERSE), 3)]
        stars = [
            _dual_family(fam, next(iter(UNIVERSE - set(t))))
            for fam, t in zip(triples, combinations(sorted(UNIVERSE), 3))
        ]
        stars.sort(key=lambda f: f.name)
        _FAMILIES = tuple(triples + stars)
        logger.debug(f"[STRATA] Built {len(_FAMILIES)} related-triangle families")
    return _FAMILIES


def related_pairs() -> Tuple[RelatedPair, ...]:
    return tuple(p for fam in related_triangle_families() for p in fam.pairs)


def triangle_instances() -> Tuple[TriangleInstance, ...]:
    """Every triangle of every component, each appearing in one family."""
    return tuple(i for fam in related_triangle_families() for i in fam.instances)


# ---------------------------------------------------------------------------
# Documentary inventories (not used by admissibility)


def hexagons() -> Tuple[Tuple[Edge, ...], ...]:
    """Edges of Δ2 avoiding a pair of opposite triangles (4 hexagons)."""
    result = []
    for i in sorted(UNIVERSE):
        star = face_by_name(f"T2s_{i}")
        lower = face_by_name("T2_" + label_name(UNIVERSE - {i}))
        used = set(star.edges) | set(lower.edges)
        result.append(tuple(e for e in edges_of_level(2) if e not in used))
    return tuple(result)


def quadrilaterals(level: int) -> Tuple[Tuple[Edge, ...], ...]:
    """The three 4-cycles of the tetrahedron Δ1 or Δ3."""
    if level not in (1, 3):
        raise ValueError("quadrilaterals live in Δ1 and Δ3")
    verts = labels_of_level(level)
    cycles = []
    for a in (1, 2, 3):
        # complement of a perfect matching is a 4-cycle
        b, c = (x for x in (1, 2, 3) if x != a)
        dropped = {make_edge(verts[0], verts[a]), make_edge(verts[b], verts[c])}
        cycles.append(tuple(e for e in edges_of_level(level) if e not in dropped))
    return tuple(cycles)


def related_quadrilaterals() -> Tuple[Tuple[Tuple[Edge, ...], Tuple[Edge, ...]], ...]:
    """Δ1 quadrilaterals paired with their complements in Δ3."""
    return tuple(
        (quad, tuple(sorted((dual_edge(e) for e in quad), key=lambda e: e.sort_key)))
        for quad in quadrilaterals(1)
    )
