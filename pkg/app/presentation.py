"""
Generators and relations of the cohomology ring.

The 37 degree-one generators are the 23 divisor classes (named after the
divisors, lower case) followed by the 14 special-position classes y_I. The
relations come in four families: linear cross-ratio relations (i),
monomials of disjoint divisors (ii), divisor times a difference of
y-classes (iii) and the flag relations (iv). Every pattern is instantiated
over all injective assignments of i, j, k, l to 1..4 and deduplicated up to
sign. The presentation itself is built over ZZ; Gröbner computations move
it to GF(2) or QQ.
"""

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple
import logging
import re

from sympy import GF, QQ, ZZ, Matrix
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyElement, PolyRing, ring

from .hypersimplex import Perm
from .tetra_common import VerificationError

logger = logging.getLogger(__name__)

DIVISOR_VARIABLES: Tuple[str, ...] = (
    ("a", "b", "astar")
    + tuple(f"c{i}" for i in range(1, 5))
    + tuple(f"cstar{i}" for i in range(1, 5))
    + tuple("d" + "".join(map(str, p)) for p in combinations(range(1, 5), 2))
    + tuple("e" + "".join(map(str, p)) for p in combinations(range(1, 5), 2))
)
Y_VARIABLES: Tuple[str, ...] = tuple(
    "y" + "".join(map(str, c)) for k in (1, 2, 3) for c in combinations(range(1, 5), k)
)
VARIABLES: Tuple[str, ...] = DIVISOR_VARIABLES + Y_VARIABLES

# y_i (i != 1), y_ij (ij != 12), y_ijk (ijk != 123)
ELIMINATED: Tuple[str, ...] = tuple(
    v for v in Y_VARIABLES if v not in ("y1", "y12", "y123")
)
SURVIVORS: Tuple[str, ...] = tuple(v for v in VARIABLES if v not in ELIMINATED)

FAMILIES = ("i", "ii", "iii", "iv")
FLAG_RELATIONS = ("all", "base_chain")
FIELDS = ("GF2", "QQ")
EXPECTED_FAMILY_I_RANK = 11

_NAME_RE = re.compile(r"^([a-z]+?)(\d*)$")


def field_domain(name: str):
    if name == "GF2":
        return GF(2)
    if name == "QQ":
        return QQ
    raise ValueError(f"unknown field {name!r}, expected one of {FIELDS}")


def polynomial_ring(names: Sequence[str], domain=ZZ) -> PolyRing:
    """Ring in the given variables with degrevlex order (names in order)."""
    R, *_ = ring(",".join(names), domain, grevlex)
    return R


@dataclass(frozen=True)
class Relation:
    family: str
    poly: PolyElement
    pattern: str = ""

    def __str__(self) -> str:
        return f"[{self.family}] {self.poly}"


@dataclass
class Presentation:
    """Generators, relations and, after elimination, the substitution used."""

    generators: Tuple[str, ...]
    relations: List[Relation]
    substitution: Dict[str, PolyElement] = field(default_factory=dict)
    flag_relations: str = "all"

    @property
    def ring(self) -> PolyRing:
        return polynomial_ring(self.generators)

    def family_sizes(self) -> Dict[str, int]:
        counts = Counter(r.family for r in self.relations)
        return {f: counts.get(f, 0) for f in FAMILIES}

    def family(self, name: str) -> List[Relation]:
        return [r for r in self.relations if r.family == name]

    def polynomials(self, field_name: Optional[str] = None) -> List[PolyElement]:
        """Relation polynomials, moved to GF(2) or QQ when a field is named."""
        polys = [r.poly for r in self.relations]
        if field_name is None:
            return polys
        target = polynomial_ring(self.generators, field_domain(field_name))
        moved = [p.set_ring(target) for p in polys]
        return [p for p in moved if p]


# ---------------------------------------------------------------------------
# Instantiation


class _Vars:
    """Generator lookup by base name and unordered index set."""

    def __init__(self, R: PolyRing):
        self.R = R
        self.by_name = dict(zip((str(s) for s in R.symbols), R.gens))

    def __call__(self, base: str, *idx: int) -> PolyElement:
        return self.by_name[base + "".join(str(i) for i in sorted(idx))]


Pattern = Callable[[_Vars, int, int, int, int], PolyElement]

FAMILY_I: Dict[str, Pattern] = {
    "y_ij-y_i-y_j+a+c_k+c_l+d_ij+e_ij": lambda v, i, j, k, l: (
        v("y", i, j) - v("y", i) - v("y", j) + v("a") + v("c", k) + v("c", l)
        + v("d", i, j) + v("e", i, j)
    ),
    "y_ijk-y_ij-y_ik+y_i+b+c_i+cstar_l+d_jk+e_jk+e_il+e_jl+e_kl": lambda v, i, j, k, l: (
        v("y", i, j, k) - v("y", i, j) - v("y", i, k) + v("y", i) + v("b") + v("c", i)
        + v("cstar", l) + v("d", j, k) + v("e", j, k) + v("e", i, l) + v("e", j, l)
        + v("e", k, l)
    ),
    "y_ij-y_ijk-y_ijl+astar+cstar_i+cstar_j+d_kl+e_ij": lambda v, i, j, k, l: (
        v("y", i, j) - v("y", i, j, k) - v("y", i, j, l) + v("astar") + v("cstar", i)
        + v("cstar", j) + v("d", k, l) + v("e", i, j)
    ),
}

FAMILY_II: Dict[str, Pattern] = {
    "c_i*c_j": lambda v, i, j, k, l: v("c", i) * v("c", j),
    "cstar_i*cstar_j": lambda v, i, j, k, l: v("cstar", i) * v("cstar", j),
    "c_i*d_ij": lambda v, i, j, k, l: v("c", i) * v("d", i, j),
    "cstar_i*d_ij": lambda v, i, j, k, l: v("cstar", i) * v("d", i, j),
    "c_i*e_ij": lambda v, i, j, k, l: v("c", i) * v("e", i, j),
    "cstar_i*e_jk": lambda v, i, j, k, l: v("cstar", i) * v("e", j, k),
    "d_ij*e_ik": lambda v, i, j, k, l: v("d", i, j) * v("e", i, k),
    "e_ij*e_ik": lambda v, i, j, k, l: v("e", i, j) * v("e", i, k),
    "e_ij*e_kl": lambda v, i, j, k, l: v("e", i, j) * v("e", k, l),
}

FAMILY_III: Dict[str, Pattern] = {
    "a*(y_i-y_j)": lambda v, i, j, k, l: v("a") * (v("y", i) - v("y", j)),
    "b*(y_ij-y_ik)": lambda v, i, j, k, l: v("b") * (v("y", i, j) - v("y", i, k)),
    "astar*(y_ijk-y_ijl)": lambda v, i, j, k, l: v("astar") * (v("y", i, j, k) - v("y", i, j, l)),
    "c_i*(y_j-y_k)": lambda v, i, j, k, l: v("c", i) * (v("y", j) - v("y", k)),
    "c_i*(y_ij-y_ik)": lambda v, i, j, k, l: v("c", i) * (v("y", i, j) - v("y", i, k)),
    "cstar_i*(y_jk-y_jl)": lambda v, i, j, k, l: v("cstar", i) * (v("y", j, k) - v("y", j, l)),
    "cstar_i*(y_ijk-y_ijl)": lambda v, i, j, k, l: v("cstar", i) * (v("y", i, j, k) - v("y", i, j, l)),
    "d_ij*(y_i-y_j)": lambda v, i, j, k, l: v("d", i, j) * (v("y", i) - v("y", j)),
    "d_ij*(y_ik-y_jk)": lambda v, i, j, k, l: v("d", i, j) * (v("y", i, k) - v("y", j, k)),
    "d_ij*(y_ikl-y_jkl)": lambda v, i, j, k, l: v("d", i, j) * (v("y", i, k, l) - v("y", j, k, l)),
    "e_ij*(y_i-y_j)": lambda v, i, j, k, l: v("e", i, j) * (v("y", i) - v("y", j)),
    "e_ij*(y_kl-y_ik)": lambda v, i, j, k, l: v("e", i, j) * (v("y", k, l) - v("y", i, k)),
    "e_ij*(y_ijk-y_ijl)": lambda v, i, j, k, l: v("e", i, j) * (v("y", i, j, k) - v("y", i, j, l)),
}

FAMILY_IV: Dict[str, Pattern] = {
    "y_i^2+y_ij^2+y_ijk^2-y_i*y_ij-y_ij*y_ijk": lambda v, i, j, k, l: (
        v("y", i) ** 2 + v("y", i, j) ** 2 + v("y", i, j, k) ** 2
        - v("y", i) * v("y", i, j) - v("y", i, j) * v("y", i, j, k)
    ),
    "y_ij^3-2*y_i*y_ij^2+2*y_i^2*y_ij": lambda v, i, j, k, l: (
        v("y", i, j) ** 3 - 2 * v("y", i) * v("y", i, j) ** 2
        + 2 * v("y", i) ** 2 * v("y", i, j)
    ),
    "y_i^4": lambda v, i, j, k, l: v("y", i) ** 4,
}

PATTERNS: Dict[str, Dict[str, Pattern]] = {
    "i": FAMILY_I,
    "ii": FAMILY_II,
    "iii": FAMILY_III,
    "iv": FAMILY_IV,
}

BASE_CHAIN = (1, 2, 3, 4)


def _sign_normalized(p: PolyElement) -> PolyElement:
    return -p if p.LC < 0 else p


def _instantiate(
    R: PolyRing, family: str, assignments: Iterable[Tuple[int, int, int, int]]
) -> List[Relation]:
    v = _Vars(R)
    seen = set()
    out: List[Relation] = []
    assignments = list(assignments)
    for name, pattern in PATTERNS[family].items():
        for i, j, k, l in assignments:
            poly = pattern(v, i, j, k, l)
            if not poly:
                continue
            poly = _sign_normalized(poly)
            if poly in seen:
                continue
            seen.add(poly)
            out.append(Relation(family, poly, name))
    return out


def build_presentation(flag_relations: str = "all") -> Presentation:
    """
    Instantiate the four relation families in the 37-variable ring over ZZ.

    Args:
        flag_relations: "all" takes family (iv) over every chain
            i ⊂ ij ⊂ ijk; "base_chain" only over 1 ⊂ 12 ⊂ 123

    Returns:
        Presentation with relations in family order
    """
    if flag_relations not in FLAG_RELATIONS:
        raise ValueError(f"flag_relations must be one of {FLAG_RELATIONS}")
    R = polynomial_ring(VARIABLES)
    every = list(permutations((1, 2, 3, 4)))
    relations: List[Relation] = []
    for family in FAMILIES:
        assignments = every if family != "iv" or flag_relations == "all" else [BASE_CHAIN]
        relations.extend(_instantiate(R, family, assignments))
    presentation = Presentation(VARIABLES, relations, flag_relations=flag_relations)
    logger.info(f"[RING] Built presentation: {presentation.family_sizes()}")
    return presentation


def linear_matrix(relations: Sequence[Relation], columns: Sequence[str]) -> Matrix:
    """Coefficient matrix of degree-one relations over the named columns."""
    position = {name: n for n, name in enumerate(columns)}
    rows = []
    for rel in relations:
        R = rel.poly.ring
        names = [str(s) for s in R.symbols]
        row = [0] * len(columns)
        for monom, coeff in rel.poly.terms():
            if sum(monom) != 1:
                raise ValueError(f"relation {rel} is not linear")
            row[position[names[monom.index(1)]]] = int(coeff)
        rows.append(row)
    return Matrix(rows)


def family_i_rank(presentation: Presentation) -> int:
    return linear_matrix(presentation.family("i"), presentation.generators).rank()


# ---------------------------------------------------------------------------
# Substitution and elimination


def substitute(
    poly: PolyElement, images: Dict[str, PolyElement], target: PolyRing
) -> PolyElement:
    """Replace every generator of poly's ring by its image in target."""
    names = [str(s) for s in poly.ring.symbols]
    result = target.zero
    for monom, coeff in poly.terms():
        term = target.ground_new(target.domain.convert(coeff, poly.ring.domain))
        for name, exp in zip(names, monom):
            if exp:
                term = term * images[name] ** exp
        result += term
    return result


def eliminate_linear(presentation: Presentation) -> Presentation:
    """
    Solve family (i) for the eleven eliminated y-classes and substitute.

    Returns:
        Presentation on the 26 surviving generators, with the substitution
        map (eliminated name -> integer linear form in the survivors)

    Raises:
        VerificationError: if family (i) does not have rank 11 with the
            eliminated classes as pivots, or a coefficient is not integral
    """
    columns = ELIMINATED + SURVIVORS
    reduced, pivots = linear_matrix(presentation.family("i"), columns).rref()
    expected = tuple(range(len(ELIMINATED)))
    if tuple(pivots) != expected:
        raise VerificationError(
            [f"family (i) pivots {list(pivots)} differ from the eliminated classes"]
        )

    target = polynomial_ring(SURVIVORS)
    survivor_gens = dict(zip(SURVIVORS, target.gens))
    images: Dict[str, PolyElement] = dict(survivor_gens)
    substitution: Dict[str, PolyElement] = {}
    for r, name in enumerate(ELIMINATED):
        image = target.zero
        for s, survivor in enumerate(SURVIVORS):
            value = reduced[r, len(ELIMINATED) + s]
            if not value.is_integer:
                raise VerificationError([f"{name} has non-integral coefficient {value}"])
            if value:
                image -= survivor_gens[survivor] * int(value)
        images[name] = image
        substitution[name] = image

    relations: List[Relation] = []
    seen = set()
    for rel in presentation.relations:
        poly = substitute(rel.poly, images, target)
        if not poly:
            continue
        poly = _sign_normalized(poly)
        if poly in seen:
            continue
        seen.add(poly)
        relations.append(Relation(rel.family, poly, rel.pattern))

    leftover = [r for r in relations if r.family == "i"]
    if leftover:
        raise VerificationError([f"linear relation survives elimination: {leftover[0]}"])
    logger.info(
        f"[RING] Eliminated {len(ELIMINATED)} classes, {len(SURVIVORS)} generators remain"
    )
    return Presentation(
        SURVIVORS, relations, substitution, flag_relations=presentation.flag_relations
    )


def reduce_to_survivors(poly: PolyElement, reduced: Presentation) -> PolyElement:
    """Map a polynomial in the 37 generators into the eliminated ring."""
    target = reduced.ring
    images = dict(zip(SURVIVORS, target.gens))
    images.update(reduced.substitution)
    return substitute(poly, images, target)


# ---------------------------------------------------------------------------
# S4 action


def act_variable(perm: Perm, name: str) -> str:
    """Permute the indices of a generator name; a, b, astar are fixed."""
    match = _NAME_RE.match(name)
    if not match:
        raise ValueError(f"bad generator name {name!r}")
    base, digits = match.groups()
    return base + "".join(sorted(str(perm[int(ch) - 1]) for ch in digits))


def act_polynomial(perm: Perm, poly: PolyElement) -> PolyElement:
    R = poly.ring
    names = [str(s) for s in R.symbols]
    position = {name: n for n, name in enumerate(names)}
    target = [position[act_variable(perm, name)] for name in names]
    terms = {}
    for monom, coeff in poly.terms():
        image = [0] * len(names)
        for n, exp in enumerate(monom):
            image[target[n]] = exp
        terms[tuple(image)] = coeff
    return R.from_dict(terms)


# ---------------------------------------------------------------------------
# Export


def export_presentation(presentation: Presentation) -> str:
    """One relation per line, "[family] polynomial"."""
    lines = [f"# generators: {' '.join(presentation.generators)}"]
    for name, image in presentation.substitution.items():
        lines.append(f"# {name} = {image}")
    lines.extend(str(rel) for rel in presentation.relations)
    return "\n".join(lines) + "\n"
