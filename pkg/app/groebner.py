"""
Degree-by-degree Buchberger algorithm for homogeneous ideals, normal forms,
Hilbert functions and the Poincaré-duality pairing.

Polynomials are sympy PolyElements in a degrevlex ring. Leading monomials
are indexed in a numpy array so that finding a reducer is one vectorized
comparison. Pairs are handled in batches of equal lcm degree, which for a
homogeneous ideal makes truncation at a fixed degree exact below it.
"""

from dataclasses import dataclass, field
from datetime import datetime
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple
import logging

import numpy as np
from pydantic import BaseModel
from sympy import Matrix

from .gf2 import binary_rank
from .tetra_common import BudgetExceededError

logger = logging.getLogger(__name__)

Monom = Tuple[int, ...]
Pair = Tuple[int, int]

SELECTIONS = ("normal", "first")
TOP_DEGREE = 12
# candidates per degree beyond which early termination is not tracked
STANDARD_TRACK_LIMIT = 200_000


def is_homogeneous(f) -> bool:
    degrees = {sum(m) for m in f.monoms()}
    return len(degrees) <= 1


def total_degree(f) -> int:
    return max((sum(m) for m in f.monoms()), default=-1)


class LeadIndex:
    """Exponent vectors of leading monomials, searchable for divisors."""

    def __init__(self, ngens: int, capacity: int = 64):
        self.ngens = ngens
        self._exps = np.zeros((capacity, ngens), dtype=np.int16)
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def add(self, monom: Monom) -> None:
        if self._size == self._exps.shape[0]:
            grown = np.zeros((2 * self._size, self.ngens), dtype=np.int16)
            grown[: self._size] = self._exps[: self._size]
            self._exps = grown
        self._exps[self._size] = monom
        self._size += 1

    def find_divisor(self, monom: Monom) -> Optional[int]:
        if not self._size:
            return None
        hits = np.flatnonzero(
            np.all(self._exps[: self._size] <= np.asarray(monom, dtype=np.int16), axis=1)
        )
        return int(hits[0]) if hits.size else None


def _reduce(f, basis: Sequence, index: LeadIndex):
    """Full reduction of f by a list of monic polynomials."""
    R = f.ring
    remainder: Dict[Monom, object] = {}
    p = f.copy()
    while p:
        m = p.LM
        c = p.LC
        j = index.find_divisor(m)
        if j is None:
            remainder[m] = c
            del p[m]
        else:
            g = basis[j]
            p = p - g.mul_term((R.monomial_div(m, g.LM), c))
    return R.from_dict(remainder) if remainder else R.zero


def spoly(f, g):
    """S-polynomial of monic f and g."""
    R = f.ring
    lcm = R.monomial_lcm(f.LM, g.LM)
    return f.mul_monom(R.monomial_div(lcm, f.LM)) - g.mul_monom(R.monomial_div(lcm, g.LM))


def update(G: List, P: Set[Pair], f, lmG: List[Monom]) -> Set[Pair]:
    """Pair set after adding f (already appended to G) with Gebauer-Möller criteria."""
    R = f.ring
    lcm, mul, div = R.monomial_lcm, R.monomial_mul, R.monomial_div
    lmf = f.LM
    new = len(G) - 1

    kept = {
        (i, j) for (i, j) in P
        if not div(lcm(lmG[i], lmG[j]), lmf)
        or lcm(lmG[i], lmG[j]) == lcm(lmG[i], lmf)
        or lcm(lmG[i], lmG[j]) == lcm(lmG[j], lmf)
    }
    by_lcm: Dict[Monom, List[int]] = {}
    for i in range(new):
        by_lcm.setdefault(lcm(lmG[i], lmf), []).append(i)
    minimal: List[Monom] = []
    for L in sorted(by_lcm, key=R.order):
        if all(not div(L, L_) for L_ in minimal):
            minimal.append(L)
    for L in minimal:
        if not any(mul(lmG[i], lmf) == L for i in by_lcm[L]):
            kept.add((min(by_lcm[L]), new))
    return kept


def minimalize(G: Sequence) -> List:
    if not G:
        return []
    R = G[0].ring
    out: List = []
    for f in sorted(G, key=lambda h: R.order(h.LM)):
        if all(not R.monomial_div(f.LM, g.LM) for g in out):
            out.append(f)
    return out


def interreduce(G: Sequence) -> List:
    """Reduced basis from a minimal one; result sorted by leading monomial."""
    if not G:
        return []
    R = G[0].ring
    index = LeadIndex(R.ngens)
    for g in G:
        index.add(g.LM)
    reduced = []
    for g in G:
        lead = R.from_dict({g.LM: g.LC})
        reduced.append((lead + _reduce(g - lead, G, index)).monic())
    return sorted(reduced, key=lambda h: R.order(h.LM))


@dataclass
class GroebnerBasis:
    ring: object
    basis: List
    truncation_degree: Optional[int] = None
    degree_reached: int = 0
    complete: bool = True
    _index: Optional[LeadIndex] = field(default=None, repr=False, compare=False)

    @property
    def domain_name(self) -> str:
        return str(self.ring.domain)

    @property
    def index(self) -> LeadIndex:
        if self._index is None:
            self._index = LeadIndex(self.ring.ngens)
            for g in self.basis:
                self._index.add(g.LM)
        return self._index

    def leading_monomials(self) -> List[Monom]:
        return [g.LM for g in self.basis]

    def normal_form(self, f):
        return _reduce(f, self.basis, self.index)

    def contains(self, f) -> bool:
        return not self.normal_form(f)

    def serialize(self) -> List[str]:
        return [str(g) for g in self.basis]


def _elapsed(start: datetime) -> float:
    return (datetime.now() - start).total_seconds()


def buchberger(
    F: Iterable,
    ring=None,
    selection: str = "normal",
    truncation_degree: Optional[int] = None,
    max_seconds: Optional[float] = None,
    max_pairs: Optional[int] = None,
) -> GroebnerBasis:
    """
    Reduced Gröbner basis of a homogeneous ideal, degree by degree.

    Args:
        F: Homogeneous generators (PolyElements of one ring)
        ring: Ring of the ideal, needed when F is empty
        selection: "normal" (smallest lcm first) or "first" (oldest pair
            first) inside each degree
        truncation_degree: Stop after this degree; everything in degrees up
            to it is exact
        max_seconds: Wall-clock budget
        max_pairs: Budget on the number of S-pairs reduced

    Returns:
        GroebnerBasis; `complete` is False when the computation stopped at
        the truncation degree with pairs left

    Raises:
        ValueError: on non-homogeneous input or unknown selection
        BudgetExceededError: when a budget runs out
    """
    if selection not in SELECTIONS:
        raise ValueError(f"unknown selection strategy {selection!r}")
    F = [f for f in F if f]
    if ring is None:
        if not F:
            raise ValueError("ring needed for an empty ideal")
        ring = F[0].ring
    if not F:
        return GroebnerBasis(ring, [], truncation_degree, 0, True)
    if not all(is_homogeneous(f) for f in F):
        raise ValueError("buchberger expects homogeneous generators")

    start_time = datetime.now()
    R = ring
    G: List = []
    lmG: List[Monom] = []
    P: Set[Pair] = set()
    index = LeadIndex(R.ngens)
    pending: Dict[int, List] = {}
    for f in F:
        pending.setdefault(total_degree(f), []).append(f)

    def pair_degree(p: Pair) -> int:
        return sum(R.monomial_lcm(lmG[p[0]], lmG[p[1]]))

    def pair_key(p: Pair):
        if selection == "first":
            return p[1], p[0]
        return R.order(R.monomial_lcm(lmG[p[0]], lmG[p[1]])), p

    def add(r) -> None:
        nonlocal P
        r = r.monic()
        G.append(r)
        lmG.append(r.LM)
        index.add(r.LM)
        P = update(G, P, r, lmG)

    reduced_pairs = 0
    degree = min(pending)
    degree_reached = degree - 1
    std = StandardMonomials(R.ngens, limit=STANDARD_TRACK_LIMIT)
    while pending or P:
        if truncation_degree is not None and degree > truncation_degree:
            break
        for f in sorted(pending.pop(degree, []), key=lambda h: R.order(h.LM)):
            r = _reduce(f, G, index)
            if r:
                add(r)
        batch = sorted((p for p in P if pair_degree(p) == degree), key=pair_key)
        for pair in batch:
            P.discard(pair)
            r = _reduce(spoly(G[pair[0]], G[pair[1]]), G, index)
            reduced_pairs += 1
            if r:
                add(r)
            if max_pairs is not None and reduced_pairs > max_pairs:
                raise BudgetExceededError(degree_reached, f"more than {max_pairs} S-pairs")
            if max_seconds is not None and _elapsed(start_time) > max_seconds:
                raise BudgetExceededError(degree_reached, f"more than {max_seconds}s")
        degree_reached = degree
        std.extend_to(degree, set(lmG))
        if degree > 0 and not std.overflow and not std.count(degree) and not pending:
            # every monomial of this degree is a leading term: nothing above survives
            P = set()
            break
        if not pending and not P:
            break
        degree = min(
            [pair_degree(p) for p in P] + list(pending)
        )
        if not std.overflow and std.top < degree - 1:
            std.extend_to(degree - 1, set(lmG))

    complete = not P and not pending
    basis = interreduce(minimalize(G))
    logger.info(
        f"[GROEBNER] {len(basis)} basis elements through degree {degree_reached} "
        f"({reduced_pairs} pairs, {R.domain}) in {_elapsed(start_time):.2f}s"
    )
    return GroebnerBasis(R, basis, truncation_degree, degree_reached, complete)


# ---------------------------------------------------------------------------
# Standard monomials and the Hilbert function


class StandardMonomials:
    """
    Order ideal of monomials outside the leading-term ideal, grown degree by
    degree: a monomial is standard when every divisor one degree lower is
    standard and it is not itself a leading monomial.
    """

    def __init__(self, ngens: int, limit: Optional[int] = None):
        self.ngens = ngens
        self.limit = limit
        self.overflow = False
        self.by_degree: List[List[Monom]] = [[(0,) * ngens]]

    @property
    def top(self) -> int:
        return len(self.by_degree) - 1

    def count(self, degree: int) -> int:
        return len(self.by_degree[degree]) if degree <= self.top else 0

    def extend_to(self, degree: int, leading: Set[Monom]) -> None:
        """Grow through `degree`; past `limit` candidates, give up and set overflow."""
        while self.top < degree and not self.overflow:
            previous = self.by_degree[-1]
            if self.limit is not None and len(previous) * self.ngens > self.limit:
                self.overflow = True
                break
            known = set(previous)
            out: List[Monom] = []
            for m in previous:
                last = max((n for n, e in enumerate(m) if e), default=0)
                for n in range(last, self.ngens):
                    cand = m[:n] + (m[n] + 1,) + m[n + 1:]
                    if cand in leading:
                        continue
                    if all(
                        cand[:k] + (cand[k] - 1,) + cand[k + 1:] in known
                        for k in range(self.ngens) if cand[k] and k != n
                    ):
                        out.append(cand)
            self.by_degree.append(sorted(out))


def standard_monomials(gb: GroebnerBasis, max_degree: int) -> List[List[Monom]]:
    """Standard monomials in degrees 0..max_degree, each list sorted."""
    if not gb.complete and gb.truncation_degree is not None and max_degree > gb.truncation_degree:
        raise ValueError(
            f"basis truncated at degree {gb.truncation_degree}, cannot read degree {max_degree}"
        )
    std = StandardMonomials(gb.ring.ngens)
    std.extend_to(max_degree, set(gb.leading_monomials()))
    return std.by_degree[: max_degree + 1]


class HilbertFunction(BaseModel):
    dims: List[int]
    next_degree: int = 0

    def is_palindromic(self) -> bool:
        return self.dims == self.dims[::-1]


def hilbert_function(gb: GroebnerBasis, max_degree: int = TOP_DEGREE) -> HilbertFunction:
    """
    Dimensions of R/I in degrees 0..max_degree, plus the count one degree
    higher (zero for a ring whose top degree is max_degree).
    """
    levels = standard_monomials(gb, max_degree + 1)
    return HilbertFunction(
        dims=[len(level) for level in levels[: max_degree + 1]],
        next_degree=len(levels[max_degree + 1]),
    )


# ---------------------------------------------------------------------------
# Pairing


def _monomial(R, m: Monom):
    return R.from_dict({m: R.domain.one})


class Pairing:
    """
    Bilinear pairing R^i x R^(12-i) -> R^12, read in standard-monomial bases.

    For a standard monomial t of degree k the functional s -> coeff of the
    top monomial in NF(s*t) on R^(12-k) is obtained from the one for t/x_j
    (x_j the last variable of t) through the normal forms of s*x_j, which
    are memoized.
    """

    def __init__(self, gb: GroebnerBasis, top_degree: int = TOP_DEGREE):
        self.gb = gb
        self.R = gb.ring
        self.top_degree = top_degree
        self.levels = standard_monomials(gb, top_degree)
        if len(self.levels[top_degree]) != 1:
            raise ValueError(
                f"top degree {top_degree} has dimension {len(self.levels[top_degree])}, expected 1"
            )
        self.position = [{m: n for n, m in enumerate(level)} for level in self.levels]
        self._products: Dict[Tuple[int, int, int], Dict[int, object]] = {}
        self._functionals: Dict[int, Dict[Monom, List]] = {}

    @property
    def top_monomial(self) -> Monom:
        return self.levels[self.top_degree][0]

    def product(self, degree: int, s: int, var: int) -> Dict[int, object]:
        """NF(s * x_var) in the basis of the next degree, as {position: coeff}."""
        key = (degree, s, var)
        cached = self._products.get(key)
        if cached is None:
            m = self.levels[degree][s]
            prod = m[:var] + (m[var] + 1,) + m[var + 1:]
            nxt = self.position[degree + 1]
            if prod in nxt:
                cached = {nxt[prod]: self.R.domain.one}
            else:
                nf = self.gb.normal_form(_monomial(self.R, prod))
                cached = {nxt[mm]: c for mm, c in nf.terms()}
            self._products[key] = cached
        return cached

    def functionals(self, k: int) -> Dict[Monom, List]:
        """For each standard t of degree k, its functional on R^(top-k)."""
        if k in self._functionals:
            return self._functionals[k]
        zero = self.R.domain.zero
        if k == 0:
            out = {self.levels[0][0]: [self.R.domain.one]}
        else:
            below = self.functionals(k - 1)
            degree = self.top_degree - k
            out = {}
            for t in self.levels[k]:
                var = max(n for n, e in enumerate(t) if e)
                u = t[:var] + (t[var] - 1,) + t[var + 1:]
                psi_u = below[u]
                psi = []
                for s in range(len(self.levels[degree])):
                    acc = zero
                    for w, c in self.product(degree, s, var).items():
                        if psi_u[w]:
                            acc += c * psi_u[w]
                    psi.append(acc)
                out[t] = psi
        self._functionals[k] = out
        # only the previous level is needed for the next one
        self._functionals.pop(k - 2, None)
        return out

    def matrix(self, i: int) -> List[List]:
        """dims[i] x dims[12-i] matrix of the pairing."""
        psi = self.functionals(self.top_degree - i)
        columns = [psi[t] for t in self.levels[self.top_degree - i]]
        return [[col[s] for col in columns] for s in range(len(self.levels[i]))]

    def rank(self, i: int) -> int:
        M = self.matrix(i)
        if not M or not M[0]:
            return 0
        domain = self.R.domain
        if domain.is_FiniteField and domain.mod == 2:
            return binary_rank(np.array([[int(x) % 2 for x in row] for row in M], dtype=np.uint8))
        return Matrix([[domain.to_sympy(x) for x in row] for row in M]).rank()


def pairing_rank(gb: GroebnerBasis, i: int, pairing: Optional[Pairing] = None) -> int:
    """
    Rank of the degree-i pairing matrix.

    Raises:
        ValueError: if the top degree is not one-dimensional
    """
    pairing = pairing or Pairing(gb)
    return pairing.rank(i)


def pairing_ranks(gb: GroebnerBasis) -> List[int]:
    """Ranks for i = 0..12, computed from the top degree down."""
    pairing = Pairing(gb)
    ranks = [0] * (TOP_DEGREE + 1)
    for k in range(TOP_DEGREE + 1):
        ranks[TOP_DEGREE - k] = pairing.rank(TOP_DEGREE - k)
    return ranks
