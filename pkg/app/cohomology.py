"""
Ring-level verifications: Hilbert function, Poincaré duality, the socle
witness, S4 stability of the ideal and the single-chain flag relations.

`verify_ring` assembles them into the "ring" report section.
"""

from dataclasses import dataclass
from datetime import datetime
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from pydantic import BaseModel

from .groebner import (
    GroebnerBasis,
    buchberger,
    hilbert_function,
    pairing_ranks,
)
from .hypersimplex import ADJACENT_TRANSPOSITIONS, Perm, perm_from_cycle
from .presentation import (
    EXPECTED_FAMILY_I_RANK,
    SURVIVORS,
    VARIABLES,
    Presentation,
    build_presentation,
    eliminate_linear,
    family_i_rank,
    field_domain,
    polynomial_ring,
    reduce_to_survivors,
    act_polynomial,
)
from .tetra_common import (
    BudgetExceededError,
    CheckResult,
    SectionReport,
    VerificationError,
    check,
    get_default_engine_config,
    section_from_checks,
)

logger = logging.getLogger(__name__)

EXPECTED_HILBERT = [1, 26, 188, 652, 1394, 2112, 2414, 2112, 1394, 652, 188, 26, 1]
EXPECTED_FAMILY_SIZES = {"i": 24, "ii": 99, "iv": 40}
EXPECTED_BASE_CHAIN_IV = 3
MEMBERSHIP_DEGREE = 4
RING_CHECKS = ("hilbert", "pairing", "witness", "s4", "flags", "strategies")

WITNESS_EXPONENTS: Dict[str, int] = {
    "y1": 3, "y12": 2, "y123": 1,
    "a": 1, "b": 1, "astar": 1, "c1": 1, "cstar1": 1, "d23": 1,
}


def field_ring(field: str, names: Sequence[str] = SURVIVORS):
    return polynomial_ring(names, field_domain(field))


def monomial(R, exponents: Dict[str, int]):
    names = [str(s) for s in R.symbols]
    m = tuple(exponents.get(n, 0) for n in names)
    return R.from_dict({m: R.domain.one})


@dataclass
class RingContext:
    """Eliminated presentation plus a Gröbner basis over one field."""

    full: Presentation
    reduced: Presentation
    field: str
    gb: GroebnerBasis

    def move(self, poly):
        """Full-ring polynomial over ZZ -> survivors ring over the field."""
        return reduce_to_survivors(poly, self.reduced).set_ring(self.gb.ring)


def groebner_of(
    reduced: Presentation,
    field: str,
    truncation_degree: Optional[int] = None,
    selection: str = "normal",
    max_seconds: Optional[float] = None,
    max_pairs: Optional[int] = None,
) -> GroebnerBasis:
    return buchberger(
        reduced.polynomials(field),
        ring=field_ring(field, reduced.generators),
        selection=selection,
        truncation_degree=truncation_degree,
        max_seconds=max_seconds,
        max_pairs=max_pairs,
    )


def ring_context(
    full: Presentation,
    field: str = "GF2",
    truncation_degree: Optional[int] = None,
    max_seconds: Optional[float] = None,
    max_pairs: Optional[int] = None,
) -> RingContext:
    reduced = eliminate_linear(full)
    gb = groebner_of(reduced, field, truncation_degree, "normal", max_seconds, max_pairs)
    return RingContext(full, reduced, field, gb)


class WitnessStatus(BaseModel):
    monomial: str
    normal_form: str
    nonzero: bool
    annihilated: bool
    transposed_nonzero: bool

    @property
    def ok(self) -> bool:
        return self.nonzero and self.annihilated and self.transposed_nonzero


def socle_witness(ctx: RingContext) -> WitnessStatus:
    """
    Normal form of y1^3 y12^2 y123 a b astar c1 cstar1 d23.

    Besides being nonzero, the class must be killed by every generator
    (degree 13 vanishes) and its image under the transposition (1 2) must
    stay nonzero.
    """
    R = ctx.gb.ring
    w = monomial(R, WITNESS_EXPONENTS)
    nf = ctx.gb.normal_form(w)
    annihilated = all(not ctx.gb.normal_form(w * x) for x in R.gens)

    full_ring = polynomial_ring(VARIABLES)
    swapped = act_polynomial(perm_from_cycle(1, 2), monomial(full_ring, WITNESS_EXPONENTS))
    transposed = ctx.gb.normal_form(ctx.move(swapped))

    status = WitnessStatus(
        monomial=str(w),
        normal_form=str(nf),
        nonzero=bool(nf),
        annihilated=annihilated,
        transposed_nonzero=bool(transposed),
    )
    logger.info(f"[RING] Socle witness: {status.normal_form}")
    return status


def s4_stability_check(
    full: Presentation,
    field: str = "GF2",
    truncation_degree: int = MEMBERSHIP_DEGREE,
    ctx: Optional[RingContext] = None,
    perms: Sequence[Perm] = ADJACENT_TRANSPOSITIONS,
) -> Tuple[bool, List[str]]:
    """
    Check that each permuted relation lies in the ideal.

    Args:
        full: Presentation on the 37 generators (family (i) included)
        field: "GF2" or "QQ"
        truncation_degree: Degree up to which the basis is computed; must
            cover the relation degrees
        ctx: Precomputed context to reuse instead of a fresh basis
        perms: Generators of S4 to apply

    Returns:
        (stable, violations) with violations as "perm: relation"
    """
    if ctx is None:
        ctx = ring_context(full, field, truncation_degree)
    violations: List[str] = []
    for rel in full.relations:
        for perm in perms:
            image = ctx.move(act_polynomial(perm, rel.poly))
            if image and ctx.gb.normal_form(image):
                violations.append(f"{''.join(map(str, perm))}: {rel}")
    if violations:
        logger.warning(f"[RING] {len(violations)} permuted relations outside the ideal")
    return not violations, violations


def ideal_equality(
    field: str = "GF2", truncation_degree: int = MEMBERSHIP_DEGREE
) -> Tuple[bool, List[str]]:
    """
    Compare the ideals generated with flag relations over all chains and
    over the base chain only, by membership in both directions.
    """
    every = eliminate_linear(build_presentation("all"))
    base = eliminate_linear(build_presentation("base_chain"))
    gb_every = groebner_of(every, field, truncation_degree)
    gb_base = groebner_of(base, field, truncation_degree)
    missing = [f"all -> base_chain: {p}" for p in every.polynomials(field) if gb_base.normal_form(p)]
    missing += [f"base_chain -> all: {p}" for p in base.polynomials(field) if gb_every.normal_form(p)]
    return not missing, missing


def strategies_agree(
    reduced: Presentation, field: str = "GF2", truncation_degree: int = MEMBERSHIP_DEGREE
) -> bool:
    normal = groebner_of(reduced, field, truncation_degree, "normal")
    first = groebner_of(reduced, field, truncation_degree, "first")
    return normal.serialize() == first.serialize()


def _failed(name: str, error: Exception) -> CheckResult:
    return CheckResult(name=name, passed=False, detail=str(error))


def verify_ring(
    field: str = "GF2",
    config: Optional[dict] = None,
    include_rationals: bool = False,
    selected: Sequence[str] = RING_CHECKS,
) -> SectionReport:
    """
    Build, eliminate and compute; return the "ring" section.

    Args:
        field: Primary field, "GF2" or "QQ"
        config: Engine config (budgets); defaults to get_default_engine_config()
        include_rationals: Also compute the Hilbert function over QQ and
            compare with the primary field
        selected: Subset of RING_CHECKS to run; the presentation checks
            always run

    Returns:
        SectionReport; a Gröbner budget overrun becomes a failed check
    """
    unknown = set(selected) - set(RING_CHECKS)
    if unknown:
        raise ValueError(f"unknown ring checks {sorted(unknown)}, expected {RING_CHECKS}")
    config = config or get_default_engine_config()
    start_time = datetime.now()
    checks: List[CheckResult] = []
    data: Dict[str, object] = {"field": field}

    full = build_presentation("all")
    sizes = full.family_sizes()
    data["family_sizes"] = sizes
    for family, expected in EXPECTED_FAMILY_SIZES.items():
        checks.append(check(f"family_size:{family}", expected, sizes[family]))
    base_sizes = build_presentation("base_chain").family_sizes()
    checks.append(check("family_size:iv:base_chain", EXPECTED_BASE_CHAIN_IV, base_sizes["iv"]))
    checks.append(check("family_i_rank", EXPECTED_FAMILY_I_RANK, family_i_rank(full)))

    try:
        ctx = ring_context(
            full,
            field,
            truncation_degree=config["truncation_degree"],
            max_seconds=config["groebner_max_seconds"],
            max_pairs=config["groebner_max_pairs"],
        )
    except VerificationError as e:
        checks.append(_failed("eliminate_linear", e))
        return section_from_checks("ring", checks, data)
    except BudgetExceededError as e:
        logger.error(f"[ERROR] Gröbner budget exceeded: {e}")
        checks.append(_failed("groebner_budget", e))
        data["degree_reached"] = e.degree_reached
        return section_from_checks("ring", checks, data)

    checks.append(check("survivors", len(SURVIVORS), len(ctx.reduced.generators)))
    data["basis_size"] = len(ctx.gb.basis)

    try:
        hf = hilbert_function(ctx.gb)
    except ValueError as e:
        # truncation below degree 13 leaves the top of the ring unread
        checks.append(_failed("hilbert", e))
        return section_from_checks("ring", checks, data)
    data["hilbert"] = hf.dims

    if "hilbert" in selected:
        checks.append(check("hilbert", EXPECTED_HILBERT, hf.dims))
        checks.append(check("hilbert_degree_13", 0, hf.next_degree))
        checks.append(check("hilbert_palindromic", True, hf.is_palindromic()))

    if "pairing" in selected:
        try:
            ranks = pairing_ranks(ctx.gb)
            data["pairing_ranks"] = ranks
            checks.append(check("pairing_full_rank", hf.dims, ranks))
        except ValueError as e:
            checks.append(_failed("pairing_full_rank", e))

    if "witness" in selected:
        witness = socle_witness(ctx)
        data["witness"] = witness.model_dump()
        checks.append(check("socle_witness_nonzero", True, witness.nonzero))
        checks.append(check("socle_witness_annihilated", True, witness.annihilated))
        checks.append(check("socle_witness_transposed", True, witness.transposed_nonzero))

    if "s4" in selected:
        stable, violations = s4_stability_check(full, field, ctx=ctx)
        checks.append(
            CheckResult(name="s4_stability", passed=stable, expected=[], actual=violations[:10])
        )

    if "flags" in selected:
        equal, missing = ideal_equality(field)
        checks.append(
            CheckResult(
                name="flag_relations_ideal_equality", passed=equal, expected=[], actual=missing[:10]
            )
        )

    if "strategies" in selected:
        checks.append(
            check("selection_strategies_agree", True, strategies_agree(ctx.reduced, field))
        )

    if include_rationals and field != "QQ":
        try:
            rational = ring_context(
                full,
                "QQ",
                truncation_degree=config["truncation_degree"],
                max_seconds=config["groebner_max_seconds"],
                max_pairs=config["groebner_max_pairs"],
            )
            dims_q = hilbert_function(rational.gb).dims
            data["hilbert_QQ"] = dims_q
            checks.append(check("hilbert_QQ_agrees", hf.dims, dims_q))
        except BudgetExceededError as e:
            checks.append(_failed("hilbert_QQ_agrees", e))

    elapsed = (datetime.now() - start_time).total_seconds()
    logger.info(f"[RING] Ring section over {field} done in {elapsed:.2f}s")
    return section_from_checks("ring", checks, data)
