"""From a K3-type quadratic space to a primitive sublattice of the K3 lattice.

``prop32_run`` places V inside the K3 lattice tensored with Q, saturates the
image and carries the period along.  Its output is lattice-plus-period data;
turning it into an actual surface needs the surjectivity of the period map,
which is outside this package.  ``theorem13_precheck`` checks the testable
proxies of the hypotheses on a system of Frobenius data.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import arith
from .compat import CompatSystem, irreducibility_certificate, newton_vs_hodge
from .errors import InvalidInput, MissingPlace, NotRepresentable, OutOfRange, SignatureError
from .hodge import PeriodVector, transcendental_split, validate_k3_type
from .k3lattice import GenusSummary, PrimitiveSublattice, genus_summary, k3_gram, saturate
from .linalg import matmul, solve_left
from .quadform import (
    INF,
    QuadSpace,
    _hasse_of_entries,
    diagonalize,
    disc_class,
    embed_space,
    isometric_over_Q,
    local_obstructions,
    relevant_primes,
    signature,
)

OUTPUT_LABEL = "period-domain data, realizable as a K3 surface only through the surjectivity of the period map"


@dataclass
class Prop32Result:
    rho: int
    embedding: list | None
    T: PrimitiveSublattice | None
    genus: GenusSummary | None
    period_in_T: PeriodVector | None
    rational_class_tag: tuple
    warnings: list = field(default_factory=list)
    paper_steps: list = field(default_factory=list)
    split: dict | None = None
    diagnosis: dict | None = None
    label: str = OUTPUT_LABEL


def rational_class_tag(V: QuadSpace, places=None) -> tuple:
    """(rank, signature, det class, ((place, hasse), ...)) of V."""
    e = diagonalize(V).entries
    places = places if places is not None else [INF] + relevant_primes(V)
    hasse = tuple(("inf" if v is INF else v, _hasse_of_entries(e, v)) for v in places)
    return (V.n, signature(V), disc_class(V), hasse)


def _diagnose(V: QuadSpace, W: QuadSpace) -> dict:
    e = diagonalize(V).entries
    obstructions = local_obstructions(V, W)
    return {
        "dimension": V.n,
        "det_class": disc_class(V),
        "hasse": {("inf" if v is INF else str(v)): _hasse_of_entries(e, v) for v in [INF] + relevant_primes(V, W)},
        "representable": not obstructions,
        "obstructions": [{k: ("inf" if x is INF else x) for k, x in o.items()} for o in obstructions],
    }


def _permute(V: QuadSpace, order):
    g = [[V.gram[i][j] for j in order] for i in order]
    return QuadSpace(g)


def prop32_run(V: QuadSpace, omega: PeriodVector | None = None, height_bound: int = 64,
               diagnose: bool = False, seed: int = 0, order=None) -> Prop32Result:
    """Embed V into the K3 lattice over Q, saturate and transport the period.

    ``seed`` and ``order`` (a permutation of the basis of V used during the
    search) change the search path without changing V.
    """
    warnings, steps = [], []
    split = None
    if omega is not None:
        report = validate_k3_type(V, omega)
        steps.append("validate_period")
        if not (report.isotropy_ok and report.positivity_ok):
            raise InvalidInput("period fails the isotropy or positivity condition")
        if not report.irreducible:
            s = transcendental_split(V, omega)
            split = {
                "algebraic_basis": s.algebraic_basis,
                "algebraic_gram": [list(r) for r in s.algebraic.gram],
                "transcendental_basis": s.transcendental_basis,
            }
            warnings.append(
                f"reducible Hodge structure: split off an algebraic part of rank {len(s.algebraic_basis)} "
                "and continued with the transcendental part"
            )
            steps.append("split_algebraic_part")
            V, omega = s.transcendental, s.period
    n = V.n
    rho = 22 - n
    r, neg = signature(V)
    if r != 2:
        raise SignatureError(f"signature ({r}, {neg}) is not (2, {n - 2})")
    W = k3_gram().to_quadspace()
    steps.append("check_dimension")
    if not 2 <= n <= 19:
        if diagnose and n in (20, 21):
            diag = _diagnose(V, W)
            steps.append("local_representability_only")
            warnings.append("rho = 1 or 2: only the local conditions were examined, no embedding attempted")
            return Prop32Result(rho, None, None, None, None, rational_class_tag(V), warnings, steps, split, diag)
        raise OutOfRange(f"dimension {n} (rho = {rho}) is outside the range 2 <= 22 - rho <= 19")
    obstructions = local_obstructions(V, W)
    steps.append("local_representability")
    if obstructions:
        o = obstructions[0]
        raise NotRepresentable(f"V is not represented by the K3 lattice over Q at {o['place']}",
                               place=o["place"], invariants=o)
    if order is not None:
        order = list(order)
        if sorted(order) != list(range(n)):
            raise InvalidInput("order must be a permutation of the basis indices")
        Bp = embed_space(_permute(V, order), W, height_bound, seed)
        B = [None] * n
        for k, i in enumerate(order):
            B[i] = Bp[k]
    else:
        B = embed_space(V, W, height_bound, seed)
    steps.append("embed_into_k3_lattice")
    L = k3_gram()
    T = saturate(L, B)
    steps.append("saturate")
    gs = genus_summary(T.lattice())
    steps.append("genus_invariants")
    VT = QuadSpace(T.gram)
    assert isometric_over_Q(VT, V)
    period_T = None
    if omega is not None:
        # rows of B are c-combinations of the rows of T.basis
        M = solve_left([list(map(Fraction, r)) for r in T.basis], B)
        period_T = omega.transform(M)
        check = validate_k3_type(VT, period_T)
        assert check.isotropy_ok and check.positivity_ok
        steps.append("transport_period")
    tag = rational_class_tag(VT, [INF] + relevant_primes(V))
    steps.append("assemble")
    return Prop32Result(rho, B, T, gs, period_T, tag, warnings, steps, split)


@dataclass
class Thm13Report:
    dim_ok: bool
    condition1: str
    condition2: str
    condition3: dict
    notes: list = field(default_factory=list)


def theorem13_precheck(system: CompatSystem, declared_rho: int, witness_place, witness_ell: int) -> Thm13Report:
    """Proxies for the three hypotheses on a finite set of Frobenius records.

    ``witness_place`` is a label or a pair ``(p, f)``.
    """
    n = 22 - declared_rho
    notes = []
    dim_ok = 2 < n <= 19
    if system.dimension != n:
        notes.append(f"system dimension {system.dimension} differs from 22 - rho = {n}")
    condition1 = "ASSUMED: de Rham with the stated Hodge-Tate weights is not decidable from Frobenius data"
    condition2 = "UNKNOWN"
    for rec in system.records:
        if irreducibility_certificate(rec.coeffs)["verdict"] == "CERTIFIED":
            condition2 = "CERTIFIED_IRREDUCIBLE_OVER_Q"
            notes.append(
                f"Frobenius polynomial at {rec.place.label} (ell = {rec.ell}) is irreducible over Q; "
                "absolute irreducibility of the representation is not established"
            )
            break

    def matches(rec):
        if isinstance(witness_place, str):
            return rec.place.label == witness_place
        p, f = witness_place
        return (rec.place.p, rec.place.f) == (p, f)

    recs = [r for r in system.records if matches(r) and r.ell == witness_ell]
    if not recs:
        raise MissingPlace(f"no record at place {witness_place!r} with ell = {witness_ell}")
    rec = recs[0]
    try:
        verdict = newton_vs_hodge(rec.coeffs, rec.place.p, rec.place.f, declared_rho)
    except InvalidInput as exc:
        verdict = {"pass": False, "error": str(exc)}
    verdict["place"] = rec.place.label
    verdict["assumption"] = "Newton above Hodge at p stands in for the Hodge-Tate weights via crystalline comparison"
    condition3 = verdict
    return Thm13Report(dim_ok, condition1, condition2, condition3, notes)
