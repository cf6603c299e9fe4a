"""Periodic-orbit classification of three-reaction quadratic trimolecular
systems, plus the target-splitting transform that rewrites any quadratic
system as a trimolecular one with the same vector field.

Two classification routes are provided: the template route (reduce trivial
species, match the three oscillatory families) and a slower dispatch that
reasons through divergence class, the 2X -> 3X reaction and species counts.
They must agree; the enumeration tests cross-check them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from .families import FamilyName, FamilyTag, match_family
from .network import (
    MassActionSystem,
    ReactionNetwork,
    drop_trivial_species,
    is_quadratic,
    is_trimolecular,
    molecularity_profile,
    network_from_reactions,
)
from .stoich import dynamically_nontrivial, positive_divergence_reactions, rank


class Admits(Enum):
    FOR_SOME_KAPPA = "ForSomeKappa"
    NEVER = "Never"


@dataclass(frozen=True)
class PeriodicVerdict:
    admits_periodic: Admits
    kappa_condition: Optional[str] = None
    matched_family: Optional[FamilyTag] = None
    reduced_network: Optional[ReactionNetwork] = None
    reason: Optional[str] = None


_KAPPA_CONDITIONS = {
    FamilyName.GENERALISED_LOTKA: "all kappa",
    FamilyName.IVANOVA: "all kappa",
    FamilyName.LIFTED_LVA: "kappa2 = kappa3 > kappa1",
}


def classify_trimolecular(net: ReactionNetwork) -> PeriodicVerdict:
    """Does some choice of rate constants give the system a periodic orbit?

    Valid for three-reaction quadratic trimolecular networks.  Positive
    verdicts carry the matched family and its rate-constant condition; the
    family list is exactly: two-species autocatalytic/decay loops with
    c, d in {1, 2}, the cyclic three-species relay, and the rank-preserving
    three-species lift of the autocatalator (d = 1).
    """
    if net.num_reactions != 3:
        raise ValueError("classification requires exactly three reactions")
    if not is_quadratic(net) or not is_trimolecular(net):
        raise ValueError("classification requires a quadratic trimolecular network")
    reduced = drop_trivial_species(net)
    if rank(reduced) != 2:
        return PeriodicVerdict(Admits.NEVER, reduced_network=reduced, reason="rank != 2")
    if not dynamically_nontrivial(reduced).verdict:
        return PeriodicVerdict(Admits.NEVER, reduced_network=reduced, reason="dynamically trivial")
    tag = match_family(reduced)
    if tag is not None:
        ok = (
            (tag.name == FamilyName.GENERALISED_LOTKA and tag.param("c") <= 2 and tag.param("d") <= 2)
            or tag.name == FamilyName.IVANOVA
            or (tag.name == FamilyName.LIFTED_LVA and tag.param("d") == 1)
        )
        if ok:
            return PeriodicVerdict(
                Admits.FOR_SOME_KAPPA,
                kappa_condition=_KAPPA_CONDITIONS[tag.name],
                matched_family=tag,
                reduced_network=reduced,
            )
        return PeriodicVerdict(
            Admits.NEVER, matched_family=tag, reduced_network=reduced,
            reason=f"family {tag.name.value} admits no periodic orbit",
        )
    return PeriodicVerdict(Admits.NEVER, reduced_network=reduced, reason="no oscillatory family match")


def classify_trimolecular_slow(net: ReactionNetwork) -> PeriodicVerdict:
    """Independent route: divergence class, presence of a j: 2Xj -> 3Xj
    reaction, then species-count dispatch.  Must agree with the template
    route on every input."""
    if net.num_reactions != 3:
        raise ValueError("classification requires exactly three reactions")
    if not is_quadratic(net) or not is_trimolecular(net):
        raise ValueError("classification requires a quadratic trimolecular network")
    reduced = drop_trivial_species(net)
    if rank(reduced) != 2:
        return PeriodicVerdict(Admits.NEVER, reduced_network=reduced, reason="rank != 2")
    if not dynamically_nontrivial(reduced).verdict:
        return PeriodicVerdict(Admits.NEVER, reduced_network=reduced, reason="dynamically trivial")
    n = reduced.num_species
    posdiv = positive_divergence_reactions(reduced)
    tag = match_family(reduced)

    def family_is(name: FamilyName) -> bool:
        return tag is not None and tag.name == name

    if not posdiv:
        # without an autocatalytic 2X -> 3X step, oscillation forces a
        # Lotka-Volterra equation with no diagonal term
        if n == 2 and family_is(FamilyName.GENERALISED_LOTKA):
            return PeriodicVerdict(Admits.FOR_SOME_KAPPA, "all kappa", tag, reduced)
        if n == 3 and family_is(FamilyName.IVANOVA):
            return PeriodicVerdict(Admits.FOR_SOME_KAPPA, "all kappa", tag, reduced)
        if n == 3 and family_is(FamilyName.THREE_SPECIES):
            # the relay family with general c, d is never trimolecular
            return PeriodicVerdict(Admits.NEVER, matched_family=tag, reduced_network=reduced,
                                   reason="relay family exceeds trimolecularity")
        return PeriodicVerdict(Admits.NEVER, reduced_network=reduced,
                               reason="no positive-divergence reaction and not an LV-form family")
    # 2X -> 3X present (the only trimolecular positive-divergence reaction)
    if n == 2:
        return PeriodicVerdict(Admits.NEVER, matched_family=tag, reduced_network=reduced,
                               reason="planar: saddle or autocatalator family")
    if n == 3:
        if family_is(FamilyName.LIFTED_LVA) and tag.param("d") == 1:
            return PeriodicVerdict(Admits.FOR_SOME_KAPPA, "kappa2 = kappa3 > kappa1", tag, reduced)
        return PeriodicVerdict(Admits.NEVER, matched_family=tag, reduced_network=reduced,
                               reason="three species: saddle unless lifted autocatalator")
    if n == 4:
        return PeriodicVerdict(Admits.NEVER, reduced_network=reduced, reason="four species: saddle")
    return PeriodicVerdict(Admits.NEVER, reduced_network=reduced,
                           reason="five or more species: dynamically trivial")


def expand_to_trimolecular(sys: MassActionSystem) -> MassActionSystem:
    """Split every reaction with target molecularity >= 4 into unit-step
    reactions (one per changed species, rate kappa |c_j|); the vector field
    is unchanged as a polynomial map.  Requires quadratic sources, which
    bound the split targets at molecularity 3."""
    net = sys.network
    if not is_quadratic(net):
        raise ValueError("expansion requires quadratic sources")
    reactions: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []
    kappa = []
    n = net.num_species
    for j in range(net.num_reactions):
        src = net.source_of(j).coefficients
        tgt = net.target_of(j).coefficients
        if sum(tgt) <= 3:
            reactions.append((src, tgt))
            kappa.append(sys.kappa[j])
            continue
        for i in range(n):
            c = net.stoich_matrix[i][j]
            if c == 0:
                continue
            step = list(src)
            step[i] += 1 if c > 0 else -1
            reactions.append((src, tuple(step)))
            kappa.append(sys.kappa[j] * abs(c))
    merged = network_from_reactions(reactions, species=net.species)
    return MassActionSystem(merged, tuple(kappa))
