"""Named parametric network families and exact template matching.

Each family is a parametrized list of (source, target) coefficient tuples.
match_family searches species and reaction permutations for an exact match
and returns the parameters plus the realizing permutation; applying that
permutation to the candidate reproduces the template matrices exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from .network import ReactionNetwork, network_from_reactions


class FamilyName(Enum):
    GENERALISED_LOTKA = "GeneralisedLotka"
    IVANOVA = "Ivanova"
    THREE_SPECIES = "ThreeSpeciesFamily"
    GENERALISED_LVA = "GeneralisedLVA"
    LIFTED_LVA = "LiftedLVA"
    TETRA = "TetraFamily"
    HEPTA = "HeptaFamily"
    PENTA_CASE8 = "PentaCase8"


@dataclass(frozen=True)
class FamilyTag:
    name: FamilyName
    parameters: Tuple[Tuple[str, int], ...]
    species_permutation: Tuple[int, ...]
    reaction_permutation: Tuple[int, ...]

    def param(self, key: str) -> int:
        return dict(self.parameters)[key]


def family_network(name: FamilyName, **params: int) -> ReactionNetwork:
    """Instantiate a family template as a concrete network."""
    return network_from_reactions(_template(name, params))


def _template(name: FamilyName, params: Dict[str, int]) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    c = params.get("c")
    d = params.get("d")
    if name == FamilyName.GENERALISED_LOTKA:
        _require(c >= 1 and d >= 1, "GeneralisedLotka needs c, d >= 1")
        return [((1, 0), (1 + c, 0)), ((1, 1), (0, 1 + d)), ((0, 1), (0, 0))]
    if name == FamilyName.IVANOVA:
        return [((1, 0, 1), (2, 0, 0)), ((1, 1, 0), (0, 2, 0)), ((0, 1, 1), (0, 0, 2))]
    if name == FamilyName.THREE_SPECIES:
        _require(c >= 1 and d >= 1, "ThreeSpeciesFamily needs c, d >= 1")
        return [
            ((1, 0, 1), (1 + c, 0, 0)),
            ((1, 1, 0), (0, 0, 0)),
            ((0, 1, 1), (0, 1 + c * d, 1 + d)),
        ]
    if name == FamilyName.GENERALISED_LVA:
        _require(d >= 1, "GeneralisedLVA needs d >= 1")
        return [((2, 0), (3, 0)), ((1, 1), (0, 1 + d)), ((0, 1), (0, 0))]
    if name == FamilyName.LIFTED_LVA:
        _require(d >= 1, "LiftedLVA needs d >= 1")
        return [
            ((2, 0, 0), (3, 0, 0)),
            ((1, 1, 0), (0, 1 + d, d)),
            ((0, 1, 1), (0, 0, 0)),
        ]
    if name == FamilyName.TETRA:
        _require(d >= 0, "TetraFamily needs d >= 0")
        return [((2, 0), (3, 1)), ((1, 1), (0, 1 + d)), ((0, 1), (0, 0))]
    if name == FamilyName.HEPTA:
        _require(c >= 1 and d >= 0 and (c, d) != (0, 0), "HeptaFamily needs c > 0, d >= 0")
        return [((2, 0), (4, 3)), ((1, 1), (0, 0)), ((0, 0), (c, d))]
    if name == FamilyName.PENTA_CASE8:
        _require(c >= 1 and d >= 0, "PentaCase8 needs c >= 1, d >= 0")
        return [((2, 0), (3, 2)), ((1, 1), (0, 0)), ((1, 0), (1 + c, d))]
    raise ValueError(name)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


# parameter search ranges are bounded by the molecularity of the candidate,
# so extraction can simply try all feasible values
def _param_candidates(name: FamilyName, max_mol: int):
    if name == FamilyName.IVANOVA:
        return [{}]
    hi = max(max_mol, 1)
    if name in (FamilyName.GENERALISED_LVA, FamilyName.LIFTED_LVA):
        return [{"d": d} for d in range(1, hi + 1)]
    if name == FamilyName.TETRA:
        return [{"d": d} for d in range(0, hi + 1)]
    if name == FamilyName.GENERALISED_LOTKA:
        return [{"c": c, "d": d} for c in range(1, hi + 1) for d in range(1, hi + 1)]
    if name == FamilyName.THREE_SPECIES:
        return [{"c": c, "d": d} for c in range(1, hi + 1) for d in range(1, hi + 1) if c * d <= hi]
    if name == FamilyName.HEPTA:
        return [{"c": c, "d": d} for c in range(1, hi + 1) for d in range(0, hi + 1)]
    if name == FamilyName.PENTA_CASE8:
        return [{"c": c, "d": d} for c in range(1, hi + 1) for d in range(0, hi + 1)]
    raise ValueError(name)


TEMPLATE_PRIORITY = (
    FamilyName.GENERALISED_LOTKA,
    FamilyName.IVANOVA,
    FamilyName.THREE_SPECIES,
    FamilyName.GENERALISED_LVA,
    FamilyName.LIFTED_LVA,
    FamilyName.TETRA,
    FamilyName.HEPTA,
    FamilyName.PENTA_CASE8,
)


def match_family(net: ReactionNetwork) -> Optional[FamilyTag]:
    """First family (in fixed priority order) matched by the network under
    some species relabeling and reaction reordering, with parameters."""
    if net.num_reactions != 3:
        return None
    rxs = net.reaction_tuples()
    n = net.num_species
    from .network import molecularity_profile
    max_mol = max(molecularity_profile(net))
    rx_sets = {}
    for sperm in itertools.permutations(range(n)):
        permuted = [
            (tuple(s[p] for p in sperm), tuple(t[p] for p in sperm))
            for (s, t) in rxs
        ]
        rx_sets[sperm] = permuted
    for name in TEMPLATE_PRIORITY:
        for params in _param_candidates(name, max_mol):
            try:
                tpl = _template(name, params)
            except ValueError:
                continue
            if len(tpl[0][0]) != n:
                continue
            for sperm, permuted in rx_sets.items():
                order = _match_order(permuted, tpl)
                if order is not None:
                    return FamilyTag(
                        name=name,
                        parameters=tuple(sorted(params.items())),
                        species_permutation=sperm,
                        reaction_permutation=order,
                    )
    return None


def _match_order(permuted, tpl) -> Optional[Tuple[int, ...]]:
    """Reaction order making the permuted candidate equal the template."""
    remaining = list(range(len(tpl)))
    order: List[int] = []
    for want in tpl:
        hit = next((j for j in remaining if permuted[j] == want), None)
        if hit is None:
            return None
        order.append(hit)
        remaining.remove(hit)
    return tuple(order)


def verify_match(net: ReactionNetwork, tag: FamilyTag) -> bool:
    """Applying the recorded permutations must reproduce the template."""
    permuted = net.permuted(tag.species_permutation, tag.reaction_permutation)
    tpl = network_from_reactions(_template(tag.name, dict(tag.parameters)))
    return (
        permuted.source_matrix == tpl.source_matrix
        and permuted.stoich_matrix == tpl.stoich_matrix
    )
