"""Named fixture networks used throughout the test and acceptance suites."""

from __future__ import annotations

from .families import FamilyName, family_network
from .network import ReactionNetwork, network_from_reactions


def lotka() -> ReactionNetwork:
    """X -> 2X; X + Y -> 2Y; Y -> 0."""
    return family_network(FamilyName.GENERALISED_LOTKA, c=1, d=1)


def ivanova() -> ReactionNetwork:
    """Z + X -> 2X; X + Y -> 2Y; Y + Z -> 2Z (cyclic, mass conserving)."""
    return family_network(FamilyName.IVANOVA)


def generalised_lotka(c: int, d: int) -> ReactionNetwork:
    return family_network(FamilyName.GENERALISED_LOTKA, c=c, d=d)


def generalised_lva(d: int = 1) -> ReactionNetwork:
    """2X -> 3X; X + Y -> (d+1)Y; Y -> 0 (autocatalator; globally repelling
    equilibrium, no periodic orbits)."""
    return family_network(FamilyName.GENERALISED_LVA, d=d)


def lifted_lva(d: int = 1) -> ReactionNetwork:
    """2X -> 3X; X + Y -> (d+1)Y + dZ; Y + Z -> 0."""
    return family_network(FamilyName.LIFTED_LVA, d=d)


def tetra(d: int = 0) -> ReactionNetwork:
    """2X -> 3X + Y; X + Y -> (1+d)Y; Y -> 0 (supercritical branch at
    kappa1 = kappa2)."""
    return family_network(FamilyName.TETRA, d=d)


def hepta(c: int = 1, d: int = 0) -> ReactionNetwork:
    """2X -> 4X + 3Y; X + Y -> 0; 0 -> cX + dY."""
    return family_network(FamilyName.HEPTA, c=c, d=d)


def penta_case8(c: int = 1, d: int = 0) -> ReactionNetwork:
    """2X -> 3X + 2Y; X + Y -> 0; X -> (1+c)X + dY (vertical branch at
    kappa1 = kappa2)."""
    return family_network(FamilyName.PENTA_CASE8, c=c, d=d)


def three_species_family(c: int = 1, d: int = 1) -> ReactionNetwork:
    """Z + X -> (1+c)X; X + Y -> 0; Y + Z -> (1+cd)Y + (1+d)Z."""
    return family_network(FamilyName.THREE_SPECIES, c=c, d=d)


def reversed_lva() -> ReactionNetwork:
    """2X -> 3X; X + Y -> 0; Y -> 2Y: same sources as the autocatalator with
    targets rearranged; every positive equilibrium is a saddle."""
    return network_from_reactions([
        ((2, 0), (3, 0)),
        ((1, 1), (0, 0)),
        ((0, 1), (0, 2)),
    ])


def saddle_4species() -> ReactionNetwork:
    """2X -> 3X; X + Y -> Z + W; Z + W -> Y: the unique quadratic (4, 3, 2)
    network with the autocatalytic step and positive equilibria; all of them
    saddles."""
    return network_from_reactions([
        ((2, 0, 0, 0), (3, 0, 0, 0)),
        ((1, 1, 0, 0), (0, 0, 1, 1)),
        ((0, 0, 1, 1), (0, 1, 0, 0)),
    ])


def fold_example() -> ReactionNetwork:
    """X + Y -> 2Z; 2Z -> 2X; Z -> Y: 0, 1 or 2 equilibria per class."""
    return network_from_reactions([
        ((1, 1, 0), (0, 0, 2)),
        ((0, 0, 2), (2, 0, 0)),
        ((0, 0, 1), (0, 1, 0)),
    ])


def octo() -> ReactionNetwork:
    """2X -> 4X + 3Y + Z; X + Y -> 0; Z -> X (codimension-two fixture)."""
    return network_from_reactions([
        ((2, 0, 0), (4, 3, 1)),
        ((1, 1, 0), (0, 0, 0)),
        ((0, 0, 1), (1, 0, 0)),
    ])


def lifted_tetra() -> ReactionNetwork:
    """2X -> 3X + Y; X + Y -> Y + Z; Y + Z -> 0 (three-species lift of the
    simplest supercritical network)."""
    return network_from_reactions([
        ((2, 0, 0), (3, 1, 0)),
        ((1, 1, 0), (0, 1, 1)),
        ((0, 1, 1), (0, 0, 0)),
    ])


def open_question_network() -> ReactionNetwork:
    """2X -> 3X + 2Y; X + Y -> 0; Y -> X + Y: trace is negative at every
    positive equilibrium, so no bifurcation; limit cycles unresolved."""
    return network_from_reactions([
        ((2, 0), (3, 2)),
        ((1, 1), (0, 0)),
        ((0, 1), (1, 1)),
    ])


def selkov() -> ReactionNetwork:
    """0 -> X; X + 2Y -> 3Y; Y -> 0 (cubic reference oscillator)."""
    return network_from_reactions([
        ((0, 0), (1, 0)),
        ((1, 2), (0, 3)),
        ((0, 1), (0, 0)),
    ])
