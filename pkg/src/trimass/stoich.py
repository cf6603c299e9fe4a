"""Exact structural predicates on reaction networks.

Rank, positive-kernel / dual certificates for dynamical nontriviality,
planar source geometry, and the divergence (Bendixson-Dulac) tests.
All verdicts are decided in rational arithmetic and carry certificates
that can be re-verified exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import ratmat
from .network import MassActionSystem, ReactionNetwork


def rank(net: ReactionNetwork) -> int:
    """Exact rank of the stoichiometric matrix."""
    return ratmat.rank(net.stoich_matrix)


@dataclass(frozen=True)
class NontrivialityCertificate:
    """Verdict plus an exactly verifiable witness.

    Nontrivial: positive_kernel_vector v > 0 with Gamma v = 0.
    Trivial: stiemke_dual w with Gamma^T w >= 0 and Gamma^T w != 0.
    """

    verdict: bool
    positive_kernel_vector: Optional[Tuple[Fraction, ...]] = None
    stiemke_dual: Optional[Tuple[Fraction, ...]] = None

    def verify(self, net: ReactionNetwork) -> bool:
        gamma = [list(r) for r in net.stoich_matrix]
        if self.verdict:
            v = self.positive_kernel_vector
            if v is None or self.stiemke_dual is not None:
                return False
            if any(vi <= 0 for vi in v):
                return False
            return all(x == 0 for x in ratmat.mat_vec(gamma, v))
        w = self.stiemke_dual
        if w is None or self.positive_kernel_vector is not None:
            return False
        img = ratmat.mat_vec(ratmat.transpose(gamma), w)
        return all(x >= 0 for x in img) and any(x > 0 for x in img)


def kernel_vector_three_reactions(net: ReactionNetwork) -> Optional[Tuple[Fraction, ...]]:
    """For an m=3 rank-2 network, the kernel generator from the cross product
    of the first two independent rows of the stoichiometric matrix."""
    if net.num_reactions != 3 or rank(net) != 2:
        return None
    pq = ratmat.independent_row_pair(net.stoich_matrix)
    if pq is None:
        return None
    p, q = pq
    return tuple(ratmat.cross3(net.stoich_matrix[p], net.stoich_matrix[q]))


def dynamically_nontrivial(net: ReactionNetwork) -> NontrivialityCertificate:
    """Decide whether ker(Gamma) meets the open positive orthant.

    Fast path for three-reaction rank-2 networks via the cross-product
    kernel generator; a Fourier-Motzkin decision of {Gamma v = 0, v >= 1}
    otherwise.  Exactly one of the two systems (primal positive kernel /
    dual nonnegative image vector) is feasible, by Stiemke's theorem.
    """
    m = net.num_reactions
    u = kernel_vector_three_reactions(net)
    if u is not None:
        if all(x > 0 for x in u):
            return NontrivialityCertificate(True, positive_kernel_vector=u)
        if all(x < 0 for x in u):
            return NontrivialityCertificate(True, positive_kernel_vector=tuple(-x for x in u))
        # rank 2, kernel one-dimensional with a zero or sign change: trivial
        return NontrivialityCertificate(False, stiemke_dual=_stiemke_dual(net))
    v = _positive_kernel_fm(net)
    if v is not None:
        return NontrivialityCertificate(True, positive_kernel_vector=tuple(v))
    return NontrivialityCertificate(False, stiemke_dual=_stiemke_dual(net))


def _positive_kernel_fm(net: ReactionNetwork) -> Optional[List[Fraction]]:
    """Feasible point of {Gamma v = 0, v >= 1}, via exact elimination on a
    kernel basis (valid for the small m used here)."""
    basis = ratmat.nullspace(net.stoich_matrix)
    if not basis:
        return None
    m = net.num_reactions
    k = len(basis)
    # constraints: sum_j basis[j][i] t_j >= 1 for every reaction i
    constraints = [([basis[j][i] for j in range(k)], Fraction(1)) for i in range(m)]
    t = ratmat.fourier_motzkin_feasible(constraints, k)
    if t is None:
        return None
    v = [sum((basis[j][i] * t[j] for j in range(k)), Fraction(0)) for i in range(m)]
    assert all(x >= 1 for x in v)
    return v


def _stiemke_dual(net: ReactionNetwork) -> Tuple[Fraction, ...]:
    """Witness w with Gamma^T w >= 0, Gamma^T w != 0 for a trivial network."""
    n = net.num_species
    gt = ratmat.transpose(net.stoich_matrix)  # m x n
    # feasibility of {Gamma^T w >= 0, 1.(Gamma^T w) >= 1}
    constraints = [(list(row), Fraction(0)) for row in gt]
    total = [sum(col, Fraction(0)) for col in zip(*gt)]
    constraints.append((total, Fraction(1)))
    w = ratmat.fourier_motzkin_feasible(constraints, n)
    if w is None:
        raise AssertionError("Stiemke alternative failed; inconsistent verdict")
    return tuple(w)


class Orientation(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class SourceGeometry:
    """Affine geometry of the three source complexes."""

    collinear: bool
    orientation: Orientation                      # planar triples only
    pair_orientation_scalars: Tuple[Tuple[int, int, Fraction], ...]
    # (i, j, value of 1.(a_i x a_j)) for species row pairs i < j


def source_geometry(net: ReactionNetwork) -> SourceGeometry:
    """Requires m = 3.  Collinearity is affine dependence of the sources;
    the planar orientation is the sign of the edge-matrix determinant."""
    if net.num_reactions != 3:
        raise ValueError("source geometry is defined for three-reaction networks")
    n = net.num_species
    srcs = [net.source_of(j).coefficients for j in range(3)]
    edge1 = [srcs[1][i] - srcs[0][i] for i in range(n)]
    edge2 = [srcs[2][i] - srcs[0][i] for i in range(n)]
    collinear = ratmat.rank([edge1, edge2]) < 2
    orientation = Orientation.DEGENERATE
    if n == 2 and not collinear:
        d = edge1[0] * edge2[1] - edge1[1] * edge2[0]
        orientation = Orientation.POSITIVE if d > 0 else Orientation.NEGATIVE
    scalars = []
    rows = [list(net.source_matrix[i]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            cr = ratmat.cross3(rows[i], rows[j])
            scalars.append((i, j, Fraction(sum(cr))))
    return SourceGeometry(collinear, orientation, tuple(scalars))


def positive_divergence_reactions(net: ReactionNetwork) -> List[int]:
    """Reactions of the form 2X_j -> (2+c_j)X_j + sum c_i X_i with c_j > 0
    and c_i >= 0 for i != j; the only reactions whose Dulac-rescaled field
    contributes positive divergence."""
    out = []
    for j in range(net.num_reactions):
        src = net.source_of(j).coefficients
        if sorted(src, reverse=True)[:1] != [2] or sum(src) != 2:
            continue
        sp = src.index(2)
        col = [net.stoich_matrix[i][j] for i in range(net.num_species)]
        if col[sp] > 0 and all(col[i] >= 0 for i in range(net.num_species) if i != sp):
            out.append(j)
    return out


class DivergenceClass(Enum):
    NEGATIVE_EVERYWHERE = "NegativeEverywhere"
    IDENTICALLY_ZERO = "IdenticallyZero"
    INDEFINITE = "Indefinite"


def dulac_divergence_class(net: ReactionNetwork) -> DivergenceClass:
    """Sign of the divergence of the field rescaled by 1/(x_1...x_n).

    Per species j and reaction, the contribution sign is the sign of
    c_j (a_j - 1): zero when a_j = 1 or c_j = 0, positive only for the
    reactions found by positive_divergence_reactions, negative otherwise.
    """
    if positive_divergence_reactions(net):
        return DivergenceClass.INDEFINITE
    any_negative = False
    for j in range(net.num_reactions):
        for i in range(net.num_species):
            c = net.stoich_matrix[i][j]
            a = net.source_matrix[i][j]
            if c != 0 and a != 1:
                s = c * (a - 1)
                if s > 0:
                    return DivergenceClass.INDEFINITE
                any_negative = True
    return DivergenceClass.NEGATIVE_EVERYWHERE if any_negative else DivergenceClass.IDENTICALLY_ZERO


@dataclass(frozen=True)
class LotkaVolterraForm:
    """RHS written as x_j (r_j + sum_{k != j} b_jk x_k), when possible."""

    r: Tuple[Fraction, ...]
    b: Tuple[Tuple[Fraction, ...], ...]   # zero diagonal
    conditions: Tuple[Tuple[str, bool], ...]


def lotka_volterra_form(sys: MassActionSystem) -> Optional[LotkaVolterraForm]:
    """Detect a Lotka-Volterra equation with no diagonal term.

    Requires every reaction to satisfy: species j changes only if its source
    coefficient is exactly 1, and the source molecularity involving species
    other than j is at most linear (so dx_j/dt = x_j * affine form).
    Reports the paper-of-record side conditions for n = 2 and n = 3.
    """
    net = sys.network
    n = net.num_species
    r = [Fraction(0)] * n
    b = [[Fraction(0)] * n for _ in range(n)]
    for j in range(net.num_reactions):
        src = net.source_of(j).coefficients
        kap = sys.kappa[j]
        for i in range(n):
            c = net.stoich_matrix[i][j]
            if c == 0:
                continue
            if src[i] != 1:
                return None   # diagonal term x_i^2 or source without x_i
            others = [(k, src[k]) for k in range(n) if k != i and src[k] != 0]
            if not others:
                r[i] += c * kap
            elif len(others) == 1 and others[0][1] == 1:
                k = others[0][0]
                b[i][k] += c * kap
            else:
                return None   # higher than bilinear in dx_i/dt
    conds: List[Tuple[str, bool]] = []
    if n == 2:
        conds = [
            ("r1*r2 < 0", r[0] * r[1] < 0),
            ("r1*b12 < 0", r[0] * b[0][1] < 0),
            ("r2*b21 < 0", r[1] * b[1][0] < 0),
        ]
    elif n == 3:
        cyc = b[0][1] * b[1][2] * b[2][0] + b[0][2] * b[1][0] * b[2][1]
        conds = [
            ("b12*b13 < 0", b[0][1] * b[0][2] < 0),
            ("b21*b23 < 0", b[1][0] * b[1][2] < 0),
            ("b31*b32 < 0", b[2][0] * b[2][1] < 0),
            ("b12*b23*b31 + b13*b21*b32 = 0", cyc == 0),
        ]
    return LotkaVolterraForm(tuple(r), tuple(tuple(row) for row in b), tuple(conds))
