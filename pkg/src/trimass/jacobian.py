"""Jacobians of mass-action systems and the rank-two reduced Jacobian.

The reduced Jacobian is the Jacobian viewed as a map on the stoichiometric
subspace; for three-reaction rank-two systems it has a closed form built from
the kernel generator u, the equilibrium scaling mu, and the factorization
Gamma = Gamma_tilde [c; d] over the first two independent rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from . import ratmat
from .network import MassActionSystem, monomial

Number = Union[int, float, Fraction]


def jacobian_at(sys: MassActionSystem, x: Sequence[Number]) -> List[List[Number]]:
    """Exact partial derivatives of the polynomial right-hand side at x > 0.

    Entry (i, k) is sum_j c_ij kappa_j a_kj x^(a_j - e_k); exact in rational
    arithmetic when x and kappa are rational.
    """
    net = sys.network
    n, m = net.num_species, net.num_reactions
    if any(xi <= 0 for xi in x):
        raise ValueError("jacobian_at requires a strictly positive state")
    J: List[List[Number]] = [[0] * n for _ in range(n)]
    for j in range(m):
        expo = [net.source_matrix[i][j] for i in range(n)]
        rate = sys.kappa[j] * monomial(x, expo)
        for k in range(n):
            if expo[k] == 0:
                continue
            d = rate * expo[k] / x[k]
            for i in range(n):
                c = net.stoich_matrix[i][j]
                if c != 0:
                    J[i][k] = J[i][k] + c * d
    return J


def gamma_tilde_factorization(net) -> Tuple[List[List[Fraction]], Tuple[int, int]]:
    """Factor Gamma = Gamma_tilde @ Gamma[[p, q], :] over the first
    independent row pair (p, q); rows p and q of Gamma_tilde form the
    identity.  Requires rank exactly 2."""
    if ratmat.rank(net.stoich_matrix) != 2:
        raise ValueError("reduced Jacobian requires a rank-two network")
    pq = ratmat.independent_row_pair(net.stoich_matrix)
    p, q = pq
    cd = [list(net.stoich_matrix[p]), list(net.stoich_matrix[q])]
    gt: List[List[Fraction]] = []
    for i in range(net.num_species):
        coeffs = ratmat.solve(ratmat.transpose(cd), net.stoich_matrix[i])
        gt.append([Fraction(coeffs[0]), Fraction(coeffs[1])])
    return gt, (p, q)


@dataclass(frozen=True)
class ReducedJacobian:
    """2x2 reduced Jacobian at an equilibrium, with its factorization data."""

    gamma_tilde: Tuple[Tuple[Fraction, Fraction], ...]
    row_basis: Tuple[int, int]
    matrix: Tuple[Tuple[float, float], Tuple[float, float]]
    det: float
    trace: float


def reduced_jacobian(sys: MassActionSystem, equilibrium) -> ReducedJacobian:
    """Reduced Jacobian of a three-reaction rank-two system at a positive
    equilibrium (an EquilibriumRecord or a bare state vector)."""
    x = getattr(equilibrium, "x_bar", equilibrium)
    net = sys.network
    if net.num_reactions != 3:
        raise ValueError("reduced Jacobian requires a three-reaction network")
    gt, (p, q) = gamma_tilde_factorization(net)
    J = jacobian_at(sys, x)
    # restricted map: coordinates xi with state = x + Gamma_tilde xi; because
    # rows (p, q) of Gamma_tilde are the identity, rows (p, q) of J Gamma_tilde
    # are exactly the coordinate representation of the restricted map.
    jg = [[sum(J[i][k] * gt[k][col] for k in range(net.num_species)) for col in range(2)]
          for i in range(net.num_species)]
    m00, m01 = jg[p][0], jg[p][1]
    m10, m11 = jg[q][0], jg[q][1]
    det = m00 * m11 - m01 * m10
    tr = m00 + m11
    return ReducedJacobian(
        gamma_tilde=tuple((row[0], row[1]) for row in gt),
        row_basis=(p, q),
        matrix=((float(m00), float(m01)), (float(m10), float(m11))),
        det=float(det),
        trace=float(tr),
    )


def reduced_det_formula(sys: MassActionSystem, equilibrium) -> float:
    """Closed-form reduced Jacobian determinant for (n, 3, 2) systems:

        mu |mu| |u1 u2 u3| * sum_{i<j} M_ij / (x_i x_j) * (1 . (a_i x a_j))

    where M_ij is the 2x2 minor of Gamma_tilde on rows (i, j) and a_i are the
    rows of the source matrix.  Must agree with reduced_jacobian().det.
    """
    from .equilibria import equilibrium_scaling

    x = getattr(equilibrium, "x_bar", equilibrium)
    net = sys.network
    gt, _ = gamma_tilde_factorization(net)
    mu, u = equilibrium_scaling(sys, x)
    n = net.num_species
    rows = [list(net.source_matrix[i]) for i in range(n)]
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            minor = gt[i][0] * gt[j][1] - gt[i][1] * gt[j][0]
            if minor == 0:
                continue
            orient = sum(ratmat.cross3(rows[i], rows[j]))
            if orient == 0:
                continue
            total += float(minor) * float(orient) / (float(x[i]) * float(x[j]))
    uprod = abs(float(u[0]) * float(u[1]) * float(u[2]))
    return float(mu) * abs(float(mu)) * uprod * total


def planar_trace(sys: MassActionSystem, equilibrium) -> float:
    """Trace of the Jacobian of a planar three-reaction system at equilibrium:

        mu (1/x sum a_i c_i u_i + 1/y sum b_i d_i u_i)
    """
    from .equilibria import equilibrium_scaling

    x = getattr(equilibrium, "x_bar", equilibrium)
    net = sys.network
    if net.num_species != 2 or net.num_reactions != 3:
        raise ValueError("planar trace requires a (2, 3, r) system")
    if ratmat.rank(net.stoich_matrix) != 2:
        raise ValueError("planar trace requires rank two")
    mu, u = equilibrium_scaling(sys, x)
    a = net.source_matrix[0]
    b = net.source_matrix[1]
    c = net.stoich_matrix[0]
    d = net.stoich_matrix[1]
    sx = sum(a[i] * c[i] * u[i] for i in range(3))
    sy = sum(b[i] * d[i] * u[i] for i in range(3))
    return float(mu) * (float(sx) / float(x[0]) + float(sy) / float(x[1]))


def is_saddle(rj: ReducedJacobian) -> bool:
    """Negative reduced determinant: one positive and one negative nontrivial
    eigenvalue."""
    return rj.det < 0


def nontrivial_eigenvalue_product(sys: MassActionSystem, x: Sequence[Number], r: int = 2,
                                  tol: float = 1e-9) -> complex:
    """Oracle helper: product of the r eigenvalues of largest magnitude of the
    full Jacobian (the eigenvalues associated with the stoichiometric
    subspace; the remaining n - r are zero for a rank-r network)."""
    import numpy as np

    J = np.array([[float(v) for v in row] for row in jacobian_at(sys, x)])
    eig = sorted(np.linalg.eigvals(J), key=abs, reverse=True)
    out = complex(1.0)
    for lam in eig[:r]:
        out *= lam
    return out
