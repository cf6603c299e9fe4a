"""Positive equilibria: closed-form planar solve, class-restricted Newton,
and symbolic equilibrium rays for the named families.

The planar three-reaction case is solved in log space (the source matrix
acts linearly on logarithms); solutions are re-verified in rational
arithmetic when they round to small fractions, so the fixture systems come
out exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import ratmat
from .network import MassActionSystem, mass_action_rhs
from .stoich import dynamically_nontrivial, kernel_vector_three_reactions, source_geometry

Number = Union[int, float, Fraction]


class SourcesCollinear(ValueError):
    """The sources are affinely dependent; the log-linear system is singular."""


class NoPositiveEquilibrium(ValueError):
    """The system admits no positive equilibrium (dynamically trivial input)."""


def equilibrium_scaling(sys: MassActionSystem, x: Sequence[Number]) -> Tuple[Number, Tuple[Number, ...]]:
    """(mu, u) with kappa o x^(Gamma_l^T) = mu u at an equilibrium x,
    where u is the kernel generator from the first independent row pair.

    mu is computed as the projection of the reaction-rate vector onto u,
    which is exact at exact equilibria and least-squares-fair at numerically
    converged ones."""
    from .network import reaction_rates

    u = kernel_vector_three_reactions(sys.network)
    if u is None:
        raise ValueError("equilibrium scaling requires an (n, 3, 2) network")
    rates = reaction_rates(sys, x)
    exact = sys.is_exact and all(isinstance(xi, (int, Fraction)) for xi in x)
    if exact:
        num = sum(r * ui for r, ui in zip(rates, u))
        den = sum(ui * ui for ui in u)
        mu = num / den
    else:
        rates = [float(r) for r in rates]
        uf = [float(v) for v in u]
        mu = sum(r * v for r, v in zip(rates, uf)) / sum(v * v for v in uf)
    return mu, tuple(u)


@dataclass(frozen=True)
class EquilibriumRecord:
    """Positive equilibrium with its kernel data and class membership."""

    x_bar: Tuple[Number, ...]
    mu: Number
    u: Tuple[Number, ...]
    class_constants: Optional[Tuple[Number, ...]] = None
    degenerate: bool = False
    exact: bool = False


def planar_equilibrium(sys: MassActionSystem) -> Optional[EquilibriumRecord]:
    """Unique positive equilibrium of a (2, 3, 2) system with affinely
    independent sources, via the 3x3 log-linear solve

        a_i log x + b_i log y + log kappa_i = log mu + log u_i.

    Raises SourcesCollinear / NoPositiveEquilibrium on the degenerate inputs.
    """
    net = sys.network
    if net.num_species != 2 or net.num_reactions != 3:
        raise ValueError("planar_equilibrium requires a (2, 3, r) system")
    if ratmat.rank(net.stoich_matrix) != 2:
        raise NoPositiveEquilibrium("rank below two")
    if source_geometry(net).collinear:
        raise SourcesCollinear("source complexes are affinely dependent")
    cert = dynamically_nontrivial(net)
    if not cert.verdict:
        raise NoPositiveEquilibrium("dynamically trivial network")
    u = kernel_vector_three_reactions(net)
    sgn = 1 if u[0] > 0 else -1
    A = np.array([[net.source_matrix[0][j], net.source_matrix[1][j], -1.0] for j in range(3)])
    rhs = np.array([math.log(abs(float(u[j]))) - math.log(float(sys.kappa[j])) for j in range(3)])
    sol = np.linalg.solve(A, rhs)
    x = (math.exp(sol[0]), math.exp(sol[1]))
    rec = _rationalize_planar(sys, x, sgn, u)
    if rec is not None:
        return rec
    mu = sgn * math.exp(sol[2])
    return EquilibriumRecord(x_bar=x, mu=mu, u=tuple(u), exact=False)


def _rationalize_planar(sys, x, sgn, u) -> Optional[EquilibriumRecord]:
    """Try to promote a float solution to an exact rational equilibrium."""
    if not sys.is_exact:
        return None
    cand = tuple(Fraction(xi).limit_denominator(10 ** 9) for xi in x)
    if any(c <= 0 for c in cand):
        return None
    net = sys.network
    mus = []
    for j in range(3):
        rate = sys.kappa[j] * cand[0] ** net.source_matrix[0][j] * cand[1] ** net.source_matrix[1][j]
        if u[j] == 0:
            return None
        mus.append(Fraction(rate) / u[j])
    if mus[0] == mus[1] == mus[2]:
        # also require the candidate to be close to the float solution
        if all(abs(float(c) - xi) <= 1e-6 * (1 + abs(xi)) for c, xi in zip(cand, x)):
            return EquilibriumRecord(x_bar=cand, mu=mus[0], u=tuple(u), exact=True)
    return None


@dataclass(frozen=True)
class StoichiometricClass:
    """An affine slice x0 + im(Gamma) described by conserved-quantity values.

    `conservations` are the rows w with w^T Gamma = 0 (a basis of the left
    kernel); `values` are the required w . x."""

    basis: Tuple[Tuple[Fraction, ...], ...]          # columns spanning im Gamma
    conservations: Tuple[Tuple[Fraction, ...], ...]  # left-kernel rows
    values: Tuple[float, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)


def stoichiometric_class(net, values: Sequence[Number]) -> StoichiometricClass:
    """Class of the network with the given conserved-quantity values, in the
    basis produced by the left nullspace of Gamma (deterministic order)."""
    cons = ratmat.left_nullspace(net.stoich_matrix)
    if len(values) != len(cons):
        raise ValueError(f"expected {len(cons)} conserved values, got {len(values)}")
    cols = ratmat.transpose(net.stoich_matrix)
    basis: List[List[Fraction]] = []
    for col in cols:
        trial = basis + [list(map(Fraction, col))]
        if ratmat.rank(trial) > len(basis):
            basis.append(list(map(Fraction, col)))
    return StoichiometricClass(
        basis=tuple(tuple(b) for b in basis),
        conservations=tuple(tuple(w) for w in cons),
        values=tuple(float(v) for v in values),
    )


def class_of_point(net, x: Sequence[Number]) -> StoichiometricClass:
    cons = ratmat.left_nullspace(net.stoich_matrix)
    vals = [float(sum(float(w[i]) * float(x[i]) for i in range(net.num_species))) for w in cons]
    return stoichiometric_class(net, vals)


@dataclass
class ClassSolverOptions:
    starts_per_axis: int = 32
    grid_lo: float = 1e-3
    grid_hi: float = 1e3
    tol: float = 1e-12
    max_iter: int = 80
    dedup_tol: float = 1e-9
    degenerate_tol: float = 1e-6
    # Newton stalls within ~sqrt(tol) of a double root, so near-singular
    # clusters merge at a radius well above that stagnation scale
    degenerate_merge_tol: float = 1e-4
    boundary_tol: float = 1e-8   # roots this close to the boundary are
                                 # boundary equilibria, not positive ones


def equilibria_on_class(
    sys: MassActionSystem,
    cls: StoichiometricClass,
    opts: Optional[ClassSolverOptions] = None,
) -> List[EquilibriumRecord]:
    """All isolated positive equilibria on a stoichiometric class, by damped
    Newton from a deterministic log-uniform start grid in class coordinates.

    Near-coincident roots whose restricted Jacobian is numerically singular
    are merged and flagged degenerate (non-isolation cannot be excluded).
    """
    opts = opts or ClassSolverOptions()
    net = sys.network
    n = net.num_species
    r = ratmat.rank(net.stoich_matrix)
    cons = [[float(v) for v in w] for w in cls.conservations]
    values = list(cls.values)
    # free species: choose r columns such that the conservation submatrix on
    # the remaining species is invertible; dependent species are eliminated.
    free, dep, dep_solve = _split_coordinates(cls, n)
    kap = [float(k) for k in sys.kappa]
    fsys = sys.with_kappa(kap)

    def embed(freevals: np.ndarray) -> Optional[np.ndarray]:
        x = np.zeros(n)
        x[free] = freevals
        rhs = np.array(values) - np.array(cons)[:, free] @ freevals if cons else np.zeros(0)
        if dep:
            x[dep] = dep_solve @ rhs
        return x

    # Newton on the r row-basis components of the RHS (they vanish iff all do)
    rows = _row_basis(net, r)

    def F(x: np.ndarray) -> np.ndarray:
        f = mass_action_rhs(fsys, list(x))
        return np.array([float(f[i]) for i in rows])

    def JF(x: np.ndarray) -> np.ndarray:
        from .jacobian import jacobian_at
        J = np.array([[float(v) for v in row] for row in jacobian_at(fsys, list(np.maximum(x, 1e-300)))])
        M = np.zeros((r, len(free)))
        for a, i in enumerate(rows):
            for b, k in enumerate(free):
                M[a, b] = J[i, k]
                for c, dk in enumerate(dep):
                    M[a, b] += J[i, dk] * _dep_sensitivity(dep_solve, cons, c, k)
        return M

    grid = np.geomspace(opts.grid_lo, opts.grid_hi, opts.starts_per_axis)
    roots: List[np.ndarray] = []
    for start in itertools.product(grid, repeat=len(free)):
        xf = np.array(start, dtype=float)
        x = embed(xf)
        if x is None or np.any(x <= 0):
            continue
        ok = False
        for _ in range(opts.max_iter):
            fx = F(x)
            scale = max(1.0, float(np.max(np.abs(x))))
            if np.max(np.abs(fx)) < opts.tol * scale:
                ok = True
                break
            try:
                step = np.linalg.lstsq(JF(x), -fx, rcond=None)[0]
            except np.linalg.LinAlgError:
                break
            lam = 1.0
            improved = False
            base = np.linalg.norm(fx)
            for _ in range(30):
                xf_new = xf + lam * step
                x_new = embed(xf_new)
                if x_new is not None and np.all(x_new > 0):
                    if np.linalg.norm(F(x_new)) < base:
                        xf, x = xf_new, x_new
                        improved = True
                        break
                lam *= 0.5
            if not improved:
                break
        if ok and np.all(x > opts.boundary_tol * max(1.0, float(np.max(np.abs(x))))):
            roots.append(x.copy())
    return _dedup_roots(fsys, cls, roots, opts)


def _split_coordinates(cls: StoichiometricClass, n: int):
    cons = [[float(v) for v in w] for w in cls.conservations]
    k = len(cons)
    if k == 0:
        return list(range(n)), [], None
    best = None
    for dep in itertools.combinations(range(n), k):
        sub = np.array([[cons[a][i] for i in dep] for a in range(k)])
        if abs(np.linalg.det(sub)) > 1e-12:
            best = dep
            break
    if best is None:
        raise ValueError("conservation rows are degenerate")
    dep = list(best)
    free = [i for i in range(n) if i not in dep]
    sub = np.array([[cons[a][i] for i in dep] for a in range(k)])
    return free, dep, np.linalg.inv(sub)


def _dep_sensitivity(dep_solve, cons, c, k):
    # d(dep_c)/d(free_k) = -(inv(sub) @ cons[:, k])_c
    col = np.array([row[k] for row in cons])
    return float(-(dep_solve @ col)[c])


def _row_basis(net, r: int) -> List[int]:
    rows: List[int] = []
    acc: List[List[Fraction]] = []
    for i in range(net.num_species):
        trial = acc + [list(map(Fraction, net.stoich_matrix[i]))]
        if ratmat.rank(trial) > len(acc):
            acc.append(trial[-1])
            rows.append(i)
        if len(rows) == r:
            break
    return rows


def _dedup_roots(fsys, cls, roots, opts: ClassSolverOptions) -> List[EquilibriumRecord]:
    from .jacobian import jacobian_at

    merged: List[List[np.ndarray]] = []
    for x in sorted(roots, key=lambda v: tuple(v)):
        placed = False
        for group in merged:
            ref = group[0]
            scale = max(1.0, float(np.max(np.abs(ref))))
            if np.max(np.abs(x - ref)) < opts.dedup_tol * scale:
                group.append(x)
                placed = True
                break
        if not placed:
            merged.append([x])
    # second pass: clusters closer than degenerate_tol with near-singular
    # restricted Jacobian collapse into one flagged root (fold points)
    reps = [np.mean(np.array(g), axis=0) for g in merged]
    singular = [_restricted_singular(fsys, x, opts) for x in reps]
    out_points: List[Tuple[np.ndarray, bool]] = []
    used = [False] * len(reps)
    order = sorted(range(len(reps)), key=lambda i: tuple(reps[i]))
    for i in order:
        if used[i]:
            continue
        cluster = [reps[i]]
        flag = singular[i]
        for j in order:
            if j == i or used[j]:
                continue
            scale = max(1.0, float(np.max(np.abs(reps[i]))))
            if np.max(np.abs(reps[j] - reps[i])) < opts.degenerate_merge_tol * scale and (singular[i] or singular[j]):
                cluster.append(reps[j])
                used[j] = True
                flag = True
        used[i] = True
        out_points.append((np.mean(np.array(cluster), axis=0), flag))

    records = []
    for x, flag in sorted(out_points, key=lambda t: tuple(t[0])):
        mu = None
        u = None
        if fsys.network.num_reactions == 3 and ratmat.rank(fsys.network.stoich_matrix) == 2:
            try:
                mu, u = equilibrium_scaling(fsys, list(x))
            except ValueError:
                pass
        records.append(EquilibriumRecord(
            x_bar=tuple(float(v) for v in x),
            mu=float(mu) if mu is not None else float("nan"),
            u=tuple(float(v) for v in u) if u is not None else (),
            class_constants=tuple(cls.values),
            degenerate=flag,
        ))
    return records


def _restricted_singular(fsys, x, opts: ClassSolverOptions) -> bool:
    from .jacobian import jacobian_at

    net = fsys.network
    J = np.array([[float(v) for v in row] for row in jacobian_at(fsys, list(x))])
    B = np.array([[float(v) for v in col] for col in _im_basis(net)]).T
    M = np.linalg.lstsq(B, J @ B, rcond=None)[0]
    sv = np.linalg.svd(M, compute_uv=False)
    scale = max(1.0, sv[0])
    return bool(sv[-1] < opts.degenerate_tol * scale)


def _im_basis(net) -> List[List[Fraction]]:
    cols = ratmat.transpose(net.stoich_matrix)
    basis: List[List[Fraction]] = []
    for col in cols:
        trial = basis + [list(map(Fraction, col))]
        if ratmat.rank(trial) > len(basis):
            basis.append(list(map(Fraction, col)))
    return basis


def equilibrium_ray(family_tag, kappa: Sequence[Number]) -> Tuple[Tuple[Fraction, ...], str]:
    """Direction vector of the positive-equilibrium ray of a parametric family.

    Supported: LiftedLVA(d) -> (1, k1/k2, k2 d/k3) t, and
    ThreeSpeciesFamily(c, d) -> (k3 c d, k1 c, k2) t, each for t > 0.
    Every point t * direction satisfies the mass-action RHS exactly.
    """
    from .families import FamilyName

    k = [ratmat.frac(v) if not isinstance(v, float) else v for v in kappa]
    name = family_tag.name
    params = dict(family_tag.parameters)
    if name == FamilyName.LIFTED_LVA:
        d = params["d"]
        direction = (ratmat.frac(1), ratmat.frac(k[0]) / k[1], ratmat.frac(k[1]) * d / k[2])
        return direction, "t > 0"
    if name == FamilyName.THREE_SPECIES:
        c, d = params["c"], params["d"]
        direction = (ratmat.frac(k[2]) * c * d, ratmat.frac(k[0]) * c, ratmat.frac(k[1]))
        return direction, "t > 0"
    raise ValueError(f"no equilibrium ray for family {name}")
