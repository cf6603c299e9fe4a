"""Oscillation verdicts for planar three-reaction quadratic systems.

The ten configurations of non-collinear bimolecular source triples (up to
exchanging the two species) each carry exact integer conditions on the
stoichiometric columns deciding: no periodic orbit, a center for every rate
vector, a vertical bifurcation with a center at the critical rate ratio, or
a supercritical bifurcation with a stable limit cycle.  This module also
locates critical rate vectors numerically, evaluates the first focal value,
and checks the codimension-two residuals of the degenerate-equilibrium
fixture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .equilibria import EquilibriumRecord, planar_equilibrium
from .jacobian import jacobian_at, planar_trace, reduced_jacobian
from .network import MassActionSystem, ReactionNetwork, is_quadratic, network_from_reactions
from .stoich import dynamically_nontrivial, rank, source_geometry


class Verdict(Enum):
    NO_PERIODIC_ORBIT = "NoPeriodicOrbit"
    CENTER_FOR_ALL_KAPPA = "CenterForAllKappa"
    VERTICAL_HOPF = "VerticalHopf"
    SUPERCRITICAL_HOPF = "SupercriticalHopf"
    NO_ANDRONOV_HOPF = "NoAndronovHopf"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class PlanarVerdict:
    case_id: Optional[int]                      # 1..10, None when not applicable
    verdict: Verdict
    witness: Tuple[Tuple[str, bool], ...] = ()
    critical_relation: Optional[str] = None
    reason: Optional[str] = None


# source triples, as (a, b) exponent pairs; cases 7..10 are listed in the
# positively oriented order in which their conditions are stated
_CASE_SOURCES = {
    1: ((1, 0), (0, 1), (0, 0)),
    2: ((1, 0), (1, 1), (0, 0)),
    3: ((2, 0), (0, 1), (0, 0)),
    4: ((2, 0), (0, 1), (1, 0)),
    5: ((2, 0), (0, 2), (0, 0)),
    6: ((2, 0), (0, 2), (1, 0)),
    7: ((1, 0), (1, 1), (0, 1)),
    8: ((2, 0), (1, 1), (1, 0)),
    9: ((2, 0), (1, 1), (0, 1)),
    10: ((2, 0), (1, 1), (0, 0)),
}


def _normalizations(net: ReactionNetwork):
    """(case_id, swap, reaction order) triples placing the sources in the
    listed order of their case; empty when the sources are collinear or
    repeat."""
    srcs = [net.source_of(j).coefficients for j in range(3)]
    if len(set(srcs)) < 3 or source_geometry(net).collinear:
        return []
    out = []
    for case_id, listed in _CASE_SOURCES.items():
        for swap in (False, True):
            view = [(b, a) if swap else (a, b) for (a, b) in srcs]
            if set(view) != set(listed):
                continue
            order = tuple(view.index(s) for s in listed)
            out.append((case_id, swap, order))
    return out


def source_case(net: ReactionNetwork) -> Optional[int]:
    """Which of the ten non-collinear bimolecular source configurations the
    network realizes (up to exchanging the species); None when collinear."""
    if net.num_species != 2 or net.num_reactions != 3:
        raise ValueError("source_case requires a (2, 3, r) network")
    if not is_quadratic(net):
        raise ValueError("source_case requires bimolecular sources")
    norms = _normalizations(net)
    return norms[0][0] if norms else None


def _columns_in_order(net: ReactionNetwork, swap: bool, order: Sequence[int]):
    c = [net.stoich_matrix[0][j] for j in order]
    d = [net.stoich_matrix[1][j] for j in order]
    return (d, c) if swap else (c, d)


def _case7_conditions(c, d):
    sgn = lambda v: (v > 0) - (v < 0)
    chain = sgn(c[0]) != 0 and sgn(c[0]) == -sgn(c[1]) == -sgn(d[2]) == sgn(d[1])
    return [
        ("c3 = 0", c[2] == 0),
        ("d1 = 0", d[0] == 0),
        ("sgn c1 = -sgn c2 = -sgn d3 = sgn d2 != 0", chain),
    ]


def _case8_conditions(c, d):
    base = [
        ("c1 > 0", c[0] > 0), ("c2 = -1", c[1] == -1), ("c3 > 0", c[2] > 0),
        ("d1 > 0", d[0] > 0), ("d2 = -1", d[1] == -1), ("d3 >= 0", d[2] >= 0),
    ]
    if all(v for _, v in base):
        base.append(("d3/c3 < 1 < d1/c1",
                     Fraction(d[2], c[2]) < 1 < Fraction(d[0], c[0])))
    else:
        base.append(("d3/c3 < 1 < d1/c1", False))
    return base


def _case9_conditions(c, d):
    common = [
        ("c1 > 0", c[0] > 0), ("c2 = -1", c[1] == -1),
        ("d1 > 0", d[0] > 0), ("d2 >= -1", d[1] >= -1),
    ]
    sub_i = common + [("c3 > 0", c[2] > 0), ("d3 >= -1", d[2] >= -1)]
    if all(v for _, v in sub_i):
        mid = Fraction(d[2], c[2]) + Fraction(d[0], c[0])
        sub_i.append(("(d3/c3 + d1/c1)/2 < d2/c2 < d1/c1",
                      mid / 2 < Fraction(d[1], c[1]) < Fraction(d[0], c[0])))
    else:
        sub_i.append(("(d3/c3 + d1/c1)/2 < d2/c2 < d1/c1", False))
    sub_ii = common + [("c3 = 0", c[2] == 0), ("d3 = -1", d[2] == -1)]
    if all(v for _, v in sub_ii):
        sub_ii.append(("d2/c2 < d1/c1",
                       Fraction(d[1], c[1]) < Fraction(d[0], c[0])))
    else:
        sub_ii.append(("d2/c2 < d1/c1", False))
    return sub_i, sub_ii


def _case10_conditions(c, d):
    base = [
        ("c1 > 0", c[0] > 0), ("c2 = -1", c[1] == -1), ("c3 > 0", c[2] > 0),
        ("d1 > 0", d[0] > 0), ("d2 = -1", d[1] == -1), ("d3 >= 0", d[2] >= 0),
    ]
    if all(v for _, v in base):
        mid = Fraction(d[2], c[2]) + Fraction(d[0], c[0])
        base.append(("(d3/c3 + d1/c1)/2 < d2/c2 < d1/c1",
                     mid / 2 < Fraction(d[1], c[1]) < Fraction(d[0], c[0])))
    else:
        base.append(("(d3/c3 + d1/c1)/2 < d2/c2 < d1/c1", False))
    return base


def theorem_verdict_planar(net: ReactionNetwork) -> PlanarVerdict:
    """Exact oscillation verdict for a planar three-reaction quadratic
    network, decided case by case on the source configuration.

    Cases failing the bifurcation inequalities in the two supercritical
    configurations return NoAndronovHopf: limit cycles without a bifurcation
    are not excluded there, so no stronger claim is made.
    """
    if net.num_species != 2 or net.num_reactions != 3:
        raise ValueError("planar verdict requires a (2, 3, r) network")
    if not is_quadratic(net):
        raise ValueError("planar verdict requires bimolecular sources")
    if rank(net) != 2:
        return PlanarVerdict(None, Verdict.NO_PERIODIC_ORBIT, reason="rank != 2")
    if not dynamically_nontrivial(net).verdict:
        return PlanarVerdict(None, Verdict.NO_PERIODIC_ORBIT, reason="dynamically trivial")
    norms = _normalizations(net)
    if not norms:
        return PlanarVerdict(None, Verdict.NO_PERIODIC_ORBIT, reason="sources on a line")
    case_id = norms[0][0]
    if case_id <= 6:
        return PlanarVerdict(case_id, Verdict.NO_PERIODIC_ORBIT,
                             reason="source configuration admits no periodic orbit")
    best_witness: Tuple[Tuple[str, bool], ...] = ()
    for cid, swap, order in norms:
        c, d = _columns_in_order(net, swap, order)
        if cid == 7:
            conds = _case7_conditions(c, d)
            if all(v for _, v in conds):
                return PlanarVerdict(7, Verdict.CENTER_FOR_ALL_KAPPA, tuple(conds))
            best_witness = best_witness or tuple(conds)
        elif cid == 8:
            conds = _case8_conditions(c, d)
            if all(v for _, v in conds):
                return PlanarVerdict(8, Verdict.VERTICAL_HOPF, tuple(conds),
                                     critical_relation=f"{c[0]}*kappa1 - kappa2 = 0")
            best_witness = best_witness or tuple(conds)
        elif cid == 9:
            sub_i, sub_ii = _case9_conditions(c, d)
            for conds in (sub_i, sub_ii):
                if all(v for _, v in conds):
                    return PlanarVerdict(9, Verdict.SUPERCRITICAL_HOPF, tuple(conds),
                                         critical_relation="trace of Jacobian = 0")
            best_witness = best_witness or tuple(sub_i + sub_ii)
        elif cid == 10:
            conds = _case10_conditions(c, d)
            if all(v for _, v in conds):
                return PlanarVerdict(10, Verdict.SUPERCRITICAL_HOPF, tuple(conds),
                                     critical_relation="trace of Jacobian = 0")
            best_witness = best_witness or tuple(conds)
    if case_id == 7:
        return PlanarVerdict(7, Verdict.NO_PERIODIC_ORBIT, best_witness,
                             reason="center conditions violated")
    if case_id == 8:
        return PlanarVerdict(8, Verdict.NO_PERIODIC_ORBIT, best_witness,
                             reason="periodic-orbit conditions violated")
    return PlanarVerdict(case_id, Verdict.NO_ANDRONOV_HOPF, best_witness,
                         reason="bifurcation inequalities violated; cycles not excluded")


def planar_hopf_census(case_id: int, max_target_molecularity: int) -> List[Tuple[ReactionNetwork, PlanarVerdict]]:
    """All networks on the given source configuration with targets up to the
    molecularity bound, with their verdicts.  Deterministic order."""
    srcs = _CASE_SOURCES[case_id]
    per_source_targets = []
    for (a, b) in srcs:
        opts = []
        for ta in range(max_target_molecularity + 1):
            for tb in range(max_target_molecularity + 1 - ta):
                if (ta, tb) != (a, b):
                    opts.append((ta, tb))
        per_source_targets.append(opts)
    out = []
    for t1 in per_source_targets[0]:
        for t2 in per_source_targets[1]:
            for t3 in per_source_targets[2]:
                net = network_from_reactions(list(zip(srcs, (t1, t2, t3))))
                out.append((net, theorem_verdict_planar(net)))
    return out


@dataclass(frozen=True)
class HopfPoint:
    kappa_star: Tuple[float, ...]
    equilibrium: EquilibriumRecord
    trace_residual: float
    det_value: float
    lyapunov_coefficient: float
    classification: str                   # supercritical / subcritical / degenerate


@dataclass(frozen=True)
class KappaPath:
    """One-parameter rate path: each component is a constant or a multiple
    of the path parameter t."""

    coefficients: Tuple[Tuple[float, float], ...]   # kappa_i = a_i + b_i t
    description: str = ""

    def __call__(self, t: float) -> Tuple[float, ...]:
        return tuple(a + b * t for a, b in self.coefficients)

    @staticmethod
    def parse(spec: str) -> "KappaPath":
        """Parse forms like "k1=t,k2=1,k3=2*t" (components in order)."""
        coeffs = {}
        for part in spec.split(","):
            lhs, rhs = part.split("=")
            idx = int(lhs.strip().lstrip("k")) - 1
            rhs = rhs.strip()
            if rhs == "t":
                coeffs[idx] = (0.0, 1.0)
            elif "*" in rhs:
                num, sym = rhs.split("*")
                if sym.strip() != "t":
                    raise ValueError(f"bad path component {part!r}")
                coeffs[idx] = (0.0, float(num))
            else:
                coeffs[idx] = (float(rhs), 0.0)
        m = max(coeffs) + 1
        if set(coeffs) != set(range(m)):
            raise ValueError("path must give every rate constant")
        return KappaPath(tuple(coeffs[i] for i in range(m)), spec)


def _trace_on_path(net: ReactionNetwork, path: KappaPath, t: float) -> Optional[Tuple[float, EquilibriumRecord]]:
    kappa = path(t)
    if any(k <= 0 for k in kappa):
        return None
    sys = MassActionSystem(net, kappa)
    try:
        eq = planar_equilibrium(sys)
    except ValueError:
        return None
    return planar_trace(sys, eq), eq


def find_hopf_point(
    net: ReactionNetwork,
    path: KappaPath,
    t_range: Tuple[float, float],
    samples: int = 64,
    tol_factor: float = 1e-12,
) -> Optional[HopfPoint]:
    """Locate trace = 0 along a one-parameter rate path by bracketing and
    bisection, then verify positivity of the determinant and evaluate the
    first focal value.  None when the trace does not change sign."""
    lo, hi = t_range
    ts = np.geomspace(lo, hi, samples) if lo > 0 else np.linspace(lo, hi, samples)
    vals = []
    for t in ts:
        res = _trace_on_path(net, path, float(t))
        if res is not None:
            vals.append((float(t), res[0]))
    bracket = None
    for (t0, f0), (t1, f1) in zip(vals, vals[1:]):
        if f0 == 0.0:
            bracket = (t0, t0)
            break
        if f0 * f1 < 0:
            bracket = (t0, t1)
            break
    if bracket is None:
        return None
    t0, t1 = bracket
    f0 = _trace_on_path(net, path, t0)[0]
    for _ in range(200):
        tm = 0.5 * (t0 + t1)
        res = _trace_on_path(net, path, tm)
        if res is None:
            break
        fm = res[0]
        if f0 * fm <= 0:
            t1 = tm
        else:
            t0, f0 = tm, fm
        if t1 - t0 <= 1e-16 * max(1.0, abs(t1)):
            break
    t_star = 0.5 * (t0 + t1)
    kappa = path(t_star)
    sys = MassActionSystem(net, kappa)
    eq = planar_equilibrium(sys)
    tr = planar_trace(sys, eq)
    rj = reduced_jacobian(sys, eq)
    omega_scale = math.sqrt(abs(rj.det)) if rj.det != 0 else 1.0
    if rj.det <= 0:
        return None
    L1, classification = first_lyapunov_coefficient(sys, eq)
    return HopfPoint(
        kappa_star=tuple(float(k) for k in kappa),
        equilibrium=eq,
        trace_residual=abs(tr),
        det_value=rj.det,
        lyapunov_coefficient=L1,
        classification=classification,
    )


def _partial_tensors(sys: MassActionSystem, x: Sequence[float]):
    """Exact 2nd and 3rd partial-derivative tensors of the rescaled field
    u -> D^-1 F(xbar o (1 + u)) at u = 0 (D = diag(xbar)).

    For the monomial x^e the rescaled partials collapse to falling-factorial
    coefficients times kappa x^e, so no finite differencing is involved."""
    net = sys.network
    n = net.num_species
    H = np.zeros((n, n, n))
    T3 = np.zeros((n, n, n, n))
    xf = [float(v) for v in x]
    for j in range(net.num_reactions):
        expo = [net.source_matrix[i][j] for i in range(n)]
        rate = float(sys.kappa[j])
        for i, e in enumerate(expo):
            rate *= xf[i] ** e
        col = [net.stoich_matrix[i][j] for i in range(n)]
        for a in range(n):
            for b in range(n):
                coef2 = expo[a] * (expo[b] - (1 if b == a else 0))
                if coef2:
                    for i in range(n):
                        if col[i]:
                            H[i, a, b] += col[i] * rate * coef2 / xf[i]
                for cidx in range(n):
                    coef3 = expo[a] * (expo[b] - (1 if b == a else 0)) * (
                        expo[cidx] - (1 if cidx == a else 0) - (1 if cidx == b else 0))
                    if coef3:
                        for i in range(n):
                            if col[i]:
                                T3[i, a, b, cidx] += col[i] * rate * coef3 / xf[i]
    return H, T3


def _affine_after_division(net: ReactionNetwork) -> Optional[int]:
    """Species k such that every source contains X_k and the field divided by
    x_k is affine (all sources bimolecular): the structurally vertical case."""
    if not is_quadratic(net):
        return None
    for k in range(net.num_species):
        if all(net.source_matrix[k][j] >= 1 for j in range(net.num_reactions)):
            return k
    return None


def first_lyapunov_coefficient(
    sys: MassActionSystem,
    equilibrium,
    degeneracy_tol: float = 1e-10,
) -> Tuple[float, str]:
    """Dimensionless first focal value at a trace-zero positive equilibrium.

    The state is rescaled by the equilibrium, the linear part is brought to
    rotation form [[0, -w], [w, 0]] with the deterministic basis (e1, J e1/w),
    and the standard planar expression in second and third partials is
    evaluated.  Negative means supercritical (a stable limit cycle is born);
    a structurally linear field after division by a species coordinate
    overrides to exactly zero (vertical).
    """
    x = getattr(equilibrium, "x_bar", equilibrium)
    net = sys.network
    if net.num_species != 2:
        raise ValueError("first focal value is defined for planar systems")
    if _affine_after_division(net) is not None:
        return 0.0, "degenerate/vertical"
    xf = [float(v) for v in x]
    J = np.array([[float(v) for v in row] for row in jacobian_at(sys, xf)])
    # rescale: u = (x - xbar)/xbar
    D = np.diag(xf)
    Jt = np.linalg.inv(D) @ J @ D
    det = float(np.linalg.det(Jt))
    tr = float(np.trace(Jt))
    if det <= 0:
        raise ValueError("first focal value requires positive determinant")
    omega = math.sqrt(det)
    if abs(tr) > 1e-6 * omega:
        raise ValueError("first focal value requires trace zero")
    H, T3 = _partial_tensors(sys, xf)
    # bring the linear part to rotation form
    Tmat = np.array([[1.0, Jt[0, 0] / omega], [0.0, Jt[1, 0] / omega]])
    Tinv = np.linalg.inv(Tmat)

    def q2(i, a, b):
        return sum(
            Tinv[i, ii] * H[ii, aa, bb] * Tmat[aa, a] * Tmat[bb, b]
            for ii in range(2) for aa in range(2) for bb in range(2)
        )

    def q3(i, a, b, c):
        return sum(
            Tinv[i, ii] * T3[ii, aa, bb, cc] * Tmat[aa, a] * Tmat[bb, b] * Tmat[cc, c]
            for ii in range(2) for aa in range(2) for bb in range(2) for cc in range(2)
        )

    fxx, fxy, fyy = q2(0, 0, 0), q2(0, 0, 1), q2(0, 1, 1)
    gxx, gxy, gyy = q2(1, 0, 0), q2(1, 0, 1), q2(1, 1, 1)
    fxxx, fxyy = q3(0, 0, 0, 0), q3(0, 0, 1, 1)
    gxxy, gyyy = q3(1, 0, 0, 1), q3(1, 1, 1, 1)
    sixteen_a = (
        fxxx + fxyy + gxxy + gyyy
        + (fxy * (fxx + fyy) - gxy * (gxx + gyy) - fxx * gxx + fyy * gyy) / omega
    )
    a = sixteen_a / 16.0
    if abs(a) < degeneracy_tol:
        return a, "degenerate/vertical"
    return a, ("supercritical" if a < 0 else "subcritical")


def octo_fixture() -> ReactionNetwork:
    """The conclusions-section codimension-two example: 2X -> 4X + 3Y + Z,
    X + Y -> 0, Z -> X."""
    return network_from_reactions([
        ((2, 0, 0), (4, 3, 1)),
        ((1, 1, 0), (0, 0, 0)),
        ((0, 0, 1), (1, 0, 0)),
    ])


def bogdanov_takens_residual(kappa2: float, C: float) -> Tuple[float, float]:
    """|trace| and |det| of the reduced Jacobian of the codimension-two
    fixture at the prescribed critical rates

        (kappa1, kappa3) = kappa2 ((3 + sqrt 6)/3, -2C/(3 + sqrt 6)),

    evaluated at the class-restricted equilibrium (tangency point of the
    equilibrium curve (t, 3 kappa1 t / kappa2, kappa1 t^2 / kappa3) with the
    class x - y + z = C).  Requires C < 0 and kappa2 > 0."""
    if C >= 0 or kappa2 <= 0:
        raise ValueError("requires C < 0 and kappa2 > 0")
    s6 = math.sqrt(6.0)
    k1 = kappa2 * (3.0 + s6) / 3.0
    k3 = kappa2 * (-2.0 * C) / (3.0 + s6)
    # class intersection: (k1/k3) t^2 + (1 - 3 k1/kappa2) t - C = 0
    a = k1 / k3
    b = 1.0 - 3.0 * k1 / kappa2
    disc = b * b + 4.0 * a * C
    t = -b / (2.0 * a) if disc < 1e-12 * max(1.0, b * b) else (-b + math.sqrt(disc)) / (2.0 * a)
    if t <= 0:
        raise ValueError("no positive equilibrium on the class")
    x = (t, 3.0 * k1 * t / kappa2, k1 * t * t / k3)
    sys = MassActionSystem(octo_fixture(), (k1, kappa2, k3))
    rj = reduced_jacobian(sys, x)
    return abs(rj.trace), abs(rj.det)
