"""Trajectory integration and orbit-structure probes.

A Dormand-Prince 5(4) embedded pair with nonnegativity-preserving step
rejection drives everything: plain simulation, class-restricted simulation
in explicit class coordinates, Poincare return maps on a half-line section
through an equilibrium, center/limit-cycle discrimination, first-integral
drift checks and the square-root amplitude law of a nondegenerate
bifurcation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import ratmat
from .equilibria import planar_equilibrium
from .families import FamilyName, FamilyTag, match_family
from .network import MassActionSystem

BLOWUP_NORM = 1e12

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_ERR = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


@dataclass
class IntegratorStats:
    steps: int = 0
    rejected: int = 0
    tol: float = 1e-10


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray            # shape (len(times), n)
    stats: IntegratorStats
    blew_up: bool = False

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


class _StepResult:
    __slots__ = ("t", "x", "f_new")

    def __init__(self, t, x, f_new):
        self.t = t
        self.x = x
        self.f_new = f_new


class DormandPrince:
    """Adaptive 5(4) stepper over f: (t, x) -> dx/dt with optional state
    guard keeping iterates in an admissible region (step halves on exit)."""

    def __init__(self, f, rtol: float = 1e-10, atol: float = 1e-12,
                 guard: Optional[Callable[[np.ndarray], bool]] = None):
        self.f = f
        self.rtol = rtol
        self.atol = atol
        self.guard = guard
        self.stats = IntegratorStats(tol=rtol)

    def initial_step(self, t0, x0, f0) -> float:
        scale = self.atol + self.rtol * np.abs(x0)
        d0 = np.linalg.norm(x0 / scale) / math.sqrt(len(x0))
        d1 = np.linalg.norm(f0 / scale) / math.sqrt(len(x0))
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        return h

    def step(self, t, x, f0, h) -> Tuple[Optional[_StepResult], float]:
        """One attempted step; returns (result or None on rejection, new h)."""
        k = [f0]
        for s in range(1, 7):
            xs = x + h * sum(a * ki for a, ki in zip(_A[s], k))
            k.append(self.f(t + _C[s] * h, xs))
        x_new = x + h * sum(b * ki for b, ki in zip(_B5, k) if b)
        err_vec = h * sum(e * ki for e, ki in zip(_ERR, k) if e)
        scale = self.atol + self.rtol * np.maximum(np.abs(x), np.abs(x_new))
        err = np.linalg.norm(err_vec / scale) / math.sqrt(len(x))
        if not np.isfinite(err):
            self.stats.rejected += 1
            return None, h * 0.2
        if err > 1.0:
            self.stats.rejected += 1
            return None, h * max(0.2, 0.9 * err ** -0.2)
        if self.guard is not None and not self.guard(x_new):
            self.stats.rejected += 1
            return None, h * 0.5
        self.stats.steps += 1
        h_new = h * min(5.0, max(0.2, 0.9 * err ** -0.2 if err > 0 else 5.0))
        return _StepResult(t + h, x_new, k[6]), h_new


def _hermite(t0, x0, f0, t1, x1, f1, t):
    """Cubic Hermite interpolation inside one accepted step."""
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * x0 + h10 * h * f0 + h01 * x1 + h11 * h * f1


def compiled_rhs(sys: MassActionSystem) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized float right-hand side S (kappa o x^E); intermediate stage
    states are clipped at zero so integer-exponent monomials stay finite."""
    S = np.array([[float(v) for v in row] for row in sys.network.stoich_matrix])
    E = np.array([[float(v) for v in row] for row in sys.network.source_matrix]).T
    kap = np.array([float(k) for k in sys.kappa])

    def f(x: np.ndarray) -> np.ndarray:
        xc = np.maximum(x, 0.0)
        mono = np.prod(np.power(xc, E), axis=1)
        return S @ (kap * mono)

    return f


def integrate(
    sys: MassActionSystem,
    x0: Sequence[float],
    T: float,
    tol: float = 1e-10,
    max_steps: int = 2_000_000,
) -> Trajectory:
    """Integrate the mass-action equation from x0 >= 0 for time T.

    Steps that would leave the nonnegative orthant are rejected and halved;
    a state norm above 1e12 truncates the trajectory with the blow-up flag.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    x0 = np.asarray([float(v) for v in x0])
    if np.any(x0 < 0):
        raise ValueError("x0 must be nonnegative")
    rhs = compiled_rhs(sys)

    def f(t, x):
        return rhs(x)

    stepper = DormandPrince(f, rtol=tol, guard=lambda x: bool(np.all(x >= 0.0)))
    ts = [0.0]
    xs = [x0.copy()]
    t, x = 0.0, x0.copy()
    fx = f(t, x)
    h = min(stepper.initial_step(t, x, fx), T)
    blew_up = False
    stuck = 0
    while t < T and stepper.stats.steps < max_steps:
        h = min(h, T - t)
        res, h_next = stepper.step(t, x, fx, h)
        if res is None:
            h = h_next
            if h < 1e-15 * max(1.0, abs(t)):
                # stuck on the boundary: clamp the offending component
                x = np.maximum(x, 0.0)
                h = 1e-12 * max(1.0, abs(t))
                stuck += 1
                if stuck > 100:
                    break
            continue
        t, x, fx = res.t, res.x, res.f_new
        ts.append(t)
        xs.append(x.copy())
        h = h_next
        if np.max(np.abs(x)) > BLOWUP_NORM:
            blew_up = True
            break
    return Trajectory(np.asarray(ts), np.asarray(xs), stepper.stats, blew_up)


@dataclass(frozen=True)
class ClassChart:
    """Explicit coordinates on a positive stoichiometric class:
    x = offset + basis @ xi."""

    offset: np.ndarray
    basis: np.ndarray              # n x r

    def to_state(self, xi: np.ndarray) -> np.ndarray:
        return self.offset + self.basis @ xi

    def to_chart(self, x: Sequence[float]) -> np.ndarray:
        b = self.basis
        return np.linalg.lstsq(b, np.asarray(x, dtype=float) - self.offset, rcond=None)[0]


def class_chart(net, anchor: Sequence[float]) -> ClassChart:
    """Chart of the class through `anchor`, with the deterministic rational
    column basis of im(Gamma)."""
    cols = ratmat.transpose(net.stoich_matrix)
    basis: List[List[Fraction]] = []
    for col in cols:
        trial = basis + [list(map(Fraction, col))]
        if ratmat.rank(trial) > len(basis):
            basis.append(list(map(Fraction, col)))
    B = np.array([[float(v) for v in col] for col in basis]).T
    return ClassChart(offset=np.asarray([float(v) for v in anchor]), basis=B)


def integrate_on_class(
    sys: MassActionSystem,
    chart: ClassChart,
    xi0: np.ndarray,
    T: float,
    tol: float = 1e-10,
    section: Optional[Callable[[np.ndarray], float]] = None,
    section_direction: float = 1.0,
    max_crossings: int = 1,
    max_steps: int = 2_000_000,
) -> Tuple[Trajectory, List[Tuple[float, np.ndarray]]]:
    """Integrate in class coordinates; optionally record transversal
    crossings of section(xi) = 0 (sign change in the given direction),
    refined by bisection on the Hermite interpolant."""
    rhs = compiled_rhs(sys)
    B = chart.basis
    proj = np.linalg.pinv(B)

    def f(t, xi):
        return proj @ rhs(chart.to_state(xi))

    def guard(xi):
        return bool(np.all(chart.to_state(xi) >= 0.0))

    stepper = DormandPrince(f, rtol=tol, guard=guard)
    t, xi = 0.0, np.asarray(xi0, dtype=float)
    fx = f(t, xi)
    ts, xs = [t], [xi.copy()]
    crossings: List[Tuple[float, np.ndarray]] = []
    h = min(stepper.initial_step(t, xi, fx), T)
    blew_up = False
    # the detector arms only once the orbit has visited the pre-crossing
    # side, so restarting exactly on the section cannot re-fire at t = 0
    armed = False
    while t < T and stepper.stats.steps < max_steps:
        h = min(h, T - t)
        res, h_next = stepper.step(t, xi, fx, h)
        if res is None:
            h = h_next
            if h < 1e-15 * max(1.0, abs(t)):
                break
            continue
        t_new, xi_new, f_new = res.t, res.x, res.f_new
        if section is not None:
            s_new = section(xi_new)
            if armed and s_new * section_direction > 0:
                tc = _refine_crossing(section, t, xi, fx, t_new, xi_new, f_new)
                xc = _hermite(t, xi, fx, t_new, xi_new, f_new, tc)
                crossings.append((tc, xc))
                armed = False
                if len(crossings) >= max_crossings:
                    ts.append(tc)
                    xs.append(xc)
                    break
            elif s_new * section_direction < 0:
                armed = True
        t, xi, fx = t_new, xi_new, f_new
        ts.append(t)
        xs.append(xi.copy())
        h = h_next
        if np.max(np.abs(chart.to_state(xi))) > BLOWUP_NORM:
            blew_up = True
            break
    traj = Trajectory(np.asarray(ts), np.asarray(xs), stepper.stats, blew_up)
    return traj, crossings


def _refine_crossing(section, t0, x0, f0, t1, x1, f1, iters: int = 80) -> float:
    a, b = t0, t1
    sa = section(x0)
    for _ in range(iters):
        m = 0.5 * (a + b)
        sm = section(_hermite(t0, x0, f0, t1, x1, f1, m))
        if sa * sm <= 0:
            b = m
        else:
            a, sa = m, sm
        if b - a < 1e-15 * max(1.0, abs(b)):
            break
    return 0.5 * (a + b)


@dataclass
class ReturnMapSample:
    """Paired section radii of consecutive same-direction crossings."""

    radii_in: List[float] = field(default_factory=list)
    radii_out: List[float] = field(default_factory=list)
    times: List[float] = field(default_factory=list)
    non_returning: List[float] = field(default_factory=list)


def _planar_chart(sys: MassActionSystem, eq) -> Tuple[ClassChart, np.ndarray]:
    """Chart + equilibrium coordinates: identity for planar systems, class
    chart through the equilibrium otherwise."""
    x = np.asarray([float(v) for v in getattr(eq, "x_bar", eq)])
    net = sys.network
    if net.num_species == 2 and ratmat.rank(net.stoich_matrix) == 2:
        chart = ClassChart(offset=np.zeros(2), basis=np.eye(2))
        return chart, x
    chart = class_chart(net, x)
    return chart, chart.to_chart(x)


def return_map(
    sys: MassActionSystem,
    eq,
    radii: Sequence[float],
    turns: int = 1,
    t_max: float = 400.0,
    tol: float = 1e-10,
) -> ReturnMapSample:
    """Radii of successive returns to the half-line section anchored at the
    equilibrium along the first chart axis.

    Crossings with section-normal speed below 1e-8 (relative) are ignored as
    non-transversal; radii that fail to return within t_max are flagged."""
    chart, xi_eq = _planar_chart(sys, eq)
    sample = ReturnMapSample()

    def section(xi):
        return xi[1] - xi_eq[1]

    # direction of rotation at small positive radius fixes the crossing sign
    probe = xi_eq.copy()
    scale0 = max(1e-8, 0.01 * abs(xi_eq[0]))
    probe[0] += scale0
    rhs = compiled_rhs(sys)
    B = chart.basis
    proj = np.linalg.pinv(B)
    v = proj @ rhs(chart.to_state(probe))
    direction = 1.0 if v[1] > 0 else -1.0

    for r in radii:
        xi0 = xi_eq.copy()
        xi0[0] += r
        remaining = turns
        current = xi0
        t_used = 0.0
        ok = True
        while remaining > 0:
            traj, crossings = integrate_on_class(
                sys, chart, current, t_max - t_used, tol=tol,
                section=section, section_direction=direction, max_crossings=4,
            )
            hit = None
            for tc, xc in crossings:
                rad = xc[0] - xi_eq[0]
                vel = proj @ rhs(chart.to_state(xc))
                if rad > 0 and abs(vel[1]) > 1e-8 * max(1.0, np.linalg.norm(vel)):
                    hit = (tc, xc, rad)
                    break
            if hit is None:
                ok = False
                break
            tc, xc, rad = hit
            sample.radii_in.append(current[0] - xi_eq[0])
            sample.radii_out.append(rad)
            sample.times.append(tc)
            t_used += tc
            current = xc
            remaining -= 1
            if t_used >= t_max:
                ok = remaining == 0
                break
        if not ok:
            sample.non_returning.append(r)
    return sample


class OrbitStructure(Enum):
    CENTER = "Center"
    STABLE_CYCLE = "StableCycle"
    SPIRAL_IN = "Spiral(in)"
    SPIRAL_OUT = "Spiral(out)"
    NON_RETURNING = "NonReturning"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class OrbitVerdict:
    structure: OrbitStructure
    cycle_radius: Optional[float] = None
    drift: Optional[float] = None


def classify_orbit_structure(sample: ReturnMapSample, tol: float = 1e-5) -> OrbitVerdict:
    """Center / stable cycle / spiral verdict from return-map samples.

    Center requires relative drift below tol at every sampled radius (the
    callers sample >= 5 radii and several consecutive returns each); a sign
    change of r_out - r_in with contraction gives a stable cycle; otherwise
    a monotone drift direction decides the spiral."""
    if sample.non_returning and not sample.radii_in:
        return OrbitVerdict(OrbitStructure.NON_RETURNING)
    if len(sample.radii_in) < 1:
        return OrbitVerdict(OrbitStructure.INDETERMINATE)
    rin = np.asarray(sample.radii_in)
    rout = np.asarray(sample.radii_out)
    rel = (rout - rin) / rin
    drift = float(np.max(np.abs(rel)))
    if drift < tol:
        return OrbitVerdict(OrbitStructure.CENTER, drift=drift)
    # displacements inside the integrator noise floor count as zero
    signs = np.where(np.abs(rel) < 1e-12, 0.0, np.sign(rout - rin))
    if np.any(signs > 0) and np.any(signs < 0):
        # locate the crossing radius of the displacement map
        order = np.argsort(rin)
        rs, ds = rin[order], (rout - rin)[order]
        radius = None
        for i in range(len(rs) - 1):
            if ds[i] > 0 and ds[i + 1] < 0:
                w = ds[i] / (ds[i] - ds[i + 1])
                radius = float(rs[i] + w * (rs[i + 1] - rs[i]))
                break
        if radius is not None:
            return OrbitVerdict(OrbitStructure.STABLE_CYCLE, cycle_radius=radius, drift=drift)
        return OrbitVerdict(OrbitStructure.INDETERMINATE, drift=drift)
    if np.all(signs <= 0):
        return OrbitVerdict(OrbitStructure.SPIRAL_IN, drift=drift)
    if np.all(signs >= 0):
        return OrbitVerdict(OrbitStructure.SPIRAL_OUT, drift=drift)
    return OrbitVerdict(OrbitStructure.INDETERMINATE, drift=drift)


def conserved_quantity(tag, kappa: Sequence[float], x: Sequence[float]) -> float:
    """First integral (or Lyapunov function value) of a named family at x.

    GeneralisedLotka(c, d):  d k2 x + k2 y - k3 log x - c k1 log y
    Ivanova:                -k3 log x - k1 log y - k2 log z
    ThreeSpeciesFamily(c,d): d k3 log x - k1 log y + k2 log z
    LiftedLVA(d), class C:   k2 (v - vb log v) + k3 C (w - wb log w),
                             v = y/x, w = 1/x (a first integral iff k2 = k3)
    """
    k = [float(v) for v in kappa]
    xf = [float(v) for v in x]
    if isinstance(tag, FamilyTag):
        name = tag.name
        params = dict(tag.parameters)
        # rewrite into template order so the formulas below apply verbatim
        k = [k[j] for j in tag.reaction_permutation]
        xf = [xf[p] for p in tag.species_permutation]
    else:
        name = tag
        params = {}
    if name == FamilyName.GENERALISED_LOTKA:
        c, d = params["c"], params["d"]
        return d * k[1] * xf[0] + k[1] * xf[1] - k[2] * math.log(xf[0]) - c * k[0] * math.log(xf[1])
    if name == FamilyName.IVANOVA:
        return -k[2] * math.log(xf[0]) - k[0] * math.log(xf[1]) - k[1] * math.log(xf[2])
    if name == FamilyName.THREE_SPECIES:
        d = params["d"]
        return d * k[2] * math.log(xf[0]) - k[0] * math.log(xf[1]) + k[1] * math.log(xf[2])
    if name == FamilyName.LIFTED_LVA:
        C = xf[2] - xf[1] if len(xf) == 3 else 0.0
        v, w = xf[1] / xf[0], 1.0 / xf[0]
        vb = k[0] / k[1]
        d = params["d"]
        wb = (d * k[1] ** 2 - k[0] * k[2]) / (k[1] * k[2] * C)
        return k[1] * (v - vb * math.log(v)) + k[2] * C * (w - wb * math.log(w))
    raise ValueError(f"no conserved quantity for {name}")


def drift(tag, kappa: Sequence[float], traj: Trajectory) -> float:
    """max |V(x(t)) - V(x(0))| along a trajectory."""
    v0 = conserved_quantity(tag, kappa, traj.states[0])
    worst = 0.0
    for row in traj.states:
        worst = max(worst, abs(conserved_quantity(tag, kappa, row) - v0))
    return worst


def linear_drift(net, traj: Trajectory) -> float:
    """Worst relative drift of the linear conserved quantities w . x."""
    cons = ratmat.left_nullspace(net.stoich_matrix)
    worst = 0.0
    for w in cons:
        wf = np.asarray([float(v) for v in w])
        vals = traj.states @ wf
        scale = max(1.0, float(np.max(np.abs(vals))))
        worst = max(worst, float(np.max(np.abs(vals - vals[0]))) / scale)
    return worst


@dataclass(frozen=True)
class PredatorPreyForm:
    """v' = v(alpha + beta v + gamma w), w' = w(delta + eps v) with
    v = y/x, w = 1/x on the class z = y + C."""

    alpha: float
    beta: float
    gamma: float
    delta: float
    eps: float
    C: float
    equilibrium: Optional[Tuple[float, float]]

    def rhs(self, vw: np.ndarray) -> np.ndarray:
        v, w = vw
        return np.array([
            v * (self.alpha + self.beta * v + self.gamma * w),
            w * (self.delta + self.eps * v),
        ])


def predator_prey_transform(sys: MassActionSystem, C: float) -> PredatorPreyForm:
    """Planar predator-prey form of a lifted-autocatalator system on the
    class z - y = C; the transformed equilibrium exists iff C > 0 and
    d k2^2 > k1 k3."""
    tag = match_family(sys.network)
    if tag is None or tag.name != FamilyName.LIFTED_LVA:
        raise ValueError("predator_prey_transform requires a LiftedLVA network")
    d = tag.param("d")
    k = [float(v) for v in sys.kappa]
    k1, k2, k3 = (k[j] for j in tag.reaction_permutation)
    alpha = d * k2 - k1
    beta = k2 - k3
    gamma = -k3 * C
    delta = -k1
    eps = k2
    eq = None
    if C > 0 and d * k2 * k2 > k1 * k3:
        vb = k1 / k2
        wb = (d * k2 * k2 - k1 * k3) / (k2 * k3 * C)
        eq = (vb, wb)
    return PredatorPreyForm(alpha, beta, gamma, delta, eps, C, eq)


@dataclass
class AmplitudeScan:
    offsets: List[float]
    radii: List[float]
    slope: float
    intercept: float
    max_relative_residual: float


def hopf_amplitude_scan(
    net,
    path,
    t_star: float,
    offsets: Sequence[float],
    radius_grid: Sequence[float],
    tol: float = 1e-9,
) -> AmplitudeScan:
    """Stable-cycle radius past the critical parameter, fitted as
    radius^2 = slope * offset + intercept.

    For each offset the return map is sampled on the radius grid and the
    attracting fixed radius located; the square-root amplitude law of a
    nondegenerate supercritical bifurcation makes the fit linear."""
    from .network import MassActionSystem as MAS

    offs, radii = [], []
    for off in offsets:
        kappa = path(t_star + off)
        sys = MAS(net, tuple(float(k) for k in kappa))
        eq = planar_equilibrium(sys)
        sample = return_map(sys, eq, radius_grid, turns=1, tol=tol)
        verdict = classify_orbit_structure(sample, tol=1e-7)
        if verdict.structure != OrbitStructure.STABLE_CYCLE:
            continue
        r = _polish_cycle_radius(sys, eq, verdict.cycle_radius, tol=tol)
        offs.append(float(off))
        radii.append(float(r))
    if len(offs) < 2:
        raise ValueError("no cycles found on the scanned offsets")
    A = np.vstack([offs, np.ones(len(offs))]).T
    y = np.asarray(radii) ** 2
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    fit = A @ coef
    rel = float(np.max(np.abs(fit - y) / np.abs(y)))
    return AmplitudeScan(offs, radii, float(coef[0]), float(coef[1]), rel)


def _polish_cycle_radius(sys, eq, r0: float, tol: float = 1e-9, iters: int = 20) -> float:
    """Secant iteration on the displacement map around an attracting fixed
    radius, falling back to the unpolished estimate."""

    def disp(r):
        s = return_map(sys, eq, [r], turns=1, tol=tol)
        if not s.radii_out:
            return None
        return s.radii_out[0] - r

    r_prev, r_cur = 0.9 * r0, 1.1 * r0
    d_prev, d_cur = disp(r_prev), disp(r_cur)
    if d_prev is None or d_cur is None:
        return r0
    for _ in range(iters):
        if d_cur == d_prev:
            break
        r_next = r_cur - d_cur * (r_cur - r_prev) / (d_cur - d_prev)
        if not (0.2 * r0 < r_next < 5.0 * r0):
            break
        d_next = disp(r_next)
        if d_next is None:
            break
        r_prev, d_prev, r_cur, d_cur = r_cur, d_cur, r_next, d_next
        if abs(d_cur) < 1e-8 * max(1.0, r_cur) or abs(r_cur - r_prev) < 1e-8 * r_cur:
            break
    return r_cur
