"""Regularized coordinates for the size/shape dynamics.

Two charts are implemented:

  devaney     (r, v, phi, w): shape angle phi on the open domain, the
              classical blow-up chart.  The vector field is singular at the
              domain ends (binary/partial collisions).
  newcoords   (r, v, theta, w): the shape angle re-parameterized by a
              circle map phi = phi(theta) chosen so that partial collisions
              become regular points and the flow extends to a double cover.
              theta is kept unwrapped (multi-cover); crossing counts are
              meaningful.

The half-circle chart (pyramidal/spatial problems) is a stereographic
re-parameterization, the quarter-circle chart (planar problem) a parallel
projection.  In both cases

    c1(theta), c2(theta) = (cos phi, sin phi),
    c1'^2 + c2'^2 = cos^2(theta) / c(theta)

for an analytic positive c(theta), and the regularized potential is
curly W(theta) = cos^2(theta) * V(phi(theta)).
"""

from dataclasses import dataclass, replace
import math

import numpy as np

from .errors import DomainError, StructureError, TotalCollisionError
from .problems import (
    HALF_CIRCLE,
    QUARTER_CIRCLE,
    PYRAMIDAL,
    SPATIAL,
    ProblemSpec,
    _quantities,
    critical_points,
    potential,
    shape_f,
    shape_fprime,
)

DEVANEY = "devaney"
NEWCOORDS = "newcoords"


@dataclass(frozen=True)
class State:
    """A phase point.  angle is phi in the devaney chart, theta in newcoords.

    h is the fixed energy level; every built-in construction uses h = -1.
    """

    chart: str
    r: float
    v: float
    angle: float
    w: float
    h: float = -1.0

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.v, self.angle, self.w], dtype=float)

    def with_array(self, y) -> "State":
        return replace(
            self, r=float(y[0]), v=float(y[1]), angle=float(y[2]), w=float(y[3])
        )


@dataclass
class ChartData:
    c1: float
    c2: float
    c: float


def chart_eval(kind: str, theta) -> ChartData:
    """(cos phi, sin phi) and the metric factor c at chart angle theta."""
    s = np.sin(theta)
    if kind == HALF_CIRCLE:
        den = 1.0 + s * s
        return ChartData(c1=(1.0 - s * s) / den, c2=2.0 * s / den,
                         c=0.25 * den * den)
    if kind == QUARTER_CIRCLE:
        a = np.sqrt(1.0 + np.cos(theta) ** 2)
        return ChartData(c1=0.5 * (a - s), c2=0.5 * (a + s),
                         c=1.0 + np.cos(theta) ** 2)
    raise DomainError("unknown chart kind %r" % (kind,))


def _chart_derivs(kind: str, theta):
    """d(c1)/d(theta), d(c2)/d(theta), closed forms."""
    s, co = np.sin(theta), np.cos(theta)
    if kind == HALF_CIRCLE:
        den = (1.0 + s * s) ** 2
        return -2.0 * np.sin(2.0 * theta) / den, 2.0 * co**3 / den
    if kind == QUARTER_CIRCLE:
        a = np.sqrt(1.0 + co * co)
        return -co * (a + s) / (2.0 * a), co * (a - s) / (2.0 * a)
    raise DomainError("unknown chart kind %r" % (kind,))


def c_quotient(kind: str, theta):
    """c'(theta) / (sin theta cos theta), continued analytically at the
    lines where the denominator vanishes."""
    if kind == HALF_CIRCLE:
        return 1.0 + np.sin(theta) ** 2
    if kind == QUARTER_CIRCLE:
        if np.ndim(theta):
            return np.full(np.shape(theta), -2.0)
        return -2.0
    raise DomainError("unknown chart kind %r" % (kind,))


def phi_of_theta(p: ProblemSpec, theta):
    """Shape angle phi for chart angle theta (any cover)."""
    if p.chart == HALF_CIRCLE:
        return 2.0 * np.arctan(np.sin(theta))
    cd = chart_eval(QUARTER_CIRCLE, theta)
    return np.arctan2(cd.c2, cd.c1)


def theta_of_phi(p: ProblemSpec, phi):
    """Principal chart angle for shape angle phi."""
    if p.chart == HALF_CIRCLE:
        return np.arcsin(np.tan(np.asarray(phi) / 2.0))
    return np.arcsin(np.sin(phi) - np.cos(phi))


def curly_w(p: ProblemSpec, theta):
    """(curly W(theta), d/dtheta curly W(theta)) for the problem's chart."""
    phi = phi_of_theta(p, theta)
    _, _, w, wp = _quantities(p, phi)
    s, co = np.sin(theta), np.cos(theta)
    if p.chart == HALF_CIRCLE:
        return (1.0 + s * s) * w, 2.0 * co * (s * w + wp)
    a = np.sqrt(1.0 + co * co)
    return 2.0 * w, 2.0 * co * wp / a


def v_of_theta(p: ProblemSpec, theta):
    """V along the chart, curly W / cos^2.  Singular on the arm lines."""
    wc, _ = curly_w(p, theta)
    return wc / np.cos(theta) ** 2


def theta_star(p: ProblemSpec) -> float:
    """Positive chart angle of the off-midpoint critical shape.

    The Lagrange-type equilibria sit at chart angles congruent to
    +-theta_star; raises StructureError via critical_points when the
    potential has no off-midpoint critical pair.
    """
    cache = getattr(p, "_dyn_cache", None)
    if cache is None:
        cache = {}
        setattr(p, "_dyn_cache", cache)
    if "theta_star" not in cache:
        cps = critical_points(p)
        if cps.count != 3:
            raise StructureError("no off-midpoint critical pair for %r" % (p,))
        cache["theta_star"] = float(theta_of_phi(p, cps.phi_R))
        cache["phi_R"] = cps.phi_R
        cache["phi_L"] = cps.phi_L
    return cache["theta_star"]


def devaney_rhs(p: ProblemSpec, s: State) -> np.ndarray:
    """Right-hand side of the blown-up system in the devaney chart."""
    if s.chart != DEVANEY:
        raise DomainError("devaney_rhs needs a devaney-chart state")
    r, v, phi, w, h = s.r, s.v, s.angle, s.w, s.h
    _, _, wq, wqp = _quantities(p, phi)
    f = shape_f(p, phi)
    fp = shape_fprime(p, phi)
    bigf = f / math.sqrt(wq)
    dr = r * v * bigf
    dv = bigf * (2.0 * h * r - 0.5 * v * v) + math.sqrt(wq)
    dphi = w
    dw = (
        -0.5 * v * w * bigf
        + (wqp / wq) * (f - 0.5 * w * w)
        + fp * (1.0 + (f / wq) * (2.0 * h * r - v * v))
    )
    return np.array([dr, dv, dphi, dw])


def newcoords_rhs(p: ProblemSpec, s: State) -> np.ndarray:
    """Right-hand side in the regularized chart (partial collisions are
    regular points; the field is polynomial in the state given the chart
    functions)."""
    if s.chart != NEWCOORDS:
        raise DomainError("newcoords_rhs needs a newcoords-chart state")
    r, v, theta, w, h = s.r, s.v, s.angle, s.w, s.h
    co = math.cos(theta)
    si = math.sin(theta)
    csq = co * co
    sc = si * co
    c = chart_eval(p.chart, theta).c
    cprime = c_quotient(p.chart, theta) * sc
    wc, wcp = curly_w(p, theta)
    dr = r * v * csq
    dv = 0.5 * v * v * csq + w * w * c - wc
    dtheta = w * c
    dw = wcp - 0.5 * v * w * csq + sc * (v * v - 2.0 * h * r) - 0.5 * w * w * cprime
    return np.array([dr, dv, dtheta, dw])


def devaney_field(p: ProblemSpec):
    """Field callable over the flat vector [r, v, phi, w] at h = -1."""

    def rhs(s_, y):
        return devaney_rhs(p, State(DEVANEY, y[0], y[1], y[2], y[3]))

    rhs.chart = DEVANEY
    return rhs


def newcoords_field(p: ProblemSpec):
    """Field callable over the flat vector [r, v, theta, w] at h = -1."""

    def rhs(s_, y):
        return newcoords_rhs(p, State(NEWCOORDS, y[0], y[1], y[2], y[3]))

    rhs.chart = NEWCOORDS
    return rhs


def energy_residual(p: ProblemSpec, s: State) -> float:
    """Signed defect of the energy relation in the state's chart."""
    if s.chart == NEWCOORDS:
        csq = math.cos(s.angle) ** 2
        c = chart_eval(p.chart, s.angle).c
        wc, _ = curly_w(p, s.angle)
        return 0.5 * s.v * s.v * csq + 0.5 * s.w * s.w * c - wc - s.h * s.r * csq
    if s.chart == DEVANEY:
        _, _, wq, _ = _quantities(p, s.angle)
        f = shape_f(p, s.angle)
        return (
            s.w * s.w / (2.0 * f)
            - 1.0
            - (f / wq) * (s.r * s.h - 0.5 * s.v * s.v)
        )
    raise DomainError("unknown chart %r" % (s.chart,))


def solve_w(p: ProblemSpec, r: float, v: float, theta: float, sign: int = 1):
    """w >= 0 (or <= 0) satisfying the energy relation at h = -1 in the
    newcoords chart, or None when no real solution exists."""
    csq = math.cos(theta) ** 2
    c = chart_eval(p.chart, theta).c
    wc, _ = curly_w(p, theta)
    arg = 2.0 * (wc - r * csq - 0.5 * v * v * csq) / c
    if arg < 0.0:
        if arg > -1e-12:
            arg = 0.0
        else:
            return None
    return sign * math.sqrt(arg)


# -- discrete symmetries ------------------------------------------------------

_SYMMETRY_OPS = ("R1", "R2", "T1")


def apply_symmetry(op: str, s: State):
    """Apply one of the built-in symmetries in the newcoords chart.

    Returns (image state, time_reversing flag).  R1: (r,-v,theta,-w);
    R2: (r,-v,-theta,w); T1: (r,v,theta+pi,w).
    """
    if s.chart != NEWCOORDS:
        raise DomainError("symmetries are defined in the newcoords chart")
    if op == "R1":
        return replace(s, v=-s.v, w=-s.w), True
    if op == "R2":
        return replace(s, v=-s.v, angle=-s.angle), True
    if op == "T1":
        return replace(s, angle=s.angle + math.pi), False
    raise DomainError("unknown symmetry %r (expected R1, R2 or T1)" % (op,))


def sigma_line(theta_bar: float, s: State):
    """Reflection about the vertical line theta = theta_bar:
    (r, -v, 2 theta_bar - theta, w).  Time-reversing.  A flow symmetry for
    theta_bar any multiple of pi/2."""
    return replace(s, v=-s.v, angle=2.0 * theta_bar - s.angle), True


def deck_transform(s: State):
    """The double-cover deck map (r, v, pi - theta, -w).  Time-preserving."""
    return replace(s, angle=math.pi - s.angle, w=-s.w), False


def classify_region(p: ProblemSpec, s: State) -> str:
    """Region label on the principal window [theta* - pi, 0].

    R_I/Q_I: theta in [theta*-pi, -pi/2] with w >= 0 / w <= 0;
    R_II/Q_II: theta in [-pi/2, -theta*]; R_III: theta in [-theta*, 0],
    w >= 0.  Everything else is "outside".
    """
    ts = theta_star(p)
    th, w = s.angle, s.w
    if ts - math.pi <= th <= -math.pi / 2.0:
        return "R_I" if w >= 0.0 else "Q_I"
    if -math.pi / 2.0 <= th <= -ts:
        return "R_II" if w >= 0.0 else "Q_II"
    if -ts <= th <= 0.0 and w >= 0.0:
        return "R_III"
    return "outside"


# -- configuration space ------------------------------------------------------


def _mass_scale(p: ProblemSpec) -> float:
    # second configuration coordinate per unit (r sin phi)
    if p.kind == PYRAMIDAL:
        return math.sqrt((p.n + p.mu) / p.mu)
    if p.kind == SPATIAL:
        return 2.0
    return 1.0


def to_configuration(p: ProblemSpec, s: State):
    """Physical configuration coordinates and velocities (q1, q2, q1dot,
    q2dot) for a state with r > 0.

    q1 is the polygon circumradius scale, q2 the second shape coordinate
    (apex height, polygon separation, or second-ring radius scale).  The
    inverse velocity rescalings v = sqrt(r) rdot and the chart w-definition
    are applied.  Velocities diverge at partial collisions (cos theta = 0
    in newcoords, f = 0 in devaney): a genuine binary collision.
    """
    if s.r == 0.0:
        raise TotalCollisionError("no configuration velocities at r = 0")
    k2 = _mass_scale(p)
    sqr = math.sqrt(s.r)
    if s.chart == NEWCOORDS:
        cd = chart_eval(p.chart, s.angle)
        c1p, c2p = _chart_derivs(p.chart, s.angle)
        csq = math.cos(s.angle) ** 2
        thetadot_r32 = s.w * cd.c / csq  # r^{3/2} * thetadot
        q1 = s.r * cd.c1
        q2 = s.r * k2 * cd.c2
        qd1 = s.v * cd.c1 / sqr + c1p * thetadot_r32 / sqr
        qd2 = k2 * (s.v * cd.c2 / sqr + c2p * thetadot_r32 / sqr)
        return q1, q2, qd1, qd2
    if s.chart == DEVANEY:
        phi = s.angle
        _, _, wq, _ = _quantities(p, phi)
        f = shape_f(p, phi)
        phidot_r32 = s.w * math.sqrt(wq) / f  # r^{3/2} * phidot
        c1, c2 = math.cos(phi), math.sin(phi)
        q1 = s.r * c1
        q2 = s.r * k2 * c2
        qd1 = s.v * c1 / sqr - c2 * phidot_r32 / sqr
        qd2 = k2 * (s.v * c2 / sqr + c1 * phidot_r32 / sqr)
        return q1, q2, qd1, qd2
    raise DomainError("unknown chart %r" % (s.chart,))


def from_configuration(p: ProblemSpec, q1, q2, qd1, qd2, chart: str = NEWCOORDS,
                       h: float = -1.0) -> State:
    """Inverse of to_configuration onto the principal chart sheet."""
    k2 = _mass_scale(p)
    u1, u2 = q1, q2 / k2
    ud1, ud2 = qd1, qd2 / k2
    r = math.hypot(u1, u2)
    if r == 0.0:
        raise TotalCollisionError("total collision configuration")
    cphi, sphi = u1 / r, u2 / r
    rdot = (u1 * ud1 + u2 * ud2) / r
    phidot = (u1 * ud2 - u2 * ud1) / (r * r)
    v = math.sqrt(r) * rdot
    phi = math.atan2(sphi, cphi)
    if chart == DEVANEY:
        f = shape_f(p, phi)
        _, _, wq, _ = _quantities(p, phi)
        # sqrt(f/V) = f / sqrt(W); f > 0 on the open shape domain
        w = phidot * r**1.5 * f / math.sqrt(wq)
        return State(DEVANEY, r, v, phi, w, h)
    theta = float(theta_of_phi(p, phi))
    co = math.cos(theta)
    if p.chart == HALF_CIRCLE:
        dphi_dtheta = 2.0 * co / (1.0 + math.sin(theta) ** 2)
    else:
        dphi_dtheta = co / math.sqrt(1.0 + co * co)
    thetadot = phidot / dphi_dtheta
    c = chart_eval(p.chart, theta).c
    w = thetadot * r**1.5 * co * co / c
    return State(NEWCOORDS, r, v, theta, w, h)
