"""Shooting searches for symmetric periodic orbits.

Each family is a recipe: a seed locus (the brake set S(-pi/2) on the line
theta = -pi/2, or the zero-velocity curve Z), a prescribed sequence of
line crossings at multiples of pi/2, and a terminal condition whose
residual changes sign across the sought orbit:

    B(k)          S seed, k re-crossings of the seed line, orthogonal hit
                  on the first line reached after them (v = 0 there);
    LessSymB(i,j) S seed, half-period segment ending orthogonally on a
                  partial-collision line, pattern depends on parity of i;
    Z1(k)         Z seed, k partial-collision crossings, orthogonal hit on
                  the central-configuration line theta = 0;
    ZB(i,j)       Z seed, i crossings west, return east, (j+1)th crossing
                  of theta = +pi/2 orthogonal;
    Z5(i,j)       Z seed, prescribed crossings, then a brake (v = 0) off
                  every line; the residual is w at the brake.

The experimental families PP and Z2 reuse the same machinery; their
results are reported but nothing about them is asserted.

A found fundamental segment is reconstructed to a full period with the
reversing reflections sigma_line (about a line) and R1 (about a brake):
quarter segments mirror twice or mirror-then-retrace, half segments
mirror or retrace once.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from . import dynamics as dyn
from .dynamics import NEWCOORDS, State
from .errors import AmbiguousBracketError, DomainError, OrbitNotFoundError
from .odeint import Controls, EventSpec, Trajectory, field_for, integrate
from .problems import ProblemSpec

LOCUS_S = "S(-pi/2)"
LOCUS_Z = "Z"

FAMILY_NAMES = ("B", "LessSymB", "ZB", "Z1", "Z5", "PP", "Z2")

RESIDUAL_TOL = 1e-8
# bisection drives the residual well below the acceptance bound so the
# full-period closure error stays within 1e-6 for long periods too
_RESIDUAL_TARGET = 1e-12
R_ESCAPE = 1e3
_HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class FamilySpec:
    """A family name with its indices.

    B(k) and Z1(k) use i = k >= 0; LessSymB, ZB, Z5 and the experimental
    PP need i >= 1 and j >= 1; the experimental Z2 takes no indices.
    """

    family: str
    i: int = None
    j: int = None

    def __post_init__(self):
        if self.family not in FAMILY_NAMES:
            raise DomainError("unknown family %r" % (self.family,))
        if self.family in ("B", "Z1"):
            if self.i is None or self.i < 0 or self.j is not None:
                raise DomainError("%s takes one index k >= 0" % (self.family,))
        elif self.family == "Z2":
            if self.i is not None or self.j is not None:
                raise DomainError("Z2 takes no indices")
        else:
            if self.i is None or self.j is None or self.i < 1 or self.j < 1:
                raise DomainError(
                    "%s needs a pair of positive indices" % (self.family,))

    def __str__(self):
        if self.family in ("B", "Z1"):
            return "%s(%d)" % (self.family, self.i)
        if self.family == "Z2":
            return "Z2"
        return "%s(%d,%d)" % (self.family, self.i, self.j)


@dataclass(frozen=True)
class CrossingSignature:
    """Ordered crossing record: ("euler"|"partial", m) for the line at
    theta = m pi/2, and ("v-zero", None) entries interleaved."""

    entries: tuple

    def __post_init__(self):
        ms = self.lines()
        for a, b in zip(ms, ms[1:]):
            if abs(b - a) > 1:
                raise DomainError(
                    "crossing sequence %r skips a line" % (ms,))

    def lines(self) -> tuple:
        return tuple(m for kind, m in self.entries if kind != "v-zero")

    def __str__(self):
        out = []
        for kind, m in self.entries:
            out.append("v=0" if kind == "v-zero" else "%s(%d)" % (kind, m))
        return " ".join(out)


@dataclass
class PeriodicOrbit:
    family: FamilySpec
    seed: State
    seed_parameter: float
    quarter_or_half: str
    fundamental: Trajectory
    residual: float
    full_period_s: float
    reconstructed: Trajectory
    notes: dict = field(default_factory=dict)


def line_kind(m: int) -> str:
    """Even multiples of pi/2 carry central (Euler-type) configurations,
    odd multiples the regularized partial collisions."""
    return "euler" if m % 2 == 0 else "partial"


# -- seeds ---------------------------------------------------------------------


def seed_state(problem: ProblemSpec, locus: str, param: float) -> State:
    """A brake seed: on S(-pi/2) param is the size r, on Z the angle."""
    if locus == LOCUS_S:
        if not param > 0.0:
            raise DomainError("S locus needs r > 0, got %r" % (param,))
        wc, _ = dyn.curly_w(problem, -_HALF_PI)
        c = dyn.chart_eval(problem.chart, -_HALF_PI).c
        return State(NEWCOORDS, float(param), 0.0, -_HALF_PI,
                     math.sqrt(2.0 * wc / c))
    if locus == LOCUS_Z:
        if math.cos(param) ** 2 < 1e-18:
            raise DomainError(
                "Z locus is unbounded at odd multiples of pi/2")
        r = float(dyn.v_of_theta(problem, param))
        return State(NEWCOORDS, r, 0.0, float(param), 0.0)
    raise DomainError("unknown locus %r" % (locus,))


# -- family recipes ------------------------------------------------------------


@dataclass(frozen=True)
class _Recipe:
    locus: str
    lines: tuple  # prescribed crossings (as m integers) before the terminal
    terminal: str  # "line" | "brake"
    terminal_m: int
    segment: str  # "quarter" | "half"
    closure: str  # "mirror-mirror" | "mirror-retrace" | "mirror" | "retrace"


def _recipe_for(spec: FamilySpec) -> _Recipe:
    f, i, j = spec.family, spec.i, spec.j
    if f == "B":
        return _Recipe(LOCUS_S, (-1,) * i, "line", 0 if i % 2 == 0 else -2,
                       "quarter", "mirror-mirror")
    if f == "Z1":
        return _Recipe(LOCUS_Z, (-1,) * i, "line", 0, "quarter",
                       "mirror-retrace")
    if f == "ZB":
        return _Recipe(LOCUS_Z, (-1,) * i + (0,) + (1,) * j, "line", 1,
                       "quarter", "mirror-retrace")
    if f == "LessSymB":
        if i % 2 == 0:
            return _Recipe(LOCUS_S, (-1,) * i + (0,) + (1,) * j, "line", 1,
                           "half", "mirror")
        return _Recipe(LOCUS_S, (-1,) * i + (-2,) + (-3,) * j, "line", -3,
                       "half", "mirror")
    if f == "Z5":
        return _Recipe(LOCUS_Z, (-1,) * i + (0,) + (1,) * j, "brake", 0,
                       "half", "retrace")
    if f == "PP":
        return _Recipe(LOCUS_S, (-1,) * (i - 1) + (0,) * j, "line", 1,
                       "half", "mirror")
    # Z2: the planar search suggested by the sign pattern of the last two
    # branch landmarks; an orthogonal hit on theta = +pi/2 after one
    # central-line crossing
    return _Recipe(LOCUS_S, (0,), "line", 1, "half", "mirror")


def prescribed_signature(spec: FamilySpec) -> tuple:
    """Crossing pattern of the fundamental segment, as readable labels."""
    rec = _recipe_for(spec)
    out = ["%s(%d)" % (line_kind(m), m) for m in rec.lines]
    if rec.terminal == "line":
        out.append("%s(%d)" % (line_kind(rec.terminal_m), rec.terminal_m))
    else:
        out.append("brake")
    return tuple(out)


# -- single shots --------------------------------------------------------------


@dataclass
class _ShotRecord:
    param: float
    classification: str  # matched | pattern-mismatch | escape |
    #                      collision-asymptotic | no-terminal | brake-on-line
    lines: tuple
    residual: float
    terminal_s: float
    terminal_state: State
    trajectory: Trajectory


def _shot(problem, recipe: _Recipe, param: float, rtol=1e-10,
          atol=1e-12, max_s=200.0) -> _ShotRecord:
    seed = seed_state(problem, recipe.locus, param)
    full = recipe.lines + ((recipe.terminal_m,)
                           if recipe.terminal == "line" else ())
    cap = len(full) if recipe.terminal == "line" else len(full) + 1
    window = range(min(full + (0,)) - 3, max(full + (0,)) + 4)
    events = [EventSpec.angle(m * _HALF_PI) for m in window]
    events += [EventSpec.v_zero(), EventSpec.w_zero(),
               EventSpec.r_exceeds(R_ESCAPE)]
    ctl = Controls(rtol=rtol, atol=atol, max_s=max_s,
                   max_angle_crossings=cap)
    traj = integrate(field_for(problem, NEWCOORDS), seed, events, ctl)

    cross = [(h.s, int(round(h.state.angle / _HALF_PI)))
             for h in traj.events if h.kind == "angle-crossing"]
    ms = tuple(m for _, m in cross)
    rec = _ShotRecord(param=param, classification="no-terminal", lines=ms,
                      residual=None, terminal_s=traj.end_s,
                      terminal_state=traj.end_state, trajectory=traj)

    if traj.termination == "step-failure":
        rec.classification = "collision-asymptotic"
        return rec
    if traj.events and traj.events[-1].kind == "r-exceeds":
        rec.classification = "escape"
        return rec

    if recipe.terminal == "line":
        if ms == full and traj.termination == "crossing-cap":
            rec.classification = "matched"
            rec.residual = traj.end_state.v
        elif ms[:len(full)] != full[:len(ms)]:
            rec.classification = "pattern-mismatch"
        return rec

    # brake terminal: the prescribed crossings, then v = 0 strictly before
    # any further line
    k = len(recipe.lines)
    if ms[:k] != recipe.lines[:len(ms)]:
        rec.classification = "pattern-mismatch"
        return rec
    if len(ms) < k:
        return rec
    s_done = cross[k - 1][0] if k else 0.0
    s_next = cross[k][0] if len(cross) > k else math.inf
    vhits = [h for h in traj.events
             if h.kind == "v-zero" and s_done < h.s < s_next]
    if not vhits:
        return rec
    hit = vhits[0]
    gap = abs(hit.state.angle / _HALF_PI
              - round(hit.state.angle / _HALF_PI)) * _HALF_PI
    if gap < 1e-6:
        # a brake on a line belongs to the Z1/ZB searches, not here
        rec.classification = "brake-on-line"
        return rec
    rec.classification = "matched"
    rec.residual = hit.state.w
    rec.terminal_s = hit.s
    rec.terminal_state = hit.state
    return rec


def _scan_worker(task):
    problem, recipe, param = task
    rec = _shot(problem, recipe, param)
    return (param, rec.classification, rec.lines, rec.residual)


def shoot(problem: ProblemSpec, seed: State, stop: EventSpec = None,
          max_crossings: int = 24):
    """One classified shot: every line crossing and v/w zero is recorded.

    Returns (CrossingSignature, terminal) where terminal is the end State,
    or "escape" / "collision-asymptotic" when the run left the bounded
    region or stalled against the total collision.
    """
    events = [EventSpec.angle(m * _HALF_PI) for m in range(-12, 13)]
    events += [EventSpec.v_zero(), EventSpec.w_zero(),
               EventSpec.r_exceeds(R_ESCAPE)]
    if stop is not None:
        events.append(stop)
    ctl = Controls(max_s=200.0, max_angle_crossings=max_crossings)
    traj = integrate(field_for(problem, NEWCOORDS), seed, events, ctl)
    entries = []
    for h in traj.events:
        if h.kind == "angle-crossing":
            m = int(round(h.state.angle / _HALF_PI))
            entries.append((line_kind(m), m))
        elif h.kind == "v-zero":
            entries.append(("v-zero", None))
    sig = CrossingSignature(tuple(entries))
    if traj.termination == "step-failure":
        return sig, "collision-asymptotic"
    if traj.events and traj.events[-1].kind == "r-exceeds":
        return sig, "escape"
    return sig, traj.end_state


# -- search --------------------------------------------------------------------


def _default_search(problem, recipe) -> dict:
    if recipe.locus == LOCUS_S:
        return {"param_lo": 1e-3, "param_hi": 1e2, "grid_points": 400}
    ts = dyn.theta_star(problem)
    return {"param_lo": ts - math.pi + 1e-3, "param_hi": -1e-3,
            "grid_points": 400}


def _grid(recipe, lo, hi, n):
    if recipe.locus == LOCUS_S:
        pts = np.geomspace(lo, hi, n)
    else:
        pts = np.linspace(lo, hi, n)
        # the zero-velocity curve blows up on the partial-collision lines
        keep = np.abs(np.cos(pts)) > 2e-3
        pts = pts[keep]
    return pts


def _bisect(problem, recipe, lo, hi, f_lo):
    """Plain bisection on the terminal residual; raises AmbiguousBracketError
    if a midpoint stops matching the prescribed signature."""
    a, b, fa = lo, hi, f_lo
    best = None
    for _ in range(200):
        mid = 0.5 * (a + b)
        rec = _shot(problem, recipe, mid)
        if rec.classification != "matched":
            raise AmbiguousBracketError(
                "signature %r at parameter %.17g inside the bracket"
                % (rec.classification, mid))
        if best is None or abs(rec.residual) < abs(best.residual):
            best = rec
        if abs(rec.residual) <= _RESIDUAL_TARGET:
            return rec
        if (rec.residual > 0.0) == (fa > 0.0):
            a, fa = mid, rec.residual
        else:
            b = mid
        if b - a <= 1e-15 * max(1.0, abs(a)):
            break
    if best is not None and abs(best.residual) <= RESIDUAL_TOL:
        return best
    raise AmbiguousBracketError(
        "bracket [%r, %r] exhausted with residual %r"
        % (a, b, None if best is None else best.residual))


def _reconstruct_and_wrap(problem, spec, recipe, rec) -> PeriodicOrbit:
    tau = rec.terminal_s
    seed = seed_state(problem, recipe.locus, rec.param)
    window = range(min(recipe.lines + (0,)) - 3,
                   max(recipe.lines + (0,)) + 4)
    events = [EventSpec.angle(m * _HALF_PI) for m in window]
    events += [EventSpec.v_zero(), EventSpec.w_zero()]
    ctl = Controls(max_s=tau, sample_ds=tau / 512.0)
    fund = integrate(field_for(problem, NEWCOORDS), seed, events, ctl)
    period = 4.0 * tau if recipe.segment == "quarter" else 2.0 * tau
    orbit = PeriodicOrbit(family=spec, seed=seed, seed_parameter=rec.param,
                          quarter_or_half=recipe.segment, fundamental=fund,
                          residual=abs(rec.residual), full_period_s=period,
                          reconstructed=None)
    orbit.reconstructed = reconstruct_full(orbit)
    if spec.family in ("PP", "Z2"):
        # reported, never asserted: an orthogonal central-line crossing
        # means the segment is half of a B-family orbit
        vals = [abs(h.state.v) for h in fund.events
                if h.kind == "angle-crossing"
                and int(round(h.state.angle / _HALF_PI)) % 2 == 0]
        closest = min(vals) if vals else math.inf
        orbit.notes["euler_crossing_min_abs_v"] = closest
        orbit.notes["coincides_with_B"] = bool(closest < 1e-6)
    return orbit


def find_orbit(problem: ProblemSpec, family: FamilySpec, search: dict = None,
               workers: int = 1, exhaustive: bool = False,
               _retried: bool = False):
    """Scan the seed parameter, bracket the sign change of the terminal
    residual under the family's prescribed signature, and bisect.

    Returns the first orbit found, or every bracket's orbit as a list when
    exhaustive is set.  Raises OrbitNotFoundError (carrying the scan table)
    when no bracket matches, AmbiguousBracketError when the signature is
    unstable inside a bracket even after one grid refinement.
    """
    recipe = _recipe_for(family)
    cfg = dict(_default_search(problem, recipe))
    if search:
        cfg.update(search)
    params = _grid(recipe, cfg["param_lo"], cfg["param_hi"],
                   int(cfg["grid_points"]))

    tasks = [(problem, recipe, float(p)) for p in params]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_worker, tasks, chunksize=4))
    else:
        rows = [_scan_worker(t) for t in tasks]

    brackets = []
    for (p0, c0, _, f0), (p1, c1, _, f1) in zip(rows, rows[1:]):
        if c0 == c1 == "matched" and f0 * f1 < 0.0:
            brackets.append((p0, p1, f0))
    if not brackets:
        raise OrbitNotFoundError(
            "no %s bracket for %s in [%g, %g] over %d seeds"
            % (family, problem.kind, cfg["param_lo"], cfg["param_hi"],
               len(params)), scan=rows)

    found = []
    for lo, hi, f_lo in brackets:
        try:
            rec = _bisect(problem, recipe, lo, hi, f_lo)
        except AmbiguousBracketError:
            if _retried:
                raise
            refined = dict(cfg)
            refined["grid_points"] = 2 * int(cfg["grid_points"])
            return find_orbit(problem, family, refined, workers=workers,
                              exhaustive=exhaustive, _retried=True)
        found.append(_reconstruct_and_wrap(problem, family, recipe, rec))
        if not exhaustive:
            return found[0]
    return found


# -- reconstruction and verification -------------------------------------------


def _extend_mirror(samples):
    s_end, st_end = samples[-1]
    tb = round(st_end.angle / _HALF_PI) * _HALF_PI
    out = list(samples)
    for s, st in reversed(samples[:-1]):
        out.append((2.0 * s_end - s, dyn.sigma_line(tb, st)[0]))
    return out


def _extend_retrace(samples):
    s_end = samples[-1][0]
    out = list(samples)
    for s, st in reversed(samples[:-1]):
        out.append((2.0 * s_end - s, dyn.apply_symmetry("R1", st)[0]))
    return out


def reconstruct_full(orbit: PeriodicOrbit) -> Trajectory:
    """Assemble the full period from the fundamental segment.

    Quarter segments of brake families mirror about the terminal line and
    then about the new end line; Z-seeded quarters mirror then retrace
    under R1; half segments need a single mirror (S-seeded) or retrace
    (brake-to-brake).  The endpoint returns to the seed exactly for the
    retraced families and to the seed shifted by a full cover turn
    (theta +- 2 pi) for the mirrored ones.
    """
    recipe = _recipe_for(orbit.family)
    acc = list(orbit.fundamental.samples)
    if recipe.closure == "mirror-mirror":
        acc = _extend_mirror(_extend_mirror(acc))
    elif recipe.closure == "mirror-retrace":
        acc = _extend_retrace(_extend_mirror(acc))
    elif recipe.closure == "mirror":
        acc = _extend_mirror(acc)
    else:
        acc = _extend_retrace(acc)
    return Trajectory(samples=acc, events=[], termination="reconstructed")


def verify_periodicity(problem: ProblemSpec, orbit: PeriodicOrbit) -> dict:
    """Re-integrate the seed over one full period in a single pass.

    closure_error is the largest coordinate gap to the seed, with theta
    compared modulo the 2 pi cover period; energy_drift is the largest
    energy residual along the run.
    """
    period = orbit.full_period_s
    ctl = Controls(max_s=period, sample_ds=period / 1024.0)
    traj = integrate(field_for(problem, NEWCOORDS), orbit.seed, (), ctl)
    end, seed = traj.end_state, orbit.seed
    dth = abs(end.angle - seed.angle)
    dth = abs(dth - 2.0 * math.pi * round(dth / (2.0 * math.pi)))
    closure = max(abs(end.r - seed.r), abs(end.v - seed.v),
                  abs(end.w - seed.w), dth)
    drift = max(abs(dyn.energy_residual(problem, st))
                for _, st in traj.samples)
    return {"closure_error": closure, "energy_drift": drift}
