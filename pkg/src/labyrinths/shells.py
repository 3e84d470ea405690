"""Concentric-shell labyrinths of flat tangent discs inside the unit ball.

Each shell j of the schedule occupies the spherical band (s_{j-1}, s_j) and
hosts one separated family: class k is scaled onto the sublevel sphere of
radius s_{j,k} and every class point receives the disc tangent to that
sphere at the point, with the shell's tangent radius.  The tangent radius
constant is sized so a disc never reaches the next sublevel sphere, which
stacks the discs into radially disjoint layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .config import DEFAULT_C, DEFAULT_T, RADIUS_SAFETY
from .geometry import FlatBall
from .nets import SeparatedNet, build_separated_families


class DegenerateScheduleError(ValueError):
    """Sublevel radii fail to increase strictly."""


class ShellBudgetError(RuntimeError):
    """Verifier-in-the-loop shell growth hit its cap before meeting budget."""

    def __init__(self, message, best_length=None):
        super().__init__(message)
        self.best_length = best_length


class IntegrityError(RuntimeError):
    """Construction invariant violated; indicates a bug, not bad input."""


@dataclass(eq=False)
class ShellSchedule:
    """Radii and constants of the shell construction.

    s0: innermost radius; s: shell radii s_1 < ... < s_J < 1;
    m: sublevels (= net classes) per shell; t: slack factor > 1;
    c: covering fraction with t*c < 1/2; a: tangent radius constant.
    sublevels[j-1, k-1] holds s_{j,k} = s_{j-1} + k (s_j - s_{j-1})/(m+1).
    """

    s0: float
    s: np.ndarray
    m: int
    t: float
    c: float
    a: float = 0.0
    sublevels: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    tangent_radii: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def J(self) -> int:
        return len(self.s)

    def radius_below(self, j: int) -> float:
        """s_{j-1}: the sphere just below shell j (s_0 for j = 1)."""
        return self.s0 if j == 1 else float(self.s[j - 2])

    def sublevel_above(self, j: int, k: int) -> float:
        """s_{j,k+1} with the convention s_{j,m+1} = s_j."""
        if k >= self.m:
            return float(self.s[j - 1])
        return float(self.sublevels[j - 1, k])

    def gaps(self) -> np.ndarray:
        """Shell widths s_j - s_{j-1}."""
        lower = np.concatenate([[self.s0], self.s[:-1]])
        return self.s - lower

    def validate(self) -> None:
        if not (0.0 < self.s0 < 1.0):
            raise ValueError("s0 must lie in (0, 1)")
        if self.m < 1:
            raise ValueError("need at least one sublevel per shell")
        if self.t <= 1.0:
            raise ValueError("slack factor t must exceed 1")
        if not (0.0 < self.c < 0.5):
            raise ValueError("covering fraction c must lie in (0, 1/2)")
        if self.t * self.c >= 0.5:
            raise ValueError("t*c < 1/2 is required")
        radii = np.concatenate([[self.s0], self.s])
        if np.any(np.diff(radii) <= 0.0) or radii[-1] >= 1.0:
            raise ValueError("shell radii must increase strictly and stay below 1")
        for j in range(1, self.J + 1):
            for k in range(1, self.m + 1):
                s_jk = float(self.sublevels[j - 1, k - 1])
                nxt = self.sublevel_above(j, k)
                if s_jk ** 2 + self.tangent_radii[j - 1] ** 2 >= nxt ** 2:
                    raise ValueError(
                        f"tangent disc at shell {j} sublevel {k} reaches the "
                        "next sublevel sphere")


def compute_tangent_radius_constant(s0: float, s: np.ndarray, m: int) -> float:
    """Largest safe tangent radius constant for the given radii.

    A disc tangent at radius s_{j,k} with radius rho has points of norm up
    to sqrt(s_{j,k}^2 + rho^2); keeping that below s_{j,k+1} for every j, k
    bounds the constant by min sqrt((s_{j,k+1}^2 - s_{j,k}^2)/(s_j-s_{j-1})),
    which is then shrunk by the safety factor so strictness survives
    floating point.
    """
    s = np.asarray(s, dtype=float)
    lower = np.concatenate([[s0], s[:-1]])
    gaps = s - lower
    worst = np.inf
    for j in range(len(s)):
        ks = np.arange(1, m + 1)
        levels = lower[j] + ks * gaps[j] / (m + 1)
        above = np.concatenate([levels[1:], [s[j]]])
        if np.any(above <= levels):
            raise DegenerateScheduleError("sublevel radii are not increasing")
        worst = min(worst, float(np.min((above ** 2 - levels ** 2) / gaps[j])))
    return RADIUS_SAFETY * float(np.sqrt(worst))


def schedule_from_radii(s0: float, s, m: int, t: float = DEFAULT_T,
                        c: float = DEFAULT_C) -> ShellSchedule:
    """Schedule with explicit shell radii; computes sublevels, a and r_j."""
    s = np.asarray(s, dtype=float)
    lower = np.concatenate([[s0], s[:-1]])
    gaps = s - lower
    ks = np.arange(1, m + 1)
    sublevels = lower[:, None] + ks[None, :] * gaps[:, None] / (m + 1)
    a = compute_tangent_radius_constant(s0, s, m)
    sched = ShellSchedule(s0=float(s0), s=s, m=int(m), t=float(t), c=float(c),
                          a=a, sublevels=sublevels,
                          tangent_radii=a * np.sqrt(gaps))
    sched.validate()
    return sched


def make_schedule(s0: float, J: int, m: int, t: float = DEFAULT_T,
                  c: float = DEFAULT_C) -> ShellSchedule:
    """Default schedule s_j = 1 - (1 - s0)/(j + 1), j = 1..J.

    The shell widths are (1-s0)/(j(j+1)), so the partial sums of their
    square roots diverge like sqrt(1-s0) * log J, which is what makes long
    schedules force unbounded escape length.
    """
    if not (0.0 < s0 < 1.0):
        raise ValueError("s0 must lie in (0, 1)")
    if J < 1:
        raise ValueError("need at least one shell")
    j = np.arange(1, J + 1)
    return schedule_from_radii(s0, 1.0 - (1.0 - s0) / (j + 1), m, t, c)


def sqrt_gap_partial_sums(schedule: ShellSchedule) -> np.ndarray:
    """Cumulative sums of sqrt(s_j - s_{j-1})."""
    return np.cumsum(np.sqrt(schedule.gaps()))


@dataclass(eq=False)
class Labyrinth:
    """Ordered union of flat tangent discs with its construction record.

    Components are listed in lexicographic (shell, sublevel, point) order;
    `scale` maps the unit-ball construction onto the actual domain (annulus
    labyrinths are built in ball coordinates and scaled outward).
    """

    dim: int
    domain: dict
    components: list[FlatBall]
    schedule: ShellSchedule | None = None
    nets: list[SeparatedNet] = field(default_factory=list)
    seed: int = 0
    scale: float = 1.0
    kind: str = "shell"
    collar_widths: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.components)

    @property
    def is_empty(self) -> bool:
        return len(self.components) == 0


def empty_labyrinth(dim: int, domain: dict | None = None) -> Labyrinth:
    return Labyrinth(dim=dim, domain=domain or {"kind": "ball"}, components=[])


def shell_net_separation(schedule: ShellSchedule, j: int) -> float:
    """Unit-sphere separation requested from the shell-j family.

    2 t r_j divided by the shell's inner radius, so that after scaling the
    class onto any sublevel sphere of the shell the centre distances are
    still at least 2 t r_j.  (At placement radii near 1 this reduces to the
    plain 2 t r_j rule.)
    """
    r_j = float(schedule.tangent_radii[j - 1])
    return 2.0 * schedule.t * r_j / schedule.radius_below(j)


def build_shell(schedule: ShellSchedule, j: int, dim: int,
                seed: int = 0) -> tuple[list[FlatBall], SeparatedNet]:
    """Discs of shell j: class k tangent to the sublevel-k sphere.

    Each emitted disc is tangent to its sphere (normal = centre direction,
    centre norm = s_{j,k}) with radius r_j, and is tagged (j, k, p) by its
    class and position.
    """
    if not (1 <= j <= schedule.J):
        raise ValueError(f"shell index {j} outside 1..{schedule.J}")
    net = build_separated_families(dim, shell_net_separation(schedule, j),
                                   schedule.c, seed=seed,
                                   target_m=schedule.m)
    r_j = float(schedule.tangent_radii[j - 1])
    balls = []
    for k, cls in enumerate(net.classes, start=1):
        if k > schedule.m:
            break
        s_jk = float(schedule.sublevels[j - 1, k - 1])
        for p, direction in enumerate(cls):
            balls.append(FlatBall(center=s_jk * direction, normal=direction,
                                  radius=r_j, level=(j, k, p)))
    return balls, net


def build_labyrinth(schedule: ShellSchedule | None, dim: int, seed: int = 0,
                    domain: dict | None = None, scale: float = 1.0) -> Labyrinth:
    """All shells of the schedule, concatenated in lexicographic order.

    When the colouring of some shell needs more classes than the schedule
    has sublevels, the schedule is rebuilt with the larger class count and
    the construction restarts (at most a few rounds; normally the class
    count is scale-free and the first pass stands).
    """
    domain = domain or {"kind": "ball"}
    if schedule is None or schedule.J == 0:
        return empty_labyrinth(dim, domain)
    for _ in range(4):
        components: list[FlatBall] = []
        nets: list[SeparatedNet] = []
        needed = schedule.m
        for j in range(1, schedule.J + 1):
            balls, net = build_shell(schedule, j, dim, seed=seed)
            needed = max(needed, net.m)
            components.extend(balls)
            nets.append(net)
        if needed == schedule.m:
            break
        schedule = schedule_from_radii(schedule.s0, schedule.s, needed,
                                       schedule.t, schedule.c)
    else:
        raise RuntimeError("class count failed to stabilise across rebuilds")
    _integrity_check(components, schedule)
    if scale != 1.0:
        components = [replace(fb, center=scale * fb.center,
                              radius=scale * fb.radius) for fb in components]
    return Labyrinth(dim=dim, domain=domain, components=components,
                     schedule=schedule, nets=nets, seed=seed, scale=scale)


def _integrity_check(components: list[FlatBall], schedule: ShellSchedule) -> None:
    """Bug trap: the two facts that make all components pairwise disjoint.

    Sublevel stacking (disc never reaches the next sublevel sphere) is part
    of schedule validation; here the same-sublevel centre separations are
    re-checked, since scaled separation >= 2 t r_j puts the perpendicular
    bisector hyperplane strictly between any two same-sublevel discs.
    Failure means a construction bug, never bad input.
    """
    from scipy.spatial import cKDTree

    groups: dict[tuple[int, int], list[np.ndarray]] = {}
    for fb in components:
        groups.setdefault(fb.level[:2], []).append(fb.center)
    for (j, _k), centers in groups.items():
        if len(centers) < 2:
            continue
        arr = np.asarray(centers)
        dd, _ = cKDTree(arr).query(arr, k=2)
        need = 2.0 * schedule.t * float(schedule.tangent_radii[j - 1])
        if dd[:, 1].min() < need * (1.0 - 1e-9):
            raise IntegrityError(
                f"same-sublevel centres at shell {j} closer than 2*t*r_j")


def truncate(lab: Labyrinth, J_lo: int, J_hi: int) -> tuple[Labyrinth, float]:
    """Keep shells J_lo..J_hi; also return the inner clearance radius.

    Every kept component lies strictly outside the ball of the returned
    radius (scale times s_{J_lo - 1}), which is what makes the truncated
    labyrinth separable from any compact set inside it.
    """
    if lab.schedule is None:
        raise ValueError("cannot truncate a labyrinth without a schedule")
    if not (1 <= J_lo <= J_hi <= lab.schedule.J):
        raise ValueError("truncation range must satisfy 1 <= J_lo <= J_hi <= J")
    kept = [fb for fb in lab.components if J_lo <= fb.level[0] <= J_hi]
    sched = schedule_from_radii(lab.schedule.radius_below(J_lo),
                                lab.schedule.s[J_lo - 1:J_hi],
                                lab.schedule.m, lab.schedule.t, lab.schedule.c)
    # Keep the original tangent radii: the kept discs were built with them.
    sched = replace(sched, a=lab.schedule.a,
                    tangent_radii=lab.schedule.tangent_radii[J_lo - 1:J_hi])
    new = Labyrinth(dim=lab.dim, domain=dict(lab.domain), components=kept,
                    schedule=sched, nets=lab.nets[J_lo - 1:J_hi],
                    seed=lab.seed, scale=lab.scale, kind=lab.kind)
    clearance = lab.scale * lab.schedule.radius_below(J_lo)
    return new, clearance


@dataclass(eq=False)
class ExhaustionPlan:
    """Exhaustion radii rho_1 < ... < rho_n < ... and per-annulus budgets."""

    rho: np.ndarray
    budgets: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.budgets = np.asarray(self.budgets, dtype=float)
        if np.any(np.diff(self.rho) <= 0.0) or self.rho[-1] > 1.0 or self.rho[0] <= 0.0:
            raise ValueError("exhaustion radii must increase strictly within (0, 1]")
        if len(self.budgets) != len(self.rho) - 1:
            raise ValueError("need one budget per consecutive annulus")
        if np.any(self.budgets < 0.0):
            raise ValueError("budgets must be nonnegative")


def annulus_labyrinth(rho_in: float, rho_out: float, J: int, m: int = 2,
                      dim: int = 2, t: float = DEFAULT_T, c: float = DEFAULT_C,
                      seed: int = 0, uniform: bool = True) -> Labyrinth:
    """Shell labyrinth filling the open annulus rho_in < |x| < rho_out.

    Built in unit-ball coordinates with s0 = rho_in/rho_out and scaled by
    rho_out, so every tangent disc stays tangent to its (scaled) sphere.
    Annuli default to equal-width shells: inside a fixed band that spreads
    the forced detours evenly and keeps every inter-sublevel corridor at
    the same, samplable width (the harmonic default would shrink the outer
    corridors below any fixed search resolution).
    """
    s0 = rho_in / rho_out
    if uniform:
        j = np.arange(1, J + 1)
        sched = schedule_from_radii(s0, s0 + j * (1.0 - s0) / (J + 1), m, t, c)
    else:
        sched = make_schedule(s0, J, m, t, c)
    domain = {"kind": "annulus", "inner": float(rho_in), "outer": float(rho_out)}
    return build_labyrinth(sched, dim, seed=seed, domain=domain, scale=rho_out)


def exhaustion_labyrinth(plan: ExhaustionPlan, dim: int = 2,
                         t: float = DEFAULT_T, c: float = DEFAULT_C,
                         seed: int = 0, shell_cap: int = 32,
                         effort=None, search_effort=None,
                         m_start: int = 2) -> list[dict]:
    """One labyrinth per annulus, each verified to exceed its budget.

    Verifier-in-the-loop replaces the non-constructive "large enough" shell
    count: a cheap probe search estimates the forced escape length, the
    shell count grows by quadratic extrapolation (forced length scales like
    sqrt(J) for equal-width shells), and a candidate stands only when the
    full-effort search actually finds a shortest escape path measuring
    above the budget.  A disconnected roadmap (no path found at all) is
    recorded in the history but never accepted as success, since it says
    nothing about path lengths.  Raises :class:`ShellBudgetError` with the
    best length achieved if the cap is hit.  Returns a list of {labyrinth,
    report, budget, shells, search_history} records.
    """
    from .verifier import EffortBudget, min_escape_length

    plan.__post_init__()
    effort = effort or EffortBudget.default(dim)
    search_effort = search_effort or EffortBudget.probe(dim)
    results = []
    for i in range(len(plan.rho) - 1):
        rho_in, rho_out = float(plan.rho[i]), float(plan.rho[i + 1])
        budget = float(plan.budgets[i])
        source = {"kind": "sphere", "radius": rho_in}
        target = {"kind": "sphere", "radius": rho_out}
        J = 1
        tried: list[dict] = []
        best_report = None
        while True:
            lab = annulus_labyrinth(rho_in, rho_out, J, m_start, dim, t, c, seed)
            probe = min_escape_length(lab, source, target, search_effort)
            found = probe["best_length"]
            tried.append({"shells": J, "probe_length": found})
            if found is None or found > budget:
                report = min_escape_length(lab, source, target, effort)
                tried[-1]["confirmed_length"] = report["best_length"]
                # only a path actually found and measured above the budget
                # stops the loop; an unreachable roadmap (None) is recorded
                # but never accepted as evidence
                if report["best_length"] is not None \
                        and report["best_length"] > budget:
                    best_report = report
                    break
                found = report["best_length"]
            if J >= shell_cap:
                best = max((r.get("confirmed_length") or r["probe_length"] or 0.0
                            for r in tried), default=None)
                raise ShellBudgetError(
                    f"annulus ({rho_in}, {rho_out}): shell cap {shell_cap} "
                    f"reached with best escape length {best} <= budget {budget}",
                    best_length=best)
            if found is not None and found > 0.0:
                guess = int(np.ceil(J * (budget / found) ** 2 * 1.1))
            else:
                guess = J + max(3, J // 2)
            J = int(np.clip(guess, J + 1, min(shell_cap, max(J + 3, 2 * J))))
        results.append({"labyrinth": lab, "report": best_report,
                        "budget": budget, "shells": J,
                        "search_history": tried})
    return results
