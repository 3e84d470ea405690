"""Command line front end: generate, verify, export, report.

Exit codes: 0 success, 1 usage or input error (message names the violated
constraint), 2 verification or audit failure.  A JSON config file can seed
any flag; explicit flags win on conflict.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_C, DEFAULT_T
from .io import (
    MalformedFileError,
    export_csv,
    export_svg,
    load_labyrinth,
    save_labyrinth,
    save_report,
)
from .nets import calibrated_class_count
from .shells import (
    ExhaustionPlan,
    ShellBudgetError,
    build_labyrinth,
    exhaustion_labyrinth,
    make_schedule,
)
from .verifier import EffortBudget, audit_labyrinth, min_escape_length


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated generation parameters; every downstream constraint is
    checked here at parse time so failures surface before any work."""

    dim: int = 2
    domain: str = "ball"
    axes: tuple[float, ...] | None = None
    s0: float = 0.5
    J: int = 3
    m: int = 0
    t: float = DEFAULT_T
    c: float = DEFAULT_C
    M: float | None = None
    budgets: tuple[float, ...] | None = None
    annuli: tuple[float, ...] | None = None
    patch_radius: float = 0.9
    eta: float = 0.08
    seed: int = 0

    def validate(self) -> None:
        if not (0.0 < self.c < 0.5):
            raise UsageError("constraint violated: 0 < c < 1/2")
        if self.t <= 1.0:
            raise UsageError("constraint violated: t > 1")
        if self.t * self.c >= 0.5:
            raise UsageError("constraint violated: t*c < 1/2")
        if not (0.0 < self.s0 < 1.0):
            raise UsageError("constraint violated: 0 < s0 < 1")
        if self.J < 1:
            raise UsageError("constraint violated: J >= 1")
        if self.domain == "ellipsoid":
            if not self.axes or len(self.axes) != self.dim \
                    or min(self.axes) <= 0.0:
                raise UsageError("constraint violated: ellipsoid needs dim "
                                 "positive semi-axes (SPD shape matrix)")
        if self.annuli is not None:
            if len(self.annuli) < 2 or any(
                    b <= a for a, b in zip(self.annuli, self.annuli[1:])):
                raise UsageError("constraint violated: annuli must increase "
                                 "strictly")


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="labyrinths", allow_abbrev=False)
    top.add_argument("--config", help="JSON config file; flags win on conflict")
    sub = top.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build a labyrinth and audit it")
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--domain", default="ball",
                     choices=["ball", "ellipsoid", "ellipse", "superellipse"])
    gen.add_argument("--axes", default=None,
                     help="ellipsoid semi-axes, comma separated")
    gen.add_argument("--s0", type=float, default=0.5)
    gen.add_argument("--J", type=int, default=3)
    gen.add_argument("--m", type=int, default=0,
                     help="sublevels per shell; 0 derives it from the nets")
    gen.add_argument("--t", type=float, default=DEFAULT_T)
    gen.add_argument("--c", type=float, default=DEFAULT_C)
    gen.add_argument("--M", type=float, default=None,
                     help="escape budget (drives smooth-domain schedules)")
    gen.add_argument("--Mn", default=None,
                     help="per-annulus budgets, comma separated")
    gen.add_argument("--annuli", default=None,
                     help="exhaustion radii, comma separated")
    gen.add_argument("--patch-radius", type=float, default=0.9)
    gen.add_argument("--eta", type=float, default=0.08)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="labyrinth.json")
    gen.add_argument("--audit-out", default=None)

    ver = sub.add_parser("verify", help="escape search plus audit of a file")
    ver.add_argument("file")
    ver.add_argument("--M", type=float, required=True)
    ver.add_argument("--seeds", type=int, default=4)
    ver.add_argument("--nodes", default=None,
                     help="node budgets, comma separated")
    ver.add_argument("--source", type=float, default=None,
                     help="source sphere radius (defaults from the domain)")
    ver.add_argument("--target", type=float, default=None)
    ver.add_argument("--report-out", default=None)

    exp = sub.add_parser("export", help="figure or table from a labyrinth file")
    exp.add_argument("file")
    exp.add_argument("--svg", default=None)
    exp.add_argument("--csv", default=None)
    exp.add_argument("--path-from", default=None,
                     help="verification report whose best path to overlay")
    exp.add_argument("--projection", default=None,
                     help="axis pair for dim > 2, e.g. 0,1")

    rep = sub.add_parser("report", help="run the structural audit and print it")
    rep.add_argument("file")
    rep.add_argument("--out", default=None)
    return top


def _apply_config(argv: list[str]) -> list[str]:
    """Inject config-file values as defaults; explicit flags still win."""
    probe = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return argv
    try:
        with open(known.config, "r", encoding="utf-8") as f:
            conf = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"config file unusable: {exc}") from exc
    if not isinstance(conf, dict):
        raise UsageError("config file must hold a JSON object")
    out = []
    skip = False
    for i, a in enumerate(argv):  # drop --config itself; subparsers never see it
        if skip:
            skip = False
            continue
        if a == "--config":
            skip = True
            continue
        if a.startswith("--config="):
            continue
        out.append(a)
    present = set(a.split("=")[0] for a in out if a.startswith("--"))
    insert_at = 1 if out and not out[0].startswith("-") else 0
    for key, val in conf.items():
        flag = f"--{key}"
        if flag in present or key == "config":
            continue
        out[insert_at:insert_at] = [flag, str(val)]
    return out


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(
        dim=args.dim, domain=args.domain,
        axes=tuple(_float_list(args.axes)) if args.axes else None,
        s0=args.s0, J=args.J, m=args.m, t=args.t, c=args.c, M=args.M,
        budgets=tuple(_float_list(args.Mn)) if args.Mn else None,
        annuli=tuple(_float_list(args.annuli)) if args.annuli else None,
        patch_radius=args.patch_radius, eta=args.eta, seed=args.seed)
    cfg.validate()
    return cfg


def cmd_generate(args) -> int:
    cfg = _config_from_args(args)
    seed = cfg.seed
    if cfg.annuli:
        rho = list(cfg.annuli)
        budgets = list(cfg.budgets) if cfg.budgets else \
            [cfg.M if cfg.M is not None else 0.0] * (len(rho) - 1)
        plan = ExhaustionPlan(rho=np.array(rho), budgets=np.array(budgets))
        try:
            results = exhaustion_labyrinth(plan, dim=cfg.dim, t=cfg.t,
                                           c=cfg.c, seed=seed)
        except ShellBudgetError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        all_pass = True
        for i, rec in enumerate(results):
            out = _sibling(args.out, f"-n{i}.json")
            save_labyrinth(rec["labyrinth"], out)
            audit = audit_labyrinth(rec["labyrinth"])
            all_pass &= audit["passed"]
            print(f"annulus {i}: shells={rec['shells']} "
                  f"best={rec['report']['best_length']} budget={rec['budget']} "
                  f"audit={'pass' if audit['passed'] else 'FAIL'} -> {out}")
            audit_out = _sibling(args.audit_out or _sibling(args.out, ".audit.json"),
                                 f"-n{i}.json")
            save_report({"audit": audit, "verification": rec["report"]},
                        audit_out)
        return 0 if all_pass else 2

    if cfg.domain == "ball":
        m = cfg.m or calibrated_class_count(cfg.dim, cfg.c, seed)
        sched = make_schedule(cfg.s0, cfg.J, m, cfg.t, cfg.c)
        lab = build_labyrinth(sched, cfg.dim, seed=seed)
    elif cfg.domain == "ellipsoid":
        from .domains import ellipsoid_domain, ellipsoid_labyrinth

        dom = ellipsoid_domain(np.diag([1.0 / a ** 2 for a in cfg.axes]))
        m = cfg.m or calibrated_class_count(cfg.dim, cfg.c, seed)
        sched = make_schedule(cfg.s0, cfg.J, m, cfg.t, cfg.c)
        lab = ellipsoid_labyrinth(dom, sched, seed=seed)
    else:
        from .domains import (
            CollarCollapseError,
            CoverageError,
            PRESETS,
            assemble_patch_labyrinth,
            patch_cover,
        )

        if cfg.dim != 2:
            raise UsageError("smooth presets are planar (dim 2)")
        if cfg.M is None:
            raise UsageError("--M is required for smooth domains")
        dom = PRESETS[cfg.domain]()
        try:
            cover = patch_cover(dom, cfg.patch_radius, cfg.eta)
            lab = assemble_patch_labyrinth(dom, cover, cfg.M, t=cfg.t,
                                           c=cfg.c, seed=seed)
        except (CoverageError, CollarCollapseError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    save_labyrinth(lab, args.out)
    audit = audit_labyrinth(lab)
    audit_out = args.audit_out or _sibling(args.out, ".audit.json")
    save_report(audit, audit_out)
    print(f"components={len(lab)} audit={'pass' if audit['passed'] else 'FAIL'} "
          f"-> {args.out} (+ {audit_out})")
    return 0 if audit["passed"] else 2


def _sibling(path: str, suffix: str) -> str:
    return (path[:-5] if path.endswith(".json") else path) + suffix


def cmd_verify(args) -> int:
    try:
        lab = load_labyrinth(args.file)
    except (MalformedFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    dom = lab.domain
    if args.source is not None and args.target is not None:
        source = {"kind": "sphere", "radius": args.source}
        target = {"kind": "sphere", "radius": args.target}
    elif dom.get("kind") == "annulus":
        source = {"kind": "sphere", "radius": dom["inner"]}
        target = {"kind": "sphere", "radius": dom["outer"]}
    elif dom.get("kind") in ("ball", "ellipsoid") and lab.schedule is not None:
        # ellipsoid labyrinths are stored in ball coordinates; the escape
        # search runs there and lengths transfer through the recorded
        # operator norms of the normalisation map
        source = {"kind": "sphere", "radius": lab.scale * lab.schedule.s0}
        target = {"kind": "sphere", "radius": lab.scale}
    else:
        print("error: no source/target given and none derivable from the "
              "domain", file=sys.stderr)
        return 1
    budgets = tuple(int(v) for v in _float_list(args.nodes)) if args.nodes \
        else EffortBudget.default(lab.dim).node_budgets
    effort = EffortBudget(seeds=tuple(range(args.seeds)), node_budgets=budgets)
    report = min_escape_length(lab, source, target, effort)
    audit = audit_labyrinth(lab)
    best = report["best_length"]
    ok = audit["passed"] and (best is None or best > args.M)
    out = {"budget_M": args.M, "verification": report, "audit": audit,
           "passed": ok}
    report_out = args.report_out or _sibling(args.file, ".report.json")
    save_report(out, report_out)
    print(f"best={best} budget={args.M} audit="
          f"{'pass' if audit['passed'] else 'FAIL'} -> "
          f"{'pass' if ok else 'FAIL'} (+ {report_out})")
    return 0 if ok else 2


def cmd_export(args) -> int:
    try:
        lab = load_labyrinth(args.file)
    except (MalformedFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.svg is None and args.csv is None:
        print("error: nothing to export; pass --svg and/or --csv",
              file=sys.stderr)
        return 1
    projection = None
    if args.projection:
        pair = [int(v) for v in args.projection.split(",")]
        if len(pair) != 2:
            print("error: projection must be two axes", file=sys.stderr)
            return 1
        projection = (pair[0], pair[1])
    if args.svg:
        if lab.dim != 2 and projection is None:
            print("error: SVG export beyond the plane needs --projection",
                  file=sys.stderr)
            return 1
        overlay = None
        if args.path_from:
            with open(args.path_from, "r", encoding="utf-8") as f:
                rep = json.load(f)
            best = rep.get("verification", rep).get("best_path")
            if best and best.get("polyline"):
                overlay = np.asarray(best["polyline"], dtype=float)
        export_svg(lab, args.svg, escape_path=overlay, projection=projection)
        print(f"svg -> {args.svg}")
    if args.csv:
        rows = export_csv(lab, args.csv)
        print(f"csv ({rows} rows) -> {args.csv}")
    return 0


def cmd_report(args) -> int:
    try:
        lab = load_labyrinth(args.file)
    except (MalformedFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    audit = audit_labyrinth(lab)
    if audit.get("empty"):
        print("labyrinth is empty: all checks hold vacuously")
    for chk in audit["checks"]:
        extras = {k: v for k, v in chk.items() if k not in ("name", "passed")}
        print(f"{'PASS' if chk['passed'] else 'FAIL'} {chk['name']} {extras}")
    if args.out:
        save_report(audit, args.out)
    print(f"audit={'pass' if audit['passed'] else 'FAIL'}")
    return 0 if audit["passed"] else 2


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "export":
            return cmd_export(args)
        return cmd_report(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
