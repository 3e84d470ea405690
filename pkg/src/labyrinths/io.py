"""Interchange formats: versioned JSON labyrinth files, reports, SVG, CSV.

Floats are serialised in decimal with 17 significant digits, which
round-trips IEEE doubles exactly and keeps files byte-stable across runs,
so regeneration with identical inputs produces identical bytes.
"""

from __future__ import annotations

import json

import numpy as np

from .geometry import FlatBall
from .nets import SeparatedNet
from .shells import Labyrinth, ShellSchedule

FORMAT_VERSION = 1


class MalformedFileError(ValueError):
    """Labyrinth file failed validation; the message names the first field."""


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        if not np.isfinite(x):
            raise ValueError("cannot serialise non-finite float")
        if x == 0.0:  # canonicalise the sign of zero so reloads are stable
            return "0"
        return format(float(x), ".17g")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return "null"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, np.ndarray):
        x = x.tolist()
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}"
                               for k, v in x.items()) + "}"
    raise TypeError(f"cannot serialise {type(x)!r}")


def dumps_canonical(doc: dict) -> str:
    return _fmt(doc) + "\n"


def labyrinth_to_doc(lab: Labyrinth) -> dict:
    comps = []
    for fb in lab.components:
        entry = {
            "center": fb.center.tolist(),
            "normal": fb.normal.tolist(),
            "radius": fb.radius,
            "level": {"j": fb.level[0], "k": fb.level[1], "p": fb.level[2]}
            if fb.level else None,
        }
        if fb.transform is not None:
            entry["transform"] = fb.transform.tolist()
        comps.append(entry)
    sched = None
    if lab.schedule is not None:
        s = lab.schedule
        sched = {"s0": s.s0, "s": s.s.tolist(), "m": s.m, "t": s.t, "c": s.c,
                 "a": s.a, "tangent_radii": s.tangent_radii.tolist()}
    nets = [{"r": n.r, "c": n.c, "m": n.m,
             "classes": [cls.tolist() for cls in n.classes]}
            for n in lab.nets]
    return {
        "version": FORMAT_VERSION,
        "dim": lab.dim,
        "domain": lab.domain,
        "schedule": sched,
        "components": comps,
        "seed": lab.seed,
        "scale": lab.scale,
        "kind": lab.kind,
        "nets": nets,
        "collar_widths": list(lab.collar_widths),
    }


def save_labyrinth(lab: Labyrinth, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_canonical(labyrinth_to_doc(lab)))


def _field(doc: dict, name: str, types) -> object:
    if name not in doc:
        raise MalformedFileError(f"missing field {name!r}")
    val = doc[name]
    if types is not None and not isinstance(val, types):
        raise MalformedFileError(f"field {name!r} has wrong type")
    return val


def doc_to_labyrinth(doc: dict) -> Labyrinth:
    if _field(doc, "version", int) != FORMAT_VERSION:
        raise MalformedFileError("field 'version' is unsupported")
    dim = _field(doc, "dim", int)
    if dim < 2:
        raise MalformedFileError("field 'dim' must be >= 2")
    domain = _field(doc, "domain", dict)
    comps = []
    for i, entry in enumerate(_field(doc, "components", list)):
        try:
            level = entry.get("level")
            lv = (level["j"], level["k"], level["p"]) if level else None
            tf = entry.get("transform")
            fb = FlatBall(center=np.asarray(entry["center"], dtype=float),
                          normal=np.asarray(entry["normal"], dtype=float),
                          radius=float(entry["radius"]),
                          level=lv,
                          transform=None if tf is None else np.asarray(tf, float))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedFileError(
                f"components[{i}] invalid: {exc}") from exc
        if fb.dim != dim:
            raise MalformedFileError(f"components[{i}].center has wrong dimension")
        comps.append(fb)
    sched = None
    sd = doc.get("schedule")
    if sd is not None:
        try:
            s = np.asarray(sd["s"], dtype=float)
            lower = np.concatenate([[sd["s0"]], s[:-1]])
            ks = np.arange(1, sd["m"] + 1)
            sublevels = lower[:, None] + ks[None, :] * (s - lower)[:, None] / (sd["m"] + 1)
            sched = ShellSchedule(
                s0=float(sd["s0"]), s=s, m=int(sd["m"]), t=float(sd["t"]),
                c=float(sd["c"]), a=float(sd["a"]), sublevels=sublevels,
                tangent_radii=np.asarray(sd["tangent_radii"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedFileError(f"schedule invalid: {exc}") from exc
    nets = []
    for nd in doc.get("nets", []):
        try:
            nets.append(SeparatedNet(
                dim=dim, r=float(nd["r"]), c=float(nd["c"]), m=int(nd["m"]),
                classes=[np.asarray(cls, dtype=float) for cls in nd["classes"]]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedFileError(f"nets entry invalid: {exc}") from exc
    return Labyrinth(dim=dim, domain=domain, components=comps, schedule=sched,
                     nets=nets, seed=int(doc.get("seed", 0)),
                     scale=float(doc.get("scale", 1.0)),
                     kind=str(doc.get("kind", "shell")),
                     collar_widths=[float(w) for w in
                                    doc.get("collar_widths", [])])


def load_labyrinth(path: str) -> Labyrinth:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise MalformedFileError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedFileError("top level must be an object")
    return doc_to_labyrinth(doc)


def save_report(report: dict, path: str) -> None:
    clean = _jsonable(report)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_canonical(clean))


def _jsonable(obj):
    from .verifier import EscapePath

    if isinstance(obj, EscapePath):
        return {"length": obj.length, "clearance": obj.clearance,
                "polyline": obj.polyline.tolist()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


# ---------------------------------------------------------------------------
# figure and table export


def _svg_transform_2d(lab: Labyrinth):
    """Map from stored component coordinates to drawing coordinates."""
    dom = lab.domain
    if dom.get("kind") == "ellipsoid" and "to_ball" in dom:
        T = np.asarray(dom["to_ball"], dtype=float)
        return np.linalg.inv(T)
    return np.eye(lab.dim)


def export_svg(lab: Labyrinth, path: str, escape_path=None,
               projection: tuple[int, int] | None = None,
               unit: float = 1000.0) -> dict:
    """Draw the domain outline, faint sublevel circles, components, path.

    Components are one stroke each; the viewBox tightly bounds the domain
    scaled so the unit length is 1000 drawing units.  For dim > 2 a
    projection pair of axes must be given.
    """
    if lab.dim != 2 and projection is None:
        raise ValueError("SVG export beyond the plane needs a projection pair")
    axes = projection if projection is not None else (0, 1)
    M = _svg_transform_2d(lab) if lab.dim == 2 else np.eye(lab.dim)

    def pt(x):
        y = M @ x
        return unit * y[axes[0]], -unit * y[axes[1]]

    bound = _domain_bound(lab)
    half = unit * bound * 1.0
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(-half)} {_fmt(-half)} {_fmt(2 * half)} {_fmt(2 * half)}">',
    ]
    lines.extend(_domain_outline_svg(lab, unit))
    if lab.schedule is not None:
        for j in range(lab.schedule.J):
            for k in range(lab.schedule.m):
                r = unit * lab.scale * lab.schedule.sublevels[j, k]
                lines.append(
                    f'<circle cx="0" cy="0" r="{_fmt(r)}" fill="none" '
                    f'stroke="#dddddd" stroke-width="1"/>')
    for fb in lab.components:
        if lab.dim == 2:
            u = np.array([-fb.normal[1], fb.normal[0]])
            a = pt(fb.center - fb.radius * u)
            b = pt(fb.center + fb.radius * u)
            lines.append(
                f'<line x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" '
                f'x2="{_fmt(b[0])}" y2="{_fmt(b[1])}" stroke="#000000" '
                f'stroke-width="3" stroke-linecap="round" class="component"/>')
        else:
            from .geometry import flatball_rim_points

            rim = flatball_rim_points(fb, 32)
            pts = " ".join(f"{_fmt(px)},{_fmt(py)}"
                           for px, py in (pt(x) for x in rim))
            lines.append(f'<polygon points="{pts}" fill="none" '
                         f'stroke="#000000" stroke-width="2" class="component"/>')
    if escape_path is not None:
        poly = escape_path.polyline if hasattr(escape_path, "polyline") \
            else np.asarray(escape_path, dtype=float)
        pts = " ".join(f"{_fmt(px)},{_fmt(py)}"
                       for px, py in (pt(x) for x in poly))
        lines.append(f'<polyline points="{pts}" fill="none" stroke="#cc0000" '
                     f'stroke-width="2"/>')
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    return {"strokes": len(lab.components), "viewbox_half": half}


def _domain_bound(lab: Labyrinth) -> float:
    dom = lab.domain
    kind = dom.get("kind")
    if kind == "annulus":
        return float(dom["outer"])
    if kind == "ellipsoid":
        A = np.asarray(dom["matrix"], dtype=float)
        return float(1.0 / np.sqrt(np.linalg.eigvalsh(A).min()))
    if kind == "smooth":
        from .domains import _domain_extent, resolve_domain

        return _domain_extent(resolve_domain(dom))
    return max(1.0, lab.scale)


def _domain_outline_svg(lab: Labyrinth, unit: float) -> list[str]:
    dom = lab.domain
    kind = dom.get("kind")
    style = 'fill="none" stroke="#555555" stroke-width="2"'
    if kind == "annulus":
        return [
            f'<circle cx="0" cy="0" r="{_fmt(unit * dom["inner"])}" {style}/>',
            f'<circle cx="0" cy="0" r="{_fmt(unit * dom["outer"])}" {style}/>',
        ]
    if kind == "ball":
        return [f'<circle cx="0" cy="0" r="{_fmt(unit * max(1.0, lab.scale))}" {style}/>']
    if kind in ("ellipsoid", "smooth"):
        from .domains import boundary_samples, resolve_domain

        bnd = boundary_samples(resolve_domain(dom), 256)
        pts = " ".join(f"{_fmt(unit * p[0])},{_fmt(-unit * p[1])}" for p in bnd)
        return [f'<polygon points="{pts}" {style}/>']
    return []


def export_csv(lab: Labyrinth, path: str) -> int:
    """One component per row; returns the number of data rows."""
    dim = lab.dim
    header = (["j", "k", "p", "radius"]
              + [f"center_{i}" for i in range(dim)]
              + [f"normal_{i}" for i in range(dim)])
    rows = [",".join(header)]
    for fb in lab.components:
        j, k, p = fb.level if fb.level else (0, 0, 0)
        vals = [str(j), str(k), str(p), format(fb.radius, ".17g")]
        vals += [format(v, ".17g") for v in fb.center]
        vals += [format(v, ".17g") for v in fb.normal]
        rows.append(",".join(vals))
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(rows) + "\n")
    return len(lab.components)
