#!/usr/bin/env python3
"""Writes the benchmark scenario files into scenarios/."""
import itertools
import json
import math
import pathlib


def lattice(lo, hi, spacing, keep):
    axes = [range(math.ceil(l / spacing), math.floor(h / spacing) + 1) for l, h in zip(lo, hi)]
    for idx in itertools.product(*axes):
        p = [i * spacing for i in idx]
        if keep(p):
            yield p


def nearest(points, mouth, n):
    pts = sorted(points, key=lambda p: (math.dist(p, mouth), p))
    if len(pts) < n:
        raise SystemExit(f"only {len(pts)} free lattice points, need {n}")
    return pts[:n]


def outside_boxes(boxes, margin):
    def keep(p):
        return all(any(x < l - margin or x > h + margin for x, l, h in zip(p, b[0], b[1])) for b in boxes)
    return keep


def group(start_region, start_mouth, goal_region, goal_mouth, n, spacing, keep):
    starts = nearest(lattice(*start_region, spacing, keep), start_mouth, n)
    goals = nearest(lattice(*goal_region, spacing, keep), goal_mouth, n)[::-1]
    return [{"start": s, "goal": g} for s, g in zip(starts, goals)]


def corridor_2d():
    w, h, r = 750, 480, 5
    x0, x1, y0, y1 = 275, 475, 231, 249
    boxes = [([x0, 0], [x1, y0]), ([x0, y1], [x1, h])]
    keep = outside_boxes(boxes, 2 * r)
    left, right = [x0 - 20, 240], [x1 + 20, 240]
    agents = group(([2 * r, 240 + 2 * r], [x0 - 50, h - 2 * r]), left,
                   ([x1 + 50, 240 + 2 * r], [w - 2 * r, h - 2 * r]), right, 48, 14, keep)
    agents += group(([x1 + 50, 2 * r], [w - 2 * r, 240 - 2 * r]), right,
                    ([2 * r, 2 * r], [x0 - 50, 240 - 2 * r]), left, 48, 14, keep)
    return {
        "name": "corridor_2d",
        "dimension": 2,
        "bounds": {"lo": [0, 0], "hi": [w, h]},
        "seed": 1,
        "limits": {"radius": r, "v_max": 3, "a_max": 2},
        "obstacles": [{"box": {"lo": lo, "hi": hi}} for lo, hi in boxes],
        "agents": agents,
    }


def duct_3d():
    w, d, h, r = 150, 80, 80, 3
    x0, x1 = 65, 85
    c, half = 40, 8
    boxes = [([x0, 0, 0], [x1, d, c - half]), ([x0, 0, c + half], [x1, d, h]),
             ([x0, 0, c - half], [x1, c - half, c + half]), ([x0, c + half, c - half], [x1, d, c + half])]
    keep = outside_boxes(boxes, 2 * r)
    left, right = [x0 - 12, c, c], [x1 + 12, c, c]
    agents = group(([2 * r, 2 * r, c + 2 * r], [x0 - 25, d - 2 * r, h - 2 * r]), left,
                   ([x1 + 25, 2 * r, c + 2 * r], [w - 2 * r, d - 2 * r, h - 2 * r]), right, 20, 9, keep)
    agents += group(([x1 + 25, 2 * r, 2 * r], [w - 2 * r, d - 2 * r, c - 2 * r]), right,
                    ([2 * r, 2 * r, 2 * r], [x0 - 25, d - 2 * r, c - 2 * r]), left, 20, 9, keep)
    return {
        "name": "duct_3d",
        "dimension": 3,
        "bounds": {"lo": [0, 0, 0], "hi": [w, d, h]},
        "seed": 1,
        "limits": {"radius": r, "v_max": 2, "a_max": 1},
        "obstacles": [{"box": {"lo": lo, "hi": hi}} for lo, hi in boxes],
        "agents": agents,
    }


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "scenarios"
    out.mkdir(exist_ok=True)
    for scenario in (corridor_2d(), duct_3d()):
        lines = [json.dumps({k: v for k, v in scenario.items() if k not in ("obstacles", "agents")}, indent=2)[:-2] + ","]
        for key in ("obstacles", "agents"):
            items = ",\n    ".join(json.dumps(x) for x in scenario[key])
            lines.append(f'  "{key}": [\n    {items}\n  ]' + ("," if key == "obstacles" else ""))
        lines.append("}")
        (out / f"{scenario['name']}.json").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
