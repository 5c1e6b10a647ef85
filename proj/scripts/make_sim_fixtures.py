#!/usr/bin/env python3
"""Writes the simulator fixtures under fixtures/sim/."""

import json
import math
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures" / "sim"


def pose(t, q=(1.0, 0.0, 0.0, 0.0)):
    return {"q": list(q), "t": [round(v, 6) for v in t]}


def random_quat(rng):
    u1, u2, u3 = rng.random(), rng.random(), rng.random()
    a, b = math.sqrt(1 - u1), math.sqrt(u1)
    return (b * math.cos(2 * math.pi * u3), a * math.sin(2 * math.pi * u2),
            a * math.cos(2 * math.pi * u2), b * math.sin(2 * math.pi * u3))


def box(lo, hi):
    return {"min": list(lo), "max": list(hi)}


def box_cloud(lo, hi, spacing):
    size = [h - l for l, h in zip(lo, hi)]
    centre = [(l + h) / 2 for l, h in zip(lo, hi)]
    return {"box": {"size": size, "spacing": spacing, "pose": pose(centre)}}


def wall_with_hole(centre_y, centre_z, side, x0=-0.01, x1=0.01, extent=0.5):
    h = side / 2
    y0, y1, z0, z1 = centre_y - h, centre_y + h, centre_z - h, centre_z + h
    return [
        ((x0, -extent, -extent), (x1, y0, extent)),
        ((x0, y1, -extent), (x1, extent, extent)),
        ((x0, y0, -extent), (x1, y1, z0)),
        ((x0, y0, z1), (x1, y1, extent)),
    ]


def write(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=1) + "\n")


def planner_suite():
    rng = random.Random(20240611)
    part = (0.06, 0.04, 0.03)
    diameter = math.sqrt(sum(v * v for v in part))
    side = 3 * diameter
    bounds = box((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5))
    for i in range(20):
        cy = rng.uniform(-0.5 + side, 0.5 - side)
        cz = rng.uniform(-0.5 + side, 0.5 - side)
        pieces = wall_with_hole(cy, cz, side)
        world = {"clearance": 0.005, "bounds": bounds}
        if i % 2 == 0:
            world["boxes"] = [box(lo, hi) for lo, hi in pieces]
        else:
            world["obstacles"] = [box_cloud(lo, hi, 0.008) for lo, hi in pieces]
        start = (rng.uniform(-0.4, -0.2), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
        goal = (rng.uniform(0.2, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
        write(ROOT / "plan" / f"wall_{i:02d}.json", {
            "name": f"wall_{i:02d}",
            "world": world,
            "cloud": {"box": {"size": list(part), "spacing": 0.01}},
            "start": pose(start, random_quat(rng)),
            "goal": pose(goal, random_quat(rng)),
            "planner": {"seed": i, "max_iterations": 50000},
            "expect": "success",
        })
    # goal inside a closed shell
    t = 0.02
    lo, hi = (0.1, -0.15, -0.15), (0.4, 0.15, 0.15)
    shell = [
        ((lo[0], lo[1], lo[2]), (hi[0], hi[1], lo[2] + t)),
        ((lo[0], lo[1], hi[2] - t), (hi[0], hi[1], hi[2])),
        ((lo[0], lo[1], lo[2]), (hi[0], lo[1] + t, hi[2])),
        ((lo[0], hi[1] - t, lo[2]), (hi[0], hi[1], hi[2])),
        ((lo[0], lo[1], lo[2]), (lo[0] + t, hi[1], hi[2])),
        ((hi[0] - t, lo[1], lo[2]), (hi[0], hi[1], hi[2])),
    ]
    write(ROOT / "enclosed_goal.json", {
        "name": "enclosed_goal",
        "world": {"clearance": 0.005, "bounds": bounds, "boxes": [box(a, b) for a, b in shell]},
        "cloud": {"box": {"size": list(part), "spacing": 0.01}},
        "start": pose((-0.3, 0.0, 0.0)),
        "goal": pose((0.25, 0.0, 0.0)),
        "planner": {"seed": 3, "max_iterations": 50000},
        "expect": "no_path",
    })


GAP = 0.0075


def bench():
    """Seat on two legs joined by a stretcher; every joint leaves a GAP."""
    leg = (0.04, 0.28, 0.42)
    leg_z = GAP + leg[2] / 2
    inner = 0.25 - leg[0] / 2
    stretcher = (2 * inner - 2 * GAP, 0.04, 0.04)
    seat = (0.6, 0.3, 0.03)
    seat_z = GAP + leg[2] + GAP + seat[2] / 2
    parts = [
        {"id": 0, "cloud": {"box": {"size": list(seat), "spacing": 0.01}}},
        {"id": 1, "cloud": {"box": {"size": list(leg), "spacing": 0.01}}},
        {"id": 2, "cloud": {"box": {"size": list(leg), "spacing": 0.01}}},
        {"id": 3, "cloud": {"box": {"size": list(stretcher), "spacing": 0.01}}},
    ]
    targets = {
        "0": pose((0, 0, seat_z)),
        "1": pose((-0.25, 0, leg_z)),
        "2": pose((0.25, 0, leg_z)),
        "3": pose((0, 0, 0.15)),
    }
    initial = {
        "0": pose((0.0, 0.8, GAP + seat[2] / 2)),
        "1": pose((-0.8, -0.6, leg_z)),
        "2": pose((-0.8, 0.6, leg_z)),
        "3": pose((0.8, -0.6, GAP + 0.02)),
    }
    world = {
        "clearance": 0.005,
        "bounds": box((-1.2, -1.2, 0.0), (1.2, 1.2, 1.2)),
        "boxes": [box((-1.5, -1.5, -0.1), (1.5, 1.5, 0.0))],
    }
    return {
        "name": "bench",
        "graph": "[[[1,3],2],0]",
        "order": [[1, 3], [1, 2, 3], [0, 1, 2, 3]],
        "world": world,
        "parts": parts,
        "initial": initial,
        "targets": targets,
        "planner": {"max_iterations": 50000},
        "seed": 1,
    }


def taxonomy():
    b = bench()
    write(ROOT / "bench_success.json", b)

    far = json.loads(json.dumps(b))
    far["name"] = "bench_pose_too_far"
    far["ground_truth"] = json.loads(json.dumps(b["targets"]))
    far["targets"]["0"]["t"][0] += 0.2
    write(ROOT / "bench_pose_too_far.json", far)

    # two blocks; part 1's target sits inside a closed shell
    block = {"box": {"size": [0.1, 0.1, 0.1], "spacing": 0.02}}
    t = 0.02
    lo, hi = (0.02, -0.12, 0.0), (0.3, 0.12, 0.3)
    shell = [
        ((lo[0], lo[1], hi[2] - t), (hi[0], hi[1], hi[2])),
        ((lo[0], lo[1], lo[2]), (hi[0], lo[1] + t, hi[2])),
        ((lo[0], hi[1] - t, lo[2]), (hi[0], hi[1], hi[2])),
        ((lo[0], lo[1], lo[2]), (lo[0] + t, hi[1], hi[2])),
        ((hi[0] - t, lo[1], lo[2]), (hi[0], hi[1], hi[2])),
    ]
    floor = box((-1.5, -1.5, -0.1), (1.5, 1.5, 0.0))
    pair = {
        "graph": "[0,1]",
        "parts": [{"id": 0, "cloud": block}, {"id": 1, "cloud": block}],
        "initial": {"0": pose((-0.6, 0, 0.06)), "1": pose((-0.6, 0.5, 0.06))},
        "planner": {"max_iterations": 3000},
        "seed": 5,
    }
    blocked = dict(pair, name="pair_no_path",
                   world={"clearance": 0.005, "bounds": box((-1, -1, 0), (1, 1, 1)),
                          "boxes": [floor] + [box(a, c) for a, c in shell]},
                   targets={"0": pose((-0.06, 0, 0.06)), "1": pose((0.1575, 0, 0.06))})
    write(ROOT / "pair_no_path.json", blocked)

    floating = dict(pair, name="pair_floating_part",
                    world={"clearance": 0.005, "bounds": box((-1, -1, 0), (1, 1, 1)), "boxes": [floor]},
                    targets={"0": pose((0, 0, 0.06)), "1": pose((0.15, 0, 0.06))})
    write(ROOT / "pair_floating_part.json", floating)


if __name__ == "__main__":
    planner_suite()
    taxonomy()
