#!/usr/bin/env python3
"""Write the synthetic plan-evaluation corpus under fixtures/eval.

Buckets (2~4, 5~6, 7~8, 9+) hold 14/36/24/28 items with 11/20/2/0 exact
predictions. Every non-exact item has a non-flat ground truth.
"""
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures" / "eval"
PLAN = [  # (part counts to draw from, items, exact)
    ((2, 3, 4), 14, 11),
    ((5, 6), 36, 20),
    ((7, 8), 24, 2),
    ((9, 10, 11, 12), 28, 0),
]


def random_tree(parts, rng, flat_ok=True):
    """Random assembly tree over `parts` as nested lists of ints."""
    parts = list(parts)
    if len(parts) == 1:
        return parts[0]
    if len(parts) == 2 or (flat_ok and rng.random() < 0.15):
        return parts
    k = rng.randint(2, min(4, len(parts)))
    rng.shuffle(parts)
    cuts = sorted(rng.sample(range(1, len(parts)), k - 1))
    groups = [parts[a:b] for a, b in zip([0] + cuts, cuts + [len(parts)])]
    kids = [random_tree(g, rng) for g in groups]
    if all(not isinstance(c, list) for c in kids):
        # all singletons: nest two of them so the tree is not flat
        return [[kids[0], kids[1]]] + kids[2:] if len(kids) > 2 else kids
    return kids


def canon(t):
    if not isinstance(t, list):
        return str(t)
    return "[" + ",".join(sorted(canon(c) for c in t)) + "]"


def is_flat(t):
    return all(not isinstance(c, list) for c in t)


def leaves(t):
    return [t] if not isinstance(t, list) else [x for c in t for x in leaves(c)]


def shuffled(t, rng):
    if not isinstance(t, list):
        return t
    kids = [shuffled(c, rng) for c in t]
    rng.shuffle(kids)
    return kids


def edges(t, out):
    """Connectivity: chain the leaves of every internal node."""
    if isinstance(t, list):
        firsts = [leaves(c)[0] for c in t]
        out.extend([a, b] for a, b in zip(firsts, firsts[1:]))
        for c in t:
            edges(c, out)
    return out


def wrong_prediction(gt, rng):
    if rng.random() < 0.5:
        return sorted(leaves(gt))
    while True:
        p = random_tree(leaves(gt), rng)
        if canon(p) != canon(gt):
            return p


def main():
    rng = random.Random(20240607)
    (ROOT / "gt").mkdir(parents=True, exist_ok=True)
    (ROOT / "pred").mkdir(parents=True, exist_ok=True)
    index = 0
    for counts, total, exact in PLAN:
        for i in range(total):
            is_exact = i < exact
            n = 2 if is_exact and i < 3 and 2 in counts else rng.choice([c for c in counts if c > 2 or is_exact])
            gt = random_tree(range(n), rng, flat_ok=is_exact)
            while not is_exact and is_flat(gt):
                gt = random_tree(range(n), rng, flat_ok=False)
            pred = shuffled(gt, rng) if is_exact else wrong_prediction(gt, rng)
            key = f"item_{index:03d}"
            index += 1
            item = {
                "name": key,
                "parts": [{"id": p, "name": f"part {p}"} for p in range(n)],
                "connectivity": edges(gt, []),
                "gt_tree": json.dumps(gt, separators=(",", ":")),
            }
            (ROOT / "gt" / f"{key}.json").write_text(json.dumps(item, indent=1) + "\n")
            text = json.dumps(pred, separators=(",", ":"))
            if index % 10 == 3:
                (ROOT / "pred" / f"{key}.txt").write_text(text + "\n")
            elif index % 10 == 7:
                # several runs; the best one counts
                other = wrong_prediction(gt, rng) if n > 2 else pred
                (ROOT / "pred" / f"{key}.json").write_text(json.dumps({"runs": [text, other]}) + "\n")
            else:
                (ROOT / "pred" / f"{key}.json").write_text(json.dumps({"tree": pred}) + "\n")


if __name__ == "__main__":
    main()
