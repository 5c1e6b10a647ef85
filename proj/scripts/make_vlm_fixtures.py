#!/usr/bin/env python3
"""Writes the pipeline fixtures under fixtures/vlm/: images, item files and
the canned model responses used to record fixtures/transcripts/*.jsonl
(see scripts/record_transcripts.sh)."""

import json
import random
from pathlib import Path

from PIL import Image, ImageDraw

ROOT = Path(__file__).resolve().parent.parent / "fixtures" / "vlm"


def make_images():
    img_dir = ROOT / "images"
    img_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(7)
    scene = Image.new("RGB", (96, 64), (30, 30, 30))
    d = ImageDraw.Draw(scene)
    for k in range(12):
        x, y = rng.randrange(0, 84), rng.randrange(0, 52)
        d.rectangle([x, y, x + 10, y + 10], fill=(rng.randrange(256), rng.randrange(256), rng.randrange(256)))
        d.text((x + 2, y), str(k), fill=(255, 255, 255))
    scene.save(img_dir / "scene.png")
    for page in range(1, 5):
        im = Image.new("RGB", (120, 90), (255, 255, 255))
        d = ImageDraw.Draw(im)
        d.rectangle([0, 0, 20, 89], fill=(235, 235, 235))
        d.text((6, 40), str(page), fill=(0, 0, 0))
        for _ in range(6):
            x, y = rng.randrange(24, 100), rng.randrange(4, 70)
            d.rectangle([x, y, x + 16, y + 12], outline=(rng.randrange(200), rng.randrange(200), rng.randrange(200)))
        im.save(img_dir / f"page_{page}.png")
    cover = Image.new("RGB", (60, 80), (250, 250, 240))
    ImageDraw.Draw(cover).text((10, 30), "COVER", fill=(0, 0, 0))
    cover.save(img_dir / "cover.png")


def fenced(body, lang="json", fence="```"):
    return f"{fence}{lang}\n{body}\n{fence}"


def stage1(parts):
    return fenced(json.dumps([{"name": n, "number": [i]} for i, n, _ in parts], indent=4))


def stage2(parts):
    rows = [{"name": n, "label": [i], "role": r} for i, n, r in parts]
    return "Here is the table of selected materials.\n\n" + fenced(json.dumps(rows, indent=4))


CHAIR = {
    "name": "chair_example1",
    "parts": [
        (1, "backrest frame", "upright frame supporting the back of the sitter"),
        (2, "side leg frame", "carries the seat on one side and stands on the floor"),
        (3, "support beam", "horizontal bar bracing the two side frames"),
        (4, "support beam", "horizontal bar bracing the two side frames"),
        (5, "seat cushion", "surface the person sits on"),
        (7, "side leg frame", "carries the seat on one side and stands on the floor"),
    ],
    "pages": 4,
    "plan": """Here's a step-by-step assembly plan for the furniture using the provided parts:

### Step 1: Assemble Backrest and Seat
- **Parts Needed:** Backrest Frame (1), Seat Cushion (5)
- **Instructions:**
  - Place the Backrest Frame (1) and Seat Cushion (5) adjacent as shown in their respective colors (red and green).
  - Ensure the backrest is upright and securely attached to the seat.

### Step 2: Attach Side Leg Frame
- **Parts Needed:** Side Leg Frame (2) and subassembly from Step 1
- **Instructions:**
  - Position the Side Leg Frame (2) on one side of the assembled backrest and seat structure.

### Step 3: Attach Side Leg Frame Again
- **Parts Needed:** Side Leg Frame (7) and subassembly from Step 2
- **Instructions:**
  - Position the Side Leg Frame (7) on the other side of the assembled backrest and seat structure.

### Step 4: Connect Support Beams
- **Parts Needed:** Support Beams (3, 4) and subassembly from Step 3
- **Instructions:**
  - Attach Support Beams (3, 4) to the inside of the Side Leg Frame, as depicted.


Check the entire assembly for any loose parts and re-tighten as necessary. The chair should now be fully assembled and ready for use.
""",
    "tree": """'''python
[
    [
        [
            [
                1,
                5
            ],
            2
        ],
        7
    ],
    3,
    4
]
'''""",
    "expected": "[[[[1,5],2],7],3,4]",
    "equivalences": [[2, 7], [3, 4]],
}

STOOL = {
    "name": "chair_example2",
    "parts": [
        (0, "support beam", "vertical beam joining the leg frame"),
        (1, "seat cushion", "padded top the person sits on"),
        (2, "backrest slats", "slats giving back support"),
        (3, "support beam", "vertical beam joining the leg frame"),
        (4, "leg frame", "base frame resting on the floor"),
    ],
    "pages": 3,
    "plan": """### Step 1: Connect Support Beams and Leg Frame
**Parts Involved:** Support Beams (0 and 3), Leg Frame (4)
- **Instructions:** Position the leg frame (4) horizontally on the floor. Align the support beams (0 and 1) vertically to connect with the leg frame. Ensure that each beam is fitted securely into the designated slots on the frame.

### Step 2: Attach Backrest Slats
**Parts Involved:** Backrest Slats (2) and subassembly from Step 1
- **Instructions:** Insert the backrest slats (2) into the slots on the leg frame. Ensure that the slats are facing outward and securely fitted to provide back support.

### Step 3: Connect Seat Cushion
**Parts Involved:** Seat Cushion (1) and subassembly from Step 2
- **Instructions:** Place the seat cushion (1) on top of the assembled frame. Align the cushion with the edges of the frame for balance and comfort.
""",
    "tree": """'''python
[
    [
        [
            0,
            3,
            4
        ],
        2
    ],
    1
]
'''""",
    "expected": "[[[0,3,4],2],1]",
    "equivalences": [[0, 3]],
}

BENCH = {
    "name": "chair_example3",
    "parts": [
        (0, "leg frame", "frame standing on the floor"),
        (1, "backrest slat", "slat giving back support"),
        (2, "leg frame", "frame standing on the floor"),
        (3, "seat cushion", "padded top the person sits on"),
        (4, "support beam", "beam bracing the leg frames"),
        (5, "leg frame", "frame standing on the floor"),
        (6, "support beam", "beam bracing the leg frames"),
        (7, "support beam", "beam bracing the leg frames"),
        (8, "support beam", "beam bracing the leg frames"),
        (9, "leg frame", "frame standing on the floor"),
        (10, "backrest slat", "slat giving back support"),
        (11, "support beam", "beam bracing the leg frames"),
    ],
    "pages": 4,
    "plan": """### Step 1: Connect Support Beams and Leg Frame
**Parts Involved:** Support Beams (7, 11, 6), Leg Frame (5)
- **Instructions:** Position the leg frame (5) horizontally on the floor. Align the support beams (7, 11, 6) vertically to connect with the leg frame. Ensure that each beam is fitted securely into the designated slots on the frame.

### Step 2: Attach Backrest Slats
**Parts Involved:** Backrest Slats (1, 10) and subassembly from Step 1
- **Instructions:** Insert the backrest slats (1, 10) into the slots on the leg frame. Ensure that the slats are facing outward and securely fitted to provide back support.

### Step 3: Connect Seat Cushion
**Parts Involved:** Seat Cushion (3) and subassembly from Step 2
- **Instructions:** Place the seat cushion (3) on top of the assembled frame. Align the cushion with the edges of the frame for balance and comfort.

### Step 4: Connect Support Beams and Leg Frames
**Parts Involved:** Support Beams (8, 4), Leg Frames (2, 9)
- **Instructions:** Position the leg frame (2, 9) horizontally on the floor. Align the support beams (8, 4) vertically to connect with the leg frame.

### Step 5: Connect Support Beams and Leg Frames
**Parts Involved:** Subassembly from Step 4 and subassembly from Step 3
- **Instructions:** Connect the two subassemblies together

### Step 6: Connect Support Beams and Leg Frames
**Parts Involved:** Leg frame (0) and subassembly from Step 5
- **Instructions:** Connect the final leg frame with the previous subassembly
""",
    "tree": """'''python
[
    [
        [
            8,
            4,
            2,
            9
        ],
        [
            [
                [
                    7,
                    11,
                    6,
                    5
                ],
                1,
                10
            ],
            3
        ]
    ]
    0]
'''""",
    "expected": "[[[8,4,2,9],[[[7,11,6,5],1,10],3]],0]",
    "equivalences": [[0, 2], [0, 5], [0, 9], [1, 10], [2, 5], [2, 9], [4, 6], [4, 7], [4, 8], [4, 11],
                     [5, 9], [6, 7], [6, 8], [6, 11], [7, 8], [7, 11], [8, 11]],
}

SIDE_FRAME = {
    "name": "side_frame",
    "parts": [
        (0, "side frame", "one of the two identical side frames holding the seat and the backrest"),
        (1, "side frame", "one of the two identical side frames holding the seat and the backrest"),
        (2, "seat frame", "for people sitting on a chair, the seat is held centrally between the side frames"),
        (3, "backrest", "supports the back of the person sitting"),
    ],
    "pages": 2,
    "plan": """We have three input images; one shows the labelled parts, so there are two steps.

### Step 1:
- **Parts Needed:** Side Frame (0), Seat Frame (2), Side Frame (1)
- **Instructions:**
  - **Mount the seat:** Fix the seat frame (2) between the side frames (0) and (1).

### Step 2:
- **Parts Needed:** Subassembly from Step 1, Backrest (3)
- **Instructions:**
  - **Add the backrest:** Attach the backrest (3) to the top of the side frames.
""",
    "tree": "```python\n[[0, 2, 1], 3]\n```",
    "expected": "[[0,2,1],3]",
    "equivalences": [[0, 1]],
}


def write_case(case):
    pages = [f"images/page_{k}.png" for k in range(1, case["pages"] + 1)]
    item = {
        "name": case["name"],
        "parts": [{"id": i, "name": n} for i, n, _ in case["parts"]],
        "equivalences": case["equivalences"],
        "gt_tree": case["expected"],
        "manual_images": pages,
        "cover_image": "images/cover.png",
        "scene_image": "images/scene.png",
    }
    (ROOT / f"{case['name']}.json").write_text(json.dumps(item, indent=2) + "\n")
    responses = [stage1(case["parts"]), stage2(case["parts"]), case["plan"], case["tree"]]
    (ROOT / f"{case['name']}.responses.json").write_text(json.dumps(responses, indent=2) + "\n")


def main():
    make_images()
    for case in (CHAIR, STOOL, BENCH, SIDE_FRAME):
        write_case(case)


if __name__ == "__main__":
    main()
