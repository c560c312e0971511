#!/usr/bin/env python3
# Copyright 2026 The drawmpc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the shape and glyph files under data/.

Requires Pillow, shapely and numpy. Output is deterministic.
"""
import math
import pathlib

import numpy as np
from PIL import Image, ImageDraw, ImageFont
from shapely.geometry import Point
from shapely.ops import unary_union

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
FONT = "/usr/share/fonts/truetype/dejavu/DejaVuSans-Bold.ttf"


def write_pbm(path, img):
    a = np.array(img.convert("L")) < 128
    h, w = a.shape
    with open(path, "w") as f:
        f.write(f"P1\n# {path.name}\n{w} {h}\n")
        for row in a:
            f.write(" ".join("1" if v else "0" for v in row) + "\n")


def render(text, size, pad=3):
    font = ImageFont.truetype(FONT, size)
    x0, y0, x1, y1 = font.getbbox(text)
    img = Image.new("L", (x1 - x0 + 2 * pad, y1 - y0 + 2 * pad), 255)
    ImageDraw.Draw(img).text((pad - x0, pad - y0), text, font=font, fill=0)
    return img


def resample(poly, n):
    poly = np.asarray(poly, float)
    seg = np.linalg.norm(np.diff(poly, axis=0), axis=1)
    s = np.concatenate([[0], np.cumsum(seg)])
    t = np.linspace(0, s[-1], n)
    return np.column_stack([np.interp(t, s, poly[:, 0]), np.interp(t, s, poly[:, 1])])


def write_csv(path, pts):
    with open(path, "w") as f:
        f.write("x,y\n")
        for x, y in pts:
            f.write(f"{x:.6f},{y:.6f}\n")


def cloud():
    lobes = [(0.0, 0.0, 0.30), (0.35, 0.05, 0.25), (-0.35, 0.02, 0.24), (0.12, 0.28, 0.26),
             (-0.18, 0.22, 0.22), (0.58, -0.05, 0.16), (-0.58, -0.06, 0.15)]
    shape = unary_union([Point(x, y).buffer(r, resolution=256) for x, y, r in lobes])
    ring = np.array(shape.exterior.coords)
    return resample(ring, 1000)


def line(a, b, step):
    a, b = np.asarray(a, float), np.asarray(b, float)
    n = max(2, int(math.ceil(np.linalg.norm(b - a) / step)) + 1)
    return [tuple(a + (b - a) * t) for t in np.linspace(0, 1, n)]


def human():
    step = 0.01
    head_c, head_r = (0.0, 0.85), 0.12
    neck, hip = (0.0, 0.73), (0.0, 0.35)
    shoulder = (0.0, 0.62)
    lhand, rhand = (-0.30, 0.50), (0.30, 0.50)
    lfoot, rfoot = (-0.22, 0.0), (0.22, 0.0)
    arms = line(lhand, shoulder, step) + line(shoulder, rhand, step)[1:]
    n_head = int(2 * math.pi * head_r / step)
    head = [(head_c[0] + head_r * math.sin(2 * math.pi * k / n_head),
             head_c[1] - head_r * math.cos(2 * math.pi * k / n_head)) for k in range(n_head + 1)]
    body = line(neck, hip, step)[1:] + line(hip, lfoot, step)[1:] + line(lfoot, hip, step)[1:] \
        + line(hip, rfoot, step)[1:]
    pts = arms + head + body
    return pts, (len(arms) - 1, len(arms))


def main():
    (DATA / "shapes").mkdir(parents=True, exist_ok=True)
    (DATA / "glyphs" / "corpus").mkdir(parents=True, exist_ok=True)
    write_pbm(DATA / "glyphs" / "hi.pbm", render("hi", 48))
    for i, ch in enumerate("AB8OxkR%&e"):
        write_pbm(DATA / "glyphs" / "corpus" / f"g{i:02d}.pbm", render(ch, 36))
    write_csv(DATA / "shapes" / "cloud.csv", cloud())
    pts, (i, j) = human()
    write_csv(DATA / "shapes" / "human.csv", pts)
    with open(DATA / "shapes" / "human.breaks", "w") as f:
        f.write("# right hand to bottom of head, drawn off the board\n")
        f.write(f"{i} {j}\n")


if __name__ == "__main__":
    main()
