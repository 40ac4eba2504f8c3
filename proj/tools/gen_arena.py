#!/usr/bin/env python3
"""Generates data/arena.map: start room, two rooms with points of interest,
and the final bay, joined by corridors. Coordinates below are metres."""

import sys

RES = 0.1
W, H = 40.0, 14.0

# free rectangles (x0, y0, x1, y1)
FREE = [
    (0.0, 4.0, 6.0, 10.0),    # start room
    (6.0, 6.0, 10.0, 8.0),    # corridor
    (10.0, 1.0, 20.0, 13.0),  # room A
    (20.0, 6.0, 26.0, 8.0),   # corridor
    (26.0, 2.0, 34.0, 12.0),  # room B
    (34.0, 5.0, 40.0, 9.0),   # final bay
]

# obstacles placed inside free space (pillars and shelves)
BLOCKS = [
    (12.0, 4.5, 13.0, 5.5),
    (17.5, 8.5, 18.5, 9.5),
    (14.5, 10.0, 15.5, 13.0),
    (29.5, 5.5, 30.5, 6.0),
    (30.0, 8.5, 34.0, 9.0),
    (11.5, 9.5, 13.5, 10.0),
    (16.0, 2.5, 17.0, 5.0),
    (13.5, 2.0, 14.0, 4.0),
    (27.5, 8.8, 28.0, 11.5),
    (31.0, 3.8, 33.5, 4.3),
]

MARKS = {
    "S": (2.0, 7.0),
    "1": (13.0, 12.1),
    "2": (19.1, 11.0),
    "3": (15.5, 1.9),
    "4": (26.9, 10.5),
    "5": (32.0, 2.9),
    "F": (38.5, 7.0),
}


def inside(r, x, y):
    return r[0] <= x < r[2] and r[1] <= y < r[3]


def main(path):
    nx, ny = round(W / RES), round(H / RES)
    rows = []
    for j in reversed(range(ny)):
        y = (j + 0.5) * RES
        row = []
        for i in range(nx):
            x = (i + 0.5) * RES
            free = any(inside(r, x, y) for r in FREE) and not any(inside(b, x, y) for b in BLOCKS)
            row.append("." if free else "#")
        rows.append(row)
    for ch, (x, y) in MARKS.items():
        i, j = int(x / RES), int(y / RES)
        rows[ny - 1 - j][i] = ch
    with open(path, "w") as f:
        f.write("resolution=0.1\n")
        f.write("aoi 1 = 123\n")
        f.write("aoi 2 = 45\n")
        for row in rows:
            f.write("".join(row) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/arena.map")
