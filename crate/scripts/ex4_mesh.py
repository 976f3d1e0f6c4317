"""Writes the step-interface primal mesh used by the ex4 demo.

Omega = (0,12) x (0,6). The interface sits at y = 2 or y = 2.25 in blocks
of width 2, so the Brinkman part is at most 4 high and the Darcy part at
most 2.25. Rows are graded toward the interface; every rectangle is cut
into two triangles.

usage: python3 scripts/ex4_mesh.py [dx] > data/ex4_step.mesh
"""

import sys

WIDTH, HEIGHT = 12.0, 6.0
STEP = 2.0
LOW, HIGH = 2.0, 2.25
YS = [0.0, 0.6, 1.1, 1.5, 1.75, 1.875, 2.0, 2.125, 2.25,
      2.375, 2.5, 2.75, 3.1, 3.6, 4.2, 5.0, 6.0]


def interface(x):
    return HIGH if int(x // STEP) % 2 == 1 else LOW


def main():
    dx = float(sys.argv[1]) if len(sys.argv) > 1 else 0.25
    nx = round(WIDTH / dx)
    xs = [WIDTH * i / nx for i in range(nx + 1)]
    vid = {}
    verts = []
    for j, y in enumerate(YS):
        for i, x in enumerate(xs):
            vid[(i, j)] = len(verts)
            verts.append((x, y))

    cells = []
    for j in range(len(YS) - 1):
        for i in range(nx):
            xc = 0.5 * (xs[i] + xs[i + 1])
            yc = 0.5 * (YS[j] + YS[j + 1])
            sub = "D" if yc < interface(xc) else "B"
            a, b = vid[(i, j)], vid[(i + 1, j)]
            c, d = vid[(i + 1, j + 1)], vid[(i, j + 1)]
            if (i + j) % 2 == 0:
                cells += [((a, b, c), sub), ((a, c, d), sub)]
            else:
                cells += [((a, b, d), sub), ((b, c, d), sub)]

    owners = {}
    for tri, sub in cells:
        for k in range(3):
            e = tuple(sorted((tri[k], tri[(k + 1) % 3])))
            owners.setdefault(e, []).append(sub)
    tags = []
    for e, subs in sorted(owners.items()):
        if len(subs) == 1:
            tags.append((e, "GB" if subs[0] == "B" else "GD"))
        elif subs[0] != subs[1]:
            tags.append((e, "IF"))

    out = ["staggered-mesh v1", f"# ex4 step interface, dx = {dx}", f"vertices {len(verts)}"]
    out += [f"{x:.6f} {y:.6f}" for x, y in verts]
    out.append(f"cells {len(cells)}")
    out += [f"3 {t[0]} {t[1]} {t[2]} {s}" for t, s in cells]
    out.append(f"boundary {len(tags)}")
    out += [f"{e[0]} {e[1]} {tag}" for e, tag in tags]
    print("\n".join(out))


if __name__ == "__main__":
    main()
