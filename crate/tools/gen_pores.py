"""Synthetic pore layouts for the porous plate scenario.

Writes `x y radius` files: a 31-pore layout on a 76.2 mm square plate and
an 8-pore horizontal band of it for the coarse desk mesh.
"""
import numpy as np

R = 3.175
SIDE = 76.2
GAP = 1.5          # minimum ligament between pores, mm
EDGE = 2.0         # minimum ligament to the plate edge, mm


def layout(seed, n=31):
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        p = rng.uniform(R + EDGE, SIDE - R - EDGE, size=2)
        if all(np.hypot(*(p - q)) >= 2 * R + GAP for q in pts):
            pts.append(p)
    return np.array(pts)


def band(pts, delta=3.0, want=8, half=10.0):
    """Pores of a horizontal band, left to right, keeping every ligament
    (pore to pore and pore to edge) at least `delta` so the coarse desk mesh
    can resolve it. Picks the band whose widest x-gap is smallest."""
    best = None
    for y0 in np.arange(R + delta, SIDE - R - delta, 1.0):
        cand = pts[np.abs(pts[:, 1] - y0) <= half]
        cand = cand[np.argsort(cand[:, 0])]
        keep = []
        for q in cand:
            if min(q[0], SIDE - q[0], q[1], SIDE - q[1]) - R < delta:
                continue
            if all(np.hypot(*(q - k)) - 2 * R >= delta for k in keep):
                keep.append(q)
        if len(keep) != want:
            continue
        keep = np.array(keep)
        gap = np.max(np.diff(np.concatenate([[0.0], keep[:, 0], [SIDE]])))
        if best is None or gap < best[0]:
            best = (gap, y0, keep)
    return best


def write(path, pts, note):
    with open(path, "w") as f:
        f.write(f"# {note}\n# x y radius (mm)\n")
        for x, y in pts:
            f.write(f"{x:.3f} {y:.3f} {R}\n")


if __name__ == "__main__":
    pts = layout(seed=7)
    write("crates/core/data/pores_31.txt", pts, "synthetic layout, 31 pores on a 76.2 mm square plate")
    b = band(pts)
    if b is None:
        raise SystemExit("no band with 8 pores")
    _, y0, sub = b
    write("crates/core/data/pores_desk_8.txt", sub,
          f"8-pore subset of pores_31.txt around y = {y0:.0f} mm, ligaments >= 3 mm")
    print("band", y0)
