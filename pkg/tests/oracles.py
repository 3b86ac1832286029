"""Slow, independent reference implementations used by the tests."""

import math

import numpy as np

from lsrdet.core import angle_distance_sq, circular_mean_angle


def naive_grow(mask, field, fg, tau, alpha, min_size):
    """Literal region growing: N8(R) recomputed from scratch on every pass,
    region statistics recomputed from scratch for every candidate."""
    h, w = mask.shape
    pts = [(int(y), int(x)) for y, x in zip(*np.nonzero(fg))]
    pts.sort(key=lambda p: (-float(mask[p]), p[0], p[1]))
    used = set()
    regions = []
    for p in pts:
        if p in used:
            continue
        region = [p]
        used.add(p)
        while True:
            updated = False
            cand = set()
            for y, x in region:
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        q = (y + dy, x + dx)
                        if 0 <= q[0] < h and 0 <= q[1] < w and fg[q] and q not in used:
                            cand.add(q)
            for g in sorted(cand):
                ms = [float(mask[r]) for r in region]
                phi = circular_mean_angle([float(field[r]) for r in region])
                d = angle_distance_sq(float(field[g]), phi) + alpha * (float(mask[g]) - sum(ms) / len(ms)) ** 2
                if d < tau:
                    region.append(g)
                    used.add(g)
                    updated = True
            if not updated:
                break
        regions.append(region)
    # (x, y) lists, admission order
    return [[(x, y) for y, x in r] for r in regions if len(r) >= min_size]


def brute_match_counts(pred, ref, dist):
    """All-pairs matching of boolean rasters at Euclidean distance <= dist."""
    pp = np.argwhere(pred)
    rp = np.argwhere(ref)
    if len(pp) == 0 or len(rp) == 0:
        return 0, len(pp), 0, len(rp)
    d2 = ((pp[:, None, :] - rp[None, :, :]) ** 2).sum(-1)
    ok = d2 <= dist * dist
    return int(ok.any(1).sum()), len(pp), int(ok.any(0).sum()), len(rp)


def charpoly_minor_axis(a):
    """Minor eigenvector of a symmetric 2x2 matrix from the characteristic
    polynomial root and the null space of ``A - lambda I``."""
    a = np.asarray(a, dtype=np.float64)
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    # tr^2/4 - det rewritten without the cancellation near isotropy
    disc = math.hypot((a[0, 0] - a[1, 1]) / 2, a[0, 1])
    lam_big = tr / 2 + disc
    lam = det / lam_big if lam_big != 0 else 0.0
    m = a - lam * np.eye(2)
    # the eigenvector is orthogonal to the larger row of A - lambda I
    row = m[0] if np.hypot(*m[0]) >= np.hypot(*m[1]) else m[1]
    v = np.array([-row[1], row[0]])
    return v / np.hypot(*v), lam


def axis_angle_diff(u, v):
    """Angle between two undirected axes, in [0, pi/2]."""
    c = abs(float(np.dot(u, v))) / (np.hypot(*u) * np.hypot(*v))
    s = abs(float(u[0] * v[1] - u[1] * v[0])) / (np.hypot(*u) * np.hypot(*v))
    return math.atan2(s, c)


def brute_local_mean(m, radius, sigma):
    """Explicit windowed Gaussian average with edge replication."""
    m = np.asarray(m, dtype=np.float64)
    h, w = m.shape
    d = np.arange(-radius, radius + 1)
    wts = np.exp(-0.5 * (d[:, None] ** 2 + d[None, :] ** 2) / sigma**2)
    wts /= wts.sum()
    out = np.empty_like(m)
    for y in range(h):
        for x in range(w):
            ys = np.clip(y + d, 0, h - 1)
            xs = np.clip(x + d, 0, w - 1)
            out[y, x] = (wts * m[np.ix_(ys, xs)]).sum()
    return out


def random_psd(rng):
    # mix of generic, near-isotropic, near-rank-one and large-scale tensors
    kind = rng.integers(4)
    theta = rng.uniform(0, math.pi)
    r = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    if kind == 0:
        ev = rng.uniform(0, 10, 2)
    elif kind == 1:
        base = rng.uniform(1, 5)
        ev = np.array([base, base * (1 + rng.uniform(1e-6, 1e-3))])
    elif kind == 2:
        ev = np.array([rng.uniform(0, 1e-4), rng.uniform(1, 100)])
    else:
        ev = rng.uniform(0, 1, 2) * 10.0 ** rng.integers(3, 7)
    a = r @ np.diag(ev) @ r.T
    return (a + a.T) / 2


def close_strips():
    """Two full-width bright strips with a bleeding gap of 0.45 between them."""
    m = np.zeros((20, 20), np.float32)
    m[6:8] = 1.0
    m[8:10] = 0.45
    m[10:12] = 1.0
    return m


def faint_noise():
    rng = np.random.default_rng(11)
    m = np.zeros((20, 20), np.float32)
    m[10:, 10:] = rng.uniform(0.0, 0.05, (10, 10))
    m[3, 2:15] = 0.9
    return m
