"""Vectorized numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable, and as the
reference the compiled kernels are benchmarked and cross-checked against.
Every function here has a twin with the same signature in ``_ckernels.pyx``.
"""

import numpy as np

LN2 = np.log(2.0)
EPS = np.finfo(float).eps
TINY = np.finfo(float).tiny
MAX_ITER = 200
EXP_CAP = 700.0

# Rows of the (masks x atoms) value matrix processed per chunk.
_CHUNK_CELLS = 1 << 20


def _moment(v2, probs, s):
    r = v2 / (s * s)[:, None]
    np.minimum(r, EXP_CAP, out=r)
    np.exp(r, out=r)
    r *= probs
    return r.sum(axis=1)


def psi2_rows(values, probs, rtol=1e-12):
    """psi_2 norm of every row of ``values`` under the common atom weights.

    Returns ``(norms, iterations)``.
    """
    values = np.ascontiguousarray(values, dtype=float)
    probs = np.ascontiguousarray(probs, dtype=float)
    if values.ndim != 2 or values.shape[1] != probs.shape[0]:
        raise ValueError("values must be (rows, atoms) matching probs")
    rows = values.shape[0]
    norms = np.zeros(rows)
    iters = np.zeros(rows, dtype=np.int64)
    mx = np.abs(values).max(axis=1) if values.shape[1] else np.zeros(rows)
    live = np.flatnonzero(mx > 0)
    if live.size == 0:
        return norms, iters
    # psi_2 is homogeneous: bisect on rows scaled to max |v| = 1
    mx = mx[live]
    v2 = values[live] / mx[:, None]
    v2 *= v2
    hi = np.full(live.size, 1.0 / np.sqrt(LN2))
    lo = 0.5 * hi
    it = np.ones(live.size, dtype=np.int64)

    # Shrink the bracket until the lower end violates the moment condition.
    todo = np.arange(live.size)
    while todo.size:
        m = _moment(v2[todo], probs, lo[todo])
        ok = m <= 2.0
        if not ok.any():
            break
        sel = todo[ok]
        hi[sel] = lo[sel]
        lo[sel] *= 0.5
        it[sel] += 1
        if it[sel].max() > MAX_ITER:
            raise RuntimeError("psi2 lower bracket search did not terminate")
        todo = sel

    active = np.flatnonzero(hi - lo > rtol * hi)
    while active.size:
        it[active] += 1
        if it[active].max() > MAX_ITER:
            raise RuntimeError("psi2 bisection exceeded the iteration cap")
        mid = 0.5 * (lo[active] + hi[active])
        below = _moment(v2[active], probs, mid) <= 2.0
        hi[active[below]] = mid[below]
        lo[active[~below]] = mid[~below]
        still = hi[active] - lo[active] > rtol * hi[active]
        active = active[still]

    norms[live] = hi * mx
    iters[live] = it
    return norms, iters


def _mask_bits(masks, n):
    shifts = np.arange(n, dtype=np.uint64)
    return ((masks[:, None] >> shifts) & np.uint64(1)).astype(float)


def _snap(vals, scale, count):
    # relative rounding bound, plus an absolute floor for subnormal partial sums
    c = count[:, None]
    vals[np.abs(vals) <= c * EPS * scale + np.maximum(c - 1.0, 0.0) * TINY] = 0.0
    return vals


def _chunks(masks, atoms):
    step = max(1, _CHUNK_CELLS // max(atoms, 1))
    for start in range(0, masks.shape[0], step):
        yield start, masks[start:start + step]


def linear_values(points, theta, masks):
    """Values of <theta_H, x_a> for every mask H (rows) and atom a (columns)."""
    points = np.asarray(points, dtype=float)
    theta = np.asarray(theta, dtype=float)
    masks = np.asarray(masks, dtype=np.uint64)
    n = theta.shape[0]
    terms = points * theta  # (atoms, n)
    bits = _mask_bits(masks, n)
    vals = np.zeros((masks.shape[0], points.shape[0]))
    scale = np.zeros_like(vals)
    absterms = np.abs(terms)
    for i in range(n):
        b = bits[:, i:i + 1]
        vals += b * terms[:, i]
        scale += b * absterms[:, i]
    return _snap(vals, scale, bits @ (theta != 0).astype(float))


def linear_psi2(points, probs, theta, masks, rtol=1e-12):
    """psi_2 norm of <theta_H, X> for each mask H."""
    masks = np.asarray(masks, dtype=np.uint64)
    out = np.empty(masks.shape[0])
    for start, chunk in _chunks(masks, np.shape(points)[0]):
        vals = linear_values(points, theta, chunk)
        out[start:start + chunk.shape[0]] = psi2_rows(vals, probs, rtol)[0]
    return out


def edge_terms(points, edge_masks, weights):
    """W(e) * prod_{j in e} x_{a,j} for every atom a (rows) and edge e (columns)."""
    points = np.asarray(points, dtype=float)
    edge_masks = np.asarray(edge_masks, dtype=np.uint64)
    n = points.shape[1]
    terms = np.empty((points.shape[0], edge_masks.shape[0]))
    for k, (em, w) in enumerate(zip(edge_masks.tolist(), np.asarray(weights, float))):
        t = np.full(points.shape[0], w)
        for j in range(n):
            if (em >> j) & 1:
                t = t * points[:, j]
        terms[:, k] = t
    return terms


def hom_values(points, edge_masks, weights, masks):
    """Values of hom_{W[H]}(x_a) for every mask H (rows) and atom a (columns)."""
    masks = np.asarray(masks, dtype=np.uint64)
    edge_masks = np.asarray(edge_masks, dtype=np.uint64)
    terms = edge_terms(points, edge_masks, weights)
    absterms = np.abs(terms)
    vals = np.zeros((masks.shape[0], terms.shape[0]))
    scale = np.zeros_like(vals)
    count = np.zeros(masks.shape[0])
    for k, em in enumerate(edge_masks):
        inc = ((masks & em) == em).astype(float)[:, None]
        vals += inc * terms[:, k]
        scale += inc * absterms[:, k]
        count += inc[:, 0]
    return _snap(vals, scale, count)


def hom_psi2(points, probs, edge_masks, weights, masks, rtol=1e-12):
    """psi_2 norm of hom_{W[H]}(X) for each mask H."""
    masks = np.asarray(masks, dtype=np.uint64)
    out = np.empty(masks.shape[0])
    for start, chunk in _chunks(masks, np.shape(points)[0]):
        vals = hom_values(points, edge_masks, weights, chunk)
        out[start:start + chunk.shape[0]] = psi2_rows(vals, probs, rtol)[0]
    return out


def _submasks(support):
    subs = np.zeros(1, dtype=np.uint64)
    j = 0
    while support >> j:
        if (support >> j) & 1:
            subs = np.concatenate([subs, subs | np.uint64(1 << j)])
        j += 1
    return subs


def _link_max(monos, coefs):
    support = 0
    disjoint = True
    for m in monos:
        if support & m:
            disjoint = False
        support |= m
    if disjoint:
        # monomials in disjoint variables take their signs independently
        acc = 0.0
        for c in coefs.tolist():
            acc += abs(c)
        return acc
    if support:
        support &= support - 1  # global sign flip symmetry: pin the lowest variable
    subs = _submasks(support)
    par = np.bitwise_count(subs[:, None] & np.asarray(monos, dtype=np.uint64)[None, :]) & 1
    vals = ((1.0 - 2.0 * par) * coefs).sum(axis=1)
    return float(np.abs(vals).max())


def delta_vertex(edge_masks, weights, n, masks):
    """Exact per-coordinate oscillation of hom_{W[H]} over the cube, for each mask H.

    Returns an array of shape ``(len(masks), n)``.
    """
    edge_list = [int(e) for e in np.asarray(edge_masks, dtype=np.uint64)]
    wts = np.asarray(weights, dtype=float)
    masks = np.asarray(masks, dtype=np.uint64)
    out = np.zeros((masks.shape[0], n))
    for r, h in enumerate(masks.tolist()):
        inside = [k for k, em in enumerate(edge_list) if em & h == em]
        for i in range(n):
            if not (h >> i) & 1:
                continue
            bit = 1 << i
            ks = [k for k in inside if edge_list[k] & bit]
            if not ks:
                continue
            monos = [edge_list[k] ^ bit for k in ks]
            out[r, i] = 2.0 * _link_max(monos, wts[ks])
    return out
