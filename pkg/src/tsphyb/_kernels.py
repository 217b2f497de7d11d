"""Nopython kernels for the tour operators and the pipeline hot loop.

These are the only implementations of the stochastic operators; the public
modules (repair, sisr, kopt, uncross, hybrid) are thin wrappers so that the
batched search path and the unit-tested API path share one code path.

Convention: a partially ruined tour is an int64 "slot" array where -1 marks
a vacancy, plus a boolean mask over cities that are currently missing.
"""

import itertools

import numpy as np
from numba import njit

from ._rng import rand_below, rand_u01

# all orderings of the five movable nodes of a 3-OPT move, row 0 = identity
PERMS5 = np.array(list(itertools.permutations(range(5))), dtype=np.int64)

OP_FILL = 0
OP_SISR = 1
OP_3OPT = 2
OP_UNCROSS = 3


@njit(cache=True)
def tour_len(order, dist):
    n = order.shape[0]
    total = np.int64(0)
    for t in range(n - 1):
        total += dist[order[t], order[t + 1]]
    total += dist[order[n - 1], order[0]]
    return total


@njit(cache=True)
def decode_into(pos_row, out):
    """Round half-up to ints, clamp to [1, n], shift to 0-based."""
    n = out.shape[0]
    for t in range(n):
        v = np.int64(np.floor(pos_row[t] + 0.5))
        if v < 1:
            v = 1
        elif v > n:
            v = n
        out[t] = v - 1


@njit(cache=True)
def dedupe_into(seq, slot, missing):
    """Keep first occurrences in place, mark later ones vacant.

    missing[c] ends True iff city c does not occur in seq.  Returns the
    vacancy count (== missing-city count).
    """
    n = seq.shape[0]
    for c in range(n):
        missing[c] = True
    nm = 0
    for t in range(n):
        c = seq[t]
        if missing[c]:
            missing[c] = False
            slot[t] = c
        else:
            slot[t] = -1
            nm += 1
    return nm


@njit(cache=True)
def fill_random(slot, missing, nm, state, work):
    """Complete a deduped tour by scattering the missing cities uniformly."""
    if nm == 0:
        return
    n = slot.shape[0]
    k = 0
    for c in range(n):
        if missing[c]:
            work[k] = c
            k += 1
    for i in range(k - 1, 0, -1):
        j = rand_below(state, i + 1)
        tmp = work[i]
        work[i] = work[j]
        work[j] = tmp
    k = 0
    for t in range(n):
        if slot[t] < 0:
            slot[t] = work[k]
            missing[work[k]] = False
            k += 1


@njit(cache=True)
def draw_ruin_plan(slot, x, state, seeds, spans):
    """Pick one seed position and edge-span per subtour.

    Subtour k covers positions [k*n//x, (k+1)*n//x).  Seeds are sampled
    uniformly among the subtour's non-vacant positions (-1 when it has
    none); spans are uniform on [1, L//2] for a subtour of length L.
    """
    n = slot.shape[0]
    for k in range(x):
        start = (k * n) // x
        end = ((k + 1) * n) // x
        cnt = 0
        for p in range(start, end):
            if slot[p] >= 0:
                cnt += 1
        if cnt == 0:
            seeds[k] = -1
            spans[k] = 0
            continue
        pick = rand_below(state, cnt)
        seen = 0
        spos = start
        for p in range(start, end):
            if slot[p] >= 0:
                if seen == pick:
                    spos = p
                    break
                seen += 1
        seeds[k] = spos
        half = (end - start) // 2
        if half < 1:
            half = 1
        spans[k] = 1 + rand_below(state, half)


@njit(cache=True)
def apply_ruin(slot, missing, nm, x, seeds, spans):
    """Remove each seed plus the nodes of the surrounding edge run.

    The span splits as evenly as possible before/after the seed (odd
    remainder after).  A single subtour wraps cyclically; several subtours
    clip at their own boundaries.  Returns the updated missing count.
    """
    n = slot.shape[0]
    for k in range(x):
        spos = seeds[k]
        if spos < 0:
            continue
        span = spans[k]
        before = span // 2
        after = span - before
        if x == 1:
            for t in range(-before, after + 1):
                p = (spos + t) % n
                if slot[p] >= 0:
                    missing[slot[p]] = True
                    slot[p] = -1
                    nm += 1
        else:
            start = (k * n) // x
            end = ((k + 1) * n) // x
            lo = spos - before
            if lo < start:
                lo = start
            hi = spos + after
            if hi > end - 1:
                hi = end - 1
            for p in range(lo, hi + 1):
                if slot[p] >= 0:
                    missing[slot[p]] = True
                    slot[p] = -1
                    nm += 1
    return nm


@njit(cache=True)
def greedy_recreate(slot, missing, nm, neighbors):
    """Fill vacancies in tour order with the nearest missing city.

    The anchor of a vacancy is the closest preceding non-vacant position
    (cyclically); the candidate is the first missing city in the anchor's
    neighbour list, so ties resolve by city index.
    """
    n = slot.shape[0]
    if nm == 0:
        return
    if nm == n:
        for c in range(n):
            if missing[c]:
                slot[0] = c
                missing[c] = False
                nm -= 1
                break
    for p in range(n):
        if slot[p] >= 0:
            continue
        q = p - 1
        if q < 0:
            q += n
        while slot[q] < 0:
            q -= 1
            if q < 0:
                q += n
        anchor = slot[q]
        row = neighbors[anchor]
        for t in range(row.shape[0]):
            c = row[t]
            if missing[c]:
                slot[p] = c
                missing[c] = False
                break


@njit(cache=True)
def three_opt_fixed(order, dist, e1, e2, e3, perms5, tmp):
    """One 3-OPT move on edges e1<e2<e3 (edge k joins positions k, k+1).

    The node before the first removed edge stays fixed; all 120 orderings
    of the five other removed nodes are scored by the sum of the affected
    edges and the best one (first found on ties) is written back.
    """
    n = order.shape[0]
    pos0 = e1
    p1 = e1 + 1
    p2 = e2
    p3 = e2 + 1
    p4 = e3
    p5 = (e3 + 1) % n

    m0 = order[p1]
    m1 = order[p2]
    m2 = order[p3]
    m3 = order[p4]
    m4 = order[p5]

    # distinct starts of edges touching a movable position
    estarts = np.empty(10, dtype=np.int64)
    ecount = 0
    for q in (p1, p2, p3, p4, p5):
        for s in ((q - 1 + n) % n, q):
            dup = False
            for t in range(ecount):
                if estarts[t] == s:
                    dup = True
                    break
            if not dup:
                estarts[ecount] = s
                ecount += 1

    for t in range(n):
        tmp[t] = order[t]

    best_cost = np.int64(0)
    best_row = 0
    for r in range(perms5.shape[0]):
        tmp[p1] = _pick5(m0, m1, m2, m3, m4, perms5[r, 0])
        tmp[p2] = _pick5(m0, m1, m2, m3, m4, perms5[r, 1])
        tmp[p3] = _pick5(m0, m1, m2, m3, m4, perms5[r, 2])
        tmp[p4] = _pick5(m0, m1, m2, m3, m4, perms5[r, 3])
        tmp[p5] = _pick5(m0, m1, m2, m3, m4, perms5[r, 4])
        cost = np.int64(0)
        for t in range(ecount):
            s = estarts[t]
            cost += dist[tmp[s], tmp[(s + 1) % n]]
        if r == 0 or cost < best_cost:
            best_cost = cost
            best_row = r
    order[p1] = _pick5(m0, m1, m2, m3, m4, perms5[best_row, 0])
    order[p2] = _pick5(m0, m1, m2, m3, m4, perms5[best_row, 1])
    order[p3] = _pick5(m0, m1, m2, m3, m4, perms5[best_row, 2])
    order[p4] = _pick5(m0, m1, m2, m3, m4, perms5[best_row, 3])
    order[p5] = _pick5(m0, m1, m2, m3, m4, perms5[best_row, 4])


@njit(cache=True, inline="always")
def _pick5(m0, m1, m2, m3, m4, idx):
    if idx == 0:
        return m0
    if idx == 1:
        return m1
    if idx == 2:
        return m2
    if idx == 3:
        return m3
    return m4


@njit(cache=True)
def sample_three_edges(n, state, out):
    """Three pairwise non-adjacent (cyclically) edge indices, ascending."""
    for _ in range(1000):
        a = rand_below(state, n)
        b = rand_below(state, n)
        c = rand_below(state, n)
        if a > b:
            a, b = b, a
        if b > c:
            b, c = c, b
        if a > b:
            a, b = b, a
        if b - a >= 2 and c - b >= 2 and a + n - c >= 2:
            out[0] = a
            out[1] = b
            out[2] = c
            return
    out[0] = 0
    out[1] = 2
    out[2] = 4


@njit(cache=True)
def three_opt_reps(order, dist, reps, state, perms5, tmp, edges_buf):
    n = order.shape[0]
    if n < 6:
        return
    for _ in range(reps):
        sample_three_edges(n, state, edges_buf)
        three_opt_fixed(order, dist, edges_buf[0], edges_buf[1], edges_buf[2], perms5, tmp)


@njit(cache=True)
def seg_cross(x1, y1, x2, y2, x3, y3, x4, y4):
    """Strict interior crossing of two segments; parallel/touching is False."""
    dx1 = x2 - x1
    dy1 = y2 - y1
    dx2 = x4 - x3
    dy2 = y4 - y3
    det = dx2 * dy1 - dx1 * dy2
    if det > -1e-12 and det < 1e-12:
        return False
    rx = x3 - x1
    ry = y3 - y1
    s = (dx2 * ry - dy2 * rx) / det
    t = (dx1 * ry - dy1 * rx) / det
    eps = 1e-9
    return s > eps and s < 1.0 - eps and t > eps and t < 1.0 - eps


@njit(cache=True, inline="always")
def _reverse(order, i, j):
    while i < j:
        t = order[i]
        order[i] = order[j]
        order[j] = t
        i += 1
        j -= 1


@njit(cache=True)
def uncross_pass_k(order, xs, ys, dist):
    """One Algorithm-style scan: fix the first crossing per i, move on.

    A fix reverses the interior branch.  It is only applied when the
    integer length delta is <= 0, so a pass can never lengthen the tour
    even under TSPLIB rounding.  Returns the number of fixes.
    """
    n = order.shape[0]
    fixed = 0
    for i in range(n - 1):
        a = order[i]
        b = order[i + 1]
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            c = order[j]
            d = order[(j + 1) % n]
            if seg_cross(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c], xs[d], ys[d]):
                delta = dist[a, c] + dist[b, d] - dist[a, b] - dist[c, d]
                if delta <= 0:
                    _reverse(order, i + 1, j)
                    fixed += 1
                    break
    return fixed


@njit(cache=True)
def count_crossings_k(order, xs, ys):
    n = order.shape[0]
    count = 0
    for i in range(n - 1):
        a = order[i]
        b = order[i + 1]
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            c = order[j]
            d = order[(j + 1) % n]
            if seg_cross(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c], xs[d], ys[d]):
                count += 1
    return count


@njit(cache=True)
def prob_uncross_k(order, xs, ys, dist, prob, reps, state, edges_buf):
    """reps times: sample three edges, fix each crossing pair w.p. prob.

    The three pairs are tested in index order against the evolving tour.
    Returns (crossings examined, crossings fixed).
    """
    n = order.shape[0]
    examined = 0
    fixed = 0
    for _ in range(reps):
        e0 = rand_below(state, n)
        e1 = rand_below(state, n)
        while e1 == e0:
            e1 = rand_below(state, n)
        e2 = rand_below(state, n)
        while e2 == e0 or e2 == e1:
            e2 = rand_below(state, n)
        if e0 > e1:
            e0, e1 = e1, e0
        if e1 > e2:
            e1, e2 = e2, e1
        if e0 > e1:
            e0, e1 = e1, e0
        edges_buf[0] = e0
        edges_buf[1] = e1
        edges_buf[2] = e2
        for u in range(3):
            for v in range(u + 1, 3):
                i = edges_buf[u]
                j = edges_buf[v]
                a = order[i]
                b = order[(i + 1) % n]
                c = order[j]
                d = order[(j + 1) % n]
                if seg_cross(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c], xs[d], ys[d]):
                    examined += 1
                    if rand_u01(state) < prob:
                        delta = dist[a, c] + dist[b, d] - dist[a, b] - dist[c, d]
                        if delta <= 0:
                            _reverse(order, i + 1, j)
                            fixed += 1
    return examined, fixed


@njit(cache=True)
def apply_pipeline_batch(
    positions, k_eval, ops, iparams, fparams, dist, neighbors, xs, ys, state,
    out_orders, out_lengths,
):
    """Decode, repair and run the pipeline stages for the first k_eval rows.

    Each evaluated row yields a feasible tour (written to out_orders), its
    integer length, and a write-back of the tour into the position row as
    1-based coordinates.  One row == one objective-function call.
    """
    n = positions.shape[1]
    seq = np.empty(n, dtype=np.int64)
    missing = np.empty(n, dtype=np.bool_)
    tmp = np.empty(n, dtype=np.int64)
    work = np.empty(n, dtype=np.int64)
    seeds = np.empty(n, dtype=np.int64)
    spans = np.empty(n, dtype=np.int64)
    edges_buf = np.empty(3, dtype=np.int64)
    perms5 = PERMS5
    for c in range(k_eval):
        decode_into(positions[c], seq)
        slot = out_orders[c]
        nm = dedupe_into(seq, slot, missing)
        for o in range(ops.shape[0]):
            code = ops[o]
            if code == OP_FILL:
                fill_random(slot, missing, nm, state, work)
                nm = 0
            elif code == OP_SISR:
                x = iparams[o]
                draw_ruin_plan(slot, x, state, seeds, spans)
                nm = apply_ruin(slot, missing, nm, x, seeds, spans)
                greedy_recreate(slot, missing, nm, neighbors)
                nm = 0
            elif code == OP_3OPT:
                three_opt_reps(slot, dist, iparams[o], state, perms5, tmp, edges_buf)
            elif code == OP_UNCROSS:
                prob_uncross_k(slot, xs, ys, dist, fparams[o], iparams[o], state, edges_buf)
        out_lengths[c] = tour_len(slot, dist)
        for t in range(n):
            positions[c, t] = slot[t] + 1.0
