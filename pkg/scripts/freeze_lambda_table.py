"""Exact shortest zeroing lengths for every partition of 2^W, W <= 6, frozen to disk.

The acceptance suite compares Bit Matcher against this table for every
partition with sum <= 64. Rerunning the per-partition search for all 1.7M
partitions of 64 is far too slow, so this script solves the literal
transaction graph for all weight multisets at once.

States are multisets of positive weights, ranked in the order produced by
``tcamsplit.harness.integer_partitions`` (parts non-increasing, partitions in
reverse lexicographic order). A move sends a power of two ``m <= v`` from a
part ``v`` to another part, to the sink (the sum drops by ``m``) or to an empty
target. Layers are solved by increasing sum: sink moves only reach lower
layers, whose distances are final, and distances inside a layer are relaxed
in place until nothing changes.

Two tables come out of one run. ``strict`` never sends to an empty target, so
it is a valid upper bound for any number of targets. ``free`` lets every
move use a fresh empty target, so it is a lower bound. Where they agree the
literal value is pinned; the script reports any disagreement and refuses to
save if one reaches a partition that is stored.

    python scripts/freeze_lambda_table.py --out tests/data/lambda_oracle.npz

Needs numba.
"""
import argparse
import time

import numba as nb
import numpy as np

MAX_SUM = 64
INF = 255


def partition_counts(n_max: int) -> np.ndarray:
    """``c[n, m]``: partitions of ``n`` with every part at most ``m``."""
    c = np.zeros((n_max + 1, n_max + 1), dtype=np.int64)
    c[0, :] = 1
    for n in range(1, n_max + 1):
        for m in range(1, n_max + 1):
            c[n, m] = c[n, m - 1] + (c[n - m, m] if m <= n else 0)
    return c


@nb.njit(cache=True)
def _rank(parts, length, total, counts):
    r = 0
    rem = total
    cap = total
    for i in range(length):
        a = parts[i]
        r += counts[rem, cap] - counts[rem, a]
        rem -= a
        cap = a
    return r


@nb.njit(cache=True)
def _insert(buf, length, x):
    # insert x into the non-increasing prefix buf[:length]
    i = length
    while i > 0 and buf[i - 1] < x:
        buf[i] = buf[i - 1]
        i -= 1
    buf[i] = x
    return length + 1


@nb.njit(cache=True)
def _copy_without(parts, length, skip1, skip2, buf):
    n = 0
    for i in range(length):
        if i != skip1 and i != skip2:
            buf[n] = parts[i]
            n += 1
    return n


@nb.njit(cache=True)
def _next_partition(parts, length):
    """Advance to the next partition in reverse lexicographic order; return the new length or 0."""
    ones = 0
    j = length - 1
    while j >= 0 and parts[j] == 1:
        ones += 1
        j -= 1
    if j < 0:
        return 0
    x = parts[j] - 1
    rem = ones + 1
    parts[j] = x
    n = j + 1
    while rem > 0:
        y = x if rem >= x else rem
        parts[n] = y
        n += 1
        rem -= y
    return n


@nb.njit(cache=True)
def _relax(total, parts, length, dist, offsets, counts, buf, free):
    """Best ``1 + dist`` over all moves out of the given state (INF if none improve)."""
    best = INF
    for si in range(length):
        v = parts[si]
        if si > 0 and parts[si - 1] == v:
            continue
        m = 1
        while m <= v:
            left = v - m
            # sink
            n = _copy_without(parts, length, si, -1, buf)
            if left:
                n = _insert(buf, n, left)
            d = dist[offsets[total - m] + _rank(buf, n, total - m, counts)]
            if d + 1 < best:
                best = d + 1
            # another part; equal receivers give equal results
            for ri in range(length):
                if ri == si:
                    continue
                u = parts[ri]
                if ri > 0 and parts[ri - 1] == u and ri - 1 != si:
                    continue
                if ri > 1 and ri - 1 == si and parts[ri - 2] == u:
                    continue
                n = _copy_without(parts, length, si, ri, buf)
                if left:
                    n = _insert(buf, n, left)
                n = _insert(buf, n, u + m)
                d = dist[offsets[total] + _rank(buf, n, total, counts)]
                if d + 1 < best:
                    best = d + 1
            # a fresh empty target; sending a whole part there changes nothing
            if free and left:
                n = _copy_without(parts, length, si, -1, buf)
                n = _insert(buf, n, left)
                n = _insert(buf, n, m)
                d = dist[offsets[total] + _rank(buf, n, total, counts)]
                if d + 1 < best:
                    best = d + 1
            m <<= 1
    return best


@nb.njit(cache=True)
def _solve_layer(total, dist, offsets, counts, free):
    parts = np.zeros(total + 2, dtype=np.int64)
    buf = np.zeros(total + 2, dtype=np.int64)
    sweeps = 0
    changed = True
    while changed:
        changed = False
        sweeps += 1
        parts[0] = total
        length = 1
        idx = offsets[total]
        while length:
            b = _relax(total, parts, length, dist, offsets, counts, buf, free)
            if b < dist[idx]:
                dist[idx] = b
                changed = True
            idx += 1
            length = _next_partition(parts, length)
    return sweeps


def solve(max_sum: int = MAX_SUM, free: bool = False, log=print) -> tuple[np.ndarray, np.ndarray]:
    counts = partition_counts(max_sum)
    sizes = [int(counts[n, n]) for n in range(max_sum + 1)]
    offsets = np.zeros(max_sum + 2, dtype=np.int64)
    offsets[1:] = np.cumsum(sizes)
    dist = np.full(int(offsets[-1]), INF, dtype=np.uint8)
    dist[0] = 0
    for total in range(1, max_sum + 1):
        t0 = time.time()
        sweeps = _solve_layer(total, dist, offsets, counts, free)
        if total & (total - 1) == 0 or total % 8 == 0:
            log(f"{'free' if free else 'strict'} sum {total}: {sizes[total]} states, "
                f"{sweeps} sweeps, {time.time() - t0:.1f}s")
    return dist, offsets


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-width", type=int, default=6)
    ap.add_argument("--out", default="tests/data/lambda_oracle.npz")
    args = ap.parse_args()
    top = 1 << args.max_width

    def log(msg):
        print(msg, flush=True)

    strict, offsets = solve(top, free=False, log=log)
    free, _ = solve(top, free=True, log=log)
    if (strict == INF).any():
        raise SystemExit("some state was never reached")
    differ = np.flatnonzero(strict != free)
    log(f"strict and free disagree on {len(differ)} of {len(strict)} states")

    tables = {}
    for width in range(args.max_width + 1):
        total = 1 << width
        lo, hi = offsets[total], offsets[total + 1]
        if (strict[lo:hi] != free[lo:hi]).any():
            raise SystemExit(f"sum {total}: the two bounds disagree, the literal value is not pinned")
        tables[f"sum_{total}"] = strict[lo:hi].copy()
    np.savez_compressed(args.out, **tables)
    log(f"wrote {args.out}")


if __name__ == "__main__":
    main()
