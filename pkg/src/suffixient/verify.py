"""Brute-force oracles for suffixient sets.

These follow the combinatorial definitions directly (substring enumeration,
hash sets) and never touch suffix arrays, so they stay independent of the
builders they check. They are cubic-ish and capped at ``ORACLE_MAX_N``.

:func:`is_suffixient_fast` is the exception: an O(n log n) check over the
suffix structures, used where the text is too long for the oracles.
"""

from __future__ import annotations

import numpy as np

from .structs import SuffixStructs
from .text import Text

ORACLE_MAX_N = 4096


class OracleTooLarge(ValueError):
    pass


def _check_size(t: Text) -> bytes:
    if t.n > ORACLE_MAX_N:
        raise OracleTooLarge(f"n = {t.n} exceeds the oracle cap {ORACLE_MAX_N}")
    return t.data


def right_extensions(t: Text) -> set[bytes]:
    """All one-symbol extensions ``alpha + c`` of right-maximal strings ``alpha``.

    Right-maximal strings that are suffixes of ``T`` contain the sentinel and
    have no extension, so only strings with two distinct followers matter.
    The empty string qualifies whenever ``T`` has two distinct symbols.
    """
    data = _check_size(t)
    n = len(data)
    followers: dict[bytes, set[int]] = {}
    for i in range(n):
        for j in range(i, n):
            followers.setdefault(data[i:j], set()).add(data[j])
    return {
        alpha + bytes([c])
        for alpha, follow in followers.items()
        if len(follow) >= 2
        for c in follow
    }


def enumerate_supermaximal(t: Text) -> dict[bytes, tuple[int, int]]:
    """Supermaximal extensions mapped to one witness occurrence ``(start, end)``.

    An extension is supermaximal when no other extension has it as a suffix.
    ``end`` is inclusive and 0-based.
    """
    ext = right_extensions(t)
    dominated = set()
    for e in ext:
        for k in range(1, len(e)):
            dominated.add(e[k:])
    out = {}
    for e in ext - dominated:
        start = t.data.find(e)
        out[e] = (start, start + len(e) - 1)
    return out


def min_cardinality_oracle(t: Text) -> int:
    """chi: the number of supermaximal extensions."""
    return len(enumerate_supermaximal(t))


def _suffixes_of_prefixes(data: bytes, positions) -> set[bytes]:
    return {data[x + 1 - k : x + 1] for x in positions for k in range(1, x + 2)}


def is_suffixient(t: Text, positions) -> bool:
    data = _check_size(t)
    if any(not 0 <= x < len(data) for x in positions):
        return False
    return right_extensions(t) <= _suffixes_of_prefixes(data, positions)


def uncovered_extensions(t: Text, positions) -> set[bytes]:
    """Extensions not suffixing any ``T[0..x]``; a counterexample report."""
    return right_extensions(t) - _suffixes_of_prefixes(t.data, positions)


def is_attractor(t: Text, positions) -> bool:
    """Every distinct substring has an occurrence covering some position."""
    data = _check_size(t)
    n = len(data)
    marks = np.zeros(n + 1, dtype=np.int64)
    for x in positions:
        if 0 <= x < n:
            marks[x + 1] = 1
    prefix = np.cumsum(marks).tolist()  # prefix[j] = marked positions in [0, j)
    seen, good = set(), set()
    for i in range(n):
        for j in range(i + 1, n + 1):
            s = data[i:j]
            seen.add(s)
            if prefix[j] - prefix[i] > 0:
                good.add(s)
    return seen == good


# -- large-n structural check -------------------------------------------------


def _sparse_min(a: np.ndarray):
    table = [a]
    k = 1
    while 2 * k <= len(a):
        prev = table[-1]
        table.append(np.minimum(prev[:-k], prev[k:]))
        k *= 2
    return table


def _range_min(table, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """min over ``a[lo..hi]`` inclusive, vectorised; requires lo <= hi."""
    length = hi - lo + 1
    level = np.floor(np.log2(length)).astype(np.int64)
    out = np.empty(len(lo), dtype=np.int64)
    for lv in np.unique(level):
        sel = level == lv
        t = table[lv]
        out[sel] = np.minimum(t[lo[sel]], t[hi[sel] - (1 << lv) + 1])
    return out


def is_suffixient_fast(ss: SuffixStructs, positions) -> bool:
    """Suffixiency check in O(n log n) on the structures of the reversed text.

    Every extension of a right-maximal string is a suffix of an extension read
    at some run break (``T[x - lcp[i] .. x]`` with ``x`` the text position of
    row ``i - 1`` or ``i``), so it suffices to cover those. Coverage of
    ``alpha + c`` by ``x`` means the row of the reversed prefix ``T[0..x]``
    shares ``|alpha| + 1`` symbols with the row of the reversed extension.
    """
    n = ss.n
    bwt = np.frombuffer(ss.bwt, dtype=np.uint8)
    lcp = np.asarray(ss.lcp, dtype=np.int64)
    xs = np.asarray(sorted(set(int(x) for x in positions)), dtype=np.int64)
    if len(xs) == 0 or xs[0] < 0 or xs[-1] >= n:
        return False
    has_end = xs[-1] == n - 1
    inner = xs[xs < n - 1]
    rows = np.sort(ss.isa[n - 2 - inner]) if len(inner) else np.zeros(0, dtype=np.int64)

    brk = np.flatnonzero(bwt[1:] != bwt[:-1]) + 1
    cand_rows = np.concatenate((brk - 1, brk))
    need = np.concatenate((lcp[brk], lcp[brk])) + 1
    sym = bwt[cand_rows]

    # extensions ending with the sentinel are covered only by x = n - 1
    is_end = sym == 0
    if is_end.any() and not has_end:
        return False
    cand_rows, need = cand_rows[~is_end], need[~is_end]
    if len(cand_rows) == 0:
        return True
    if len(rows) == 0:
        return False

    lf = np.empty(n, dtype=np.int64)
    lf[np.argsort(bwt, kind="stable")] = np.arange(n)
    r = lf[cand_rows]

    table = _sparse_min(lcp)
    k = np.searchsorted(rows, r, side="right")  # rows[k-1] <= r < rows[k]
    ok = np.zeros(len(r), dtype=bool)

    has_pred = k > 0
    pred = rows[np.maximum(k - 1, 0)]
    exact = has_pred & (pred == r)
    ok |= exact
    sel = has_pred & ~exact
    if sel.any():
        ok[sel] |= _range_min(table, pred[sel] + 1, r[sel]) >= need[sel]
    has_succ = k < len(rows)
    succ = rows[np.minimum(k, len(rows) - 1)]
    sel = has_succ & ~ok
    if sel.any():
        ok[sel] |= _range_min(table, r[sel] + 1, succ[sel]) >= need[sel]
    return bool(ok.all())
