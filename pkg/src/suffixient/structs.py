"""Suffix array, LCP array and BWT of the reversed text, plus PSV/NSV.

All arrays are 0-based numpy ``int64`` vectors. ``lcp[0]`` is 0 and
``lcp[i]`` (i >= 1) is the longest common prefix of the suffixes at rows
``i - 1`` and ``i``. ``bwt[i]`` is the symbol preceding suffix ``sa[i]``,
wrapping to the sentinel for the suffix that starts the string.

The construction algorithms consume these arrays built over ``reverse_text(T)``.
Row ``i`` then corresponds to position ``text_pos(ss, i) = n - 1 - sa[i]`` of
``T``: the BWT symbol at that row is ``T[text_pos]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .text import Text


def suffix_array(codes) -> np.ndarray:
    """Suffix array by prefix doubling over numpy ranks.

    ``codes`` must end with a unique smallest symbol so no suffix is a prefix
    of another.
    """
    s = np.frombuffer(bytes(codes), dtype=np.uint8).astype(np.int64)
    n = len(s)
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    sa = np.argsort(s, kind="stable")
    srt = s[sa]
    rank = np.empty(n, dtype=np.int64)
    rank[sa] = np.concatenate(([0], np.cumsum(srt[1:] != srt[:-1])))
    k = 1
    while rank.max() < n - 1:
        second = np.zeros(n, dtype=np.int64)
        second[: n - k] = rank[k:] + 1
        key = rank * (n + 1) + second
        sa = np.argsort(key, kind="stable")
        srt = key[sa]
        rank[sa] = np.concatenate(([0], np.cumsum(srt[1:] != srt[:-1])))
        k *= 2
    return sa


@numba.njit(cache=True)
def _kasai(s, sa, isa):
    n = len(s)
    lcp = np.zeros(n, dtype=np.int64)
    h = 0
    for p in range(n):
        r = isa[p]
        if r == 0:
            h = 0
            continue
        q = sa[r - 1]
        while p + h < n and q + h < n and s[p + h] == s[q + h]:
            h += 1
        lcp[r] = h
        if h > 0:
            h -= 1
    return lcp


def lcp_array(codes, sa: np.ndarray) -> np.ndarray:
    """Kasai et al. LCP construction; ``lcp[0] = 0``."""
    s = np.frombuffer(bytes(codes), dtype=np.uint8)
    isa = np.empty_like(sa)
    isa[sa] = np.arange(len(sa))
    return _kasai(s, sa, isa)


@dataclass(frozen=True)
class SuffixStructs:
    sa: np.ndarray
    lcp: np.ndarray
    bwt: bytes
    sigma: int               # code universe size (max code + 1)
    _isa: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.sa)

    @property
    def isa(self) -> np.ndarray:
        if self._isa is None:
            isa = np.empty_like(self.sa)
            isa[self.sa] = np.arange(self.n)
            object.__setattr__(self, "_isa", isa)
        return self._isa


def build(t: Text) -> SuffixStructs:
    """SA, LCP and BWT of ``t`` (callers pass the reversed text)."""
    sa = suffix_array(t.data)
    lcp = lcp_array(t.data, sa)
    s = np.frombuffer(t.data, dtype=np.uint8)
    bwt = s[sa - 1].tobytes()  # sa - 1 == -1 wraps to the sentinel
    return SuffixStructs(sa, lcp, bwt, max(t.data) + 1)


def runs(seq) -> int:
    """Number of maximal equal-symbol runs."""
    if not len(seq):
        return 0
    a = np.frombuffer(bytes(seq), dtype=np.uint8)
    return 1 + int(np.count_nonzero(a[1:] != a[:-1]))


@dataclass(frozen=True)
class SvArrays:
    psv: list   # previous smaller value index, -1 when none
    nsv: list   # next smaller value index, n when none


def build_sv(lcp) -> SvArrays:
    """PSV/NSV of ``lcp`` with a monotone stack pass in each direction."""
    lcp = lcp.tolist() if isinstance(lcp, np.ndarray) else list(lcp)
    n = len(lcp)
    psv = [-1] * n
    nsv = [n] * n
    stack = []
    for i in range(n):
        v = lcp[i]
        while stack and lcp[stack[-1]] >= v:
            stack.pop()
        if stack:
            psv[i] = stack[-1]
        stack.append(i)
    stack.clear()
    for i in range(n - 1, -1, -1):
        v = lcp[i]
        while stack and lcp[stack[-1]] >= v:
            stack.pop()
        if stack:
            nsv[i] = stack[-1]
        stack.append(i)
    return SvArrays(psv, nsv)


def text_pos(ss: SuffixStructs, i: int) -> int:
    """Position of ``T`` whose symbol sits at BWT row ``i``."""
    if not 0 <= i < ss.n:
        raise IndexError(f"row {i} out of range")
    return ss.n - 1 - int(ss.sa[i])


def bwt_row(ss: SuffixStructs, x: int) -> int:
    """Inverse of :func:`text_pos`."""
    if not 0 <= x < ss.n:
        raise IndexError(f"position {x} out of range")
    return int(ss.isa[ss.n - 1 - x])


def colex_rank(ss: SuffixStructs, x: int) -> int:
    """Rank (0-based) of prefix ``T[0..x]`` in colex order among all prefixes.

    The reversed prefix ``T[x] .. T[0]`` followed by the sentinel is the suffix
    of the reversed text starting at ``n - 2 - x``. The full text ends with the
    sentinel and ranks first.
    """
    n = ss.n
    if not 0 <= x < n:
        raise IndexError(f"position {x} out of range")
    if x == n - 1:
        return 0
    return int(ss.isa[n - 2 - x])


def colex_ranks(ss: SuffixStructs, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    n = ss.n
    out = np.zeros(len(xs), dtype=np.int64)
    inner = xs < n - 1
    out[inner] = ss.isa[n - 2 - xs[inner]]
    return out
