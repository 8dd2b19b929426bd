"""Pattern matching over a Suffixient Array plus a random-access oracle.

``search(beta)`` binary-searches the colex-sorted array for the entry whose
prefix ``T[0..x]`` shares the longest suffix with ``beta``. Everything else
(one occurrence per pattern prefix, maximal exact matches) is a sequence of
``search`` calls and forward symbol comparisons against the oracle.

Queries are code strings (see :func:`suffixient.text.query_codes`). Text
positions are 0-based; a miss is reported as ``x = -1, length = 0``.
"""

from __future__ import annotations

import math
import struct
import time
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import access, structs
from .access import ExtractStats, OracleContract
from .build import BUILDERS, SuffixientArray, to_suffixient_array
from .text import Text, query_codes, reverse_text

DEFAULT_K = 14
QUADRATIC_MAX_N = 10**6


class QueryError(ValueError):
    pass


@dataclass(frozen=True)
class SearchHit:
    x: int        # 0-based end in T, -1 on a miss
    length: int


MISS = SearchHit(-1, 0)


@dataclass(frozen=True)
class Mem:
    i: int        # 0-based end in P
    j: int        # 0-based end in T
    length: int


@dataclass
class QueryStats:
    search_calls: int = 0
    binary_search_steps: int = 0
    max_steps: int = 0              # largest step count of a single search
    seed_lookups: int = 0
    io: ExtractStats = field(default_factory=ExtractStats)

    @property
    def oracle_chars_read(self) -> int:
        return self.io.chars

    def _steps(self, s: int):
        self.binary_search_steps += s
        if s > self.max_steps:
            self.max_steps = s


@dataclass
class LocateResult:
    """``ends[L - 1]`` is the end in T of an occurrence of ``P[:L]``.

    ``not_found`` is the length of the shortest prefix that does not occur,
    or None when the whole pattern occurs.
    """

    ends: list
    not_found: int | None
    stats: QueryStats


def step_bound(chi: int) -> int:
    return math.ceil(math.log2(chi + 1)) + 2


def default_k(sigma_prime: int) -> int:
    return min(DEFAULT_K, 64 // access.bits_per_symbol(sigma_prime))


def _common_suffix(a: bytes, b: bytes) -> int:
    """Longest common suffix of two equal-length byte strings that differ."""
    lo, hi = 0, len(a) - 1
    la = len(a)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if a[la - mid :] == b[la - mid :]:
            lo = mid
        else:
            hi = mid - 1
    return lo


# -- seed table ------------------------------------------------------------------


@dataclass
class SeedTable:
    """Packed reversed k-suffixes of the sA prefixes, one key per sA range.

    The last symbol of a prefix sits in the most significant digit group, so
    integer order is colex order truncated to ``k`` symbols. Short strings
    are padded with code 0 in the low digits. Range ``j`` is
    ``[bounds[j], bounds[j + 1])`` over sA.
    """

    k: int
    bits: int
    keys: list
    bounds: list

    def pack(self, s: bytes) -> int:
        k, b = self.k, self.bits
        s = s[-k:]
        key = 0
        for c in reversed(s):
            key = (key << b) | c
        return key << (b * (k - len(s)))

    def common_digits(self, a: int, b: int) -> int:
        return self.k - ((a ^ b).bit_length() + self.bits - 1) // self.bits

    def to_bytes(self) -> bytes:
        head = struct.pack("<BQ", self.k, len(self.keys))
        if not self.keys:
            return head
        return head + np.asarray(self.keys, dtype="<u8").tobytes() + np.asarray(
            self.bounds, dtype="<u8"
        ).tobytes()

    @classmethod
    def from_bytes(cls, buf, offset, sigma_prime):
        k, count = struct.unpack_from("<BQ", buf, offset)
        offset += 9
        if k == 0:
            return None, offset
        keys = np.frombuffer(buf, dtype="<u8", count=count, offset=offset).tolist()
        offset += 8 * count
        bounds = np.frombuffer(buf, dtype="<u8", count=count + 1, offset=offset).tolist()
        offset += 8 * (count + 1)
        return cls(k, access.bits_per_symbol(sigma_prime), keys, bounds), offset


def build_seed_table(sa: SuffixientArray, oracle: OracleContract, k: int) -> SeedTable:
    b = access.bits_per_symbol(sa.sigma_prime)
    if k < 1 or k * b > 64:
        raise QueryError(f"k = {k} does not fit a 64-bit key at {b} bits per symbol")
    table = SeedTable(k, b, [], [])
    keys, bounds = table.keys, table.bounds
    for r, x in enumerate(sa.entries.tolist()):
        lo = max(0, x + 1 - k)
        key = table.pack(oracle.extract(lo, x + 1 - lo))
        if keys and key == keys[-1]:
            continue
        if keys and key < keys[-1]:
            raise QueryError("suffixient array is not in colex order")
        keys.append(key)
        bounds.append(r)
    bounds.append(sa.chi)
    return table


# -- index ---------------------------------------------------------------------

_NO_SEEDS = struct.pack("<BQ", 0, 0)


class Index:
    def __init__(self, sa: SuffixientArray, oracle: OracleContract, seeds: SeedTable | None = None,
                 k: int | None = None):
        if oracle.n != sa.n:
            raise QueryError("oracle and suffixient array disagree on n")
        self.sa = sa
        self.oracle = oracle
        self.seeds = seeds
        self.n = sa.n
        self.chi = sa.chi
        self.k = seeds.k if seeds is not None else (k or default_k(sa.sigma_prime))
        self.entries = sa.entries.tolist()
        present = bytearray(256)
        for x in self.entries:
            present[oracle.access(x)] = 1
        self._present = present
        self._present_codes = bytes(c for c in range(256) if present[c])

    # -- queries ----------------------------------------------------------------

    def encode(self, raw: bytes) -> bytes:
        return query_codes(self.sa.alpha_map, self.sa.sigma_prime, raw)

    def _lcs(self, beta: bytes, x: int, skip: int, io) -> tuple[int, int]:
        """(LCS(beta, T[0..x]), T[x - lcs]) with the first ``skip`` symbols known equal.

        The second value is -1 when either string is exhausted.
        """
        blen = len(beta)
        limit = min(blen, x + 1)
        done, w = skip, 16
        extract = self.oracle.extract
        while done < limit:
            take = min(done + w, limit)
            seg = extract(x + 1 - take, take - done, io)
            mine = beta[blen - take : blen - done]
            if seg == mine:
                done = take
                w *= 2
                continue
            c = _common_suffix(seg, mine)
            return done + c, seg[len(seg) - 1 - c]
        return limit, -1

    def _bsearch(self, beta, lo, hi, skip, stats):
        """Best hit among entries[lo:hi], all known to share ``skip`` symbols with beta."""
        entries, io = self.entries, stats.io
        L = len(beta)
        a, b = lo, hi
        seen = {}
        steps = 0
        while a < b:
            mid = (a + b) // 2
            steps += 1
            x = entries[mid]
            h, tc = self._lcs(beta, x, skip, io)
            seen[mid] = h
            if h < L and (h == x + 1 or tc < beta[L - 1 - h]):
                a = mid + 1
            else:
                b = mid
        stats._steps(steps)
        best = MISS
        for r in (a - 1, a):
            if lo <= r < hi:
                h = seen.get(r)
                if h is None:
                    h = self._lcs(beta, entries[r], skip, io)[0]
                if h > best.length:
                    best = SearchHit(entries[r], h)
        return best

    def search(self, beta: bytes, stats: QueryStats | None = None) -> SearchHit:
        """Entry of sA maximizing the common suffix with ``beta``; ties go to the colex predecessor."""
        if stats is None:
            stats = QueryStats()
        if not beta:
            raise QueryError("empty query")
        stats.search_calls += 1
        if not self._present[beta[-1]]:
            return MISS
        return self._bsearch(beta, 0, self.chi, 0, stats)

    def search_seeded(self, beta: bytes, stats: QueryStats | None = None) -> SearchHit:
        """Same match length as :meth:`search`, narrowing the range with the seed table first."""
        st = self.seeds
        if st is None:
            return self.search(beta, stats)
        if stats is None:
            stats = QueryStats()
        if not beta:
            raise QueryError("empty query")
        stats.search_calls += 1
        absent = beta.translate(None, self._present_codes)
        if absent:
            # nothing matches across an absent symbol
            cut = max(beta.rfind(bytes([c])) for c in set(absent))
            beta = beta[cut + 1 :]
            if not beta:
                return MISS
        L, k = len(beta), st.k
        q = st.pack(beta)
        stats.seed_lookups += 1
        keys, bounds = st.keys, st.bounds
        j = bisect_right(keys, q) - 1
        if j >= 0 and keys[j] == q:
            lo, hi = bounds[j], bounds[j + 1]
            if L <= k:
                return SearchHit(self.entries[lo], L)
            return self._bsearch(beta, lo, hi, k, stats)
        best, best_j = 0, -1
        for r in (j, j + 1):
            if 0 <= r < len(keys):
                h = min(st.common_digits(q, keys[r]), L)
                if h > best:
                    best, best_j = h, r
        if best == 0:
            return MISS
        return SearchHit(self.entries[bounds[best_j]], best)

    def _lcp_forward(self, P: bytes, i: int, j: int, io) -> int:
        """LCP(P[i:], T[j:]) by chunked oracle reads."""
        m, n = len(P), self.n
        done, w = 0, 16
        extract = self.oracle.extract
        while True:
            rem = min(m - i - done, n - j - done)
            if rem <= 0:
                return done
            take = min(w, rem)
            seg = extract(j + done, take, io)
            mine = P[i + done : i + done + take]
            if seg == mine:
                done += take
                w *= 2
                continue
            return done + access._common_prefix(seg, mine)

    def _searcher(self, seeded):
        if seeded is None:
            seeded = self.seeds is not None
        return self.search_seeded if seeded else self.search

    def locate_one(self, P: bytes, sink: Callable[[int, int], None] | None = None,
                   online_strict: bool = False, seeded: bool | None = None) -> LocateResult:
        """One occurrence end for every prefix of ``P``, stopping at the first absent prefix.

        ``sink(length, end)`` is called per prefix as soon as it is known.
        Unless ``online_strict`` is set, the scan starts with probes for the
        longest prefix of ``P[:k]`` that suffixes some sA prefix, which skips
        the searches short prefixes would otherwise trigger.
        """
        if not P:
            raise QueryError("empty pattern")
        search = self._searcher(seeded)
        stats = QueryStats()
        io = stats.io
        ends = []
        m = len(P)

        def emit(i0, j0, d):
            # prefixes i0+1 .. i0+d end at j0+1 .. j0+d
            if sink is None:
                ends.extend(range(j0 + 1, j0 + d + 1))
            else:
                for t in range(1, d + 1):
                    ends.append(j0 + t)
                    sink(i0 + t, j0 + t)

        failed = ()
        i, j = 0, -1
        if not online_strict:
            K = min(m, self.k)
            found = 0
            for L in range(K, 0, -1):
                hit = search(P[:L], stats)
                if hit.length == L:
                    found = L
                    break
            if found == 0:
                return LocateResult(ends, 1, stats)
            failed = range(found + 1, K + 1)
            emit(0, hit.x - found, found)
            i, j = found, hit.x

        while i < m:
            d = self._lcp_forward(P, i, j + 1, io)
            if d:
                emit(i, j, d)
                i += d
                j += d
                if i == m:
                    break
            L = i + 1
            if L in failed:
                return LocateResult(ends, L, stats)
            hit = search(P[:L], stats)
            if hit.length < L:
                return LocateResult(ends, L, stats)
            emit(i, hit.x - 1, 1)
            i, j = L, hit.x
        return LocateResult(ends, None, stats)

    def find_mems(self, P: bytes, seeded: bool | None = None) -> tuple[list[Mem], QueryStats]:
        """All maximal exact matches of ``P`` in ``T``, by increasing end in P."""
        if not P:
            raise QueryError("empty pattern")
        search = self._searcher(seeded)
        stats = QueryStats()
        io = stats.io
        m = len(P)
        out = []
        # 1-based i, j as in the textbook loop; ell = LCS(T[1, j-1], P[1, i-1])
        i = j = 1
        ell = 0
        while i <= m:
            hit = search(P[i - ell - 1 : i], stats)
            jp, lp = hit.x + 1, hit.length
            if lp < ell + 1 and ell > 0:
                out.append(Mem(i - 2, j - 2, ell))
            d = self._lcp_forward(P, i, jp, io)
            i, j, ell = i + d + 1, jp + d + 1, lp + d
        if ell > 0:
            out.append(Mem(i - 2, j - 2, ell))
        return out, stats

    # -- persistence --------------------------------------------------------------

    def to_bytes(self) -> bytes:
        seeds = self.seeds.to_bytes() if self.seeds is not None else _NO_SEEDS
        return self.sa.to_bytes() + seeds + self.oracle.to_bytes()

    @classmethod
    def from_bytes(cls, buf) -> "Index":
        sa, off = SuffixientArray.from_bytes(buf)
        seeds, off = SeedTable.from_bytes(buf, off, sa.sigma_prime)
        oracle, off = access.oracle_from_bytes(buf, off)
        if off != len(buf):
            raise QueryError(f"{len(buf) - off} trailing bytes in index")
        return cls(sa, oracle, seeds)

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "Index":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def component_sizes(self) -> dict:
        return {
            "suffixient_array": len(self.sa.to_bytes()),
            "seeds": len(self.seeds.to_bytes()) if self.seeds is not None else len(_NO_SEEDS),
            "oracle": self.oracle.size(),
        }


search = Index.search
search_seeded = Index.search_seeded
locate_one = Index.locate_one
find_mems = Index.find_mems


def build_index(t: Text, algorithm: str = "linear-fm", oracle: str = "plain",
                k: int | None = None, seeds: bool = True,
                epsilon: float = access.DEFAULT_EPSILON, rho0: int = access.DEFAULT_RHO0):
    """Full pipeline: structures of the reversed text, sA, seed table, oracle.

    Returns ``(index, info)``; ``info`` holds n, sigma', chi, r and timings.
    """
    if algorithm not in BUILDERS:
        raise QueryError(f"unknown algorithm {algorithm!r}")
    if algorithm == "quadratic" and t.n > QUADRATIC_MAX_N:
        raise QueryError(f"quadratic algorithm limited to n <= {QUADRATIC_MAX_N}")
    t0 = time.perf_counter()
    ss = structs.build(reverse_text(t))
    t1 = time.perf_counter()
    s = BUILDERS[algorithm](ss)
    sa = to_suffixient_array(s, ss, t)
    t2 = time.perf_counter()
    if oracle == "plain":
        orc = access.pack(t)
    elif oracle == "rlz":
        orc = access.build_rlz(t, epsilon, rho0)
    else:
        raise QueryError(f"unknown oracle {oracle!r}")
    t3 = time.perf_counter()
    k = k or default_k(t.sigma_prime)
    table = build_seed_table(sa, orc, k) if seeds else None
    idx = Index(sa, orc, table, k)
    info = {
        "n": t.n,
        "sigma_prime": t.sigma_prime,
        "chi": sa.chi,
        "r": structs.runs(ss.bwt),
        "structs_s": t1 - t0,
        "build_s": t2 - t1,
        "oracle_s": t3 - t2,
    }
    return idx, info
