import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suffixient import access, fixtures
from suffixient.build import ALGORITHMS
from suffixient.index import (
    MISS,
    Index,
    QueryError,
    QueryStats,
    build_index,
    build_seed_table,
    default_k,
    step_bound,
)
from suffixient.text import from_codes, normalize


def lcs(a: bytes, b: bytes) -> int:
    h = 0
    while h < len(a) and h < len(b) and a[-1 - h] == b[-1 - h]:
        h += 1
    return h


def naive_best(idx, T, beta):
    return max(lcs(beta, T[: x + 1]) for x in idx.entries)


def first_missing_prefix(T: bytes, P: bytes):
    for L in range(1, len(P) + 1):
        if T.find(P[:L]) < 0:
            return L
    return None


def brute_mems(P: bytes, T: bytes):
    """(i, length) pairs straight from the definition, by substring tests."""
    out = set()
    for i in range(len(P)):
        length = 0
        while length <= i and T.find(P[i - length : i + 1]) >= 0:
            length += 1
        if length == 0:
            continue
        if i + 1 < len(P) and T.find(P[i - length + 1 : i + 2]) >= 0:
            continue
        out.add((i, length))
    return out


@pytest.fixture(scope="module")
def banana_index(banana):
    return build_index(banana)[0]


def test_search_banana(banana_index):
    idx = banana_index
    assert idx.entries == [6, 1, 0, 4]
    hit = idx.search(idx.encode(b"AN"))
    assert hit.length == 2 and hit.x == 4
    assert idx.search(idx.encode(b"AX")) == MISS
    assert idx.search_seeded(idx.encode(b"AX")) == MISS
    with pytest.raises(QueryError):
        idx.search(b"")


def test_locate_banana(banana_index):
    idx = banana_index
    res = idx.locate_one(idx.encode(b"ANA"))
    assert res.not_found is None and len(res.ends) == 3
    assert res.ends[2] in (3, 5)
    res = idx.locate_one(idx.encode(b"BANANA"))
    assert res.ends == [0, 1, 2, 3, 4, 5]
    res = idx.locate_one(idx.encode(b"NAX"))
    assert res.not_found == 3 and len(res.ends) == 2
    res = idx.locate_one(idx.encode(b"XNA"))
    assert res.not_found == 1 and res.ends == []


def test_mems_banana(banana_index):
    idx = banana_index
    mems, _ = idx.find_mems(idx.encode(b"ANAB"))
    got = {(m.i, m.length) for m in mems}
    assert got == {(2, 3), (3, 1)}
    for m in mems:
        if m.i == 2:
            assert m.j in (3, 5)
        else:
            assert m.j == 0
    mems, _ = idx.find_mems(idx.encode(b"NAN"))
    assert [(m.i, m.j, m.length) for m in mems] == [(2, 4, 3)]


@pytest.mark.parametrize("seed", range(6))
def test_search_exhaustive_substrings(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 63)
    raw = bytes(rng.choice(b"ACGT"[: rng.randint(1, 4)]) for _ in range(n))
    t = normalize(raw)
    for k in (1, 2, 3, default_k(t.sigma_prime)):
        idx = build_index(t, k=k)[0]
        T = t.data
        for a in range(len(raw)):
            for b in range(a + 1, len(raw) + 1):
                beta = T[a:b]
                best = naive_best(idx, T, beta)
                h1, h2 = idx.search(beta), idx.search_seeded(beta)
                assert h1.length == best == h2.length
                assert lcs(beta, T[: h1.x + 1]) == best
                assert lcs(beta, T[: h2.x + 1]) == best


def test_search_random_queries_and_steps():
    rng = random.Random(20)
    for _ in range(30):
        sigma = rng.choice([2, 4, 16])
        raw = fixtures.random_text(rng.randint(100, 3000), bytes(range(65, 65 + sigma)), rng.randrange(99))
        t = normalize(raw)
        idx = build_index(t, k=rng.randint(1, 5))[0]
        bound = step_bound(idx.chi)
        for _ in range(100):
            beta = idx.encode(bytes(rng.choice(raw[:50] + b"Z") for _ in range(rng.randint(1, 12))))
            best = naive_best(idx, t.data, beta)
            h1, h2 = idx.search(beta), idx.search_seeded(beta)
            assert h1.length == best == h2.length
            st = QueryStats()
            idx.search(beta, st)
            assert st.max_steps <= bound


def test_short_seeded_misses_read_nothing():
    rng = random.Random(21)
    raw = fixtures.random_text(5000, b"ACGT", 3)
    t = normalize(raw)
    idx = build_index(t, k=8)[0]
    checked = 0
    for _ in range(3000):
        beta = idx.encode(bytes(rng.choice(b"ACGT") for _ in range(rng.randint(1, 16))))
        plain = idx.search(beta)
        st = QueryStats()
        seeded = idx.search_seeded(beta, st)
        assert plain.length == seeded.length
        if plain.length < idx.k:
            assert st.oracle_chars_read == 0
            assert st.seed_lookups == 1
            checked += 1
    assert checked > 100


def test_seed_table_properties(banana):
    idx = build_index(banana, k=1)[0]
    st = idx.seeds
    last = {banana.data[x] for x in idx.entries}
    assert len(st.keys) == len(last)
    assert st.bounds[0] == 0 and st.bounds[-1] == idx.chi

    rng = random.Random(22)
    raw = fixtures.random_text(3000, b"ACGT", 5)
    t = normalize(raw)
    idx = build_index(t, k=6)[0]
    st = idx.seeds
    assert st.keys == sorted(set(st.keys))
    for j, key in enumerate(st.keys):
        lo, hi = st.bounds[j], st.bounds[j + 1]
        assert lo < hi
        for r in range(lo, hi):
            x = idx.entries[r]
            assert st.pack(t.data[max(0, x - 5) : x + 1]) == key
    # unpacked keys, read as reversed strings, are in colex order
    def unpack(key):
        return bytes((key >> (st.bits * (st.k - 1 - d))) & ((1 << st.bits) - 1) for d in range(st.k))

    strs = [unpack(key) for key in st.keys]
    assert strs == sorted(strs)


def test_seed_table_width():
    t = normalize(b"ACGTTGCA")
    assert default_k(t.sigma_prime) == 14
    idx = build_index(t)[0]
    assert idx.seeds.bits * idx.seeds.k == 42
    with pytest.raises(QueryError):
        build_seed_table(idx.sa, idx.oracle, 22)
    with pytest.raises(QueryError):
        build_seed_table(idx.sa, idx.oracle, 0)


def check_locate(idx, T, P, strict):
    seen = []
    res = idx.locate_one(P, sink=lambda i, j: seen.append((i, j)), online_strict=strict)
    nf = first_missing_prefix(T, P)
    assert res.not_found == nf
    assert len(res.ends) == (nf - 1 if nf else len(P))
    for L, e in enumerate(res.ends, start=1):
        assert T[e - L + 1 : e + 1] == P[:L]
    assert seen == [(L, e) for L, e in enumerate(res.ends, start=1)]
    assert res.stats.search_calls <= len(P)
    assert res.stats.max_steps <= step_bound(idx.chi)
    return res


@pytest.mark.parametrize("oracle", ["plain", "rlz"])
def test_locate_and_mems_random(oracle):
    rng = random.Random(23)
    for _ in range(25):
        sigma = rng.choice([2, 3, 4, 8])
        raw = fixtures.random_text(rng.randint(50, 2000), b"ACGTNRYK"[:sigma], rng.randrange(99))
        t = normalize(raw)
        idx = build_index(t, oracle=oracle, rho0=32, k=rng.randint(2, 6))[0]
        unseeded = Index(idx.sa, idx.oracle, None, idx.k)
        T = t.data
        for _ in range(40):
            m = rng.randint(1, 50)
            a = rng.randrange(len(raw) - min(m, len(raw)) + 1)
            P = raw[a : a + m]
            if rng.random() < 0.5:
                nrng = np.random.default_rng(rng.randrange(1 << 30))
                P = fixtures.mutate(P, b"ACGTNRYKX"[: sigma + 1], 0.1, nrng)
            q = idx.encode(P)
            for ix in (idx, unseeded):
                for strict in (False, True):
                    check_locate(ix, T, q, strict)
                mems, st = ix.find_mems(q)
                assert {(mm.i, mm.length) for mm in mems} == brute_mems(q, T)
                for mm in mems:
                    assert T[mm.j - mm.length + 1 : mm.j + 1] == q[mm.i - mm.length + 1 : mm.i + 1]
                assert [mm.i for mm in mems] == sorted(mm.i for mm in mems)


def test_prefix_of_text_found_in_place():
    raw = fixtures.random_text(500, b"ACGT", 9)
    idx = build_index(normalize(raw))[0]
    res = idx.locate_one(idx.encode(raw[:40]), online_strict=True)
    assert res.not_found is None and len(res.ends) == 40
    mems, _ = idx.find_mems(idx.encode(raw[100:160]))
    assert len(mems) == 1 and mems[0].i == 59 and mems[0].length == 60


def test_results_independent_of_builder():
    rng = random.Random(24)
    raw = fixtures.random_text(1500, b"ACG", 10)
    t = normalize(raw)
    idxs = [build_index(t, algorithm=a)[0] for a in ALGORITHMS]
    for _ in range(100):
        s = rng.randrange(1400)
        p = fixtures.mutate(raw[s : s + 40], b"ACG", 0.05, np.random.default_rng(rng.randrange(1 << 30)))
        q = idxs[0].encode(p)
        outs = set()
        for ix in idxs:
            res = ix.locate_one(q)
            mems, _ = ix.find_mems(q)
            outs.add((res.not_found, len(res.ends), frozenset((mm.i, mm.length) for mm in mems)))
        assert len(outs) == 1


@pytest.mark.parametrize("oracle", ["plain", "rlz"])
def test_index_round_trip(tmp_path, oracle):
    raw = fixtures.repetitive_dna(copies=5, seed_len=800, rate=0.01, seed=3)
    t = normalize(raw)
    idx = build_index(t, oracle=oracle, rho0=64)[0]
    path = tmp_path / "x.idx"
    idx.save(path)
    back = Index.load(path)
    assert back.to_bytes() == idx.to_bytes()
    assert back.entries == idx.entries and back.k == idx.k
    assert back.oracle.extract(0, t.n) == t.data
    q = idx.encode(raw[1000:1100])
    assert back.locate_one(q).ends == idx.locate_one(q).ends
    with pytest.raises(QueryError):
        Index.from_bytes(idx.to_bytes() + b"\0")
    noseed = build_index(t, seeds=False)[0]
    assert Index.from_bytes(noseed.to_bytes()).seeds is None


def test_quadratic_guard():
    from suffixient import index

    t = from_codes(b"\x01\x02\x00")
    old = index.QUADRATIC_MAX_N
    index.QUADRATIC_MAX_N = 2
    try:
        with pytest.raises(QueryError):
            build_index(t, algorithm="quadratic")
    finally:
        index.QUADRATIC_MAX_N = old


def test_sizes_reported(banana_index):
    sizes = banana_index.component_sizes()
    assert sizes["oracle"] == access.pack(normalize(b"BANANA")).size()


@settings(max_examples=300, deadline=None)
@given(
    text=st.binary(min_size=1, max_size=40).map(lambda b: bytes(65 + c % 3 for c in b)),
    query=st.binary(min_size=1, max_size=12).map(lambda b: bytes(65 + c % 4 for c in b)),
    k=st.integers(1, 6),
)
def test_search_property(text, query, k):
    t = normalize(text)
    idx = build_index(t, k=k)[0]
    q = idx.encode(query)
    best = naive_best(idx, t.data, q)
    assert idx.search(q).length == best == idx.search_seeded(q).length
    assert {(mm.i, mm.length) for mm in idx.find_mems(q)[0]} == brute_mems(q, t.data)
