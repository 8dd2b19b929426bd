"""Command line front end: build, locate, mems, stats, verify, bench.

Positions printed by locate/mems are 1-based; ``i`` is the end in the
pattern and ``j`` the end in the text.
"""

from __future__ import annotations

import argparse
import itertools
import random
import statistics
import sys
import time

import numpy as np

from . import access, fixtures, structs
from .build import ALGORITHMS, BUILDERS
from .index import QUADRATIC_MAX_N, Index, QueryError, build_index
from .text import DNA, TextError, from_codes, normalize, permute_alphabet, read_input, reverse_text
from . import verify as vf

PERMUTE_MAX_SIGMA = 8
BENCH_HEADER = "command,m,patterns,mean_ns_per_char,median_ns_per_char,search_calls_mean,steps_mean"


class CliError(Exception):
    pass


def _load_text(path, fasta, filt):
    raw = read_input(path, fasta=fasta)
    return normalize(raw, DNA if filt == "dna" else None)


def read_patterns(path, fasta=False) -> list[tuple[str, bytes]]:
    with open(path, "rb") as fh:
        data = fh.read()
    if fasta:
        out, name, seq = [], None, []
        for line in data.splitlines():
            if line.startswith(b">"):
                if name is not None:
                    out.append((name, b"".join(seq)))
                name = line[1:].split()[0].decode() if line[1:].split() else str(len(out) + 1)
                seq = []
            elif line.strip():
                if name is None:
                    raise CliError("FASTA sequence line before any header")
                seq.append(line.strip())
        if name is not None:
            out.append((name, b"".join(seq)))
    else:
        lines = data.split(b"\n")
        if lines and lines[-1] == b"":
            lines.pop()
        out = [(str(k), ln.rstrip(b"\r")) for k, ln in enumerate(lines, start=1)]
    for name, p in out:
        if not p:
            raise CliError(f"pattern {name} is empty")
    return out


# -- commands -------------------------------------------------------------------


def cmd_build(a, out):
    t = _load_text(a.input, a.fasta, a.filter)
    if a.algorithm == "quadratic" and t.n > QUADRATIC_MAX_N:
        raise CliError(f"quadratic algorithm limited to n <= {QUADRATIC_MAX_N}")
    t0 = time.perf_counter()
    idx, info = build_index(t, a.algorithm, a.oracle, a.k, not a.no_seeds, a.epsilon, a.rho0)
    elapsed = time.perf_counter() - t0
    idx.save(a.output)
    sizes = idx.component_sizes()
    rows = [
        ("n", info["n"]),
        ("sigma_prime", info["sigma_prime"]),
        ("chi", info["chi"]),
        ("r", info["r"]),
        ("algorithm", a.algorithm),
        ("oracle", a.oracle),
        ("k", idx.k if idx.seeds is not None else 0),
        ("build_seconds", f"{elapsed:.3f}"),
        ("sa_bytes", sizes["suffixient_array"]),
        ("seed_bytes", sizes["seeds"]),
        ("oracle_bytes", sizes["oracle"]),
        ("plain_oracle_bytes", access.pack(t).size()),
    ]
    if a.oracle == "rlz":
        rows.append(("rlz_reference", idx.oracle.rho))
        rows.append(("rlz_phrases", idx.oracle.phrases))
    for k, v in rows:
        print(f"{k}\t{v}", file=out)


def _stats_cols(st):
    return f"\t{st.search_calls}\t{st.binary_search_steps}\t{st.oracle_chars_read}"


def cmd_locate(a, out):
    idx = Index.load(a.index)
    for name, raw in read_patterns(a.patterns, a.fasta):
        try:
            p = idx.encode(raw)
        except TextError as exc:
            raise CliError(f"pattern {name}: {exc}") from exc
        lines = []
        sink = None
        if a.prefixes:
            sink = lambda i, j: lines.append(f"{name}\t{i}\t{j + 1}")
        res = idx.locate_one(p, sink=sink, online_strict=a.online_strict)
        extra = _stats_cols(res.stats) if a.stats else ""
        if res.not_found is None and not a.prefixes:
            lines.append(f"{name}\t{len(p)}\t{res.ends[-1] + 1}")
        if res.not_found is not None:
            lines.append(f"{name}\tNOT_FOUND\t{res.not_found}")
        for ln in lines:
            print(ln + extra, file=out)


def cmd_mems(a, out):
    idx = Index.load(a.index)
    for name, raw in read_patterns(a.patterns, a.fasta):
        try:
            p = idx.encode(raw)
        except TextError as exc:
            raise CliError(f"pattern {name}: {exc}") from exc
        mems, st = idx.find_mems(p)
        extra = _stats_cols(st) if a.stats else ""
        for mm in mems:
            print(f"{name}\t{mm.i + 1}\t{mm.j + 1}\t{mm.length}{extra}", file=out)


def _chi_and_runs(t):
    ss = structs.build(reverse_text(t))
    return len(BUILDERS["linear-fm"](ss)), structs.runs(ss.bwt)


def cmd_stats(a, out):
    t = _load_text(a.input, a.fasta, a.filter)
    chi, r = _chi_and_runs(t)
    print(f"n\t{t.n}", file=out)
    print(f"sigma_prime\t{t.sigma_prime}", file=out)
    print(f"chi\t{chi}", file=out)
    print(f"r\t{r}", file=out)
    if not a.permute_alphabet:
        return 0
    if t.sigma_prime > PERMUTE_MAX_SIGMA:
        raise CliError(f"alphabet permutations limited to sigma' <= {PERMUTE_MAX_SIGMA}")
    chis, rs = set(), []
    for order in itertools.permutations(range(1, t.sigma_prime)):
        c, rr = _chi_and_runs(permute_alphabet(t, order))
        chis.add(c)
        rs.append(rr)
    print(f"permutations\t{len(rs)}", file=out)
    print(f"r_min\t{min(rs)}", file=out)
    print(f"r_max\t{max(rs)}", file=out)
    print(f"chi_invariant\t{'yes' if chis == {chi} else 'no'}", file=out)
    return 0 if chis == {chi} else 1


def _verify_text(t, fault, out) -> bool:
    ss = structs.build(reverse_text(t))
    chi = vf.min_cardinality_oracle(t)
    for name, f in BUILDERS.items():
        s = sorted(f(ss))
        if fault:
            s = s[1:]
        if len(s) != chi or not vf.is_suffixient(t, s):
            missing = sorted(vf.uncovered_extensions(t, s))
            print(f"FAIL\t{name}\ttext={t.decode().decode()}\tchi={chi}\tgot={len(s)}"
                  f"\tuncovered={[t.decode(e).decode() for e in missing]}", file=out)
            return False
    return True


def cmd_verify(a, out):
    """Exhaustive and random oracle sweeps; exit status 0 iff everything passes."""
    checked = 0
    for sigma, max_len in ((2, a.exhaustive_n), (3, a.exhaustive_n3)):
        for length in range(1, max_len + 1):
            for w in itertools.product(range(1, sigma + 1), repeat=length):
                checked += 1
                if not _verify_text(from_codes(bytes(w) + b"\0"), a.inject_fault, out):
                    return 1
    rng = random.Random(a.seed)
    for _ in range(a.random):
        n = rng.randint(1, a.random_max_n)
        sigma = rng.randint(1, 6)
        t = from_codes(bytes(rng.randint(1, sigma) for _ in range(n)) + b"\0")
        checked += 1
        if not _verify_text(t, a.inject_fault, out):
            return 1
        idx, _ = build_index(t)
        for _ in range(20):
            x = rng.randrange(t.n - 1)
            y = rng.randint(x + 1, t.n - 1)
            beta = t.data[x:y]
            best = max(_lcs(beta, t.data[: e + 1]) for e in idx.entries)
            h1, h2 = idx.search(beta), idx.search_seeded(beta)
            if not (h1.length == h2.length == best):
                print(f"FAIL\tsearch\ttext={t.decode().decode()}\tquery={t.decode(beta).decode()}"
                      f"\texpected={best}\tplain={h1.length}\tseeded={h2.length}", file=out)
                return 1
    print(f"PASS\t{checked} texts", file=out)
    return 0


def _lcs(a: bytes, b: bytes) -> int:
    h = 0
    while h < len(a) and h < len(b) and a[-1 - h] == b[-1 - h]:
        h += 1
    return h


def _time_queries(fn, pats, m):
    per, calls, steps = [], [], []
    for p in pats:
        t0 = time.perf_counter_ns()
        st = fn(p)
        per.append((time.perf_counter_ns() - t0) / m)
        calls.append(st.search_calls)
        steps.append(st.binary_search_steps / max(1, st.search_calls))
    return per, calls, steps


def bench_rows(idx: Index, raw: bytes, ms, count, seed, commands=("locate", "mems")):
    """One CSV row per (command, m), plus a memory-copy baseline per m."""
    unseeded = Index(idx.sa, idx.oracle, None, idx.k)
    rows = []
    for m in ms:
        pats = [idx.encode(p) for p in fixtures.sample_patterns(raw, m, count, seed)]
        for cmd in commands:
            for label, ix in ((cmd, unseeded), (f"{cmd}-seeded", idx)):
                if cmd == "locate":
                    fn = lambda p, ix=ix: ix.locate_one(p).stats
                else:
                    fn = lambda p, ix=ix: ix.find_mems(p)[1]
                per, calls, steps = _time_queries(fn, pats, m)
                rows.append((label, m, count, statistics.mean(per), statistics.median(per),
                             statistics.mean(calls), statistics.mean(steps)))
        rng = np.random.default_rng(seed)
        buf = np.frombuffer(raw, dtype=np.uint8)
        starts = rng.integers(0, len(raw) - m + 1, count).tolist()
        per = []
        for s in starts:
            t0 = time.perf_counter_ns()
            buf[s : s + m].copy()
            per.append((time.perf_counter_ns() - t0) / m)
        rows.append(("baseline", m, count, statistics.mean(per), statistics.median(per), 0, 0))
    return rows


def cmd_bench(a, out):
    idx = Index.load(a.index)
    t = _load_text(a.corpus, a.fasta, a.filter)
    raw = t.decode()[:-1]
    for m in a.m:
        if m > len(raw):
            raise CliError(f"corpus of length {len(raw)} is shorter than m = {m}")
    print(BENCH_HEADER, file=out)
    for row in bench_rows(idx, raw, a.m, a.patterns, a.seed):
        cmd, m, count, mean, med, calls, steps = row
        print(f"{cmd},{m},{count},{mean:.1f},{med:.1f},{calls:.3f},{steps:.3f}", file=out)


def cmd_fixture(a, out):
    raw = fixtures.repetitive_dna(a.copies, a.seed_len, a.rate, a.seed)
    with open(a.output, "wb") as fh:
        fh.write(raw)
    print(f"bytes\t{len(raw)}", file=out)


# -- parser -----------------------------------------------------------------------


def _common_text(p):
    p.add_argument("--fasta", action="store_true", help="strip FASTA headers")
    p.add_argument("--filter", choices=["dna"], help="keep only A, C, G, T")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="suffixient", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build and save an index")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--algorithm", choices=ALGORITHMS, default="linear-fm")
    p.add_argument("--oracle", choices=["plain", "rlz"], default="plain")
    p.add_argument("--k", type=int, default=None, help="seed length (default min(14, 64/bits))")
    p.add_argument("--no-seeds", action="store_true")
    p.add_argument("--epsilon", type=float, default=access.DEFAULT_EPSILON)
    p.add_argument("--rho0", type=int, default=access.DEFAULT_RHO0)
    _common_text(p)
    p.set_defaults(func=cmd_build)

    for name, fn in (("locate", cmd_locate), ("mems", cmd_mems)):
        p = sub.add_parser(name)
        p.add_argument("index")
        p.add_argument("patterns")
        p.add_argument("--fasta", action="store_true")
        p.add_argument("--stats", action="store_true",
                       help="append search_calls, steps, oracle_chars columns")
        if name == "locate":
            p.add_argument("--prefixes", action="store_true", help="one line per prefix")
            p.add_argument("--online-strict", action="store_true",
                           help="report every prefix as found (no initial k-probe)")
        p.set_defaults(func=fn)

    p = sub.add_parser("stats")
    p.add_argument("input")
    p.add_argument("--permute-alphabet", action="store_true")
    _common_text(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("verify")
    p.add_argument("--exhaustive-n", type=int, default=8, help="max length over {a,b}")
    p.add_argument("--exhaustive-n3", type=int, default=5, help="max length over {a,b,c}")
    p.add_argument("--random", type=int, default=200)
    p.add_argument("--random-max-n", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true", help="drop one entry (self-test)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench")
    p.add_argument("index")
    p.add_argument("corpus")
    p.add_argument("--m", type=int, nargs="+", default=[10, 100, 1000])
    p.add_argument("--patterns", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    _common_text(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("fixture", help="write the synthetic repetitive DNA corpus")
    p.add_argument("output")
    p.add_argument("--copies", type=int, default=100)
    p.add_argument("--seed-len", type=int, default=10_000)
    p.add_argument("--rate", type=float, default=0.001)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fixture)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    a = make_parser().parse_args(argv)
    try:
        rc = a.func(a, out)
    except (CliError, TextError, QueryError, access.OracleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
