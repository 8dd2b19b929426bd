"""Input normalization and the reversed-text convention.

A :class:`Text` stores the input as dense symbol codes, one byte per symbol,
terminated by the sentinel (code 0). Codes are assigned by ascending raw byte
value, so the alphabet order of the raw input is preserved.

Positions are 0-based throughout the package: ``t.data[n - 1]`` is the
sentinel. Human-facing output (CLI) converts to 1-based positions.
"""

from __future__ import annotations

from dataclasses import dataclass

SENTINEL = 0
SENTINEL_BYTE = ord("$")
DNA = frozenset(b"ACGT")
NO_CODE = 0  # alpha_map entry for bytes absent from the text


class TextError(ValueError):
    pass


@dataclass(frozen=True)
class Text:
    data: bytes          # dense codes, data[-1] == SENTINEL
    alpha_map: bytes     # 256 entries: raw byte -> code (NO_CODE when absent)
    alpha_inv: bytes     # code -> raw byte; code 0 decodes to '$'

    @property
    def n(self) -> int:
        return len(self.data)

    @property
    def sigma_prime(self) -> int:
        return len(self.alpha_inv)

    def decode(self, codes: bytes | None = None) -> bytes:
        codes = self.data if codes is None else codes
        return bytes(self.alpha_inv[c] for c in codes)

    def encode(self, raw: bytes) -> bytes:
        """Map raw bytes to codes. Bytes absent from the text raise ``TextError``."""
        out = raw.translate(self.alpha_map)
        if NO_CODE in out:
            bad = raw[out.index(NO_CODE)]
            raise TextError(f"symbol {bytes([bad])!r} does not occur in the text")
        return out

    def encode_query(self, raw: bytes) -> bytes:
        """Map query bytes to codes; bytes absent from the text map to ``sigma_prime``.

        The out-of-alphabet code never matches a text symbol, which is what
        pattern matching needs. A sentinel in the query raises ``TextError``.
        """
        return query_codes(self.alpha_map, self.sigma_prime, raw)


def query_codes(alpha_map: bytes, sigma_prime: int, raw: bytes) -> bytes:
    """Query encoding shared by :class:`Text` and loaded indexes."""
    if SENTINEL_BYTE in raw:
        raise TextError("query contains the sentinel '$'")
    fresh = min(sigma_prime, 255)
    table = bytes(fresh if c == NO_CODE else c for c in alpha_map)
    return raw.translate(table)


def normalize(raw: bytes, filter: frozenset[int] | None = None) -> Text:
    """Build a :class:`Text` from raw bytes, appending the sentinel.

    >>> normalize(b"BANANA").decode()
    b'BANANA$'
    """
    if filter is not None:
        raw = bytes(b for b in raw if b in filter)
    if not raw:
        raise TextError("input is empty (after filtering)")
    if SENTINEL_BYTE in raw:
        raise TextError("input contains the sentinel byte '$'")

    present = sorted(set(raw))
    alpha_map = bytearray(256)
    for code, b in enumerate(present, start=1):
        alpha_map[b] = code
    alpha_map = bytes(alpha_map)
    alpha_inv = bytes([SENTINEL_BYTE, *present])
    return Text(raw.translate(alpha_map) + bytes([SENTINEL]), alpha_map, alpha_inv)


def from_codes(codes: bytes, alphabet: bytes | None = None) -> Text:
    """Wrap an already-encoded sentinel-terminated code string.

    ``alphabet[c - 1]`` is the raw byte for code ``c``; it defaults to
    ``b"abc..."`` which is convenient for generated test corpora. Codes need
    not be dense; ``sigma_prime`` is then the size of the code universe.
    """
    if not codes or codes[-1] != SENTINEL or codes.count(SENTINEL) != 1:
        raise TextError("codes must end with the unique sentinel 0")
    sigma = max(codes) + 1
    if alphabet is None:
        alphabet = bytes(range(ord("a"), ord("a") + sigma - 1))
    alpha_inv = bytes([SENTINEL_BYTE]) + alphabet[: sigma - 1]
    alpha_map = bytearray(256)
    for code in range(1, sigma):
        alpha_map[alpha_inv[code]] = code
    return Text(bytes(codes), bytes(alpha_map), alpha_inv)


def reverse_text(t: Text) -> Text:
    """``T[n-2] ... T[0]`` followed by the sentinel; same alphabet map."""
    return Text(t.data[-2::-1] + bytes([SENTINEL]), t.alpha_map, t.alpha_inv)


def permute_alphabet(t: Text, order: tuple[int, ...]) -> Text:
    """Recode non-sentinel symbols: code ``c`` becomes ``order[c - 1]``.

    ``order`` is a permutation of ``1..sigma_prime-1``. The sentinel stays 0.
    """
    table = bytearray(range(256))
    for c, new in enumerate(order, start=1):
        table[c] = new
    data = t.data.translate(bytes(table))
    alpha_inv = bytearray(t.alpha_inv)
    for c, new in enumerate(order, start=1):
        alpha_inv[new] = t.alpha_inv[c]
    alpha_map = bytearray(256)
    for code in range(1, len(alpha_inv)):
        alpha_map[alpha_inv[code]] = code
    return Text(data, bytes(alpha_map), bytes(alpha_inv))


def read_input(path, fasta: bool = False) -> bytes:
    """Read a raw byte file, or a FASTA file with headers stripped."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if not fasta:
        return raw
    return b"".join(
        line.strip() for line in raw.splitlines() if line and not line.startswith(b">")
    )
