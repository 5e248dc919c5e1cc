"""Code-agnostic GRAND decoding and iterative product-code decoding.

Hard GRAND tests error patterns by increasing Hamming weight, lexicographic
within a weight class. Because the first hit depends only on the syndrome,
the search is tabulated once per code: each syndrome maps to its first
pattern and the query index at which GRAND would reach it. A lookup is
therefore exactly equivalent to running the guesses one by one.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ParameterDomainError, ShapeError
from .fec import CodeSpec, CrcSpec, as_bits, crc_check, extract_info

DEFAULT_MAX_QUERIES = 10**6


@dataclass
class DecodeOutcome:
    codeword: np.ndarray
    info_bits: np.ndarray
    candidates: list[tuple[np.ndarray, float]]
    crc_pass: bool | None = None
    abandoned: bool = False
    queries_used: int = 0
    # flip cost (sum of |LLR|) of each candidate, soft decoding only
    costs: list[float] = field(default_factory=list)


def _crc_status(info: np.ndarray, crc: CrcSpec | None) -> bool | None:
    if crc is None:
        return None
    return crc_check(info, crc)


# ------------------------------------------------------------------ hard GRAND


@dataclass(frozen=True)
class _HardTable:
    first_query: np.ndarray  # per syndrome, 0-based query index of first hit, -1 if beyond budget
    patterns: np.ndarray  # per syndrome, error pattern (n bits)
    budget: int
    complete: bool  # every syndrome resolved


def _pack(bits: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(bits.shape[-1], dtype=np.int64)
    return (bits.astype(np.int64) * weights).sum(axis=-1)


@lru_cache(maxsize=32)
def _hard_table(code: CodeSpec, budget: int) -> _HardTable:
    r = code.n - code.k
    if r > 24:
        raise ParameterDomainError(f"hard GRAND tables need n-k <= 24, got {r}")
    cols = code.column_syndromes
    size = 1 << r
    first = np.full(size, -1, dtype=np.int64)
    patt = np.zeros((size, code.n), dtype=np.uint8)
    first[0] = 0
    found = 1
    query = 1
    weight = 1
    while found < size and query < budget and weight <= code.n:
        chunk = itertools.islice(itertools.combinations(range(code.n), weight), budget - query)
        idx = np.fromiter(itertools.chain.from_iterable(chunk), dtype=np.int64)
        if idx.size == 0:
            break
        idx = idx.reshape(-1, weight)
        syn = np.bitwise_xor.reduce(cols[idx], axis=1)
        uniq, pos = np.unique(syn, return_index=True)
        new = first[uniq] < 0
        uniq, pos = uniq[new], pos[new]
        first[uniq] = query + pos
        rows = idx[pos]
        patt[np.repeat(uniq, weight), rows.ravel()] = 1
        found += uniq.size
        query += idx.shape[0]
        weight += 1
    return _HardTable(first, patt, budget, found == size)


def hard_table(code: CodeSpec, max_queries: int) -> _HardTable:
    return _hard_table(code, int(max_queries))


def grand_hard(
    y_hard,
    code: CodeSpec,
    max_queries: int = DEFAULT_MAX_QUERIES,
    crc: CrcSpec | None = None,
) -> DecodeOutcome:
    """Hard-decision GRAND with abandonment after ``max_queries`` guesses."""
    y = as_bits(y_hard)
    if y.size != code.n:
        raise ShapeError(f"expected {code.n} bits, got {y.size}")
    if max_queries < 1:
        raise ParameterDomainError("max_queries must be >= 1")
    table = hard_table(code, max_queries)
    s = int(_pack(code.syndrome(y)))
    q = int(table.first_query[s])
    if 0 <= q < max_queries:
        cw = y ^ table.patterns[s]
        abandoned, used = False, q + 1
    else:
        cw, abandoned, used = y.copy(), True, int(max_queries)
    info = extract_info(cw, code)
    return DecodeOutcome(
        codeword=cw,
        info_bits=info,
        candidates=[(cw, 1.0)],
        crc_pass=_crc_status(info, crc),
        abandoned=abandoned,
        queries_used=used,
    )


def grand_hard_reference(y_hard, code: CodeSpec, max_queries: int = DEFAULT_MAX_QUERIES) -> tuple[np.ndarray | None, int]:
    """Guess-by-guess GRAND loop; slow, kept as an oracle for the table."""
    y = as_bits(y_hard)
    h = code.parity_check.astype(np.int64)
    queries = 0
    for w in range(code.n + 1):
        for flips in itertools.combinations(range(code.n), w):
            queries += 1
            cand = y.copy()
            cand[list(flips)] ^= 1
            if not ((h @ cand) % 2).any():
                return cand, queries
            if queries >= max_queries:
                return None, queries
    return None, queries


# ------------------------------------------------------------------ soft GRAND


def grand_soft_list(
    llrs,
    code: CodeSpec,
    list_size: int = 1,
    max_queries: int = DEFAULT_MAX_QUERIES,
    crc: CrcSpec | None = None,
) -> DecodeOutcome:
    """Soft GRAND returning up to ``list_size`` codewords.

    Error patterns are visited in non-decreasing total reliability
    ``sum |llr_j|`` over flipped positions using an exact best-first
    expansion of subsets of the reliability-sorted positions.
    """
    llrs = np.asarray(llrs, dtype=float).ravel()
    if llrs.size != code.n:
        raise ShapeError(f"expected {code.n} LLRs, got {llrs.size}")
    if list_size < 1:
        raise ParameterDomainError("list_size must be >= 1")
    hard = (llrs < 0).astype(np.uint8)
    rel = np.abs(llrs)
    order = np.argsort(rel, kind="stable")
    r_sorted = [float(v) for v in rel[order]]
    if code.n - code.k <= 62:
        cols = [int(c) for c in code.column_syndromes[order]]
        s0 = int(_pack(code.syndrome(hard)))
    else:
        h = code.parity_check
        cols = [int.from_bytes(np.packbits(h[:, j]).tobytes(), "big") for j in order]
        s0 = int.from_bytes(np.packbits(code.syndrome(hard)).tobytes(), "big")

    found: list[tuple[float, tuple[int, ...]]] = []
    queries = 1
    if s0 == 0:
        found.append((0.0, ()))
    n = code.n
    # heap entries: (cost, tiebreak, last sorted index, cost without last, syndrome, flips);
    # costs are prefix sums so a child never sorts ahead of its parent.
    heap: list = []
    tick = itertools.count()
    if n:
        heapq.heappush(heap, (float(r_sorted[0]), next(tick), 0, 0.0, cols[0], (0,)))
    while heap and len(found) < list_size and queries < max_queries:
        cost, _, last, base, syn, flips = heapq.heappop(heap)
        queries += 1
        if syn == s0:
            found.append((cost, flips))
        if last + 1 < n:
            nxt = last + 1
            heapq.heappush(heap, (cost + r_sorted[nxt], next(tick), nxt, cost, syn ^ cols[nxt], flips + (nxt,)))
            heapq.heappush(
                heap,
                (base + r_sorted[nxt], next(tick), nxt, base, syn ^ cols[last] ^ cols[nxt], flips[:-1] + (nxt,)),
            )
    if not found:
        info = extract_info(hard, code)
        return DecodeOutcome(
            codeword=hard,
            info_bits=info,
            candidates=[(hard, 1.0)],
            crc_pass=_crc_status(info, crc),
            abandoned=True,
            queries_used=int(max_queries),
            costs=[float("nan")],
        )
    costs = np.array([c for c, _ in found])
    weights = np.exp(-(costs - costs.min()))
    probs = weights / weights.sum()
    cands = []
    for (_, flips), p in zip(found, probs):
        cw = hard.copy()
        if flips:
            cw[order[list(flips)]] ^= 1
        cands.append((cw, float(p)))
    best = cands[0][0]
    info = extract_info(best, code)
    return DecodeOutcome(
        codeword=best,
        info_bits=info,
        candidates=cands,
        crc_pass=_crc_status(info, crc),
        abandoned=False,
        queries_used=queries,
        costs=[float(c) for c in costs],
    )


# -------------------------------------------------------------- product codes


def decode_product(
    received,
    code: CodeSpec,
    component_decoder: str = "grand_hard",
    iterations: int = 4,
    max_queries: int = DEFAULT_MAX_QUERIES,
    crc: CrcSpec | None = None,
) -> DecodeOutcome:
    """Alternate hard GRAND over all rows, then all columns.

    ``received`` is either hard bits (integer dtype) or LLRs (float dtype,
    positive favouring 0). Stops after ``iterations`` row+column passes or
    as soon as a full pass changes nothing.
    """
    if code.structure != "product":
        raise ParameterDomainError("decode_product needs a product code")
    if component_decoder != "grand_hard":
        raise ParameterDomainError(f"unsupported component decoder {component_decoder!r}")
    arr = np.asarray(received)
    hard = (arr < 0).astype(np.uint8) if np.issubdtype(arr.dtype, np.floating) else as_bits(arr)
    comp = code.component
    if hard.size != code.n:
        raise ShapeError(f"expected {code.n} values, got {hard.size}")
    table = hard_table(comp, max_queries)
    weights = 1 << np.arange(comp.n - comp.k, dtype=np.int64)
    h = comp.parity_check.astype(np.int64)
    grid = hard.reshape(comp.n, comp.n).copy()
    queries = 0

    def sweep(lines: np.ndarray) -> tuple[bool, int]:
        syn = ((lines.astype(np.int64) @ h.T) % 2) @ weights
        q = table.first_query[syn]
        ok = (q >= 0) & (q < max_queries)
        fix = ok & (syn != 0)
        lines[fix] ^= table.patterns[syn[fix]]
        used = int(np.where(ok, q + 1, max_queries).sum())
        return bool(fix.any()), used

    for _ in range(iterations):
        changed_rows, used_r = sweep(grid)
        cols = grid.T.copy()
        changed_cols, used_c = sweep(cols)
        grid = cols.T.copy()
        queries += used_r + used_c
        if not (changed_rows or changed_cols):
            break
    cw = grid.ravel()
    info = extract_info(cw, code)
    return DecodeOutcome(
        codeword=cw,
        info_bits=info,
        candidates=[(cw, 1.0)],
        crc_pass=_crc_status(info, crc),
        abandoned=not code.is_codeword(cw),
        queries_used=queries,
    )


def decode(
    llrs,
    code: CodeSpec,
    kind: str = "hard",
    list_size: int = 1,
    max_queries: int = DEFAULT_MAX_QUERIES,
    iterations: int = 4,
    crc: CrcSpec | None = None,
) -> DecodeOutcome:
    """Dispatch on code structure and decoder kind."""
    if code.structure == "product":
        return decode_product(np.asarray(llrs, dtype=float), code, iterations=iterations, max_queries=max_queries, crc=crc)
    if kind == "hard":
        return grand_hard((np.asarray(llrs) < 0).astype(np.uint8), code, max_queries, crc=crc)
    if kind == "soft":
        return grand_soft_list(llrs, code, list_size, max_queries, crc=crc)
    raise ParameterDomainError(f"unknown decoder kind {kind!r}")
