"""Regular LDPC codes: alist I/O, PEG construction, encoding and SPA decoding.

LLRs at the public interface are ``log P(1) / P(0)``; the decoder works on
the negated values internally so the usual tanh rule applies unchanged.
"""

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np

from turbodpsk.codes import asset_dir

DEFAULT_ALIST = "ldpc_504x1008.alist"


def read_alist(path):
    """Parse an alist file into a dense uint8 parity-check matrix."""
    tokens = Path(path).read_text().split()
    try:
        nums = [int(t) for t in tokens]
        n, m = nums[0], nums[1]
        pos = 4
        col_w = nums[pos:pos + n]
        pos += n
        row_w = nums[pos:pos + m]
        pos += m
        H = np.zeros((m, n), dtype=np.uint8)
        for j in range(n):
            entries = nums[pos:pos + nums[2]]
            pos += nums[2]
            for i in entries:
                if i:
                    H[i - 1, j] = 1
        # row section must agree with the column section
        for i in range(m):
            entries = [e for e in nums[pos:pos + nums[3]] if e]
            pos += nums[3]
            if sorted(entries) != sorted((np.flatnonzero(H[i]) + 1).tolist()):
                raise ValueError(f"row {i + 1} disagrees with column lists")
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed alist file {path}: {exc}") from exc
    if list(H.sum(axis=0)) != col_w or list(H.sum(axis=1)) != row_w:
        raise ValueError(f"malformed alist file {path}: weight headers do not match entries")
    return H


def write_alist(H, path):
    H = np.asarray(H, dtype=np.uint8)
    m, n = H.shape
    col_w = H.sum(axis=0)
    row_w = H.sum(axis=1)
    dv, dc = int(col_w.max()), int(row_w.max())
    lines = [f"{n} {m}", f"{dv} {dc}", " ".join(map(str, col_w)), " ".join(map(str, row_w))]
    for j in range(n):
        idx = list(np.flatnonzero(H[:, j]) + 1)
        lines.append(" ".join(map(str, idx + [0] * (dv - len(idx)))))
    for i in range(m):
        idx = list(np.flatnonzero(H[i]) + 1)
        lines.append(" ".join(map(str, idx + [0] * (dc - len(idx)))))
    Path(path).write_text("\n".join(lines) + "\n")


def peg_regular(n, m, dv, dc, seed=0, max_tries=50):
    """Progressive edge growth for a (dv, dc)-regular Tanner graph.

    Each new edge of a variable node goes to a check node at maximum graph
    distance from it (unreachable if possible), lowest current degree first,
    random tie-break. Retries with a new stream if the degree cap forces a
    4-cycle.
    """
    if n * dv != m * dc:
        raise ValueError("n * dv must equal m * dc for a regular code")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        H = _peg_attempt(n, m, dv, dc, rng)
        if H is not None:
            return H
    raise RuntimeError("PEG construction failed to avoid 4-cycles")


def _peg_attempt(n, m, dv, dc, rng):
    var_adj = [[] for _ in range(n)]
    chk_adj = [[] for _ in range(m)]
    deg = np.zeros(m, dtype=int)
    for j in range(n):
        for e in range(dv):
            open_checks = deg < dc
            if e == 0:
                cand = np.flatnonzero(open_checks)
            else:
                depth = _check_depths(j, var_adj, chk_adj, m)
                unreachable = open_checks & (depth < 0)
                if unreachable.any():
                    cand = np.flatnonzero(unreachable)
                else:
                    reach = open_checks & (depth > 0)
                    if not reach.any():
                        return None
                    far = depth[reach].max()
                    if far <= 1 and e > 0:
                        return None
                    cand = np.flatnonzero(reach & (depth == far))
            cand = cand[deg[cand] == deg[cand].min()]
            c = int(rng.choice(cand))
            var_adj[j].append(c)
            chk_adj[c].append(j)
            deg[c] += 1
    H = np.zeros((m, n), dtype=np.uint8)
    for j, cs in enumerate(var_adj):
        H[cs, j] = 1
    return H


def _check_depths(v0, var_adj, chk_adj, m):
    """BFS depth (in check-node layers) of every check from variable ``v0``; -1 if unreached."""
    depth = np.full(m, -1)
    seen_v = {v0}
    frontier = deque()
    for c in var_adj[v0]:
        if depth[c] < 0:
            depth[c] = 0
            frontier.append(c)
    while frontier:
        c = frontier.popleft()
        for v in chk_adj[c]:
            if v in seen_v:
                continue
            seen_v.add(v)
            for c2 in var_adj[v]:
                if depth[c2] < 0:
                    depth[c2] = depth[c] + 1
                    frontier.append(c2)
    return depth


def gf2_rref(H):
    """Reduced row echelon form over GF(2). Returns (R, pivot_columns)."""
    R = np.array(H, dtype=bool)
    m, n = R.shape
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        hits = np.flatnonzero(R[row:, col])
        if hits.size == 0:
            continue
        p = row + hits[0]
        if p != row:
            R[[row, p]] = R[[p, row]]
        others = np.flatnonzero(R[:, col])
        others = others[others != row]
        R[others] ^= R[row]
        pivots.append(col)
        row += 1
    return R[:row].astype(np.uint8), np.array(pivots, dtype=np.int64)


def girth_at_least_6(H):
    """True when no two columns share more than one check (no 4-cycles)."""
    A = np.asarray(H, dtype=np.int64)
    overlap = A.T @ A
    np.fill_diagonal(overlap, 0)
    return bool(overlap.max() <= 1)


@dataclass(frozen=True, eq=False)
class LdpcCode:
    """Binary LDPC code with a systematic encoder derived from ``H``."""

    H: np.ndarray
    parity_cols: np.ndarray = field(repr=False)
    info_cols: np.ndarray = field(repr=False)
    parity_map: np.ndarray = field(repr=False)  # parity bits = parity_map @ info (mod 2)

    @classmethod
    def from_matrix(cls, H, column_weight=None, row_weight=None):
        H = np.asarray(H, dtype=np.uint8)
        if column_weight is not None and not np.all(H.sum(axis=0) == column_weight):
            raise ValueError(f"not every column has weight {column_weight}")
        if row_weight is not None and not np.all(H.sum(axis=1) == row_weight):
            raise ValueError(f"not every row has weight {row_weight}")
        R, pivots = gf2_rref(H)
        info_cols = np.setdiff1d(np.arange(H.shape[1]), pivots)
        parity_map = R[:, info_cols].astype(np.uint8)
        H.setflags(write=False)
        return cls(H, pivots, info_cols, parity_map)

    @property
    def n(self):
        return self.H.shape[1]

    @property
    def k(self):
        return len(self.info_cols)

    @property
    def rank(self):
        return len(self.parity_cols)

    @property
    def rate(self):
        return self.k / self.n

    def is_codeword(self, c):
        c = np.asarray(c, dtype=np.int64)
        return not np.any((self.H.astype(np.int64) @ c) % 2)

    def _graph(self):
        # cached edge lists for the decoder
        g = self.__dict__.get("_graph_cache")
        if g is None:
            chk, var = np.nonzero(self.H)
            order = np.argsort(chk, kind="stable")
            chk, var = chk[order], var[order]
            chk_ptr = np.searchsorted(chk, np.arange(self.H.shape[0] + 1))
            g = (var.astype(np.int64), chk.astype(np.int64), chk_ptr.astype(np.int64))
            object.__setattr__(self, "_graph_cache", g)
        return g


def ldpc_build(path=None, column_weight=3, row_weight=6):
    """Load the shipped (3,6)-regular parity-check matrix and derive the encoder."""
    path = Path(path) if path is not None else asset_dir() / DEFAULT_ALIST
    H = read_alist(path)
    return LdpcCode.from_matrix(H, column_weight, row_weight)


def ldpc_encode(info, code):
    info = np.asarray(info, dtype=np.uint8)
    if info.shape != (code.k,):
        raise ValueError(f"expected {code.k} info bits, got {info.shape}")
    c = np.zeros(code.n, dtype=np.int8)
    c[code.info_cols] = info
    c[code.parity_cols] = (code.parity_map.astype(np.int64) @ info) % 2
    return c


@numba.njit(cache=True)
def _spa(lam_ch, var, chk_ptr, n_checks, max_iter):
    n_edges = var.shape[0]
    q = np.empty(n_edges)
    r = np.zeros(n_edges)
    post = lam_ch.copy()
    for e in range(n_edges):
        q[e] = lam_ch[var[e]]
    hard = np.zeros(lam_ch.shape[0], dtype=np.int8)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        for c in range(n_checks):
            a, b = chk_ptr[c], chk_ptr[c + 1]
            for e in range(a, b):
                prod = 1.0
                for e2 in range(a, b):
                    if e2 != e:
                        prod *= np.tanh(0.5 * q[e2])
                if prod > 1.0 - 1e-15:
                    prod = 1.0 - 1e-15
                elif prod < -1.0 + 1e-15:
                    prod = -1.0 + 1e-15
                r[e] = 2.0 * np.arctanh(prod)
        post[:] = lam_ch
        for e in range(n_edges):
            post[var[e]] += r[e]
        for e in range(n_edges):
            q[e] = post[var[e]] - r[e]
        undecided = False
        for j in range(post.shape[0]):
            hard[j] = 1 if post[j] < 0.0 else 0
            if post[j] == 0.0:
                undecided = True
        ok = not undecided
        if ok:
            for c in range(n_checks):
                s = 0
                for e in range(chk_ptr[c], chk_ptr[c + 1]):
                    s += hard[var[e]]
                if s % 2:
                    ok = False
                    break
        if ok:
            converged = True
            break
    return post, hard, converged, it


@dataclass
class SpaResult:
    posterior: np.ndarray
    extrinsic: np.ndarray
    hard: np.ndarray
    converged: bool
    iterations: int


def ldpc_spa_decode(channel_llr, code, max_iter=20):
    """Sum-product decoding with early exit once the hard decision is a codeword.

    A bit whose posterior is exactly zero counts as undecided, so an
    all-erasure input never reports convergence.
    """
    llr = np.asarray(channel_llr, dtype=np.float64)
    if llr.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got {llr.shape}")
    var, _, chk_ptr = code._graph()
    lam_post, hard, converged, iters = _spa(-llr, var, chk_ptr, code.H.shape[0], max_iter)
    posterior = -lam_post
    return SpaResult(posterior, posterior - llr, hard, bool(converged), int(iters))
