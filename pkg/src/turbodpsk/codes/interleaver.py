"""Frame interleaver shared by both sources and the relay."""

from pathlib import Path

import numpy as np

from turbodpsk.codes import asset_dir

INTERLEAVER_SEED = 20120901


class Interleaver:
    """A fixed permutation: ``interleave(x)[i] = x[perm[i]]``."""

    def __init__(self, perm):
        perm = np.asarray(perm, dtype=np.int64)
        if perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValueError("interleaver must be a permutation of 0..N-1")
        self.perm = perm
        self.perm.setflags(write=False)

    def __len__(self):
        return self.perm.size

    @classmethod
    def random(cls, n, seed=INTERLEAVER_SEED):
        return cls(np.random.default_rng(seed).permutation(n))

    @classmethod
    def load(cls, path):
        lines = [ln for ln in Path(path).read_text().split() if ln]
        return cls([int(v) for v in lines])

    @classmethod
    def shipped(cls, n):
        return cls.load(asset_dir() / f"interleaver_{n}.txt")

    def save(self, path):
        Path(path).write_text("\n".join(map(str, self.perm)) + "\n")

    def _check(self, seq):
        seq = np.asarray(seq)
        if seq.shape[0] != self.perm.size:
            raise ValueError(f"sequence length {seq.shape[0]} != interleaver length {self.perm.size}")
        return seq

    def interleave(self, seq):
        return self._check(seq)[self.perm]

    def deinterleave(self, seq):
        seq = self._check(seq)
        out = np.empty_like(seq)
        out[self.perm] = seq
        return out
