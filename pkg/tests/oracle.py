"""Brute-force reference procedures over all small interpretations.

Every interpretation with at most three elements over a fixed signature
(one role, a few names) is enumerated once.  Elements are grouped into
ALC-bisimulation classes across the whole corpus, which gives a finite
class graph G.  The three reference answers are then:

* ALCI to ALC: some non-model has all its element classes realised in
  models (a disjoint union of those models is a globally bisimilar model);
* equi-simulation: the same with equi-similarity classes, computed as
  mutual simulation on G;
* products: the product G_M x G_M of the model part of G violates T
  somewhere (products respect bisimilarity).
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import sparse

from dlkit.syntax import And, Bot, Exists, Name, Not, TBox, Top, to_core


class Universe:
    def __init__(self, names, role="r", max_n=3):
        self.names = tuple(sorted(names))
        self.role = role
        self.max_n = max_n
        c = len(self.names)
        self.L, self.E = {}, {}
        for n in range(1, max_n + 1):
            nl, ne = n * c, n * n
            codes = np.arange(1 << (nl + ne), dtype=np.int64)
            L = np.zeros((len(codes), n, c), dtype=bool)
            for i in range(n):
                for j in range(c):
                    L[:, i, j] = (codes >> (i * c + j)) & 1
            E = np.zeros((len(codes), n, n), dtype=bool)
            for a in range(n):
                for b in range(n):
                    E[:, a, b] = (codes >> (nl + a * n + b)) & 1
            self.L[n], self.E[n] = L, E
        self._classes()

    def _classes(self):
        # joint partition refinement over every element of every structure
        key = {}
        for n in self.L:
            w = 1 << np.arange(len(self.names), dtype=np.int64)
            key[n] = (self.L[n] * w).sum(axis=2) if self.names else np.zeros(self.L[n].shape[:2], dtype=np.int64)
        count = -1
        while True:
            table = {}
            new = {}
            for n in self.L:
                K = self.E[n].shape[0]
                out = np.empty((K, n), dtype=np.int64)
                kk = key[n].tolist()
                EE = self.E[n]
                for k in range(K):
                    row = kk[k]
                    for i in range(n):
                        kids = frozenset(row[j] for j in range(n) if EE[k, i, j])
                        sig = (row[i], kids)
                        out[k, i] = table.setdefault(sig, len(table))
                new[n] = out
            if len(table) == count:
                break
            count = len(table)
            key = new
        self.cls = key
        self.n_cls = count
        # class graph
        lab = np.zeros((count, len(self.names)), dtype=bool)
        adj = np.zeros((count, count), dtype=bool)
        for n in self.L:
            cls = self.cls[n]
            flat = cls.reshape(-1)
            lab[flat] = self.L[n].reshape(-1, len(self.names))
            for i in range(n):
                for j in range(n):
                    m = self.E[n][:, i, j]
                    adj[cls[m, i], cls[m, j]] = True
        self.G_lab, self.G_adj = lab, adj
        self._sim = None

    # -- evaluation on all structures of size n
    def ext(self, n, c, inverse_ok=True):
        L, E = self.L[n], self.E[n]
        return _ext(c, L, E, self.names)

    def models(self, T: TBox):
        C = to_core(T.as_concept())
        return {n: self.ext(n, C).all(axis=1) for n in self.L}

    def simulation(self):
        if self._sim is None:
            lab = self.G_lab.astype(np.float32)
            A = sparse.csr_matrix(self.G_adj.astype(np.float32))
            # label containment
            sim = (lab @ (1 - lab).T) == 0
            deg = np.asarray(A.sum(axis=1)).reshape(-1)
            while True:
                B = np.asarray((A @ sim.T.astype(np.float32))).T > 0
                ok = np.asarray(A @ B.astype(np.float32)) == deg[:, None]
                new = sim & ok
                if (new == sim).all():
                    break
                sim = new
            self._sim = sim
        return self._sim

    def model_classes(self, models):
        m = np.zeros(self.n_cls, dtype=bool)
        for n, ok in models.items():
            m[self.cls[n][ok].reshape(-1)] = True
        return m

    def covered_nonmodel(self, models, covered):
        for n, ok in models.items():
            inside = covered[self.cls[n]].all(axis=1)
            if (inside & ~ok).any():
                return True
        return False


def _ext(c, L, E, names):
    K, n = L.shape[:2]
    if isinstance(c, Top):
        return np.ones((K, n), dtype=bool)
    if isinstance(c, Bot):
        return np.zeros((K, n), dtype=bool)
    if isinstance(c, Name):
        if c.name not in names:
            return np.zeros((K, n), dtype=bool)
        return L[:, :, names.index(c.name)]
    if isinstance(c, Not):
        return ~_ext(c.arg, L, E, names)
    if isinstance(c, And):
        out = np.ones((K, n), dtype=bool)
        for a in c.args:
            out &= _ext(a, L, E, names)
        return out
    if isinstance(c, Exists):
        X = _ext(c.arg, L, E, names)
        M = np.transpose(E, (0, 2, 1)) if c.role.inverse else E
        return np.einsum("kij,kj->ki", M.astype(np.int32), X.astype(np.int32)) > 0
    raise TypeError(c)


def _ext_graph(c, lab, A, names):
    """Extension over the product G x G as an (N, N) matrix."""
    N = lab.shape[0]
    if isinstance(c, Top):
        return np.ones((N, N), dtype=bool)
    if isinstance(c, Bot):
        return np.zeros((N, N), dtype=bool)
    if isinstance(c, Name):
        if c.name not in names:
            return np.zeros((N, N), dtype=bool)
        v = lab[:, names.index(c.name)]
        return v[:, None] & v[None, :]
    if isinstance(c, Not):
        return ~_ext_graph(c.arg, lab, A, names)
    if isinstance(c, And):
        out = np.ones((N, N), dtype=bool)
        for a in c.args:
            out &= _ext_graph(a, lab, A, names)
        return out
    if isinstance(c, Exists):
        X = _ext_graph(c.arg, lab, A, names).astype(np.float32)
        Y = np.asarray(A @ X)
        return np.asarray(A @ Y.T).T > 0
    raise TypeError(c)


@lru_cache(maxsize=8)
def universe(names: tuple) -> Universe:
    return Universe(names)


def oracle_alci(T: TBox, U: Universe) -> bool:
    """True when a rewriting exists (no split pair found)."""
    models = U.models(T)
    return not U.covered_nonmodel(models, U.model_classes(models))


def oracle_equisim(T: TBox, U: Universe) -> bool:
    models = U.models(T)
    mc = U.model_classes(models)
    sim = U.simulation()
    eq = sim & sim.T
    covered = eq[:, mc].any(axis=1)
    return not U.covered_nonmodel(models, covered)


def oracle_product(T: TBox, U: Universe) -> bool:
    models = U.models(T)
    mc = U.model_classes(models)
    if not mc.any():
        return True
    idx = np.nonzero(mc)[0]
    lab = U.G_lab[idx]
    A = sparse.csr_matrix(U.G_adj[np.ix_(idx, idx)].astype(np.float32))
    C = to_core(T.as_concept())
    return bool(_ext_graph(C, lab, A, U.names).all())
