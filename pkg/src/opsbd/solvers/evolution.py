"""Population-based solvers: steady-state EA and UMDA over GRASP decisions."""

import math

import numpy as np

from .base import Run, make_rng
from .construct import _replay, _uniform_choice, grasp_positions


def ea_run(instance, delta, budget, seed, pop_size=100, px=0.9, pm=None):
    """Steady-state EA over sets of ``delta`` distinct candidate cells.

    Each iteration builds one offspring: with probability ``px`` from two
    binary-tournament parents (``delta`` cells sampled without replacement
    from the union of their cells), otherwise as a copy of a uniformly
    random member.  Each gene then mutates with probability ``pm`` (default
    ``1/delta``) to a random candidate outside the offspring.  The offspring
    replaces the current worst member unless an identical set is already in
    the population, in which case it is dropped.
    """
    if pop_size < 2:
        raise ValueError("pop_size must be >= 2")
    if pm is None:
        pm = 1.0 / delta
    run = Run(instance, delta, budget, algorithm="ea", seed=seed)
    K = run.space.size
    if math.comb(K, delta) < pop_size:
        raise ValueError(f"pop_size {pop_size} exceeds the {math.comb(K, delta)} distinct solutions")
    rng = make_rng(seed)
    u = _UniformStream(rng)

    pop = []
    vals = []
    members = set()
    while len(pop) < pop_size:
        if pop and run.exhausted():
            break
        ind = tuple(sorted(u.sample(K, delta)))
        if ind in members:
            continue
        run.charge(1)
        members.add(ind)
        pop.append(ind)
        vals.append(run.offer(ind))

    def tournament():
        a = u.index(len(pop))
        b = u.index(len(pop))
        return pop[a] if vals[a] <= vals[b] else pop[b]

    while not run.exhausted():
        if u.next() < px:
            p1 = tournament()
            p2 = tournament()
            union = sorted(set(p1) | set(p2))
            child = [union[k] for k in u.sample(len(union), delta)]
        else:
            child = list(pop[u.index(len(pop))])
        if K > delta:
            for g in range(delta):
                if u.next() < pm:
                    taken = set(child)
                    while True:
                        c = u.index(K)
                        if c not in taken:
                            break
                    child[g] = c
        key = tuple(sorted(child))
        run.charge(1)
        value = run.offer(key)
        if key in members:
            continue
        worst = vals.index(max(vals))
        members.discard(pop[worst])
        members.add(key)
        pop[worst] = key
        vals[worst] = value
    return run.trace()


class _UniformStream:
    """Uniform [0, 1) floats drawn from the generator in blocks.

    Per-call generator overhead dominates the EA's inner loop, so small
    draws are served from a buffer in plain Python.
    """

    def __init__(self, rng, block=8192):
        self.rng = rng
        self.block = block
        self.buf = []
        self.pos = 0

    def next(self):
        if self.pos == len(self.buf):
            self.buf = self.rng.random(self.block).tolist()
            self.pos = 0
        self.pos += 1
        return self.buf[self.pos - 1]

    def index(self, n):
        """Uniform integer in ``[0, n)``."""
        return min(int(self.next() * n), n - 1)

    def sample(self, n, k):
        """``k`` distinct uniform integers from ``[0, n)`` (partial Fisher-Yates)."""
        if k > n:
            raise ValueError("sample larger than population")
        if n > 4 * k:
            out = []
            seen = set()
            while len(out) < k:
                c = self.index(n)
                if c not in seen:
                    seen.add(c)
                    out.append(c)
            return out
        a = list(range(n))
        for i in range(k):
            j = i + self.index(n - i)
            a[i], a[j] = a[j], a[i]
        return a[:k]


class UnivariateModel:
    """Independent per-position distributions over RCL ranks."""

    def __init__(self, tables):
        self.tables = [np.asarray(t, dtype=np.float64) for t in tables]

    @classmethod
    def fit(cls, vectors, smoothing=0.01):
        """Rank frequencies of the selected vectors, mixed with the uniform
        distribution over each position's observed domain ``0..max``."""
        X = np.asarray(vectors, dtype=np.int64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("need a nonempty 2-D array of decision vectors")
        tables = []
        for i in range(X.shape[1]):
            counts = np.bincount(X[:, i], minlength=int(X[:, i].max()) + 1)
            freq = counts / X.shape[0]
            tables.append((1.0 - smoothing) * freq + smoothing / freq.size)
        return cls(tables)

    @property
    def length(self):
        return len(self.tables)

    def sample(self, rng, size):
        out = np.zeros((size, self.length), dtype=np.int64)
        for i, t in enumerate(self.tables):
            out[:, i] = rng.choice(t.size, size=size, p=t)
        return out


def umda_run(instance, delta, budget, seed, pop_size=100, select_size=50, alpha=0.1,
             smoothing=0.01):
    """UMDA whose individuals are GRASP rank vectors of length ``delta - 1``.

    The first model is fitted to ``pop_size`` GRASP constructions at the
    given ``alpha``.  Each generation samples ``pop_size`` vectors, decodes
    and evaluates them, keeps the best ``select_size`` and refits.
    """
    if not 0 < select_size < pop_size:
        raise ValueError("need 0 < select_size < pop_size")
    run = Run(instance, delta, budget, algorithm="umda", seed=seed)
    rng = make_rng(seed)
    space = run.space
    choose = _uniform_choice(rng)
    seeds = []
    for _ in range(pop_size):
        pos, ranks = grasp_positions(instance, space, alpha, choose, run, interruptible=bool(seeds))
        if pos is None:
            break
        run.offer(pos)
        seeds.append(ranks)
    model = UnivariateModel.fit(seeds, smoothing) if delta > 1 else UnivariateModel([])
    while not run.exhausted():
        X = model.sample(rng, pop_size)
        scores = []
        for x in X:
            pos, _ = grasp_positions(instance, space, alpha, _replay(x, delta), run, interruptible=True)
            if pos is None:
                break
            scores.append(run.offer(pos))
        if len(scores) < pop_size:
            break
        if delta > 1:
            best = np.argsort(scores, kind="stable")[:select_size]
            model = UnivariateModel.fit(X[best], smoothing)
    return run.trace()
