"""Seeded random control-law generators shared by controller and acceptance tests."""

import numpy as np

from oscstab.controller import ControlLaw, sample_from_coefficients
from oscstab.liealg import IndexSets
from oscstab.resonance import search_kappa


def random_index_sets(rng, m):
    """Small random index sets over inputs 1..m with at least one entry."""
    while True:
        n1 = int(rng.integers(0, min(m, 3) + 1))
        n2 = int(rng.integers(0, 3))
        n3 = int(rng.integers(0, 2))
        if n1 + n2 + n3 == 0:
            continue
        s1 = sorted(rng.choice(np.arange(1, m + 1), size=n1, replace=False).tolist()) if n1 else []
        pairs = [(a, b) for a in range(1, m + 1) for b in range(1, m + 1)]
        triples = [(a, b, c) for a in range(1, m + 1) for b in range(1, m + 1) for c in range(1, m + 1)]
        s2_idx = rng.choice(len(pairs), size=n2, replace=False) if n2 else []
        s3_idx = rng.choice(len(triples), size=n3, replace=False) if n3 else []
        s2 = [pairs[i] for i in s2_idx]
        s3 = [triples[i] for i in s3_idx]
        return IndexSets(s1=s1, s2=s2, s3=s3)


def random_law(rng, m=None):
    m = m or int(rng.integers(2, 5))
    sets = random_index_sets(rng, m)
    kappa = search_kappa(sets, bound=60)
    eps = float(rng.uniform(0.05, 0.5))
    gamma = float(rng.uniform(1.0, 20.0))
    return ControlLaw.create(
        epsilon=eps,
        gamma=gamma,
        x_star=[0.0] * sets.total,
        sets=sets,
        kappa=kappa,
        m=m,
    )


def random_sample(rng, law, scale=5.0):
    a = rng.normal(0.0, scale, size=law.n)
    return sample_from_coefficients(law, a)
