import itertools
import math

import numpy as np
import pytest
from scipy import stats

from hyperorient.hypergraph import (
    FormatError,
    Hypergraph,
    gen_binomial,
    gen_cloning,
    gen_poisson_cloning,
    gen_uniform,
    read_hypergraph,
    sample_trunc_pois,
    write_hypergraph,
)
from hyperorient.numeric import DomainError, rate_fn_boundary, trunc_pois_mean, trunc_pois_pmf
from hyperorient.rng import Seed


def test_hypergraph_validation():
    with pytest.raises(ValueError):
        Hypergraph(3, 3, np.array([[0, 1, 3]]))
    with pytest.raises(ValueError):
        Hypergraph(5, 3, np.array([[0, 1]]))
    h = Hypergraph(4, 3, [])
    assert h.m == 0 and h.edges.shape == (0, 3)


def test_uniform_trivial_cases():
    assert gen_uniform(10, 0, 3, 0).m == 0
    h = gen_uniform(4, 1, 4, 0)
    assert h.edge_tuples() == [(0, 1, 2, 3)]
    with pytest.raises(ValueError):
        gen_uniform(5, 11, 3, 0)
    with pytest.raises(ValueError):
        gen_uniform(2, 0, 3, 0)
    with pytest.raises(ValueError):
        gen_uniform(10, 1, 2, 0)


def test_uniform_simple_and_complete():
    h = gen_uniform(7, 35, 3, 1)
    assert sorted(h.edge_tuples()) == list(itertools.combinations(range(7), 3))
    h = gen_uniform(200, 300, 4, 2)
    e = h.edges
    assert (np.diff(e, axis=1) > 0).all()
    assert len(np.unique(e, axis=0)) == h.m
    assert h.simple


def test_uniform_deterministic():
    assert gen_uniform(1000, 2000, 3, Seed(4, 1)) == gen_uniform(1000, 2000, 3, Seed(4, 1))
    assert gen_uniform(1000, 2000, 3, Seed(4, 1)) != gen_uniform(1000, 2000, 3, Seed(4, 2))


def test_uniform_degree_mean():
    # over 10^4 draws of (n=30, m=30, k=3) each degree has mean k m / n = 3
    deg = np.zeros(30)
    sq = np.zeros(30)
    draws = 10_000
    for i in range(draws):
        d = gen_uniform(30, 30, 3, Seed(i, 9)).degrees()
        deg += d
        sq += d * d
    mean = deg / draws
    sd = np.sqrt(sq / draws - mean**2)
    # 3 sigma per vertex, Bonferroni-widened over the 30 vertices
    z = stats.norm.isf(stats.norm.sf(3.0) / 30)
    assert np.all(np.abs(mean - 3.0) < z * sd / math.sqrt(draws))
    assert stats.chisquare(deg).pvalue > 1e-3


def test_uniform_edge_law_is_uniform_over_simple_graphs():
    # n=5, k=3, m=2: all C(10,2)=45 edge pairs equally likely
    counts = {}
    for i in range(9000):
        key = tuple(sorted(gen_uniform(5, 2, 3, Seed(i, 4)).edge_tuples()))
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 45
    assert stats.chisquare(list(counts.values())).pvalue > 1e-4


def test_binomial_trivial_cases():
    assert gen_binomial(20, 0.0, 3, 0).m == 0
    assert gen_binomial(3, 1.0, 3, 0).edge_tuples() == [(0, 1, 2)]
    assert gen_binomial(6, 1.0, 3, 0).m == 20
    with pytest.raises(ValueError):
        gen_binomial(20, 1.2, 3, 0)
    with pytest.raises(OverflowError):
        gen_binomial(10**7, 1e-20, 3, 0)


def test_binomial_mean_edge_count():
    counts = np.array([gen_binomial(20, 0.01, 3, Seed(i, 8)).m for i in range(10_000)])
    sigma = math.sqrt(1140 * 0.01 * 0.99 / len(counts))
    assert abs(counts.mean() - 11.4) < 3 * sigma


def test_cloning_trivial_cases():
    assert gen_cloning([0, 0, 0], 3, 0).m == 0
    h = gen_cloning([3], 3, 0)
    assert h.edge_tuples() == [(0, 0, 0)] and not h.simple
    with pytest.raises(ValueError):
        gen_cloning([1, -1], 3, 0)


def test_cloning_conserves_clones():
    d = np.array([3, 0, 5, 2, 7, 1, 4])
    h = gen_cloning(d, 3, 5)
    assert h.discarded_clones == d.sum() % 3
    deg = h.degrees()
    assert deg.sum() == d.sum() - h.discarded_clones
    assert np.all(deg <= d) and (d - deg).sum() == h.discarded_clones


def test_cloning_matching_is_uniform():
    # two vertices of degree 3, k=3: the 6 clones form 10 distinct 2-blocks
    # splittings; P[both edges monochromatic] = 2 / C(6,3) = 1/10
    trials = 20_000
    mono = sum(
        gen_cloning([3, 3], 3, Seed(i, 6)).edge_tuples()[0] in [(0, 0, 0), (1, 1, 1)] for i in range(trials)
    )
    assert abs(mono / trials - 0.1) < 4 * math.sqrt(0.09 / trials)


def test_poisson_cloning():
    assert gen_poisson_cloning(50, 0.0, 3, 0).m == 0
    n, k = 100, 3
    p = 6.0 / math.comb(n - 1, k - 1)
    totals = np.array([gen_poisson_cloning(n, p, k, Seed(i, 3)).degrees().sum()
                       + gen_poisson_cloning(n, p, k, Seed(i, 3)).discarded_clones for i in range(3000)])
    assert abs(totals.mean() - 600) < 3 * math.sqrt(600 / len(totals))


def test_trunc_pois_sampler():
    x = sample_trunc_pois(6.0, 2, 10**6, 17)
    assert x.min() >= 3
    mean = trunc_pois_mean(6.0, 2)
    var = sum((j - mean) ** 2 * trunc_pois_pmf(j, 6.0, 2) for j in range(3, 80))
    assert abs(x.mean() - mean) < 3 * math.sqrt(var / len(x))
    p3 = math.exp(-rate_fn_boundary(6.0, 2))
    assert abs(np.mean(x == 3) - p3) < 4 * math.sqrt(p3 * (1 - p3) / len(x))
    assert len(sample_trunc_pois(2.0, 3, 0, 1)) == 0
    with pytest.raises(DomainError):
        sample_trunc_pois(0.0, 2, 5, 1)


def test_roundtrip(tmp_path):
    h = gen_uniform(50, 80, 3, 3)
    path = tmp_path / "g.txt"
    write_hypergraph(h, path)
    back = read_hypergraph(path)
    assert back == h and back.simple
    c = gen_cloning([4, 4, 1], 3, 2)
    write_hypergraph(c, path)
    back = read_hypergraph(path)
    assert back == c and not back.simple


def test_parse_errors(tmp_path):
    cases = {
        "empty": "",
        "header": "3 1\n0 1 2\n",
        "count": "4 2 3\n0 1 2\n",
        "arity": "4 1 3\n0 1\n",
        "range": "4 1 3\n0 1 4\n",
        "token": "4 1 3\n0 x 2\n",
    }
    for name, text in cases.items():
        path = tmp_path / name
        path.write_text(text)
        with pytest.raises(FormatError):
            read_hypergraph(path)


def test_parse_comments_and_blank_lines(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("# a comment\n4 2 3\n\n2 1 0  # unsorted row\n1 2 3\n")
    h = read_hypergraph(path)
    assert h.edge_tuples() == [(0, 1, 2), (1, 2, 3)]
