import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agentuq import (
    Alphabet,
    Dist,
    JointTable,
    MeasureSpec,
    ParameterError,
    ValidationError,
    conditional_entropy,
    entropy,
    information_content,
    informational_energy,
    kl_divergence,
    max_entropy,
    mutual_information,
    onicescu_correlation,
    pointwise_mutual_information,
    power_entropy,
    renyi_entropy,
    to_bits,
    tsallis_entropy,
)
from conftest import random_joint_table


def dist(*weights):
    alphabet = Alphabet("x", tuple(f"s{i}" for i in range(len(weights))))
    return Dist(alphabet, tuple(weights))


@st.composite
def dists(draw, max_size=8):
    n = draw(st.integers(2, max_size))
    raw = draw(
        st.lists(st.floats(1e-6, 1.0, allow_nan=False), min_size=n, max_size=n)
    )
    total = sum(raw)
    return dist(*(w / total for w in raw))


def test_entropy_uniform_four():
    assert entropy(dist(0.25, 0.25, 0.25, 0.25)) == pytest.approx(math.log(4), abs=1e-12)


def test_entropy_point_mass():
    assert entropy(dist(1.0, 0.0, 0.0)) == 0.0


def test_entropy_dyadic():
    # 1.5 bits
    assert entropy(dist(0.5, 0.25, 0.25)) == pytest.approx(1.0397207708399179, abs=1e-9)
    assert to_bits(entropy(dist(0.5, 0.25, 0.25))) == pytest.approx(1.5, abs=1e-12)


def test_entropy_bounds_property():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        d = dist(*rng.dirichlet(np.ones(n)))
        h = entropy(d)
        assert -1e-12 <= h <= math.log(n) + 1e-12


def test_information_content_values():
    assert information_content(dist(1.0, 0.0), "s0") == 0.0
    assert information_content(dist(0.5, 0.5), "s0") == pytest.approx(math.log(2))
    d = dist(1 / math.e, 1 - 1 / math.e)
    assert information_content(d, "s0") == pytest.approx(1.0, abs=1e-12)


def test_information_content_zero_is_infinite():
    assert information_content(dist(1.0, 0.0), "s1") == math.inf


def test_kl_identical_is_zero():
    d = dist(0.3, 0.7)
    assert kl_divergence(d, d) == 0.0


def test_kl_point_mass_against_uniform():
    assert kl_divergence(dist(1.0, 0.0), dist(0.5, 0.5)) == pytest.approx(math.log(2))


def test_kl_matches_direct_summation():
    rng = np.random.default_rng(1)
    for _ in range(50):
        q = rng.dirichlet(np.ones(5)) + 1e-4
        p = rng.dirichlet(np.ones(5)) + 1e-4
        q, p = q / q.sum(), p / p.sum()
        expected = sum(qi * math.log(qi / pi) for qi, pi in zip(q, p))
        assert kl_divergence(dist(*q), dist(*p)) == pytest.approx(expected, abs=1e-12)


def test_kl_absolute_continuity_error_names_symbol():
    with pytest.raises(ValidationError, match="s1"):
        kl_divergence(dist(0.5, 0.5), dist(1.0, 0.0))


def test_renyi_collision_entropy():
    assert renyi_entropy(dist(0.5, 0.5), 2.0) == pytest.approx(math.log(2), abs=1e-12)


def test_renyi_near_one_approaches_shannon():
    d = dist(0.6, 0.3, 0.1)
    for alpha in (1 - 1e-4, 1 + 1e-4):
        assert renyi_entropy(d, alpha) == pytest.approx(entropy(d), abs=1e-3)


def test_renyi_large_alpha_approaches_min_entropy():
    d = dist(0.7, 0.3)
    assert renyi_entropy(d, 64.0) == pytest.approx(-math.log(0.7), abs=1e-2)


@pytest.mark.parametrize("alpha", [0.0, -1.0, 1.0])
def test_renyi_domain_errors(alpha):
    with pytest.raises(ParameterError):
        renyi_entropy(dist(0.5, 0.5), alpha)


@given(dists(), st.floats(0.05, 8.0), st.floats(0.05, 8.0))
@settings(max_examples=200, deadline=None)
def test_renyi_non_increasing_in_alpha(d, a1, a2):
    if abs(a1 - 1.0) < 1e-3 or abs(a2 - 1.0) < 1e-3:
        return
    lo, hi = sorted((a1, a2))
    assert renyi_entropy(d, lo) >= renyi_entropy(d, hi) - 1e-9


def test_max_entropy_counts_support():
    assert max_entropy(dist(0.5, 0.5, 0.0)) == pytest.approx(math.log(2))
    assert max_entropy(dist(0.2, 0.3, 0.5)) == pytest.approx(math.log(3))


def test_tsallis_uniform_two():
    assert tsallis_entropy(dist(0.5, 0.5), 2.0) == pytest.approx(0.5, abs=1e-12)
    # equals the order-2 power entropy
    assert tsallis_entropy(dist(0.5, 0.5), 2.0) == pytest.approx(
        power_entropy(dist(0.5, 0.5)), abs=1e-12
    )


def test_tsallis_point_mass_any_q():
    for q in (0.5, 2.0, 3.7):
        assert tsallis_entropy(dist(1.0, 0.0), q) == pytest.approx(0.0, abs=1e-12)


def test_tsallis_near_one_approaches_shannon():
    rng = np.random.default_rng(2)
    for _ in range(20):
        d = dist(*rng.dirichlet(np.ones(4)))
        for q in (1 - 1e-4, 1 + 1e-4):
            assert tsallis_entropy(d, q) == pytest.approx(entropy(d), abs=1e-3)


def test_tsallis_q_one_rejected():
    with pytest.raises(ParameterError):
        tsallis_entropy(dist(0.5, 0.5), 1.0)


def test_informational_energy_values():
    assert informational_energy(dist(*([0.25] * 4))) == pytest.approx(0.25)
    assert informational_energy(dist(1.0, 0.0)) == 1.0
    assert informational_energy(dist(0.5, 0.3, 0.2)) == pytest.approx(0.38, abs=1e-12)


def test_energy_identities():
    rng = np.random.default_rng(3)
    for _ in range(50):
        d = dist(*rng.dirichlet(np.ones(5)))
        ie = informational_energy(d)
        assert renyi_entropy(d, 2.0) == pytest.approx(-math.log(ie), abs=1e-12)
        assert power_entropy(d) == pytest.approx(1.0 - ie, abs=1e-15)


def test_onicescu_self_correlation_is_one():
    d = dist(0.2, 0.5, 0.3)
    assert onicescu_correlation(d, d) == pytest.approx(1.0, abs=1e-12)


def test_onicescu_disjoint_supports():
    assert onicescu_correlation(dist(1.0, 0.0), dist(0.0, 1.0)) == 0.0


def test_onicescu_matches_direct_summation():
    rng = np.random.default_rng(4)
    for _ in range(20):
        p = rng.dirichlet(np.ones(4))
        q = rng.dirichlet(np.ones(4))
        num = float(np.dot(p, q))
        den = math.sqrt(float(np.dot(p, p)) * float(np.dot(q, q)))
        assert onicescu_correlation(dist(*p), dist(*q)) == pytest.approx(
            num / den, abs=1e-12
        )


def test_onicescu_alphabet_mismatch():
    other = Dist(Alphabet("y", ("a", "b")), (0.5, 0.5))
    with pytest.raises(ValidationError):
        onicescu_correlation(dist(0.5, 0.5), other)


def _table(axes, probs):
    probs = np.asarray(probs, dtype=float)
    labels = tuple(tuple(f"{ax}{j}" for j in range(s)) for ax, s in zip(axes, probs.shape))
    return JointTable(axes, labels, probs)


def test_conditional_entropy_independent():
    # X independent of Z
    j = _table(("x", "z"), np.outer([0.3, 0.7], [0.5, 0.5]))
    hx = entropy(dist(0.3, 0.7))
    assert conditional_entropy(j, "x", ("z",)) == pytest.approx(hx, abs=1e-12)


def test_conditional_entropy_deterministic_function():
    j = _table(("x", "z"), [[0.5, 0.0], [0.0, 0.5]])
    assert conditional_entropy(j, "x", ("z",)) == pytest.approx(0.0, abs=1e-12)


def test_conditional_entropy_matches_mixture_oracle():
    rng = np.random.default_rng(5)
    for _ in range(20):
        j = random_joint_table(rng, (3, 2, 4), axes=("x", "y", "z"))
        # oracle: sum_z p(z) H(X | Z=z)
        pz = j.marginal(("z",)).probs
        pxz = j.marginal(("x", "z")).probs
        expected = 0.0
        for k in range(4):
            if pz[k] <= 0:
                continue
            cond = pxz[:, k] / pz[k]
            expected += pz[k] * entropy(dist(*cond))
        assert conditional_entropy(j, "x", ("z",)) == pytest.approx(expected, abs=1e-10)


def test_conditional_entropy_chain_rule_identity():
    rng = np.random.default_rng(6)
    for _ in range(30):
        j = random_joint_table(rng, (2, 3, 2), axes=("a", "b", "c"))
        total = j.entropy()
        chained = (
            j.entropy(("a",))
            + conditional_entropy(j, "b", ("a",))
            + conditional_entropy(j, "c", ("a", "b"))
        )
        assert chained == pytest.approx(total, abs=1e-9)


def test_conditional_entropy_unknown_axis():
    j = _table(("x", "z"), [[0.5, 0.0], [0.0, 0.5]])
    with pytest.raises(ValidationError):
        conditional_entropy(j, "nope", ("z",))


def test_mutual_information_independent_is_zero():
    j = _table(("x", "y"), np.outer([0.4, 0.6], [0.3, 0.7]))
    assert mutual_information(j, "x", "y") == pytest.approx(0.0, abs=1e-12)


def test_mutual_information_identical_uniform_binary():
    j = _table(("x", "y"), [[0.5, 0.0], [0.0, 0.5]])
    assert mutual_information(j, "x", "y") == pytest.approx(math.log(2), abs=1e-12)


def test_mutual_information_binary_symmetric_channel():
    flip = 0.25
    probs = np.array([[0.5 * (1 - flip), 0.5 * flip], [0.5 * flip, 0.5 * (1 - flip)]])
    j = _table(("x", "y"), probs)
    # joint-table summation oracle
    px = probs.sum(axis=1)
    py = probs.sum(axis=0)
    oracle = sum(
        probs[a, b] * math.log(probs[a, b] / (px[a] * py[b]))
        for a in range(2)
        for b in range(2)
        if probs[a, b] > 0
    )
    got = mutual_information(j, "x", "y")
    assert got == pytest.approx(oracle, abs=1e-12)
    assert got == pytest.approx(0.130812, abs=1e-6)
    assert to_bits(got) == pytest.approx(0.188722, abs=1e-6)


def test_mutual_information_symmetry_and_entropy_difference():
    rng = np.random.default_rng(7)
    for _ in range(30):
        j = random_joint_table(rng, (3, 3, 2), axes=("x", "y", "z"))
        ixy = mutual_information(j, "x", "y", ("z",))
        iyx = mutual_information(j, "y", "x", ("z",))
        assert ixy == pytest.approx(iyx, abs=1e-12)
        diff = conditional_entropy(j, "x", ("z",)) - conditional_entropy(j, "x", ("y", "z"))
        assert ixy == pytest.approx(diff, abs=1e-10)


def test_mutual_information_nonnegative_randomized():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        j = random_joint_table(rng, (2, 3, 2), axes=("x", "y", "z"))
        assert mutual_information(j, "x", "y", ("z",)) >= 0.0


def test_data_processing_inequality_under_coarsening():
    rng = np.random.default_rng(9)
    for _ in range(50):
        j = random_joint_table(rng, (3, 4), axes=("x", "y"))
        # deterministic coarsening g(y): merge y-labels pairwise
        coarse = np.stack([j.probs[:, :2].sum(axis=1), j.probs[:, 2:].sum(axis=1)], axis=1)
        jg = _table(("x", "g"), coarse)
        assert mutual_information(j, "x", "y") >= mutual_information(jg, "x", "g") - 1e-9


def test_pmi_independent_is_zero():
    j = _table(("x", "y"), np.outer([0.4, 0.6], [0.3, 0.7]))
    assert pointwise_mutual_information(j, "x", "x0", "y", "y1") == pytest.approx(
        0.0, abs=1e-12
    )


def test_pmi_perfect_correlation():
    j = _table(("x", "y"), [[0.5, 0.0], [0.0, 0.5]])
    assert pointwise_mutual_information(j, "x", "x0", "y", "y0") == pytest.approx(
        math.log(2), abs=1e-12
    )


def test_pmi_mismatch_is_negative_and_matches_formula():
    flip = 0.25
    probs = np.array([[0.5 * (1 - flip), 0.5 * flip], [0.5 * flip, 0.5 * (1 - flip)]])
    j = _table(("x", "y"), probs)
    got = pointwise_mutual_information(j, "x", "x0", "y", "y1")
    expected = math.log(probs[0, 1] / (probs[0].sum() * probs[:, 1].sum()))
    assert got == pytest.approx(expected, abs=1e-12)
    assert got < 0


def test_pmi_zero_probability_event_errors():
    j = _table(("x", "y"), [[0.5, 0.0], [0.0, 0.5]])
    with pytest.raises(ValidationError):
        pointwise_mutual_information(j, "x", "x0", "y", "y1")


def test_pmi_conditional_form():
    rng = np.random.default_rng(10)
    j = random_joint_table(rng, (2, 2, 2), axes=("x", "y", "z"))
    p = j.probs
    pz = p.sum(axis=(0, 1))
    expected = math.log(p[0, 1, 0] / pz[0]) - math.log(
        p[0, :, 0].sum() / pz[0]
    ) - math.log(p[:, 1, 0].sum() / pz[0])
    got = pointwise_mutual_information(j, "x", "x0", "y", "y1", {"z": "z0"})
    assert got == pytest.approx(expected, abs=1e-12)


def test_measure_spec_validation():
    with pytest.raises(ParameterError):
        MeasureSpec("renyi", alpha=1.0)
    with pytest.raises(ParameterError):
        MeasureSpec("tsallis", q=1.0)
    with pytest.raises(ParameterError):
        MeasureSpec("relative")
    with pytest.raises(ParameterError):
        MeasureSpec("nope")
    spec = MeasureSpec("renyi", alpha=2.0)
    assert spec.apply(dist(0.5, 0.5)) == pytest.approx(math.log(2))


def test_joint_table_validation():
    with pytest.raises(ValidationError):
        _table(("x", "y"), [[0.5, 0.6], [0.0, 0.0]])
    with pytest.raises(ValidationError):
        JointTable(("x", "x"), (("a",), ("b",)), np.ones((1, 1)))
    j = _table(("x", "y"), [[0.25, 0.25], [0.25, 0.25]])
    m = j.marginal(("y",))
    assert m.axes == ("y",)
    assert m.probs.tolist() == [0.5, 0.5]
