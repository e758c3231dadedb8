import random

import pytest

from feistel_lab.feistel import UfnKind
from feistel_lab.statcheck import (
    BadEventSpec,
    Gf2Matrix,
    bad_event_bound,
    build_ufn2_matrix,
    conditional_uniformity_check,
    estimate_bad_prob,
    gf2_nonsingular,
    secure_rounds,
    watched_rounds,
)


def det_cofactor(rows):
    """Independent determinant oracle over GF(2): cofactor expansion
    (signs vanish mod 2)."""
    size = len(rows)
    if size == 1:
        return rows[0][0]
    total = 0
    for j in range(size):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
            total ^= det_cofactor(minor)
    return total


def test_matrix_k1_is_identity():
    assert build_ufn2_matrix(1).to_lists() == [[1, 0], [0, 1]]
    assert gf2_nonsingular(build_ufn2_matrix(1))


def test_matrix_k2_explicit_and_singular():
    m = build_ufn2_matrix(2)
    assert m.to_lists() == [[1, 1, 0], [1, 0, 1], [0, 1, 1]]
    # row0 ^ row1 == row2 pins the dependency directly.
    assert m.rows[0] ^ m.rows[1] == m.rows[2]
    assert not gf2_nonsingular(m)


def test_matrix_k3_nonsingular_by_oracle():
    m = build_ufn2_matrix(3)
    assert det_cofactor(m.to_lists()) == 1
    assert gf2_nonsingular(m)


def test_matrix_row_sums():
    for k in range(1, 9):
        m = build_ufn2_matrix(k)
        for i in range(k + 1):
            assert sum(m.to_lists()[i]) == k


def test_nonsingular_iff_odd_k():
    for k in range(1, 17):
        assert gf2_nonsingular(build_ufn2_matrix(k)) == (k % 2 == 1), k


def test_elimination_agrees_with_cofactor_oracle():
    rng = random.Random(99)
    for _ in range(500):
        m = Gf2Matrix(5, tuple(rng.getrandbits(5) for _ in range(5)))
        assert gf2_nonsingular(m) == (det_cofactor(m.to_lists()) == 1)


def test_gf2_matrix_validation():
    with pytest.raises(ValueError):
        Gf2Matrix(2, (1,))
    with pytest.raises(ValueError):
        Gf2Matrix(2, (4, 1))
    with pytest.raises(ValueError):
        Gf2Matrix.from_lists([[1, 0], [1]])
    with pytest.raises(ValueError):
        build_ufn2_matrix(0)


def test_gf2_matrix_round_trip():
    m = Gf2Matrix.from_lists([[1, 0, 1], [0, 1, 1], [1, 1, 0]])
    assert m.to_lists() == [[1, 0, 1], [0, 1, 1], [1, 1, 0]]
    assert m.entry(0, 0) == 1 and m.entry(0, 1) == 0


def test_watched_rounds_per_structure():
    assert watched_rounds(UfnKind.SOURCE_HEAVY, 2) == (1, 2, 3)
    assert watched_rounds(UfnKind.TARGET_HEAVY, 2) == (2, 3)
    assert watched_rounds(UfnKind.UFN2, 3) == (3, 4, 5, 6)
    with pytest.raises(ValueError):
        watched_rounds(UfnKind.BALANCED, 1)


def test_secure_rounds_per_structure():
    assert secure_rounds(UfnKind.BALANCED, 1) == 3
    assert secure_rounds(UfnKind.SOURCE_HEAVY, 2) == 4
    assert secure_rounds(UfnKind.TARGET_HEAVY, 3) == 5
    assert secure_rounds(UfnKind.UFN2, 3) == 7


def test_bound_values_by_substitution():
    assert bad_event_bound(UfnKind.SOURCE_HEAVY, 8, 2, 4) == 3 * 16 / 512 == 0.09375
    assert bad_event_bound(UfnKind.TARGET_HEAVY, 8, 2, 4) == 16 / 256 == 0.0625
    assert bad_event_bound(UfnKind.UFN2, 8, 3, 4) == 4 * 16 / 512
    with pytest.raises(ValueError):
        bad_event_bound(UfnKind.BALANCED, 8, 2, 4)


def test_single_query_never_collides():
    spec = BadEventSpec.for_structure(UfnKind.SOURCE_HEAVY, 2, 1)
    report = estimate_bad_prob(spec, 4, 2, trials=200, seed=1)
    assert report.empirical == 0.0


def test_bad_prob_below_bound_small_run():
    spec = BadEventSpec.for_structure(UfnKind.SOURCE_HEAVY, 2, 4)
    report = estimate_bad_prob(spec, 8, 2, trials=2000, seed=5)
    assert report.bound == 0.09375
    assert report.empirical <= report.bound + 3 * report.ci_halfwidth
    assert report.hits > 0  # the shaping actually provokes collisions


def test_bad_prob_uniform_shaping_also_below_bound():
    spec = BadEventSpec.for_structure(UfnKind.TARGET_HEAVY, 2, 4)
    report = estimate_bad_prob(spec, 4, 2, trials=1000, seed=6, shaping="uniform")
    assert report.shaping == "uniform"
    assert report.empirical <= report.bound + 3 * report.ci_halfwidth


def test_bad_prob_rejects_oversized_m():
    spec = BadEventSpec.for_structure(UfnKind.TARGET_HEAVY, 2, 17)
    with pytest.raises(ValueError):
        estimate_bad_prob(spec, 4, 2, trials=10, seed=1)


def test_bad_prob_rejects_bad_args():
    with pytest.raises(ValueError):
        BadEventSpec.for_structure(UfnKind.SOURCE_HEAVY, 2, 0)
    spec = BadEventSpec.for_structure(UfnKind.SOURCE_HEAVY, 2, 2)
    with pytest.raises(ValueError):
        estimate_bad_prob(spec, 4, 2, trials=0, seed=1)
    with pytest.raises(ValueError):
        estimate_bad_prob(spec, 4, 2, trials=10, seed=1, shaping="weird")


def test_bad_prob_reproducible():
    spec = BadEventSpec.for_structure(UfnKind.UFN2, 3, 4)
    a = estimate_bad_prob(spec, 4, 3, trials=500, seed=7)
    b = estimate_bad_prob(spec, 4, 3, trials=500, seed=7)
    assert a == b


def test_uniformity_passes_at_secure_rounds():
    report = conditional_uniformity_check(UfnKind.SOURCE_HEAVY, 2, 2, 4, trials=20000, seed=11)
    assert report.passed
    assert report.dof == 63
    assert report.discarded == 0


def test_uniformity_fails_decisively_for_even_k():
    # The conserved XOR-sum confines outputs to a sixteenth of the space.
    report = conditional_uniformity_check(UfnKind.UFN2, 2, 2, 5, trials=5000, seed=12)
    assert not report.passed
    assert report.statistic > 10 * report.critical_value


def test_uniformity_rejects_large_state():
    with pytest.raises(ValueError):
        conditional_uniformity_check(UfnKind.SOURCE_HEAVY, 4, 3, 5, trials=10, seed=1)


def test_uniformity_rejects_bad_trials():
    with pytest.raises(ValueError):
        conditional_uniformity_check(UfnKind.SOURCE_HEAVY, 2, 2, 4, trials=0, seed=1)
