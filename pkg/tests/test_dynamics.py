import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gramdyn import (
    AdvantageMatrix,
    LearnerState,
    PopulationState,
    babelian,
    increment,
    lrp_update,
    map_formula,
    penalties,
    reliable_map,
    simulate_lrp_ensemble,
    simulate_lrp_learner,
    generational_simulation,
    trajectory,
    two_grammar,
)
from gramdyn import _kernels

from conftest import ReferenceStream, categorical, random_proper_matrix


def reciprocal_form(matrix: AdvantageMatrix, p: np.ndarray) -> np.ndarray:
    # interior-only reference: p'_i proportional to 1 / c_i
    c = penalties(matrix, p).values
    inv = 1.0 / c
    return inv / inv.sum()


class TestMapFormula:
    def test_matches_reciprocal_form_in_interior(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            m = random_proper_matrix(rng, 3)
            p = rng.dirichlet(np.ones(3)) * 0.98 + 0.02 / 3
            got = map_formula(m.entries, p)
            assert np.max(np.abs(got - reciprocal_form(m, p))) < 1e-10

    def test_vertices_are_exact_fixed_points(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            m = random_proper_matrix(rng, 3)
            for i in range(3):
                v = PopulationState.vertex(3, i)
                out = reliable_map(m, v)
                assert np.array_equal(out.p, v.p)

    def test_penalty_scale_invariance(self):
        # the map depends on penalties only through their ratios, so
        # scaling every advantage by lambda leaves it unchanged
        rng = np.random.default_rng(11)
        for _ in range(200):
            m = random_proper_matrix(rng, 3)
            p = rng.dirichlet(np.ones(3))
            lam = rng.uniform(0.1, 40.0)
            scaled = AdvantageMatrix.unchecked(lam * m.entries)
            a = map_formula(m.entries, p)
            b = map_formula(scaled.entries, p)
            assert np.max(np.abs(a - b)) < 1e-12

    def test_simplex_preservation(self):
        rng = np.random.default_rng(13)
        for _ in range(2000):
            m = random_proper_matrix(rng, 3)
            p = rng.dirichlet(np.ones(3))
            out = map_formula(m.entries, p)
            assert np.all(out >= 0.0)
            assert abs(out.sum() - 1.0) < 1e-12

    def test_rejects_non_proper_matrix(self):
        a = np.array([
            [0.0, 0.0, 0.3],
            [0.0, 0.0, 0.3],
            [0.3, 0.3, 0.0],
        ])
        with pytest.raises(ValueError, match="proper"):
            reliable_map(AdvantageMatrix(a), PopulationState.uniform(3))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            reliable_map(two_grammar(0.2, 0.1), np.array([0.5, 0.3, 0.2]))

    def test_increment_sums_to_zero(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            m = random_proper_matrix(rng, 3)
            p = rng.dirichlet(np.ones(3))
            d = increment(m, p)
            assert abs(d.sum()) < 1e-12


class TestTwoGrammarMap:
    def test_closed_form_for_double_advantage(self):
        # with a 2:1 advantage ratio the winning share follows
        # p' = 2p / (1 + p)
        m = two_grammar(0.2, 0.1)
        for p1 in np.linspace(0.001, 0.999, 101):
            out = map_formula(m.entries, np.array([p1, 1.0 - p1]))
            assert out[0] == pytest.approx(2 * p1 / (1 + p1), abs=1e-14)

    def test_monotone_in_current_share(self):
        m = two_grammar(0.17, 0.06)
        grid = np.linspace(1e-4, 1.0 - 1e-4, 1000)
        vals = np.array([map_formula(m.entries, np.array([p, 1 - p]))[0]
                         for p in grid])
        assert np.all(np.diff(vals) > 0.0)

    def test_advantaged_grammar_always_gains(self):
        rng = np.random.default_rng(19)
        for _ in range(1000):
            a2 = rng.uniform(0.01, 0.5)
            a1 = a2 + rng.uniform(0.01, 0.5)
            m = two_grammar(a1, a2)
            p1 = rng.uniform(1e-3, 1.0 - 1e-3)
            out = map_formula(m.entries, np.array([p1, 1.0 - p1]))
            assert out[0] > p1

    def test_takeover_crossing_generation(self):
        m = two_grammar(0.2, 0.1)
        traj = trajectory(m, np.array([0.01, 0.99]), 20).as_array()
        p1 = traj[:, 0]
        assert np.all(np.diff(p1) > 0.0)
        crossed = np.nonzero(p1 > 0.99)[0]
        assert crossed.size and crossed[0] == 14


class TestTrajectory:
    def test_shape_and_start(self):
        m = babelian(3, 0.1)
        p0 = np.array([0.7, 0.2, 0.1])
        traj = trajectory(m, p0, 5)
        assert traj.generations == 5
        arr = traj.as_array()
        assert arr.shape == (6, 3)
        assert np.array_equal(arr[0], p0)
        assert traj.final().classify() == "interior"

    def test_requires_positive_generations(self):
        with pytest.raises(ValueError):
            trajectory(babelian(3, 0.1), PopulationState.uniform(3), 0)

    def test_states_stay_on_simplex(self):
        rng = np.random.default_rng(23)
        m = random_proper_matrix(rng, 3)
        traj = trajectory(m, rng.dirichlet(np.ones(3)), 50).as_array()
        assert np.all(traj >= 0.0)
        assert np.max(np.abs(traj.sum(axis=1) - 1.0)) < 1e-9


class TestLearnerUpdate:
    def test_reward_moves_toward_chosen(self):
        s = LearnerState(np.array([0.5, 0.3, 0.2]), gamma=0.1)
        out = lrp_update(s, chosen=1, parsed=True)
        expect = np.array([0.9 * 0.5, 0.3 + 0.1 * 0.7, 0.9 * 0.2])
        assert np.array_equal(out.pi, expect)
        assert out.tokens_seen == 1

    def test_penalty_spreads_mass(self):
        s = LearnerState(np.array([0.5, 0.3, 0.2]), gamma=0.1)
        out = lrp_update(s, chosen=1, parsed=False)
        spread = 0.1 / 2
        expect = np.array([spread + 0.9 * 0.5, 0.9 * 0.3, spread + 0.9 * 0.2])
        assert np.array_equal(out.pi, expect)

    def test_bad_index_rejected(self):
        s = LearnerState.fresh(3, 0.1)
        with pytest.raises(IndexError):
            lrp_update(s, chosen=3, parsed=True)

    def test_no_learning_at_zero_rate(self):
        s = LearnerState(np.array([0.25, 0.75]), gamma=0.0)
        out = lrp_update(s, chosen=0, parsed=False)
        assert np.array_equal(out.pi, s.pi)

    def test_long_run_stays_normalized(self):
        # sum drift over many alternating reward/penalty updates
        rng = np.random.default_rng(29)
        s = LearnerState.fresh(3, gamma=0.01)
        for t in range(100_000):
            s = lrp_update(s, int(rng.integers(3)), bool(rng.integers(2)))
        assert abs(s.pi.sum() - 1.0) < 1e-9
        assert np.all(s.pi >= 0.0) and np.all(s.pi <= 1.0)
        assert s.tokens_seen == 100_000

    @given(st.lists(st.tuples(st.integers(0, 2), st.booleans()),
                    min_size=1, max_size=200))
    @settings(max_examples=60, deadline=None)
    def test_any_update_sequence_preserves_range(self, events):
        s = LearnerState.fresh(3, gamma=0.05)
        for chosen, parsed in events:
            s = lrp_update(s, chosen, parsed)
        assert np.all(s.pi >= 0.0) and np.all(s.pi <= 1.0)
        assert abs(s.pi.sum() - 1.0) < 1e-12 * len(events) + 1e-12


def python_lrp_reference(matrix, p, gamma, T, seed):
    """Single-learner reference: kernel RNG stream + public update step."""
    stream = ReferenceStream(_kernels.member_seeds(seed, 1)[0])
    state = LearnerState.fresh(matrix.n, gamma)
    pvec = np.asarray(p, dtype=np.float64)
    for _ in range(T):
        u_env = stream.uniform()
        u_pick = stream.uniform()
        u_parse = stream.uniform()
        g = categorical(u_env, pvec)
        k = categorical(u_pick, state.pi)
        fail = u_parse < matrix.entries[k, g]
        state = lrp_update(state, k, parsed=not fail)
    return state.pi


class TestEnsembleKernel:
    def test_matches_python_reference_bit_for_bit(self):
        m = AdvantageMatrix(np.array([
            [0.0, 0.30, 0.30],
            [0.10, 0.0, 0.20],
            [0.15, 0.25, 0.0],
        ]))
        p = np.array([0.5, 0.3, 0.2])
        for seed in (0, 1, 12345):
            got = simulate_lrp_learner(m, p, gamma=0.1, T=400, seed=seed)
            ref = python_lrp_reference(m, p, gamma=0.1, T=400, seed=seed)
            assert got.tokens_seen == 400
            assert np.array_equal(got.pi, ref)

    def test_single_run_is_ensemble_row_zero(self):
        m = two_grammar(0.2, 0.1)
        p = np.array([0.6, 0.4])
        ens = simulate_lrp_ensemble(m, p, gamma=0.01, T=1000, learners=7, seed=42)
        one = simulate_lrp_learner(m, p, gamma=0.01, T=1000, seed=42)
        assert ens.shape == (7, 2)
        assert np.array_equal(ens[0], one.pi)

    def test_rows_stay_on_simplex(self):
        rng = np.random.default_rng(31)
        m = random_proper_matrix(rng, 3)
        ens = simulate_lrp_ensemble(m, rng.dirichlet(np.ones(3)),
                                    gamma=0.02, T=5000, learners=32, seed=5)
        assert np.all(ens >= 0.0) and np.all(ens <= 1.0)
        assert np.max(np.abs(ens.sum(axis=1) - 1.0)) < 1e-9

    def test_deterministic_in_seed(self):
        m = two_grammar(0.2, 0.1)
        p = np.array([0.5, 0.5])
        a = simulate_lrp_ensemble(m, p, gamma=0.01, T=500, learners=3, seed=9)
        b = simulate_lrp_ensemble(m, p, gamma=0.01, T=500, learners=3, seed=9)
        c = simulate_lrp_ensemble(m, p, gamma=0.01, T=500, learners=3, seed=10)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_parameter_validation(self):
        m = two_grammar(0.2, 0.1)
        p = np.array([0.5, 0.5])
        with pytest.raises(ValueError):
            simulate_lrp_ensemble(m, p, gamma=0.0, T=10, learners=2, seed=0)
        with pytest.raises(ValueError):
            simulate_lrp_ensemble(m, p, gamma=1.0, T=10, learners=2, seed=0)
        with pytest.raises(ValueError):
            simulate_lrp_ensemble(m, p, gamma=0.1, T=0, learners=2, seed=0)

    def test_mean_approaches_map_value(self):
        # coarse sanity bound; the acceptance suite checks the tight one
        m = two_grammar(0.2, 0.1)
        p = np.array([0.5, 0.5])
        ens = simulate_lrp_ensemble(m, p, gamma=0.002, T=200_000,
                                    learners=64, seed=17)
        target = map_formula(m.entries, p)
        assert np.max(np.abs(ens.mean(axis=0) - target)) < 0.05


class TestGenerationalSimulation:
    def test_shape_and_determinism(self):
        m = two_grammar(0.2, 0.1)
        traj = generational_simulation(m, np.array([0.2, 0.8]), generations=4,
                                       gamma=0.01, T=20_000, learners_per_generation=20, seed=3)
        arr = traj.as_array()
        assert arr.shape == (5, 2)
        again = generational_simulation(m, np.array([0.2, 0.8]), generations=4,
                                        gamma=0.01, T=20_000, learners_per_generation=20, seed=3)
        assert np.array_equal(arr, again.as_array())

    def test_tracks_deterministic_map_loosely(self):
        m = two_grammar(0.2, 0.1)
        p0 = np.array([0.3, 0.7])
        stoch = generational_simulation(m, p0, generations=5, gamma=0.005,
                                        T=50_000, learners_per_generation=50, seed=21).as_array()
        det = trajectory(m, p0, 5).as_array()
        assert np.max(np.abs(stoch - det)) < 0.05
