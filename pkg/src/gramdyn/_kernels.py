"""Seeded batched token-loop kernels for the stochastic learners.

The ensemble loops are vectorized across learners with one xoshiro256+
stream per learner, so serial and parallel schedules consume identical
random numbers and the results are bit-for-bit reproducible from the
root seed.  Per-learner stream seeds come from numpy's SeedSequence;
each stream is initialized by four splitmix64 steps, the reference
seeding procedure for xoshiro generators.

Uniform doubles are (r >> 11) * 2^-53 from the xoshiro output word.

Random consumption order is part of the reproducibility contract and is
mirrored by the pure-python references in the test suite:
  LRP token:  u_env (generating grammar), u_pick (learner grammar),
              u_parse (parse event).
  NPL token:  u_param[0..N-1] (grammar bits), u_env (input string).
Categorical draws use the cumulative rule value = sum_j (u >= cum_j).
"""

import numpy as np
from numba import njit

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0


def member_seeds(seed: int, count: int) -> np.ndarray:
    """Independent uint64 stream seeds for `count` ensemble members."""
    return np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)


@njit(cache=True)
def init_states(seeds):
    """xoshiro256 state block (4, m) from per-member seeds, via splitmix64."""
    m = seeds.shape[0]
    s = np.empty((4, m), dtype=np.uint64)
    for i in range(m):
        z = seeds[i]
        for j in range(4):
            z = z + _GOLDEN
            x = z
            x = (x ^ (x >> U64(30))) * _MIX1
            x = (x ^ (x >> U64(27))) * _MIX2
            s[j, i] = x ^ (x >> U64(31))
    return s


@njit(cache=True, inline="always")
def _fill_uniform(s0, s1, s2, s3, out):
    # xoshiro256+ step for every lane, uniform in [0, 1)
    m = out.shape[0]
    for i in range(m):
        r = s0[i] + s3[i]
        out[i] = (r >> U64(11)) * _INV53
        t = s1[i] << U64(17)
        s2[i] ^= s0[i]
        s3[i] ^= s1[i]
        s1[i] ^= s2[i]
        s0[i] ^= s3[i]
        s2[i] ^= t
        s3[i] = (s3[i] << U64(45)) | (s3[i] >> U64(19))
    return


@njit(cache=True)
def lrp_ensemble_kernel(a, pcum, gamma, T, states, pi):
    """Run T reward-penalty tokens for m learners in lockstep.

    a: (n, n) advantage matrix; pcum: cumulative environment mixture;
    states: (4, m) xoshiro block, advanced in place; pi: (n, m) learner
    grammar probabilities, updated in place.

    Update arithmetic matches lrp_update expression for expression so
    the python reference reproduces this kernel exactly.
    """
    n, m = pi.shape
    s0, s1, s2, s3 = states[0], states[1], states[2], states[3]
    u_env = np.empty(m)
    u_pick = np.empty(m)
    u_parse = np.empty(m)
    g = np.empty(m, dtype=np.int64)
    k = np.empty(m, dtype=np.int64)
    acc = np.empty(m)
    fail = np.empty(m, dtype=np.bool_)
    one_minus = 1.0 - gamma
    spread = gamma / (n - 1)
    for _ in range(T):
        _fill_uniform(s0, s1, s2, s3, u_env)
        _fill_uniform(s0, s1, s2, s3, u_pick)
        _fill_uniform(s0, s1, s2, s3, u_parse)
        for i in range(m):
            g[i] = 0
            k[i] = 0
            acc[i] = pi[0, i]
        for j in range(n - 1):
            c = pcum[j]
            for i in range(m):
                g[i] += u_env[i] >= c
        for j in range(1, n):
            for i in range(m):
                k[i] += u_pick[i] >= acc[i]
                acc[i] += pi[j, i]
        for i in range(m):
            fail[i] = u_parse[i] < a[k[i], g[i]]
        for j in range(n):
            for i in range(m):
                pij = pi[j, i]
                if j == k[i]:
                    v = one_minus * pij if fail[i] else pij + gamma * (1.0 - pij)
                else:
                    v = spread + one_minus * pij if fail[i] else one_minus * pij
                pi[j, i] = v
    return


@njit(cache=True)
def npl_ensemble_kernel(parse, scum, gamma, T, states, xi):
    """Run T parameter-learner tokens for m learners in lockstep.

    parse: (2^N, S) boolean parse table, grammar index is the parameter
    bit-vector read as a binary number with sigma_1 as the high bit;
    scum: cumulative input-string distribution (stationary environment);
    states: (4, m) xoshiro block; xi: (N, m) parameter probabilities,
    updated in place with the same expressions as npl_update.
    """
    N, m = xi.shape
    S = scum.shape[0]
    s0, s1, s2, s3 = states[0], states[1], states[2], states[3]
    u = np.empty(m)
    gidx = np.empty(m, dtype=np.int64)
    sidx = np.empty(m, dtype=np.int64)
    bits = np.empty((N, m), dtype=np.bool_)
    ok = np.empty(m, dtype=np.bool_)
    one_minus = 1.0 - gamma
    for _ in range(T):
        for i in range(m):
            gidx[i] = 0
        for j in range(N):
            _fill_uniform(s0, s1, s2, s3, u)
            for i in range(m):
                b = u[i] < xi[j, i]
                bits[j, i] = b
                gidx[i] = 2 * gidx[i] + b
        _fill_uniform(s0, s1, s2, s3, u)
        for i in range(m):
            sidx[i] = 0
        for j in range(S - 1):
            c = scum[j]
            for i in range(m):
                sidx[i] += u[i] >= c
        for i in range(m):
            ok[i] = parse[gidx[i], sidx[i]]
        for j in range(N):
            for i in range(m):
                x = xi[j, i]
                if ok[i] == bits[j, i]:
                    xi[j, i] = x + gamma * (1.0 - x)
                else:
                    xi[j, i] = one_minus * x
    return


def warmup():
    """Trigger jit compilation so timed runs exclude compile cost."""
    seeds = member_seeds(0, 2)
    states = init_states(seeds)
    a = np.array([[0.0, 0.1], [0.2, 0.0]])
    pi = np.full((2, 2), 0.5)
    lrp_ensemble_kernel(a, np.cumsum([0.5, 0.5]), 0.01, 8, states, pi)
    parse = np.array([[True, False], [False, True]])
    xi = np.full((1, 2), 0.5)
    npl_ensemble_kernel(parse, np.cumsum([0.6, 0.4]), 0.01, 8, states, xi)
