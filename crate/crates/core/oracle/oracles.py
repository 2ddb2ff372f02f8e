"""Independent reference sweeps that produce the committed test fixtures.

Run from the crate root:

    python3 oracle/oracles.py > tests/fixtures/oracle_fixtures.json

Everything here is written against numpy/scipy/mpmath only; nothing is
shared with the Rust implementation beyond the definitions themselves.
"""

import json
import math
import sys

import mpmath
import numpy as np
from scipy.spatial import cKDTree

LN2 = math.log(2.0)
SEED = 20240611
LATTICE = 64


def frac_sqrt(p):
    return math.sqrt(p) % 1.0


def beta_hat(beta):
    return 2.0 * math.pi * beta * LN2


# --- scalar maps ---------------------------------------------------------


def linear(c=1.0):
    return lambda t: c * t


def sinlog(alpha, beta):
    def f(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = t[pos] + alpha * t[pos] * np.sin(beta * np.log(t[pos]))
        return out

    return f


def sinlog_mp(alpha, beta):
    a, b = mpmath.mpf(alpha), mpmath.mpf(beta)
    return lambda t: t + a * t * mpmath.sin(b * mpmath.log(t)) if t > 0 else mpmath.mpf(0)


# --- Omega and the quasi-norm ------------------------------------------------


def omega(phi, x):
    x = np.asarray(x, dtype=complex)
    n = np.linalg.norm(x)
    if n == 0:
        return np.zeros_like(x)
    m = np.abs(x)
    arg = np.zeros_like(m)
    keep = m / n >= 1e-300
    arg[keep] = np.maximum(np.log(n / m[keep]), 0.0)
    out = x * phi(arg)
    out[~keep] = 0
    return out


def quasinorm(phi, y, x):
    return np.linalg.norm(y - omega(phi, x)) + np.linalg.norm(x)


def pad(a, d):
    out = np.zeros(d, dtype=complex)
    out[: len(a)] = a
    return out


class Sampler:
    def __init__(self, rng, max_dim, spread=6.0, complex_=True):
        self.rng, self.max_dim, self.spread, self.complex = rng, max_dim, spread, complex_

    def dim(self):
        return int(self.rng.integers(1, self.max_dim + 1))

    def entries(self, d):
        m = np.exp(-self.spread * self.rng.random(d))
        if self.complex:
            return m * np.exp(2j * math.pi * self.rng.random(d))
        return m * self.rng.choice([-1.0, 1.0], size=d)

    def vec(self):
        return self.entries(self.dim())


def b_ql(samples, max_dim):
    s = Sampler(np.random.default_rng(SEED), max_dim)
    phi = linear()
    worst = 0.0
    for _ in range(samples):
        x, y = s.vec(), s.vec()
        d = max(len(x), len(y))
        x, y = pad(x, d), pad(y, d)
        num = np.linalg.norm(omega(phi, x + y) - omega(phi, x) - omega(phi, y))
        worst = max(worst, num / (np.linalg.norm(x) + np.linalg.norm(y)))
    return worst


def triangle(samples, max_dim):
    s = Sampler(np.random.default_rng(SEED + 1), max_dim)
    phi = linear()
    worst = 0.0
    for _ in range(samples):
        d = s.dim()
        x1 = s.entries(d)
        if s.rng.random() < 0.5:
            x2 = s.entries(d)
        else:
            x2 = x1 + math.exp(-3.0 * s.rng.random()) * s.entries(d)

        def lift(x):
            k = s.rng.integers(0, 3)
            if k == 0:
                return np.zeros(d, dtype=complex)
            if k == 1:
                return omega(phi, x)
            return s.entries(d)

        y1, y2 = lift(x1), lift(x2)
        den = quasinorm(phi, y1, x1) + quasinorm(phi, y2, x2)
        if den > 0:
            worst = max(worst, quasinorm(phi, y1 + y2, x1 + x2) / den)
    return worst


def duality(samples, max_dim):
    s = Sampler(np.random.default_rng(SEED + 2), max_dim)
    phi = linear()
    neg = linear(-1.0)
    worst = 0.0
    for _ in range(samples):
        d = s.dim()
        a, b = s.entries(d), s.entries(d)
        d2 = s.dim()
        c, e = s.entries(d2), s.entries(d2)
        m = max(d, d2)
        a, b, c, e = pad(a, m), pad(b, m), pad(c, m), pad(e, m)
        pairing = abs(np.dot(b, c) + np.dot(a, e))
        den = quasinorm(phi, a, b) * quasinorm(neg, c, e)
        worst = max(worst, pairing / den)
    return worst


# --- Kronecker orbits ------------------------------------------------------


def exact_fracs(beta, k):
    """{j*beta} for j = 1..k, with beta taken as the exact binary value."""
    p, q = float(beta).as_integer_ratio()
    return np.array([((j * p) % q) / q for j in range(1, k + 1)])


def orbit(betas, k):
    return np.stack([exact_fracs(b, k) for b in betas], axis=1)


def covering_radius(betas, k):
    pts = orbit(betas, k)
    n = len(betas)
    tree = cKDTree(pts, boxsize=1.0 + 1e-12)
    axes = [np.arange(LATTICE) / LATTICE] * n
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    dist, _ = tree.query(grid)
    return float(dist.max())


def sign_scan(betas, signs, threshold, k_max):
    ok = np.ones(k_max, dtype=bool)
    for b, sgn in zip(betas, signs):
        ok &= sgn * np.sin(2.0 * math.pi * exact_fracs(b * LN2, k_max)) > threshold
    hits = np.nonzero(ok)[0]
    return int(hits[0]) + 1 if len(hits) else None


# --- class sweeps ------------------------------------------------------------


def bid_max(f_mp, lo=4, hi=40):
    mpmath.mp.dps = 40
    q = []
    for i in range(lo, hi + 1):
        l = mpmath.log(mpmath.mpf(2) ** i)
        h = l / 2
        q.append((f_mp(l) - f_mp(h)) / h)
    return float(max(abs(a - b) for a in q for b in q))


def uniform_defect_max(f_mp, k_max):
    mpmath.mp.dps = 40
    half = [mpmath.log(mpmath.mpf(2) ** k) / 2 for k in range(2 * k_max + 1)]
    vals = [f_mp(h) for h in half]
    return float(max(abs(vals[i] + vals[j] - vals[i + j]) for i in range(k_max + 1) for j in range(k_max + 1)))


def gram_min_sv(betas, alpha=0.1, lo=-20, hi=40, ppw=512):
    logs = np.concatenate(
        [np.linspace(k * LN2, (k + 1) * LN2, ppw, endpoint=(k == hi - 1)) for k in range(lo, hi)]
    )
    cols = []
    for b in betas:
        c = alpha * np.sin(beta_hat(b) * logs)
        cols.append(c / np.linalg.norm(c))
    return float(np.linalg.svd(np.stack(cols, axis=1), compute_uv=False).min())


# --- blocks and Orlicz norms -------------------------------------------------


def kp(t):
    m = np.abs(t)
    n = np.linalg.norm(m)
    u = m[m > 0] / n
    return n * math.sqrt(np.sum((u * np.log(u)) ** 2)) + n


def orlicz(s):
    s = s[s > 0]
    return np.sum(s * s * (1.0 + np.abs(np.log(s))) ** 2)


def luxemburg(t):
    m = np.abs(t)
    return float(
        mpmath.findroot(lambda r: orlicz(m / float(r)) - 1.0, (m.max(), kp(t) + m.sum()), solver="bisect", tol=1e-28)
    ) if orlicz(m / m.max()) > 1.0 else float(m.max())


def block_norm(phi, blocks, t):
    y, x = [], []
    for tn, v in zip(t, blocks):
        y.append(tn * omega(phi, v))
        x.append(tn * v)
    y, x = np.concatenate(y), np.concatenate(x)
    return quasinorm(phi, y, x)


def block_band(phi, instances, max_blocks, max_width, spread=4.0, seed=SEED + 3):
    s = Sampler(np.random.default_rng(seed), max_width, spread)
    block_r, lux_r = [], []
    for _ in range(instances):
        count = int(s.rng.integers(1, max_blocks + 1))
        blocks = []
        for _ in range(count):
            v = s.entries(s.dim())
            blocks.append(v / np.linalg.norm(v))
        t = pad(s.entries(int(s.rng.integers(1, count + 1))), count)
        f = kp(t)
        block_r.append(block_norm(phi, blocks, t) / f)
        lux_r.append(luxemburg(t) / f)
    return (min(block_r), max(block_r)), (min(lux_r), max(lux_r))


def embed_band(phi, samples, max_dim, seed=SEED + 4):
    s = Sampler(np.random.default_rng(seed), max_dim, 4.0)
    r = []
    for _ in range(samples):
        x = s.vec()
        r.append(quasinorm(phi, np.zeros_like(x), x) / kp(x))
    return min(r), max(r)


def widen(band, rel=0.05, floor=0.01):
    lo, hi = band
    pad_ = rel * (hi - lo) + floor
    return [lo - pad_, hi + pad_]


def main():
    example_beta = beta_hat(frac_sqrt(2))
    fixtures = {}

    bq = b_ql(40000, 256)
    fixtures["b_ql"] = {"oracle_max": bq, "bound": 1.25 * bq, "max_dim": 256}
    tc = triangle(40000, 128)
    fixtures["c_fix"] = {"oracle_max": tc, "bound": 1.1 * tc, "max_dim": 128}
    kd = {d: duality(20000, d) for d in (8, 64)}
    fixtures["k_dual"] = {"oracle_max_dim8": kd[8], "oracle_max_dim64": kd[64], "bound": 1.25 * max(kd.values())}

    e1 = covering_radius([frac_sqrt(2)], 100000)
    e2 = covering_radius([frac_sqrt(2), frac_sqrt(3)], 100000)
    e2_double = covering_radius([frac_sqrt(2), frac_sqrt(3)], 200000)
    r4 = covering_radius([frac_sqrt(2)], 10000)
    fixtures["kronecker"] = {
        "eps1_oracle": e1,
        "eps1": e1 * (1 + 1e-9),
        "eps2_oracle": e2,
        "eps2": e2 * (1 + 1e-9),
        "eps2_doubled_oracle": e2_double,
        "c_oracle": r4 * 10000 / 10,
        "c": r4 * 10000 / 10 * (1 + 1e-9),
        "first_hits": {
            "".join("+" if s > 0 else "-" for s in signs): sign_scan(
                [frac_sqrt(2), frac_sqrt(3), frac_sqrt(5)], signs, 0.5, 1000000
            )
            for signs in [(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]
        },
        "pair_hit": sign_scan([frac_sqrt(2), frac_sqrt(3)], (1, -1), 0.5, 100000),
    }

    bid = bid_max(sinlog_mp(0.1, example_beta))
    fixtures["bid"] = {
        "beta": example_beta,
        "oracle_max": bid,
        "floor": 0.01,
        "linear_oracle_max": bid_max(lambda t: t),
    }
    ud = uniform_defect_max(sinlog_mp(0.1, 1.0), 30)
    fixtures["uniform_defect"] = {"oracle_max": ud, "floor": 0.5 * ud, "k_max": 30}

    primes = [2, 3, 5, 7, 11]
    sv = gram_min_sv([frac_sqrt(p) for p in primes])
    fixtures["gram"] = {"primes": primes, "oracle_min_sv": sv, "min_sv_floor": 0.5 * sv}

    phi = sinlog(0.1, example_beta)
    b8, l8 = block_band(phi, 4000, 16, 8)
    b64, l64 = block_band(phi, 4000, 16, 64)
    lux_lo, lux_hi = min(l8[0], l64[0]), max(l8[1], l64[1])
    emb = embed_band(phi, 4000, 64)
    fixtures["blocks"] = {
        "phi": {"alpha": 0.1, "beta": example_beta},
        "block_w8_oracle": list(b8),
        "block_w64_oracle": list(b64),
        "block_w8": widen(b8),
        "block_w64": widen(b64),
        "luxemburg_oracle": [lux_lo, lux_hi],
        "luxemburg": widen((lux_lo, lux_hi)),
        "embed_oracle": list(emb),
        "embed": widen(emb),
    }

    json.dump(fixtures, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
