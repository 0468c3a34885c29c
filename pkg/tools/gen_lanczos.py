"""Generate Lanczos-form gamma coefficients by high-precision least
squares: Gamma(x) ~= sqrt(2*pi) * t**(x-0.5) * exp(-t) * A(x),
t = x + g - 0.5, A(x) = c0 + sum_i c_i/(x - 1 + i).

Fit A over x in [0.5, 180], measure double-evaluation max rel error.
"""
import math
import mpmath

mpmath.mp.dps = 90


def target_A(x, g):
    t = x + g - mpmath.mpf(1) / 2
    return mpmath.gamma(x) / (
        mpmath.sqrt(2 * mpmath.pi) * t ** (x - mpmath.mpf(1) / 2) * mpmath.exp(-t)
    )


def fit(g, n_terms, nodes):
    rows = []
    rhs = []
    for x in nodes:
        xm = mpmath.mpf(x)
        row = [mpmath.mpf(1)] + [1 / (xm - 1 + i) for i in range(1, n_terms + 1)]
        rows.append(row)
        rhs.append(target_A(xm, g))
    A = mpmath.matrix(rows)
    b = mpmath.matrix(rhs)
    At = A.T
    M = At * A
    v = At * b
    c = mpmath.lu_solve(M, v)
    return [float(ci) for ci in c]


def eval_double(x, g, coef):
    t = x + g - 0.5
    acc = coef[0]
    for i in range(1, len(coef)):
        acc += coef[i] / (x - 1.0 + i)
    half = t ** (0.5 * x - 0.25)
    return math.sqrt(2 * math.pi) * half * (math.exp(-t) * half) * acc


def max_rel_err(g, coef, lo=0.5, hi=171.6, n=4000):
    worst = 0.0
    wx = None
    for k in range(n + 1):
        x = lo + (hi - lo) * k / n
        got = eval_double(x, g, coef)
        ref = mpmath.gamma(x)
        rel = float(abs((mpmath.mpf(got) - ref) / ref))
        if rel > worst:
            worst = rel
            wx = x
    return worst, wx


# nodes: dense at the small end plus coverage out to beyond 172
nodes = [0.5 + 0.02 * k for k in range(100)]          # 0.5 .. 2.48
nodes += [2.5 + 0.1 * k for k in range(76)]           # 2.5 .. 10
nodes += [10.0 + 1.0 * k for k in range(61)]          # 10 .. 70
nodes += [70.0 + 2.0 * k for k in range(56)]          # 70 .. 180

for g, n_terms in [(7.0, 9), (8.0, 12), (9.0, 13), (10.900511, 12)]:
    coef = fit(g, n_terms, nodes)
    worst, wx = max_rel_err(g, coef)
    print(f"g={g} n={n_terms}: max rel err {worst:.3e} at x={wx:.2f}")
    if worst < 3e-14:
        print("  coefficients:")
        for ci in coef:
            print(f"    {ci!r},")
