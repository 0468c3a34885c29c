"""Validate mittag_leffler against independent oracles over the contract
domain alpha in (0,1], z in [-50, 5].

Region A: mp Taylor oracle where its cost is feasible (moderate |z|).
Region B: beta=1, z<0: spectral integral of the complete-monotone
          representation (independent of both series and asymptotic).
Region C: alpha=1/2 closed form exp(z^2)*erfc(-z) over the full z range.
Region D: deep-z beta coverage via the exact recurrence
          E_{a,b}(z) = 1/Gamma(b) + z*E_{a,a+b}(z).
"""
import math
import pathlib
import sys
import time

import mpmath

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))
from subdiff.fraccalc import AccuracyError, mittag_leffler


def taylor_oracle(alpha, beta, z, dps):
    with mpmath.workdps(dps):
        am = mpmath.mpf(alpha)
        bm = mpmath.mpf(beta)
        zm = mpmath.mpf(z)
        total = mpmath.mpf(0)
        zk = mpmath.mpf(1)
        mx = mpmath.mpf(0)
        k = 0
        while k < 200000:
            total += zk / mpmath.gamma(am * k + bm)
            mag = abs(zk) / abs(mpmath.gamma(am * k + bm))
            if mag > mx:
                mx = mag
            if k > 3 and mag < mpmath.mpf(10) ** (-dps + 6) * max(mx, mpmath.mpf(1)):
                break
            zk *= zm
            k += 1
        return float(total)


def taylor_cost(alpha, beta, z):
    """(dps, n_terms) estimate for the mp Taylor oracle."""
    if z == 0.0:
        return 30, 4
    log_absz = math.log(abs(z))
    log_max = 0.0
    k = 1
    n_stop = None
    while k < 50_000_000:
        arg = alpha * k + beta
        lt = k * log_absz - (math.lgamma(arg) if arg > 0 else 0.0)
        if lt > log_max:
            log_max = lt
        if arg > 2.0 and lt < log_max - 260.0:
            n_stop = k
            break
        k += max(1, k // 16)
    if n_stop is None:
        return 10**9, 10**9
    return 40 + int(log_max / math.log(10.0)) + 15, n_stop


def spectral_oracle(alpha, x, dps=60):
    """E_alpha(-x) for x>0, 0<alpha<1, via the spectral density.
    Returns (value, ok) where ok means the quadrature's own error
    estimate is small enough to serve as an oracle."""
    with mpmath.workdps(dps):
        am = mpmath.mpf(alpha)
        xm = mpmath.mpf(x)
        X = xm ** (1 / am)
        s = mpmath.sinpi(am)
        c = mpmath.cospi(am)

        def f(u):
            r = u / X
            return (s / mpmath.pi) * r ** (am - 1) / (
                r ** (2 * am) + 2 * r**am * c + 1
            ) * mpmath.exp(-u) / X

        pts = [mpmath.mpf(0), mpmath.mpf(1), 5, 20, 80, 300, mpmath.inf]
        val, err = mpmath.quad(f, pts, error=True, maxdegree=10)
        ok = abs(err) <= mpmath.mpf(10) ** (-13) * max(abs(val), mpmath.mpf(1e-300))
        return float(val), bool(ok)


t0 = time.time()
worst = [0.0, None]
n_checked = 0
n_acc = 0

# ---- region A ----
alphas = [0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.55, 0.6, 0.7, 0.75, 0.8, 0.9, 0.95, 1.0]
zs_a = [-12.0, -10.0, -8.0, -7.0, -6.0, -5.5, -5.001, -5.0, -4.999, -4.5,
        -4.0, -3.0, -2.0, -1.0, -0.5, -0.1, -0.01, 0.001, 0.1, 0.5,
        1.0, 2.0, 3.0, 4.0, 5.0]
for a in alphas:
    for zv in zs_a:
        dps, nterms = taylor_cost(a, 1.0, zv)
        if dps > 350 or nterms > 25000:
            continue
        try:
            got = mittag_leffler(a, 1.0, zv)
        except AccuracyError:
            n_acc += 1
            continue
        ref = taylor_oracle(a, 1.0, zv, dps)
        rel = abs(got - ref) / max(abs(ref), 1e-300)
        n_checked += 1
        if rel > worst[0]:
            worst = [rel, ("A", a, zv)]
print(f"region A: {n_checked} checked, worst {worst[0]:.3e} at {worst[1]}"
      f"  [{time.time()-t0:.0f}s]")

# ---- region B ----
nb = 0
nb_skip = 0
wb = [0.0, None]
zs_b = [-50.0, -45.0, -40.0, -35.0, -30.0, -25.0, -20.0, -16.0, -12.0,
        -9.0, -7.0, -5.0, -3.0, -1.5, -1.0]
for a in alphas:
    if a >= 1.0:
        continue
    for zv in zs_b:
        try:
            got = mittag_leffler(a, 1.0, zv)
        except AccuracyError:
            n_acc += 1
            continue
        ref, ok = spectral_oracle(a, -zv)
        if not ok:
            nb_skip += 1
            continue
        rel = abs(got - ref) / max(abs(ref), 1e-300)
        nb += 1
        if rel > wb[0]:
            wb = [rel, ("B", a, zv)]
        if rel > worst[0]:
            worst = [rel, ("B", a, zv)]
print(f"region B: {nb} checked ({nb_skip} quad-skipped), worst {wb[0]:.3e} at {wb[1]}"
      f"  [{time.time()-t0:.0f}s]")

# ---- region C ----
nc = 0
wc = [0.0, None]
for zv in [-50.0, -37.5, -25.0, -18.0, -12.0, -8.0, -5.001, -5.0, -4.999,
           -3.0, -1.0, -0.25, -0.02]:
    got = mittag_leffler(0.5, 1.0, zv)
    with mpmath.workdps(60):
        ref = float(mpmath.exp(mpmath.mpf(zv) ** 2) * mpmath.erfc(-mpmath.mpf(zv)))
    rel = abs(got - ref) / max(abs(ref), 1e-300)
    nc += 1
    if rel > wc[0]:
        wc = [rel, ("C", 0.5, zv)]
    if rel > worst[0]:
        worst = [rel, ("C", 0.5, zv)]
print(f"region C: {nc} checked, worst {wc[0]:.3e} at {wc[1]}"
      f"  [{time.time()-t0:.0f}s]")

# ---- region D ----
nd = 0
wd = [0.0, None]
for a in [0.25, 0.5, 0.6, 0.75, 0.9]:
    for b in [0.5, 1.0, 2.0]:
        for zv in [-40.0, -25.0, -15.0, -8.0, -2.0, 1.5]:
            try:
                lhs = mittag_leffler(a, b, zv)
                rhs_tail = mittag_leffler(a, a + b, zv)
            except AccuracyError:
                n_acc += 1
                continue
            rhs = 1.0 / math.gamma(b) + zv * rhs_tail
            scale = max(abs(lhs), abs(zv * rhs_tail), 1.0)
            rel = abs(lhs - rhs) / scale
            nd += 1
            if rel > wd[0]:
                wd = [rel, ("D", a, b, zv)]
print(f"region D (recurrence): {nd} checked, worst {wd[0]:.3e} at {wd[1]}"
      f"  [{time.time()-t0:.0f}s]")

# ---- beta sweep on Taylor-feasible points ----
nb2 = 0
wb2 = [0.0, None]
for a in [0.25, 0.5, 0.75]:
    for b in [0.5, 1.0, a, 2.0, a + 1.0]:
        for zv in [-5.0, -1.0, -0.25, 0.5, 2.0]:
            dps, nterms = taylor_cost(a, b, zv)
            if dps > 350 or nterms > 25000:
                continue
            try:
                got = mittag_leffler(a, b, zv)
            except AccuracyError:
                n_acc += 1
                continue
            ref = taylor_oracle(a, b, zv, dps)
            rel = abs(got - ref) / max(abs(ref), 1e-300)
            nb2 += 1
            if rel > wb2[0]:
                wb2 = [rel, ("beta", a, b, zv)]
            if rel > worst[0]:
                worst = [rel, ("beta", a, b, zv)]
print(f"beta sweep: {nb2} checked, worst {wb2[0]:.3e} at {wb2[1]}"
      f"  [{time.time()-t0:.0f}s]")

print(f"\nTOTAL: worst oracle-backed rel err {worst[0]:.3e} at {worst[1]}, "
      f"{n_acc} AccuracyError")
