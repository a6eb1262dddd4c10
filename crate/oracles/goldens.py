"""Independent high-precision evaluation of the frozen values in
crates/core/tests/golden.rs. Run with `python3 oracles/goldens.py`."""

from mpmath import mp, mpf, sqrt, log, e, findroot, ceil, floor

mp.dps = 50


def k_constants(d):
    s = sqrt(d)
    a = (24 * s) ** d
    q = 1 - mpf(2) ** (-d)
    k1 = 2 * d * a * log(16 * s) / q
    k2 = (a * (1 + 2 * mpf(4) ** d) / q) ** 2
    return k1, k2


def gamma_for_dimension(d):
    q = 1 - mpf(2) ** (-d)
    inner = q / ((8 * sqrt(d)) ** d * (1 + 2 * mpf(4) ** d))
    return inner ** (mpf(1) / d) / 3


def k2_internal(d, gamma):
    gd = gamma ** (-d)
    return max(gd * gd, 2 * gd * log(gd))


def feasibility_rhs(beta, c, d):
    _, k2 = k_constants(d)
    return beta ** c * (1 - beta ** (d - c)) / k2


def intersection_value(taus, beta, d, c):
    k1, _ = k_constants(d)
    s = sum(mpf(t) ** (-c) for t in taus)
    return d - k1 * s ** (mpf(d) / c) / (beta ** d * abs(log(beta)))


def bisect(f, lo, hi, iters=400):
    flo = f(lo)
    for _ in range(iters):
        mid = (lo + hi) / 2
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return (lo + hi) / 2


def show(name, value):
    print(f"{name:40s} {mp.nstr(value, 20)}")


for d in (1, 2, 3):
    k1, k2 = k_constants(d)
    show(f"K1 d={d}", k1)
    show(f"K2 d={d}", k2)
    g = gamma_for_dimension(d)
    show(f"gamma d={d}", g)
    show(f"K2 internal at gamma d={d}", k2_internal(d, g))

beta = mpf(1) / 4

# Equality in the feasibility condition, d=1, c=1/2, one set.
c = mpf(1) / 2
tau_eq = (1 / feasibility_rhs(beta, c, 1)) ** (1 / c)
show("tau at equality d=1 c=1/2", tau_eq)
show("bound at equality d=1 c=1/2", intersection_value([tau_eq], beta, 1, c))

# Two sets with tau = 1e8 at d=1: the value grows with c, so the best c is
# the largest feasible one.
taus = [mpf(10) ** 8, mpf(10) ** 8]
g = lambda c: feasibility_rhs(beta, c, 1) - sum(t ** (-c) for t in taus)
# The feasible exponents form an interval; locate its right end.
grid = [mpf(i) / 10000 for i in range(1, 10000)]
c_peak = max(grid, key=g)
c_star = bisect(g, c_peak, mpf(1) - mpf(10) ** -30)
show("best c, two sets tau=1e8 d=1", c_star)
show("best value, two sets tau=1e8 d=1", intersection_value(taus, beta, 1, c_star))
show("single set tau=1e8 d=1 value", intersection_value([mpf(10) ** 8], beta, 1, mpf("0.5")))

# Smallest tau with N(tau) >= 3 at d=2, beta=1/4.
_, k2d2 = k_constants(2)
raw = lambda t: beta ** 2 * abs(log(beta)) * t ** 2 / (e * k2d2 * log(t)) - 3
show("min tau with N >= 3, d=2", bisect(raw, mpf(10), mpf(10) ** 12))

# Feasibility boundary for one set at d=2, c=1, beta=1/4.
show("tau boundary d=2 c=1", 1 / feasibility_rhs(beta, mpf(1), 2))

# Scaffold pair at d=1, beta=1/4, c=1/2, alpha half the feasibility threshold.
_, k2d1 = k_constants(1)
k1d1, _ = k_constants(1)
alpha = ((1 - beta ** c) / k2d1) ** (1 / c) / 2
gam = gamma_for_dimension(1)
n_blocks = floor(gam / alpha)
factor = mpf(1) / 8 - 3 * gam * 9
log_m = n_blocks * abs(log(beta)) + log(factor)  # ceil is negligible at this size
show("scaffold alpha", alpha)
show("scaffold N", n_blocks)
show("scaffold log M / (N |log beta|)", log_m / (n_blocks * abs(log(beta))))
show("scaffold d - K1 alpha / |log beta|", 1 - k1d1 * alpha / abs(log(beta)))
show("corrected d - 9 K1 alpha / |log beta|", 1 - 9 * k1d1 * alpha / abs(log(beta)))

# Convex-gap bound on the carpet.
show("carpet convex-gap bound", 1 + log(2) / log(2 + sqrt(2)))
show("log 8 / log 3", log(8) / log(3))
