"""High-precision oracles for branch start values and periods.

Independent of the package: arbitrary-precision tanh-sinh quadrature of the
period integral (mpmath) plus bisection in the energy.  Values printed here
are frozen into the test suite.

Run:  python3 tests/oracles/branch_values.py
"""

import mpmath as mp

mp.mp.dps = 40


def v(q):
    return mp.e ** q - q - 1


def ttilde(E):
    E = mp.mpf(E)
    qp = mp.findroot(lambda q: v(q) - E, mp.log(E + 2))
    qm = mp.findroot(lambda q: v(q) - E, -(E + 1))
    return mp.quad(lambda q: 1 / mp.sqrt(E - v(q)), [qm, 0, qp])


def branch_energy(alpha, j):
    target = 2 * mp.pi / (j * mp.sqrt(alpha))
    lo, hi = mp.mpf("1e-12"), mp.mpf(1)
    while ttilde(hi) < target:
        lo, hi = hi, hi * 2
    for _ in range(140):
        mid = (lo + hi) / 2
        if ttilde(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def w_hat(alpha, j):
    E = branch_energy(alpha, j)
    qm = mp.findroot(lambda q: v(q) - E, -(E + 1))
    return (1 - mp.e ** qm) / alpha


if __name__ == "__main__":
    for alpha, j in [(1.0, 1), (0.4, 2), (0.5, 1), (1.5, 1), (0.15, 1),
                     (0.15, 2), (0.15, 3), (0.35, 2)]:
        E = branch_energy(mp.mpf(str(alpha)), j)
        w = w_hat(mp.mpf(str(alpha)), j)
        print(f"alpha={alpha} j={j}  E={mp.nstr(E, 20)}  w_hat={mp.nstr(w, 20)}")
    print("Ttilde(0.19315...)=", mp.nstr(ttilde(mp.mpf("0.1931471805599453")), 20))
    print("T(1, 0.9) =", mp.nstr(ttilde(-mp.mpf("0.9") - mp.log(mp.mpf("0.1"))), 20))
