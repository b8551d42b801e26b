"""Reference values frozen into the unit tests, computed with mpmath.

Run: python3 tests/oracles/generate.py
"""
import math

import mpmath as mp

mp.mp.dps = 40


def trial_division_count(n):
    count = 0
    for k in range(2, n + 1):
        d = 2
        prime = True
        while d * d <= k:
            if k % d == 0:
                prime = False
                break
            d += 1
        count += prime
    return count


def primes_upto(n):
    s = bytearray([1]) * (n + 1)
    s[0] = s[1] = 0
    for i in range(2, int(n**0.5) + 1):
        if s[i]:
            s[i * i :: i] = bytearray(len(s[i * i :: i]))
    return [i for i in range(n + 1) if s[i]]


def main():
    print("pi(1e6) =", trial_division_count(10**6))
    print("threshold(1e8, 0.5) =", mp.nstr(mp.exp(mp.sqrt(mp.log(mp.mpf(10) ** 8))), 20))
    t = mp.mpf(100)
    theta = mp.im(mp.loggamma(mp.mpf(1) / 4 + 1j * t / 2)) - t / 2 * mp.log(mp.pi)
    print("theta(100) =", mp.nstr(theta, 20))
    for t in [0, 14.134725, 20, 35, 100, 1000, 12345.678, 1e5, 112345.678, 1e6, 1e7 + 0.5]:
        z = mp.zeta(mp.mpf(1) / 2 + 1j * mp.mpf(t))
        print(f"zeta(1/2 + i {t}) =", mp.nstr(mp.re(z), 17), mp.nstr(mp.im(z), 17))
    for s in [(2, 0), (0.75, 10), (1.5, -3), (0.5, 25), (0.8, 40), (3, 50)]:
        z = mp.zeta(mp.mpc(*s))
        print(f"zeta({s}) =", mp.nstr(mp.re(z), 17), mp.nstr(mp.im(z), 17))
    print("first zero =", mp.nstr(mp.zetazero(1).imag, 17))

    ps = primes_upto(10**6)
    v0 = math.fsum(1.0 / p for p in reversed(ps))
    v1 = math.fsum(math.log(p) / p for p in reversed(ps))
    print("mertens m=0 Q=1e6 =", repr(v0))
    print("mertens m=1 Q=1e6 =", repr(v1))
    ps5 = [p for p in ps if p <= 10**5]
    eta = 1 / math.log(1e5)
    print("cosine Q=1e5 =", repr(math.fsum(math.cos(eta * math.log(p)) / p for p in reversed(ps5))))

    # Variances s_j^2 of the increment polynomials at T = 1e8, K = 8.
    T, K = mp.mpf(10) ** 8, 8
    lt = mp.log(T)
    sigma0 = mp.mpf(1) / 2 + lt ** (mp.mpf(3) / (2 * K)) / lt
    bounds = [mp.exp(lt ** (mp.mpf(j) / K)) for j in range(K)]
    bounds[0] = mp.mpf(1)
    big = primes_upto(int(bounds[K - 1]) + 1)
    for j in range(K - 1):
        s = math.fsum(float(mp.mpf(p) ** (-2 * sigma0)) for p in big if bounds[j] < p <= bounds[j + 1]) / 2
        print(f"s_{j}^2 =", repr(s))


def smoothed(sigma, t, T, A):
    total = mp.mpc(0)
    for n in range(1, int(T) + 1):
        w = (1 - mp.mpf(n) / T) ** A
        if w == 0:
            continue
        total += w * mp.power(n, -(mp.mpf(sigma) + 1j * mp.mpf(t)))
    return total


def smoothed_values():
    mp.mp.dps = 20
    for sigma, t, T, A in [(0.5, 112345.678, 1e5, 2), (0.75, 112345.678, 1e5, 2), (2, 0, 1e5, 10), (0.5, 1000, 500, 3)]:
        d = smoothed(sigma, t, T, A)
        print(f"smoothed({sigma}, {t}, {T}, {A}) =", mp.nstr(mp.re(d), 15), mp.nstr(mp.im(d), 15))


if __name__ == "__main__":
    main()
    smoothed_values()
