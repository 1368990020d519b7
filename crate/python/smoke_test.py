"""Smoke test for the inplace_poly_py extension module."""

import random

import inplace_poly_py as ip

Q = 97


def naive_mul(f, g, q=Q):
    h = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            h[i + j] = (h[i + j] + a * b) % q
    return h


def main():
    rng = random.Random(1)
    f = [rng.randrange(Q) for _ in range(40)]
    g = [rng.randrange(Q) for _ in range(33)]

    (h,), m = ip.cumulative_karatsuba(f, g)
    assert h == naive_mul(f, g)
    assert m.restored is True and m.extra_algebraic == 0, m

    (h,), m = ip.cumulative_fft_mul(f, g, q=469762049)
    assert h == naive_mul(f, g, 469762049)

    (low,), m = ip.lower_product(f[:32], g[:32])
    assert low == naive_mul(f[:32], g[:32])[:32]
    assert m.restored is None

    d = [rng.randrange(Q) for _ in range(10)]
    d[-1] = 1
    (quo, rem), _ = ip.divrem(f, d)
    back = naive_mul(quo, d)
    for i, c in enumerate(rem):
        back[i] = (back[i] + c) % Q
    assert back == f

    (vals,), _ = ip.mp_eval(f[:20], list(range(1, 21)))
    (coeffs,), _ = ip.interp(list(range(1, 21)), vals)
    assert coeffs == f[:20]

    a, b = ip.Poly([1, 2, 3]), ip.Poly.parse("97;4,5")
    assert (a * b).coeffs == naive_mul([1, 2, 3], [4, 5])
    assert str(ip.Poly([1, -1])) == "97;1,96"
    assert ip.Field(97).inv(5) * 5 % 97 == 1

    assert "x" in ip.emit("karatsuba2")
    code, out, _ = ip.cli(["mul", "--f", "1,2", "--g", "3,4", "--algo", "schoolbook"])
    assert code == 0 and out.startswith("97;3,10,8"), out

    try:
        ip.series_inv([0, 1])
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for a non-unit constant term")

    print("smoke test OK")


if __name__ == "__main__":
    main()
