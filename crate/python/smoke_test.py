"""Smoke test for the pyfibrank extension module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`.
"""

from math import gcd, lcm

import pyfibrank as fr


def naive_fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def scan_z(m):
    a, b, k = 1 % m, 1 % m, 1
    while a:
        a, b, k = b, (a + b) % m, k + 1
    return k


def main():
    assert fr.fib(10) == 55
    assert fr.fib(300) == naive_fib(300)
    assert fr.lucas(2) == 3

    assert fr.z_oracle(30) == 60 == scan_z(30)
    assert fr.z_oracle(10) == 15 == scan_z(10)
    try:
        fr.z_oracle(30, budget=10)
    except fr.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget not enforced")

    assert fr.vp_fib(2, 6) == (3, "n≡0 mod 6")
    assert fr.vp_lucas(2, 3) == (2, "n≡3 mod 6")
    assert fr.vp_fib(2, 3 * 2**100)[0] == 102

    assert fr.lcm_run(2, 4) == lcm(2, 3, 4, 5, 6)
    assert fr.lcm_seq_run("lucas", 3, 3) == 2772
    assert fr.corollary_plain_form(9) == 51480

    spec = fr.ProductSpec("fib", 1, 4)
    closed, general, oracle = spec.z_closed(), spec.z_general(), spec.z_oracle()
    assert closed.z == general.z == oracle.z == 60
    assert closed.residue_case == "n≡1 (mod 12)"
    assert closed.route == "closed_form" and oracle.route == "oracle"
    assert spec.product() == 30

    for family in ("fib", "lucas"):
        for n in range(1, 10):
            s = fr.ProductSpec(family, n, 5)
            r = s.z_general()
            assert r.z == r.base_a * r.multiplier_j * r.extra_c
            assert r.z == s.z_closed().z
            assert r.z > 10**6 or r.z == scan_z(s.product())

    try:
        fr.ProductSpec("fib", 1, 7).z_closed()
    except ValueError as e:
        assert "k = 7" in str(e)
    else:
        raise AssertionError("k = 7 accepted")

    assert gcd(fr.fib(12), fr.fib(18)) == fr.fib(6)
    print("pyfibrank smoke test: ok")


if __name__ == "__main__":
    main()
