"""Smoke test for the profinite_py extension.

Run from the workspace root after building:

    cargo build --release -p profinite-py
    cp target/release/libprofinite_py.so target/release/profinite_py.so
    PYTHONPATH=target/release python3 crates/python/python/smoke_test.py
"""

import cmath
import math

import profinite_py as pf


def main():
    t = pf.Tower("cyclotomic p=3 depth=2")
    assert t.orders == [2, 6], t.orders
    assert t.encode("2,5") == "101"
    assert t.decode("101") == [["2", "5"]]
    assert t.decode("10") == [["2", "2"], ["2", "5"]]
    assert t.blocks("2,5") == "b1:1|b2:101"
    assert t.decode_blocks("b1:1|b2:101") == ["2", "5"]
    assert t.is_inverse_system()
    assert abs(t.partition_function(math.log(2)) - 2.5) < 1e-10

    c5 = pf.Tower("cyclotomic p=5 depth=1")
    assert abs(c5.frobenius_correlation([2])) < 1e-10
    assert abs(c5.frobenius_correlation([11]) - 1) < 1e-10

    assert pf.cantor_distance("0110", "0100") == (1, 8)
    assert pf.hamming("0000", "1111") == 4

    value, delta = pf.path_integral_value("binary depth=1", [math.pi])
    assert abs(value) < 1e-12 and abs(delta - 1) < 1e-12
    w = [2.0 ** -k for k in range(1, 11)]
    value, _ = pf.path_integral_value("binary depth=10", w)
    product = 1
    for wk in w:
        product *= (1 + cmath.exp(1j * wk)) / 2
    assert abs(value - product) < 1e-12 * abs(product)
    mc, stderr = pf.path_integral_value("binary depth=10", w, samples=20000, seed=3)
    assert abs(mc - product) < 4 * stderr

    assert pf.automorphism_count("product cyclic 2 cyclic 2") == 6
    assert pf.automorphism_count("cyclic 8") == 4
    assert pf.group_order("gl2 2^3") == 1536

    status, body = pf.run_cli(["dist", "cantor", "0110", "0100"])
    assert status == 0 and "d = 1/8" in body

    try:
        pf.Tower("binary depth=13")
    except pf.ProfiniteError as e:
        assert str(e).startswith("SizeLimit"), e
    else:
        raise AssertionError("expected a size limit error")

    print("smoke test passed")


if __name__ == "__main__":
    main()
