"""Smoke test for the pyfable extension: build with `maturin develop -m crates/py/Cargo.toml`."""

import math

import pyfable


def max_diff(a, b):
    return max(abs(x - y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def main():
    a = pyfable.generate("uniform_sparse", 3, s=2.0, seed=4)
    assert len(a) == 8 and all(len(r) == 8 for r in a)

    for method in ("fable", "sfable", "lsfable"):
        enc = pyfable.encode(a, method=method, delta=None if method == "lsfable" else 1e-2)
        assert enc.ancillas == 4
        assert math.isclose(enc.alpha, 1 / 8)
        sim = enc.simulate()
        dev = max_diff(sim, enc.approximation())
        assert dev < 1e-10, (method, dev)
        err = enc.error(a)
        block = pyfable.simulate_block(enc.qasm())
        scaled = [[x / enc.alpha for x in row] for row in block]
        assert max_diff(scaled, sim) < 1e-12
        print(f"{method:8s} gates={enc.gate_counts()['total']:4d} error={err:.3e} deviation={dev:.1e}")

    full = pyfable.fable_encode(a)
    assert full.error(a) < 1e-12

    acc = pyfable.rotations_for_accuracy(a, 1e-2, method="sfable")
    assert acc["reached"] and acc["epsilon"] < 1e-2
    assert pyfable.error_at_budget(a, acc["rotations"], method="sfable") == acc["epsilon"]

    assert pyfable.fwht([1.0, 0.0, 0.0, 0.0]) == [0.5, 0.5, 0.5, 0.5]
    assert [pyfable.gray_code(k) for k in range(4)] == [0, 1, 3, 2]
    assert math.isclose(pyfable.spectral_norm([[3.0, 0.0], [0.0, -4.0]]), 4.0, rel_tol=1e-8)

    try:
        pyfable.fable_encode([[2.0, 0.0], [0.0, 1.0]])
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range entry accepted")

    csv = pyfable.run_sweep(config="""
name = "smoke"
methods = ["fable", "sfable"]
n = [3]
s = [2.0]
samples = 1
[generator]
family = "uniform_sparse"
[mode]
kind = "budget"
""")
    assert csv.splitlines()[0].startswith("method,")
    print(f"sweep rows={len(csv.splitlines()) - 1}")
    print("pyfable", pyfable.__version__, "ok")


if __name__ == "__main__":
    main()
