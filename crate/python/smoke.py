"""Smoke test for the `lowosc` Python extension.

Run after `cargo build -p lowosc-py` (or `--release`):

    python3 python/smoke.py

The script loads the shared library from target/ under the module name
`lowosc`, unless `lowosc` is already importable (e.g. installed by maturin).
"""

import importlib.machinery
import importlib.util
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        import lowosc  # noqa: F401

        return sys.modules["lowosc"]
    except ImportError:
        pass
    for profile in ("release", "debug"):
        for name in ("liblowosc.so", "liblowosc.dylib", "lowosc.dll"):
            lib = ROOT / "target" / profile / name
            if lib.exists():
                loader = importlib.machinery.ExtensionFileLoader("lowosc", str(lib))
                spec = importlib.util.spec_from_file_location("lowosc", lib, loader=loader)
                mod = importlib.util.module_from_spec(spec)
                loader.exec_module(mod)
                return mod
    sys.exit("lowosc extension not found; run `cargo build -p lowosc-py` first")


def main():
    lo = load()

    # Endpoints are exact; interior brackets are narrow and nested.
    assert lo.eval_1d("1", "1/8") == ("1/1", "1/1", False)
    a = [Fraction(v) for v in lo.eval_1d("1/3", "1/1024")[:2]]
    b = [Fraction(v) for v in lo.eval_1d("1/3", "1/1048576")[:2]]
    assert a[0] <= b[0] <= b[1] <= a[1] and b[1] - b[0] <= Fraction(1, 1 << 20)

    # On the boundary of the square the m-D function is x_1.
    assert lo.eval_md(["1/3", "0"], "1/1024")[:2] == ("1/3", "1/3")

    rep = json.loads(lo.level_set_1d("1/3", 3))
    assert rep["cumulative_counts"] == [2, 4, 6]

    cert = json.loads(lo.find_level_point("1/2", 5))
    links = cert["certificate"]["links"]
    assert len(links) == 5 and all(l["inner_ok"] and l["outer_ok"] for l in links)

    assert lo.density("1/2", 2) == ("1/2", True)
    assert lo.vertex_constant() == "8/3"
    assert lo.cantor_eval("1/3") == ("1/2", "1/2", False)
    assert abs(lo.sine_g(2 / math.pi) - 2 / math.pi) < 1e-15
    assert lo.sine_f(2 / math.pi, 0.5) == 0.0

    try:
        lo.eval_1d("3/2", "1/8")
    except ValueError as e:
        assert "outside" in str(e)
    else:
        raise AssertionError("domain error not raised")

    print("python smoke: ok")


if __name__ == "__main__":
    main()
