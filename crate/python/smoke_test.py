"""Smoke test for the Python bindings.

Build the module first:

    cargo build --release -p hcurl-ife-py --features extension-module
    cp target/release/libhcurl_ife_py.so python/hcurl_ife_py.so

then run ``python3 python/smoke_test.py``.
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import hcurl_ife_py as ife

CONFIG = """
mesh.sizes = 8, 16, 32
coeff.mu_plus = 0.1
coeff.beta_plus = 10
"""


def main():
    assert set(ife.SCHEMES) == {"pg", "pp", "c"}, ife.SCHEMES

    levels = ife.study(CONFIG, "pg")
    assert [l.n for l in levels] == [8, 16, 32]
    r = ife.rates([l.h for l in levels], [l.e0 for l in levels])
    print("pg e0:", ", ".join(f"{l.e0:.3e}" for l in levels), "rates:", ", ".join(f"{x:.3f}" for x in r))
    assert all(0.7 < x < 1.3 for x in r), r

    csv = ife.study_csv(CONFIG, "pg").splitlines()
    assert csv[0].startswith("N,h,dofs,e0,e0_rate")
    assert len(csv) == 4
    assert math.isclose(float(csv[3].split(",")[3]), levels[2].e0, rel_tol=1e-9)

    interp = ife.interpolation(CONFIG)
    assert all(a.e0 <= b.e0 * 1.5 for a, b in zip(interp, levels))

    passed, report = ife.diagnose("diagnose.n = 8\ndiagnose.random_elements = 100\n")
    assert passed, report

    for bad in ("mesh.sizes = 0", "scheme = nope"):
        try:
            ife.study(bad)
        except ValueError:
            pass
        else:
            raise AssertionError(f"accepted {bad!r}")

    print("smoke test OK")


if __name__ == "__main__":
    main()
