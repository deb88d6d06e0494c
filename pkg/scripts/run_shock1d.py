"""Simple-wave steepening study: polytropic blowup vs Chaplygin degeneracy.

Writes the mu*/gradient time series and profile snapshots for both models
under out/shock1d-<eos>/ and prints the measured blowup diagnostics.
"""

import sys

from eulerwave import cli, polytropic
from eulerwave import shock1d as sh


def main() -> int:
    status = 0
    for name in ("polytropic", "chaplygin"):
        code = cli.main(["shock1d", "--eos", name, "--out",
                         f"out/shock1d-{name}"])
        print(f"{name}: exit {code}")
        status = max(status, code)

    rmap = sh.build_riemann_map(polytropic(1.4), s_const=0.0)
    fan = sh.build_fan(rmap, sh.sinusoidal_profile(0.5))
    est = sh.pde_blowup_estimate(fan, n=1024)
    print(f"characteristic-crossing T* = {sh.crossing_time_bruteforce(fan):.5f}")
    print(f"lam'-based T*             = {fan.valid_until:.5f}")
    print(f"1D finite-difference T*   = {est['t_star']:.5f}")
    return status


if __name__ == "__main__":
    sys.exit(main())
