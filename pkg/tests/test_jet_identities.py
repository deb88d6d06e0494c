"""The formulation must hold identically on jets of the first-order system.

jet_oracle substitutes every time derivative through the first-order system
and evaluates each equation's residual at random rational jet points with
50-digit arithmetic: any wrong coefficient anywhere shows up at O(1).
(`python scripts/jet_oracle.py --full` upgrades this to a symbolic proof.)
"""

import pytest
import sympy as sp

import jet_oracle


@pytest.mark.parametrize("tag,p_expr", [
    ("polytropic", jet_oracle.POLYTROPIC_P),
    ("chaplygin", jet_oracle.CHAPLYGIN_P),
])
def test_identities_hold_on_random_jets(tag, p_expr):
    for seed in (0, 1):
        results = jet_oracle.exact_point_check(p_expr, seed=seed)
        assert set(results) == {
            "wave_rho", "wave_v", "transport_omega", "transport_s",
            "transport_grad_ent", "div_omega", "transport_curl_mod",
            "transport_div_mod", "curl_grad_ent"}
        for name, value in results.items():
            assert value < sp.Float(1e-30), (tag, name, value)


def test_oracle_detects_wrong_coefficient():
    # negative control: perturbing one coefficient must break an identity
    jets = jet_oracle.JetSystem(jet_oracle.POLYTROPIC_P)
    res = jet_oracle.residual_expressions(jets)
    broken = res["wave_rho"] + sp.exp(-jets.rho) * jets.p_srho \
        * sum(jets.ds[a] * jets.drho[a] for a in range(3)) / 2
    import random

    rnd = random.Random(3)
    subs = {sym: sp.Rational(rnd.randint(-40, 40), 100)
            for sym in jets.jet_symbols()}
    assert abs(broken.evalf(50, subs=subs)) > sp.Float(1e-6)
