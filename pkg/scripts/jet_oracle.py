"""Jet-space oracle for the wave-transport-divergence-curl identities.

Treats the state (rho, v, s) and its spatial derivatives up to third order
as free variables, substitutes every time derivative through the first-order
system, and forms the residual of each reformulated equation.  If the
formulation is a true consequence of the first-order system, every residual
is identically zero as a function on the jet space.

Two modes:

  * exact-point mode (default, used by the test suite): evaluates each
    residual at random rational jet points for concrete equations of state
    at 50-digit precision; any transcription error shows up at O(1).
  * --full: proves the identities symbolically with a general p(rho, s)
    (several minutes of sympy time).

Run:  python scripts/jet_oracle.py [--full]
"""

from __future__ import annotations

import sys

import sympy as sp

EPS = sp.LeviCivita


class JetSystem:
    """Derivation calculus on jets of (rho, v, s) with d_t substituted."""

    def __init__(self, p_expr=None):
        self.rho, self.s = sp.symbols("rho s")
        self.v = list(sp.symbols("v1:4"))
        self.drho = list(sp.symbols("drho1:4"))
        self.ds = list(sp.symbols("ds1:4"))
        self.dv = sp.Matrix(3, 3, sp.symbols("dv11:14 dv21:24 dv31:34"))
        self._d2 = {}
        self._d3 = {}

        if p_expr is None:
            self.p = sp.Function("p")(self.rho, self.s)
        else:
            self.p = p_expr(self.rho, self.s)
        self.p_rho = sp.diff(self.p, self.rho)
        self.p_s = sp.diff(self.p, self.s)
        self.p_srho = sp.diff(self.p, self.s, self.rho)
        self.p_ss = sp.diff(self.p, self.s, 2)
        self.c2 = sp.exp(-self.rho) * self.p_rho
        self.c = sp.sqrt(self.c2)
        self.c_rho = sp.diff(self.c, self.rho)
        self.c_s = sp.diff(self.c, self.s)

        self.div_v = sum(self.dv[a, a] for a in range(3))
        self.dt_rho = -self._vdot(self.drho) - self.div_v
        self.dt_v = [-self._vdot([self.dv[a, i] for a in range(3)])
                     - self.c2 * self.drho[i]
                     - sp.exp(-self.rho) * self.p_s * self.ds[i]
                     for i in range(3)]
        self.dt_s = -self._vdot(self.ds)
        self._spatial_map = None
        self._time_map = None

    def _vdot(self, comps):
        return sum(self.v[a] * comps[a] for a in range(3))

    def d2(self, name, a, b, i=None):
        key = (name, tuple(sorted((a, b))), i)
        if key not in self._d2:
            tag = f"{key[1][0] + 1}{key[1][1] + 1}"
            tag += "" if i is None else f"_{i + 1}"
            self._d2[key] = sp.Symbol(f"d2{name}{tag}")
        return self._d2[key]

    def d3(self, name, a, b, c, i=None):
        key = (name, tuple(sorted((a, b, c))), i)
        if key not in self._d3:
            tag = "".join(str(x + 1) for x in key[1])
            tag += "" if i is None else f"_{i + 1}"
            self._d3[key] = sp.Symbol(f"d3{name}{tag}")
        return self._d3[key]

    def _build_maps(self):
        spatial = {self.rho: list(self.drho), self.s: list(self.ds)}
        for i in range(3):
            spatial[self.v[i]] = [self.dv[a, i] for a in range(3)]
        for a in range(3):
            spatial[self.drho[a]] = [self.d2("rho", a, b) for b in range(3)]
            spatial[self.ds[a]] = [self.d2("s", a, b) for b in range(3)]
            for i in range(3):
                spatial[self.dv[a, i]] = [self.d2("v", a, b, i)
                                          for b in range(3)]
            for b in range(a, 3):
                spatial[self.d2("rho", a, b)] = [self.d3("rho", a, b, c)
                                                 for c in range(3)]
                spatial[self.d2("s", a, b)] = [self.d3("s", a, b, c)
                                               for c in range(3)]
                for i in range(3):
                    spatial[self.d2("v", a, b, i)] = [self.d3("v", a, b, c, i)
                                                      for c in range(3)]
        self._spatial_map = spatial

        time = {self.rho: self.dt_rho, self.s: self.dt_s}
        for i in range(3):
            time[self.v[i]] = self.dt_v[i]
        for a in range(3):
            time[self.drho[a]] = self.d_spatial(self.dt_rho, a)
            time[self.ds[a]] = self.d_spatial(self.dt_s, a)
            for i in range(3):
                time[self.dv[a, i]] = self.d_spatial(self.dt_v[i], a)
        for a in range(3):
            for b in range(a, 3):
                time[self.d2("rho", a, b)] = self.d_spatial(
                    self.d_spatial(self.dt_rho, b), a)
                time[self.d2("s", a, b)] = self.d_spatial(
                    self.d_spatial(self.dt_s, b), a)
                for i in range(3):
                    time[self.d2("v", a, b, i)] = self.d_spatial(
                        self.d_spatial(self.dt_v[i], b), a)
        self._time_map = time

    def d_spatial(self, expr, a):
        if self._spatial_map is None:
            self._build_maps()
        out = sp.Integer(0)
        for sym in expr.free_symbols:
            table = self._spatial_map.get(sym)
            if table is not None:
                out += sp.diff(expr, sym) * table[a]
        return out

    def d_time(self, expr):
        if self._time_map is None:
            self._build_maps()
        out = sp.Integer(0)
        for sym in expr.free_symbols:
            sub = self._time_map.get(sym)
            if sub is not None:
                out += sp.diff(expr, sym) * sub
        return out

    def material(self, expr):
        return self.d_time(expr) + sum(self.v[a] * self.d_spatial(expr, a)
                                       for a in range(3))

    def jet_symbols(self):
        if self._spatial_map is None:
            self._build_maps()
        syms = {self.rho, self.s, *self.v, *self.drho, *self.ds,
                *[self.dv[a, i] for a in range(3) for i in range(3)]}
        syms.update(self._d2.values())
        syms.update(self._d3.values())
        return syms


def residual_expressions(jets: JetSystem) -> dict:
    """Residual (LHS - RHS) of each equation, first vector component."""
    j = jets
    rho, s, v = j.rho, j.s, j.v
    drho, ds, dv = j.drho, j.ds, j.dv
    c, c2, c_rho, c_s = j.c, j.c2, j.c_rho, j.c_s
    p_s, p_srho, p_ss = j.p_s, j.p_srho, j.p_ss
    div_v = j.div_v

    S = list(ds)
    omega = [sp.exp(-rho) * sum(EPS(i, a, b) * dv[a, b]
                                for a in range(3) for b in range(3))
             for i in range(3)]
    dOmega = [[j.d_spatial(omega[k], b) for k in range(3)] for b in range(3)]
    curl_omega = [sum(EPS(i, a, b) * dOmega[a][b]
                      for a in range(3) for b in range(3)) for i in range(3)]
    adv_S_v = [sum(S[a] * dv[a, i] for a in range(3)) for i in range(3)]
    C = [sp.exp(-rho) * curl_omega[i]
         + sp.exp(-3 * rho) / c2 * p_s * (adv_S_v[i] - div_v * S[i])
         for i in range(3)]
    div_S = sum(j.d2("s", a, a) for a in range(3))
    D = sp.exp(-2 * rho) * (div_S - sum(S[a] * drho[a] for a in range(3)))

    b_rho = j.material(rho)
    b_s = j.material(s)
    b_v = [j.material(v[i]) for i in range(3)]
    b_S = [j.material(S[i]) for i in range(3)]
    S_grad_rho = sum(S[a] * drho[a] for a in range(3))

    def qg(b_f, grad_f, b_g, grad_g):
        return -b_f * b_g + c2 * sum(grad_f[a] * grad_g[a] for a in range(3))

    def box(b_phi, grad_phi, lap_phi):
        return (-j.material(b_phi) + c2 * lap_phi
                + 2 * (c_rho / c) * b_rho * b_phi
                - div_v * b_phi
                - (c_rho / c) * qg(b_rho, drho, b_phi, grad_phi)
                - c * c_s * sum(S[a] * grad_phi[a] for a in range(3))
                + 3 * (c_s / c) * b_s * b_phi)

    res = {}

    lap_rho = sum(j.d2("rho", a, a) for a in range(3))
    q_rho = (-3 * (c_rho / c) * qg(b_rho, drho, b_rho, drho) + div_v ** 2
             - sum(dv[a, b] * dv[b, a] for a in range(3) for b in range(3)))
    l_rho = (-sp.Rational(5, 2) * sp.exp(-rho) * p_srho * S_grad_rho
             - sp.exp(-rho) * p_ss * sum(Si ** 2 for Si in S))
    res["wave_rho"] = box(b_rho, drho, lap_rho) \
        - (-sp.exp(rho) * p_s * D + q_rho + l_rho)

    i = 0
    grad_v1 = [dv[a, 0] for a in range(3)]
    lap_v1 = sum(j.d2("v", a, a, 0) for a in range(3))
    q_v1 = -(1 + c_rho / c) * qg(b_rho, drho, b_v[0], grad_v1)
    l_v1 = (2 * sp.exp(rho) * sum(EPS(0, a, b) * b_v[a] * omega[b]
                                  for a in range(3) for b in range(3))
            - p_s * sum(EPS(0, a, b) * omega[a] * S[b]
                        for a in range(3) for b in range(3))
            - sp.Rational(1, 2) * sp.exp(-rho) * p_srho * adv_S_v[0]
            - 2 * sp.exp(-rho) * (c_rho / c) * p_s * b_rho * S[0]
            + sp.exp(-rho) * p_srho * b_rho * S[0])
    res["wave_v"] = box(b_v[0], grad_v1, lap_v1) \
        - (-c2 * sp.exp(2 * rho) * C[0] + q_v1 + l_v1)

    l_omega = (sum(omega[a] * dv[a, 0] for a in range(3))
               - sp.exp(-2 * rho) / c2 * p_s
               * sum(EPS(0, a, b) * b_v[a] * S[b]
                     for a in range(3) for b in range(3)))
    res["transport_omega"] = j.material(omega[0]) - l_omega

    res["transport_s"] = b_s

    l_S = (-adv_S_v[0] + sp.exp(rho) * sum(EPS(0, a, b) * omega[a] * S[b]
                                           for a in range(3) for b in range(3)))
    res["transport_grad_ent"] = b_S[0] - l_S

    res["div_omega"] = sum(j.d_spatial(omega[a], a) for a in range(3)) \
        + sum(omega[a] * drho[a] for a in range(3))

    pref = sp.exp(-3 * rho) / c2 * p_s
    x1 = (-2 * sp.exp(-rho) * sum(EPS(i, a, b) * dv[a, k] * dOmega[b][k]
                                  for a in range(3) for b in range(3)
                                  for k in range(3))
          + sp.exp(-rho) * sum(curl_omega[a] * dv[a, i] for a in range(3)))
    x2 = pref * (sum(b_S[a] * dv[a, i] for a in range(3)) - b_v[i] * div_S)
    x3 = pref * (sum(b_v[a] * j.d2("s", a, i) for a in range(3))
                 - div_v * b_S[i])
    bv_grad_rho = sum(b_v[a] * drho[a] for a in range(3))
    q_c = (pref * S[i] * (sum(dv[a, b] * dv[b, a]
                              for a in range(3) for b in range(3)) - div_v ** 2)
           + pref * (div_v * adv_S_v[i]
                     - sum(adv_S_v[b] * dv[b, i] for b in range(3)))
           + 2 * pref * (S_grad_rho * b_v[i] - b_rho * adv_S_v[i])
           + 2 * pref * (c_rho / c) * (S_grad_rho * b_v[i]
                                       - b_rho * adv_S_v[i])
           + sp.exp(-3 * rho) / c2 * p_srho * (b_rho * adv_S_v[i]
                                               - S_grad_rho * b_v[i])
           + sp.exp(-3 * rho) / c2 * p_srho * S[i] * (bv_grad_rho
                                                      - div_v * b_rho)
           + 2 * pref * S[i] * (div_v * b_rho - bv_grad_rho)
           + 2 * pref * (c_rho / c) * S[i] * (div_v * b_rho - bv_grad_rho))
    s_dot_s = sum(Si ** 2 for Si in S)
    s_dot_bv = sum(S[a] * b_v[a] for a in range(3))
    l_c = (2 * sp.exp(-3 * rho) * (c_s / c ** 3) * p_s
           * (b_v[i] * s_dot_s - s_dot_bv * S[i])
           - sp.exp(-3 * rho) / c2 * p_ss
           * (b_v[i] * s_dot_s - s_dot_bv * S[i]))
    res["transport_curl_mod"] = j.material(C[0]) - (x1 + x2 + x3 + q_c + l_c)

    dS = [[j.d2("s", a, k) for k in range(3)] for a in range(3)]
    q_d = 2 * sp.exp(-2 * rho) * (sum(adv_S_v[b] * drho[b] for b in range(3))
                                  - div_v * S_grad_rho)
    rhs_d = (2 * sp.exp(-2 * rho)
             * (div_v * div_S
                - sum(dv[a, b] * dS[b][a] for a in range(3) for b in range(3)))
             + sp.exp(-rho) * sum(curl_omega[a] * S[a] for a in range(3))
             + q_d)
    res["transport_div_mod"] = j.material(D) - rhs_d

    res["curl_grad_ent"] = sum(EPS(0, a, b) * dS[a][b]
                               for a in range(3) for b in range(3))
    return res


POLYTROPIC_P = (lambda rho, s:
                sp.exp(sp.Rational(7, 5) * rho + sp.Rational(9, 10) * s)
                / sp.Rational(7, 5))
CHAPLYGIN_P = (lambda rho, s:
               sp.Rational(1, 3) - sp.Rational(6, 5) * sp.exp(-rho))


def exact_point_check(p_expr, seed: int = 0, digits: int = 50) -> dict:
    """Residuals evaluated at a random rational jet point, 50-digit precision."""
    import random

    rnd = random.Random(seed)
    jets = JetSystem(p_expr)
    res = residual_expressions(jets)
    subs = {sym: sp.Rational(rnd.randint(-40, 40), 100)
            for sym in jets.jet_symbols()}
    return {name: abs(expr.evalf(digits, subs=subs)) for name, expr in res.items()}


def full_symbolic_check() -> dict:
    jets = JetSystem()
    res = residual_expressions(jets)
    return {name: sp.simplify(sp.expand(expr)) for name, expr in res.items()}


def main(argv) -> int:
    failed = False
    if "--full" in argv:
        for name, value in full_symbolic_check().items():
            ok = value == 0
            failed |= not ok
            print(f"{name}: {'OK' if ok else value}")
    else:
        for tag, p_expr in (("polytropic", POLYTROPIC_P),
                            ("chaplygin", CHAPLYGIN_P)):
            for name, value in exact_point_check(p_expr).items():
                ok = value < sp.Float(1e-30)
                failed |= not ok
                print(f"{tag}/{name}: {'OK' if ok else value}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
