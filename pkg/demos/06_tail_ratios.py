"""Tail integral approximations behind the limit results.

Each check compares an integral of the form int g(level/r) r^beta dF(r) over
an extreme region with its first-order approximation. The Pareto check is
exact at every level. The others converge as the level grows (or as the
gap to the endpoint shrinks).
"""
from wpmix import beta_mixing, exponential_radial, pareto_radial, power_endpoint_radial, uniform_mixing
from wpmix.harness import lemma1a_ratio, lemma1b_ratio, lemma1c_checks

for u in (10.0, 100.0, 1000.0):
    print(f"pareto      u={u:<7g} ratio {lemma1a_ratio(pareto_radial(1.0, 2.0), uniform_mixing(), 1.0, 1.0, u):.12f}")
for u in (1e-1, 1e-2, 1e-3):
    r = lemma1b_ratio(power_endpoint_radial(2.0), beta_mixing(1.0, 1.5), 0.0, 1.0, 0.0, u)
    print(f"endpoint    u={u:<7g} ratio {r:.6f}")
for u in (10.0, 30.0, 50.0, 200.0):
    vanish, r = lemma1c_checks(exponential_radial(), beta_mixing(1.0, 1.5), 2.0, 2.0, 0.0, u)
    print(f"exponential u={u:<7g} vanish {vanish:.3e}  ratio {r:.6f}")
