"""How the conditional radius settles to its limit in each tail regime.

Gumbel-domain radii give a Gamma-type (Kotz) limit after scaling by
h = (tau^(1-p) w(tau))^(1/p). Radii with a power tail at a finite endpoint
give a Beta-type limit. Pareto radii keep a non-degenerate conditional
law, which is itself the limit after scaling by a_n.
"""
from wpmix import beta_mixing, exponential_radial, make_model, pareto_radial, power_endpoint_radial, uniform_mixing
from wpmix.harness import convergence_sweep
from wpmix.limits import (
    frechet_limit,
    frechet_sequence,
    gumbel_sequence,
    kotz_limit,
    weibull_limit,
    weibull_sequence,
)

exp = exponential_radial()
gumbel = convergence_sweep(make_model([1], 2, 2.0, exp, beta_mixing(1.0, 1.5)), [5, 10, 20, 40, 80],
                           kotz_limit(1.5, 2.0), gumbel_sequence(exp, 2.0))
weib = convergence_sweep(make_model([1], 2, 2.0, power_endpoint_radial(2.0), beta_mixing(1.0, 1.5)),
                         [1e-1, 1e-2, 1e-3], weibull_limit(1.5, 2.0, 2.0), weibull_sequence(2.0))
frech = convergence_sweep(make_model([1], 2, 1.0, pareto_radial(1.0, 1.0), uniform_mixing()),
                          [1e-1, 1e-3], frechet_limit(1.0, 1.0, uniform_mixing(), 1.0), frechet_sequence(1.0, 1.0))

for name, rows in (("gumbel", gumbel), ("weibull", weib), ("frechet", frech)):
    print(name)
    for r in rows:
        print(f"  level {r.level:<8g} tau {r.tau:<10.6g} scale {r.scale:<10.4g} sup-gap {r.sup_gap:.2e}")
