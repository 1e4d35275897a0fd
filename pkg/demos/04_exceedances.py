"""Joint behaviour of the I-block when the last coordinate is extreme.

We simulate until X_d exceeds its 1 - 1e-3 quantile u and rescale. The
excess of X_d becomes exponential (Gumbel regime) and the I-block turns into
a Kotz vector plus, for p = 1, a drift along A_IJ.
"""
import numpy as np

from wpmix import beta_mixing, exceedance_experiment, joint_limit_sample, kotz3_radial, ks_two_sample, make_model, substream

# a shifted exponential radius: its scaling function is constant
radial = kotz3_radial(1e10, 0.0, 1.0, 1.0)
model = make_model([1], 2, 1.0, radial, beta_mixing(1.0, 1.0), [[1.0, 0.5], [0.0, 1.0]])
exc = exceedance_experiment(model, 2_000_000, substream(3, "exc"))
part, E = joint_limit_sample(model, 100_000, substream(3, "limit"))
print(f"threshold u = {exc.level:.4f}, {exc.count} exceedances")
print("KS, I-block:", ks_two_sample(exc.part_I[:, 0], part[:, 0]))
print("KS, excess :", ks_two_sample(exc.part_J, E))
print("correlation of I-block and excess (limit has the drift 0.5 E):",
      np.corrcoef(exc.part_I[:, 0], exc.part_J)[0, 1])
