"""Drawing W_p scale mixture vectors and checking how the blocks share the radius.

The I-block gets the radius share R*W and the J-block gets R*W_p, with
W^p + W_p^p = 1. So the p-th powers of the two block norms always add
up to R^p, whatever the mixing law.
"""
import numpy as np

from wpmix import beta_mixing, exponential_radial, lq_norm, make_model, sample_mixture, substream

model = make_model(I=[1, 2], d=4, p=1.5, radial=exponential_radial(), mixing=beta_mixing(2.0, 1.5),
                   q_I=2.0, q_J=3.0)
draw = sample_mixture(model, 100_000, substream(1, "demo"), return_parts=True)

S_I = draw.S[:, model.partition.I0]
S_J = draw.S[:, model.partition.J0]
recombined = lq_norm(S_I, 2.0) ** 1.5 + lq_norm(S_J, 3.0) ** 1.5
print("max relative deviation from R^p:", np.max(np.abs(recombined / draw.R**1.5 - 1.0)))

# a non-trivial linear map mixes the blocks but X = A S holds row by row
A = np.array([[1.0, 0.2, 0.0, 0.4], [0.0, 1.0, 0.0, 0.1], [0.0, 0.0, 2.0, 0.0], [0.0, 0.0, 0.3, 1.0]])
tilted = make_model([1, 2], 4, 1.5, exponential_radial(), beta_mixing(2.0, 1.5), A)
X = sample_mixture(tilted, 5, substream(1, "demo-tilted"))
print("first rows of X = A S:\n", np.round(X, 4))
