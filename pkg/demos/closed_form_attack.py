"""Recover a single training instance from two observed epochs, by hand.

With one instance the two epoch-0 equations are

    x * Z(x, y) = n/(2 eta) * (w0 - w1)   =: t_w
        Z(x, y) = n/(2 eta) * (b0 - b1)   =: t_b

where Z(x, y) = (tanh(w0*x + b0) - y) * (1 - tanh(w0*x + b0)^2).
Dividing them cancels Z entirely, so x = t_w / t_b, and y follows by
back-substitution.  No iteration, no search: two broadcast epochs give
away the datapoint.
"""

from traceinv import (
    Dataset,
    ParamTrace,
    ReconstructionProblem,
    TrainConfig,
    solve_n1,
    train,
)

secret = Dataset([0.6], [0.5])

# --- what an eavesdropper with a 3-decimal view can do ----------------------

observed = ParamTrace(eta=0.1, n=1, ws=[0.500, 0.489], bs=[0.500, 0.482])
res = solve_n1(ReconstructionProblem(observed))
x, y = res.recovered.xs[0], res.recovered.ys[0]
print("from 3-decimal parameter values:")
print(f"  t_w = 5*(0.500-0.489) = 0.055, t_b = 5*(0.500-0.482) = 0.090")
print(f"  x = 0.055/0.090 = {x:.4f}   (truth 0.6)")
print(f"  y = {y:.4f}                (truth 0.5)")

# --- and with the full-precision trace --------------------------------------

trace = train(secret, TrainConfig(eta=0.1, epochs=5))
res = solve_n1(ReconstructionProblem(trace))
x, y = (float(v) for v in (res.recovered.xs[0], res.recovered.ys[0]))
print("\nfrom the full-precision trace:")
print(f"  x = {x!r}   error {abs(x - 0.6):.2e}")
print(f"  y = {y!r}   error {abs(y - 0.5):.2e}")
print(f"  residual max-norm over all {trace.epochs - 1} transitions: "
      f"{res.residual_norm:.2e}")
assert res.converged
