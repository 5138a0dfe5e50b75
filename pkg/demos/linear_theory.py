"""Splitting errors for linear systems v' = (A + B) v.

The one-step Godunov error is half the commutator times dt^2, so the global
error is first order. Averaging the AB and BA orders cancels that term. With
one fast operator of size 1/eps the error grows like 1/eps until the fast
mode has time to decay.
"""
import numpy as np

from splitlab import linear

dts = [2.0**-k for k in range(5, 11)]
sys = linear.random_pair(np.random.default_rng(7))
for seq in linear.LinearSequence:
    errs = [linear.global_error(sys, 1.0, int(round(1 / h)), seq) for h in dts]
    print(f"{seq.value:>9}: observed order {linear.observed_order(dts, errs):.3f}")

for dt in (1e-2, 1e-3, 1e-4):
    measured, predicted = linear.commutator_local_error(linear.NILPOTENT_PAIR, dt)
    print(f"dt={dt:g}: measured/predicted local error {np.linalg.norm(measured) / np.linalg.norm(predicted):.5f}")

eps = np.array([1e-1, 1e-2, 1e-3])
short = linear.stiff_scaling(eps)
long = linear.stiff_scaling(eps, dt=1e-2, t_end=1.0)
print("\n   eps    eps*err (short)  eps*err (long)")
for e, a, b in zip(eps, short, long):
    print(f"{e:6g}   {e * a:14.4e}   {e * b:14.4e}")
