# %% [markdown]
# # Dinkelbach iterations on a small ratio program
#
# Maximize p^H A p / p^H B p subject to p^H C p <= P. Each step solves a
# concave QCQP exactly; the trace shows the ratio climbing to the largest
# generalized eigenvalue of (A, B).

# %%
import numpy as np
import scipy.linalg as sla

from activeirs.qcqp import FPMatrices, dinkelbach, write_trace_csv

rng = np.random.default_rng(0)
r = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
fp = FPMatrices(r.conj().T @ r, m.conj().T @ m + np.eye(4), np.diag([1.0, 2.0, 3.0, 4.0]), 1.0)

p0 = np.full(4, 0.2, dtype=complex)
p, trace = dinkelbach(fp, p0, tol_inner=1e-10, max_iter=200)
print(write_trace_csv(trace[:8]))
print("final ratio       ", fp.ratio(p))
print("largest eigenvalue", sla.eigh(fp.a_mat, fp.b_mat, eigvals_only=True)[-1])
print("constraint        ", fp.constraint(p), "<=", fp.p_budget)
