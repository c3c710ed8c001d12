"""State-independent contextuality and three-particle GHZ under decay.

The magic-square value depends only on how much of the pair survives:
2 tr(rho_s) + 4, above the classical bound 4 as long as any weight remains.
For three kaons in a GHZ state the Mermin value starts at 5 and relaxes to the
classical bound 3 on the scale of the long-lived lifetime.
"""
import numpy as np

from dctx import KAON, evolve_joint, evolve_sectors
from dctx.inequalities import mermin3_decay, mp_decay_generic, mp_optimal_signs
from dctx.observables import magic_square
from dctx.scenarios import state

square = magic_square()
signs, coeff = mp_optimal_signs()
print("context parities (rows, columns):", square.parities())
print(f"best decayed-outcome coefficient: {coeff} with signs {signs}")

rng = np.random.default_rng(0)
v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
rho0 = np.outer(v, v.conj()) / np.vdot(v, v).real
print(f"\n{'t':>6} {'w_s':>8} {'I_MP':>8}")
for t in (0.0, 0.5, 1.0, 3.0, 10.0, 1000.0, 20000.0):
    js = evolve_joint(rho0, KAON, t)
    print(f"{t:6g} {js.surviving_weight:8.4f} {mp_decay_generic(square, signs, js).value:8.4f}")

print(f"\n{'t':>6} {'Mermin':>8}")
for t in (0.0, 1.0, 10.0, 600.0, 3000.0, 30000.0):
    st = evolve_sectors(state("ghz"), KAON, (t, t, t))
    print(f"{t:6g} {mermin3_decay(st).value:8.4f}")
