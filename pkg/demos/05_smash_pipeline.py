#!/usr/bin/env python3
"""The deformed symbolic pipeline through the smash product.

The deformed monad maps acquire Hopf-algebra dressing under bosonisation.
The commuting tilde generators absorb that dressing, the monad composition
reproduces the deformed quadratic equations (with the constant shift
i hbar (alpha + beta) in the translation model), and the projector algebra
goes through verbatim once a formal inverse of rho^2 is adjoined.
"""

import numpy as np

from ncadhm import (
    ADHMData, MoyalModel, SolveConfig, ToricModel, build_monad,
    monad_residual, solve, symbolic_projector_checks, tilde_subalgebra_check,
)

moyal = MoyalModel(0.25, 1.0, 1.0)
toric = ToricModel(0.25)

print("== the identity-free probe ==")
probe = monad_residual(build_monad(ADHMData.zero(1, moyal)), moyal)
print("tau.sigma with zero data:", probe.entries[0][0])
print("(the surviving constant shift is exactly i hbar (alpha + beta))")

print("\n== tilde generators commute inside the smash product ==")
for model in (moyal, toric):
    rep = tilde_subalgebra_check(model, k=1)
    print(f"  {model.kind}: " + rep.summary().replace("\n", " | "))

print("\n== full projector checks on solved data ==")
for model, seed in ((moyal, 7), (toric, 3)):
    d = solve(1, model, cfg=SolveConfig(rng_seed=seed))
    rep = symbolic_projector_checks(d)
    print(f"  {model.kind}:")
    for line in rep.summary().splitlines():
        print("   ", line)
