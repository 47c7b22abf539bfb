"""
The test loop and the collision bound
=====================================

Three equal masses chase each other around one closed curve Q(t) on the
unit sphere, a third of a period apart.  The action of such a loop is
kinetic energy plus the cotangent force function, averaged over a period.
Any loop whose bodies collide has action at least

    (3/2) (12 pi)^(2/3) - 3 = 13.8647...

so a loop that beats this number is a collision-free candidate.
"""

import numpy as np

from s2choreo import BodySystem, action, collision_bound, test_loop
from s2choreo.choreography import min_pair_separation

# A small figure-eight-shaped curve around the north pole, sampled at N points
loop = test_loop(512)
system = BodySystem(3)
print("first samples:\n", np.round(loop.samples[:3], 6))

# Action split into its two parts
a = action(loop, system)
print(f"kinetic            {a.kinetic:.8f}")
print(f"force-function int {a.potential_integral:.8f}")
print(f"action             {a.total:.8f}")
print(f"collision bound    {collision_bound():.8f}")
print("beats the bound:  ", a.total < collision_bound())

# Refining the sampling changes the action only in the seventh decimal
for N in (64, 128, 256, 512, 1024):
    print(f"N = {N:5d}  action = {action(test_loop(N), system).total:.12f}")

# How close do the bodies get along the loop?
print("closest approach (rad):", round(min_pair_separation(loop, system), 6))
