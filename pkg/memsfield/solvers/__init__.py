"""
Integrators for radial solutions

shoot: regular solutions by shooting on the scaled equation
phaseplane: rupture solutions for N/2 <= delta < N-1
picard: rupture solutions from global solutions of z'' + f(t, z) = 0
critical: singular solutions at the critical exponent
"""
