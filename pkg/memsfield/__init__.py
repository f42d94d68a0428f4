"""

mems-field: radial regular and rupture solutions of the MEMS problem
with fringing field, -Delta U = (lam + delta |grad U|^2) / (1 - U) on the
unit ball.

"""
