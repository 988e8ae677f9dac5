"""
BlochID - Which dephasing qubit model produced this trace?
Analytic Bloch models, numerical oracles, shot-noise simulation and model discrimination
"""
