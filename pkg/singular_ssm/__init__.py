# Robust Gaussian state estimation with singular observation noise
