# Hilbert robustness benchmark package
