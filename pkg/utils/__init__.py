# Solvers, space builders, suites and report I/O for the coarse extension lab
