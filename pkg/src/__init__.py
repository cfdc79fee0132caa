"""drsolve: dock re-allocation and M-convex minimization under an L1 constraint."""
