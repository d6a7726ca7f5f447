"""LP encoding of deviation chains and an exact simplex solver."""
