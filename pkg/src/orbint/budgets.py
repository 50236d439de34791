"""Resource budgets.

The engine must fail loudly rather than hang, so every potentially explosive
computation (pair queues, term counts, factorization degree, descent ansatz)
checks against a Budget.  A single module-level default is used when callers
do not pass one; the CLI builds its own from flags.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Budget:
    max_pairs: int = 50_000        # Buchberger critical pairs processed
    max_terms: int = 100_000       # term count of any intermediate polynomial
    degree_bound: int = 64         # univariate factorization degree
    ansatz_degree: int = 6         # descent-solver numerator degree cap
    separation_retries: int = 8    # fresh linear forms before SeparationFailure
    group_bound: int = 10_000      # group closure enumeration cap


DEFAULT = Budget()
