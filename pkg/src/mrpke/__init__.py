"""Rank-metric code-based public-key encryption.

Subpackages / modules:
  bitmat     -- bit-packed GF(2) linear algebra
  fields     -- GF(2^m) arithmetic and linearized (q-)polynomials
  codes      -- matrix codes, duality, support sampling
  gabidulin  -- Gabidulin encoder / bounded-rank-distance decoder
  onebit     -- single-bit rank-support encryption scheme
  pke        -- the full multi-bit PKE with compressed keys and KAT support
  estimator  -- MinRank attack-cost estimator
  attacks    -- small-scale executable attacks
  reduction  -- toy-scale search-to-decision reduction demo
  cli        -- command-line interface
"""

from __future__ import annotations

__version__ = "0.1.0"
