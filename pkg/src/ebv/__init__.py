"""ebv: a verifier for refinement-calculus machine models.

Parses the ``.eb`` modelling language, generates proof obligations
(theorems, invariant preservation, initialisation, feasibility, guard
strengthening, simulation, variant correctness, witness feasibility),
and discharges them through an external SMT-LIB 2 solver.
"""

__version__ = "0.1.0"
