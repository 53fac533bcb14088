"""Print the four built-in reference training runs.

All four runs share eta=0.1, five epochs, and initial parameters
(w, b) = (0.5, 0.5); the datasets are nested prefixes of
x = (0.6, 0.2, 0.1, 0.9), y = (0.5, 0.4, 0.3, 0.6).  The 3-decimal
cells are the values frozen into the acceptance tests.

Equivalent CLI: ``traceinv tables``.
"""

from traceinv import demo_tables

print(demo_tables())
