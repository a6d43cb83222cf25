"""Interactive retrieval over noisy spoken queries.

Confidence-weighted probabilistic ranking, query-biased summaries, a
simulated speech recognizer with transcript merging, and a turn-based
dialog loop, exposed through a library, a CLI, and an HTTP service.
"""

__version__ = "0.1.0"
