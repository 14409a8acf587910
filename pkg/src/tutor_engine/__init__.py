"""Adaptive tutoring agent engine.

A turn-based cognitive cycle (intent -> plan -> retrieve -> respond) with a
three-level instructional scaffolding state machine, exact-retrieval
grounding over ingested curriculum, durable session persistence, and an
HTTP service plus operator CLI on top.
"""

__version__ = "0.1.0"
