"""Seeded random streams.

Every random draw in the package comes from :class:`random.Random`
(CPython's MT19937), seeded with a 64-bit integer obtained by hashing a
root seed together with a stream label::

    derive_seed(seed, "workload", "arrivals")
        == int.from_bytes(sha256(b"<seed>/workload/arrivals").digest()[:8], "big")

Only ``random()``, ``randrange``/``randint``, ``choice`` and
``expovariate`` are used; their outputs for a given MT state have been
stable across CPython releases since 3.2, so results are portable.

Streams in use:

* ``synthesis`` - pathlet capacities and latencies during ingestion
* ``endpoints`` - synthetic endpoints attached to an ingested graph
* ``workload/arrivals``, ``workload/requests``, ``workload/failures``
* ``walk/<sampler seed>/<request id>/<purpose>`` - random-walk sampling
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(*parts) -> int:
    """Hash ``parts`` into a 64-bit seed."""
    label = "/".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(label).digest()[:8], "big")


def stream(*parts) -> random.Random:
    return random.Random(derive_seed(*parts))
