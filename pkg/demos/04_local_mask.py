"""Local mask: keep each point's shortest edges in lens distance.

Unlike the global variants the local mask works per point: every vertex
ranks its incident edges by how far the lens values differ and keeps the
closest mask_neighbors of them. Because an edge kept from either side
survives, every point retains at least min(mask_neighbors, degree) edges,
so the manifold rarely falls apart; it reorganises instead.
"""

import numpy as np

from graphlens import apply_local_mask, build_manifold, connected_components

rng = np.random.default_rng(7)
points = rng.uniform(0, 1, size=(500, 2))
stripe = np.floor(points[:, 0] * 10).astype(int)
field = (stripe % 2) + 0.05 * points[:, 1] + rng.normal(0, 0.01, 500)

manifold = build_manifold(points, 15)
print(f"initial: {manifold.n_edges} edges, "
      f"{connected_components(manifold).max() + 1} component(s)")

for k_mask in (10, 5, 3, 1):
    filtered = apply_local_mask(manifold, field, "euclidean", k_mask)
    floor = np.minimum(k_mask, manifold.degrees())
    print(
        f"mask_neighbors={k_mask:2d}: {filtered.n_edges:5d} edges, "
        f"{connected_components(filtered).max() + 1:2d} component(s), "
        f"degree floor respected: {bool(np.all(filtered.degrees() >= floor))}"
    )

# The guarantee above is the local mask's signature property: even the
# most aggressive setting keeps each vertex connected to something, which
# is why it tears connected components far less than the global lenses.
