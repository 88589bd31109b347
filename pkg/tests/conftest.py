import numpy as np

from hyperpoisson.mesh import Mesh1D


def jittered_mesh(rng, n_elements: int, degree: int, bc: str,
                  lo: float = 0.0, hi: float = 1.0,
                  jitter: float = 0.3) -> Mesh1D:
    """Random nonuniform mesh with element lengths bounded away from zero."""
    h = (hi - lo) / n_elements
    interior = (lo + h * np.arange(1, n_elements)
                + rng.uniform(-jitter, jitter, n_elements - 1) * h)
    return Mesh1D(np.concatenate([[lo], interior, [hi]]), degree, bc)
