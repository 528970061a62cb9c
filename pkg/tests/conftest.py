import numpy as np

from steinperm import AntisymmetricMatrix, random_antisymmetric_matrix


def random_matrices(n: int, count: int = 5, seed: int = 20260819) -> list[AntisymmetricMatrix]:
    """Seeded random integer antisymmetric matrices, stable across runs."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, n])))
    return [random_antisymmetric_matrix(n, rng) for _ in range(count)]
