import numpy as np

from rspca import SymmetricMatrix


def random_psd(d: int, seed: int, scale: float = 1.0) -> SymmetricMatrix:
    """Gaussian G G^T instance, the stock PSD test matrix."""
    rng = np.random.RandomState(seed)
    g = rng.randn(d, d)
    return SymmetricMatrix.from_array(scale * (g @ g.T))
