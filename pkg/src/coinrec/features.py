"""Pattern averaging of the trimmed 100x100 coin and the 400-value feature vector."""
import numpy as np

from coinrec.errors import DimensionMismatch

TRIM_SIZE = 100
BLOCK = 5
GRID = TRIM_SIZE // BLOCK  # 20
N_FEATURES = GRID * GRID  # 400


def pattern_average(coin):
    """Mean of every 5x5 block: integer block sum divided by 25."""
    coin = np.asarray(coin)
    if coin.shape != (TRIM_SIZE, TRIM_SIZE):
        raise DimensionMismatch(f"expected a {TRIM_SIZE}x{TRIM_SIZE} coin, got {coin.shape}")
    sums = coin.astype(np.int64).reshape(GRID, BLOCK, GRID, BLOCK).sum(axis=(1, 3))
    return sums / (BLOCK * BLOCK)


def to_feature_vector(grid, normalize=True):
    """Row-major flatten (index = row*20 + col), optionally scaled into [0, 1]."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.shape != (GRID, GRID):
        raise DimensionMismatch(f"expected a {GRID}x{GRID} grid, got {grid.shape}")
    vec = grid.reshape(N_FEATURES).copy()
    if normalize:
        vec /= 255.0
    return vec


def from_feature_vector(vec, normalized=True):
    vec = np.asarray(vec, dtype=np.float64)
    if vec.shape != (N_FEATURES,):
        raise DimensionMismatch(f"expected {N_FEATURES} values, got {vec.shape}")
    grid = vec.reshape(GRID, GRID).copy()
    if normalized:
        grid *= 255.0
    return grid


def features_of(coins, normalize=True):
    """Stack feature vectors for a batch of trimmed coins -> (n, 400)."""
    coins = np.asarray(coins)
    if coins.ndim == 2:
        coins = coins[None]
    n = coins.shape[0]
    if coins.shape[1:] != (TRIM_SIZE, TRIM_SIZE):
        raise DimensionMismatch(f"expected (n, 100, 100) coins, got {coins.shape}")
    sums = coins.astype(np.int64).reshape(n, GRID, BLOCK, GRID, BLOCK).sum(axis=(2, 4))
    out = (sums / (BLOCK * BLOCK)).reshape(n, N_FEATURES)
    if normalize:
        out /= 255.0
    return out
