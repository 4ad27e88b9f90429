"""Coin recognition from scans: Hough-based coin extraction, pattern-averaged
features and a sigmoid MLP classifier, plus a synthetic 14-class corpus."""
from coinrec.classifier import (MlpModel, TrainConfig, TrainReport, backprop_gradients, classify,
                                denomination_of, forward, init_model, train)
from coinrec.features import pattern_average, to_feature_vector
from coinrec.hough import (CircleHypothesis, HoughAccumulator, HoughParams, accumulate,
                           detect_coin, find_best_circle)
from coinrec.imaging import crop_to_circle, resize, rotate, sobel_edges, to_grayscale
from coinrec.kernels import BACKEND

__version__ = "0.1.0"
