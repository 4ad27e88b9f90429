"""Image -> trimmed coin -> feature vector, with every intermediate kept."""
from typing import NamedTuple

import numpy as np

from coinrec.features import TRIM_SIZE, pattern_average, to_feature_vector
from coinrec.hough import CircleHypothesis, HoughParams, accumulate, find_best_circle
from coinrec.imaging import crop_to_circle, resize, sobel_edges, to_grayscale


class Stages(NamedTuple):
    gray: np.ndarray
    edges: np.ndarray
    circle: CircleHypothesis
    cropped: np.ndarray
    trimmed: np.ndarray
    grid: np.ndarray


def preprocess_stages(img, params=None, sobel_threshold=None):
    gray = to_grayscale(img)
    if params is None:
        params = HoughParams.for_image(*gray.shape)
    edges = sobel_edges(gray, sobel_threshold)
    circle = find_best_circle(accumulate(edges, params), params)
    cropped = crop_to_circle(gray, circle)
    trimmed = resize(cropped, TRIM_SIZE, TRIM_SIZE)
    return Stages(gray, edges, circle, cropped, trimmed, pattern_average(trimmed))


def preprocess(img, params=None, sobel_threshold=None):
    """Gray or RGB scan -> 100x100 trimmed coin."""
    return preprocess_stages(img, params, sobel_threshold).trimmed


def image_features(img, normalize=True, params=None, sobel_threshold=None):
    stages = preprocess_stages(img, params, sobel_threshold)
    return to_feature_vector(stages.grid, normalize)
