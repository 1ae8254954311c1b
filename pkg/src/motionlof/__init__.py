"""Motion novelty scoring for IMU streams.

Pipeline: parse mission files -> overlapping per-frame windows -> per-channel
periodogram PSD features (binned, z-normalized) -> Local Outlier Factor
novelty model -> per-frame abnormality measure with an alarm threshold.
"""

from .ingest import (CHANNELS, ImuTrace, Mission, load_mission, parse_frames,
                     parse_imu, validate_mission, write_mission)
from .lof import (LofModel, NoveltyScore, abnormality, fit, knn_query, load,
                  lof_of_query, save, training_lof)
from .normalize import NormStats, apply_norm, fit_norm
from .pipeline import mission_features, score_mission, training_matrix
from .spectral import Psd, bin_psd, feature_vector, periodogram
from .synth import (FlipConfig, ScenarioConfig, gen_flip_mission,
                    gen_normal_mission, integrate_quat)
from .windowing import Window, chop, mean_rate

__version__ = "0.1.0"
