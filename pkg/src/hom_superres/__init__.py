"""Source-separation estimation from two-photon interference beats."""

__version__ = "0.1.0"

from .wavepacket import (  # noqa: E402
    GaussianWavepacket,
    QuadratureError,
    TabulatedWavepacket,
    WavepacketError,
    build_envelope,
    sigma_k_of,
)
from .interference import (  # noqa: E402
    DetectorGeometry,
    MisalignedSceneError,
    Outcome,
    Scene,
    Tag,
    aligned_density,
    bucket_probability,
    joint_density,
    momentum_from_pixel,
    oracle_density,
)
from .sampler import SampleBatch, derive_seed, draw, draw_bucket  # noqa: E402
from .fisher import FisherMatrix, crb, fisher_aligned, fisher_bucket, fisher_matrix  # noqa: E402
from .estimator import (  # noqa: E402
    EstimationError,
    EstimationResult,
    StudyReport,
    log_likelihood,
    mle,
    mle_bucket,
    run_study,
)
