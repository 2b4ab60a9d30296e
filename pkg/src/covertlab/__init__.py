"""covertlab: Monte Carlo experiments on covert communication and the square root law."""

from .channels import AwgnParams, BscParams, Dmc, awgn_apply, bsc_apply, dmc_apply, load_dmc, save_dmc
from .covert_awgn import (
    MLCodebook,
    Repetition,
    SchemeParams,
    SecretKey,
    decode,
    ecc_encode,
    encode,
    gen_key,
    load_key,
    plan_capacity,
    save_key,
)
from .covert_bsc import LowWeightCodebook, bsc_decode, bsc_encode, bsc_plan_capacity, gen_codebook
from .exceptions import (
    CapacityError,
    ConfigError,
    CovertLabError,
    InvalidInputError,
    InvalidParameterError,
    NumericFailureError,
    ResourceError,
)
from .experiments import SweepConfig, SweepRow, load_config, run_experiment
from .io import emit_csv, read_csv
from .rngstat import (
    MixtureSpec,
    RandomStream,
    binomial_cdf,
    kl_divergence_numeric,
    make_rng,
    sample_bernoulli,
    sample_gaussian,
    wilson_interval,
)
from .warden import (
    AwgnLRTDetector,
    CountDetector,
    DetectorReport,
    MaxSlotLRTDetector,
    MixtureLRTDetector,
    RadiometerDetector,
    count_stat,
    lrt_stat_awgn,
    min_error_estimate,
    pinsker_floor,
    radiometer_stat,
)

__version__ = "0.1.0"

__all__ = [
    "AwgnParams",
    "BscParams",
    "Dmc",
    "awgn_apply",
    "bsc_apply",
    "dmc_apply",
    "load_dmc",
    "save_dmc",
    "MLCodebook",
    "Repetition",
    "SchemeParams",
    "SecretKey",
    "decode",
    "ecc_encode",
    "encode",
    "gen_key",
    "load_key",
    "plan_capacity",
    "save_key",
    "LowWeightCodebook",
    "bsc_decode",
    "bsc_encode",
    "bsc_plan_capacity",
    "gen_codebook",
    "CapacityError",
    "ConfigError",
    "CovertLabError",
    "InvalidInputError",
    "InvalidParameterError",
    "NumericFailureError",
    "ResourceError",
    "SweepConfig",
    "SweepRow",
    "load_config",
    "run_experiment",
    "emit_csv",
    "read_csv",
    "MixtureSpec",
    "RandomStream",
    "binomial_cdf",
    "kl_divergence_numeric",
    "make_rng",
    "sample_bernoulli",
    "sample_gaussian",
    "wilson_interval",
    "AwgnLRTDetector",
    "CountDetector",
    "DetectorReport",
    "MaxSlotLRTDetector",
    "MixtureLRTDetector",
    "RadiometerDetector",
    "count_stat",
    "lrt_stat_awgn",
    "min_error_estimate",
    "pinsker_floor",
    "radiometer_stat",
]
