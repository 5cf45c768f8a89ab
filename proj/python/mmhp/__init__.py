# SPDX-License-Identifier: Apache-2.0
"""Broadband mmWave MIMO-OFDM hybrid precoding simulator.

Thin python surface over the C++ core: channel generation, PCA-based
analog precoding for fixed and dynamic subarrays, shared-AHC antenna
grouping, the SOMP/DFT/covariance-EVD baselines, and the SE/EE metrics.
"""

from ._core import (  # noqa: F401
    ChannelRealization,
    FullyDigitalPrecoders,
    RayParameters,
    SystemConfig,
    average_covariance,
    baseband_precoder,
    channel_from_freq,
    correlation_matrix,
    covariance_evd_precoder,
    dft_codebook,
    dft_codebook_precoder,
    effective_singular_values,
    energy_efficiency,
    exact_lambda_sum,
    exhaustive_grouping,
    fs_pattern,
    generate_channel,
    greedy_grouping,
    grouping_from_json,
    grouping_to_json,
    load_channel,
    make_steering_dictionary,
    minkowski_lambda_estimate,
    mutual_correlation,
    optimal_fully_digital,
    partition_count,
    pca_analog_precoder,
    pca_subarray_vector,
    power_consumption,
    project_constant_modulus,
    quantize_phases,
    render_results_csv,
    run_experiment,
    sample_rays,
    save_channel,
    shared_ahc,
    somp_precoder,
    spectral_efficiency,
    spectral_efficiency_digital,
    steering_vector,
    water_filling,
)
from ._core import __version__  # noqa: F401
