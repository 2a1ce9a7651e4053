//! Random covert codebooks and exact evaluation of Willie's and Bob's views.
//!
//! Codebooks are summed in m-major order (`m * l_size + l`) everywhere, and
//! resolvability samples are reduced in sample order, so reports are
//! reproducible bit for bit.

pub(crate) mod codebook;
mod decoder;
mod large_n;
mod scaling;
mod space;
mod willie;

pub use codebook::{
    codeword_stream_key, otp_encode, sample_codebook, sample_codebook_indexed, sample_codeword, Codebook,
    SimConfig, DEFAULT_MAX_DENSE_DIM, DEFAULT_MC_DRAWS, DEFAULT_S_GRID,
};
pub use decoder::{
    codeword_projectors, default_threshold, sqrt_measurement_decoder, DecoderReport, MessageError, Povm,
    SquareRootMeasurement, MAX_DECODER_CODEWORDS,
};
pub use scaling::{covertness_scaling, type_class_relative_entropy, ScalingPoint};
pub use space::{classical_kl, common_eigenbasis, dense_dim, product_distribution, CommonBasis, ProductSpace, Repr};
pub use willie::{
    covertness_report, default_beta_grid, resolvability_experiment, resolvability_rhs, secrecy_report,
    willie_average_state, willie_average_state_dense, willie_bin_state, CovertnessReport, MonteCarloErrors,
    ResolvabilityBound, ResolvabilityResult, SecrecyReport,
};
