pub mod correlations;
pub mod error;
pub mod exec;
pub mod green;
pub mod grid;
pub mod kernel;
pub mod media;
pub mod poles;
pub mod quadrature;
pub mod quantization;
pub mod random;
pub mod scenarios;
pub mod scene;
pub mod spectral;
pub mod transfer;
pub mod units;
