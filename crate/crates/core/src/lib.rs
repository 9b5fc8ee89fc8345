//! Differentially private estimation of multiple quantiles.
//!
//! The main entry point is [`jointexp::joint_exp`], which releases all `m`
//! quantiles from a single exponential-mechanism draw. The [`baselines`]
//! module holds the comparison estimators, and [`bench`] the experiment
//! harness behind the `dpq` binary.
//!
//! ```
//! use dp_quantiles::{prepare_dataset, QuantileSpec, RandomSource};
//! use dp_quantiles::jointexp::{joint_exp, MechanismParams};
//!
//! let data = prepare_dataset(&[1.2, 3.4, 2.2, 8.9, 5.5, 4.1], 0.0, 10.0).unwrap();
//! let spec = QuantileSpec::new(vec![0.25, 0.5, 0.75]).unwrap();
//! let params = MechanismParams::swap(1.0).unwrap();
//! let mut rng = RandomSource::new(7);
//! let est = joint_exp(&data, &spec, &params, &mut rng).unwrap();
//! assert_eq!(est.len(), 3);
//! ```

pub mod baselines;
pub mod bench;
pub mod dataset;
pub mod error;
pub mod jointexp;
pub mod metrics;
pub mod numerics;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod rng;

pub use dataset::{jitter, prepare_dataset, QuantileEstimates, QuantileSpec, SortedDataset};
pub use error::{Error, Result};
pub use rng::RandomSource;
