//! Quaternion-valued communications DSP.
//!
//! 16-Q²AM modulation, quaternion FIR channels with Gaussian noise, a
//! reference-trained quaternion LMS equalizer, the block quaternion Wiener
//! solution and a seeded Monte Carlo harness that produces averaged
//! learning curves for SISO and MIMO links.
//!
//! Quaternions do not commute, so one convention is used throughout:
//! coefficients (channel taps, equalizer weights, matrix entries) multiply
//! signal samples from the left.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod adjoint;
pub mod channel;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod modem;
pub mod quaternion;
pub mod wiener;

pub use adaptive::{run_qlms, run_qlms_stacked, EqualizerState, QlmsRun, Regressor};
pub use channel::{ChannelModel, MimoChannelModel, SeededRng};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, ExperimentResult, LearningCurve, Mode, SnrReference, Summary};
pub use linalg::{QMatrix, QVector};
pub use modem::Symbol;
pub use quaternion::Quaternion;
pub use wiener::WienerProblem;
