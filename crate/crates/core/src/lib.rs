//! Statistics on interval data, and Monte Carlo experiments on when pooling
//! precise ("skinny") with imprecise ("puffy") measurements helps.
//!
//! ```
//! use ipool::{outer_ci, Alpha, IntervalDataset, Label};
//!
//! let ds = IntervalDataset::from_pairs(&[(0.0, 1.0), (10.0, 11.0)], Label::Skinny).unwrap();
//! let ci = outer_ci(&ds, Alpha::new(0.05).unwrap()).unwrap();
//! assert!((ci.hull().lo() + 64.38).abs() < 0.01);
//! ```

pub mod ci;
pub mod error;
pub mod interval;
pub mod io;
pub mod kernels;
pub mod mle;
pub mod pbox;
pub mod sim;
pub mod synth;

pub use ci::{ci_width, inner_ci, interval_mean, outer_ci, UncertainCI};
pub use error::{Error, Result};
pub use interval::{Interval, IntervalDataset, Label};
pub use kernels::{ks_critical, Alpha};
pub use mle::{Family, FitMethod, FitResult};
pub use pbox::{horizontal_width, ks_band, pbox_from_intervals, KsBand, PBox, StepFunction};
pub use sim::{Curve, Metric, Scenario};
pub use synth::{Intervalization, SeedStream, SourceDistribution};
