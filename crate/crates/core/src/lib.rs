//! Maximal Fermi charts of Robertson-Walker cosmologies, extended through
//! the big bang to negative cosmological time.
//!
//! The chart is built from the transformation integrals in [`quadrature`],
//! evaluated for a scale factor from [`scalefactor`]. [`chart`] resolves
//! cosmological time, the extended metric and its first partials;
//! [`geodesic`] checks the geometric claims; [`oracle`] supplies closed forms
//! for power laws.

pub mod chart;
pub mod error;
pub mod geodesic;
pub mod oracle;
pub mod quadrature;
pub mod roots;
pub mod scalefactor;

pub use chart::{Angular, Chart, ChartGrid, ChartPoint, Curvature, Estimate, GridRow, MetricSample, Region};
pub use geodesic::{GeodesicTrace, TraceOptions};
pub use error::{FermiError, Result};
pub use quadrature::{QuadratureResult, Tolerances};
pub use scalefactor::ScaleFactorModel;
