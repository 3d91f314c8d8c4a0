//! Independent closed-form ground truth for power-law scale factors.

pub mod power_law;
pub mod special;

pub use power_law::{
    c_alpha, dg_drho_closed, dg_dtau_closed, dt0_dtau_closed, g_tautau_closed, rho_closed, t0_closed,
    ClosedForm, PowerLawParams,
};
pub use special::{gamma_fn, hyp2f1};
