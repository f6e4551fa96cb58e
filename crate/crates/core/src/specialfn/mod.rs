//! Special functions: erfc, log-Gamma, scaled parabolic cylinder functions,
//! associated Hermite polynomials, the kernel `H_{a,u}` and the `F`/`G`
//! functionals of the counting statistic.

pub mod charlier;
pub mod erfc;
pub mod gamma;
pub mod hermite;
pub mod kernel;
pub mod pcf;

pub use charlier::{f_charlier, g_charlier};
pub use erfc::{erfc, erfcx, ln_erfc};
pub use gamma::log_gamma;
pub use hermite::{assoc_hermite, g0_integer};
pub use kernel::{
    dlog_h_au, dlog_h_au_with, log_h_au, log_h_au_with, log_h_tail, log_h_tail_coefficients,
    KernelConfig, SingularWeightParams,
};
pub use pcf::{
    ln_shifted_moment, ln_shifted_moment_with, scaled_pcf, scaled_pcf_shift, scaled_pcf_shift_with,
    scaled_pcf_with,
};
