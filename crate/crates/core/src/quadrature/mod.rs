//! Quadrature engine and the kernel evaluators built on it.

mod config;
mod engine;
mod kernels;

pub use config::{QuadratureConfig, Scaling};
pub use engine::{gauss_kronrod_15, integrate, integrate_log, integrate_log_signed, integrate_semi_infinite, Hint, LogIntegral, Range};
pub use kernels::{
    bergman_direct, bergman_normalized, compute_d, conjugate_point, kernel_difference, kernel_direct, log_p, log_phi_hat,
    szego_direct, KernelDifference, KernelKind, KernelValue,
};
