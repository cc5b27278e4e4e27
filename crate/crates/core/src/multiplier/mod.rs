//! Fourier multipliers on the central variables with dyadic kernel synthesis.

mod apply;
mod fd;
mod grid;
mod kernel;
mod partition;
mod regularize;
mod symbol;

pub use apply::{
    apply_multiplier, central_derivative, convolve_axis, geometric_series_check, multiply_by_symbol, q_seminorm,
    Backend, GeometricCheck,
};
pub use fd::{centered, stencil_weights};
pub use grid::{AxisRole, GridAxis, GridFunction, C64};
pub use kernel::{
    fit_decay, gauss_legendre, grid_kernel, kernel_from_symbol, shell_method, Kernel1d, ShellMethod, SlopeFit,
};
pub use partition::{delta, eta, DyadicPartition};
pub use regularize::{convolve_regularized, estimate_order, order_cap, regularize, RegularizedDistribution};
pub use symbol::{atom_value, symbol_bound_scan, AtomPoly, AxisSymbol, SymbolFunction, SymbolMeta};
