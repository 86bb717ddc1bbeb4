//! Numerical building blocks: adaptive quadrature, root finding, special
//! functions and the univariate model interface.

pub mod distributions;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use distributions::{model_mean_via_survival, Dist, Family, Support, UnivariateModel};
pub use quadrature::{
    integrate_adaptive, integrate_with_breaks, Integral, QuadratureSpec, TailMapping,
};
pub use roots::{find_root, scan_roots};
