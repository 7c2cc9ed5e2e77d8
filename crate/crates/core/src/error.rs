use thiserror::Error;

use crate::quad::QuadError;
use crate::specfun::SpecFunError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("{what} is outside its domain: {value:e}")]
    Domain { what: &'static str, value: f64 },
    #[error("near node at x = {x:e} cm, y = {y:e} cm: R = {r:e} below guard {guard:e}")]
    NearNode { x: f64, y: f64, r: f64, guard: f64 },
    #[error("finite-difference stencil around x = {x:e} cm, y = {y:e} cm touches a node")]
    StencilCrossesNode { x: f64, y: f64 },
    #[error("Richardson estimate {extrapolated:e} disagrees with base {base:e} at x = {x:e}, y = {y:e}")]
    NonConvergence {
        x: f64,
        y: f64,
        base: f64,
        extrapolated: f64,
    },
    #[error("canyon index must be non-zero")]
    ZeroCanyonIndex,
    #[error("exponent {exponent} exceeds overflow guard at y = {y:e} cm")]
    Overflow { y: f64, exponent: f64 },
    #[error("trajectory step collapsed below {dt_min:e} s at t = {t:e} s")]
    StepCollapse { t: f64, dt_min: f64 },
    #[error("{failed} of {total} trajectories aborted (limit 1%)")]
    TooManyAborts { failed: usize, total: usize },
    #[error("oscillatory quadrature did not converge at omega = {omega:e}: error estimate {error:e}")]
    OscillatoryTail { omega: f64, error: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    SpecialFunction(#[from] SpecFunError),
}
