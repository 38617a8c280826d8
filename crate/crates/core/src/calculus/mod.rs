//! The annulus functional calculus: the kernels of the boundary
//! representation formula, the formula itself as an adaptive periodic
//! quadrature, and the operator bound `K = 2 + ||int (Re M)^{-1}||`.

mod represent;

pub use represent::{k_formula, partition_of_unity_residuals, represent};

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, LinalgError, Matrix, PolarFactors};
use crate::ratfun::RatFunError;

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum CalculusError {
    #[error(
        "operator not admissible for R = {big_r}: ||A|| = {norm_a:.6e}, \
         ||A^-1|| = {norm_a_inv:.6e}, limit R(1 - margin) = {limit:.6e}"
    )]
    Inadmissible { big_r: f64, norm_a: f64, norm_a_inv: f64, limit: f64 },
    #[error("resolvent singular at theta = {theta:.6}: operator violates admissibility")]
    ResolventSingular { theta: f64 },
    #[error("Re M(theta) not positive definite at theta = {theta:.6} (min eigenvalue {min_eig:.3e})")]
    NotPositive { theta: f64, min_eig: f64 },
    #[error(
        "quadrature did not converge at {nodes} nodes (last refinement delta {last_delta:.3e}, \
         tolerance {tol:.3e})"
    )]
    QuadratureFailure { nodes: usize, last_delta: f64, tol: f64 },
    #[error("invalid quadrature config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    RatFun(#[from] RatFunError),
}

/// Discretization control for the boundary integrals: start at `nodes`
/// and double until successive trapezoid values differ by at most `tol`
/// in spectral norm, giving up beyond `max_nodes`.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub nodes: usize,
    pub tol: f64,
    pub max_nodes: usize,
}

impl QuadratureConfig {
    pub fn new(nodes: usize, tol: f64, max_nodes: usize) -> Result<Self, CalculusError> {
        if nodes < 64 || !nodes.is_power_of_two() {
            return Err(CalculusError::InvalidConfig(format!(
                "nodes = {nodes} must be a power of two and at least 64"
            )));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CalculusError::InvalidConfig(format!("tol = {tol} must be positive")));
        }
        if max_nodes < nodes {
            return Err(CalculusError::InvalidConfig(format!(
                "max_nodes = {max_nodes} must be at least nodes = {nodes}"
            )));
        }
        Ok(Self { nodes, tol, max_nodes })
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { nodes: 256, tol: 1e-10, max_nodes: 8192 }
    }
}

/// Admissible operator context on the balanced annulus `X(1/R, R)`:
/// holds the operator, its inverse and adjoints, and its polar factors,
/// with the strict norm margin `||A||, ||A^-1|| <= R (1 - margin)`.
#[derive(Debug, Clone)]
pub struct AnnulusContext {
    big_r: f64,
    r: f64,
    margin: f64,
    a: Matrix,
    a_inv: Matrix,
    a_adj: Matrix,
    a_inv_adj: Matrix,
    polar: PolarFactors,
    norm_a: f64,
    norm_a_inv: f64,
}

/// Default strictness margin for admissibility.
pub const DEFAULT_MARGIN: f64 = 1e-6;

impl AnnulusContext {
    pub fn new(a: Matrix, big_r: f64, margin: f64) -> Result<Self, CalculusError> {
        if !(big_r.is_finite() && big_r > 1.0) {
            return Err(CalculusError::InvalidConfig(format!("R = {big_r} must exceed 1")));
        }
        if !(margin > 0.0 && margin < 1.0) {
            return Err(CalculusError::InvalidConfig(format!(
                "margin = {margin} must lie in (0, 1)"
            )));
        }
        let norm_a = linalg::spectral_norm(&a)?;
        let limit = big_r * (1.0 - margin);
        let a_inv = match linalg::inverse(&a) {
            Ok(inv) => inv,
            Err(LinalgError::Singular { .. }) => {
                return Err(CalculusError::Inadmissible {
                    big_r,
                    norm_a,
                    norm_a_inv: f64::INFINITY,
                    limit,
                })
            }
            Err(e) => return Err(e.into()),
        };
        let norm_a_inv = linalg::spectral_norm(&a_inv)?;
        if norm_a > limit || norm_a_inv > limit {
            return Err(CalculusError::Inadmissible { big_r, norm_a, norm_a_inv, limit });
        }
        let inv_residual =
            a.mul(&a_inv).sub(&Matrix::identity(a.dim())).frobenius_norm();
        if inv_residual > 1e-10 * (norm_a * norm_a_inv).max(1.0) {
            return Err(CalculusError::Linalg(LinalgError::Invalid(format!(
                "inverse residual {inv_residual:.3e} exceeds the context invariant"
            ))));
        }
        let polar = linalg::polar_decompose(&a)?;
        let a_adj = a.adjoint();
        let a_inv_adj = a_inv.adjoint();
        Ok(Self {
            big_r,
            r: 1.0 / big_r,
            margin,
            a,
            a_inv,
            a_adj,
            a_inv_adj,
            polar,
            norm_a,
            norm_a_inv,
        })
    }

    pub fn with_default_margin(a: Matrix, big_r: f64) -> Result<Self, CalculusError> {
        Self::new(a, big_r, DEFAULT_MARGIN)
    }

    pub fn big_r(&self) -> f64 {
        self.big_r
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn margin(&self) -> f64 {
        self.margin
    }
    pub fn matrix(&self) -> &Matrix {
        &self.a
    }
    pub fn matrix_inv(&self) -> &Matrix {
        &self.a_inv
    }
    pub fn polar(&self) -> &PolarFactors {
        &self.polar
    }
    pub fn dim(&self) -> usize {
        self.a.dim()
    }
    pub fn norm_a(&self) -> f64 {
        self.norm_a
    }
    pub fn norm_a_inv(&self) -> f64 {
        self.norm_a_inv
    }
}

/// Herglotz-type boundary kernel
/// `mu(theta, B) = ((1 + w B)(1 - w B)^{-1} + adjoint)/(4 pi)` with
/// `w = r e^{-i theta}`. Hermitian, and positive semidefinite whenever
/// `||B|| < R`.
pub fn kernel_mu(ctx: &AnnulusContext, theta: f64, b: &Matrix) -> Result<Matrix, CalculusError> {
    let w = Complex64::from_polar(ctx.r, -theta);
    let n = b.dim();
    let plus = b.scale(w).add_scaled_identity(Complex64::new(1.0, 0.0));
    let minus = b.scale(-w).add_scaled_identity(Complex64::new(1.0, 0.0));
    let resolvent = match linalg::inverse(&minus) {
        Ok(inv) => inv,
        Err(LinalgError::Singular { .. }) => {
            return Err(CalculusError::ResolventSingular { theta })
        }
        Err(e) => return Err(e.into()),
    };
    let t = plus.mul(&resolvent);
    let mut out = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (t[(i, j)] + t[(j, i)].conj()) / (4.0 * std::f64::consts::PI);
        }
    }
    Ok(out)
}

/// The third-term kernel
/// `M(theta, A*) = 2 pi/(R^2 - r^2) ((R^2 + r^2) I - e^{-i theta}(A^{-1})* - e^{i theta} A*)`.
pub fn kernel_m(ctx: &AnnulusContext, theta: f64) -> Matrix {
    let s = ctx.big_r * ctx.big_r + ctx.r * ctx.r;
    let scale = TAU / (ctx.big_r * ctx.big_r - ctx.r * ctx.r);
    let e_neg = Complex64::from_polar(1.0, -theta);
    let e_pos = Complex64::from_polar(1.0, theta);
    ctx.a_inv_adj
        .scale(-e_neg)
        .add(&ctx.a_adj.scale(-e_pos))
        .add_scaled_identity(Complex64::new(s, 0.0))
        .scale(Complex64::new(scale, 0.0))
}

/// Unitary comparison kernel of the lower bound for `Re M`:
/// `N(theta) = 2 pi/(R^2 - r^2) ((R^2 + r^2 - R - r) I
///             + (R + r + 2)/4 (2 I - e^{i theta} U* - e^{-i theta} U))`.
pub fn kernel_n(ctx: &AnnulusContext, theta: f64) -> Matrix {
    let big_r = ctx.big_r;
    let r = ctx.r;
    let scale = TAU / (big_r * big_r - r * r);
    let c0 = big_r * big_r + r * r - big_r - r;
    let c1 = (big_r + r + 2.0) / 4.0;
    let u = &ctx.polar.unitary;
    let e_pos = Complex64::from_polar(c1, theta);
    let e_neg = Complex64::from_polar(c1, -theta);
    u.adjoint()
        .scale(-e_pos)
        .add(&u.scale(-e_neg))
        .add_scaled_identity(Complex64::new(2.0 * c1 + c0, 0.0))
        .scale(Complex64::new(scale, 0.0))
}

/// Smallest eigenvalues of `mu(theta, A)` and of `Re M(theta) - N(theta)`
/// over `nodes` equispaced angles; the kernel positivity and domination
/// diagnostics.
pub fn kernel_scan(ctx: &AnnulusContext, nodes: usize) -> Result<(f64, f64), CalculusError> {
    let mut min_mu = f64::INFINITY;
    let mut min_dom = f64::INFINITY;
    for j in 0..nodes {
        let theta = TAU * j as f64 / nodes as f64;
        let mu = kernel_mu(ctx, theta, &ctx.a)?;
        let eig_mu = linalg::hermitian_eigen(&mu)?;
        min_mu = min_mu.min(eig_mu.values[0]);
        let dom = kernel_m(ctx, theta).hermitian_part().sub(&kernel_n(ctx, theta));
        let eig_dom = linalg::hermitian_eigen(&dom)?;
        min_dom = min_dom.min(eig_dom.values[0]);
    }
    Ok((min_mu, min_dom))
}
