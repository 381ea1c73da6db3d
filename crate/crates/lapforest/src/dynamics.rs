//! Consensus dynamics: the continuous flow `x' = -L x`, the discrete Perron
//! iteration `x(k+1) = P x(k)` with `P = I - eps L`, power and Cesaro
//! long-run matrices, and the primitive rank-one limit `v w^T`.
//!
//! Every limit computed here is another route to the same projector the
//! forest enumeration produces, which is what the cross-check battery
//! exploits.

use crate::digraph::LaplacianMatrix;
use crate::spectral::{self, SpectralError};
use nalgebra::{DMatrix, DVector};
use std::fmt::Write as _;
use thiserror::Error;

/// Entry tolerance for the stochasticity / positive-diagonal flags.
const FLAG_TOL: f64 = 1e-12;
/// An eigenvalue counts as "modulus one" when within this of the unit circle.
const UNIT_MODULUS_TOL: f64 = 1e-9;

pub const DEFAULT_POWER_TOL: f64 = 1e-12;
pub const DEFAULT_POWER_MAX_SQUARINGS: usize = 60;
pub const DEFAULT_CESARO_TOL: f64 = 1e-6;
pub const DEFAULT_CESARO_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("step size must be positive, got {epsilon}")]
    BadEpsilon { epsilon: f64 },
    #[error("P is not stochastic (smallest entry {min_entry:e}); reduce epsilon")]
    NotStochastic { min_entry: f64 },
    #[error("power mode needs a positive diagonal (smallest diagonal {min_diagonal:e})")]
    NoPositiveDiagonal { min_diagonal: f64 },
    #[error("P is not primitive: {unit_modulus_count} eigenvalues on the unit circle")]
    NotPrimitive { unit_modulus_count: usize },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("state vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("time horizon must be positive, got {t_end}")]
    BadTimeHorizon { t_end: f64 },
    #[error("dt = {dt} outside the stable range (0, {max_dt}]")]
    UnstableTimeStep { dt: f64, max_dt: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// How the long-run matrix is taken: plain power limit (needs an aperiodic
/// chain, guaranteed by a positive diagonal) or the Cesaro average, which
/// exists for every stochastic `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LongRunMode {
    Power,
    Cesaro,
}

/// The Perron matrix `P = I - eps L` with its classification flags.
#[derive(Debug, Clone)]
pub struct PerronMatrix {
    epsilon: f64,
    matrix: DMatrix<f64>,
    laplacian: LaplacianMatrix,
    eigenvalue_moduli: Vec<f64>,
    stochastic: bool,
    positive_diagonal: bool,
    primitive: bool,
    unit_modulus_count: usize,
}

impl PerronMatrix {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn laplacian(&self) -> &LaplacianMatrix {
        &self.laplacian
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_stochastic(&self) -> bool {
        self.stochastic
    }

    pub fn has_positive_diagonal(&self) -> bool {
        self.positive_diagonal
    }

    /// Exactly one eigenvalue of modulus one.
    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn unit_modulus_count(&self) -> usize {
        self.unit_modulus_count
    }

    /// Largest eigenvalue modulus strictly below the unit circle; zero when
    /// every eigenvalue sits on it.
    pub fn subdominant_modulus(&self) -> f64 {
        self.eigenvalue_moduli
            .iter()
            .copied()
            .filter(|&m| m < 1.0 - UNIT_MODULUS_TOL)
            .fold(0.0, f64::max)
    }
}

/// Default step size `1/(2 max_i l_ii)`: strictly inside the stochasticity
/// region with a positive diagonal. The empty graph gets 1.
pub fn default_epsilon(l: &LaplacianMatrix) -> f64 {
    let max = l.max_diagonal();
    if max > 0.0 {
        1.0 / (2.0 * max)
    } else {
        1.0
    }
}

/// Builds `P = I - eps L` and classifies it. A non-stochastic `P` is
/// permitted here and only rejected by the operations that require
/// stochasticity.
pub fn perron(l: &LaplacianMatrix, epsilon: Option<f64>) -> Result<PerronMatrix, DynamicsError> {
    let epsilon = epsilon.unwrap_or_else(|| default_epsilon(l));
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(DynamicsError::BadEpsilon { epsilon });
    }
    let n = l.n();
    let matrix = DMatrix::<f64>::identity(n, n) - l.matrix() * epsilon;

    let min_entry = matrix.iter().copied().fold(f64::INFINITY, f64::min);
    let min_diagonal = (0..n).map(|i| matrix[(i, i)]).fold(f64::INFINITY, f64::min);
    let scale = matrix.abs().max().max(1.0);
    let stochastic = min_entry >= -FLAG_TOL * scale;
    let positive_diagonal = min_diagonal > FLAG_TOL * scale;

    let eigenvalue_moduli: Vec<f64> = spectral::complex_eigenvalues(&matrix)?
        .iter()
        .map(|ev| ev.norm())
        .collect();
    let unit_modulus_count = eigenvalue_moduli
        .iter()
        .filter(|&&m| (m - 1.0).abs() <= UNIT_MODULUS_TOL)
        .count();

    Ok(PerronMatrix {
        epsilon,
        matrix,
        laplacian: l.clone(),
        eigenvalue_moduli,
        stochastic,
        positive_diagonal,
        primitive: unit_modulus_count == 1,
        unit_modulus_count,
    })
}

/// Long-run transition matrix of `P`.
///
/// Power mode squares repeatedly and stops once successive squarings agree
/// within the tolerance (default 1e-12). Cesaro mode averages `P^k` with a
/// doubling recurrence for the partial sums and stops at the first `m`
/// where the running average is Cauchy within the tolerance (default 1e-6,
/// `m` capped at 1e6). Both limits equal the eigenprojector of `L`.
pub fn long_run_matrix(
    p: &PerronMatrix,
    mode: LongRunMode,
    tolerance: Option<f64>,
    max_iter: Option<usize>,
) -> Result<DMatrix<f64>, DynamicsError> {
    if !p.stochastic {
        let min_entry = p.matrix.iter().copied().fold(f64::INFINITY, f64::min);
        return Err(DynamicsError::NotStochastic { min_entry });
    }
    match mode {
        LongRunMode::Power => {
            if !p.positive_diagonal {
                let min_diagonal = (0..p.n())
                    .map(|i| p.matrix[(i, i)])
                    .fold(f64::INFINITY, f64::min);
                return Err(DynamicsError::NoPositiveDiagonal { min_diagonal });
            }
            let tol = tolerance.unwrap_or(DEFAULT_POWER_TOL);
            let max_squarings = max_iter.unwrap_or(DEFAULT_POWER_MAX_SQUARINGS);
            let mut q = p.matrix.clone();
            let mut residual = f64::INFINITY;
            for step in 0..max_squarings {
                let squared = &q * &q;
                residual = (&squared - &q).abs().max();
                q = squared;
                if residual < tol {
                    return Ok(q);
                }
                let _ = step;
            }
            Err(DynamicsError::NonConvergence {
                iterations: max_squarings,
                residual,
            })
        }
        LongRunMode::Cesaro => {
            let tol = tolerance.unwrap_or(DEFAULT_CESARO_TOL);
            let max_m = max_iter.unwrap_or(DEFAULT_CESARO_MAX_ITER);
            // S(2m) = S(m) + P^m S(m); the average at m doubles each round.
            let mut power = p.matrix.clone(); // P^m
            let mut sum = p.matrix.clone(); // S(m)
            let mut m = 1usize;
            let mut average = sum.clone();
            let mut residual = f64::INFINITY;
            while m <= max_m {
                let next_sum = &sum + &power * &sum;
                power = &power * &power;
                sum = next_sum;
                m *= 2;
                let next_average = sum.map(|x| x / m as f64);
                residual = (&next_average - &average).abs().max();
                average = next_average;
                if residual < tol {
                    return Ok(average);
                }
            }
            Err(DynamicsError::NonConvergence {
                iterations: m,
                residual,
            })
        }
    }
}

/// The rank-one limit of a primitive stochastic Perron matrix.
#[derive(Debug, Clone)]
pub struct PrimitiveLimit {
    /// Right eigenvector of `P` at eigenvalue 1: the all-ones vector.
    pub right: DVector<f64>,
    /// Nonnegative left eigenvector at eigenvalue 1, scaled so that the
    /// inner product with `right` is 1 (its entries sum to 1).
    pub left: DVector<f64>,
    /// The outer product `right * left^T`, equal to `lim P^k`.
    pub outer: DMatrix<f64>,
}

/// Computes `lim P^k = v w^T` for a primitive stochastic `P`: `v` is the
/// all-ones right eigenvector, `w` the left eigenvector found as the null
/// direction of `P^T - I`, normalized to `sum_i v_i w_i = 1`.
pub fn primitive_limit(p: &PerronMatrix) -> Result<PrimitiveLimit, DynamicsError> {
    if !p.stochastic {
        let min_entry = p.matrix.iter().copied().fold(f64::INFINITY, f64::min);
        return Err(DynamicsError::NotStochastic { min_entry });
    }
    if !p.primitive {
        return Err(DynamicsError::NotPrimitive {
            unit_modulus_count: p.unit_modulus_count,
        });
    }
    let n = p.n();
    let shifted = p.matrix.transpose() - DMatrix::<f64>::identity(n, n);
    let svd = shifted
        .try_svd(false, true, f64::EPSILON, 100_000)
        .ok_or(SpectralError::NonConvergence {
            decomposition: "SVD",
        })?;
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let smallest = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .expect("nonempty singular values");

    let mut left = DVector::from_iterator(n, v_t.row(smallest).iter().copied());
    let total: f64 = left.sum();
    if total < 0.0 {
        left.neg_mut();
    }
    let total: f64 = left.sum();
    left /= total;

    let right = DVector::from_element(n, 1.0);
    let outer = &right * left.transpose();
    Ok(PrimitiveLimit { right, left, outer })
}

/// A simulated trajectory with its predicted limit.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    /// Sample times (continuous) or step indices as floats (discrete).
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    /// The projector applied to the initial state.
    pub limit_prediction: DVector<f64>,
}

impl TrajectoryRecord {
    pub fn n(&self) -> usize {
        self.limit_prediction.len()
    }

    /// Max-norm distance between the final state and the predicted limit.
    pub fn final_deviation(&self) -> f64 {
        let last = self.states.last().expect("trajectory has at least x0");
        (last - &self.limit_prediction).abs().max()
    }

    /// CSV with header `t,x0,x1,...,x{n-1}`, one row per sample.
    pub fn to_csv(&self) -> String {
        let n = self.n();
        let mut out = String::from("t");
        for i in 0..n {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for (t, state) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t}");
            for value in state.iter() {
                let _ = write!(out, ",{value}");
            }
            out.push('\n');
        }
        out
    }
}

/// Iterates `x(k+1) = P x(k)` for `steps` steps, recording every state.
pub fn simulate_discrete(
    p: &PerronMatrix,
    x0: &DVector<f64>,
    steps: usize,
) -> Result<TrajectoryRecord, DynamicsError> {
    if x0.len() != p.n() {
        return Err(DynamicsError::DimensionMismatch {
            expected: p.n(),
            got: x0.len(),
        });
    }
    let limit_prediction = projector_prediction(&p.laplacian, x0)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    states.push(x0.clone());
    times.push(0.0);
    let mut x = x0.clone();
    for k in 1..=steps {
        x = &p.matrix * &x;
        states.push(x.clone());
        times.push(k as f64);
    }
    Ok(TrajectoryRecord {
        times,
        states,
        limit_prediction,
    })
}

/// Integrates `x' = -L x` with the classical fourth-order one-step method,
/// sampling every `dt` and landing exactly on `t_end`.
pub fn simulate_continuous(
    l: &LaplacianMatrix,
    x0: &DVector<f64>,
    t_end: f64,
    dt: f64,
) -> Result<TrajectoryRecord, DynamicsError> {
    if x0.len() != l.n() {
        return Err(DynamicsError::DimensionMismatch {
            expected: l.n(),
            got: x0.len(),
        });
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(DynamicsError::BadTimeHorizon { t_end });
    }
    let max_degree = l.max_diagonal();
    let max_dt = if max_degree > 0.0 {
        0.5 / max_degree
    } else {
        f64::INFINITY
    };
    if !(dt.is_finite() && dt > 0.0 && dt <= max_dt) {
        return Err(DynamicsError::UnstableTimeStep { dt, max_dt });
    }

    let limit_prediction = projector_prediction(l, x0)?;
    let m = l.matrix();
    let rhs = |x: &DVector<f64>| -(m * x);

    let mut states = vec![x0.clone()];
    let mut times = vec![0.0];
    let mut x = x0.clone();
    let mut t = 0.0;
    while t < t_end {
        let step = dt.min(t_end - t);
        let k1 = rhs(&x);
        let k2 = rhs(&(&x + &k1 * (step / 2.0)));
        let k3 = rhs(&(&x + &k2 * (step / 2.0)));
        let k4 = rhs(&(&x + &k3 * step));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (step / 6.0);
        t = if t + step >= t_end { t_end } else { t + step };
        states.push(x.clone());
        times.push(t);
    }
    Ok(TrajectoryRecord {
        times,
        states,
        limit_prediction,
    })
}

fn projector_prediction(
    l: &LaplacianMatrix,
    x0: &DVector<f64>,
) -> Result<DVector<f64>, DynamicsError> {
    let jbar = spectral::eigenprojector_resolvent(l, spectral::DEFAULT_RESOLVENT_TAU)?;
    Ok(&jbar * x0)
}
