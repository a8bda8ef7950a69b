use nalgebra::{DMatrix, DVector};
use twodoor_core::{ksum, Error, Result};

pub const MAX_ITER: usize = 100;
pub const GRAD_TOL: f64 = 1e-8;
/// Coefficients beyond this magnitude are taken as a diverging fit.
pub const SEPARATION_BOUND: f64 = 25.0;
/// Smallest acceptable residual variance for a Gaussian density.
pub const VARIANCE_FLOOR: f64 = 1e-8;
const CONDITION_FLOOR: f64 = 1e-12;

/// Intercept plus the given columns, row-major.
fn design(cols: &[&[f64]], n: usize) -> Result<DMatrix<f64>> {
    if cols.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidData("predictor and response lengths differ".into()));
    }
    let p = cols.len() + 1;
    Ok(DMatrix::from_fn(n, p, |i, j| if j == 0 { 1.0 } else { cols[j - 1][i] }))
}

fn check_rank(gram: &DMatrix<f64>) -> Result<()> {
    let eig = gram.clone().symmetric_eigen().eigenvalues;
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min / max < CONDITION_FLOOR {
        return Err(Error::RankDeficient(format!(
            "design Gram matrix has eigenvalue ratio {:.3e}",
            min / max
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// Intercept first, then one coefficient per predictor column.
    pub coef: Vec<f64>,
    pub rss: f64,
    pub n: usize,
}

impl OlsFit {
    /// `RSS / (n − p)`.
    pub fn residual_variance(&self) -> f64 {
        self.rss / (self.n - self.coef.len()) as f64
    }
}

/// Least squares of `y` on an intercept and `cols`.
pub fn ols_fit(cols: &[&[f64]], y: &[f64]) -> Result<OlsFit> {
    let n = y.len();
    let x = design(cols, n)?;
    if n <= x.ncols() {
        return Err(Error::RankDeficient(format!("{n} rows for {} coefficients", x.ncols())));
    }
    let gram = x.tr_mul(&x);
    check_rank(&gram)?;
    let rhs = x.tr_mul(&DVector::from_column_slice(y));
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::RankDeficient("normal equations not positive definite".into()))?;
    let coef = chol.solve(&rhs);
    // one step of iterative refinement
    let coef = &coef + chol.solve(&(&rhs - &gram * &coef));
    let fitted = &x * &coef;
    let rss = ksum(y.iter().zip(fitted.iter()).map(|(a, b)| (a - b).powi(2)));
    Ok(OlsFit { coef: coef.iter().copied().collect(), rss, n })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub coef: Vec<f64>,
    pub iterations: usize,
    /// Euclidean norm of the mean score at the solution.
    pub grad_norm: f64,
}

/// Bernoulli maximum likelihood by iteratively reweighted least squares.
/// `y` must be 0/1.
pub fn logistic_fit(cols: &[&[f64]], y: &[f64]) -> Result<LogisticFit> {
    let n = y.len();
    if y.iter().any(|v| *v != 0.0 && *v != 1.0) {
        return Err(Error::InvalidData("logistic response must be 0/1".into()));
    }
    let x = design(cols, n)?;
    let p = x.ncols();
    check_rank(&x.tr_mul(&x))?;
    let yv = DVector::from_column_slice(y);
    let mut beta = DVector::<f64>::zeros(p);
    let mut grad_norm = f64::INFINITY;
    for it in 0..MAX_ITER {
        let eta = &x * &beta;
        let mu = eta.map(twodoor_core::expit);
        let grad = x.tr_mul(&(&yv - &mu)) / n as f64;
        grad_norm = grad.norm();
        if grad_norm < GRAD_TOL {
            return Ok(LogisticFit { coef: beta.iter().copied().collect(), iterations: it, grad_norm });
        }
        let w = mu.map(|m| m * (1.0 - m));
        let xw = DMatrix::from_fn(n, p, |i, j| x[(i, j)] * w[i]);
        let hess = x.tr_mul(&xw) / n as f64;
        let step = match hess.cholesky() {
            Some(ch) => ch.solve(&grad),
            None => {
                return Err(Error::SeparationDetected(format!(
                    "information matrix singular after {it} iterations"
                )))
            }
        };
        beta += step;
        let big = beta.amax();
        if !big.is_finite() || big > SEPARATION_BOUND {
            return Err(Error::SeparationDetected(format!(
                "coefficient magnitude {big:.3e} after {} iterations",
                it + 1
            )));
        }
    }
    Err(Error::MaxIterExceeded { iters: MAX_ITER, grad: grad_norm })
}
