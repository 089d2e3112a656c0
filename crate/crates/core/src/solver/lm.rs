//! Damped least squares with finite-difference Jacobians.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop once `‖r‖` drops below this.
    pub tol: f64,
    pub lambda0: f64,
    /// Central-difference step.
    pub fd_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iter: 400, tol: 1e-14, lambda0: 1e-3, fd_step: 1e-7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Central-difference Jacobian, `J[i][j] = ∂fᵢ/∂xⱼ`.
pub fn fd_jacobian<F>(f: &F, x: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut cols = Vec::with_capacity(x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        xp[j] = x[j] + h;
        let fp = f(&xp)?;
        xp[j] = x[j] - h;
        let fm = f(&xp)?;
        xp[j] = x[j];
        cols.push(DVector::from_iterator(fp.len(), fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h))));
    }
    Ok(DMatrix::from_columns(&cols))
}

/// Minimises `½‖f(x)‖²` from `x0`.
pub fn levenberg_marquardt<F>(f: &F, x0: &[f64], opts: &LmOptions) -> Result<LmOutcome>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    let mut cost = norm(&r);
    let mut lambda = opts.lambda0;
    let mut iterations = 0;
    while iterations < opts.max_iter && cost >= opts.tol {
        iterations += 1;
        let j = fd_jacobian(f, &x, opts.fd_step)?;
        let jt = j.transpose();
        let a = &jt * &j;
        let g = &jt * DVector::from_column_slice(&r);
        let mut improved = false;
        while lambda < 1e16 {
            let damped = &a + DMatrix::identity(x.len(), x.len()) * lambda;
            let Some(delta) = damped.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            let rt = f(&trial)?;
            let ct = norm(&rt);
            if ct < cost {
                let step = delta.norm();
                x = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-15);
                improved = step > 1e-17 * (1.0 + norm(&x));
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    Ok(LmOutcome { x, residual_norm: cost, iterations })
}
