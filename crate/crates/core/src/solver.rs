//! Preconditioned conjugate gradients and extreme-eigenvalue estimates.

use crate::assembly::{transform_system, LinearSystem};
use crate::error::SolverError;
use crate::sparse::{dot, norm, CsrMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgOptions {
    /// Relative residual target `‖b - Ax‖ / ‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
    pub jacobi: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 20_000,
            jacobi: true,
        }
    }
}

/// State after each CG iteration, for instrumentation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgStep {
    pub iteration: usize,
    pub residual: f64,
    /// `‖x_k‖_A² - 2 bᵀx_k`, which CG decreases monotonically.
    pub energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `A x = b` by (Jacobi-preconditioned) conjugate gradients from `x0`.
pub fn cg(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    opts: &CgOptions,
    mut observer: impl FnMut(&CgStep),
) -> Result<CgResult, SolverError> {
    let n = b.len();
    let b_norm = norm(b);
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    if b_norm == 0.0 {
        return Ok(CgResult {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = if opts.jacobi {
        a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect()
    } else {
        vec![1.0; n]
    };
    let mut ax = vec![0.0; n];
    a.mul_vec_into(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut residual = norm(&r) / b_norm;
    // energy bookkeeping: E(x) = xᵀAx - 2bᵀx = -xᵀ(b + r)
    let energy = |x: &[f64], r: &[f64]| -x.iter().zip(b.iter().zip(r)).map(|(x, (b, r))| x * (b + r)).sum::<f64>();

    for it in 0..opts.max_iter {
        if residual <= opts.tol {
            return Ok(CgResult {
                x,
                iterations: it,
                residual,
            });
        }
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(SolverError::NotPositiveDefinite(pap));
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
            z[k] = r[k] * inv_diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        residual = norm(&r) / b_norm;
        observer(&CgStep {
            iteration: it + 1,
            residual,
            energy: energy(&x, &r),
        });
    }
    if residual <= opts.tol {
        return Ok(CgResult {
            x,
            iterations: opts.max_iter,
            residual,
        });
    }
    Err(SolverError::MaxIterationsExceeded {
        iterations: opts.max_iter,
        residual,
    })
}

/// Solves a constrained system, optionally in the basis `x = S x̂`.
pub fn cg_solve(system: &LinearSystem, opts: &CgOptions, transform: Option<&CsrMatrix>) -> Result<CgResult, SolverError> {
    match transform {
        None => cg(&system.matrix, &system.rhs, None, opts, |_| {}),
        Some(s) => {
            let hat = transform_system(system, s);
            let out = cg(&hat.matrix, &hat.rhs, None, opts, |_| {})?;
            Ok(CgResult {
                x: s.mul_vec(&out.x),
                ..out
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionEstimate {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub cond: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    /// Relative change of the Rayleigh quotient at convergence.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative residual of the inner solves.
    pub inner_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 20_000,
            inner_tol: 1e-10,
        }
    }
}

fn start_vector(n: usize) -> Vec<f64> {
    // fixed pseudo-random start, deterministic across runs
    let mut state = 0x9e37_79b9_7f4a_7c15_u64;
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 + 0.5
        })
        .collect();
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Largest eigenvalue by power iteration.
pub fn power_iteration(a: &CsrMatrix, opts: &EigenOptions) -> (f64, usize) {
    let n = a.n_rows;
    let mut v = start_vector(n);
    let mut w = vec![0.0; n];
    let mut lambda = 0.0;
    for it in 1..=opts.max_iter {
        a.mul_vec_into(&v, &mut w);
        let next = dot(&v, &w);
        let s = norm(&w);
        v.iter_mut().zip(&w).for_each(|(v, w)| *v = w / s);
        if (next - lambda).abs() <= opts.tol * next.abs() {
            return (next, it);
        }
        lambda = next;
    }
    (lambda, opts.max_iter)
}

/// Smallest eigenvalue by inverse iteration with CG inner solves.
pub fn inverse_iteration(a: &CsrMatrix, opts: &EigenOptions) -> Result<(f64, usize), SolverError> {
    let n = a.n_rows;
    let mut v = start_vector(n);
    let mut mu = f64::INFINITY;
    let inner = CgOptions {
        tol: opts.inner_tol,
        max_iter: 100_000,
        jacobi: true,
    };
    let mut total = 0;
    let mut guess: Option<Vec<f64>> = None;
    for _ in 0..opts.max_iter {
        let sol = cg(a, &v, guess.as_deref(), &inner, |_| {})?;
        total += 1;
        // Rayleigh quotient of the new iterate: wᵀAw / wᵀw with Aw ≈ v
        let w = sol.x;
        let next = dot(&w, &v) / dot(&w, &w);
        let s = norm(&w);
        v = w.iter().map(|x| x / s).collect();
        guess = Some(v.iter().map(|x| x / next).collect());
        if (next - mu).abs() <= opts.tol * next.abs() {
            return Ok((next, total));
        }
        mu = next;
    }
    Ok((mu, total))
}

/// Extreme eigenvalues and condition number of an SPD matrix.
pub fn estimate_condition(a: &CsrMatrix, opts: &EigenOptions) -> Result<ConditionEstimate, SolverError> {
    let (lambda_max, it_max) = power_iteration(a, opts);
    let (lambda_min, it_min) = inverse_iteration(a, opts)?;
    Ok(ConditionEstimate {
        lambda_max,
        lambda_min,
        cond: lambda_max / lambda_min,
        iterations: it_max + it_min,
    })
}

/// Condition number of a constrained system on its free degrees of freedom.
pub fn estimate_system_condition(system: &LinearSystem, opts: &EigenOptions) -> Result<ConditionEstimate, SolverError> {
    estimate_condition(&system.matrix.submatrix(&system.free_dofs()), opts)
}
