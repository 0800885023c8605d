//! Compressed sparse row matrix and a diagonally preconditioned conjugate
//! gradient solver with Ritz-value extraction from the Lanczos recurrence.

use crate::error::SolveError;

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from per-row (column, value) lists; duplicate entries are
    /// summed in insertion order, columns sorted ascending.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut sum = 0.0;
                while k < row.len() && row[k].0 == col {
                    sum += row[k].1;
                    k += 1;
                }
                col_idx.push(col);
                values.push(sum);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            out[i] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Exact (bitwise) symmetry check.
    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                if self.get(j, i) != self.values[k] {
                    return false;
                }
            }
        }
        true
    }
}

/// Outcome of a conjugate gradient solve.
#[derive(Clone, Debug)]
pub struct CgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    /// Extreme Ritz values of the preconditioned operator.
    pub ritz_min: f64,
    pub ritz_max: f64,
    /// `ritz_max / ritz_min`; infinity when the smallest Ritz value is not
    /// positive, NaN when no iteration was taken.
    pub condition_estimate: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Extreme eigenvalues of the symmetric tridiagonal Lanczos matrix via
/// Sturm-sequence bisection.
fn tridiag_extremes(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    if n == 1 {
        return (diag[0], diag[0]);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i < n - 1 { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }

    // Number of eigenvalues strictly below lambda.
    let count_below = |lambda: f64| -> usize {
        let mut count = 0;
        let mut d = diag[0] - lambda;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let denom = if d.abs() < 1e-300 {
                1e-300_f64.copysign(d)
            } else {
                d
            };
            d = (diag[i] - lambda) - off[i - 1] * off[i - 1] / denom;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };

    let bisect = |target: usize| -> f64 {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if count_below(mid) >= target {
                b = mid;
            } else {
                a = mid;
            }
        }
        0.5 * (a + b)
    };

    (bisect(1), bisect(n))
}

struct CgState {
    x: Vec<f64>,
    iterations: usize,
    relative_residual: f64,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    converged: bool,
}

/// Preconditioned CG core. Runs until the relative preconditioned residual
/// drops below `tol` or `max_iter` is reached; `force_steps` disables the
/// tolerance test (used by the conditioning probe).
fn pcg_core(
    a: &CsrMatrix,
    b: &[f64],
    precond: &[f64],
    tol: f64,
    max_iter: usize,
    force_steps: bool,
) -> CgState {
    let n = a.n;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let apply_m = |r: &[f64], z: &mut Vec<f64>| {
        z.clear();
        z.extend(r.iter().zip(precond).map(|(ri, mi)| ri / mi));
    };

    let mut z = Vec::with_capacity(n);
    apply_m(&r, &mut z);
    let mut rz = dot(&r, &z);
    let rz0 = rz;
    if rz0 == 0.0 {
        return CgState {
            x,
            iterations: 0,
            relative_residual: 0.0,
            alphas: Vec::new(),
            betas: Vec::new(),
            converged: true,
        };
    }

    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut rel = 1.0;

    for k in 0..max_iter {
        a.matvec(&p, &mut ap);
        let p_ap = dot(&p, &ap);
        if p_ap == 0.0 || !p_ap.is_finite() {
            break;
        }
        let alpha = rz / p_ap;
        alphas.push(alpha);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        apply_m(&r, &mut z);
        let rz_new = dot(&r, &z);
        iterations = k + 1;
        rel = (rz_new / rz0).abs().sqrt();
        if !force_steps && rel <= tol {
            converged = true;
            break;
        }
        if rz_new == 0.0 {
            converged = true;
            rel = 0.0;
            break;
        }
        let beta = rz_new / rz;
        betas.push(beta);
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rz = rz_new;
    }

    CgState {
        x,
        iterations,
        relative_residual: rel,
        alphas,
        betas,
        converged: converged || force_steps,
    }
}

fn ritz_from_recurrence(alphas: &[f64], betas: &[f64]) -> (f64, f64, f64) {
    if alphas.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let m = alphas.len();
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    for j in 0..m {
        let mut d = 1.0 / alphas[j];
        if j > 0 {
            d += betas[j - 1] / alphas[j - 1];
        }
        diag.push(d);
        if j + 1 < m && j < betas.len() {
            off.push(betas[j].sqrt() / alphas[j]);
        }
    }
    let (min, max) = tridiag_extremes(&diag, &off[..m - 1]);
    let cond = if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    };
    (min, max, cond)
}

fn jacobi_preconditioner(a: &CsrMatrix) -> Vec<f64> {
    let diag = a.diagonal();
    let scale = diag
        .iter()
        .map(|d| d.abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    // Guard against non-positive diagonals (possible without ghost penalty
    // on degenerate cuts); the probe still has to run on such systems.
    diag.iter()
        .map(|&d| if d > 0.0 { d } else { d.abs().max(1e-14 * scale) })
        .collect()
}

/// Solve `A x = b` with diagonally preconditioned conjugate gradients.
pub fn pcg_solve(
    a: &CsrMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgResult, SolveError> {
    assert!(tol > 0.0);
    let precond = jacobi_preconditioner(a);
    let state = pcg_core(a, b, &precond, tol, max_iter, false);
    let (ritz_min, ritz_max, condition_estimate) =
        ritz_from_recurrence(&state.alphas, &state.betas);
    if !state.converged {
        return Err(SolveError::NonConvergence {
            iterations: state.iterations,
            relative_residual: state.relative_residual,
        });
    }
    Ok(CgResult {
        x: state.x,
        iterations: state.iterations,
        relative_residual: state.relative_residual,
        ritz_min,
        ritz_max,
        condition_estimate,
    })
}

/// Run a fixed number of CG steps purely to harvest Ritz values; never
/// fails, returns `(ritz_min, ritz_max, condition_estimate)`.
pub fn condition_probe(a: &CsrMatrix, b: &[f64], steps: usize) -> (f64, f64, f64) {
    let precond = jacobi_preconditioner(a);
    let state = pcg_core(a, b, &precond, 0.0, steps.min(a.n), true);
    ritz_from_recurrence(&state.alphas, &state.betas)
}
