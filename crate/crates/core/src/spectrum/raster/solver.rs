//! Sparse symmetric eigensolver for the grid Laplacian.
//!
//! The operator is factorised once with a skyline (envelope) Cholesky in the
//! natural row-major node order, whose envelope is one grid row wide. The
//! lowest eigenvalues are then found by block Lanczos on the shifted inverse
//! with full reorthogonalisation and a fixed-seed start block, so the result
//! is deterministic and multiplicities up to the block size are resolved.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectrum::SpectrumError;

/// Symmetric matrix in skyline storage: row `i` holds columns `first[i]..=i`.
#[derive(Debug, Clone)]
pub(crate) struct SkylineMatrix {
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
}

impl SkylineMatrix {
    /// Build from lower-triangle entries `(row, col, value)` with `col <= row`.
    pub(crate) fn from_lower(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut first: Vec<usize> = (0..n).collect();
        for &(r, c, _) in entries {
            debug_assert!(c <= r);
            first[r] = first[r].min(c);
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut off = 0;
        for (i, &f) in first.iter().enumerate() {
            start.push(off);
            off += i - f + 1;
        }
        start.push(off);
        let mut values = vec![0.0; off];
        for &(r, c, v) in entries {
            values[start[r] + c - first[r]] += v;
        }
        SkylineMatrix { first, start, values }
    }

    pub(crate) fn dim(&self) -> usize {
        self.first.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[self.start[i]..self.start[i + 1]]
    }

    /// In-place `L L^T` factorisation within the envelope.
    pub(crate) fn cholesky(mut self) -> Result<SkylineCholesky, SpectrumError> {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let si = self.start[i];
            for j in fi..i {
                let fj = self.first[j];
                let sj = self.start[j];
                let k0 = fi.max(fj);
                let len = j - k0;
                let (head, tail) = self.values.split_at_mut(si);
                let lj = &head[sj + k0 - fj..sj + k0 - fj + len];
                let li = &tail[k0 - fi..k0 - fi + len];
                let dot: f64 = li.iter().zip(lj).map(|(a, b)| a * b).sum();
                let diag = head[sj + j - fj];
                tail[j - fi] = (tail[j - fi] - dot) / diag;
            }
            let row = &mut self.values[si..self.start[i + 1]];
            let (off, d) = row.split_at_mut(i - fi);
            let s = d[0] - off.iter().map(|v| v * v).sum::<f64>();
            if s <= 0.0 || s.is_nan() {
                return Err(SpectrumError::NotPositiveDefinite { row: i });
            }
            d[0] = s.sqrt();
        }
        Ok(SkylineCholesky { l: self })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SkylineCholesky {
    l: SkylineMatrix,
}

impl SkylineCholesky {
    /// Solve `L L^T x = b` in place.
    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.l.dim();
        for i in 0..n {
            let fi = self.l.first[i];
            let row = self.l.row(i);
            let dot: f64 = row[..i - fi].iter().zip(&x[fi..i]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - dot) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.l.first[i];
            let row = self.l.row(i);
            x[i] /= row[i - fi];
            let xi = x[i];
            for (xk, lik) in x[fi..i].iter_mut().zip(&row[..i - fi]) {
                *xk -= lik * xi;
            }
        }
    }
}

const BLOCK: usize = 6;
const RESIDUAL_TOL: f64 = 1e-11;
const START_SEED: u64 = 0x5eed_1a9c_0b10_c4a5;

/// Largest `nev` eigenvalues of the SPD operator `inv` (applied through its
/// Cholesky factor), returned in descending order.
pub(crate) fn largest_inverse_eigenvalues(chol: &SkylineCholesky, nev: usize) -> Result<Vec<f64>, SpectrumError> {
    let n = chol.l.dim();
    let nev = nev.min(n);
    let b = BLOCK.min(n);
    let max_dim = n.min(4 * nev + 40 * BLOCK + 200);

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();

    let mut block: Vec<Vec<f64>> = Vec::new();
    for _ in 0..b {
        let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        if let Some(v) = orthonormalise(v, &basis, &block) {
            block.push(v);
        }
    }

    let mut steps = 0;
    let mut last_check = 0;
    loop {
        steps += 1;
        let mut new_images = Vec::with_capacity(block.len());
        for v in &block {
            let mut w = v.clone();
            chol.solve_in_place(&mut w);
            new_images.push(w);
        }
        basis.append(&mut block);
        images.extend(new_images);
        let m = basis.len();

        // next block: images of the newest vectors, orthogonalised
        let mut next: Vec<Vec<f64>> = Vec::new();
        for w in &images[m - b.min(m)..] {
            if let Some(v) = orthonormalise(w.clone(), &basis, &next) {
                next.push(v);
            }
        }
        // deflated directions are replaced by fresh random ones
        while next.len() < b && m + next.len() < n {
            let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
            if let Some(v) = orthonormalise(v, &basis, &next) {
                next.push(v);
            } else {
                break;
            }
        }

        let exhausted = next.is_empty() || m >= max_dim;
        let due = exhausted || (m >= nev + b && m - last_check >= (m / 8).max(b));
        if due {
            last_check = m;
            let (values, converged) = ritz(&basis, &images, nev);
            if converged || next.is_empty() {
                return Ok(values);
            }
        }
        if exhausted {
            return Err(SpectrumError::NonConvergent { iterations: steps });
        }
        block = next;
    }
}

/// Rayleigh-Ritz on span(basis). Convergence is judged from the true
/// residual of each wanted Ritz pair.
fn ritz(basis: &[Vec<f64>], images: &[Vec<f64>], nev: usize) -> (Vec<f64>, bool) {
    let m = basis.len();
    let mut h = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        for i in 0..=j {
            let v = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let n = basis[0].len();
    let mut values = Vec::with_capacity(nev);
    let mut converged = true;
    for &k in order.iter().take(nev) {
        let theta = eig.eigenvalues[k];
        let y = eig.eigenvectors.column(k);
        // r = images * y - theta * basis * y
        let mut r = vec![0.0; n];
        for (j, &c) in y.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let (img, bas) = (&images[j], &basis[j]);
            for ((ri, a), b) in r.iter_mut().zip(img).zip(bas) {
                *ri += c * (a - theta * b);
            }
        }
        if norm(&r) > RESIDUAL_TOL * theta.abs() {
            converged = false;
        }
        values.push(theta);
    }
    (values, converged)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Two passes of classical Gram-Schmidt against `basis` and `extra`. `None`
/// if `v` is numerically in their span.
fn orthonormalise(mut v: Vec<f64>, basis: &[Vec<f64>], extra: &[Vec<f64>]) -> Option<Vec<f64>> {
    let raw = norm(&v);
    for _ in 0..2 {
        for q in basis.iter().chain(extra) {
            let c = dot(q, &v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
    let r = norm(&v);
    if r <= 1e-10 * raw || !r.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= r);
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_laplacian(n: usize) -> SkylineMatrix {
        let mut e = Vec::new();
        for i in 0..n {
            e.push((i, i, 2.0));
            if i > 0 {
                e.push((i, i - 1, -1.0));
            }
        }
        SkylineMatrix::from_lower(n, &e)
    }

    #[test]
    fn cholesky_solves() {
        let n = 50;
        let chol = path_laplacian(n).cholesky().unwrap();
        // A x = b with x = 1..n
        let x: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = 2.0 * x[i] - if i > 0 { x[i - 1] } else { 0.0 } - if i + 1 < n { x[i + 1] } else { 0.0 };
        }
        chol.solve_in_place(&mut b);
        for (got, want) in b.iter().zip(&x) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn not_positive_definite_is_reported() {
        let m = SkylineMatrix::from_lower(2, &[(0, 0, 1.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(m.cholesky(), Err(SpectrumError::NotPositiveDefinite { row: 1 })));
    }

    #[test]
    fn path_graph_eigenvalues() {
        // eigenvalues of tridiag(-1, 2, -1): 2 - 2 cos(k pi / (n+1))
        let n = 400;
        let chol = path_laplacian(n).cholesky().unwrap();
        let got = largest_inverse_eigenvalues(&chol, 8).unwrap();
        for (k, theta) in got.iter().enumerate() {
            let lam = 2.0 - 2.0 * ((k as f64 + 1.0) * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((1.0 / theta - lam).abs() < 1e-10 * lam, "k={k}");
        }
    }

    #[test]
    fn resolves_exact_multiplicity() {
        // two identical decoupled path graphs: every eigenvalue is double
        let n = 120;
        let mut e = Vec::new();
        for part in 0..2 {
            for i in 0..n {
                let r = part * n + i;
                e.push((r, r, 2.0));
                if i > 0 {
                    e.push((r, r - 1, -1.0));
                }
            }
        }
        let chol = SkylineMatrix::from_lower(2 * n, &e).cholesky().unwrap();
        let got = largest_inverse_eigenvalues(&chol, 6).unwrap();
        for k in 0..3 {
            assert!((got[2 * k] - got[2 * k + 1]).abs() < 1e-9 * got[2 * k]);
        }
    }

    #[test]
    fn tiny_problem_is_solved_exactly() {
        let chol = path_laplacian(3).cholesky().unwrap();
        let got = largest_inverse_eigenvalues(&chol, 3).unwrap();
        assert_eq!(got.len(), 3);
    }
}
