//! Sparse symmetric matrices and preconditioned conjugate gradients.

use rayon::prelude::*;

/// Compressed sparse row matrix.
pub(crate) struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Assembles from (row, col, value) triplets; duplicates are summed in input order.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, cols, vals }
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *yi = s;
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| (self.row_ptr[i]..self.row_ptr[i + 1]).find(|&k| self.cols[k] == i).map_or(0.0, |k| self.vals[k])).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // fixed chunking keeps the reduction order independent of the thread count
    a.par_chunks(4096).zip(b.par_chunks(4096)).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>()).collect::<Vec<_>>().iter().sum()
}

/// Solves `A x = b` for symmetric positive (semi)definite `A` with the
/// unknown at `pin` fixed to zero, by Jacobi-preconditioned CG.
/// Returns the solution and the iteration count.
pub(crate) fn pcg_pinned(a: &Csr, b: &[f64], pin: usize, rel_tol: f64, max_iter: usize) -> (Vec<f64>, usize) {
    let n = a.n;
    let diag = a.diagonal();
    let inv_d: Vec<f64> = diag.iter().enumerate().map(|(i, &d)| if i == pin || d <= 0.0 { 0.0 } else { 1.0 / d }).collect();
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = b.to_vec();
    r[pin] = 0.0;
    let bnorm = dot(&r, &r).sqrt();
    if bnorm == 0.0 {
        return (x, 0);
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_d).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        a.mul(&p, &mut ap);
        ap[pin] = 0.0;
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return (x, it);
        }
        let alpha = rz / pap;
        x.par_iter_mut().zip(&p).for_each(|(x, p)| *x += alpha * p);
        r.par_iter_mut().zip(&ap).for_each(|(r, ap)| *r -= alpha * ap);
        if dot(&r, &r).sqrt() <= rel_tol * bnorm {
            return (x, it + 1);
        }
        z.par_iter_mut().zip(&r).zip(&inv_d).for_each(|((z, r), d)| *z = r * d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    (x, max_iter)
}
