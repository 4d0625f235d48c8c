use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Matrix of the annihilation operator, `a[n][n+1] = sqrt(n+1)`.
pub fn annihilation_matrix(n_max: usize) -> Result<DMatrix<C64>> {
    check_dim(n_max)?;
    let mut a = DMatrix::zeros(n_max, n_max);
    for n in 0..n_max - 1 {
        a[(n, n + 1)] = C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    Ok(a)
}

pub fn creation_matrix(n_max: usize) -> Result<DMatrix<C64>> {
    Ok(annihilation_matrix(n_max)?.adjoint())
}

pub fn number_matrix(n_max: usize) -> Result<DMatrix<C64>> {
    check_dim(n_max)?;
    Ok(DMatrix::from_fn(n_max, n_max, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) }))
}

pub(crate) fn check_dim(n_max: usize) -> Result<()> {
    if n_max < 2 {
        return Err(Error::InvalidDimension { n_max, min: 2 });
    }
    Ok(())
}

/// Pentadiagonal operator in the truncated number basis.
///
/// `band[d + 2][i]` holds the element at row `i`, column `i + d`, for
/// `d` in `-2..=2`. Quadratic forms in `a`, `a†` live here exactly, since the
/// truncated products `a†a`, `a²` and `a†²` carry no edge correction.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOp {
    n: usize,
    band: [Vec<C64>; 5],
}

/// Coefficients of `num a†a + ad2 a†² + a2 a² + ad a† + a a + id`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Quadratic {
    pub num: C64,
    pub ad2: C64,
    pub a2: C64,
    pub ad: C64,
    pub a: C64,
    pub id: C64,
}

impl BandedOp {
    pub fn zeros(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self { n, band: [z.clone(), z.clone(), z.clone(), z.clone(), z] }
    }

    pub fn quadratic(n: usize, q: Quadratic) -> Self {
        let mut op = Self::zeros(n);
        op.set_quadratic(q);
        op
    }

    /// Overwrite the bands with a quadratic form, reusing storage.
    pub fn set_quadratic(&mut self, q: Quadratic) {
        let n = self.n;
        for i in 0..n {
            let fi = i as f64;
            self.band[2][i] = q.num * fi + q.id;
            self.band[3][i] = if i + 1 < n { q.a * (fi + 1.0).sqrt() } else { C64::new(0.0, 0.0) };
            self.band[1][i] = if i >= 1 { q.ad * fi.sqrt() } else { C64::new(0.0, 0.0) };
            self.band[4][i] = if i + 2 < n { q.a2 * ((fi + 1.0) * (fi + 2.0)).sqrt() } else { C64::new(0.0, 0.0) };
            self.band[0][i] = if i >= 2 { q.ad2 * (fi * (fi - 1.0)).sqrt() } else { C64::new(0.0, 0.0) };
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let d = j as isize - i as isize;
        if d.abs() > 2 {
            return C64::new(0.0, 0.0);
        }
        self.band[(d + 2) as usize][i]
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for b in out.band.iter_mut() {
            for v in b.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for d in -2isize..=2 {
                let j = i as isize + d;
                if j >= 0 && (j as usize) < self.n {
                    out.band[(2 - d) as usize][j as usize] = self.band[(d + 2) as usize][i].conj();
                }
            }
        }
        out
    }

    /// `out = self * v`.
    pub fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        let n = self.n;
        debug_assert_eq!(v.len(), n);
        let [m2, m1, d0, p1, p2] = &self.band;
        for i in 0..n {
            let mut acc = d0[i] * v[i];
            if i >= 1 {
                acc += m1[i] * v[i - 1];
            }
            if i >= 2 {
                acc += m2[i] * v[i - 2];
            }
            if i + 1 < n {
                acc += p1[i] * v[i + 1];
            }
            if i + 2 < n {
                acc += p2[i] * v[i + 2];
            }
            out[i] = acc;
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.n];
        self.apply_into(v, &mut out);
        out
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut col = vec![0.0; self.n];
        for i in 0..self.n {
            for d in -2isize..=2 {
                let j = i as isize + d;
                if j >= 0 && (j as usize) < self.n {
                    col[j as usize] += self.band[(d + 2) as usize][i].norm();
                }
            }
        }
        col.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}
