use nalgebra::DMatrix;

use super::ops::BandedOp;
use crate::{Error, Result, C64};

/// Per-substep norm bound for the truncated Taylor series.
const SUBSTEP_NORM: f64 = 4.0;
const MAX_TERMS: usize = 60;

/// `exp(G) v` for a banded generator by scaled Taylor series.
///
/// The interval is split into `s = ceil(‖G‖₁ / 4)` substeps and each substep
/// sums the series until two consecutive terms fall below unit roundoff.
pub fn expm_action(g: &BandedOp, v: &[C64]) -> Result<Vec<C64>> {
    let n = g.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    let norm = g.one_norm();
    if !norm.is_finite() {
        return Err(Error::InvalidInput("non-finite generator".into()));
    }
    if norm == 0.0 {
        return Ok(v.to_vec());
    }
    let s = (norm / SUBSTEP_NORM).ceil().max(1.0) as usize;
    let h = C64::new(1.0 / s as f64, 0.0);
    let mut acc = v.to_vec();
    let mut term = vec![C64::new(0.0, 0.0); n];
    let mut next = vec![C64::new(0.0, 0.0); n];
    for _ in 0..s {
        term.copy_from_slice(&acc);
        let scale = inf_norm(&acc);
        let mut small = 0;
        for k in 1..=MAX_TERMS {
            g.apply_into(&term, &mut next);
            let f = h / k as f64;
            for (t, x) in term.iter_mut().zip(&next) {
                *t = x * f;
            }
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if inf_norm(&term) <= f64::EPSILON * 0.5 * scale {
                small += 1;
                if small == 2 {
                    break;
                }
            } else {
                small = 0;
            }
            if k == MAX_TERMS {
                return Err(Error::Inconsistent("Taylor series for exp(G)v did not converge".into()));
            }
        }
    }
    Ok(acc)
}

fn inf_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Dense matrix exponential by [13/13] Padé approximation with scaling and
/// squaring.
pub fn expm_dense(a: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    let norm = (0..n).map(|j| a.column(j).iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max);
    if !norm.is_finite() {
        return Err(Error::InvalidInput("non-finite matrix".into()));
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a * C64::new(2f64.powi(-s), 0.0);
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9)) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8)) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| Error::Inconsistent("singular Padé denominator".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}
