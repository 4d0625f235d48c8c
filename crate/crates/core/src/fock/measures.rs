use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::state::{DensityMatrix, FockState};
use crate::{Error, Result, C64};

/// First and second moments of the field: `⟨a⟩`, `⟨a†a⟩`, `⟨a²⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub a: C64,
    pub n: f64,
    pub a2: C64,
}

impl Moments {
    pub fn coherent(alpha: C64) -> Self {
        Self { a: alpha, n: alpha.norm_sqr(), a2: alpha * alpha }
    }

    /// Centered `⟨a²⟩ − ⟨a⟩²`.
    pub fn centered_a2(&self) -> C64 {
        self.a2 - self.a * self.a
    }

    /// Centered `⟨a†a⟩ − |⟨a⟩|²`.
    pub fn centered_n(&self) -> f64 {
        self.n - self.a.norm_sqr()
    }
}

/// Borrowed pure or mixed state.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a FockState),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a FockState> for StateRef<'a> {
    fn from(s: &'a FockState) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    pub fn n_max(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.n_max(),
            StateRef::Mixed(r) => r.n_max(),
        }
    }

    pub fn moments(&self) -> Moments {
        match self {
            StateRef::Pure(s) => s.moments(),
            StateRef::Mixed(r) => r.moments(),
        }
    }
}

/// `⟨ψ|O|ψ⟩` or `Tr(ρO)`.
///
/// Terms `(i, j)` and `(j, i)` are added pairwise so that
/// `expectation(s, O†)` is bitwise the conjugate of `expectation(s, O)`.
pub fn expectation<'a>(state: impl Into<StateRef<'a>>, op: &DMatrix<C64>) -> Result<C64> {
    let state = state.into();
    let n = state.n_max();
    if op.nrows() != n || op.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: op.nrows() });
    }
    // w(i, j) multiplies O[(i, j)]; w(j, i) is the exact conjugate of w(i, j)
    let sum = |w: &dyn Fn(usize, usize) -> C64| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            acc += w(i, i) * op[(i, i)];
            for j in i + 1..n {
                acc += w(i, j) * op[(i, j)] + w(j, i) * op[(j, i)];
            }
        }
        acc
    };
    Ok(match state {
        StateRef::Pure(s) => {
            let v = s.amplitudes();
            sum(&|i, j| v[i].conj() * v[j])
        }
        StateRef::Mixed(r) => {
            let m = r.matrix();
            sum(&|i, j| (m[(j, i)] + m[(i, j)].conj()) * 0.5)
        }
    })
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Distance between phase-space centers, `|⟨a⟩₂ − ⟨a⟩₁|`.
pub fn phase_space_distance<'a, 'b>(s1: impl Into<StateRef<'a>>, s2: impl Into<StateRef<'b>>) -> f64 {
    (s2.into().moments().a - s1.into().moments().a).norm()
}

/// Angle in `[0, π)` of the axis of largest quadrature variance,
/// `arg(⟨a²⟩ − ⟨a⟩²)/2`. For `S(re^{iφ})|γ⟩` this is `φ/2`.
pub fn squeeze_axis<'a>(state: impl Into<StateRef<'a>>) -> f64 {
    let c = state.into().moments().centered_a2();
    (0.5 * c.arg()).rem_euclid(std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::super::{annihilation_matrix, coherent_state, number_matrix};
    use super::*;

    #[test]
    fn basic_expectations() {
        let v = FockState::vacuum(16).unwrap();
        assert_eq!(expectation(&v, &number_matrix(16).unwrap()).unwrap(), C64::new(0.0, 0.0));
        let c = coherent_state(C64::new(1.0, 0.0), 40).unwrap();
        let a = annihilation_matrix(40).unwrap();
        assert!((expectation(&c, &a).unwrap() - 1.0).norm() < 1e-10);
        let rho = c.to_density();
        assert!((expectation(&rho, &a).unwrap() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn conjugate_symmetry() {
        let c = coherent_state(C64::new(0.4, 1.1), 64).unwrap().apply_squeeze(C64::new(0.2, 0.5)).unwrap();
        let a = annihilation_matrix(64).unwrap();
        let o = &a * &a + &a * C64::new(0.3, -0.2);
        let lhs = expectation(&c, &o.adjoint()).unwrap();
        let rhs = expectation(&c, &o).unwrap().conj();
        assert_eq!(lhs, rhs);
        let rho = c.to_density();
        assert_eq!(expectation(&rho, &o.adjoint()).unwrap(), expectation(&rho, &o).unwrap().conj());
    }

    #[test]
    fn mixture_purity() {
        let alpha = C64::new(2.0, 0.0);
        let p = coherent_state(alpha, 64).unwrap();
        let m = coherent_state(-alpha, 64).unwrap();
        let rho = DensityMatrix::mixture(&[(0.5, &p), (0.5, &m)]).unwrap();
        let expected = 0.5 * (1.0 + (-4.0 * alpha.norm_sqr()).exp());
        assert!((purity(&rho) - expected).abs() < 1e-8);
    }

    #[test]
    fn distances() {
        let alpha = C64::new(2f64.sqrt(), 0.0);
        let p = coherent_state(alpha, 64).unwrap();
        let m = coherent_state(-alpha, 64).unwrap();
        assert_eq!(phase_space_distance(&p, &p), 0.0);
        assert!((phase_space_distance(&p, &m) - 2.0 * alpha.re).abs() < 1e-10);
    }

    #[test]
    fn anti_squeezed_alignment_gives_two_alpha_e_r() {
        // displacement along the stretched axis of S(re^{iφ}): γ = ±α e^{iφ/2}
        let (alpha, r, phi) = (2f64.sqrt(), 1.0, 0.6);
        let n = 256;
        let eps = C64::from_polar(r, phi);
        let dir = C64::from_polar(1.0, phi / 2.0);
        let s1 = FockState::vacuum(n).unwrap().apply_displacement(dir * alpha).unwrap().apply_squeeze(eps).unwrap();
        let s2 = FockState::vacuum(n).unwrap().apply_displacement(-dir * alpha).unwrap().apply_squeeze(eps).unwrap();
        let d = phase_space_distance(&s1, &s2);
        assert!((d - 2.0 * alpha * r.exp()).abs() < 1e-4, "{d}");
        assert!((squeeze_axis(&s1) - phi / 2.0).abs() < 1e-8);
    }
}
