use serde::{Deserialize, Serialize};

use super::evolution::OperatorFactors;
use crate::fock::FockState;
use crate::ode::Dopri5;
use crate::squeeze::{Branch, DriveConfig, PieceDrive};
use crate::{Error, Result, C64, I};

struct Tables {
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl Tables {
    fn new(n: usize) -> Self {
        Self {
            s1: (0..n).map(|k| (k as f64).sqrt()).collect(),
            s2: (0..n).map(|k| (k as f64 * (k as f64 - 1.0).max(0.0)).sqrt()).collect(),
        }
    }

    /// `out = −i (H + e) ψ` for `H = w a†a + ζ a†² + ζ* a² + ξ a† + ξ* a`.
    #[inline]
    fn rhs(&self, d: &PieceDrive, e: f64, t: f64, psi: &[C64], out: &mut [C64]) {
        let n = psi.len();
        let z = d.zeta(t);
        let zc = z.conj();
        let x = d.xi(t);
        let xc = x.conj();
        for k in 0..n {
            let mut h = psi[k] * (d.w * k as f64 + e);
            if k >= 2 {
                h += z * self.s2[k] * psi[k - 2];
            }
            if k + 2 < n {
                h += zc * self.s2[k + 2] * psi[k + 2];
            }
            if k >= 1 {
                h += x * self.s1[k] * psi[k - 1];
            }
            if k + 1 < n {
                h += xc * self.s1[k + 1] * psi[k + 1];
            }
            out[k] = -I * h;
        }
    }
}

fn check_norm(amps: &[C64], t: f64) -> Result<()> {
    let nrm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (nrm - 1.0).abs() > 1e-8 {
        return Err(Error::Integration { t, reason: format!("norm drifted to {nrm}") });
    }
    Ok(())
}

fn to_state(amps: Vec<C64>, tail_tol: f64) -> Result<FockState> {
    let s = FockState::from_amplitudes_unchecked(amps)?.with_tail_tol(tail_tol);
    s.check_tail()?;
    Ok(s)
}

/// Direct integration of `iψ̇ = H_ℓ(t)ψ` in the number basis through the
/// ascending `times`, starting from `psi0` at `times[0]`. `branch = None`
/// integrates the atom-free Hamiltonian.
pub fn schrodinger_oracle(
    cfg: &DriveConfig,
    branch: Option<Branch>,
    psi0: &FockState,
    times: &[f64],
    rtol: f64,
) -> Result<Vec<FockState>> {
    cfg.validate()?;
    if times.is_empty() || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("oracle times must be non-empty and ascending".into()));
    }
    let n = psi0.n_max();
    let tab = Tables::new(n);
    let solver = Dopri5::new(rtol, rtol * 1e-3);
    let mut y = psi0.amplitudes().to_vec();
    let mut out = vec![psi0.clone()];
    for w in times.windows(2) {
        for (ta, tb) in cfg.split(w[0], w[1]) {
            let d = cfg.piece(branch, ta, tb);
            solver.integrate(ta, tb, &mut y, |t, y, dy| tab.rhs(&d, 0.0, t, y, dy))?;
        }
        check_norm(&y, w[1])?;
        out.push(to_state(y.clone(), psi0.tail_tol())?);
    }
    Ok(out)
}

/// Joint atom–field state: field components attached to `|1⟩` and `|2⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomFieldState {
    pub t: f64,
    pub comp1: Vec<C64>,
    pub comp2: Vec<C64>,
}

impl AtomFieldState {
    /// Field state after an ideal π/2 pulse and detection of the atom in
    /// `detected` (2 gives the symmetric, 1 the antisymmetric combination).
    pub fn project(&self, detected: u8, tail_tol: f64) -> Result<FockState> {
        let s = match detected {
            2 => 1.0,
            1 => -1.0,
            _ => return Err(Error::InvalidInput(format!("detected state must be 1 or 2, got {detected}"))),
        };
        let amps: Vec<C64> = self.comp1.iter().zip(&self.comp2).map(|(a, b)| a * s + b).collect();
        let nrm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-12 {
            return Err(Error::DegenerateState);
        }
        to_state(amps, tail_tol)
    }
}

/// Integrate the dispersive atom–field Hamiltonian
/// `(ω0/2)σ + H_field(σ)`, `σ = (−1)^ℓ`, from `c1|1⟩|ψ0⟩ + c2|2⟩|ψ0⟩`.
/// Atomic amplitudes are referenced to `t = 0`, so the component of level
/// `ℓ` carries `e^{−(−1)^ℓ iω0 t/2}` relative to its field evolution.
pub fn schrodinger_oracle_atom_field(
    cfg: &DriveConfig,
    c1: C64,
    c2: C64,
    psi0: &FockState,
    times: &[f64],
    rtol: f64,
) -> Result<Vec<AtomFieldState>> {
    cfg.validate()?;
    if times.is_empty() || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("oracle times must be non-empty and ascending".into()));
    }
    let n = psi0.n_max();
    let tab = Tables::new(n);
    let solver = Dopri5::new(rtol, rtol * 1e-3);
    let t_start = times[0];
    let mut y = Vec::with_capacity(2 * n);
    let p1 = c1 * C64::from_polar(1.0, cfg.omega0 * t_start / 2.0);
    let p2 = c2 * C64::from_polar(1.0, -cfg.omega0 * t_start / 2.0);
    y.extend(psi0.amplitudes().iter().map(|a| a * p1));
    y.extend(psi0.amplitudes().iter().map(|a| a * p2));
    let snapshot = |t: f64, y: &[C64]| AtomFieldState { t, comp1: y[..n].to_vec(), comp2: y[n..].to_vec() };
    let mut out = vec![snapshot(t_start, &y)];
    for w in times.windows(2) {
        for (ta, tb) in cfg.split(w[0], w[1]) {
            let d1 = cfg.piece(Some(Branch::One), ta, tb);
            let d2 = cfg.piece(Some(Branch::Two), ta, tb);
            let e = cfg.omega0 / 2.0;
            solver.integrate(ta, tb, &mut y, |t, y, dy| {
                let (y1, y2) = y.split_at(n);
                let (o1, o2) = dy.split_at_mut(n);
                tab.rhs(&d1, -e, t, y1, o1);
                tab.rhs(&d2, e, t, y2, o2);
            })?;
        }
        check_norm(&y, w[1])?;
        out.push(snapshot(w[1], &y));
    }
    Ok(out)
}

/// `⟨ψ| S D a†a D† S† |ψ⟩`: the invariant of the branch Hamiltonian pulled
/// back through the squeeze and displacement factors (up to a constant).
pub fn invariant_expectation(psi: &FockState, factors: &OperatorFactors) -> Result<f64> {
    let phi = psi.apply_squeeze(-factors.epsilon)?.apply_displacement(-factors.theta)?;
    Ok(phi.moments().n)
}
