//! Adaptive Dormand–Prince 5(4) integrator for complex-valued systems.

use crate::{Error, Result, C64};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integration counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

/// Dormand–Prince 5(4) with standard step-size control.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_max: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self::new(1e-10, 1e-12)
    }
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, max_steps: 5_000_000, h_max: f64::INFINITY }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }

    /// Integrate `y` from `t0` to `t1` in place.
    pub fn integrate<F>(&self, t0: f64, t1: f64, y: &mut [C64], f: F) -> Result<OdeStats>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let mut s = Stepper::new(self, y.len());
        s.advance(t0, t1, y, f, |_, _| false)?;
        Ok(s.stats)
    }

    /// Integrate with a hook run after each accepted step; the hook returns
    /// `true` when it modified the state.
    pub fn integrate_with<F, P>(&self, t0: f64, t1: f64, y: &mut [C64], f: F, post: P) -> Result<OdeStats>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        P: FnMut(f64, &mut [C64]) -> bool,
    {
        let mut s = Stepper::new(self, y.len());
        s.advance(t0, t1, y, f, post)?;
        Ok(s.stats)
    }

    /// Integrate through a monotone list of times and return the state at each.
    /// The first entry of `times` is the initial time of `y0`.
    pub fn integrate_sampled<F, P>(
        &self,
        times: &[f64],
        y0: &[C64],
        mut f: F,
        mut post: P,
    ) -> Result<(Vec<Vec<C64>>, OdeStats)>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        P: FnMut(f64, &mut [C64]) -> bool,
    {
        let mut out = Vec::with_capacity(times.len());
        if times.is_empty() {
            return Ok((out, OdeStats::default()));
        }
        let mut y = y0.to_vec();
        out.push(y.clone());
        let mut s = Stepper::new(self, y.len());
        for w in times.windows(2) {
            s.advance(w[0], w[1], &mut y, &mut f, &mut post)?;
            out.push(y.clone());
        }
        Ok((out, s.stats))
    }
}

struct Stepper<'a> {
    cfg: &'a Dopri5,
    k: [Vec<C64>; 7],
    ytmp: Vec<C64>,
    ynew: Vec<C64>,
    h: Option<f64>,
    stats: OdeStats,
}

impl<'a> Stepper<'a> {
    fn new(cfg: &'a Dopri5, n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            cfg,
            k: [z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
            ytmp: z.clone(),
            ynew: z,
            h: None,
            stats: OdeStats::default(),
        }
    }

    fn norm(&self, e: &[C64], y0: &[C64], y1: &[C64]) -> f64 {
        if e.is_empty() {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in 0..e.len() {
            let sc = self.cfg.atol + self.cfg.rtol * y0[i].norm().max(y1[i].norm());
            let q = e[i].norm() / sc;
            acc += q * q;
        }
        (acc / e.len() as f64).sqrt()
    }

    fn initial_step<F>(&mut self, t: f64, y: &[C64], dir: f64, span: f64, f: &mut F) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y.len().max(1) as f64;
        let sc = |v: &C64| self.cfg.atol + self.cfg.rtol * v.norm();
        let d0 = (y.iter().map(|v| (v.norm() / sc(v)).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (self.k[0].iter().zip(y).map(|(k, v)| (k.norm() / sc(v)).powi(2)).sum::<f64>() / n).sqrt();
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        h0 = h0.min(span);
        for i in 0..y.len() {
            self.ytmp[i] = y[i] + self.k[0][i] * (dir * h0);
        }
        f(t + dir * h0, &self.ytmp, &mut self.k[1]);
        self.stats.evals += 1;
        let d2 = (self.k[1]
            .iter()
            .zip(&self.k[0])
            .zip(y)
            .map(|((a, b), v)| ((a - b).norm() / sc(v)).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
            / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6 * span) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(span).min(self.cfg.h_max)
    }

    fn advance<F, P>(&mut self, t0: f64, t1: f64, y: &mut [C64], mut f: F, mut post: P) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        P: FnMut(f64, &mut [C64]) -> bool,
    {
        let span = (t1 - t0).abs();
        if span == 0.0 {
            return Ok(());
        }
        let dir = (t1 - t0).signum();
        let n = y.len();
        let mut t = t0;
        f(t, y, &mut self.k[0]);
        self.stats.evals += 1;
        let mut h = match self.h {
            Some(h) => h.min(span),
            None => self.initial_step(t, y, dir, span, &mut f),
        };
        let mut last_rejected = false;
        let mut steps = 0usize;
        loop {
            let remaining = (t1 - t).abs();
            if remaining <= 1e-15 * span.max(t1.abs()) {
                break;
            }
            let last = h >= remaining;
            let h_prop = h;
            if last {
                h = remaining;
            }
            if h < 1e-14 * t.abs().max(span) || !h.is_finite() {
                return Err(Error::Integration { t, reason: format!("step size underflow (h = {h:.3e})") });
            }
            steps += 1;
            if steps > self.cfg.max_steps {
                return Err(Error::Integration { t, reason: "maximum number of steps exceeded".into() });
            }
            let hs = dir * h;
            let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
            let ytmp = &mut self.ytmp;
            for i in 0..n {
                ytmp[i] = y[i] + k1[i] * (hs * A21);
            }
            f(t + C2 * hs, ytmp, k2);
            for i in 0..n {
                ytmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * hs;
            }
            f(t + C3 * hs, ytmp, k3);
            for i in 0..n {
                ytmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * hs;
            }
            f(t + C4 * hs, ytmp, k4);
            for i in 0..n {
                ytmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * hs;
            }
            f(t + C5 * hs, ytmp, k5);
            for i in 0..n {
                ytmp[i] = y[i] + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * hs;
            }
            f(t + hs, ytmp, k6);
            let ynew = &mut self.ynew;
            for i in 0..n {
                ynew[i] = y[i] + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * hs;
            }
            f(t + hs, ynew, k7);
            self.stats.evals += 6;
            for i in 0..n {
                ytmp[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            }
            let err = self.norm(&self.ytmp, y, &self.ynew);
            if !err.is_finite() {
                self.stats.rejected += 1;
                h *= 0.2;
                last_rejected = true;
                continue;
            }
            if err <= 1.0 {
                t = if last { t1 } else { t + hs };
                y.copy_from_slice(&self.ynew);
                self.stats.accepted += 1;
                let mut fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if last_rejected {
                    fac = fac.min(1.0);
                }
                h = (h * fac).min(self.cfg.h_max);
                if last {
                    h = h.max(h_prop);
                }
                self.h = Some(h);
                if post(t, y) {
                    f(t, y, &mut self.k[0]);
                    self.stats.evals += 1;
                } else {
                    self.k.swap(0, 6);
                }
                last_rejected = false;
                if last {
                    break;
                }
            } else {
                self.stats.rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                last_rejected = true;
            }
        }
        Ok(())
    }
}
