//! Lorenz trajectories integrated with fixed-step RK4 and linearly resampled.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::RealSeries;
use crate::rng::stream;

/// Total resampled length the multi-set sampling policy aims for.
pub const LORENZ_TARGET_SAMPLES: usize = 300_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    /// Unperturbed initial state at time 0.
    pub initial: [f64; 3],
    /// Samples before `t0` are discarded as transient.
    pub t0: f64,
    pub t1: f64,
    pub dt_integrate: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        LorenzParams {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            initial: [1.0, 0.5, 0.0],
            t0: 50.0,
            t1: 2050.0,
            dt_integrate: 1e-3,
        }
    }
}

impl LorenzParams {
    fn validate(&self) -> Result<()> {
        if !(self.dt_integrate > 0.0) {
            return Err(Error::InvalidParameter("dt_integrate must be positive".into()));
        }
        if !(self.t1 > self.t0) || self.t0 < 0.0 {
            return Err(Error::InvalidParameter("need 0 ≤ t0 < t1".into()));
        }
        Ok(())
    }

    fn derivative(&self, s: [f64; 3]) -> [f64; 3] {
        [
            self.sigma * (s[1] - s[0]),
            s[0] * (self.rho - s[2]) - s[1],
            s[0] * s[1] - self.beta * s[2],
        ]
    }

    fn rk4(&self, s: [f64; 3], h: f64) -> [f64; 3] {
        let add = |a: [f64; 3], b: [f64; 3], w: f64| [a[0] + w * b[0], a[1] + w * b[1], a[2] + w * b[2]];
        let k1 = self.derivative(s);
        let k2 = self.derivative(add(s, k1, h / 2.0));
        let k3 = self.derivative(add(s, k2, h / 2.0));
        let k4 = self.derivative(add(s, k3, h));
        [
            s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            s[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        ]
    }

    /// Most samples one run between `t0` and `t1` can provide at `resample_dt`.
    pub fn max_samples(&self, resample_dt: f64) -> usize {
        ((self.t1 - self.t0) / resample_dt + 1e-9).floor() as usize + 1
    }
}

/// Integrates from time 0 starting at `initial` plus a `U[0, 0.01)` perturbation
/// per coordinate, then records `n_samples` linearly interpolated states at
/// `t0, t0 + Δ, …`. Columns are `x, y, z`.
pub fn lorenz_generate(params: &LorenzParams, resample_dt: f64, n_samples: usize, seed: u64) -> Result<RealSeries> {
    params.validate()?;
    if !(resample_dt > 0.0) {
        return Err(Error::InvalidParameter("resample_dt must be positive".into()));
    }
    if n_samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    if n_samples > params.max_samples(resample_dt) {
        return Err(Error::InvalidParameter(format!(
            "{n_samples} samples at Δ = {resample_dt} run past t1 = {}",
            params.t1
        )));
    }
    let mut rng = stream(seed, &[]);
    let mut state = params.initial;
    for c in state.iter_mut() {
        *c += rng.random_range(0.0..0.01);
    }
    let h = params.dt_integrate;
    let mut out = vec![Vec::with_capacity(n_samples); 3];
    let mut step = 0u64;
    let mut next = 0usize;
    while next < n_samples {
        let t = step as f64 * h;
        let t_next = (step + 1) as f64 * h;
        let advanced = params.rk4(state, h);
        if advanced.iter().any(|v| !v.is_finite()) {
            return Err(Error::DivergedTrajectory(t_next));
        }
        loop {
            if next >= n_samples {
                break;
            }
            let s = params.t0 + next as f64 * resample_dt;
            if s > t_next {
                break;
            }
            let w = (s - t) / h;
            for (c, col) in out.iter_mut().enumerate() {
                col.push(state[c] + w * (advanced[c] - state[c]));
            }
            next += 1;
        }
        state = advanced;
        step += 1;
    }
    RealSeries::new(
        vec!["x".into(), "y".into(), "z".into()],
        out,
        Some(resample_dt),
    )
}

/// Number of independent runs for a given resampling interval:
/// `⌊300000·Δ / (t1 − t0)⌋`, at least one.
pub fn lorenz_set_count(params: &LorenzParams, resample_dt: f64) -> usize {
    ((LORENZ_TARGET_SAMPLES as f64 * resample_dt / (params.t1 - params.t0)) + 1e-9)
        .floor()
        .max(1.0) as usize
}

/// Independent runs with their own initial perturbations, each spanning
/// `t0..=t1`, enough of them to approach 300 000 samples in total.
pub fn lorenz_sets(params: &LorenzParams, resample_dt: f64, seed: u64) -> Result<Vec<RealSeries>> {
    let n = params.max_samples(resample_dt);
    (0..lorenz_set_count(params, resample_dt))
        .map(|k| lorenz_generate(params, resample_dt, n, crate::rng::child_seed(seed, &[k as u64])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attractor_bounds() {
        let s = lorenz_generate(&LorenzParams::default(), 0.01, 100_000, 1).unwrap();
        let max = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(max(s.variable(0)) < 25.0);
        assert!(max(s.variable(2)) < 60.0);
        assert!(max(s.variable(0)) > 10.0);
    }

    #[test]
    fn stable_origin() {
        let p = LorenzParams {
            rho: 0.0,
            t1: 100.0,
            ..LorenzParams::default()
        };
        let s = lorenz_generate(&p, 0.1, 400, 2).unwrap();
        for v in 0..3 {
            assert!(s.variable(v).last().unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn step_halving_converges() {
        // Chaos amplifies any discretization difference exponentially, so the
        // check runs over the first ten time units with no transient cut.
        let p = LorenzParams {
            t0: 0.0,
            t1: 10.0,
            ..LorenzParams::default()
        };
        let fine = LorenzParams {
            dt_integrate: p.dt_integrate / 2.0,
            ..p.clone()
        };
        let a = lorenz_generate(&p, 0.01, 1001, 3).unwrap();
        let b = lorenz_generate(&fine, 0.01, 1001, 3).unwrap();
        let mut sq = 0.0;
        for v in 0..3 {
            for (x, y) in a.variable(v).iter().zip(b.variable(v)) {
                sq += (x - y) * (x - y);
            }
        }
        let rms = (sq / (3.0 * 1001.0)).sqrt();
        assert!(rms < 1e-6, "{rms}");
    }

    #[test]
    fn sampling_policy() {
        let p = LorenzParams::default();
        assert_eq!(lorenz_set_count(&p, 0.02), 3);
        assert_eq!(lorenz_set_count(&p, 0.1), 15);
        assert_eq!(lorenz_set_count(&p, 0.001), 1);
        assert_eq!(p.max_samples(0.02), 100_001);
        assert!(lorenz_generate(&p, 0.02, 100_002, 0).is_err());
        assert!(lorenz_generate(&p, 0.0, 10, 0).is_err());
    }

    #[test]
    fn seeds_control_the_perturbation() {
        let p = LorenzParams {
            t1: 60.0,
            ..LorenzParams::default()
        };
        let a = lorenz_generate(&p, 0.05, 100, 7).unwrap();
        let b = lorenz_generate(&p, 0.05, 100, 7).unwrap();
        let c = lorenz_generate(&p, 0.05, 100, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
