//! The invariant subspace of x-independent fields and its closed-form evolution.
//!
//! An x-independent state is a shear flow `A(z, t) e_1` with temperature
//! `T(z, t)` and pressure `G(z, t)`. Convective terms vanish on such states, so
//! `A` and `T` obey decoupled heat equations
//!
//! ```text
//! (1/Pr) A_t = A_zz,   A_z = 0 at z = 0, 1   (cosine series, mean conserved)
//!        T_t = T_zz,   T   = 0 at z = 0, 1   (sine series)
//!        G_zz = Ra T_z
//! ```
//!
//! Mode `n` of `A` decays as `exp(-Pr n^2 pi^2 t)`, mode `n` of `T` as
//! `exp(-n^2 pi^2 t)`; the mean of `A` is a time-constant uniform flow.

use std::f64::consts::PI;

use crate::dynamics::OBState;
use crate::error::{invalid, Result};
use crate::spectral::{FieldKind, ModeIndex, SpectralField};

/// Vertical profiles of an x-independent state.
///
/// `a[n]` multiplies `cos(n pi z)` in `A` (n = 0..=N); `b[n]` multiplies
/// `sin(n pi z)` in `T` (`b[0]` is always 0).
#[derive(Debug, Clone, PartialEq)]
pub struct SProfiles {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub pr: f64,
    pub ra: f64,
    pub t: f64,
}

impl SProfiles {
    pub fn zeros(n_max: usize, pr: f64, ra: f64) -> Self {
        Self { a: vec![0.0; n_max + 1], b: vec![0.0; n_max + 1], pr, ra, t: 0.0 }
    }

    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }

    /// Profiles from samples at the midpoints `z_j = (j + 1/2) / len`.
    ///
    /// The discrete cosine/sine projections equal the integrals
    /// `int f cos(n pi s) ds` exactly for band-limited data.
    pub fn from_samples(f: &[f64], g: &[f64], n_max: usize, pr: f64, ra: f64) -> Result<Self> {
        if f.len() != g.len() {
            return invalid("f and g must be sampled on the same grid");
        }
        let nz = f.len();
        if nz < 2 * n_max + 2 {
            return Err(crate::Error::Resolution(format!("{nz} samples cannot resolve {n_max} modes")));
        }
        if f.iter().chain(g).any(|v| !v.is_finite()) {
            return invalid("profile samples must be finite");
        }
        if !(pr > 0.0) {
            return invalid("Pr must be positive");
        }
        let z = |j: usize| (j as f64 + 0.5) / nz as f64;
        let mut a = vec![0.0; n_max + 1];
        let mut b = vec![0.0; n_max + 1];
        for n in 0..=n_max {
            let k = PI * n as f64;
            let sc: f64 = f.iter().enumerate().map(|(j, v)| v * (k * z(j)).cos()).sum();
            let ss: f64 = g.iter().enumerate().map(|(j, v)| v * (k * z(j)).sin()).sum();
            a[n] = if n == 0 { sc / nz as f64 } else { 2.0 * sc / nz as f64 };
            b[n] = if n == 0 { 0.0 } else { 2.0 * ss / nz as f64 };
        }
        Ok(Self { a, b, pr, ra, t: 0.0 })
    }

    /// Closed-form evolution to absolute time `t >= self.t`.
    pub fn evolved(&self, t: f64) -> Result<Self> {
        if !(t >= self.t) || !t.is_finite() {
            return invalid(format!("cannot evolve from t = {} to t = {t}", self.t));
        }
        let dt = t - self.t;
        let mut out = self.clone();
        for n in 1..=self.n_max() {
            let k2 = (PI * n as f64).powi(2);
            out.a[n] *= (-self.pr * k2 * dt).exp();
            out.b[n] *= (-k2 * dt).exp();
        }
        out.t = t;
        Ok(out)
    }

    pub fn eval_a(&self, z: f64) -> f64 {
        self.a.iter().enumerate().map(|(n, c)| c * (PI * n as f64 * z).cos()).sum()
    }

    pub fn eval_t(&self, z: f64) -> f64 {
        self.b.iter().enumerate().map(|(n, c)| c * (PI * n as f64 * z).sin()).sum()
    }

    /// Cosine coefficients of the pressure `G`, gauged to zero mean.
    ///
    /// `G_z = Ra T` with `G_z(0) = 0`, so `G = -Ra sum b_n cos(n pi z) / (n pi)`.
    pub fn pressure_coeffs(&self) -> Vec<f64> {
        let mut g = vec![0.0; self.n_max() + 1];
        for n in 1..=self.n_max() {
            g[n] = -self.ra * self.b[n] / (PI * n as f64);
        }
        g
    }

    /// The free constant of `G = G_0 + Ra sum b_n (1 - cos n pi z)/(n pi)` under the zero-mean gauge.
    pub fn pressure_constant(&self) -> f64 {
        (1..=self.n_max()).map(|n| -self.ra * self.b[n] / (PI * n as f64)).sum()
    }

    pub fn eval_g(&self, z: f64) -> f64 {
        self.pressure_coeffs().iter().enumerate().map(|(n, c)| c * (PI * n as f64 * z).cos()).sum()
    }

    /// `||A||_2^2` over (0, 1).
    pub fn a_norm_sq(&self) -> f64 {
        self.a[0].powi(2) + self.a.iter().skip(1).map(|c| 0.5 * c * c).sum::<f64>()
    }

    pub fn t_norm_sq(&self) -> f64 {
        self.b.iter().skip(1).map(|c| 0.5 * c * c).sum()
    }

    /// `||A_z||_2` over (0, 1).
    pub fn a_z_norm(&self) -> f64 {
        self.derivative_norm(1)
    }

    /// `||A_zz||_2` over (0, 1).
    pub fn a_zz_norm(&self) -> f64 {
        self.derivative_norm(2)
    }

    fn derivative_norm(&self, order: i32) -> f64 {
        self.a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| 0.5 * (c * (PI * n as f64).powi(order)).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// The x-independent state on a given truncation.
    pub fn to_state(&self, m_max: usize, n_max: usize) -> Result<OBState> {
        let mut s = OBState::zeros(m_max, n_max);
        for n in 1..=n_max.min(self.n_max()) {
            s.stream.set(ModeIndex::cos(0, n), -self.a[n] / (PI * n as f64))?;
            s.temperature.set(ModeIndex::cos(0, n), self.b[n])?;
        }
        s.mean_flow = self.a[0];
        s.t = self.t;
        Ok(s)
    }
}

/// `(A, T, G)` at time `t` from initial profiles sampled at midpoints.
pub fn evolve_s_analytic(f: &[f64], g: &[f64], t: f64, pr: f64, ra: f64, n_max: usize) -> Result<SProfiles> {
    SProfiles::from_samples(f, g, n_max, pr, ra)?.evolved(t)
}

/// Keeps the `m = 0` modes: `A = U - Phi_z`, `T` from the temperature.
pub fn project_s(state: &OBState, pr: f64, ra: f64) -> SProfiles {
    let n_max = state.n_max();
    let mut p = SProfiles::zeros(n_max, pr, ra);
    p.a[0] = state.mean_flow;
    for n in 1..=n_max {
        p.a[n] = -PI * n as f64 * state.stream.get(ModeIndex::cos(0, n));
        p.b[n] = state.temperature.get(ModeIndex::cos(0, n));
    }
    p.t = state.t;
    p
}

/// Complement of [`project_s`]: the `m >= 1` modes, all with zero x-average.
pub fn project_f(state: &OBState) -> OBState {
    OBState {
        stream: state.stream.fluctuation(),
        temperature: state.temperature.fluctuation(),
        mean_flow: 0.0,
        t: state.t,
    }
}

/// Direct-sum decomposition of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSplit {
    pub s_part: SProfiles,
    pub f_part: OBState,
}

impl SubspaceSplit {
    pub fn of(state: &OBState, pr: f64, ra: f64) -> Self {
        Self { s_part: project_s(state, pr, ra), f_part: project_f(state) }
    }

    pub fn recombine(&self) -> Result<OBState> {
        let s = self.s_part.to_state(self.f_part.m_max(), self.f_part.n_max())?;
        let mut out = s.add(&self.f_part)?;
        out.t = self.f_part.t;
        Ok(out)
    }
}

/// x-averaged `v^x` and `tau` at time `t`, from the x-average of the initial data alone.
pub fn mean_values(initial: &OBState, t: f64, pr: f64, ra: f64) -> Result<SProfiles> {
    project_s(initial, pr, ra).evolved(t)
}

fn check_pipe(mu: f64, radius: f64) -> Result<()> {
    if !(mu > 0.0) || !(radius > 0.0) {
        return invalid("viscosity and radius must be positive");
    }
    Ok(())
}

/// Axial velocity of steady pipe flow, `C (R^2 - r^2) / (4 mu)`.
pub fn poiseuille_profile(c: f64, mu: f64, radius: f64, r: f64) -> Result<f64> {
    check_pipe(mu, radius)?;
    if !(0.0..=radius).contains(&r) {
        return invalid(format!("r = {r} outside [0, {radius}]"));
    }
    Ok(c * (radius * radius - r * r) / (4.0 * mu))
}

/// `sup |v'(r)| = |C| R / (2 mu)`, the factor controlling the trilinear term.
pub fn poiseuille_gradient_bound(c: f64, mu: f64, radius: f64) -> Result<f64> {
    check_pipe(mu, radius)?;
    Ok(c.abs() * radius / (2.0 * mu))
}

/// Midpoint samples of a profile, for feeding [`SProfiles::from_samples`].
pub fn sample_midpoints(nz: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..nz).map(|j| f((j as f64 + 0.5) / nz as f64)).collect()
}

/// x-average of a stream-like field's vertical profile evaluated at `z`.
pub fn mean_profile_at(field: &SpectralField, z: f64) -> f64 {
    debug_assert_eq!(field.kind(), FieldKind::StreamLike);
    field.mean_profile().iter().enumerate().map(|(n, c)| c * (PI * n as f64 * z).sin()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cosine_decays_with_prandtl() {
        let f = sample_midpoints(32, |z| (PI * z).cos());
        let g = vec![0.0; 32];
        let (pr, t) = (0.7, 0.05);
        let p = evolve_s_analytic(&f, &g, t, pr, 10.0, 8).unwrap();
        for &z in &[0.0, 0.3, 0.9] {
            assert!((p.eval_a(z) - (PI * z).cos() * (-pr * PI * PI * t).exp()).abs() < 1e-13);
            assert!(p.eval_t(z).abs() < 1e-14);
            assert!(p.eval_g(z).abs() < 1e-14);
        }
    }

    #[test]
    fn temperature_and_pressure_series() {
        let f = vec![0.0; 32];
        let g = sample_midpoints(32, |z| (PI * z).sin());
        let t = 0.02;
        let p = evolve_s_analytic(&f, &g, t, 1.0, PI, 8).unwrap();
        let decay = (-PI * PI * t).exp();
        for &z in &[0.1, 0.5, 0.8] {
            assert!((p.eval_t(z) - (PI * z).sin() * decay).abs() < 1e-13);
            let g_minus_g0 = p.eval_g(z) - p.pressure_constant();
            assert!((g_minus_g0 - decay * (1.0 - (PI * z).cos())).abs() < 1e-13);
        }
    }

    #[test]
    fn time_zero_reproduces_projection() {
        let f = sample_midpoints(40, |z| 0.3 + (2.0 * PI * z).cos() - 0.5 * (5.0 * PI * z).cos());
        let g = sample_midpoints(40, |z| (3.0 * PI * z).sin());
        let p = evolve_s_analytic(&f, &g, 0.0, 2.0, 1.0, 10).unwrap();
        for (j, fj) in f.iter().enumerate() {
            let z = (j as f64 + 0.5) / 40.0;
            assert!((p.eval_a(z) - fj).abs() < 1e-13);
            assert!((p.eval_t(z) - g[j]).abs() < 1e-13);
        }
        assert!((p.a[0] - 0.3).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_finite_samples() {
        let mut f = vec![0.0; 16];
        f[3] = f64::NAN;
        assert!(SProfiles::from_samples(&f, &vec![0.0; 16], 4, 1.0, 1.0).is_err());
        assert!(SProfiles::from_samples(&[0.0; 4], &[0.0; 4], 4, 1.0, 1.0).is_err());
    }

    #[test]
    fn pressure_satisfies_vertical_balance() {
        let g = sample_midpoints(64, |z| z * (1.0 - z) * (3.0 * z).exp());
        let p = evolve_s_analytic(&vec![0.0; 64], &g, 0.01, 1.0, 37.0, 20).unwrap();
        // G_zz = Ra T_z per mode: -(n pi)^2 g_n = Ra (n pi) b_n
        let gc = p.pressure_coeffs();
        for n in 1..=20 {
            let k = PI * n as f64;
            assert!((-k * k * gc[n] - 37.0 * k * p.b[n]).abs() < 1e-10);
        }
    }

    #[test]
    fn projections_of_pure_modes() {
        let mut s = OBState::zeros(3, 3);
        s.stream.set(ModeIndex::cos(0, 2), 0.5).unwrap();
        s.temperature.set(ModeIndex::cos(0, 1), 1.0).unwrap();
        assert_eq!(project_f(&s).max_fluctuating_coeff(), 0.0);
        assert_eq!(project_f(&s).stream.max_abs(), 0.0);

        let mut r = OBState::zeros(3, 3);
        r.stream.set(ModeIndex::cos(1, 1), 1.0).unwrap();
        let sp = project_s(&r, 1.0, 1.0);
        assert!(sp.a.iter().chain(&sp.b).all(|v| *v == 0.0));
    }

    #[test]
    fn mean_value_of_mixed_initial_data() {
        // v^x = cos(pi z) + sin(2 pi x) sin(pi z)  <=>  Phi = -sin(pi z)/pi + sin(2 pi x) cos(pi z)/pi ...
        // only the x-independent part matters, so build it through the profile
        let mut s = SProfiles::zeros(4, 0.5, 0.0).to_state(2, 4).unwrap();
        s.stream.set(ModeIndex::cos(0, 1), -1.0 / PI).unwrap();
        s.stream.set(ModeIndex::sin(1, 2).unwrap(), 0.3).unwrap();
        let t = 0.1;
        let mv = mean_values(&s, t, 0.5, 0.0).unwrap();
        for &z in &[0.2, 0.6] {
            assert!((mv.eval_a(z) - (PI * z).cos() * (-0.5 * PI * PI * t).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn poiseuille_values() {
        assert_eq!(poiseuille_profile(3.0, 2.0, 1.5, 1.5).unwrap(), 0.0);
        assert!((poiseuille_profile(4.0, 1.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((poiseuille_profile(2.0, 0.5, 2.0, 0.0).unwrap() - 2.0 * 4.0 / 2.0).abs() < 1e-15);
        assert_eq!(poiseuille_gradient_bound(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert!((poiseuille_gradient_bound(4.0, 1.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(poiseuille_profile(1.0, 1.0, 1.0, 1.1).is_err());
        assert!(poiseuille_profile(1.0, 0.0, 1.0, 0.5).is_err());
        assert!(poiseuille_gradient_bound(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn poiseuille_bound_dominates_sampled_gradient() {
        let (c, mu, radius) = (-3.0, 0.7, 1.3);
        let bound = poiseuille_gradient_bound(c, mu, radius).unwrap();
        let h = 1e-6;
        for i in 1..1000 {
            let r = radius * i as f64 / 1000.0;
            let lo = (r - h).max(0.0);
            let hi = (r + h).min(radius);
            let d = (poiseuille_profile(c, mu, radius, hi).unwrap() - poiseuille_profile(c, mu, radius, lo).unwrap()) / (hi - lo);
            assert!(d.abs() <= bound + 1e-8);
        }
    }
}
