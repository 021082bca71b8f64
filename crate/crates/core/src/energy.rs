//! Energy functionals, a-priori bounds on the shear profile and the
//! perturbation-energy identity.
//!
//! For the layer, the fluctuation `(u, sigma)` about the x-average `(A e_1, T)`
//! has `E = (1/Pr)||u||^2 + Ra ||sigma||^2` and
//!
//! ```text
//! dE/dt = 2 (I - D),   D = ||grad u||^2 + Ra ||grad sigma||^2,
//! I = 2 Ra <sigma, u^z> - (1/Pr) <u^z A' , u^x> - Ra <u^z T', sigma>.
//! ```
//!
//! With `F = I / D` this is `dE/dt = 2 (F - 1) D`.

use serde::Serialize;

use crate::dynamics::OBState;
use crate::error::{invalid, Error, Result};
use crate::spectral::{d_dx, d_dz, GridSpec, SpectralField, Transform, VelocityField};
use crate::subspace::SProfiles;

/// `(1/Pr)||u||^2 + Ra ||sigma||^2` over the periodicity cell.
pub fn energy_benard(u: &VelocityField, sigma: &SpectralField, pr: f64, ra: f64) -> Result<f64> {
    if !(ra > 0.0) {
        return invalid("the layer energy needs Ra > 0");
    }
    if !(pr > 0.0) {
        return invalid("Pr must be positive");
    }
    Ok((u.vx.norm_sq() + u.vz.norm_sq()) / pr + ra * sigma.norm_sq())
}

/// `||u||^2 / (2 Pr) + ||sigma||^2 / 2` from the squared norms.
pub fn energy_annulus(u_norm_sq: f64, sigma_norm_sq: f64, pr: f64) -> Result<f64> {
    if !(pr > 0.0) {
        return invalid("Pr must be positive");
    }
    if !(u_norm_sq >= 0.0) || !(sigma_norm_sq >= 0.0) {
        return invalid("squared norms must be non-negative");
    }
    Ok(0.5 * u_norm_sq / pr + 0.5 * sigma_norm_sq)
}

/// Outcome of [`check_apriori_bounds`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AprioriReport {
    pub f_prime_norm: f64,
    pub f_second_norm: f64,
    /// `||f'|| - sup_t ||A_z(t)||`
    pub margin_first: f64,
    /// `||f''|| - sup_t ||A_zz(t)||`
    pub margin_second: f64,
    pub a_z_norms: Vec<f64>,
    pub a_zz_norms: Vec<f64>,
}

/// Checks `||A_z(t)|| <= ||f'||` and `||A_zz(t)|| <= ||f''||` at the given times.
///
/// `f` holds midpoint samples; its derivative norms are those of the band-limited
/// interpolant on `n_max` cosine modes.
pub fn check_apriori_bounds(f: &[f64], n_max: usize, pr: f64, times: &[f64]) -> Result<AprioriReport> {
    let zeros = vec![0.0; f.len()];
    let profile = SProfiles::from_samples(f, &zeros, n_max, pr, 0.0)?;
    apriori_for_profile(&profile, times)
}

pub fn apriori_for_profile(profile: &SProfiles, times: &[f64]) -> Result<AprioriReport> {
    let f_prime_norm = profile.a_z_norm();
    let f_second_norm = profile.a_zz_norm();
    let mut a_z_norms = Vec::with_capacity(times.len());
    let mut a_zz_norms = Vec::with_capacity(times.len());
    for &t in times {
        let a = profile.evolved(profile.t + t)?;
        a_z_norms.push(a.a_z_norm());
        a_zz_norms.push(a.a_zz_norm());
    }
    let sup = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let report = AprioriReport {
        f_prime_norm,
        f_second_norm,
        margin_first: f_prime_norm - sup(&a_z_norms),
        margin_second: f_second_norm - sup(&a_zz_norms),
        a_z_norms,
        a_zz_norms,
    };
    if report.margin_first < -1e-10 || report.margin_second < -1e-10 {
        return Err(Error::FailedBound(format!(
            "a-priori bound violated: margins {:e}, {:e}",
            report.margin_first, report.margin_second
        )));
    }
    Ok(report)
}

/// Energy diagnostics of one layer state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRecord {
    pub t: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub grad_u_sq: f64,
    pub grad_sigma_sq: f64,
    /// `I` in the identity above.
    pub production: f64,
    #[serde(rename = "F_value")]
    pub f_value: f64,
    /// `2 (F - 1) D`
    pub rhs: f64,
    /// `(1/Pr)||A||^2 + Ra ||T||^2`, the x-independent share.
    pub s_energy: f64,
    pub residual: Option<f64>,
}

/// Diagnostics of the fluctuation of `state` about its x-average.
pub fn benard_record(state: &OBState, pr: f64, ra: f64) -> Result<EnergyRecord> {
    let (m, n) = (state.m_max(), state.n_max());
    let full = state.velocity();
    let u = VelocityField { vx: full.vx.fluctuation(), vz: full.vz.fluctuation() };
    let sigma = state.temperature.fluctuation();
    let energy = energy_benard(&u, &sigma, pr, ra)?;

    let grad_sq = |f: &SpectralField| d_dx(f).norm_sq() + d_dz(f).norm_sq();
    let grad_u_sq = grad_sq(&u.vx) + grad_sq(&u.vz);
    let grad_sigma_sq = grad_sq(&sigma);

    let a_prime = d_dz(&full.vx.x_average());
    let t_prime = d_dz(&state.temperature.x_average());
    let grid = GridSpec { nx: 3 * m + 2, nz: 2 * n + 2 };
    let tr = Transform::new(grid, m, n)?;
    let ux = tr.backward(&u.vx)?;
    let uz = tr.backward(&u.vz)?;
    let sg = tr.backward(&sigma)?;
    let ap = tr.backward(&a_prime)?;
    let tp = tr.backward(&t_prime)?;
    let shear = GridSpec::mean(&uz.component_mul(&ap).component_mul(&ux));
    let stratification = GridSpec::mean(&uz.component_mul(&tp).component_mul(&sg));
    let production = 2.0 * ra * sigma.inner(&u.vz)? - shear / pr - ra * stratification;

    let dissipation = grad_u_sq + ra * grad_sigma_sq;
    let f_value = if dissipation > 0.0 { production / dissipation } else { 0.0 };
    let rhs = 2.0 * (production - dissipation);

    let s = crate::subspace::project_s(state, pr, ra);
    let s_energy = s.a_norm_sq() / pr + ra * s.t_norm_sq();
    Ok(EnergyRecord { t: state.t, energy, grad_u_sq, grad_sigma_sq, production, f_value, rhs, s_energy, residual: None })
}

/// Fills `residual = |dE/dt - rhs|` at interior samples and returns them.
///
/// Samples must be equally spaced in time. With five or more samples `dE/dt`
/// is the fourth-order central difference and the two samples at each end are
/// skipped; with three or four, the second-order one and one sample per end.
pub fn energy_identity_residual(records: &mut [EnergyRecord]) -> Result<Vec<f64>> {
    let len = records.len();
    if len < 3 {
        return invalid(format!("energy identity needs at least 3 samples, got {len}"));
    }
    let h = records[1].t - records[0].t;
    if !(h > 0.0) {
        return invalid("sample times must increase");
    }
    for w in records.windows(2) {
        if ((w[1].t - w[0].t) - h).abs() > 1e-9 * h {
            return invalid("sample times must be equally spaced");
        }
    }
    let e: Vec<f64> = records.iter().map(|r| r.energy).collect();
    let skip = if len >= 5 { 2 } else { 1 };
    let mut out = Vec::with_capacity(len - 2 * skip);
    for i in skip..len - skip {
        let de = if skip == 2 {
            (-e[i + 2] + 8.0 * e[i + 1] - 8.0 * e[i - 1] + e[i - 2]) / (12.0 * h)
        } else {
            (e[i + 1] - e[i - 1]) / (2.0 * h)
        };
        let r = (de - records[i].rhs).abs();
        records[i].residual = Some(r);
        out.push(r);
    }
    Ok(out)
}
