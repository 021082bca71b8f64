//! Euler-Lagrange pencil `G x = lambda S x` and the maximum of `F`.
//!
//! `M = max F` is the largest eigenvalue `mu` of `S x = mu G x`, so the least
//! positive `lambda` of the pencil is `1 / M`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pencil::{PerturbationPair, StabilityOperator, SymmetryLabel};
use crate::annulus::basis::Parity;
use crate::annulus::steady::BaseState;
use crate::error::{invalid, Error, Result};

/// Relative tolerance between the two routes to `M`.
pub const ROUTE_TOLERANCE: f64 = 1e-3;

fn cholesky(g: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(g.clone()).ok_or_else(|| Error::Resolution("dissipation form is not positive definite".into()))
}

/// Eigenpairs `(mu, x)` of `S x = mu G x` with `x^T G x = 1`, `mu` descending.
pub fn symmetric_pencil(g: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<Vec<(f64, DVector<f64>)>> {
    let chol = cholesky(g)?;
    let l = chol.l();
    let linv = l
        .clone()
        .solve_lower_triangular(&DMatrix::identity(g.nrows(), g.nrows()))
        .ok_or_else(|| Error::Resolution("singular dissipation factor".into()))?;
    let h = &linv * s * linv.transpose();
    let h = (&h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(h);
    let lt = l.transpose();
    let mut out: Vec<(f64, DVector<f64>)> = (0..g.nrows())
        .map(|i| {
            let y = eig.eigenvectors.column(i).into_owned();
            let x = lt.solve_upper_triangular(&y).expect("nonsingular");
            (eig.eigenvalues[i], x)
        })
        .collect();
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(out)
}

/// Largest `mu` by Lanczos in the `G` inner product with full
/// reorthogonalization, polished by Rayleigh-quotient iteration.
pub fn maximize_quotient(g: &DMatrix<f64>, s: &DMatrix<f64>, seed: u64) -> Result<(f64, DVector<f64>)> {
    let n = g.nrows();
    let chol = cholesky(g)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let gnorm = |x: &DVector<f64>| x.dot(&(g * x)).sqrt();
    let mut q = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    q /= gnorm(&q);
    let steps = n.min(160);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for _ in 0..steps {
        let sq = s * &q;
        let a = q.dot(&sq);
        let mut w = chol.solve(&sq);
        basis.push(q.clone());
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = v.dot(&(g * &w));
                w.axpy(-c, v, 1.0);
            }
        }
        let b = gnorm(&w);
        if !(b > 1e-12 * alpha.iter().fold(1e-300f64, |m, a| m.max(a.abs()))) {
            break;
        }
        beta.push(b);
        q = w / b;
    }
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let te = SymmetricEigen::new(t);
    let top = te.eigenvalues.imax();
    let mut x = DVector::zeros(n);
    for (j, v) in basis.iter().enumerate() {
        x.axpy(te.eigenvectors[(j, top)], v, 1.0);
    }
    x /= gnorm(&x);
    let mut mu = x.dot(&(s * &x));
    let scale = s.amax().max(g.amax());
    for _ in 0..8 {
        let r = s * &x - (g * &x) * mu;
        if r.amax() < 1e-13 * scale {
            break;
        }
        let shifted = s - g * mu;
        let Some(y) = shifted.lu().solve(&(g * &x)) else { break };
        if !y.iter().all(|v| v.is_finite()) {
            break;
        }
        let y = &y / gnorm(&y);
        let mu_new = y.dot(&(s * &y));
        if mu_new < mu - 1e-9 * mu.abs().max(1.0) {
            break;
        }
        x = y;
        mu = mu_new;
    }
    Ok((mu, x))
}

/// Spectrum of the Euler-Lagrange pencil with eigenfunctions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenSolution {
    /// Least positive `lambda` values, ascending.
    pub lambdas: Vec<f64>,
    pub eigenfunctions: Vec<PerturbationPair>,
    pub symmetry_labels: Vec<SymmetryLabel>,
    /// `||G x - lambda S x|| / ||x||` for each returned pair.
    pub residuals: Vec<f64>,
    pub lambda_c: Option<f64>,
}

struct BlockSpectrum {
    op: StabilityOperator,
    pairs: Vec<(f64, DVector<f64>)>,
}

fn block_spectra(base: &BaseState) -> Result<Vec<BlockSpectrum>> {
    [Parity::Even, Parity::Odd]
        .par_iter()
        .map(|&b| {
            let op = StabilityOperator::block(base, b);
            let pairs = symmetric_pencil(&op.dissipation(), &op.production())?;
            Ok(BlockSpectrum { op, pairs })
        })
        .collect()
}

/// Relative plug-in residual of `G x = lambda S x`.
pub fn pencil_residual(g: &DMatrix<f64>, s: &DMatrix<f64>, lambda: f64, x: &DVector<f64>) -> f64 {
    (g * x - s * x * lambda).norm() / x.norm()
}

/// The `count` least positive eigenvalues of `G x = lambda S x` over both
/// symmetry blocks.
pub fn solve_eig(base: &BaseState, count: usize) -> Result<EigenSolution> {
    if count == 0 {
        return invalid("count must be at least 1");
    }
    let blocks = block_spectra(base)?;
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (bi, blk) in blocks.iter().enumerate() {
        let scale = blk.pairs.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
        for (j, (mu, _)) in blk.pairs.iter().enumerate() {
            if *mu > 1e-12 * scale && *mu > 0.0 {
                cand.push((1.0 / mu, bi, j));
            }
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0));
    cand.truncate(count);
    let mut sol = EigenSolution {
        lambdas: Vec::new(),
        eigenfunctions: Vec::new(),
        symmetry_labels: Vec::new(),
        residuals: Vec::new(),
        lambda_c: cand.first().map(|c| c.0),
    };
    for (lambda, bi, j) in cand {
        let blk = &blocks[bi];
        let x = &blk.pairs[j].1;
        let pair = blk.op.pair(x)?;
        sol.residuals.push(pencil_residual(&blk.op.dissipation(), &blk.op.production(), lambda, x));
        sol.symmetry_labels.push(pair.label());
        sol.eigenfunctions.push(pair);
        sol.lambdas.push(lambda);
    }
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    EnergyStable,
    SymmetryBreakingPossible,
}

impl Verdict {
    pub fn of(m: f64) -> Self {
        if m <= 1.0 {
            Verdict::EnergyStable
        } else {
            Verdict::SymmetryBreakingPossible
        }
    }
}

/// Maximum of the stability functional and its maximizer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    #[serde(rename = "M")]
    pub m: f64,
    /// `M` from the iterative maximization.
    #[serde(rename = "M_direct")]
    pub m_direct: f64,
    /// `M` from the dense eigen-decomposition.
    #[serde(rename = "M_eigen")]
    pub m_eigen: f64,
    pub lambda_c: Option<f64>,
    /// `lambda_c` rescaled to the eigenvalue convention `sqrt(Ra) / (2 M)`.
    pub paper_lambda: Option<f64>,
    pub verdict: Verdict,
    pub most_dangerous: PerturbationPair,
    pub label: SymmetryLabel,
    /// `||grad u||^2 + ||grad sigma||^2` of the maximizer.
    pub normalization: f64,
    pub el_residual: f64,
    /// `F` of the maximizer by pointwise quadrature.
    pub f_at_maximizer: f64,
}

/// `M = max F` by two routes: Lanczos plus Rayleigh-quotient iteration on each
/// symmetry block, and the dense symmetric eigen-decomposition.
#[allow(non_snake_case)]
pub fn maximize_F(base: &BaseState) -> Result<StabilityReport> {
    let blocks = block_spectra(base)?;
    let direct: Vec<(f64, DVector<f64>)> = blocks
        .par_iter()
        .enumerate()
        .map(|(i, b)| maximize_quotient(&b.op.dissipation(), &b.op.production(), 17 + i as u64))
        .collect::<Result<_>>()?;
    let (bi, _) = blocks
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.pairs[0].0.total_cmp(&b.1.pairs[0].0))
        .expect("two blocks");
    let m_eigen = blocks[bi].pairs[0].0;
    let di = if direct[0].0 >= direct[1].0 { 0 } else { 1 };
    let m_direct = direct[di].0;
    let scale = m_eigen.abs().max(m_direct.abs()).max(1e-12);
    if (m_eigen - m_direct).abs() > ROUTE_TOLERANCE * scale {
        return Err(Error::NormalizationMismatch { direct: m_direct, eigen: m_eigen });
    }
    let blk = &blocks[di];
    let x = &direct[di].1;
    let (g, s) = (blk.op.dissipation(), blk.op.production());
    let normalization = x.dot(&(&g * x));
    let lambda_c = (m_direct > 0.0).then(|| 1.0 / m_direct);
    let el_residual = match lambda_c {
        Some(l) => pencil_residual(&g, &s, l, x),
        None => (&s * x).norm() / x.norm(),
    };
    let (num, den) = blk.op.functional(x);
    let pair = blk.op.pair(x)?;
    let ra = base.params.ra;
    Ok(StabilityReport {
        m: m_direct,
        m_direct,
        m_eigen,
        lambda_c,
        paper_lambda: lambda_c.map(|l| ra.sqrt() * l / 2.0),
        verdict: Verdict::of(m_direct),
        label: pair.label(),
        most_dangerous: pair,
        normalization,
        el_residual,
        f_at_maximizer: num / den,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::basis::Resolution;
    use crate::annulus::params::AnnulusParams;
    use crate::annulus::steady::{steady_solve, SteadyOptions};
    use crate::stability::pencil::functional_F;

    fn res() -> Resolution {
        Resolution::new(3, 12).unwrap()
    }

    fn base(pr: f64, ra: f64, d: f64) -> BaseState {
        let p = AnnulusParams::new(pr, ra, d).unwrap();
        steady_solve(&p, res(), SteadyOptions::default()).unwrap()
    }

    #[test]
    fn routes_agree_and_maximizer_is_normalized() {
        let b = base(1.0, 300.0, 1.0);
        let r = maximize_F(&b).unwrap();
        assert!((r.m_direct - r.m_eigen).abs() < 1e-8 * r.m_eigen);
        assert!((r.normalization - 1.0).abs() < 1e-10);
        assert!(r.el_residual < 1e-8);
        assert!((r.f_at_maximizer - r.m).abs() < 1e-8 * r.m);
        assert!((functional_F(&r.most_dangerous, &b).unwrap() - r.m).abs() < 1e-8 * r.m);
        let e = solve_eig(&b, 4).unwrap();
        assert!((e.lambda_c.unwrap() * r.m - 1.0).abs() < 1e-8);
        assert!(e.lambdas.windows(2).all(|w| w[0] <= w[1]));
        assert!(e.residuals.iter().all(|&r| r < 1e-8));
        assert!(e.symmetry_labels.iter().all(|l| *l != SymmetryLabel::Mixed));
    }

    #[test]
    fn motionless_base_has_paired_spectrum() {
        let p = AnnulusParams::new(1.0, 200.0, 1.0).unwrap();
        let b = BaseState::zero(&p, res());
        for blk in [Parity::Even, Parity::Odd] {
            let op = StabilityOperator::block(&b, blk);
            let mus: Vec<f64> = symmetric_pencil(&op.dissipation(), &op.production()).unwrap().iter().map(|p| p.0).collect();
            let n = mus.len();
            let top = mus[0];
            for i in 0..n {
                assert!((mus[i] + mus[n - 1 - i]).abs() < 1e-10 * top);
            }
        }
    }

    #[test]
    fn zero_rayleigh_gives_zero() {
        let p = AnnulusParams::new(1.0, 0.0, 1.0).unwrap();
        let r = maximize_F(&BaseState::zero(&p, res())).unwrap();
        assert_eq!(r.m, 0.0);
        assert_eq!(r.verdict, Verdict::EnergyStable);
        assert!(r.lambda_c.is_none());
    }

    #[test]
    fn motionless_maximum_grows_with_rayleigh() {
        let mut last = 0.0;
        for ra in [50.0, 200.0, 800.0] {
            let p = AnnulusParams::new(1.0, ra, 1.0).unwrap();
            let m = maximize_F(&BaseState::zero(&p, res())).unwrap().m;
            assert!(m > last);
            assert!((m / ra.sqrt() - maximize_F(&BaseState::zero(&AnnulusParams::new(1.0, 50.0, 1.0).unwrap(), res())).unwrap().m / 50f64.sqrt()).abs() < 1e-8);
            last = m;
        }
    }
}
