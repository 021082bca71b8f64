//! Initial energy slope of the linearized perturbation system.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::eig::StabilityReport;
use super::pencil::{PerturbationPair, StabilityOperator};
use crate::annulus::basis::Parity;
use crate::annulus::steady::BaseState;
use crate::error::{invalid, Error, Result};

/// `dE/dt` at `t = 0` two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySlope {
    /// Central difference of `E` after one RK4 step forward and backward.
    pub integrated: f64,
    /// `(F - 1)(||grad u||^2 + ||grad sigma||^2)`.
    pub direct: f64,
    pub energy: f64,
}

/// Linear system `x' = J x` with `J = W^{-1} L`.
pub struct Linearized {
    pub op: StabilityOperator,
    j: DMatrix<f64>,
    w: DMatrix<f64>,
}

impl Linearized {
    pub fn new(op: StabilityOperator) -> Result<Self> {
        let w = op.energy_weight();
        let j = w
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Resolution("mass matrix is not positive definite".into()))?
            .solve(&op.evolution());
        Ok(Self { op, j, w })
    }

    pub fn energy(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.w * x))
    }

    fn rk4(&self, x: &DVector<f64>, h: f64) -> DVector<f64> {
        let k1 = &self.j * x;
        let k2 = &self.j * (x + &k1 * (h / 2.0));
        let k3 = &self.j * (x + &k2 * (h / 2.0));
        let k4 = &self.j * (x + &k3 * h);
        x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }

    pub fn slope(&self, x: &DVector<f64>) -> EnergySlope {
        let energy = self.energy(x);
        if energy == 0.0 {
            return EnergySlope { integrated: 0.0, direct: 0.0, energy };
        }
        let rho = self.j.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        let h = 1e-3 / rho;
        let integrated = (self.energy(&self.rk4(x, h)) - self.energy(&self.rk4(x, -h))) / (2.0 * h);
        let (num, den) = self.op.functional(x);
        EnergySlope { integrated, direct: num - den, energy }
    }
}

/// Energy slope of the reported maximizer; requires `M > 1`.
pub fn most_dangerous_experiment(report: &StabilityReport, base: &BaseState) -> Result<EnergySlope> {
    if !(report.m > 1.0) {
        return Err(Error::Precondition(format!("growth check needs M > 1, got M = {}", report.m)));
    }
    pair_slope(&report.most_dangerous, base)
}

/// Energy slope of any perturbation.
pub fn pair_slope(pair: &PerturbationPair, base: &BaseState) -> Result<EnergySlope> {
    let op = StabilityOperator::new(base, &pair.stream_parities, &pair.scalar_parities);
    if op.n_stream() != pair.psi.len() || op.len() != pair.psi.len() + pair.sigma.len() {
        return invalid("perturbation does not match the base resolution");
    }
    let x = DVector::from_iterator(op.len(), pair.psi.iter().chain(&pair.sigma).copied());
    Ok(Linearized::new(op)?.slope(&x))
}

/// Slopes of `count` random perturbations without symmetry restriction.
pub fn random_slopes(base: &BaseState, count: usize, seed: u64) -> Result<Vec<EnergySlope>> {
    let both = [Parity::Even, Parity::Odd];
    let lin = Linearized::new(StabilityOperator::new(base, &both, &both))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let x = DVector::from_fn(lin.op.len(), |_, _| rng.gen_range(-1.0..1.0));
            lin.slope(&x)
        })
        .collect())
}
