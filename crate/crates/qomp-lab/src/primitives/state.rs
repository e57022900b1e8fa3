use rand_distr::{Distribution, StandardNormal};

use super::{Noise, NoiseMode, QueryCounts};
use crate::model::{CVector, C64};

/// Borrowed amplitudes of a unit state plus the cost of preparing it once.
#[derive(Clone, Copy, Debug)]
pub struct StateRef<'a> {
    pub amplitudes: &'a [C64],
    pub circuit: QueryCounts,
}

/// Owned simulated state together with its preparation cost.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedState {
    pub amplitudes: CVector,
    pub circuit: QueryCounts,
}

impl PreparedState {
    pub fn as_ref(&self) -> StateRef<'_> {
        StateRef { amplitudes: self.amplitudes.as_slice(), circuit: self.circuit }
    }
}

/// Moves the unit vector `target` by a distance of at most `tolerance`
/// (exactly `tolerance` in adversarial mode) in a random direction
/// orthogonal to it.
pub fn perturb_state(target: &CVector, tolerance: f64, noise: &mut Noise) -> CVector {
    let distance = match noise.mode() {
        NoiseMode::Exact => return target.clone(),
        NoiseMode::Adversarial => tolerance.min(2.0),
        NoiseMode::Stochastic => (tolerance * noise.uniform(0.0, 1.0)).min(2.0),
    };
    if distance <= 0.0 {
        return target.clone();
    }
    let angle = 2.0 * (distance / 2.0).asin();
    let n = target.len();
    let mut w = CVector::from_fn(n, |_, _| {
        let re: f64 = StandardNormal.sample(noise.rng());
        let im: f64 = StandardNormal.sample(noise.rng());
        C64::new(re, im)
    });
    let overlap = target.dotc(&w);
    w -= target * overlap;
    let wn = w.norm();
    if n < 2 || wn < 1e-12 {
        return target * C64::from_polar(1.0, angle);
    }
    w.unscale_mut(wn);
    target * C64::new(angle.cos(), 0.0) + w * C64::new(angle.sin(), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::NoiseModel;

    #[test]
    fn adversarial_distance_is_exact() {
        let target = CVector::from_fn(6, |i, _| C64::new(1.0, i as f64)).normalize();
        let mut noise = NoiseModel::adversarial(3).stream(0);
        let out = perturb_state(&target, 0.1, &mut noise);
        assert!(((out.clone() - &target).norm() - 0.1).abs() < 1e-12);
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_states_rotate_phase() {
        let target = CVector::from_element(1, C64::new(1.0, 0.0));
        let mut noise = NoiseModel::adversarial(3).stream(0);
        let out = perturb_state(&target, 0.5, &mut noise);
        assert!(((out - &target).norm() - 0.5).abs() < 1e-12);
    }
}
