//! Regularizers, mirror maps and FTRL / MWU update rules.
//!
//! Learning rates follow one convention throughout: `eta` scales the payoff
//! vector inside the mirror map, `x = argmax <y, x> - h(x) / eta`. The
//! conjugate and the Fenchel coupling are evaluated for the scaled
//! regularizer `h / eta`.

mod dynamics;
mod trajectory;

pub use dynamics::{
    deterministic_dual, deterministic_mwu_step, deterministic_step, expected_stochastic_dual,
    mirror_profile, mwu2_profile, mwu_update, sample_profile, stochastic_mwu_step, stochastic_step,
    stochastic_update, DualProfile,
};
pub use trajectory::{run, DynamicsConfig, InitialState, Mode, State, Step, Trajectory};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularizer {
    /// `h(x) = sum_s x_s ln x_s`; the mirror map is a softmax (MWU).
    Entropy,
    /// `h(x) = |x|^2 / 2`; the mirror map is Euclidean projection onto the
    /// simplex (projected gradient ascent).
    #[serde(alias = "euclidean")]
    SquaredEuclidean,
}

impl std::str::FromStr for Regularizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Regularizer::Entropy),
            "euclidean" | "squared_euclidean" | "squared-euclidean" => {
                Ok(Regularizer::SquaredEuclidean)
            }
            other => Err(Error::Config(format!("unknown regularizer {other:?}"))),
        }
    }
}

impl Regularizer {
    /// `h(x)`, with `0 ln 0 = 0` for entropy.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Regularizer::Entropy => x.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum(),
            Regularizer::SquaredEuclidean => x.iter().map(|v| v * v).sum::<f64>() / 2.0,
        }
    }

    /// `grad h(x)`. Entropy requires every coordinate to be positive.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Regularizer::Entropy => {
                if x.iter().any(|&v| v <= 0.0) {
                    return Err(Error::Domain(
                        "entropy gradient undefined on the simplex boundary".into(),
                    ));
                }
                Ok(x.iter().map(|v| v.ln() + 1.0).collect())
            }
            Regularizer::SquaredEuclidean => Ok(x.to_vec()),
        }
    }

    /// The maximizing argument `argmax_x <y, x> - h(x) / eta` over the simplex.
    pub fn mirror_map(&self, y: &[f64], eta: f64) -> Result<Vec<f64>> {
        check_inputs(y, eta)?;
        Ok(match self {
            Regularizer::Entropy => softmax(y, eta),
            Regularizer::SquaredEuclidean => {
                let scaled: Vec<f64> = y.iter().map(|v| eta * v).collect();
                project_simplex(&scaled)
            }
        })
    }

    /// `sup_x <y, x> - h(x) / eta`.
    pub fn conjugate_value(&self, y: &[f64], eta: f64) -> Result<f64> {
        check_inputs(y, eta)?;
        Ok(match self {
            Regularizer::Entropy => log_sum_exp(y, eta) / eta,
            Regularizer::SquaredEuclidean => {
                let x = project_simplex(&y.iter().map(|v| eta * v).collect::<Vec<_>>());
                let lin: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
                lin - self.value(&x) / eta
            }
        })
    }
}

fn check_inputs(y: &[f64], eta: f64) -> Result<()> {
    if y.is_empty() {
        return Err(Error::Shape("empty payoff vector".into()));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::Config(format!(
            "learning rate must be positive, got {eta}"
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(
            "payoff vector has a non-finite entry".into(),
        ));
    }
    Ok(())
}

/// `softmax(eta * y)` with max-subtraction.
fn softmax(y: &[f64], eta: f64) -> Vec<f64> {
    let m = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = y.iter().map(|v| (eta * (v - m)).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// `ln sum_s exp(eta * y_s)` with max-subtraction.
fn log_sum_exp(y: &[f64], eta: f64) -> f64 {
    let m = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    eta * m + y.iter().map(|v| (eta * (v - m)).exp()).sum::<f64>().ln()
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Inverse of the entropy mirror map on the interior, normalized so the first
/// coordinate is zero: `((ln x_s - ln x_1) / eta)_s`.
pub fn inverse_map_entropy(x: &[f64], eta: f64) -> Result<Vec<f64>> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::Config(format!(
            "learning rate must be positive, got {eta}"
        )));
    }
    if x.is_empty() || x.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::Domain(
            "boundary points have no dual preimage under the entropy map".into(),
        ));
    }
    let l0 = x[0].ln();
    Ok(x.iter()
        .enumerate()
        .map(|(k, v)| if k == 0 { 0.0 } else { (v.ln() - l0) / eta })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E: Regularizer = Regularizer::Entropy;
    const Q: Regularizer = Regularizer::SquaredEuclidean;

    #[test]
    fn entropy_mirror_map_examples() {
        assert_eq!(E.mirror_map(&[0.0, 0.0], 3.0).unwrap(), vec![0.5, 0.5]);
        let x = E.mirror_map(&[1.0, -1.0], 0.1).unwrap();
        // e^{0.1} / (e^{0.1} + e^{-0.1}) = 1 / (1 + e^{-0.2})
        let expected = 1.0 / (1.0 + (-0.2f64).exp());
        assert!((x[0] - expected).abs() < 1e-15);
        assert!((x[0] - 0.549834).abs() < 1e-6);
        assert!((x[1] - 0.450166).abs() < 1e-6);
    }

    #[test]
    fn euclidean_projection_hits_vertex() {
        assert_eq!(Q.mirror_map(&[10.0, 0.0], 1.0).unwrap(), vec![1.0, 0.0]);
        let x = Q.mirror_map(&[0.3, 0.1], 1.0).unwrap();
        assert!((x[0] - 0.6).abs() < 1e-15 && (x[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn non_finite_input_rejected() {
        assert!(matches!(
            E.mirror_map(&[f64::NAN, 0.0], 1.0),
            Err(Error::NonFinite(_))
        ));
        assert!(E.mirror_map(&[0.0], 0.0).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let ln2 = 2f64.ln();
        assert!((E.conjugate_value(&[0.0, 0.0], 1.0).unwrap() - ln2).abs() < 1e-15);
        let c = 7.25;
        assert!((E.conjugate_value(&[c, c], 1.0).unwrap() - (c + ln2)).abs() < 1e-14);
        assert!((Q.conjugate_value(&[0.0, 0.0], 1.0).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn conjugate_matches_sup_by_grid_search() {
        // Independent check of the closed forms: maximize over a fine grid.
        for reg in [E, Q] {
            for (y, eta) in [([0.3, -1.2], 1.0), ([2.0, 1.5], 0.5), ([-0.4, 0.9], 3.0)] {
                let mut best = f64::NEG_INFINITY;
                for k in 0..=200_000 {
                    let p = k as f64 / 200_000.0;
                    let x = [p, 1.0 - p];
                    let v = y[0] * x[0] + y[1] * x[1] - reg.value(&x) / eta;
                    best = best.max(v);
                }
                let c = reg.conjugate_value(&y, eta).unwrap();
                assert!(
                    (c - best).abs() < 1e-8,
                    "{reg:?} {y:?} {eta}: {c} vs {best}"
                );
            }
        }
    }

    #[test]
    fn inverse_map_examples() {
        assert_eq!(
            inverse_map_entropy(&[0.5, 0.5], 1.0).unwrap(),
            vec![0.0, 0.0]
        );
        let y = inverse_map_entropy(&[0.549834, 0.450166], 0.1).unwrap();
        assert_eq!(y[0], 0.0);
        assert!((y[1] + 2.0).abs() < 1e-4);
        assert!(matches!(
            inverse_map_entropy(&[1.0, 0.0], 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn large_payoffs_do_not_overflow() {
        let x = E.mirror_map(&[1e6, 1e6 - 1.0], 1.0).unwrap();
        assert!(x.iter().all(|v| v.is_finite()));
        assert!(E.conjugate_value(&[1e6, 0.0], 1.0).unwrap().is_finite());
    }

    fn finite_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-50.0f64..50.0, 1..8)
    }

    proptest! {
        #[test]
        fn mirror_map_is_a_distribution(y in finite_vec(), eta in 0.01f64..5.0) {
            for reg in [E, Q] {
                let x = reg.mirror_map(&y, eta).unwrap();
                prop_assert!(x.iter().all(|&v| v >= 0.0));
                prop_assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            prop_assert!(E.mirror_map(&y, eta.min(0.5)).unwrap().iter().all(|&v| v > 0.0));
        }

        #[test]
        fn mirror_map_is_shift_invariant(y in finite_vec(), eta in 0.01f64..5.0, c in -100.0f64..100.0) {
            for reg in [E, Q] {
                let a = reg.mirror_map(&y, eta).unwrap();
                let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
                let b = reg.mirror_map(&shifted, eta).unwrap();
                for (p, q) in a.iter().zip(&b) {
                    prop_assert!((p - q).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn entropy_round_trip(w in prop::collection::vec(1e-6f64..1.0, 2..8), eta in 0.05f64..5.0) {
            let s: f64 = w.iter().sum();
            let x: Vec<f64> = w.iter().map(|v| v / s).collect();
            prop_assume!(x.iter().all(|&v| v >= 1e-6));
            let y = inverse_map_entropy(&x, eta).unwrap();
            prop_assert_eq!(y[0], 0.0);
            let back = E.mirror_map(&y, eta).unwrap();
            for (p, q) in x.iter().zip(&back) {
                prop_assert!((p - q).abs() < 1e-10);
            }
        }
    }
}
