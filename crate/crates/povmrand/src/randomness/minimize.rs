//! Source-independent minimum randomness R(M) = min over input states.
//!
//! Convexity puts the minimum of the convex-roof measure on pure states, so
//! the scan runs over the complex unit sphere; for Rq the same scan is an
//! upper bound on the infimum and the report says so.

use super::search::{nelder_mead, unit_ket_params};
use super::{
    born_entropy, r_cf, BoundType, Measure, OptimizerConfig, PureDecomposition, RandomnessError,
    RandomnessReport,
};
use crate::exec;
use crate::linalg::{DensityState, Ket};
use crate::oracle::{PureStateGrid, Rng};
use crate::povm::{extremality_check, ExtremalityStatus, Povm};

/// Minimize the randomness of `p` over pure input states.
///
/// For extremal (or inconclusive-independent) POVMs the objective is the
/// Born entropy through the canonical extension; otherwise each candidate
/// state is scored with a reduced-budget convex-roof decomposition search.
pub fn min_randomness(
    p: &Povm,
    measure: Measure,
    cfg: &OptimizerConfig,
) -> Result<RandomnessReport, RandomnessError> {
    let verdict = extremality_check(p)?;
    let d = p.dim();
    let born_objective = verdict.status != ExtremalityStatus::NotExtremal;
    let cf_cfg = OptimizerConfig {
        restarts: 2,
        max_iterations: 200,
        ..cfg.clone()
    };

    let objective = |params: &[f64]| -> f64 {
        let amps = unit_ket_params(params, d);
        let ket = Ket::new(amps).expect("unit parameterization");
        if born_objective {
            born_entropy(&ket, p)
        } else {
            let rho = DensityState::from_ket(&ket);
            match r_cf(&rho, p, measure, &cf_cfg) {
                Ok(report) => report.value,
                Err(_) => f64::INFINITY,
            }
        }
    };

    // Deterministic coarse seed: grid scan where grids exist, basis kets
    // elsewhere. The non-extremal objective is expensive, so its grid is
    // kept tiny.
    let grid_best: Vec<f64> = {
        let resolution = if born_objective { 24 } else { 4 };
        let mut best: Option<(f64, Ket)> = None;
        if let Ok(grid) = PureStateGrid::new(d, resolution) {
            if born_objective {
                if let Some((_, value, ket)) =
                    exec::scan_min(grid.len(), |i| {
                        let ket = grid.ket(i);
                        (born_entropy(&ket, p), ket)
                    })
                {
                    best = Some((value, ket));
                }
            } else {
                for ket in grid.iter() {
                    let v = objective(&ket_params(&ket));
                    if best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, ket));
                    }
                }
            }
        } else {
            for i in 0..d {
                let ket = Ket::basis(d, i);
                let v = objective(&ket_params(&ket));
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, ket));
                }
            }
        }
        ket_params(&best.expect("at least one candidate").1)
    };

    let restarts = cfg.restarts.max(1);
    let base_rng = Rng::new(cfg.seed);
    let budget = if born_objective {
        cfg.max_iterations
    } else {
        cfg.max_iterations.min(60)
    };
    let best = exec::scan_min(restarts, |r| {
        let start: Vec<f64> = if r == 0 {
            grid_best.clone()
        } else {
            let mut rng = base_rng.derive(0x3153 + r as u64);
            (0..2 * d).map(|_| rng.normal()).collect()
        };
        let (x, v) = nelder_mead(&objective, &start, 0.3, budget, cfg.convergence_tol);
        (v, x)
    })
    .expect("at least one restart");

    let argmin = Ket::new(unit_ket_params(&best.2, d)).expect("unit parameterization");
    let mut note = match measure {
        Measure::Rq => Some(
            "pure-state scan upper-bounds the infimum for Rq on mixed inputs".to_string(),
        ),
        Measure::Rc => None,
    };
    if verdict.status == ExtremalityStatus::Inconclusive {
        let flag = "extremality inconclusive; canonical-extension value assumed".to_string();
        note = Some(match note {
            Some(n) => format!("{n}; {flag}"),
            None => flag,
        });
    }
    Ok(RandomnessReport {
        value: best.1.max(0.0),
        bound_type: BoundType::UpperBound,
        pure_certificate: Some(PureDecomposition::new(vec![1.0], vec![argmin])),
        decomposition_certificate: None,
        note,
    })
}

fn ket_params(ket: &Ket) -> Vec<f64> {
    ket.amplitudes()
        .iter()
        .flat_map(|z| [z.re, z.im])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{sic_qubit, trivial_povm};

    fn z_povm() -> Povm {
        Povm::new(
            2,
            vec![Ket::basis(2, 0).projector(), Ket::basis(2, 1).projector()],
        )
        .unwrap()
    }

    #[test]
    fn z_basis_minimum_is_zero() {
        let cfg = OptimizerConfig {
            restarts: 4,
            ..OptimizerConfig::with_seed(1)
        };
        let report = min_randomness(&z_povm(), Measure::Rc, &cfg).unwrap();
        assert!(report.value < 1e-9);
        let cert = report.pure_certificate.unwrap();
        let p0 = cert.kets()[0].expectation(z_povm().element(0));
        assert!(!(1e-6..=1.0 - 1e-6).contains(&p0));
    }

    #[test]
    fn sic_minimum_is_log3() {
        let cfg = OptimizerConfig {
            restarts: 8,
            ..OptimizerConfig::with_seed(2)
        };
        let report = min_randomness(&sic_qubit(), Measure::Rc, &cfg).unwrap();
        assert!(
            (report.value - 3.0f64.log2()).abs() < 1e-6,
            "value {}",
            report.value
        );
        assert!(report.value > crate::randomness::sic_lower_bound(2));
    }

    #[test]
    fn trivial_povm_minimum_is_zero() {
        let p = trivial_povm(2, &[0.5, 0.5]).unwrap();
        let cfg = OptimizerConfig {
            restarts: 2,
            max_iterations: 400,
            ..OptimizerConfig::with_seed(3)
        };
        let report = min_randomness(&p, Measure::Rc, &cfg).unwrap();
        assert!(report.value < 1e-6, "value {}", report.value);
    }
}
