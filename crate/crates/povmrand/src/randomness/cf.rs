//! Convex-roof randomness over POVM decompositions,
//! R^cf(rho, M) = min { sum_j r_j R(rho, N^j) : sum_j r_j N^j = M }.
//!
//! The extremality constraint on the components is dropped (relaxing it
//! cannot lower the optimum), which leaves a biconvex feasibility problem.
//! Strategy: score exactly-feasible seeds (the extremal decomposition, the
//! depolarized-structure split when the POVM carries a uniform part, and
//! the single-component identity split), then run a penalty-regularized
//! local search whose accepted iterates are repaired back onto the
//! constraint set before scoring. Only feasible decompositions (residual
//! below 1e-6) are ever reported.

use super::dilated::{component_randomness, StateInfo};
use super::{BoundType, Measure, OptimizerConfig, RandomnessError, RandomnessReport};
use crate::exec;
use crate::linalg::{hermitian_eig, matrix_sqrt_psd, C64, ComplexMatrix, DensityState};
use crate::oracle::{verify_decomposition, Rng};
use crate::povm::{extremal_decompose, Decomposition, Povm};

/// Residual gate for a decomposition to count as feasible.
const FEASIBLE_RESIDUAL: f64 = 1e-6;

/// Ridge added to raw Gram factors so component normalization never divides
/// by a singular sum.
const FACTOR_RIDGE: f64 = 1e-9;

struct CfProblem<'a> {
    target: &'a Povm,
    state: StateInfo,
    measure: Measure,
    components: usize,
    /// Full inner budget: scores seeds and repaired candidates, i.e. every
    /// value that can end up in the report.
    score_inner_cfg: OptimizerConfig,
    /// Slim inner budget for the penalized objective inside the search;
    /// guides the walk only, never reported.
    search_inner_cfg: OptimizerConfig,
    penalty_weight: f64,
}

impl<'a> CfProblem<'a> {
    fn dim(&self) -> usize {
        self.target.dim()
    }

    fn outcomes(&self) -> usize {
        self.target.len()
    }

    fn param_len(&self) -> usize {
        let per_component = self.outcomes() * 2 * self.dim() * self.dim();
        self.components + self.components * per_component
    }

    /// Softmax weights plus whitened Gram-factor components. Every decoded
    /// component is a valid POVM by construction; only the mixture
    /// constraint can be violated.
    fn decode(&self, theta: &[f64]) -> (Vec<f64>, Vec<Povm>) {
        let k = self.components;
        let d = self.dim();
        let m = self.outcomes();
        let max_w = theta[..k].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = theta[..k].iter().map(|w| (w - max_w).exp()).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }

        let per_matrix = 2 * d * d;
        let mut povms = Vec::with_capacity(k);
        for j in 0..k {
            let base = k + j * m * per_matrix;
            let mut grams: Vec<ComplexMatrix> = Vec::with_capacity(m);
            let mut sum = ComplexMatrix::zeros(d, d);
            for i in 0..m {
                let offset = base + i * per_matrix;
                let mut b = ComplexMatrix::zeros(d, d);
                for r in 0..d {
                    for c in 0..d {
                        let at = offset + 2 * (r * d + c);
                        b[(r, c)] = C64::new(theta[at], theta[at + 1]);
                    }
                }
                let mut g = &b.conjugate_transpose() * &b;
                for r in 0..d {
                    g[(r, r)] += FACTOR_RIDGE;
                }
                sum = &sum + &g;
                grams.push(g);
            }
            let whitener = inverse_sqrt(&sum);
            let elements: Vec<ComplexMatrix> = grams
                .iter()
                .map(|g| {
                    let w = &(&whitener * g) * &whitener;
                    (&w + &w.conjugate_transpose()).scale(0.5)
                })
                .collect();
            povms.push(Povm::from_parts_unchecked(d, elements));
        }
        (weights, povms)
    }

    fn encode(&self, dec: &Decomposition) -> Vec<f64> {
        let k = self.components;
        let d = self.dim();
        let m = self.outcomes();
        let per_matrix = 2 * d * d;
        let mut theta = vec![0.0; self.param_len()];
        for j in 0..k {
            let (weight, comp) = if j < dec.len() {
                (dec.weights()[j], &dec.components()[j])
            } else {
                // Pad unused slots with the target itself at negligible weight.
                (1e-9, self.target)
            };
            theta[j] = weight.max(1e-12).ln();
            for i in 0..m {
                let root = matrix_sqrt_psd(comp.element(i))
                    .unwrap_or_else(|_| ComplexMatrix::zeros(d, d));
                let base = k + j * m * per_matrix + i * per_matrix;
                for r in 0..d {
                    for c in 0..d {
                        let at = base + 2 * (r * d + c);
                        theta[at] = root[(r, c)].re;
                        theta[at + 1] = root[(r, c)].im;
                    }
                }
            }
        }
        theta
    }

    fn mixture_residual_sq(&self, weights: &[f64], povms: &[Povm]) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..self.outcomes() {
            let mut s = ComplexMatrix::zeros(d, d);
            for (w, p) in weights.iter().zip(povms) {
                s = &s + &p.element(i).scale(*w);
            }
            let diff = &s - self.target.element(i);
            let f = diff.frobenius_norm();
            acc += f * f;
        }
        acc
    }

    fn average_randomness(
        &self,
        weights: &[f64],
        povms: &[Povm],
        inner: &OptimizerConfig,
    ) -> Result<f64, RandomnessError> {
        let mut acc = 0.0;
        for (w, p) in weights.iter().zip(povms) {
            if *w < 1e-12 {
                continue;
            }
            acc += w * component_randomness(&self.state, p, self.measure, inner)?;
        }
        Ok(acc)
    }

    fn penalized(&self, theta: &[f64]) -> f64 {
        let (weights, povms) = self.decode(theta);
        match self.average_randomness(&weights, &povms, &self.search_inner_cfg) {
            Ok(value) => value + self.penalty_weight * self.mixture_residual_sq(&weights, &povms),
            Err(_) => f64::INFINITY,
        }
    }

    /// Force an iterate onto the constraint set: recompute the last
    /// component from the mixture residual, clamp it PSD, re-whiten, and
    /// accept only if the verified residual passes the feasibility gate.
    fn repair(&self, theta: &[f64]) -> Option<(f64, Decomposition)> {
        let (weights, mut povms) = self.decode(theta);
        let last = self.components - 1;
        if weights[last] < 1e-4 {
            return None;
        }
        let d = self.dim();
        let mut elements = Vec::with_capacity(self.outcomes());
        for i in 0..self.outcomes() {
            let mut partial = ComplexMatrix::zeros(d, d);
            for j in 0..last {
                partial = &partial + &povms[j].element(i).scale(weights[j]);
            }
            let raw = (self.target.element(i) - &partial).scale(1.0 / weights[last]);
            let sym = (&raw + &raw.conjugate_transpose()).scale(0.5);
            elements.push(clamp_psd(&sym)?);
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for e in &elements {
            sum = &sum + e;
        }
        let whitener = inverse_sqrt(&sum);
        let repaired: Vec<ComplexMatrix> = elements
            .iter()
            .map(|e| {
                let w = &(&whitener * e) * &whitener;
                (&w + &w.conjugate_transpose()).scale(0.5)
            })
            .collect();
        povms[last] = Povm::from_parts_unchecked(d, repaired);

        let dec = Decomposition::new(weights.clone(), povms.clone(), self.target.clone());
        if verify_decomposition(&dec, self.target) >= FEASIBLE_RESIDUAL {
            return None;
        }
        let value = self
            .average_randomness(&weights, &povms, &self.score_inner_cfg)
            .ok()?;
        Some((value, dec))
    }

    /// Adaptive random-block descent on the penalized objective. Returns the
    /// best repaired feasible candidate encountered.
    fn search(&self, start: Vec<f64>, mut rng: Rng, cfg: &OptimizerConfig) -> Option<(f64, Decomposition)> {
        let k = self.components;
        let per_component = self.outcomes() * 2 * self.dim() * self.dim();
        let mut current = start;
        let mut f_current = self.penalized(&current);
        let mut best = self.repair(&current);
        let mut step = 0.2;
        let mut stall = 0usize;
        let mut accepts = 0usize;

        for _ in 0..cfg.max_iterations {
            let mut proposal = current.clone();
            let pick = rng.uniform();
            if pick < 0.3 {
                for slot in proposal.iter_mut().take(k) {
                    *slot += step * rng.normal();
                }
            } else if pick < 0.85 {
                let j = (rng.next_u64() as usize) % k;
                let base = k + j * per_component;
                for slot in proposal[base..base + per_component].iter_mut() {
                    *slot += step * rng.normal();
                }
                proposal[j] += step * rng.normal();
            } else {
                for slot in proposal.iter_mut() {
                    *slot += 0.5 * step * rng.normal();
                }
            }
            let f_new = self.penalized(&proposal);
            if f_new < f_current - 1e-15 {
                current = proposal;
                f_current = f_new;
                step = (step * 1.25).min(1.0);
                stall = 0;
                accepts += 1;
                // Full-budget scoring is the expensive part for mixed-state
                // convex roofs; do it on a cadence, plus once at the end.
                if accepts % 16 == 1 {
                    if let Some((value, dec)) = self.repair(&current) {
                        if best.as_ref().is_none_or(|(b, _)| value < *b) {
                            best = Some((value, dec));
                        }
                    }
                }
            } else {
                step = (step * 0.9).max(1e-5);
                stall += 1;
                if stall > 80 {
                    break;
                }
            }
        }
        if accepts > 0 {
            if let Some((value, dec)) = self.repair(&current) {
                if best.as_ref().is_none_or(|(b, _)| value < *b) {
                    best = Some((value, dec));
                }
            }
        }
        best
    }
}

fn clamp_psd(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let (eigenvalues, vectors) = hermitian_eig(m).ok()?;
    let d = m.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for (l, v) in eigenvalues.iter().zip(&vectors) {
        if *l > 0.0 {
            out = &out + &v.projector().scale(*l);
        }
    }
    Some(out)
}

/// S^{-1/2} of a positive definite matrix.
fn inverse_sqrt(s: &ComplexMatrix) -> ComplexMatrix {
    let (eigenvalues, vectors) = hermitian_eig(s).expect("whitening a Hermitian sum");
    let d = s.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for (l, v) in eigenvalues.iter().zip(&vectors) {
        out = &out + &v.projector().scale(1.0 / l.max(1e-300).sqrt());
    }
    out
}

/// Deterministic split of the uniform trivial part: component k is the
/// outcome-certain POVM with the identity at slot k.
fn deterministic_components(d: usize, m: usize) -> Vec<Povm> {
    (0..m)
        .map(|k| {
            let elements: Vec<ComplexMatrix> = (0..m)
                .map(|i| {
                    if i == k {
                        ComplexMatrix::identity(d)
                    } else {
                        ComplexMatrix::zeros(d, d)
                    }
                })
                .collect();
            Povm::from_parts_unchecked(d, elements)
        })
        .collect()
}

/// When every element dominates a slice of the uniform POVM, split
/// M = (1 - mu) B + mu I_uniform and decompose the parts separately. The
/// uniform part contributes zero randomness through its outcome-certain
/// split, which is what makes this seed sharp for depolarized families.
fn depolarized_seed(p: &Povm) -> Option<Decomposition> {
    let d = p.dim();
    let m = p.len();
    let mut min_eigenvalue = f64::INFINITY;
    for element in p.elements() {
        let (vals, _) = hermitian_eig(element).ok()?;
        min_eigenvalue = min_eigenvalue.min(*vals.last()?);
    }
    let mu = (m as f64 * min_eigenvalue.max(0.0)).min(1.0);
    if mu < 1e-9 {
        return None;
    }

    let mut weights = Vec::new();
    let mut components = Vec::new();
    if mu >= 1.0 - 1e-9 {
        weights.extend(std::iter::repeat_n(1.0 / m as f64, m));
        components.extend(deterministic_components(d, m));
    } else {
        let base_elements: Vec<ComplexMatrix> = p
            .elements()
            .iter()
            .map(|e| {
                let mut out = e.clone();
                for r in 0..d {
                    out[(r, r)] -= mu / m as f64;
                }
                out.scale(1.0 / (1.0 - mu))
            })
            .collect();
        let base = Povm::new(d, base_elements).ok()?;
        let dec = extremal_decompose(&base).ok()?;
        for (w, c) in dec.weights().iter().zip(dec.components()) {
            weights.push(w * (1.0 - mu));
            components.push(c.clone());
        }
        weights.extend(std::iter::repeat_n(mu / m as f64, m));
        components.extend(deterministic_components(d, m));
    }
    let dec = Decomposition::new(weights, components, p.clone());
    (verify_decomposition(&dec, p) < FEASIBLE_RESIDUAL).then_some(dec)
}

/// Convex-roof randomness over POVM decompositions.
///
/// Reports the best feasible value found (bound type `UpperBound`) together
/// with the achieving decomposition. Never exceeds the value of the
/// extremal-decomposition seed.
pub fn r_cf(
    rho: &DensityState,
    p: &Povm,
    measure: Measure,
    cfg: &OptimizerConfig,
) -> Result<RandomnessReport, RandomnessError> {
    if rho.dim() != p.dim() {
        return Err(RandomnessError::DimensionMismatch);
    }
    let state = StateInfo::new(rho)?;
    let components = cfg
        .decomposition_terms
        .unwrap_or(p.len() * p.dim() * p.dim())
        .max(2);
    let score_inner_cfg = cfg.inner(0x00c0_ffee);
    let search_inner_cfg = OptimizerConfig {
        restarts: 1,
        max_iterations: 80,
        ..score_inner_cfg.clone()
    };
    let problem = CfProblem {
        target: p,
        state,
        measure,
        components,
        score_inner_cfg,
        search_inner_cfg,
        penalty_weight: cfg.penalty_weight,
    };

    // Exactly-feasible seeds, scored directly.
    let mut seeds: Vec<Decomposition> = Vec::new();
    if let Ok(dec) = extremal_decompose(p) {
        seeds.push(dec);
    }
    if let Some(dec) = depolarized_seed(p) {
        seeds.push(dec);
    }
    seeds.push(Decomposition::new(vec![1.0], vec![p.clone()], p.clone()));

    let mut best: Option<(f64, Decomposition)> = None;
    for seed in &seeds {
        if verify_decomposition(seed, p) >= FEASIBLE_RESIDUAL {
            continue;
        }
        let value =
            problem.average_randomness(seed.weights(), seed.components(), &problem.score_inner_cfg)?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, seed.clone()));
        }
    }

    // A seed at zero is already optimal; the search cannot go lower.
    let at_floor = best.as_ref().is_some_and(|(v, _)| *v < 1e-9);

    // Local search from the best seed and from jittered/random starts.
    if let (false, Some((_, seed_dec))) = (at_floor, &best) {
        let theta0 = problem.encode(seed_dec);
        let base_rng = Rng::new(cfg.seed);
        let problem_ref = &problem;
        let theta_ref = &theta0;
        let searched = exec::scan_min(cfg.restarts.max(1), move |r| {
            let mut rng = base_rng.derive(0x5EA2 + r as u64);
            let start = if r == 0 {
                theta_ref.clone()
            } else {
                let scale = 0.05 * (1.0 + (r % 4) as f64);
                theta_ref
                    .iter()
                    .map(|x| x + scale * rng.normal())
                    .collect()
            };
            match problem_ref.search(start, rng, cfg) {
                Some((value, dec)) => (value, Some(dec)),
                None => (f64::INFINITY, None),
            }
        });
        if let Some((_, value, Some(dec))) = searched {
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, dec));
            }
        }
    }

    let (value, certificate) = best.ok_or(RandomnessError::NoFeasiblePoint)?;
    Ok(RandomnessReport {
        value: value.max(0.0),
        bound_type: BoundType::UpperBound,
        pure_certificate: None,
        decomposition_certificate: Some(certificate),
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Ket;
    use crate::povm::{depolarize, mub_qubit, sic_qubit, trivial_povm, vn_x_qubit};

    fn quick_cfg(seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            restarts: 3,
            max_iterations: 250,
            ..OptimizerConfig::with_seed(seed)
        }
    }

    fn ket0_state() -> DensityState {
        DensityState::from_ket(&Ket::basis(2, 0))
    }

    #[test]
    fn trivial_povm_has_zero_randomness() {
        let p = trivial_povm(2, &[0.5, 0.5]).unwrap();
        let report = r_cf(&ket0_state(), &p, Measure::Rc, &quick_cfg(1)).unwrap();
        assert!(report.value < 1e-9, "value {}", report.value);
        let dec = report.decomposition_certificate.unwrap();
        assert!(verify_decomposition(&dec, &p) < 1e-6);
    }

    #[test]
    fn ket0_under_mub_is_half() {
        let report = r_cf(&ket0_state(), &mub_qubit(), Measure::Rc, &quick_cfg(2)).unwrap();
        assert!((report.value - 0.5).abs() < 1e-6, "value {}", report.value);
    }

    #[test]
    fn ket0_under_sic_is_extremal_value() {
        let expected = 1.0 + 0.5 * 3.0f64.log2();
        let report = r_cf(&ket0_state(), &sic_qubit(), Measure::Rc, &quick_cfg(3)).unwrap();
        assert!((report.value - expected).abs() < 1e-6, "value {}", report.value);
    }

    #[test]
    fn depolarized_vn_scales_linearly() {
        for (i, mu) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
            let p = depolarize(&vn_x_qubit(), mu).unwrap();
            let report = r_cf(&ket0_state(), &p, Measure::Rc, &quick_cfg(10 + i as u64)).unwrap();
            let expected = 1.0 - mu;
            assert!(
                (report.value - expected).abs() < 1e-4,
                "mu {mu}: {} vs {expected}",
                report.value
            );
        }
    }

    #[test]
    fn depolarized_seed_matches_structure() {
        let p = depolarize(&mub_qubit(), 0.3).unwrap();
        let dec = depolarized_seed(&p).unwrap();
        assert!(verify_decomposition(&dec, &p) < 1e-8);
    }

    #[test]
    fn never_exceeds_single_component_value() {
        let mut rng = Rng::new(33);
        let p = crate::oracle::random_povm(2, 3, &mut rng);
        let rho = crate::oracle::random_density(2, 2, &mut rng);
        let cfg = quick_cfg(5);
        let report = r_cf(&rho, &p, Measure::Rq, &cfg).unwrap();
        let state = StateInfo::new(&rho).unwrap();
        let single = component_randomness(&state, &p, Measure::Rq, &cfg.inner(0x00c0_ffee)).unwrap();
        assert!(report.value <= single + 1e-9);
    }
}
