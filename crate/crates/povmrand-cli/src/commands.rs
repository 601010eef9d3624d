//! Subcommand implementations. Every command returns the stdout payload and
//! an exit code; hard failures carry their own code (1 domain, 2 parse/IO).

use crate::io::{load_povm, load_povm_unvalidated, load_state, InputError};
use crate::report::{fmt_f64, ket_json, matrix_json, round_sig, Json};
use povmrand::linalg::hermitian_eig;
use povmrand::naimark::{canonical_extension, consistency_check};
use povmrand::oracle::verify_decomposition;
use povmrand::povm::{depolarize, mub_qubit, sic_qubit, vn_x_qubit};
use povmrand::randomness::sic_lower_bound;
use povmrand::{
    extremality_check, min_randomness, r_cf, r_extremal, BoundType, Decomposition,
    ExtremalityStatus, Measure, OptimizerConfig, Povm, PureDecomposition, RandomnessError,
    RandomnessReport,
};
use std::path::Path;

pub enum CmdError {
    /// Exit 1 with a machine-readable error object on stdout.
    Domain(Json),
    /// Exit 2 with a plain message on stderr.
    Io(String),
}

pub type CmdResult = Result<(String, i32), CmdError>;

fn domain_error(kind: &str, message: String) -> CmdError {
    CmdError::Domain(Json::Obj(vec![(
        "error",
        Json::Obj(vec![
            ("kind", Json::Str(kind.to_string())),
            ("message", Json::Str(message)),
        ]),
    )]))
}

impl From<InputError> for CmdError {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Parse(msg) => CmdError::Io(msg),
            InputError::Invalid(msg) => domain_error("invalid_input", msg),
        }
    }
}

impl From<RandomnessError> for CmdError {
    fn from(e: RandomnessError) -> Self {
        domain_error("randomness", e.to_string())
    }
}

fn extremality_name(status: ExtremalityStatus) -> &'static str {
    match status {
        ExtremalityStatus::Extremal => "extremal",
        ExtremalityStatus::NotExtremal => "not_extremal",
        ExtremalityStatus::Inconclusive => "inconclusive",
    }
}

fn bound_name(bound: BoundType) -> &'static str {
    match bound {
        BoundType::Exact => "exact",
        BoundType::UpperBound => "upper_bound",
    }
}

fn pure_certificate_json(cert: &PureDecomposition) -> Json {
    Json::Obj(vec![
        (
            "weights",
            Json::Arr(cert.weights().iter().map(|w| Json::Num(*w)).collect()),
        ),
        ("kets", Json::Arr(cert.kets().iter().map(ket_json).collect())),
    ])
}

fn decomposition_json(dec: &Decomposition) -> Json {
    Json::Obj(vec![
        (
            "weights",
            Json::Arr(dec.weights().iter().map(|w| Json::Num(*w)).collect()),
        ),
        (
            "components",
            Json::Arr(
                dec.components()
                    .iter()
                    .map(|c| Json::Arr(c.elements().iter().map(matrix_json).collect()))
                    .collect(),
            ),
        ),
    ])
}

pub fn cmd_validate(povm_path: &Path) -> CmdResult {
    let (dim, elements) = load_povm_unvalidated(povm_path)?;

    let mut hermiticity = 0.0f64;
    let mut min_eigenvalue = f64::INFINITY;
    for m in &elements {
        hermiticity = hermiticity.max(m.hermiticity_residual());
        let sym = (m + &m.conjugate_transpose()).scale(0.5);
        if let Ok((vals, _)) = hermitian_eig(&sym) {
            if let Some(&low) = vals.last() {
                min_eigenvalue = min_eigenvalue.min(low);
            }
        }
    }
    let completeness = {
        let mut sum = povmrand::ComplexMatrix::zeros(dim, dim);
        for m in &elements {
            sum = &sum + m;
        }
        (&sum - &povmrand::ComplexMatrix::identity(dim)).max_norm()
    };
    let outcomes = elements.len();
    let built = Povm::new(dim, elements);

    let mut fields = vec![
        ("command", Json::Str("validate".into())),
        ("dim", Json::Int(dim as i64)),
        ("outcomes", Json::Int(outcomes as i64)),
        ("hermiticity_residual", Json::Num(hermiticity)),
        ("min_eigenvalue", Json::Num(min_eigenvalue)),
        ("completeness_residual", Json::Num(completeness)),
    ];
    match built {
        Ok(p) => {
            let verdict = extremality_check(&p)
                .map_err(|e| domain_error("extremality", e.to_string()))?;
            fields.push(("valid", Json::Bool(true)));
            fields.push((
                "extremality",
                Json::Str(extremality_name(verdict.status).into()),
            ));
            if let Some(w) = verdict.witness {
                fields.push((
                    "witness",
                    Json::Arr(w.into_iter().map(Json::Num).collect()),
                ));
            }
            Ok((Json::Obj(fields).render(), 0))
        }
        Err(e) => {
            fields.push(("valid", Json::Bool(false)));
            fields.push(("violation", Json::Str(e.to_string())));
            Ok((Json::Obj(fields).render(), 1))
        }
    }
}

pub struct RandomnessArgs {
    pub measure: Measure,
    pub mode: Mode,
    pub seed: u64,
    pub restarts: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Auto,
    Extremal,
    Cf,
}

pub fn cmd_randomness(povm_path: &Path, state_path: &Path, args: &RandomnessArgs) -> CmdResult {
    let p = load_povm(povm_path)?;
    let rho = load_state(state_path)?;
    if rho.dim() != p.dim() {
        return Err(domain_error(
            "dimension_mismatch",
            format!("state dim {} vs POVM dim {}", rho.dim(), p.dim()),
        ));
    }
    let cfg = OptimizerConfig {
        restarts: args.restarts,
        seed: args.seed,
        ..OptimizerConfig::default()
    };
    let verdict = extremality_check(&p).map_err(|e| domain_error("extremality", e.to_string()))?;

    let use_extremal = match args.mode {
        Mode::Auto => verdict.status == ExtremalityStatus::Extremal,
        Mode::Extremal => {
            if verdict.status == ExtremalityStatus::NotExtremal {
                return Err(domain_error(
                    "not_extremal",
                    "POVM is not extremal; rerun with --mode cf or auto".into(),
                ));
            }
            true
        }
        Mode::Cf => false,
    };

    let (report, dispatched, residual): (RandomnessReport, &str, f64) = if use_extremal {
        let report = r_extremal(&rho, &p, args.measure, &cfg)?;
        let ext = canonical_extension(&p).map_err(|e| domain_error("naimark", e.to_string()))?;
        let residual =
            consistency_check(&ext, &p).map_err(|e| domain_error("naimark", e.to_string()))?;
        (report, "extremal", residual)
    } else {
        let report = r_cf(&rho, &p, args.measure, &cfg)?;
        let residual = report
            .decomposition_certificate
            .as_ref()
            .map(|dec| verify_decomposition(dec, &p))
            .unwrap_or(f64::NAN);
        (report, "cf", residual)
    };

    let mut fields = vec![
        ("command", Json::Str("randomness".into())),
        (
            "measure",
            Json::Str(match args.measure {
                Measure::Rc => "rc".into(),
                Measure::Rq => "rq".into(),
            }),
        ),
        (
            "mode",
            Json::Str(
                match args.mode {
                    Mode::Auto => "auto",
                    Mode::Extremal => "extremal",
                    Mode::Cf => "cf",
                }
                .into(),
            ),
        ),
        ("dispatched", Json::Str(dispatched.into())),
        (
            "extremality",
            Json::Str(extremality_name(verdict.status).into()),
        ),
        ("value", Json::Num(report.value)),
        ("bound_type", Json::Str(bound_name(report.bound_type).into())),
        ("seed", Json::Int(args.seed as i64)),
        ("certificate_residual", Json::Num(residual)),
    ];
    if let Some(cert) = &report.pure_certificate {
        fields.push(("pure_certificate", pure_certificate_json(cert)));
    }
    if let Some(dec) = &report.decomposition_certificate {
        fields.push(("decomposition_certificate", decomposition_json(dec)));
    }
    match &report.note {
        Some(n) => fields.push(("note", Json::Str(n.clone()))),
        None => fields.push(("note", Json::Null)),
    }
    Ok((Json::Obj(fields).render(), 0))
}

/// Rank-1 check plus equal traces 1/d plus pairwise overlaps 1/(d+1): the
/// structure test gating the theorem bound in reports.
fn detect_sic_structure(p: &Povm) -> bool {
    let d = p.dim();
    if p.len() != d * d {
        return false;
    }
    let mut fiducials = Vec::with_capacity(p.len());
    for m in p.elements() {
        let trace = m.trace().re;
        if (trace - 1.0 / d as f64).abs() > 1e-8 {
            return false;
        }
        let Ok((vals, vecs)) = hermitian_eig(m) else {
            return false;
        };
        if vals.iter().filter(|&&x| x > 1e-8).count() != 1 {
            return false;
        }
        if (vals[0] - 1.0 / d as f64).abs() > 1e-8 {
            return false;
        }
        fiducials.push(vecs[0].clone());
    }
    let target = 1.0 / (d as f64 + 1.0);
    for i in 0..fiducials.len() {
        for j in (i + 1)..fiducials.len() {
            let overlap = fiducials[i].inner(&fiducials[j]).norm_sqr();
            if (overlap - target).abs() > 1e-8 {
                return false;
            }
        }
    }
    true
}

pub fn cmd_min_randomness(povm_path: &Path, measure: Measure, seed: u64) -> CmdResult {
    let p = load_povm(povm_path)?;
    let cfg = OptimizerConfig {
        restarts: 16,
        seed,
        ..OptimizerConfig::default()
    };
    let report = min_randomness(&p, measure, &cfg)?;
    let is_sic = detect_sic_structure(&p);

    let mut fields = vec![
        ("command", Json::Str("min_randomness".into())),
        (
            "measure",
            Json::Str(match measure {
                Measure::Rc => "rc".into(),
                Measure::Rq => "rq".into(),
            }),
        ),
        ("value", Json::Num(report.value)),
        ("bound_type", Json::Str(bound_name(report.bound_type).into())),
        ("seed", Json::Int(seed as i64)),
        ("sic_structure", Json::Bool(is_sic)),
    ];
    if is_sic {
        let bound = sic_lower_bound(p.dim());
        fields.push(("theorem_lower_bound", Json::Num(bound)));
        fields.push(("exceeds_theorem_bound", Json::Bool(report.value > bound)));
    }
    if let Some(cert) = &report.pure_certificate {
        fields.push(("argmin_ket", ket_json(&cert.kets()[0])));
    }
    match &report.note {
        Some(n) => fields.push(("note", Json::Str(n.clone()))),
        None => fields.push(("note", Json::Null)),
    }
    Ok((Json::Obj(fields).render(), 0))
}

fn csv_number(x: f64) -> String {
    format!("{}", round_sig(x))
}

pub fn cmd_figure3(mu_steps: usize, seed: u64) -> CmdResult {
    if mu_steps < 2 {
        return Err(domain_error("bad_argument", "--mu-steps must be >= 2".into()));
    }
    let rho = povmrand::DensityState::from_ket(&povmrand::Ket::basis(2, 0));
    let cfg = OptimizerConfig {
        restarts: 6,
        max_iterations: 300,
        seed,
        ..OptimizerConfig::default()
    };
    let vn = vn_x_qubit();
    let mub = mub_qubit();
    let sic = sic_qubit();
    let log3_half = 0.5 * 3.0f64.log2();

    let mut out = String::from("mu,rcf_vn,rcf_mub,rcf_sic,analytic_vn,analytic_mub,analytic_sic\n");
    for k in 0..mu_steps {
        let mu = k as f64 / (mu_steps - 1) as f64;
        let mut computed = Vec::with_capacity(3);
        for family in [&vn, &mub, &sic] {
            let p = depolarize(family, mu).map_err(|e| domain_error("depolarize", e.to_string()))?;
            let value = r_cf(&rho, &p, Measure::Rc, &cfg)?.value;
            computed.push(value);
        }
        let row = [
            mu,
            computed[0],
            computed[1],
            computed[2],
            1.0 - mu,
            (1.0 - mu) * 0.5,
            (1.0 - mu) * (1.0 + log3_half),
        ];
        let cells: Vec<String> = row.iter().map(|x| csv_number(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok((out, 0))
}

pub fn cmd_naimark(povm_path: &Path) -> CmdResult {
    let p = load_povm(povm_path)?;
    let ext = canonical_extension(&p).map_err(|e| domain_error("naimark", e.to_string()))?;
    let residual =
        consistency_check(&ext, &p).map_err(|e| domain_error("naimark", e.to_string()))?;

    let fields = vec![
        ("command", Json::Str("naimark".into())),
        ("system_dim", Json::Int(ext.system_dim as i64)),
        ("ancilla_dim", Json::Int(ext.ancilla_dim as i64)),
        ("total_dim", Json::Int((ext.system_dim * ext.ancilla_dim) as i64)),
        ("ancilla_index", Json::Int(ext.ancilla_index as i64)),
        ("unitary", matrix_json(&ext.unitary)),
        (
            "projectors",
            Json::Arr(ext.pvm.projectors().iter().map(matrix_json).collect()),
        ),
        ("consistency_residual", Json::Num(residual)),
    ];
    let code = if residual < 1e-8 { 0 } else { 1 };
    Ok((Json::Obj(fields).render(), code))
}

pub fn cmd_decompose(povm_path: &Path) -> CmdResult {
    let p = load_povm(povm_path)?;
    let dec = povmrand::extremal_decompose(&p)
        .map_err(|e| domain_error("decompose", e.to_string()))?;
    let residual = verify_decomposition(&dec, &p);
    let mut leaves_extremal = true;
    for component in dec.components() {
        let (refined, _) = povmrand::povm::refine_rank_one(component)
            .map_err(|e| domain_error("decompose", e.to_string()))?;
        let verdict =
            extremality_check(&refined).map_err(|e| domain_error("decompose", e.to_string()))?;
        if verdict.status != ExtremalityStatus::Extremal {
            leaves_extremal = false;
        }
    }
    let fields = vec![
        ("command", Json::Str("decompose".into())),
        ("component_count", Json::Int(dec.len() as i64)),
        ("residual", Json::Num(residual)),
        ("leaves_extremal", Json::Bool(leaves_extremal)),
        ("decomposition", decomposition_json(&dec)),
    ];
    Ok((Json::Obj(fields).render(), 0))
}

/// Serialize a POVM in the input file format, floats at 12 significant
/// digits; used by the fixture round-trip contract.
pub fn povm_to_file_json(p: &Povm) -> String {
    let mut out = String::from("{\"dim\":");
    out.push_str(&p.dim().to_string());
    out.push_str(",\"elements\":[");
    for (i, m) in p.elements().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if r + c > 0 {
                    out.push(',');
                }
                let z = m[(r, c)];
                out.push('[');
                out.push_str(&fmt_f64(z.re));
                out.push(',');
                out.push_str(&fmt_f64(z.im));
                out.push(']');
            }
        }
        out.push(']');
    }
    out.push_str("]}");
    out
}
