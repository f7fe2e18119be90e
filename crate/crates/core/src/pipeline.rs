//! The analysis ladder behind `gapforge analyze`: closure, transitivity,
//! classification, certificates, dimension class, numerical estimate.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::estimator::{estimate_d, DiameterEstimate, OptimizerConfig};
use crate::liealg::{
    bracket_closure, complex_span_residual, cyclic_subspace, invariant_real_splitting,
    is_transitive, profile, LieAlgebraBasis, RepresentationProfile,
};
use crate::numkernel::{ComplexMatrix, ComplexVector, C64, DEFAULT_RANK_TOL};
use crate::repkit::{su_standard, wedge_lift_algebra, WedgeIndex};
use crate::system::{ComplexEntry, QuantumSystem};
use crate::witness::{
    cartan_witness, dimension_class, dimension_notes, dual_wedge_witness, reducible_witness,
    tensor_witness, CertificateKind, DimensionClass, WitnessCertificate,
};

/// Random points used for the transitivity and orbit-dimension tests.
pub const PROFILE_TRIALS: usize = 8;
/// Group samples used to re-check a reducible certificate before emission.
pub const REDUCIBLE_SAMPLES: usize = 256;
const STRUCTURE_TOL: f64 = 1e-8;

/// Highest and lowest weight vectors of the two factors, as read from a weights file.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanWeights {
    pub h1: ComplexVector,
    pub l1: ComplexVector,
    pub h2: ComplexVector,
    pub l2: ComplexVector,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CartanWeightsFile {
    h1: Vec<ComplexEntry>,
    l1: Vec<ComplexEntry>,
    h2: Vec<ComplexEntry>,
    l2: Vec<ComplexEntry>,
}

fn entries_to_vector(entries: &[ComplexEntry], what: &str) -> Result<ComplexVector> {
    ComplexVector::new(entries.iter().map(|e| C64::new(e.re, e.im)).collect())
        .map_err(|e| Error::Input(format!("{what}: {e}")))
}

impl CartanWeights {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: CartanWeightsFile = serde_json::from_str(&text)
            .map_err(|e| Error::Input(format!("cannot parse {}: {e}", path.display())))?;
        Ok(Self {
            h1: entries_to_vector(&file.h1, "h1")?,
            l1: entries_to_vector(&file.l1, "l1")?,
            h2: entries_to_vector(&file.h2, "h2")?,
            l2: entries_to_vector(&file.l2, "l2")?,
        })
    }
}

/// Construction declared by the caller for the structural witnesses.
#[derive(Clone, Debug, PartialEq)]
pub enum DeclaredStructure {
    Tensor { p: usize, q: usize },
    Wedge { n: usize, k: usize },
    Cartan(CartanWeights),
}

impl DeclaredStructure {
    fn describe(&self) -> Value {
        match self {
            DeclaredStructure::Tensor { p, q } => json!({"kind": "tensor", "p": p, "q": q}),
            DeclaredStructure::Wedge { n, k } => json!({"kind": "wedge", "n": n, "k": k}),
            DeclaredStructure::Cartan(w) => json!({
                "kind": "cartan",
                "factor_dims": [w.h1.dim(), w.h2.dim()],
            }),
        }
    }
}

/// Options of one analysis run besides the optimizer settings.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions {
    /// Rank tolerance of the bracket closure.
    pub tol: f64,
    pub skip_estimate: bool,
    pub structure: Option<DeclaredStructure>,
    /// Echoed only; rescaling happens when the system is loaded.
    pub normalize: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_RANK_TOL,
            skip_estimate: false,
            structure: None,
            normalize: false,
        }
    }
}

/// Certified lower bound on the minimum time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeBound {
    /// Transitive control group: controllable in arbitrarily small time.
    Zero,
    Certified(f64),
    /// No certificate was found; nothing is claimed.
    Unknown,
}

/// Lie closure of drift and controls together. Reported only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullSystemClosure {
    pub algebra_dim: usize,
    pub transitive: bool,
}

#[derive(Clone, Debug)]
pub struct GapReport {
    pub n: usize,
    pub profile: RepresentationProfile,
    pub full_system: FullSystemClosure,
    pub certificate: Option<WitnessCertificate>,
    /// Further valid certificates, not used for `t_lower`.
    pub alternate_certificates: Vec<WitnessCertificate>,
    pub estimate: Option<DiameterEstimate>,
    pub dimension_class: DimensionClass,
    pub t_lower: TimeBound,
    pub notes: Vec<String>,
    pub config: OptimizerConfig,
    pub options: AnalysisOptions,
}

fn structural_span(generators: Vec<ComplexMatrix>) -> Result<LieAlgebraBasis> {
    LieAlgebraBasis::spanned_by(&generators, DEFAULT_RANK_TOL)
}

fn u_basis(n: usize) -> Result<Vec<ComplexMatrix>> {
    let mut out = if n >= 2 { su_standard(n)? } else { Vec::new() };
    out.push(ComplexMatrix::identity(n).scale(C64::new(0.0, 1.0)));
    Ok(out)
}

fn ensure_inside(basis: &LieAlgebraBasis, ambient: &LieAlgebraBasis, what: &str) -> Result<()> {
    for (i, l) in basis.elements().iter().enumerate() {
        let r = ambient.span_residual(l);
        if r > STRUCTURE_TOL * l.frobenius_norm().max(1.0) {
            return Err(Error::Input(format!(
                "closure element {i} is not in {what} (residual {r:.3e})"
            )));
        }
    }
    Ok(())
}

/// `u(p) ⊗ I + I ⊗ u(q)` acting on ℂᵖ⊗ℂ^q.
fn product_algebra(p: usize, q: usize) -> Result<LieAlgebraBasis> {
    let ip = ComplexMatrix::identity(p);
    let iq = ComplexMatrix::identity(q);
    let mut gens: Vec<ComplexMatrix> = u_basis(p)?.iter().map(|a| a.kron(&iq)).collect();
    gens.extend(u_basis(q)?.iter().map(|b| ip.kron(b)));
    structural_span(gens)
}

fn declared_certificate(
    basis: &LieAlgebraBasis,
    structure: &DeclaredStructure,
) -> Result<(WitnessCertificate, Vec<String>)> {
    let n = basis.n();
    let mut notes = Vec::new();
    let cert = match structure {
        DeclaredStructure::Tensor { p, q } => {
            if p * q != n {
                return Err(Error::Input(format!(
                    "--tensor {p} {q} does not match dimension {n}"
                )));
            }
            let cert = tensor_witness(*p, *q)?;
            ensure_inside(
                basis,
                &product_algebra(*p, *q)?,
                "the product algebra u(p)⊗1 + 1⊗u(q)",
            )?;
            cert
        }
        DeclaredStructure::Wedge { n: m, k } => {
            let index = WedgeIndex::new(*m, *k)?;
            if index.len() != n {
                return Err(Error::Input(format!(
                    "--wedge {m} {k} has dimension {}, system has {n}",
                    index.len()
                )));
            }
            let cert = dual_wedge_witness(*m, *k)?;
            let lifts = u_basis(*m)?
                .iter()
                .map(|l| wedge_lift_algebra(l, *k))
                .collect::<Result<Vec<_>>>()?;
            ensure_inside(basis, &structural_span(lifts)?, "the wedge lift of u(n)")?;
            if 2 * k > *m {
                notes.push(format!(
                    "wedge witness for k = {k} > n/2 built as the Hodge image of the Λ^{} witness",
                    m - k
                ));
            }
            cert
        }
        DeclaredStructure::Cartan(w) => {
            let (d1, d2) = (w.h1.dim(), w.h2.dim());
            if d1 * d2 != n {
                return Err(Error::Input(format!(
                    "weight vectors of dimensions {d1} and {d2} do not match dimension {n}"
                )));
            }
            let cert = cartan_witness(&w.h1, &w.l1, &w.h2, &w.l2)?;
            ensure_inside(
                basis,
                &product_algebra(d1, d2)?,
                "the product algebra of the two factors",
            )?;
            let component = cyclic_subspace(basis, &cert.x)?;
            let residual = complex_span_residual(&component, &w.l1.kron(&w.l2));
            if residual > STRUCTURE_TOL {
                return Err(Error::Input(format!(
                    "l1⊗l2 is not in the irreducible component generated by h1⊗h2 (residual {residual:.3e})"
                )));
            }
            notes.push(format!(
                "Cartan component generated by h1⊗h2 has dimension {}",
                component.len()
            ));
            cert
        }
    };
    Ok((cert, notes))
}

fn recheck_reducible(basis: &LieAlgebraBasis, cert: &WitnessCertificate, seed: u64) -> Result<()> {
    let mut rng = crate::numkernel::random::stream_rng(seed, 0x7265_6475);
    for _ in 0..REDUCIBLE_SAMPLES {
        let g = basis.random_group_element(&mut rng);
        let d2 = g.apply(&cert.x).distance(&cert.y).powi(2);
        if (d2 - 2.0).abs() > 1e-8 {
            return Err(Error::Internal(format!(
                "reducible certificate fails on a sampled group element: ‖gX − Y‖² = {d2}"
            )));
        }
    }
    Ok(())
}

/// Runs the full ladder on a validated system.
pub fn analyze(
    system: &QuantumSystem,
    cfg: &OptimizerConfig,
    options: &AnalysisOptions,
) -> Result<GapReport> {
    cfg.validate().map_err(|e| e.at_stage("configuration"))?;
    if !(options.tol > 0.0 && options.tol.is_finite()) {
        return Err(
            Error::Usage(format!("tolerance {} must be positive", options.tol))
                .at_stage("configuration"),
        );
    }
    let n = system.n();
    let mut notes = Vec::new();

    let basis =
        bracket_closure(system.controls(), options.tol).map_err(|e| e.at_stage("closure"))?;
    let mut with_drift = system.controls().to_vec();
    with_drift.push(system.drift().clone());
    let full = bracket_closure(&with_drift, options.tol).map_err(|e| e.at_stage("closure"))?;
    let full_system = FullSystemClosure {
        algebra_dim: full.dim(),
        transitive: is_transitive(&full, PROFILE_TRIALS, cfg.seed)
            .map_err(|e| e.at_stage("closure"))?,
    };

    let profile =
        profile(&basis, PROFILE_TRIALS, cfg.seed).map_err(|e| e.at_stage("classification"))?;

    let mut certificate = None;
    let mut alternates = Vec::new();
    if profile.transitive {
        certificate =
            Some(WitnessCertificate::transitive(n).map_err(|e| e.at_stage("certificate"))?);
        if options.structure.is_some() {
            notes.push("declared structure ignored: the control group acts transitively".into());
        }
    } else {
        let reducible = if profile.realification_reducible {
            match invariant_real_splitting(&basis).map_err(|e| e.at_stage("certificate"))? {
                Some(split) => Some(
                    reducible_witness(&split.first, &split.second, &basis)
                        .map_err(|e| e.at_stage("certificate"))?,
                ),
                None => {
                    notes.push(
                        "realification is reducible but no invariant splitting was exposed".into(),
                    );
                    None
                }
            }
        } else {
            None
        };
        let declared = match &options.structure {
            Some(s) => {
                let (cert, extra) =
                    declared_certificate(&basis, s).map_err(|e| e.at_stage("structure"))?;
                notes.extend(extra);
                Some(cert)
            }
            None => None,
        };
        match (declared, reducible) {
            (Some(d), Some(r)) => {
                notes.push(format!(
                    "declared {} certificate is primary; a reducible certificate (D ≥ √2) is listed \
                     under alternate_certificates",
                    d.kind.as_str()
                ));
                certificate = Some(d);
                alternates.push(r);
            }
            (Some(c), None) | (None, Some(c)) => certificate = Some(c),
            (None, None) => notes.push(
                "no certificate: the action is neither transitive nor reducible after realification, \
                 and no structure was declared (--tensor, --wedge, --cartan)"
                    .into(),
            ),
        }
    }
    for cert in certificate.iter().chain(&alternates) {
        cert.validate().map_err(|e| e.at_stage("certificate"))?;
        if cert.kind == CertificateKind::Reducible {
            recheck_reducible(&basis, cert, cfg.seed).map_err(|e| e.at_stage("certificate"))?;
        }
    }
    let t_lower = match &certificate {
        Some(c) if c.kind == CertificateKind::Transitive => TimeBound::Zero,
        Some(c) => TimeBound::Certified(c.time_bound),
        None => TimeBound::Unknown,
    };

    let class = dimension_class(n as u64).map_err(|e| e.at_stage("classification"))?;
    notes.extend(dimension_notes(n as u64).map_err(|e| e.at_stage("classification"))?);
    if full_system.transitive && !profile.transitive {
        notes.push(
            "drift and controls together generate a transitive algebra; the gap bound concerns the \
             control group only"
                .into(),
        );
    }

    let estimate = if options.skip_estimate {
        None
    } else {
        let e = estimate_d(&basis, cfg).map_err(|e| e.at_stage("estimate"))?;
        if !e.converged {
            notes.push("estimate: optimizer stopped at the iteration cap".into());
        }
        Some(e)
    };

    Ok(GapReport {
        n,
        profile,
        full_system,
        certificate,
        alternate_certificates: alternates,
        estimate,
        dimension_class: class,
        t_lower,
        notes,
        config: cfg.clone(),
        options: options.clone(),
    })
}

/// Rounds to 12 significant digits; `-0` becomes `0`.
fn round12(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float");
    json!(if r == 0.0 { 0.0 } else { r })
}

fn vector_json(v: &ComplexVector) -> Value {
    Value::Array(
        v.as_slice()
            .iter()
            .map(|z| json!({"re": round12(z.re), "im": round12(z.im)}))
            .collect(),
    )
}

fn certificate_json(c: &WitnessCertificate) -> Value {
    json!({
        "kind": c.kind.as_str(),
        "x": vector_json(&c.x),
        "y": vector_json(&c.y),
        "lambda": c.lambda.map_or(Value::Null, round12),
        "diameter_bound": round12(c.diameter_bound),
        "time_bound": round12(c.time_bound),
    })
}

impl GapReport {
    /// Report document with a fixed field order.
    pub fn to_json(&self) -> Value {
        let p = &self.profile;
        let mut doc = Map::new();
        doc.insert("n".into(), json!(self.n));
        doc.insert(
            "profile".into(),
            json!({
                "transitive": p.transitive,
                "complex_irreducible": p.complex_irreducible,
                "bilinear_type": serde_json::to_value(p.bilinear_type).expect("enum"),
                "realification_reducible": p.realification_reducible,
                "algebra_dim": p.algebra_dim,
                "orbit_tangent_dim": p.orbit_tangent_dim,
                "commutant_dim": p.commutant_dim,
            }),
        );
        doc.insert(
            "full_system".into(),
            json!({
                "algebra_dim": self.full_system.algebra_dim,
                "transitive": self.full_system.transitive,
            }),
        );
        doc.insert(
            "certificate".into(),
            self.certificate
                .as_ref()
                .map_or(Value::Null, certificate_json),
        );
        doc.insert(
            "alternate_certificates".into(),
            Value::Array(
                self.alternate_certificates
                    .iter()
                    .map(certificate_json)
                    .collect(),
            ),
        );
        doc.insert(
            "estimate".into(),
            self.estimate.as_ref().map_or(Value::Null, |e| {
                json!({
                    "semantics": "numerical estimates: D_est from a local sup-inf search, M_est and \
                                  R_est are multistart suprema at the returned pair; no bound is claimed",
                    "D_est": round12(e.d_est),
                    "M_est": round12(e.m_est),
                    "R_est": round12(e.r_est),
                    "argmax_pair": {"x": vector_json(&e.argmax_pair.0), "y": vector_json(&e.argmax_pair.1)},
                    "converged": e.converged,
                    "evaluations": e.evaluations,
                })
            }),
        );
        doc.insert(
            "dimension_class".into(),
            json!(self.dimension_class.as_str()),
        );
        doc.insert(
            "T_lower".into(),
            match self.t_lower {
                TimeBound::Zero => json!({"kind": "zero", "radians": 0.0}),
                TimeBound::Certified(t) => json!({"kind": "certified", "radians": round12(t)}),
                TimeBound::Unknown => json!({"kind": "unbounded_unknown"}),
            },
        );
        doc.insert("notes".into(), json!(self.notes));
        doc.insert(
            "config_echo".into(),
            json!({
                "seed": self.config.seed,
                "starts": self.config.starts,
                "max_iters": self.config.max_iters,
                "step_init": round12(self.config.step_init),
                "step_shrink": round12(self.config.step_shrink),
                "conv_tol": round12(self.config.conv_tol),
                "tol": round12(self.options.tol),
                "skip_estimate": self.options.skip_estimate,
                "normalize": self.options.normalize,
                "structure": self.options.structure.as_ref().map_or(Value::Null, DeclaredStructure::describe),
                "profile_trials": PROFILE_TRIALS,
            }),
        );
        Value::Object(doc)
    }

    /// Pretty-printed report with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable report");
        s.push('\n');
        s
    }
}

/// Writes the report after re-validating every certificate it carries.
pub fn emit_report(report: &GapReport, path: &Path) -> Result<()> {
    for cert in report
        .certificate
        .iter()
        .chain(&report.alternate_certificates)
    {
        cert.validate().map_err(|e| e.at_stage("report"))?;
    }
    if let Some(e) = &report.estimate {
        e.validate().map_err(|e| e.at_stage("report"))?;
    }
    std::fs::write(path, report.to_json_string()).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::I;
    use crate::repkit::{product_lift, so_embedded, sym_power_su2};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn cheap() -> OptimizerConfig {
        OptimizerConfig {
            starts: 4,
            max_iters: 100,
            ..Default::default()
        }
    }

    fn drift(n: usize) -> ComplexMatrix {
        let mut d = vec![C64::new(0.0, 0.0); n];
        d[0] = I;
        ComplexMatrix::from_diag(&d)
    }

    fn skip() -> AnalysisOptions {
        AnalysisOptions {
            skip_estimate: true,
            ..Default::default()
        }
    }

    #[test]
    fn transitive_system() {
        let sys = QuantumSystem::new(drift(2), su_standard(2).unwrap()).unwrap();
        let r = analyze(&sys, &cheap(), &skip()).unwrap();
        assert!(r.profile.transitive);
        assert_eq!(r.t_lower, TimeBound::Zero);
        assert_eq!(
            r.certificate.as_ref().unwrap().kind,
            CertificateKind::Transitive
        );
        assert_eq!(r.dimension_class, DimensionClass::PowerOfTwo);
        assert!(r.notes.iter().any(|s| s.contains("BS-actions")));
    }

    #[test]
    fn so3_system_is_reducible() {
        let sys = QuantumSystem::new(drift(3), so_embedded(3).unwrap()).unwrap();
        let r = analyze(&sys, &cheap(), &skip()).unwrap();
        let c = r.certificate.unwrap();
        assert_eq!(c.kind, CertificateKind::Reducible);
        assert_eq!(c.diameter_bound, std::f64::consts::SQRT_2);
        assert_eq!(r.t_lower, TimeBound::Certified(c.time_bound));
        assert!((c.time_bound - FRAC_PI_2).abs() < 1e-15);
        assert!(r.full_system.transitive);
    }

    #[test]
    fn wedge_declaration() {
        let lifted: Vec<ComplexMatrix> = su_standard(4)
            .unwrap()
            .iter()
            .map(|g| wedge_lift_algebra(g, 2).unwrap())
            .collect();
        let sys = QuantumSystem::new(drift(6), lifted).unwrap();
        let opts = AnalysisOptions {
            structure: Some(DeclaredStructure::Wedge { n: 4, k: 2 }),
            ..skip()
        };
        let r = analyze(&sys, &cheap(), &opts).unwrap();
        let c = r.certificate.as_ref().unwrap();
        assert_eq!(c.kind, CertificateKind::Wedge);
        assert!((c.diameter_bound - 0.765367).abs() < 1e-6);
        match r.t_lower {
            TimeBound::Certified(t) => assert!((t - FRAC_PI_4).abs() < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(r.alternate_certificates.len(), 1);
        assert_eq!(r.alternate_certificates[0].kind, CertificateKind::Reducible);

        let wrong = AnalysisOptions {
            structure: Some(DeclaredStructure::Tensor { p: 2, q: 3 }),
            ..skip()
        };
        let err = analyze(&sys, &cheap(), &wrong).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().starts_with("structure:"));
    }

    #[test]
    fn tensor_declaration() {
        let su2 = su_standard(2).unwrap();
        let sys = QuantumSystem::new(drift(4), product_lift(&su2, &su2).unwrap()).unwrap();
        let opts = AnalysisOptions {
            structure: Some(DeclaredStructure::Tensor { p: 2, q: 2 }),
            ..skip()
        };
        let r = analyze(&sys, &cheap(), &opts).unwrap();
        assert_eq!(r.certificate.unwrap().kind, CertificateKind::Tensor);
        // SU(2)×SU(2) on ℂ⁴ is SO(4): real type, so the reducible certificate is the alternate
        assert_eq!(r.alternate_certificates[0].kind, CertificateKind::Reducible);

        // SU(2)×SU(3) on ℂ⁶ is of complex type: nothing without a declaration
        let su3 = su_standard(3).unwrap();
        let sys = QuantumSystem::new(drift(6), product_lift(&su2, &su3).unwrap()).unwrap();
        let none = analyze(&sys, &cheap(), &skip()).unwrap();
        assert!(!none.profile.realification_reducible);
        assert_eq!(none.t_lower, TimeBound::Unknown);
        assert!(none.certificate.is_none());
        let opts = AnalysisOptions {
            structure: Some(DeclaredStructure::Tensor { p: 2, q: 3 }),
            ..skip()
        };
        let r = analyze(&sys, &cheap(), &opts).unwrap();
        assert_eq!(r.certificate.unwrap().kind, CertificateKind::Tensor);
        assert!(r.alternate_certificates.is_empty());
    }

    #[test]
    fn cartan_declaration() {
        let s = sym_power_su2(1).unwrap();
        let diag: Vec<ComplexMatrix> = s
            .iter()
            .map(|m| &m.kron(&ComplexMatrix::identity(2)) + &ComplexMatrix::identity(2).kron(m))
            .collect();
        let sys = QuantumSystem::new(drift(4), diag).unwrap();
        let e = |i| ComplexVector::basis(2, i);
        let weights = CartanWeights {
            h1: e(0),
            l1: e(1),
            h2: e(0),
            l2: e(1),
        };
        let opts = AnalysisOptions {
            structure: Some(DeclaredStructure::Cartan(weights)),
            ..skip()
        };
        let r = analyze(&sys, &cheap(), &opts).unwrap();
        assert!(r.certificate.is_some());
        assert!(r.notes.iter().any(|s| s.contains("dimension 3")));

        // spin-1 ⊗ spin-1 with a middle weight vector: e₁⊗e₁ leaves the spin-2 component
        let s = sym_power_su2(2).unwrap();
        let diag: Vec<ComplexMatrix> = s
            .iter()
            .map(|m| &m.kron(&ComplexMatrix::identity(3)) + &ComplexMatrix::identity(3).kron(m))
            .collect();
        let sys = QuantumSystem::new(drift(9), diag).unwrap();
        let f = |i| ComplexVector::basis(3, i);
        let good = CartanWeights {
            h1: f(0),
            l1: f(2),
            h2: f(0),
            l2: f(2),
        };
        let opts = AnalysisOptions {
            structure: Some(DeclaredStructure::Cartan(good)),
            ..skip()
        };
        let r = analyze(&sys, &cheap(), &opts).unwrap();
        assert!(r.notes.iter().any(|s| s.contains("dimension 5")));
        let bad = CartanWeights {
            h1: f(0),
            l1: f(1),
            h2: f(0),
            l2: f(1),
        };
        let opts = AnalysisOptions {
            structure: Some(DeclaredStructure::Cartan(bad)),
            ..skip()
        };
        let err = analyze(&sys, &cheap(), &opts).unwrap_err();
        assert!(err.to_string().contains("irreducible component"));
    }

    #[test]
    fn report_round_trips_and_is_deterministic() {
        let sys = QuantumSystem::new(drift(3), so_embedded(3).unwrap()).unwrap();
        let opts = AnalysisOptions::default();
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        let r = analyze(&sys, &cheap(), &opts).unwrap();
        emit_report(&r, &a).unwrap();
        emit_report(&analyze(&sys, &cheap(), &opts).unwrap(), &b).unwrap();
        let ta = std::fs::read_to_string(&a).unwrap();
        assert_eq!(ta, std::fs::read_to_string(&b).unwrap());
        let parsed: Value = serde_json::from_str(&ta).unwrap();
        assert_eq!(parsed, r.to_json());
        let keys: Vec<&str> = parsed
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        assert_eq!(keys[..3], ["n", "profile", "full_system"]);
        assert_eq!(parsed["T_lower"]["kind"], "certified");
    }

    #[test]
    fn certificates_do_not_depend_on_seed_or_order() {
        let mut gens = so_embedded(3).unwrap();
        let sys = QuantumSystem::new(drift(3), gens.clone()).unwrap();
        gens.reverse();
        let rev = QuantumSystem::new(drift(3), gens).unwrap();
        let a = analyze(&sys, &cheap(), &skip()).unwrap();
        let b = analyze(&rev, &OptimizerConfig { seed: 9, ..cheap() }, &skip()).unwrap();
        assert_eq!(
            certificate_json(a.certificate.as_ref().unwrap()),
            certificate_json(b.certificate.as_ref().unwrap())
        );
    }

    #[test]
    fn rounding() {
        assert_eq!(round12(2.0 / 3.0), json!(0.666666666667));
        assert_eq!(round12(-0.0), json!(0.0));
        assert_eq!(round12(1e-17), json!(1e-17));
        assert_eq!(round12(f64::NAN), Value::Null);
    }
}
