//! Explicit witness pairs `(X, Y)` and the bounds they certify:
//! `M(G) ≤ λ ⇒ D(G) ≥ √(2(1−λ))` and `T(Σ) ≥ 2·arcsin(D/2)`.
//!
//! Also hosts brute-force oracles for the overlap bounds and the dimension classifier.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{LieAlgebraBasis, RealSubspace};
use crate::numkernel::random::{complex_normal, random_unit_vector, random_unitary, stream_rng};
use crate::numkernel::{det, hermitian_inner, ComplexMatrix, ComplexVector, C64};
use crate::repkit::{hodge_star, wedge_lift_group, WedgeIndex};

const UNIT_TOL: f64 = 1e-10;
const ORTHO_TOL: f64 = 1e-10;
const INVARIANCE_TOL: f64 = 1e-8;

/// Construction that produced a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Transitive,
    Reducible,
    Tensor,
    Wedge,
    Cartan,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::Transitive => "transitive",
            CertificateKind::Reducible => "reducible",
            CertificateKind::Tensor => "tensor",
            CertificateKind::Wedge => "wedge",
            CertificateKind::Cartan => "cartan",
        }
    }
}

/// Unit pair with its certified bounds. `lambda` is the overlap bound `M(G) ≤ λ`
/// and is absent for the transitive and reducible kinds.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCertificate {
    pub kind: CertificateKind,
    pub x: ComplexVector,
    pub y: ComplexVector,
    pub lambda: Option<f64>,
    pub diameter_bound: f64,
    pub time_bound: f64,
}

impl WitnessCertificate {
    /// Transitive action: every pair is connected, the certified bounds are zero.
    pub fn transitive(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("dimension must be positive".into()));
        }
        let e1 = ComplexVector::basis(n, 0);
        Ok(Self {
            kind: CertificateKind::Transitive,
            x: e1.clone(),
            y: e1,
            lambda: None,
            diameter_bound: 0.0,
            time_bound: 0.0,
        })
    }

    fn from_overlap_bound(
        kind: CertificateKind,
        x: ComplexVector,
        y: ComplexVector,
        lambda: f64,
    ) -> Result<Self> {
        let diameter_bound = bound_from_m(lambda)?;
        Ok(Self {
            kind,
            x,
            y,
            lambda: Some(lambda),
            diameter_bound,
            time_bound: time_bound_from_d(diameter_bound)?,
        })
    }

    /// Checks the field invariants; for overlap kinds also that `|<X,Y>| ≤ λ`
    /// at the identity.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| {
            Err(Error::Internal(format!(
                "{} certificate: {msg}",
                self.kind.as_str()
            )))
        };
        if self.x.dim() != self.y.dim() {
            return fail("witness vectors of unequal dimension".into());
        }
        for (name, v) in [("X", &self.x), ("Y", &self.y)] {
            if (v.norm() - 1.0).abs() > UNIT_TOL {
                return fail(format!("‖{name}‖ = {} is not 1", v.norm()));
            }
        }
        let expected_d = match (self.kind, self.lambda) {
            (CertificateKind::Transitive, None) => 0.0,
            (CertificateKind::Reducible, None) => std::f64::consts::SQRT_2,
            (CertificateKind::Transitive | CertificateKind::Reducible, Some(_)) => {
                return fail("unexpected overlap bound".into())
            }
            (_, None) => return fail("missing overlap bound".into()),
            (_, Some(lambda)) => {
                let at_identity = hermitian_inner(&self.x, &self.y)?.norm();
                if at_identity > lambda + 1e-12 {
                    return fail(format!(
                        "identity overlap {at_identity} exceeds λ = {lambda}"
                    ));
                }
                bound_from_m(lambda)?
            }
        };
        if self.diameter_bound != expected_d {
            return fail(format!(
                "diameter bound {} differs from {expected_d}",
                self.diameter_bound
            ));
        }
        if self.time_bound != time_bound_from_d(self.diameter_bound)? {
            return fail("time bound is not 2·arcsin(D/2)".into());
        }
        Ok(())
    }
}

/// `√(2(1−λ))`. `λ ≥ 1` carries no information and yields [`Error::NoCertificate`].
pub fn bound_from_m(lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::Usage(format!("overlap bound {lambda} is negative")));
    }
    if lambda >= 1.0 {
        return Err(Error::NoCertificate(format!(
            "overlap bound {lambda} ≥ 1 gives no diameter bound"
        )));
    }
    Ok((2.0 * (1.0 - lambda)).sqrt())
}

/// `2·arcsin(δ/2)` for `δ ∈ [0, 2]`.
pub fn time_bound_from_d(delta: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&delta) {
        return Err(Error::Usage(format!("diameter {delta} outside [0, 2]")));
    }
    Ok(2.0 * (delta / 2.0).asin())
}

/// Picks the first vector of each real subspace after checking that the subspaces are
/// Re-orthogonal and invariant for `basis`. Every `g` then satisfies `‖gX − Y‖² = 2`.
pub fn reducible_witness(
    first: &RealSubspace,
    second: &RealSubspace,
    basis: &LieAlgebraBasis,
) -> Result<WitnessCertificate> {
    if first.vectors()[0].dim() != basis.n() || second.vectors()[0].dim() != basis.n() {
        return Err(Error::Usage(
            "subspace dimension does not match the algebra".into(),
        ));
    }
    let ortho = first.orthogonality_residual(second);
    if ortho > ORTHO_TOL {
        return Err(Error::Domain(format!(
            "subspaces are not orthogonal: max |Re<u,v>| = {ortho:.3e}"
        )));
    }
    for (name, s) in [("first", first), ("second", second)] {
        let r = s.invariance_residual(basis);
        if r > INVARIANCE_TOL {
            return Err(Error::Domain(format!(
                "{name} subspace is not invariant: residual {r:.3e}"
            )));
        }
    }
    let diameter_bound = std::f64::consts::SQRT_2;
    Ok(WitnessCertificate {
        kind: CertificateKind::Reducible,
        x: first.vectors()[0].clone(),
        y: second.vectors()[0].clone(),
        lambda: None,
        diameter_bound,
        time_bound: time_bound_from_d(diameter_bound)?,
    })
}

/// `X = e₁⊗e₁`, `Y = (e₁⊗e₁ + e₂⊗e₂)/√2` on `ℂᵖ ⊗ ℂ^q`.
pub fn tensor_witness(p: usize, q: usize) -> Result<WitnessCertificate> {
    if p < 2 || q < 2 {
        return Err(Error::Precondition(format!(
            "tensor bound needs both factors of dimension ≥ 2, got {p} and {q}"
        )));
    }
    let e = |i: usize, j: usize| ComplexVector::basis(p, i).kron(&ComplexVector::basis(q, j));
    let x = e(0, 0);
    let y = (&x + &e(1, 1)).scale(C64::new(FRAC_1_SQRT_2, 0.0));
    WitnessCertificate::from_overlap_bound(CertificateKind::Tensor, x, y, FRAC_1_SQRT_2)
}

/// `X = e₁∧…∧e_k`, `Y = (e₁∧…∧e_k + e_{k+1}∧…∧e_{2k})/√2` for `2 ≤ k ≤ n/2`.
pub fn wedge_witness(n: usize, k: usize) -> Result<WitnessCertificate> {
    if k < 2 {
        return Err(Error::Precondition(format!(
            "wedge bound needs k ≥ 2 (Λ¹ is the transitive standard action), got k = {k}"
        )));
    }
    if 2 * k > n {
        return Err(Error::Precondition(format!(
            "wedge bound needs two disjoint {k}-subsets of {{1..{n}}}; use the dual construction"
        )));
    }
    let index = WedgeIndex::new(n, k)?;
    let x = index.basis_wedge(&(0..k).collect::<Vec<_>>())?;
    let second = index.basis_wedge(&(k..2 * k).collect::<Vec<_>>())?;
    let y = (&x + &second).scale(C64::new(FRAC_1_SQRT_2, 0.0));
    WitnessCertificate::from_overlap_bound(CertificateKind::Wedge, x, y, FRAC_1_SQRT_2)
}

/// Wedge witness for `n/2 < k ≤ n − 2`: the Hodge image of the degree `n − k` witness.
/// The star is antiunitary and intertwines `Λᵏg` with `det(g)·Λⁿ⁻ᵏg`, so the overlap
/// bound carries over unchanged.
pub fn dual_wedge_witness(n: usize, k: usize) -> Result<WitnessCertificate> {
    if 2 * k <= n {
        return wedge_witness(n, k);
    }
    if k + 2 > n {
        return Err(Error::Precondition(format!(
            "Λ^{k}(ℂ^{n}) is dual to Λ^{}, which carries no wedge bound",
            n - k
        )));
    }
    let base = wedge_witness(n, n - k)?;
    let x = hodge_star(&base.x, n, n - k)?;
    let y = hodge_star(&base.y, n, n - k)?;
    WitnessCertificate::from_overlap_bound(CertificateKind::Wedge, x, y, FRAC_1_SQRT_2)
}

/// `X = h₁⊗h₂`, `Y = (h₁⊗h₂ + l₁⊗l₂)/√2` from highest and lowest weight vectors.
pub fn cartan_witness(
    h1: &ComplexVector,
    l1: &ComplexVector,
    h2: &ComplexVector,
    l2: &ComplexVector,
) -> Result<WitnessCertificate> {
    if h1.dim() != l1.dim() || h2.dim() != l2.dim() {
        return Err(Error::Usage(
            "weight vectors of one factor differ in dimension".into(),
        ));
    }
    for (name, v) in [("h1", h1), ("l1", l1), ("h2", h2), ("l2", l2)] {
        if (v.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::Precondition(format!(
                "‖{name}‖ = {} is not 1",
                v.norm()
            )));
        }
    }
    for (name, a, b) in [("h1, l1", h1, l1), ("h2, l2", h2, l2)] {
        let overlap = hermitian_inner(a, b)?.norm();
        if overlap > ORTHO_TOL {
            return Err(Error::Precondition(format!(
                "weight vectors {name} are not orthogonal: |<h,l>| = {overlap:.3e}"
            )));
        }
    }
    let x = h1.kron(h2);
    let y = (&x + &l1.kron(l2)).scale(C64::new(FRAC_1_SQRT_2, 0.0));
    WitnessCertificate::from_overlap_bound(CertificateKind::Cartan, x, y, FRAC_1_SQRT_2)
}

/// `f(a) = ∏aᵢ + ∏√(1−aᵢ²)`.
pub fn det_sum_profile(a: &[f64]) -> f64 {
    a.iter().product::<f64>()
        + a.iter()
            .map(|t| (1.0 - t * t).max(0.0).sqrt())
            .product::<f64>()
}

/// Result of [`det_sum_oracle`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetSumOracle {
    pub sampled_max: f64,
    pub grid_max: f64,
}

/// Chunks used to split sample budgets; fixed so results do not depend on the thread count.
const SAMPLE_CHUNKS: u64 = 64;
const MAX_GRID_EVALUATIONS: f64 = 2e8;

fn chunked_max<F>(samples: u64, seed: u64, f: F) -> f64
where
    F: Fn(&mut crate::numkernel::random::StreamRng) -> f64 + Sync,
{
    (0..SAMPLE_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let count = samples / SAMPLE_CHUNKS + u64::from(chunk < samples % SAMPLE_CHUNKS);
            let mut rng = stream_rng(seed, chunk);
            (0..count).map(|_| f(&mut rng)).fold(0.0, f64::max)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max)
}

fn random_unit_rows<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let row: Vec<C64> = (0..cols).map(|_| complex_normal(rng)).collect();
        let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        data.extend(row.into_iter().map(|z| z / norm));
    }
    ComplexMatrix::new(rows, cols, data).expect("sized buffer")
}

/// Brute-force check of `|det A + det B| ≤ 1` for `k × 2k` matrices `[A | B]` with unit
/// rows (sampled), and of `max f ≤ 1` on a `grid`-point lattice of `[0,1]ᵏ`.
pub fn det_sum_oracle(k: usize, samples: u64, grid: usize, seed: u64) -> Result<DetSumOracle> {
    if k < 2 {
        return Err(Error::Usage(format!(
            "determinant oracle needs k ≥ 2, got {k}"
        )));
    }
    if grid < 2 {
        return Err(Error::Usage(format!(
            "grid needs at least 2 points, got {grid}"
        )));
    }
    // nondecreasing tuples suffice since f is symmetric
    let evaluations = (0..k).fold(1.0, |acc, i| acc * (grid + i) as f64 / (i + 1) as f64);
    if evaluations > MAX_GRID_EVALUATIONS {
        return Err(Error::Usage(format!(
            "grid of {grid} points in dimension {k} needs {evaluations:.3e} evaluations"
        )));
    }
    let sampled_max = chunked_max(samples, seed, |rng| {
        let m = random_unit_rows(k, 2 * k, rng);
        let block = |offset: usize| {
            let data = (0..k)
                .flat_map(|r| m.row(r)[offset..offset + k].to_vec())
                .collect();
            det(&ComplexMatrix::new(k, k, data).expect("sized buffer")).expect("square")
        };
        (block(0) + block(k)).norm()
    });
    let points: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
    let grid_max = (0..grid)
        .into_par_iter()
        .map(|first| {
            grid_search(
                &points,
                first,
                k - 1,
                points[first],
                (1.0 - points[first].powi(2)).max(0.0).sqrt(),
            )
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);
    Ok(DetSumOracle {
        sampled_max,
        grid_max,
    })
}

fn grid_search(points: &[f64], from: usize, remaining: usize, prod: f64, coprod: f64) -> f64 {
    if remaining == 0 {
        return prod + coprod;
    }
    (from..points.len())
        .map(|i| {
            let a = points[i];
            grid_search(
                points,
                i,
                remaining - 1,
                prod * a,
                coprod * (1.0 - a * a).max(0.0).sqrt(),
            )
        })
        .fold(0.0, f64::max)
}

/// Largest `|<v⊗w, Y>|` over random unit `v ∈ ℂᵖ`, `w ∈ ℂ^q`, with `Y` the tensor witness.
pub fn tensor_bound_oracle(p: usize, q: usize, samples: u64, seed: u64) -> Result<f64> {
    let y = tensor_witness(p, q)?.y;
    Ok(chunked_max(samples, seed, |rng| {
        let v = random_unit_vector(p, rng);
        let w = random_unit_vector(q, rng);
        hermitian_inner(&v.kron(&w), &y)
            .expect("matching dimensions")
            .norm()
    }))
}

/// Largest `|<Λᵏg X, Y>|` at the wedge witness over random unitaries `g`.
pub fn wedge_bound_oracle(n: usize, k: usize, samples: u64, seed: u64) -> Result<f64> {
    let cert = dual_wedge_witness(n, k)?;
    let overlaps: Vec<Result<f64>> = (0..SAMPLE_CHUNKS)
        .into_par_iter()
        .map(|chunk| -> Result<f64> {
            let count = samples / SAMPLE_CHUNKS + u64::from(chunk < samples % SAMPLE_CHUNKS);
            let mut rng = stream_rng(seed, chunk);
            let mut best = 0.0f64;
            for _ in 0..count {
                let g = wedge_lift_group(&random_unitary(n, &mut rng), k)?;
                best = best.max(hermitian_inner(&g.apply(&cert.x), &cert.y)?.norm());
            }
            Ok(best)
        })
        .collect();
    overlaps
        .into_iter()
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
}

/// Coarse classification of the state dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionClass {
    PowerOfTwo,
    #[serde(rename = "exceptional_E")]
    ExceptionalE,
    Generic,
}

impl DimensionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DimensionClass::PowerOfTwo => "power_of_two",
            DimensionClass::ExceptionalE => "exceptional_E",
            DimensionClass::Generic => "generic",
        }
    }
}

/// Exceptional dimensions excluded from the universal gap constant.
pub const EXCEPTIONAL_DIMENSIONS: [u64; 19] = [
    1274,
    273,
    26,
    2925,
    27,
    351,
    912,
    56,
    1539,
    27664,
    365750,
    8645,
    147250,
    72912,
    24502400,
    5121384450,
    87587590464,
    6696000,
    3875,
];

/// Alternative printing of the `24502400` entry found in a second listing of the same set.
pub const EXCEPTIONAL_ALTERNATE: u64 = 24502500;

const DISCREPANT: [u64; 2] = [24502400, EXCEPTIONAL_ALTERNATE];

pub fn dimension_class(n: u64) -> Result<DimensionClass> {
    if n == 0 {
        return Err(Error::Usage("dimension must be at least 1".into()));
    }
    Ok(if n.is_power_of_two() {
        DimensionClass::PowerOfTwo
    } else if EXCEPTIONAL_DIMENSIONS.contains(&n) || n == EXCEPTIONAL_ALTERNATE {
        DimensionClass::ExceptionalE
    } else {
        DimensionClass::Generic
    })
}

/// Diagnostic notes for a dimension: caveats attached to its class, plus the
/// `24502400`/`24502500` listing discrepancy when either value is queried.
pub fn dimension_notes(n: u64) -> Result<Vec<String>> {
    let mut notes = Vec::new();
    match dimension_class(n)? {
        DimensionClass::PowerOfTwo => notes.push(format!(
            "dimension {n} is a power of two: the universal gap may fail for actions built \
             from a basic spin representation (BS-actions)"
        )),
        DimensionClass::ExceptionalE => notes.push(format!(
            "dimension {n} lies in the exceptional set: no certified universal constant applies"
        )),
        DimensionClass::Generic => {}
    }
    if DISCREPANT.contains(&n) {
        notes.push(
            "exceptional-set discrepancy: the E8 entry is listed as 24502400 in one place and \
             24502500 in another; both are treated as exceptional"
                .into(),
        );
    }
    Ok(notes)
}
