//! Lie closure of skew-Hermitian generators, orbit dimensions on the sphere,
//! commutant and invariant-bilinear-form analysis.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::random::{random_unit_vector, stream_rng};
use crate::numkernel::{
    complex_nullspace, expm_skew, hermitian_eigen, pivoted_complex_span, real_rank, ComplexMatrix,
    ComplexVector, RealMatrix, C64, DEFAULT_RANK_TOL, I,
};

/// Skew-Hermitian tolerance for generators and basis elements.
pub const SKEW_HERMITIAN_TOL: f64 = 1e-10;

/// Residual below which a bracket is considered inside the span.
const CLOSURE_RESIDUAL_TOL: f64 = 1e-8;

/// Orthonormal real basis (for `Re tr(X*Y)`) of a subalgebra of `u(n)`.
#[derive(Clone, Debug)]
pub struct LieAlgebraBasis {
    n: usize,
    elements: Vec<ComplexMatrix>,
    closed: bool,
}

impl LieAlgebraBasis {
    /// Orthonormalizes `elements` without closing under brackets.
    pub fn spanned_by(elements: &[ComplexMatrix], tol: f64) -> Result<Self> {
        let n = validate_generators(elements)?;
        let mut basis = Self {
            n,
            elements: Vec::new(),
            closed: false,
        };
        for g in elements {
            basis.try_extend(g, tol);
        }
        if basis.elements.is_empty() {
            return Err(Error::Usage("all generators vanish".into()));
        }
        Ok(basis)
    }

    /// Ambient dimension: the algebra acts on ℂⁿ.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Distance from `m` to the real span of the basis.
    pub fn span_residual(&self, m: &ComplexMatrix) -> f64 {
        let mut r = m.clone();
        for e in &self.elements {
            let c = r.real_inner(e);
            r.axpy(C64::new(-c, 0.0), e);
        }
        r.frobenius_norm()
    }

    /// Largest distance of a pairwise bracket from the span.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.elements.len() {
            for j in i + 1..self.elements.len() {
                let b = self.elements[i].commutator(&self.elements[j]);
                worst = worst.max(self.span_residual(&b));
            }
        }
        worst
    }

    /// `Σ cₖ Xₖ`.
    pub fn combine(&self, coeffs: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for (c, e) in coeffs.iter().zip(&self.elements) {
            m.axpy(C64::new(*c, 0.0), e);
        }
        m
    }

    /// Gaussian element `Σ cₖ Xₖ`, `cₖ ~ N(0, scale²)`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> ComplexMatrix {
        let coeffs: Vec<f64> = (0..self.dim())
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        self.combine(&coeffs)
    }

    /// Group element drawn as a product of two exponentials of Gaussian algebra elements.
    pub fn random_group_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let a = expm_skew(&self.random_element(rng, std::f64::consts::PI), 1.0)
            .expect("basis elements are skew-Hermitian");
        let b = expm_skew(&self.random_element(rng, std::f64::consts::PI), 1.0)
            .expect("basis elements are skew-Hermitian");
        &a * &b
    }

    /// Two bases span the same subspace (to `tol`).
    pub fn same_span(&self, other: &LieAlgebraBasis, tol: f64) -> bool {
        self.n == other.n
            && self.dim() == other.dim()
            && other.elements.iter().all(|e| self.span_residual(e) <= tol)
    }

    /// Gram–Schmidt step; returns whether `candidate` enlarged the span.
    fn try_extend(&mut self, candidate: &ComplexMatrix, tol: f64) -> bool {
        let norm = candidate.frobenius_norm();
        if norm <= tol {
            return false;
        }
        let mut r = candidate.clone();
        for _ in 0..2 {
            for e in &self.elements {
                let c = r.real_inner(e);
                r.axpy(C64::new(-c, 0.0), e);
            }
        }
        let rn = r.frobenius_norm();
        if rn <= tol * norm.max(1.0) {
            return false;
        }
        // re-skew to wash out rounding
        let r = (&r - &r.adjoint()).scale_real(0.5);
        let rn = r.frobenius_norm();
        self.elements.push(r.scale_real(1.0 / rn));
        true
    }
}

fn validate_generators(generators: &[ComplexMatrix]) -> Result<usize> {
    let first = generators
        .first()
        .ok_or_else(|| Error::Usage("at least one generator is required".into()))?;
    let n = first.rows();
    for (idx, g) in generators.iter().enumerate() {
        if !g.is_square() || g.rows() != n {
            return Err(Error::Usage(format!(
                "generator {idx} is {}x{}, expected {n}x{n}",
                g.rows(),
                g.cols()
            )));
        }
        g.ensure_skew_hermitian(SKEW_HERMITIAN_TOL, &format!("generator {idx}"))?;
    }
    Ok(n)
}

/// Smallest real Lie algebra containing `generators`.
///
/// Gram–Schmidt in discovery order: generators first, then each round adds the
/// brackets `[Xᵢ, Xⱼ]` (lexicographic `i < j`, at least one index new since
/// the previous round) until a round adds nothing.
pub fn bracket_closure(generators: &[ComplexMatrix], tol: f64) -> Result<LieAlgebraBasis> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Usage(format!(
            "closure tolerance must be positive, got {tol}"
        )));
    }
    let mut basis = LieAlgebraBasis::spanned_by(generators, tol)?;
    let n = basis.n;
    let cap = n * n;
    let mut seen = 0;
    let mut rounds = 0;
    loop {
        let len = basis.dim();
        if seen == len {
            break;
        }
        rounds += 1;
        if rounds > cap {
            return Err(Error::Internal(format!(
                "bracket closure did not reach a fixpoint within {cap} rounds"
            )));
        }
        for i in 0..len {
            for j in (i + 1).max(seen)..len {
                let b = basis.elements[i].commutator(&basis.elements[j]);
                basis.try_extend(&b, tol);
                if basis.dim() > cap {
                    return Err(Error::Internal(format!(
                        "closure exceeded dim u({n}) = {cap}"
                    )));
                }
            }
        }
        seen = len;
    }
    let residual = basis.closure_residual();
    if residual > CLOSURE_RESIDUAL_TOL {
        return Err(Error::Internal(format!(
            "closure check failed: bracket residual {residual:.3e}"
        )));
    }
    basis.closed = true;
    Ok(basis)
}

fn ensure_closed(basis: &LieAlgebraBasis) -> Result<()> {
    if basis.closed {
        Ok(())
    } else {
        Err(Error::Precondition(
            "basis is not closed under brackets".into(),
        ))
    }
}

/// Real dimension of the tangent space `span_ℝ{Lx}` to the orbit through `x`.
pub fn orbit_tangent_dim(basis: &LieAlgebraBasis, x: &ComplexVector) -> Result<usize> {
    orbit_tangent_dim_with_tol(basis, x, DEFAULT_RANK_TOL)
}

pub fn orbit_tangent_dim_with_tol(
    basis: &LieAlgebraBasis,
    x: &ComplexVector,
    tol: f64,
) -> Result<usize> {
    if x.dim() != basis.n {
        return Err(Error::Usage(format!(
            "point has dimension {}, algebra acts on ℂ^{}",
            x.dim(),
            basis.n
        )));
    }
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::Usage("orbit of the zero vector".into()));
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Usage(format!(
            "point must be a unit vector, ‖x‖ = {norm}"
        )));
    }
    let columns: Vec<Vec<f64>> = basis
        .elements
        .iter()
        .map(|l| l.apply(x).realify())
        .collect();
    real_rank(&RealMatrix::from_columns(&columns)?, tol)
}

/// Transitivity on `S^{2n-1}`: full orbit dimension `2n − 1` at `trials`
/// random unit points drawn from the seeded stream.
pub fn is_transitive(basis: &LieAlgebraBasis, trials: usize, seed: u64) -> Result<bool> {
    Ok(
        orbit_dims_at_random_points(basis, trials, seed, DEFAULT_RANK_TOL)?
            .iter()
            .all(|&d| d == 2 * basis.n - 1),
    )
}

fn orbit_dims_at_random_points(
    basis: &LieAlgebraBasis,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<usize>> {
    ensure_closed(basis)?;
    if trials == 0 {
        return Err(Error::Usage(
            "transitivity test needs at least one trial".into(),
        ));
    }
    let mut rng = stream_rng(seed, 0x7472_616e);
    (0..trials)
        .map(|_| {
            let x = random_unit_vector(basis.n, &mut rng);
            orbit_tangent_dim_with_tol(basis, &x, tol)
        })
        .collect()
}

/// `vec` ordering for n×n unknowns: entry (a, b) ↦ a·n + b.
fn linear_system(
    basis: &LieAlgebraBasis,
    image: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
) -> ComplexMatrix {
    let n = basis.n;
    let nn = n * n;
    let mut sys = ComplexMatrix::zeros(basis.dim() * nn, nn);
    for col in 0..nn {
        let e = ComplexMatrix::unit(n, col / n, col % n);
        for (k, l) in basis.elements.iter().enumerate() {
            let img = image(&e, l);
            for (r, z) in img.data().iter().enumerate() {
                sys[(k * nn + r, col)] = *z;
            }
        }
    }
    sys
}

fn unvec(v: &ComplexVector, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(n, n, v.as_slice().to_vec()).expect("n² entries")
}

/// Orthonormal basis (Frobenius) of `{M : ML = LM for all L}`.
pub fn commutant(basis: &LieAlgebraBasis, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let sys = linear_system(basis, |m, l| m.commutator(l));
    Ok(complex_nullspace(&sys, tol)?
        .iter()
        .map(|v| unvec(v, basis.n))
        .collect())
}

/// Complex dimension of the commutant; 1 means complex-irreducible.
pub fn commutant_dim(basis: &LieAlgebraBasis) -> Result<usize> {
    Ok(commutant(basis, DEFAULT_RANK_TOL)?.len())
}

/// Symmetry type of the invariant bilinear forms of a complex-irreducible action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BilinearType {
    /// Complex type: no invariant form.
    None,
    /// Real type: realification splits.
    Symmetric,
    /// Quaternionic type.
    Antisymmetric,
}

/// Solves `Lᵀ S + S L = 0` for every basis element. Returns the form (normalized to
/// Frobenius norm √n) when one exists.
pub fn invariant_bilinear_form(
    basis: &LieAlgebraBasis,
) -> Result<Option<(BilinearType, ComplexMatrix)>> {
    let cdim = commutant_dim(basis)?;
    if cdim != 1 {
        return Err(Error::Precondition(format!(
            "bilinear-form classification needs a complex-irreducible action (commutant dimension {cdim})"
        )));
    }
    let sys = linear_system(basis, |s, l| &(&l.transpose() * s) + &(s * l));
    let null = complex_nullspace(&sys, DEFAULT_RANK_TOL)?;
    match null.len() {
        0 => Ok(None),
        1 => {
            let n = basis.n;
            let s = unvec(&null[0], n).scale_real((n as f64).sqrt());
            let scale = s.frobenius_norm();
            let sym = (&s - &s.transpose()).frobenius_norm();
            let anti = (&s + &s.transpose()).frobenius_norm();
            let kind = if sym <= 1e-6 * scale {
                BilinearType::Symmetric
            } else if anti <= 1e-6 * scale {
                BilinearType::Antisymmetric
            } else {
                return Err(Error::Internal(format!(
                    "invariant form is neither symmetric nor antisymmetric (residuals {sym:.3e}, {anti:.3e})"
                )));
            };
            Ok(Some((kind, s)))
        }
        k => Err(Error::Internal(format!(
            "invariant bilinear forms span {k} dimensions for an irreducible action"
        ))),
    }
}

pub fn invariant_bilinear_type(basis: &LieAlgebraBasis) -> Result<BilinearType> {
    Ok(invariant_bilinear_form(basis)?.map_or(BilinearType::None, |(t, _)| t))
}

/// Classification of the action of the closed algebra on ℂⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationProfile {
    pub transitive: bool,
    pub complex_irreducible: bool,
    pub bilinear_type: BilinearType,
    pub realification_reducible: bool,
    pub algebra_dim: usize,
    /// Largest orbit tangent dimension over the sampled points.
    pub orbit_tangent_dim: usize,
    pub commutant_dim: usize,
}

pub fn profile(basis: &LieAlgebraBasis, trials: usize, seed: u64) -> Result<RepresentationProfile> {
    let dims = orbit_dims_at_random_points(basis, trials, seed, DEFAULT_RANK_TOL)?;
    let full = 2 * basis.n - 1;
    let transitive = dims.iter().all(|&d| d == full);
    let orbit_tangent_dim = dims.iter().copied().max().unwrap_or(0);
    let commutant_dim = commutant_dim(basis)?;
    let complex_irreducible = commutant_dim == 1;
    let bilinear_type = if complex_irreducible {
        invariant_bilinear_type(basis)?
    } else {
        BilinearType::None
    };
    Ok(RepresentationProfile {
        transitive,
        complex_irreducible,
        bilinear_type,
        realification_reducible: !complex_irreducible || bilinear_type == BilinearType::Symmetric,
        algebra_dim: basis.dim(),
        orbit_tangent_dim,
        commutant_dim,
    })
}

/// Real subspace of ℂⁿ ≅ ℝ²ⁿ held as a list of vectors orthonormal for `Re<·,·>`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSubspace {
    vectors: Vec<ComplexVector>,
}

impl RealSubspace {
    /// Real Gram–Schmidt over `spanning`, in order.
    pub fn from_spanning(spanning: &[ComplexVector]) -> Result<Self> {
        let n = spanning
            .first()
            .ok_or_else(|| Error::Usage("empty subspace".into()))?
            .dim();
        if spanning.iter().any(|v| v.dim() != n) {
            return Err(Error::Usage("subspace vectors of unequal dimension".into()));
        }
        let mut vectors: Vec<ComplexVector> = Vec::new();
        for v in spanning {
            let mut r = v.clone();
            for _ in 0..2 {
                for u in &vectors {
                    let c = r.real_inner(u);
                    r.axpy(C64::new(-c, 0.0), u);
                }
            }
            let norm = r.norm();
            if norm > 1e-8 * v.norm().max(1e-300) && norm > 1e-12 {
                vectors.push(r.scale(C64::new(1.0 / norm, 0.0)));
            }
        }
        if vectors.is_empty() {
            return Err(Error::Usage("subspace spanned by zero vectors".into()));
        }
        Ok(Self { vectors })
    }

    /// Zeroes rounding residue in every vector and re-orthonormalizes, so that
    /// equal subspaces computed along different paths get identical bases.
    fn chopped(&self) -> Result<Self> {
        Self::from_spanning(&self.vectors.iter().map(chop).collect::<Vec<_>>())
    }

    /// Realification of a complex subspace: `{u, iu}` for each spanning vector.
    pub fn complex_span(spanning: &[ComplexVector]) -> Result<Self> {
        let doubled: Vec<ComplexVector> = spanning
            .iter()
            .flat_map(|u| [u.clone(), u.scale(I)])
            .collect();
        Self::from_spanning(&doubled)
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    pub fn real_dim(&self) -> usize {
        self.vectors.len()
    }

    /// Distance of `x` from the subspace.
    pub fn residual(&self, x: &ComplexVector) -> f64 {
        let mut r = x.clone();
        for u in &self.vectors {
            let c = r.real_inner(u);
            r.axpy(C64::new(-c, 0.0), u);
        }
        r.norm()
    }

    /// Largest `|Re<u, v>|` over cross pairs.
    pub fn orthogonality_residual(&self, other: &RealSubspace) -> f64 {
        self.vectors
            .iter()
            .flat_map(|u| other.vectors.iter().map(move |v| u.real_inner(v).abs()))
            .fold(0.0, f64::max)
    }

    /// Largest distance of `Lu` from the subspace over basis elements and vectors.
    pub fn invariance_residual(&self, basis: &LieAlgebraBasis) -> f64 {
        basis
            .elements()
            .iter()
            .flat_map(|l| self.vectors.iter().map(move |u| self.residual(&l.apply(u))))
            .fold(0.0, f64::max)
    }
}

/// Where an invariant real splitting came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingSource {
    /// Eigenspaces of a Hermitian element of the commutant.
    Commutant,
    /// ±1 eigenspaces of the antiunitary structure built from a symmetric invariant form.
    RealStructure,
}

/// Two orthogonal invariant real subspaces; the first vector of each is the canonical
/// representative used for witnesses.
#[derive(Clone, Debug)]
pub struct InvariantSplitting {
    pub first: RealSubspace,
    pub second: RealSubspace,
    pub source: SplittingSource,
}

/// Fixed Hermitian reference with distinct generic entries.
fn reference_hermitian(n: usize) -> ComplexMatrix {
    let mut r = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = C64::new(1.0 + 0.731 * j as f64, 0.0);
        for k in j + 1..n {
            let t = 0.37 * (j + 1) as f64 + 0.61 * ((k + 1) * (k + 2)) as f64;
            let z = C64::new(t.sin(), t.cos()) * 0.5;
            r[(j, k)] = z;
            r[(k, j)] = z.conj();
        }
    }
    r
}

/// First standard basis vector whose image under `project` is at least half the largest
/// such image, normalized. Deterministic and insensitive to rounding.
fn canonical_projection(
    n: usize,
    project: impl Fn(&ComplexVector) -> ComplexVector,
) -> Option<(usize, ComplexVector)> {
    let images: Vec<ComplexVector> = (0..n)
        .map(|j| project(&ComplexVector::basis(n, j)))
        .collect();
    let max = images.iter().map(ComplexVector::norm).fold(0.0, f64::max);
    if max < 1e-8 {
        return None;
    }
    images
        .into_iter()
        .enumerate()
        .find(|(_, v)| v.norm() >= 0.5 * max)
        .map(|(j, v)| (j, v.normalized().expect("nonzero")))
}

fn project_onto(vectors: &[ComplexVector], x: &ComplexVector) -> ComplexVector {
    let mut out = ComplexVector::zeros(x.dim());
    for u in vectors {
        out.axpy(x.dot(u), u);
    }
    out
}

/// Exposes two orthogonal invariant real subspaces when the realification is reducible:
/// from the commutant for complex-reducible actions, from the symmetric invariant form
/// for real-type irreducibles. The result depends only on the spanned algebra, not on
/// the basis that represents it.
pub fn invariant_real_splitting(basis: &LieAlgebraBasis) -> Result<Option<InvariantSplitting>> {
    let n = basis.n;
    let comm = commutant(basis, DEFAULT_RANK_TOL)?;
    let split = if comm.len() > 1 {
        commutant_splitting(basis, &comm)?
    } else {
        match invariant_bilinear_form(basis)? {
            Some((BilinearType::Symmetric, s)) => real_structure_splitting(n, s)?,
            _ => return Ok(None),
        }
    };
    Ok(Some(InvariantSplitting {
        first: split.first.chopped()?,
        second: split.second.chopped()?,
        source: split.source,
    }))
}

/// Entries below this magnitude in unit vectors are rounding residue.
const CHOP_TOL: f64 = 1e-12;

fn chop(v: &ComplexVector) -> ComplexVector {
    let clean = |x: f64| if x.abs() < CHOP_TOL { 0.0 } else { x };
    ComplexVector::from_vec(
        v.as_slice()
            .iter()
            .map(|z| C64::new(clean(z.re), clean(z.im)))
            .collect(),
    )
}

fn commutant_splitting(
    basis: &LieAlgebraBasis,
    comm: &[ComplexMatrix],
) -> Result<InvariantSplitting> {
    let n = basis.n;
    let reference = reference_hermitian(n);
    let mut h = ComplexMatrix::zeros(n, n);
    for c in comm {
        h.axpy(reference.frobenius_inner(c), c);
    }
    let h = (&h + &h.adjoint()).scale_real(0.5);
    let eig = hermitian_eigen(&h)?;
    let spread = eig.values[n - 1] - eig.values[0];
    let scale = eig.values.iter().map(|v| v.abs()).fold(1e-300, f64::max);
    if spread <= 1e-8 * scale {
        return Err(Error::Internal(
            "commutant projection of the reference matrix is scalar".into(),
        ));
    }
    // lowest eigenvalue cluster versus the rest
    let gap = 1e-6 * spread.max(scale);
    let cut = (1..n)
        .find(|&k| eig.values[k] - eig.values[k - 1] > gap)
        .unwrap_or(n);
    let cols: Vec<ComplexVector> = (0..n).map(|j| eig.vectors.column(j)).collect();
    let (low, high) = cols.split_at(cut);
    let (_, x) = canonical_projection(n, |e| project_onto(low, e))
        .ok_or_else(|| Error::Internal("empty invariant subspace".into()))?;
    let (_, y) = canonical_projection(n, |e| project_onto(high, e))
        .ok_or_else(|| Error::Internal("empty invariant complement".into()))?;
    let first: Vec<ComplexVector> = std::iter::once(x).chain(low.iter().cloned()).collect();
    let second: Vec<ComplexVector> = std::iter::once(y).chain(high.iter().cloned()).collect();
    Ok(InvariantSplitting {
        first: RealSubspace::complex_span(&first)?,
        second: RealSubspace::complex_span(&second)?,
        source: SplittingSource::Commutant,
    })
}

fn real_structure_splitting(n: usize, s: ComplexMatrix) -> Result<InvariantSplitting> {
    // normalize to S*S = I, then fix the phase on the first dominant entry
    let c = s.frobenius_norm().powi(2) / n as f64;
    let mut s = s.scale_real(1.0 / c.sqrt());
    let unitarity = (&(&s.adjoint() * &s) - &ComplexMatrix::identity(n)).frobenius_norm();
    if unitarity > 1e-6 {
        return Err(Error::Internal(format!(
            "symmetric invariant form is not a multiple of a unitary (residual {unitarity:.3e})"
        )));
    }
    let max = s.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = *s
        .data()
        .iter()
        .find(|z| z.norm() >= (1.0 - 1e-6) * max)
        .expect("nonzero form");
    s = s.scale(pivot.conj() / pivot.norm());

    // J x = conj(S x) commutes with the group and squares to the identity
    let j = |x: &ComplexVector| s.apply(x).conj();
    let plus = |x: &ComplexVector| (x + &j(x)).scale(C64::new(0.5, 0.0));
    let (j0, x) = canonical_projection(n, plus)
        .ok_or_else(|| Error::Internal("real structure has no fixed vectors".into()))?;
    let mut spanning = vec![x];
    for k in (0..n).filter(|&k| k != j0) {
        spanning.push(plus(&ComplexVector::basis(n, k)));
    }
    for k in 0..n {
        spanning.push(plus(&ComplexVector::basis(n, k).scale(I)));
    }
    let first = RealSubspace::from_spanning(&spanning)?;
    if first.real_dim() != n {
        return Err(Error::Internal(format!(
            "real form has dimension {}, expected {n}",
            first.real_dim()
        )));
    }
    // second vector of V+ (when it exists) rotated by i is the default partner
    let mut second_spanning: Vec<ComplexVector> =
        first.vectors().iter().map(|v| v.scale(I)).collect();
    if n > 1 {
        second_spanning.swap(0, 1);
    }
    Ok(InvariantSplitting {
        second: RealSubspace::from_spanning(&second_spanning)?,
        first,
        source: SplittingSource::RealStructure,
    })
}

/// Smallest complex subspace containing `x` and invariant under the algebra
/// (orthonormal basis).
pub fn cyclic_subspace(basis: &LieAlgebraBasis, x: &ComplexVector) -> Result<Vec<ComplexVector>> {
    if x.dim() != basis.n {
        return Err(Error::Usage(
            "vector dimension does not match the algebra".into(),
        ));
    }
    let mut span = pivoted_complex_span(vec![x.clone()], 1);
    let mut frontier = span.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for v in &frontier {
            for l in basis.elements() {
                let mut w = l.apply(v);
                for _ in 0..2 {
                    for u in &span {
                        let d = w.dot(u);
                        w.axpy(-d, u);
                    }
                }
                let norm = w.norm();
                if norm > 1e-8 {
                    let w = w.scale(C64::new(1.0 / norm, 0.0));
                    span.push(w.clone());
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    Ok(span)
}

/// Distance of `y` from a complex subspace with orthonormal basis `span`.
pub fn complex_span_residual(span: &[ComplexVector], y: &ComplexVector) -> f64 {
    let mut r = y.clone();
    for u in span {
        let d = r.dot(u);
        r.axpy(-d, u);
    }
    r.norm()
}
