//! Constructors for the representations under study: standard and orthogonal
//! embeddings, direct-product lifts, exterior powers, SU(2) symmetric powers
//! and conjugate representations.

use crate::error::{Error, Result};
use crate::numkernel::{det, ComplexMatrix, ComplexVector, C64, I, ZERO};

/// Orthonormal basis of su(n): real antisymmetric pairs, imaginary symmetric pairs,
/// then traceless imaginary diagonals.
pub fn su_standard(n: usize) -> Result<Vec<ComplexMatrix>> {
    if n < 2 {
        return Err(Error::Usage(format!("su(n) needs n ≥ 2, got {n}")));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            let mut a = ComplexMatrix::zeros(n, n);
            a[(j, k)] = C64::new(h, 0.0);
            a[(k, j)] = C64::new(-h, 0.0);
            out.push(a);
            let mut s = ComplexMatrix::zeros(n, n);
            s[(j, k)] = C64::new(0.0, h);
            s[(k, j)] = C64::new(0.0, h);
            out.push(s);
        }
    }
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![ZERO; n];
        for d in diag.iter_mut().take(l) {
            *d = C64::new(0.0, 1.0 / norm);
        }
        diag[l] = C64::new(0.0, -(l as f64) / norm);
        out.push(ComplexMatrix::from_diag(&diag));
    }
    Ok(out)
}

/// Elementary rotations `E_ij − E_ji` (`i < j`) of so(n) inside u(n).
pub fn so_embedded(n: usize) -> Result<Vec<ComplexMatrix>> {
    if n < 2 {
        return Err(Error::Usage(format!("so(n) needs n ≥ 2, got {n}")));
    }
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(&ComplexMatrix::unit(n, i, j) - &ComplexMatrix::unit(n, j, i));
        }
    }
    Ok(out)
}

/// `{L ⊗ I} ∪ {I ⊗ M}`: generators of the direct-product action on ℂ^{pq}.
pub fn product_lift(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let (p, q) = match (a.first(), b.first()) {
        (Some(x), Some(y)) => (x.rows(), y.rows()),
        _ => return Err(Error::Usage("product lift needs two nonempty bases".into())),
    };
    let ip = ComplexMatrix::identity(p);
    let iq = ComplexMatrix::identity(q);
    Ok(a.iter()
        .map(|l| l.kron(&iq))
        .chain(b.iter().map(|m| ip.kron(m)))
        .collect())
}

/// Lexicographic basis `e_{i1} ∧ … ∧ e_{ik}` of `Λᵏ(ℂⁿ)`. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeIndex {
    n: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
}

impl WedgeIndex {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Usage(format!("wedge degree {k} outside 1..={n}")));
        }
        let mut subsets = Vec::new();
        let mut current: Vec<usize> = (0..k).collect();
        loop {
            subsets.push(current.clone());
            // advance to the next combination
            let mut i = k;
            while i > 0 && current[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            current[i - 1] += 1;
            for j in i..k {
                current[j] = current[j - 1] + 1;
            }
        }
        Ok(Self { n, k, subsets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Position of a strictly increasing tuple.
    pub fn position(&self, subset: &[usize]) -> Option<usize> {
        self.subsets
            .binary_search_by(|s| s.as_slice().cmp(subset))
            .ok()
    }

    /// Coordinates of `e_{i1} ∧ … ∧ e_{ik}` for arbitrary distinct indices (sign from sorting).
    pub fn basis_wedge(&self, indices: &[usize]) -> Result<ComplexVector> {
        let (sign, sorted) = sort_with_sign(indices)
            .ok_or_else(|| Error::Usage("repeated index in wedge product".into()))?;
        let pos = self
            .position(&sorted)
            .ok_or_else(|| Error::Usage(format!("indices {indices:?} do not fit Λ^{}", self.k)))?;
        let mut v = ComplexVector::zeros(self.len());
        v[pos] = C64::new(sign, 0.0);
        Ok(v)
    }

    /// Coordinates of `v₁ ∧ … ∧ v_k` (minors of the n×k matrix of columns).
    pub fn wedge_of(&self, vectors: &[ComplexVector]) -> Result<ComplexVector> {
        if vectors.len() != self.k || vectors.iter().any(|v| v.dim() != self.n) {
            return Err(Error::Usage("wedge needs k vectors of dimension n".into()));
        }
        let mut out = ComplexVector::zeros(self.len());
        for (pos, rows) in self.subsets.iter().enumerate() {
            let minor = ComplexMatrix::new(
                self.k,
                self.k,
                rows.iter()
                    .flat_map(|&r| vectors.iter().map(move |v| v[r]))
                    .collect(),
            )?;
            out[pos] = det(&minor)?;
        }
        Ok(out)
    }
}

/// Sorts distinct indices, returning the permutation sign; `None` on repeats.
fn sort_with_sign(indices: &[usize]) -> Option<(f64, Vec<usize>)> {
    let mut inversions = 0usize;
    for i in 0..indices.len() {
        for j in i + 1..indices.len() {
            match indices[i].cmp(&indices[j]) {
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    Some((
        if inversions.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        },
        sorted,
    ))
}

/// Derivation action of `L` on `Λᵏ`:
/// `L(e_{j1} ∧ … ∧ e_{jk}) = Σ_m e_{j1} ∧ … ∧ L e_{jm} ∧ … ∧ e_{jk}`.
pub fn wedge_lift_algebra(l: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    if !l.is_square() {
        return Err(Error::Usage("wedge lift needs a square matrix".into()));
    }
    let n = l.rows();
    let index = WedgeIndex::new(n, k)?;
    let dim = index.len();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (col, subset) in index.subsets().iter().enumerate() {
        for slot in 0..k {
            let jm = subset[slot];
            for r in 0..n {
                let coeff = l[(r, jm)];
                if coeff == ZERO {
                    continue;
                }
                let mut replaced = subset.clone();
                replaced[slot] = r;
                if let Some((sign, sorted)) = sort_with_sign(&replaced) {
                    let row = index
                        .position(&sorted)
                        .expect("sorted subset is in the index");
                    out[(row, col)] += coeff * sign;
                }
            }
        }
    }
    Ok(out)
}

/// `Λᵏ g`: entry (I, J) is the minor of `g` with rows I and columns J.
pub fn wedge_lift_group(g: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    if !g.is_square() {
        return Err(Error::Usage("wedge lift needs a square matrix".into()));
    }
    let residual = g.unitarity_residual();
    if residual > 1e-9 {
        return Err(Error::Domain(format!(
            "matrix is not unitary: ‖gg* − I‖ = {residual:.3e}"
        )));
    }
    let index = WedgeIndex::new(g.rows(), k)?;
    let dim = index.len();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (row, rs) in index.subsets().iter().enumerate() {
        for (col, cs) in index.subsets().iter().enumerate() {
            let minor = ComplexMatrix::new(
                k,
                k,
                rs.iter()
                    .flat_map(|&r| cs.iter().map(move |&c| g[(r, c)]))
                    .collect(),
            )?;
            out[(row, col)] = det(&minor)?;
        }
    }
    Ok(out)
}

/// Antiunitary Hodge map `Λᵏ → Λⁿ⁻ᵏ`, `Σ c_I e_I ↦ Σ conj(c_I) ε(I, Iᶜ) e_{Iᶜ}`,
/// where `ε(I, Iᶜ)` is the sign of the permutation `(I, Iᶜ)`.
///
/// For every unitary `g`, `Λⁿ⁻ᵏg ∘ ⋆ = det(g) · ⋆ ∘ Λᵏg`, so overlap magnitudes
/// `|<Λᵏg X, Y>|` are carried over to `|<Λⁿ⁻ᵏg ⋆X, ⋆Y>|`.
pub fn hodge_star(x: &ComplexVector, n: usize, k: usize) -> Result<ComplexVector> {
    let from = WedgeIndex::new(n, k)?;
    if x.dim() != from.len() {
        return Err(Error::Usage(format!(
            "vector of dimension {} is not in Λ^{k}(ℂ^{n})",
            x.dim()
        )));
    }
    if k == n {
        return Ok(ComplexVector::from_vec(vec![x[0].conj()]));
    }
    let to = WedgeIndex::new(n, n - k)?;
    let mut out = ComplexVector::zeros(to.len());
    for (pos, subset) in from.subsets().iter().enumerate() {
        let complement: Vec<usize> = (0..n).filter(|i| !subset.contains(i)).collect();
        let full: Vec<usize> = subset.iter().chain(&complement).copied().collect();
        let (sign, _) = sort_with_sign(&full).expect("distinct indices");
        let target = to.position(&complement).expect("complement is sorted");
        out[target] = x[pos].conj() * sign;
    }
    Ok(out)
}

/// Spin-(m/2) irreducible of su(2) as `[iJx, iJy, iJz]` in the ladder basis
/// `|m/2⟩, |m/2 − 1⟩, …, |−m/2⟩`. The first and last basis vectors are the
/// highest and lowest weight vectors.
pub fn sym_power_su2(m: usize) -> Result<Vec<ComplexMatrix>> {
    if m == 0 {
        return Err(Error::Usage(
            "symmetric power degree must be at least 1".into(),
        ));
    }
    let dim = m + 1;
    let j = m as f64 / 2.0;
    let mz = |idx: usize| j - idx as f64;
    // J+ |mz⟩ = √(j(j+1) − mz(mz+1)) |mz+1⟩, and |mz+1⟩ sits one index up
    let mut jplus = ComplexMatrix::zeros(dim, dim);
    for idx in 1..dim {
        let m0 = mz(idx);
        jplus[(idx - 1, idx)] = C64::new((j * (j + 1.0) - m0 * (m0 + 1.0)).sqrt(), 0.0);
    }
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus).scale_real(0.5);
    let jy = (&jplus - &jminus).scale(C64::new(0.0, -0.5));
    let jz = ComplexMatrix::from_diag(&(0..dim).map(|i| C64::new(mz(i), 0.0)).collect::<Vec<_>>());
    Ok(vec![jx.scale(I), jy.scale(I), jz.scale(I)])
}

/// Entrywise conjugate of every element: the dual (conjugate) representation.
pub fn conjugate_basis(basis: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    basis.iter().map(ComplexMatrix::conj).collect()
}

/// Unit vector `e_i ⊗ e_j` in ℂ^{pq}.
pub fn product_basis_vector(p: usize, q: usize, i: usize, j: usize) -> ComplexVector {
    ComplexVector::basis(p, i).kron(&ComplexVector::basis(q, j))
}
