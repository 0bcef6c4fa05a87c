//! Small dense real matrices and the decompositions used by the transform
//! comparisons: symmetric eigensystems, convex combinations of extreme sign
//! patterns, and the block canonical form of antisymmetric matrices.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Tolerance used when classifying a matrix.
pub const CLASSIFY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Symmetric,
    Antisymmetric,
    General,
}

/// Real d×d matrix, row-major. Serialized as a JSON array of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct TransformMatrix {
    d: usize,
    entries: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedMatrix {
    /// diag(1, −1)
    As,
    /// diag(1, −1, …, −1) of size d
    AsD(usize),
    /// [[0, −1], [1, 0]]
    J,
}

impl TryFrom<Vec<Vec<f64>>> for TransformMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<TransformMatrix> for Vec<Vec<f64>> {
    fn from(m: TransformMatrix) -> Self {
        m.rows()
    }
}

impl TransformMatrix {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(domain("matrix", "must have at least one row"));
        }
        let mut entries = Vec::with_capacity(d * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(domain("matrix", format!("row {i} has {} entries, expected {d}", row.len())));
            }
            entries.extend_from_slice(row);
        }
        Self::from_row_major(d, entries)
    }

    pub fn from_row_major(d: usize, entries: Vec<f64>) -> Result<Self> {
        if d == 0 || entries.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(domain("matrix", "entries must be finite"));
        }
        Ok(Self { d, entries })
    }

    pub fn identity(d: usize) -> Self {
        Self::diag(&vec![1.0; d])
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            entries: vec![0.0; d * d],
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let d = values.len();
        let mut m = Self::zeros(d);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * d + i] = v;
        }
        m
    }

    pub fn named(name: NamedMatrix) -> Result<Self> {
        match name {
            NamedMatrix::As => Ok(Self::diag(&[1.0, -1.0])),
            NamedMatrix::AsD(d) => {
                if d < 2 {
                    return Err(domain("d", format!("A_s needs d ≥ 2, got {d}")));
                }
                let mut v = vec![-1.0; d];
                v[0] = 1.0;
                Ok(Self::diag(&v))
            }
            NamedMatrix::J => Self::from_rows(&[[0.0, -1.0], [1.0, 0.0]]),
        }
    }

    /// Counter-clockwise rotation of the plane by `angle`.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            d: 2,
            entries: vec![c, -s, s, c],
        }
    }

    /// Haar-distributed orthogonal matrix (Gram–Schmidt on Gaussian columns).
    pub fn random_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        loop {
            let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
            let mut ok = true;
            for _ in 0..d {
                let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                for _ in 0..2 {
                    for c in &cols {
                        let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                        v.iter_mut().zip(c).for_each(|(a, b)| *a -= dot * b);
                    }
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-8 {
                    ok = false;
                    break;
                }
                v.iter_mut().for_each(|x| *x /= norm);
                cols.push(v);
            }
            if ok {
                let mut m = Self::zeros(d);
                for (j, c) in cols.iter().enumerate() {
                    for (i, &x) in c.iter().enumerate() {
                        m.set(i, j, x);
                    }
                }
                return m;
            }
        }
    }

    pub fn random_symmetric<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            for j in i..d {
                let v: f64 = rng.sample(StandardNormal);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    pub fn random_antisymmetric<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            for j in i + 1..d {
                let v: f64 = rng.sample(StandardNormal);
                m.set(i, j, v);
                m.set(j, i, -v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.d + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.d + j] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.d).map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.d).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "matrix sizes differ");
        let d = self.d;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        self.apply_into(x, &mut out);
        out
    }

    #[inline]
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.entries[i * self.d..(i + 1) * self.d]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum();
        }
    }

    /// ⟨x, A x⟩.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        ax.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            d: self.d,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "matrix sizes differ");
        Self {
            d: self.d,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn symmetric_part(&self) -> Self {
        self.plus(&self.transpose()).scaled(0.5)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.d, other.d, "matrix sizes differ");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.transpose()) <= tol
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.transpose().scaled(-1.0)) <= tol
    }

    /// ‖AᵀA − I‖_max ≤ tol.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        self.transpose().matmul(self).max_abs_diff(&Self::identity(self.d)) <= tol
    }

    pub fn classification(&self) -> Classification {
        if self.is_symmetric(CLASSIFY_TOL) {
            Classification::Symmetric
        } else if self.is_antisymmetric(CLASSIFY_TOL) {
            Classification::Antisymmetric
        } else {
            Classification::General
        }
    }

    /// Determinant by partial-pivot elimination.
    pub fn det(&self) -> f64 {
        let d = self.d;
        let mut a = self.entries.clone();
        let mut det = 1.0;
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&x, &y| a[x * d + col].abs().total_cmp(&a[y * d + col].abs()))
                .unwrap();
            if a[pivot * d + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for j in 0..d {
                    a.swap(pivot * d + j, col * d + j);
                }
                det = -det;
            }
            let p = a[col * d + col];
            det *= p;
            for r in col + 1..d {
                let f = a[r * d + col] / p;
                for j in col..d {
                    a[r * d + j] -= f * a[col * d + j];
                }
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.d;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if self.det().abs() <= 1e-14 * scale.powi(d as i32) {
            return Err(domain("matrix", "singular (determinant is zero)"));
        }
        let mut a = self.entries.clone();
        let mut inv = Self::identity(d).entries;
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&x, &y| a[x * d + col].abs().total_cmp(&a[y * d + col].abs()))
                .unwrap();
            for j in 0..d {
                a.swap(pivot * d + j, col * d + j);
                inv.swap(pivot * d + j, col * d + j);
            }
            let p = a[col * d + col];
            for j in 0..d {
                a[col * d + j] /= p;
                inv[col * d + j] /= p;
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let f = a[r * d + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..d {
                    a[r * d + j] -= f * a[col * d + j];
                    inv[r * d + j] -= f * inv[col * d + j];
                }
            }
        }
        Self::from_row_major(d, inv)
    }
}

/// Diagonal matrix whose entries are each one of two extreme values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignPatternMatrix {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub diagonal: Vec<f64>,
}

impl SignPatternMatrix {
    pub fn to_matrix(&self) -> TransformMatrix {
        TransformMatrix::diag(&self.diagonal)
    }
}

#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Columns are eigenvectors.
    pub u: TransformMatrix,
    /// Descending.
    pub values: Vec<f64>,
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
pub fn symmetric_eigensystem(a: &TransformMatrix) -> Result<Eigensystem> {
    if !a.is_symmetric(CLASSIFY_TOL * a.max_abs().max(1.0)) {
        return Err(domain("matrix", "symmetric_eigensystem needs a symmetric matrix"));
    }
    let d = a.dim();
    let mut m = a.symmetric_part();
    let mut v = TransformMatrix::identity(d);
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).powi(2))
            .sum();
        let diag: f64 = (0..d).map(|i| m.get(i, i).powi(2)).sum();
        if off <= 1e-34 * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..d {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m.get(j, j).total_cmp(&m.get(i, i)));
    let mut u = TransformMatrix::zeros(d);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..d {
            u.set(k, new, v.get(k, old));
        }
    }
    Ok(Eigensystem {
        u,
        values: order.iter().map(|&i| m.get(i, i)).collect(),
    })
}

#[derive(Debug, Clone)]
pub struct ConvexDecomposition {
    pub u: TransformMatrix,
    pub terms: Vec<(f64, SignPatternMatrix)>,
}

impl ConvexDecomposition {
    /// Σ wᵢ Λᵢ.
    pub fn combination(&self) -> TransformMatrix {
        let d = self.u.dim();
        let mut out = TransformMatrix::zeros(d);
        for (w, s) in &self.terms {
            out = out.plus(&s.to_matrix().scaled(*w));
        }
        out
    }
}

/// Writes UᵀBU as a convex combination of diagonal sign patterns with entries
/// in {λ_min, λ_max}: eigenvalue μⱼ = tⱼλ_max + (1−tⱼ)λ_min independently, and
/// pattern weights are products of the tⱼ / (1−tⱼ).
pub fn convex_decompose_symmetric(
    b: &TransformMatrix,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<ConvexDecomposition> {
    if !(lambda_min < lambda_max) {
        return Err(domain("lambda", format!("need λ_min < λ_max, got [{lambda_min}, {lambda_max}]")));
    }
    let eig = symmetric_eigensystem(b)?;
    let width = lambda_max - lambda_min;
    let slack = 1e-12 * width.max(1.0);
    let mut t = Vec::with_capacity(eig.values.len());
    for &mu in &eig.values {
        if mu < lambda_min - slack || mu > lambda_max + slack {
            return Err(domain(
                "matrix",
                format!("eigenvalue {mu} lies outside [{lambda_min}, {lambda_max}]"),
            ));
        }
        t.push(((mu - lambda_min) / width).clamp(0.0, 1.0));
    }
    let d = t.len();
    // Patterns whose weight is exactly zero are skipped while enumerating so
    // that already-extreme eigenvalues do not double the term count.
    let mut terms: Vec<(f64, Vec<f64>)> = vec![(1.0, Vec::with_capacity(d))];
    for &tj in &t {
        let mut next = Vec::with_capacity(terms.len() * 2);
        for (w, diag) in terms {
            if tj > 0.0 {
                let mut hi = diag.clone();
                hi.push(lambda_max);
                next.push((w * tj, hi));
            }
            if tj < 1.0 {
                let mut lo = diag;
                lo.push(lambda_min);
                next.push((w * (1.0 - tj), lo));
            }
        }
        terms = next;
    }
    terms.retain(|(w, _)| *w >= 1e-15);
    let total: f64 = terms.iter().map(|(w, _)| w).sum();
    Ok(ConvexDecomposition {
        u: eig.u,
        terms: terms
            .into_iter()
            .map(|(w, diagonal)| {
                (
                    w / total,
                    SignPatternMatrix {
                        lambda_min,
                        lambda_max,
                        diagonal,
                    },
                )
            })
            .collect(),
    })
}

#[derive(Debug, Clone)]
pub struct AntisymmetricForm {
    pub u: TransformMatrix,
    /// Block scales c_k ≥ 0, descending; block k of UᵀAU is c_k·J.
    pub blocks: Vec<f64>,
    /// A trailing 1×1 zero block (odd d).
    pub zero_tail: bool,
}

impl AntisymmetricForm {
    pub fn block_matrix(&self) -> TransformMatrix {
        let d = self.u.dim();
        let mut out = TransformMatrix::zeros(d);
        for (k, &c) in self.blocks.iter().enumerate() {
            out.set(2 * k, 2 * k + 1, -c);
            out.set(2 * k + 1, 2 * k, c);
        }
        out
    }
}

/// Orthogonal U with UᵀAU block diagonal in c_k·J blocks, built from the
/// eigenvectors of AᵀA: each leading unit vector u is paired with Au/|Au|.
pub fn antisymmetric_canonical_form(a: &TransformMatrix) -> Result<AntisymmetricForm> {
    if !a.is_antisymmetric(CLASSIFY_TOL * a.max_abs().max(1.0)) {
        return Err(domain("matrix", "antisymmetric_canonical_form needs an antisymmetric matrix"));
    }
    let d = a.dim();
    let ata = a.transpose().matmul(a);
    let eig = symmetric_eigensystem(&ata)?;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut blocks = Vec::new();
    let orthogonalize = |v: &mut Vec<f64>, basis: &[Vec<f64>]| -> f64 {
        for _ in 0..2 {
            for b in basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
        }
        n
    };
    let candidates: Vec<Vec<f64>> = (0..d).map(|j| eig.u.column(j)).collect();
    let mut pending_kernel: Option<Vec<f64>> = None;
    for cand in candidates {
        if basis.len() + usize::from(pending_kernel.is_some()) >= d {
            break;
        }
        let mut u = cand;
        let mut all = basis.clone();
        if let Some(k) = &pending_kernel {
            all.push(k.clone());
        }
        if orthogonalize(&mut u, &all) < 0.5 {
            continue;
        }
        let mut au = a.apply(&u);
        let c = orthogonalize(&mut au, &basis);
        if c > 1e-13 * scale && pending_kernel.is_none() {
            basis.push(u);
            basis.push(au);
            blocks.push(c);
        } else if let Some(k) = pending_kernel.take() {
            basis.push(k);
            basis.push(u);
            blocks.push(0.0);
        } else {
            pending_kernel = Some(u);
        }
    }
    let zero_tail = d % 2 == 1;
    if let Some(k) = pending_kernel {
        basis.push(k);
    }
    // Fill any directions lost to cancellation with standard basis vectors.
    for i in 0..d {
        if basis.len() >= d {
            break;
        }
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        if orthogonalize(&mut e, &basis) > 0.5 {
            basis.push(e);
        }
    }
    while blocks.len() < d / 2 {
        blocks.push(0.0);
    }
    let mut u = TransformMatrix::zeros(d);
    for (j, col) in basis.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u.set(i, j, x);
        }
    }
    // Recompute the scales from the final basis so rounding in the pairing
    // step does not leak into the reported blocks.
    for (k, c) in blocks.iter_mut().enumerate() {
        let au = a.apply(&basis[2 * k + 1]);
        let v: f64 = -au.iter().zip(&basis[2 * k]).map(|(x, y)| x * y).sum::<f64>();
        *c = v;
    }
    Ok(AntisymmetricForm { u, blocks, zero_tail })
}

#[derive(Debug, Clone)]
pub struct AffineNormalization {
    pub alpha: f64,
    pub beta: f64,
    pub b: TransformMatrix,
}

/// α, β with B = αA + βI having extreme eigenvalues exactly ±1.
pub fn affine_normalize(a: &TransformMatrix) -> Result<AffineNormalization> {
    let eig = symmetric_eigensystem(a)?;
    let lmax = eig.values[0];
    let lmin = *eig.values.last().unwrap();
    if lmax - lmin <= 1e-12 * lmax.abs().max(lmin.abs()).max(1.0) {
        return Err(domain("matrix", "is a multiple of the identity"));
    }
    let alpha = 2.0 / (lmax - lmin);
    let beta = -(lmax + lmin) / (lmax - lmin);
    let b = a.scaled(alpha).plus(&TransformMatrix::identity(a.dim()).scaled(beta));
    Ok(AffineNormalization { alpha, beta, b })
}

/// Block-diagonal matrix with `m` copies of `a`.
pub fn tensor_power(a: &TransformMatrix, m: usize) -> Result<TransformMatrix> {
    if m == 0 {
        return Err(domain("m", "must be at least 1"));
    }
    let d = a.dim();
    let mut out = TransformMatrix::zeros(d * m);
    for b in 0..m {
        for i in 0..d {
            for j in 0..d {
                out.set(b * d + i, b * d + j, a.get(i, j));
            }
        }
    }
    Ok(out)
}

/// Principal submatrix on the strictly ascending, zero-based `indices`.
pub fn submatrix(a: &TransformMatrix, indices: &[usize]) -> Result<TransformMatrix> {
    let d = a.dim();
    if indices.is_empty() || indices.len() >= d {
        return Err(domain("indices", format!("need 1 ≤ |I| < {d}, got {}", indices.len())));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) || indices[indices.len() - 1] >= d {
        return Err(domain("indices", format!("{indices:?} must be strictly ascending and below {d}")));
    }
    let k = indices.len();
    let mut out = TransformMatrix::zeros(k);
    for (r, &i) in indices.iter().enumerate() {
        for (c, &j) in indices.iter().enumerate() {
            out.set(r, c, a.get(i, j));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn named_matrices() {
        assert_eq!(TransformMatrix::named(NamedMatrix::As).unwrap().rows(), vec![vec![1.0, 0.0], vec![0.0, -1.0]]);
        assert_eq!(TransformMatrix::named(NamedMatrix::J).unwrap().rows(), vec![vec![0.0, -1.0], vec![1.0, 0.0]]);
        assert_eq!(
            TransformMatrix::named(NamedMatrix::AsD(3)).unwrap(),
            TransformMatrix::diag(&[1.0, -1.0, -1.0])
        );
        assert!(TransformMatrix::named(NamedMatrix::AsD(1)).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(TransformMatrix::identity(3).classification(), Classification::Symmetric);
        assert_eq!(TransformMatrix::named(NamedMatrix::J).unwrap().classification(), Classification::Antisymmetric);
        let g = TransformMatrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert_eq!(g.classification(), Classification::General);
    }

    #[test]
    fn swap_matrix_eigensystem() {
        let a = TransformMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let e = symmetric_eigensystem(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.u.get(0, 0).abs() - r).abs() < 1e-15);
        assert!((e.u.get(1, 0) - e.u.get(0, 0)).abs() < 1e-15);
    }

    #[test]
    fn inverse_and_det() {
        let a = TransformMatrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        assert!((a.det() - 5.0).abs() < 1e-14);
        let inv = a.inverse().unwrap();
        assert!(a.matmul(&inv).max_abs_diff(&TransformMatrix::identity(2)) < 1e-15);
        assert!(TransformMatrix::zeros(2).inverse().is_err());
    }

    #[test]
    fn json_is_array_of_rows() {
        let j = TransformMatrix::named(NamedMatrix::J).unwrap();
        let s = serde_json::to_string(&j).unwrap();
        assert_eq!(s, "[[0.0,-1.0],[1.0,0.0]]");
        let back: TransformMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, j);
        assert!(serde_json::from_str::<TransformMatrix>("[[1.0],[2.0,3.0]]").is_err());
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut r = rng::stream(1, 2);
        for d in 1..=6 {
            assert!(TransformMatrix::random_orthogonal(d, &mut r).is_orthogonal(1e-13));
        }
    }

    #[test]
    fn antisymmetric_odd_dimension_has_zero_tail() {
        let mut r = rng::stream(4, 0);
        let a = TransformMatrix::random_antisymmetric(5, &mut r);
        let f = antisymmetric_canonical_form(&a).unwrap();
        assert!(f.zero_tail);
        assert_eq!(f.blocks.len(), 2);
        let resid = f.u.transpose().matmul(&a).matmul(&f.u).max_abs_diff(&f.block_matrix());
        assert!(resid < 1e-10, "{resid}");
    }
}
