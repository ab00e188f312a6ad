//! Dense exact linear algebra over a [`Field`].
//!
//! Vectors are rows. [`Subspace`] keeps a reduced row-echelon basis so that
//! equal subspaces compare equal structurally.

use serde_json::{json, Value};

use crate::gfield::{field_from_descriptor, Field, FieldDescriptor, FieldError, GaloisField};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LaError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("subspace is not contained in the larger one")]
    NotContained,
    #[error("vector is not in the span of the basis")]
    NotInSpan,
    #[error("malformed JSON payload: {0}")]
    Json(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Row<F> = Vec<<F as Field>::Elem>;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(field: &F, rows: usize, cols: usize, f: impl Fn(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { field: field.clone(), rows, cols, data }
    }

    pub fn from_rows(field: &F, cols: usize, rows: &[Row<F>]) -> Result<Self, LaError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LaError::DimMismatch(format!("row of length {} in {cols}-column matrix", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { field: field.clone(), rows: rows.len(), cols, data })
    }

    /// Matrix with integer entries mapped into the field.
    pub fn from_ints(field: &F, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(field, rows.len(), cols, |i, j| field.from_int(rows[i][j]))
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Row<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LaError> {
        if self.cols != other.rows {
            return Err(LaError::DimMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !f.is_zero(a) {
                    f.sub_scaled(dst, other.row(k), &f.neg(a));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[F::Elem]) -> Row<F> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.cols];
        for (k, a) in v.iter().enumerate() {
            if !f.is_zero(a) {
                f.sub_scaled(&mut out, self.row(k), &f.neg(a));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let mut m = self.clone();
        let f = m.field.clone();
        f.scale(&mut m.data, c);
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    /// Reduced row-echelon form, rank and pivot columns.
    pub fn rref(&self) -> (Self, usize, Vec<usize>) {
        let mut rows = self.row_vecs();
        let pivots = rref_rows(&self.field, &mut rows, self.cols);
        let rank = pivots.len();
        rows.resize(self.rows, vec![self.field.zero(); self.cols]);
        let m = Matrix::from_rows(&self.field, self.cols, &rows).expect("row lengths preserved");
        (m, rank, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.row_vecs();
        rref_rows(&self.field, &mut rows, self.cols).len()
    }

    /// Right kernel `{x : M x^T = 0}` as a subspace of row vectors.
    pub fn null_space(&self) -> Subspace<F> {
        let f = &self.field;
        let mut rows = self.row_vecs();
        let pivots = rref_rows(f, &mut rows, self.cols);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(&rows[r][free]);
            }
            basis.push(v);
        }
        Subspace::from_vectors(f, self.cols, basis)
    }

    /// Left kernel `{x : x M = 0}`.
    pub fn left_null_space(&self) -> Subspace<F> {
        self.transpose().null_space()
    }

    pub fn inverse(&self) -> Result<Self, LaError> {
        if self.rows != self.cols {
            return Err(LaError::DimMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let f = &self.field;
        let mut rows: Vec<Row<F>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
                r
            })
            .collect();
        let pivots = rref_rows(f, &mut rows, 2 * n);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LaError::Singular);
        }
        let inv: Vec<Row<F>> = rows.into_iter().map(|r| r[n..].to_vec()).collect();
        Matrix::from_rows(f, n, &inv)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows)
            .map(|i| Value::Array(self.row(i).iter().map(|x| self.field.elem_to_json(x)).collect()))
            .collect();
        Value::Array(rows)
    }

    pub fn from_json(field: &F, v: &Value) -> Result<Self, LaError> {
        let rows = v.as_array().ok_or_else(|| LaError::Json("matrix must be an array".into()))?;
        let parsed: Result<Vec<Row<F>>, LaError> = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| LaError::Json("matrix row must be an array".into()))?
                    .iter()
                    .map(|x| field.elem_from_json(x).map_err(LaError::from))
                    .collect()
            })
            .collect();
        let parsed = parsed?;
        let cols = parsed.first().map_or(0, |r| r.len());
        Matrix::from_rows(field, cols, &parsed)
    }
}

/// Gauss-Jordan elimination in place with first-nonzero pivoting.
/// Zero rows are dropped; returns the pivot columns.
pub fn rref_rows<F: Field>(f: &F, rows: &mut Vec<Row<F>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(&rows[r][c]).expect("pivot is nonzero");
        f.scale(&mut rows[r], &inv);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !f.is_zero(&row[c]) {
                let factor = row[c].clone();
                f.sub_scaled(row, &pivot_row, &factor);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Incrementally built basis in semi-echelon form.
///
/// Each stored row has a pivot entry equal to 1, and every row is zero at
/// the pivots of the rows inserted before it. Reducing a vector against the
/// rows in insertion order therefore clears all pivots.
#[derive(Clone, Debug)]
pub struct EchelonBasis<F: Field> {
    field: F,
    ambient: usize,
    rows: Vec<Row<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> EchelonBasis<F> {
    pub fn new(field: &F, ambient: usize) -> Self {
        EchelonBasis { field: field.clone(), ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rows(&self) -> &[Row<F>] {
        &self.rows
    }

    pub fn reduce(&self, v: &mut [F::Elem]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !self.field.is_zero(&v[p]) {
                let factor = v[p].clone();
                self.field.sub_scaled(v, row, &factor);
            }
        }
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| self.field.is_zero(x))
    }

    /// Adds `v` if it is independent; returns the normalized new row.
    pub fn insert(&mut self, v: &[F::Elem]) -> Option<&Row<F>> {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let p = w.iter().position(|x| !self.field.is_zero(x))?;
        let inv = self.field.inv(&w[p]).expect("nonzero");
        self.field.scale(&mut w, &inv);
        self.rows.push(w);
        self.pivots.push(p);
        self.rows.last()
    }

    pub fn to_subspace(&self) -> Subspace<F> {
        Subspace::from_vectors(&self.field, self.ambient, self.rows.clone())
    }
}

/// Subspace of `F^d` with canonical reduced row-echelon basis.
#[derive(Clone, Debug)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    basis: Vec<Row<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> PartialEq for Subspace<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.ambient == other.ambient && self.basis == other.basis
    }
}

impl<F: Field> Eq for Subspace<F> {}

impl<F: Field> std::hash::Hash for Subspace<F> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.basis.hash(state);
    }
}

impl<F: Field> PartialOrd for Subspace<F> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by dimension, then lexicographically by basis.
impl<F: Field> Ord for Subspace<F> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ambient, self.dim(), &self.basis).cmp(&(other.ambient, other.dim(), &other.basis))
    }
}

impl<F: Field> Subspace<F> {
    pub fn zero(field: &F, ambient: usize) -> Self {
        Subspace { field: field.clone(), ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![field.zero(); ambient];
                v[i] = field.one();
                v
            })
            .collect();
        Subspace { field: field.clone(), ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn from_vectors(field: &F, ambient: usize, mut vecs: Vec<Row<F>>) -> Self {
        debug_assert!(vecs.iter().all(|v| v.len() == ambient));
        let pivots = rref_rows(field, &mut vecs, ambient);
        Subspace { field: field.clone(), ambient, basis: vecs, pivots }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn basis(&self) -> &[Row<F>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_matrix(&self) -> Matrix<F> {
        Matrix::from_rows(&self.field, self.ambient, &self.basis).expect("basis rows have ambient length")
    }

    fn check(&self, other: &Self) -> Result<(), LaError> {
        if self.ambient != other.ambient {
            return Err(LaError::DimMismatch(format!("ambient {} vs {}", self.ambient, other.ambient)));
        }
        Ok(())
    }

    /// Residual of `v` after clearing the pivot columns.
    pub fn reduce(&self, v: &[F::Elem]) -> Row<F> {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !self.field.is_zero(&w[p]) {
                let factor = w[p].clone();
                self.field.sub_scaled(&mut w, row, &factor);
            }
        }
        w
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(|x| self.field.is_zero(x))
    }

    /// Coordinates of `v` relative to the canonical basis.
    pub fn coordinates(&self, v: &[F::Elem]) -> Result<Row<F>, LaError> {
        if !self.contains(v) {
            return Err(LaError::NotInSpan);
        }
        Ok(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        self.ambient == other.ambient && other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Self) -> Result<Self, LaError> {
        self.check(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Ok(Self::from_vectors(&self.field, self.ambient, rows))
    }

    /// Zassenhaus: reduce `[[a|a],[b|0]]`; rows with zero left half carry the
    /// intersection in their right half.
    pub fn intersect(&self, other: &Self) -> Result<Self, LaError> {
        self.check(other)?;
        let d = self.ambient;
        let f = &self.field;
        let mut rows: Vec<Row<F>> = Vec::with_capacity(self.dim() + other.dim());
        for a in &self.basis {
            let mut r = a.clone();
            r.extend_from_slice(a);
            rows.push(r);
        }
        for b in &other.basis {
            let mut r = b.clone();
            r.extend(std::iter::repeat_n(f.zero(), d));
            rows.push(r);
        }
        let pivots = rref_rows(f, &mut rows, 2 * d);
        let inter: Vec<Row<F>> = rows
            .into_iter()
            .zip(pivots)
            .filter(|(_, p)| *p >= d)
            .map(|(r, _)| r[d..].to_vec())
            .collect();
        Ok(Self::from_vectors(f, d, inter))
    }

    /// `dim self - dim sub`, requiring `sub ⊆ self`.
    pub fn quotient_dim(&self, sub: &Self) -> Result<usize, LaError> {
        self.check(sub)?;
        if !self.contains_subspace(sub) {
            return Err(LaError::NotContained);
        }
        Ok(self.dim() - sub.dim())
    }

    /// Basis vectors of `self` completing a basis of `sub`, in canonical order.
    pub fn coset_representatives(&self, sub: &Self) -> Result<Vec<Row<F>>, LaError> {
        self.quotient_dim(sub)?;
        let mut eb = EchelonBasis::new(&self.field, self.ambient);
        for v in &sub.basis {
            eb.insert(v);
        }
        let mut reps = Vec::new();
        for v in &self.basis {
            if eb.insert(v).is_some() {
                reps.push(v.clone());
            }
        }
        Ok(reps)
    }

    /// Image of the subspace under `v -> f(v)`.
    pub fn map(&self, f: impl Fn(&[F::Elem]) -> Row<F>, target_dim: usize) -> Self {
        let rows = self.basis.iter().map(|v| f(v)).collect();
        Self::from_vectors(&self.field, target_dim, rows)
    }

    /// Annihilator `{x : <x, s> = 0 for all s}` with the standard pairing.
    pub fn annihilator(&self) -> Self {
        if self.basis.is_empty() {
            return Self::full(&self.field, self.ambient);
        }
        self.basis_matrix().null_space()
    }
}

impl Subspace<GaloisField> {
    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field.descriptor(),
            "ambient": self.ambient,
            "basis": self.basis,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, LaError> {
        let desc: FieldDescriptor = serde_json::from_value(v["field"].clone())
            .map_err(|e| LaError::Json(e.to_string()))?;
        let field = field_from_descriptor(&desc)?;
        let ambient = v["ambient"].as_u64().ok_or_else(|| LaError::Json("missing ambient".into()))? as usize;
        let basis = Matrix::from_json(&field, &v["basis"])?;
        if basis.rows() > 0 && basis.cols() != ambient {
            return Err(LaError::Json("basis width differs from ambient".into()));
        }
        Ok(Subspace::from_vectors(&field, ambient, basis.row_vecs()))
    }
}

/// Coordinates relative to a fixed ordered (not necessarily echelon) basis.
#[derive(Clone, Debug)]
pub struct CoordinateSolver<F: Field> {
    field: F,
    k: usize,
    reduced: Vec<Row<F>>,
    transform: Vec<Row<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> CoordinateSolver<F> {
    /// `basis` must be linearly independent.
    pub fn new(field: &F, ambient: usize, basis: &[Row<F>]) -> Result<Self, LaError> {
        let k = basis.len();
        let mut rows: Vec<Row<F>> = basis
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut r = b.clone();
                r.extend((0..k).map(|j| if i == j { field.one() } else { field.zero() }));
                r
            })
            .collect();
        let pivots = rref_rows(field, &mut rows, ambient + k);
        if pivots.len() < k || pivots[k - 1] >= ambient {
            return Err(LaError::Singular);
        }
        let reduced = rows.iter().map(|r| r[..ambient].to_vec()).collect();
        let transform = rows.iter().map(|r| r[ambient..].to_vec()).collect();
        Ok(CoordinateSolver { field: field.clone(), k, reduced, transform, pivots })
    }

    /// `c` with `v = sum c_i basis_i`.
    pub fn solve(&self, v: &[F::Elem]) -> Result<Row<F>, LaError> {
        let f = &self.field;
        let x: Row<F> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut check = v.to_vec();
        for (xi, r) in x.iter().zip(&self.reduced) {
            f.sub_scaled(&mut check, r, xi);
        }
        if !check.iter().all(|e| f.is_zero(e)) {
            return Err(LaError::NotInSpan);
        }
        let mut c = vec![f.zero(); self.k];
        for (xi, t) in x.iter().zip(&self.transform) {
            f.sub_scaled(&mut c, t, &f.neg(xi));
        }
        Ok(c)
    }
}

/// Invertible matrix with cached inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<F: Field> {
    mat: Matrix<F>,
    inv: Matrix<F>,
}

impl<F: Field> GroupElement<F> {
    pub fn new(mat: Matrix<F>) -> Result<Self, LaError> {
        let inv = mat.inverse()?;
        Ok(GroupElement { mat, inv })
    }

    /// Uses a supplied inverse after checking `mat * inv = I`.
    pub fn with_inverse(mat: Matrix<F>, inv: Matrix<F>) -> Result<Self, LaError> {
        let prod = mat.mul(&inv)?;
        if prod != Matrix::identity(mat.field(), mat.rows()) {
            return Err(LaError::Singular);
        }
        Ok(GroupElement { mat, inv })
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let id = Matrix::identity(field, n);
        GroupElement { mat: id.clone(), inv: id }
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &Matrix<F> {
        &self.mat
    }

    pub fn inv(&self) -> &Matrix<F> {
        &self.inv
    }

    pub fn inverse(&self) -> Self {
        GroupElement { mat: self.inv.clone(), inv: self.mat.clone() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        GroupElement {
            mat: self.mat.mul(&other.mat).expect("same size"),
            inv: other.inv.mul(&self.inv).expect("same size"),
        }
    }

    /// `g v` for a column coordinate vector `v`.
    pub fn apply(&self, v: &[F::Elem]) -> Row<F> {
        let f = self.mat.field();
        (0..self.n())
            .map(|i| {
                let mut acc = f.zero();
                for (j, x) in v.iter().enumerate() {
                    acc = f.add(&acc, &f.mul(self.mat.get(i, j), x));
                }
                acc
            })
            .collect()
    }

    pub fn apply_inv(&self, v: &[F::Elem]) -> Row<F> {
        self.inverse().apply(v)
    }
}
