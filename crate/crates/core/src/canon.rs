//! The canonical G-submodules of `Λ`.
//!
//! Each module has two independent constructions: a list of sparse linear
//! conditions (its defining relations) and an explicit basis or intersection.
//! Tests assert that the two agree.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::exactla::{Matrix, Row, Subspace};
use crate::gfield::{char_divides, Field, GaloisField};
use crate::report::{Claim, Status};
use crate::structvec::{flat, tr, tr_op, DualVector, StructureVector, SvError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonError {
    #[error("structure vector is not in M**")]
    NotInMstarstar,
    #[error("projective point (0,0) is not allowed")]
    ZeroPoint,
    #[error("unknown module name {0:?}")]
    UnknownModule(String),
    #[error("cannot parse structure vector {0:?}")]
    BadVector(String),
    #[error(transparent)]
    Sv(#[from] SvError),
}

/// Names of the canonical submodules. `MstarP` carries an integer label
/// that is reduced into the field when the module is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModuleId {
    Zero,
    C,
    K,
    Mstar,
    MstarP(i64, i64),
    Mstarstar,
    T,
    Ttilde,
    TcapTtilde,
    N,
    U,
    Lambda,
}

impl fmt::Display for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleId::Zero => write!(f, "0"),
            ModuleId::C => write!(f, "C"),
            ModuleId::K => write!(f, "K"),
            ModuleId::Mstar => write!(f, "Mstar"),
            ModuleId::MstarP(a, d) => write!(f, "Mstar({a},{d})"),
            ModuleId::Mstarstar => write!(f, "Mstarstar"),
            ModuleId::T => write!(f, "T"),
            ModuleId::Ttilde => write!(f, "Ttilde"),
            ModuleId::TcapTtilde => write!(f, "TcapTtilde"),
            ModuleId::N => write!(f, "N"),
            ModuleId::U => write!(f, "U"),
            ModuleId::Lambda => write!(f, "Lambda"),
        }
    }
}

impl FromStr for ModuleId {
    type Err = CanonError;

    /// Accepts `MstarP:a,d` and `Mstar(a,d)` for the points of `M*`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || CanonError::UnknownModule(s.to_string());
        let point = |body: &str| -> Result<ModuleId, CanonError> {
            let (a, d) = body.split_once(',').ok_or_else(bad)?;
            let a = a.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            Ok(ModuleId::MstarP(a, d))
        };
        if let Some(body) = t.strip_prefix("MstarP:") {
            return point(body);
        }
        if let Some(body) = t.strip_prefix("Mstar(").and_then(|r| r.strip_suffix(')')) {
            return point(body);
        }
        Ok(match t {
            "0" | "Zero" => ModuleId::Zero,
            "C" => ModuleId::C,
            "K" => ModuleId::K,
            "Mstar" | "M*" => ModuleId::Mstar,
            "Mstarstar" | "M**" => ModuleId::Mstarstar,
            "T" => ModuleId::T,
            "Ttilde" => ModuleId::Ttilde,
            "TcapTtilde" => ModuleId::TcapTtilde,
            "N" => ModuleId::N,
            "U" => ModuleId::U,
            "Lambda" => ModuleId::Lambda,
            _ => return Err(bad()),
        })
    }
}

/// Point `(P_α : P_δ)` of the projective line, first nonzero entry 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint<E> {
    pub alpha: E,
    pub delta: E,
}

impl<E: Clone + PartialEq> ProjectivePoint<E> {
    pub fn new<F: Field<Elem = E>>(field: &F, alpha: E, delta: E) -> Result<Self, CanonError> {
        if field.is_zero(&alpha) {
            if field.is_zero(&delta) {
                return Err(CanonError::ZeroPoint);
            }
            return Ok(ProjectivePoint { alpha, delta: field.one() });
        }
        let inv = field.inv(&alpha).expect("nonzero");
        Ok(ProjectivePoint { alpha: field.one(), delta: field.mul(&delta, &inv) })
    }

    pub fn from_ints<F: Field<Elem = E>>(field: &F, a: i64, d: i64) -> Result<Self, CanonError> {
        Self::new(field, field.from_int(a), field.from_int(d))
    }

    /// `(1,x)` for every `x` in enumeration order, then `(0,1)`.
    pub fn all<F: Field<Elem = E>>(field: &F) -> Vec<Self> {
        let mut out: Vec<Self> = field
            .enumerate()
            .unwrap_or_default()
            .into_iter()
            .map(|x| ProjectivePoint { alpha: field.one(), delta: x })
            .collect();
        out.push(ProjectivePoint { alpha: field.zero(), delta: field.one() });
        out
    }
}

impl ProjectivePoint<u32> {
    pub fn label(&self) -> String {
        format!("Mstar({},{})", self.alpha, self.delta)
    }
}

/// Sparse linear functional on `Λ`, as `(flat index, coefficient)` pairs.
pub type Condition<F> = Vec<(usize, <F as Field>::Elem)>;

fn cond<F: Field>(field: &F, terms: &[(usize, i64)]) -> Condition<F> {
    terms.iter().map(|&(i, c)| (i, field.from_int(c))).collect()
}

fn distinct_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
}

fn distinct_triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    distinct_pairs(n).flat_map(move |(i, j)| (1..=n).filter(move |&k| k != i && k != j).map(move |k| (i, j, k)))
}

pub fn conditions_c<F: Field>(field: &F, n: usize) -> Vec<Condition<F>> {
    let mut out = Vec::new();
    for (i, j) in distinct_pairs(n).filter(|(i, j)| i < j) {
        for k in 1..=n {
            out.push(cond(field, &[(flat(n, i, j, k), 1), (flat(n, j, i, k), -1)]));
        }
    }
    out
}

pub fn conditions_k<F: Field>(field: &F, n: usize) -> Vec<Condition<F>> {
    let mut out = Vec::new();
    for i in 1..=n {
        for k in 1..=n {
            out.push(cond(field, &[(flat(n, i, i, k), 1)]));
        }
    }
    for (i, j) in distinct_pairs(n).filter(|(i, j)| i < j) {
        for k in 1..=n {
            out.push(cond(field, &[(flat(n, i, j, k), 1), (flat(n, j, i, k), 1)]));
        }
    }
    out
}

pub fn conditions_mstar<F: Field>(field: &F, n: usize) -> Vec<Condition<F>> {
    let mut out = Vec::new();
    for (i, j) in distinct_pairs(n) {
        out.push(cond(field, &[(flat(n, i, i, j), 1)]));
        out.push(cond(field, &[(flat(n, i, i, i), 1), (flat(n, i, j, j), -1), (flat(n, j, i, j), -1)]));
    }
    for (i, j, k) in distinct_triples(n) {
        out.push(cond(field, &[(flat(n, i, j, k), 1)]));
        out.push(cond(field, &[(flat(n, i, j, j), 1), (flat(n, i, k, k), -1)]));
        out.push(cond(field, &[(flat(n, j, i, j), 1), (flat(n, k, i, k), -1)]));
    }
    out
}

pub fn conditions_mstarstar<F: Field>(field: &F, n: usize) -> Vec<Condition<F>> {
    let mut out = Vec::new();
    for (i, j, k) in distinct_triples(n).filter(|(i, j, _)| i < j) {
        out.push(cond(field, &[(flat(n, i, j, k), 1), (flat(n, j, i, k), 1)]));
    }
    for (i, j) in distinct_pairs(n) {
        out.push(cond(field, &[(flat(n, i, i, j), 1)]));
        out.push(cond(field, &[(flat(n, i, j, i), 1), (flat(n, j, i, i), 1), (flat(n, j, j, j), -1)]));
    }
    out
}

pub fn conditions_t<F: Field>(field: &F, n: usize) -> Vec<Condition<F>> {
    (1..=n)
        .map(|i| (1..=n).map(|j| (flat(n, i, j, j), field.one())).collect())
        .collect()
}

pub fn conditions_ttilde<F: Field>(field: &F, n: usize) -> Vec<Condition<F>> {
    (1..=n)
        .map(|i| (1..=n).map(|j| (flat(n, j, i, j), field.one())).collect())
        .collect()
}

/// `M*` relations plus `P_δ α_a - P_α δ_a = 0`, reading `α_a` off `λ_{i a i}`
/// and `δ_a` off `λ_{a j j}` for fixed `i, j ≠ a`.
pub fn conditions_mstar_p<F: Field>(field: &F, n: usize, p: &ProjectivePoint<F::Elem>) -> Vec<Condition<F>> {
    let mut out = conditions_mstar(field, n);
    for a in 1..=n {
        let other = if a == 1 { 2 } else { 1 };
        out.push(vec![
            (flat(n, other, a, other), p.delta.clone()),
            (flat(n, a, other, other), field.neg(&p.alpha)),
        ]);
    }
    out
}

fn conditions_for<F: Field>(field: &F, n: usize, id: ModuleId) -> Result<Vec<Condition<F>>, CanonError> {
    let cat = |mut a: Vec<Condition<F>>, b: Vec<Condition<F>>| {
        a.extend(b);
        a
    };
    Ok(match id {
        ModuleId::Zero => (0..n * n * n).map(|i| vec![(i, field.one())]).collect(),
        ModuleId::Lambda => Vec::new(),
        ModuleId::C => conditions_c(field, n),
        ModuleId::K => conditions_k(field, n),
        ModuleId::Mstar => conditions_mstar(field, n),
        ModuleId::MstarP(a, d) => conditions_mstar_p(field, n, &ProjectivePoint::from_ints(field, a, d)?),
        ModuleId::Mstarstar => conditions_mstarstar(field, n),
        ModuleId::T => conditions_t(field, n),
        ModuleId::Ttilde => conditions_ttilde(field, n),
        ModuleId::TcapTtilde => cat(conditions_t(field, n), conditions_ttilde(field, n)),
        ModuleId::N => cat(conditions_c(field, n), conditions_t(field, n)),
        ModuleId::U => cat(conditions_k(field, n), conditions_t(field, n)),
    })
}

fn eval_condition<F: Field>(field: &F, c: &Condition<F>, coords: &[F::Elem]) -> F::Elem {
    c.iter().fold(field.zero(), |acc, (i, a)| field.add(&acc, &field.mul(a, &coords[*i])))
}

/// Membership by the defining relations.
pub fn predicate<F: Field>(id: ModuleId, lambda: &StructureVector<F>) -> Result<bool, CanonError> {
    let f = lambda.field();
    let conds = conditions_for(f, lambda.n(), id)?;
    Ok(conds.iter().all(|c| f.is_zero(&eval_condition(f, c, lambda.coords()))))
}

pub fn predicate_c<F: Field>(lambda: &StructureVector<F>) -> bool {
    predicate(ModuleId::C, lambda).expect("no point to normalize")
}

pub fn predicate_k<F: Field>(lambda: &StructureVector<F>) -> bool {
    predicate(ModuleId::K, lambda).expect("no point to normalize")
}

pub fn predicate_mstar<F: Field>(lambda: &StructureVector<F>) -> bool {
    predicate(ModuleId::Mstar, lambda).expect("no point to normalize")
}

pub fn predicate_mstarstar<F: Field>(lambda: &StructureVector<F>) -> bool {
    predicate(ModuleId::Mstarstar, lambda).expect("no point to normalize")
}

/// Null space of the condition matrix.
pub fn by_conditions<F: Field>(field: &F, n: usize, id: ModuleId) -> Result<Subspace<F>, CanonError> {
    let d = n * n * n;
    let conds = conditions_for(field, n, id)?;
    if conds.is_empty() {
        return Ok(Subspace::full(field, d));
    }
    let mut m = Matrix::zeros(field, conds.len(), d);
    for (r, c) in conds.iter().enumerate() {
        for (i, a) in c {
            let cur = m.get(r, *i).clone();
            m.set(r, *i, field.add(&cur, a));
        }
    }
    Ok(m.null_space())
}

fn vecs<F: Field>(field: &F, n: usize, terms: Vec<Vec<((usize, usize, usize), i64)>>) -> Vec<Row<F>> {
    terms
        .into_iter()
        .map(|t| StructureVector::from_terms(field, n, &t).expect("indices in range").into_coords())
        .collect()
}

pub fn basis_c<F: Field>(field: &F, n: usize) -> Subspace<F> {
    let mut t = Vec::new();
    for i in 1..=n {
        t.push(vec![((i, i, i), 1)]);
    }
    for (i, j) in distinct_pairs(n) {
        t.push(vec![((i, i, j), 1)]);
        if i < j {
            t.push(vec![((i, j, i), 1), ((j, i, i), 1)]);
            t.push(vec![((j, i, j), 1), ((i, j, j), 1)]);
        }
    }
    for (i, j, k) in distinct_triples(n).filter(|(i, j, _)| i < j) {
        t.push(vec![((i, j, k), 1), ((j, i, k), 1)]);
    }
    Subspace::from_vectors(field, n * n * n, vecs(field, n, t))
}

pub fn basis_k<F: Field>(field: &F, n: usize) -> Subspace<F> {
    Subspace::from_vectors(field, n * n * n, k_basis_rows(field, n))
}

fn k_basis_rows<F: Field>(field: &F, n: usize) -> Vec<Row<F>> {
    let mut t = Vec::new();
    for (i, j) in distinct_pairs(n).filter(|(i, j)| i < j) {
        t.push(vec![((i, j, i), 1), ((j, i, i), -1)]);
        t.push(vec![((j, i, j), 1), ((i, j, j), -1)]);
    }
    for (i, j, k) in distinct_triples(n).filter(|(i, j, _)| i < j) {
        t.push(vec![((i, j, k), 1), ((j, i, k), -1)]);
    }
    vecs(field, n, t)
}

/// `ε_a = Σ_i iai`.
pub fn epsilon<F: Field>(field: &F, n: usize, a: usize) -> StructureVector<F> {
    let t: Vec<_> = (1..=n).map(|i| ((i, a, i), 1)).collect();
    StructureVector::from_terms(field, n, &t).expect("indices in range")
}

/// `ε̃_a = Σ_j ajj`.
pub fn epsilon_tilde<F: Field>(field: &F, n: usize, a: usize) -> StructureVector<F> {
    let t: Vec<_> = (1..=n).map(|j| ((a, j, j), 1)).collect();
    StructureVector::from_terms(field, n, &t).expect("indices in range")
}

/// Structure vector of `[u,v] = α(v)u + δ(u)v`.
pub fn mu_alpha_delta<F: Field>(field: &F, alpha: &[F::Elem], delta: &[F::Elem]) -> Result<StructureVector<F>, CanonError> {
    let n = alpha.len();
    if delta.len() != n {
        return Err(SvError::SizeMismatch("covector lengths differ".into()).into());
    }
    let mut out = StructureVector::zero(field, n);
    for i in 1..=n {
        for j in 1..=n {
            let a = field.add(out.get(i, j, i)?, &alpha[j - 1]);
            out.set(i, j, i, a)?;
            let d = field.add(out.get(i, j, j)?, &delta[i - 1]);
            out.set(i, j, j, d)?;
        }
    }
    Ok(out)
}

pub fn basis_mstar<F: Field>(field: &F, n: usize) -> Subspace<F> {
    let rows = (1..=n)
        .flat_map(|a| [epsilon(field, n, a).into_coords(), epsilon_tilde(field, n, a).into_coords()])
        .collect();
    Subspace::from_vectors(field, n * n * n, rows)
}

pub fn basis_mstar_p<F: Field>(field: &F, n: usize, p: &ProjectivePoint<F::Elem>) -> Subspace<F> {
    let rows = (1..=n)
        .map(|i| {
            epsilon(field, n, i)
                .scale(&p.alpha)
                .add(&epsilon_tilde(field, n, i).scale(&p.delta))
                .expect("same shape")
                .into_coords()
        })
        .collect();
    Subspace::from_vectors(field, n * n * n, rows)
}

/// `ω_i = λ_iii` on `M**`.
pub fn omega<F: Field>(lambda: &StructureVector<F>) -> Result<DualVector<F>, CanonError> {
    if !predicate_mstarstar(lambda) {
        return Err(CanonError::NotInMstarstar);
    }
    Ok(omega_unchecked(lambda))
}

pub(crate) fn omega_unchecked<F: Field>(lambda: &StructureVector<F>) -> DualVector<F> {
    (1..=lambda.n()).map(|i| lambda.at(i, i, i).clone()).collect()
}

/// `λ_iii = μ_i`, `λ_iji = μ_j` for `i ≠ j`.
pub fn omega_preimage<F: Field>(field: &F, mu: &[F::Elem]) -> StructureVector<F> {
    let n = mu.len();
    let mut out = StructureVector::zero(field, n);
    for i in 1..=n {
        out.set(i, i, i, mu[i - 1].clone()).expect("in range");
        for j in (1..=n).filter(|&j| j != i) {
            out.set(i, j, i, mu[j - 1].clone()).expect("in range");
        }
    }
    out
}

pub fn basis_mstarstar<F: Field>(field: &F, n: usize) -> Subspace<F> {
    let mut rows = k_basis_rows(field, n);
    for i in 1..=n {
        let mut mu = vec![field.zero(); n];
        mu[i - 1] = field.one();
        rows.push(omega_preimage(field, &mu).into_coords());
    }
    Subspace::from_vectors(field, n * n * n, rows)
}

/// Units `ijk` with `j ≠ k`, and `ijj - i11` for `j > 1`.
pub fn basis_t<F: Field>(field: &F, n: usize) -> Subspace<F> {
    let mut t = Vec::new();
    for i in 1..=n {
        for (j, k) in distinct_pairs(n) {
            t.push(vec![((i, j, k), 1)]);
        }
        for j in 2..=n {
            t.push(vec![((i, j, j), 1), ((i, 1, 1), -1)]);
        }
    }
    Subspace::from_vectors(field, n * n * n, vecs(field, n, t))
}

/// Units `aic` with `a ≠ c`, and `jij - 1i1` for `j > 1`.
pub fn basis_ttilde<F: Field>(field: &F, n: usize) -> Subspace<F> {
    let mut t = Vec::new();
    for i in 1..=n {
        for (a, c) in distinct_pairs(n) {
            t.push(vec![((a, i, c), 1)]);
        }
        for j in 2..=n {
            t.push(vec![((j, i, j), 1), ((1, i, 1), -1)]);
        }
    }
    Subspace::from_vectors(field, n * n * n, vecs(field, n, t))
}

/// The table `ijk + jik`, `iij`, `ijj + jij - iii`.
pub fn basis_n<F: Field>(field: &F, n: usize) -> Subspace<F> {
    let mut t = Vec::new();
    for (i, j, k) in distinct_triples(n).filter(|(i, j, _)| i < j) {
        t.push(vec![((i, j, k), 1), ((j, i, k), 1)]);
    }
    for (i, j) in distinct_pairs(n) {
        t.push(vec![((i, i, j), 1)]);
        t.push(vec![((i, j, j), 1), ((j, i, j), 1), ((i, i, i), -1)]);
    }
    Subspace::from_vectors(field, n * n * n, vecs(field, n, t))
}

/// Explicit or intersection construction of a named module.
pub fn build<F: Field>(field: &F, n: usize, id: ModuleId) -> Result<Subspace<F>, CanonError> {
    let d = n * n * n;
    let inter = |a: Subspace<F>, b: Subspace<F>| a.intersect(&b).expect("same ambient");
    Ok(match id {
        ModuleId::Zero => Subspace::zero(field, d),
        ModuleId::Lambda => Subspace::full(field, d),
        ModuleId::C => basis_c(field, n),
        ModuleId::K => basis_k(field, n),
        ModuleId::Mstar => basis_mstar(field, n),
        ModuleId::MstarP(a, dd) => basis_mstar_p(field, n, &ProjectivePoint::from_ints(field, a, dd)?),
        ModuleId::Mstarstar => basis_mstarstar(field, n),
        ModuleId::T => basis_t(field, n),
        ModuleId::Ttilde => basis_ttilde(field, n),
        ModuleId::TcapTtilde => inter(basis_t(field, n), basis_ttilde(field, n)),
        ModuleId::N => basis_n(field, n),
        ModuleId::U => inter(basis_k(field, n), basis_t(field, n)),
    })
}

/// Closed-form dimension, in integer arithmetic.
pub fn expected_dim(n: usize, id: ModuleId) -> usize {
    let (n1, n2, n3) = (n, n * n, n * n * n);
    match id {
        ModuleId::Zero => 0,
        ModuleId::Lambda => n3,
        ModuleId::C => (n3 + n2) / 2,
        ModuleId::K => (n3 - n2) / 2,
        ModuleId::Mstar => 2 * n1,
        ModuleId::MstarP(..) => n1,
        ModuleId::Mstarstar => (n3 - n2) / 2 + n1,
        ModuleId::T | ModuleId::Ttilde => n3 - n1,
        ModuleId::TcapTtilde => n3 - 2 * n1,
        ModuleId::N => (n3 + n2) / 2 - n1,
        ModuleId::U => (n3 - n2) / 2 - n1,
    }
}

/// The modules of the dimension table, in display order.
pub const TABLE_MODULES: [ModuleId; 9] = [
    ModuleId::C,
    ModuleId::K,
    ModuleId::Mstar,
    ModuleId::Mstarstar,
    ModuleId::T,
    ModuleId::Ttilde,
    ModuleId::TcapTtilde,
    ModuleId::N,
    ModuleId::U,
];

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalSubmodule<F: Field> {
    pub id: ModuleId,
    pub n: usize,
    pub subspace: Subspace<F>,
}

impl<F: Field> CanonicalSubmodule<F> {
    pub fn new(field: &F, n: usize, id: ModuleId) -> Result<Self, CanonError> {
        Ok(CanonicalSubmodule { id, n, subspace: build(field, n, id)? })
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn contains(&self, lambda: &StructureVector<F>) -> bool {
        self.subspace.contains(lambda.coords())
    }
}

/// `η = 123 - 213`.
pub fn eta<F: Field>(field: &F, n: usize) -> StructureVector<F> {
    StructureVector::from_terms(field, n, &[((1, 2, 3), 1), ((2, 1, 3), -1)]).expect("n >= 3")
}

/// `δ = 112`.
pub fn delta<F: Field>(field: &F, n: usize) -> StructureVector<F> {
    StructureVector::unit(field, n, 1, 1, 2).expect("n >= 2")
}

/// `λ_111 = 1, λ_212 = -1, λ_122 = 2, λ_1jj = 1 (j > 2)`: lies in `T̃ ∩ M**`
/// and fails `tr_1 = 0` unless `n + 1 = 0`.
pub fn trace_witness<F: Field>(field: &F, n: usize) -> StructureVector<F> {
    let mut t = vec![((1, 1, 1), 1), ((2, 1, 2), -1), ((1, 2, 2), 2)];
    t.extend((3..=n).map(|j| ((1, j, j), 1)));
    StructureVector::from_terms(field, n, &t).expect("in range")
}

/// Image of `S` under a linear map `Λ → V̂`, as a subspace of `F^n`.
pub fn functional_image<F: Field>(s: &Subspace<F>, n: usize, map: impl Fn(&StructureVector<F>) -> DualVector<F>) -> Subspace<F> {
    let f = s.field();
    let rows = s
        .basis()
        .iter()
        .map(|v| map(&StructureVector::from_coords(f, n, v.clone()).expect("ambient n^3")))
        .collect();
    Subspace::from_vectors(f, n, rows)
}

/// Kernel of a linear map `Λ → V̂` restricted to `S`.
pub fn functional_kernel<F: Field>(s: &Subspace<F>, n: usize, map: impl Fn(&StructureVector<F>) -> DualVector<F>) -> Subspace<F> {
    let f = s.field();
    let k = s.dim();
    if k == 0 {
        return s.clone();
    }
    // Columns = images of basis vectors; kernel coefficients x with x·Img = 0.
    let images: Vec<Row<F>> = s
        .basis()
        .iter()
        .map(|v| map(&StructureVector::from_coords(f, n, v.clone()).expect("ambient n^3")))
        .collect();
    let img = Matrix::from_rows(f, n, &images).expect("n columns");
    let coeffs = img.left_null_space();
    let rows = coeffs
        .basis()
        .iter()
        .map(|x| {
            let mut v = vec![f.zero(); s.ambient()];
            for (xi, b) in x.iter().zip(s.basis()) {
                f.sub_scaled(&mut v, b, &f.neg(xi));
            }
            v
        })
        .collect();
    Subspace::from_vectors(f, s.ambient(), rows)
}

fn module(field: &GaloisField, n: usize, id: ModuleId) -> Subspace<GaloisField> {
    build(field, n, id).expect("integer points are valid after normalization")
}

fn mstar_point(field: &GaloisField, n: usize, a: i64, d: i64) -> Subspace<GaloisField> {
    let p = ProjectivePoint::from_ints(field, a, d).expect("nonzero point");
    basis_mstar_p(field, n, &p)
}

fn point_label(field: &GaloisField, a: i64, d: i64) -> String {
    let p = ProjectivePoint::from_ints(field, a, d).expect("nonzero point");
    format!("Mstar{:?}", (a, d)).replace(' ', "") + &format!(" = {}", p.label())
}

pub fn field_label(field: &GaloisField) -> String {
    field.descriptor().to_string()
}

/// Reason string for suites that need more than two field elements.
pub const SMALL_FIELD: &str = "|F| > 2 required";

/// Every intersection claim with `M*` and `M**`, branching on the
/// characteristic exactly as the case analysis requires.
pub fn intersection_table(n: usize, field: &GaloisField) -> Vec<Claim> {
    const A: &str = "intersections";
    let tag = |s: &str| format!("{s} [n={n}, {}]", field_label(field));
    if field.size() <= 2 {
        return vec![Claim::skipped(tag("intersection table"), A, SMALL_FIELD)];
    }
    let p = field.characteristic();
    let ni = n as i64;
    let m = |id| module(field, n, id);
    let c = m(ModuleId::C);
    let k = m(ModuleId::K);
    let ms = m(ModuleId::Mstar);
    let mss = m(ModuleId::Mstarstar);
    let t = m(ModuleId::T);
    let tt = m(ModuleId::Ttilde);
    let tct = m(ModuleId::TcapTtilde);
    let nn = m(ModuleId::N);
    let u = m(ModuleId::U);
    let zero = m(ModuleId::Zero);
    let i = |a: &Subspace<GaloisField>, b: &Subspace<GaloisField>| a.intersect(b).expect("same ambient");
    let s = |a: &Subspace<GaloisField>, b: &Subspace<GaloisField>| a.sum(b).expect("same ambient");
    let mut out = Vec::new();
    let eq = |name: String, want: &Subspace<GaloisField>, got: &Subspace<GaloisField>| {
        Claim::subspace_eq(tag(&name), A, want, got)
    };

    out.push(eq(format!("C ∩ M* = {}", point_label(field, 1, 1)), &mstar_point(field, n, 1, 1), &i(&c, &ms)));
    out.push(eq(format!("K ∩ M* = {}", point_label(field, 1, -1)), &mstar_point(field, n, 1, -1), &i(&k, &ms)));
    out.push(eq(format!("T ∩ M* = {}", point_label(field, -ni, 1)), &mstar_point(field, n, -ni, 1), &i(&t, &ms)));
    out.push(eq(format!("T~ ∩ M* = {}", point_label(field, 1, -ni)), &mstar_point(field, n, 1, -ni), &i(&tt, &ms)));
    if char_divides(p, ni - 1) {
        out.push(eq("U ∩ M* = Mstar(1,-1) (char | n-1)".into(), &mstar_point(field, n, 1, -1), &i(&u, &ms)));
    } else {
        out.push(eq("U ∩ M* = 0 (char ∤ n-1)".into(), &zero, &i(&u, &ms)));
    }
    if char_divides(p, ni + 1) {
        out.push(eq("N ∩ M* = Mstar(1,1) (char | n+1)".into(), &mstar_point(field, n, 1, 1), &i(&nn, &ms)));
    } else {
        out.push(eq("N ∩ M* = 0 (char ∤ n+1)".into(), &zero, &i(&nn, &ms)));
    }
    out.push(eq("M* ⊆ M**".into(), &mss, &s(&mss, &ms)));
    out.push(eq("K ⊆ M**".into(), &mss, &s(&mss, &k)));
    if p == 2 {
        out.push(eq("C ∩ M** = K (char 2)".into(), &k, &i(&c, &mss)));
        out.push(eq("N ∩ M** = U (char 2)".into(), &u, &i(&nn, &mss)));
        out.push(Claim::compare(
            tag("dim(N + M**) = n³/2 + n²/2 + n (char 2)"),
            A,
            json!((n * n * n + n * n) / 2 + n),
            json!(s(&nn, &mss).dim()),
        ));
        out.push(eq("K ⊆ C (char 2)".into(), &c, &s(&c, &k)));
    } else {
        out.push(eq("C ∩ M** = C ∩ M* = Mstar(1,1)".into(), &mstar_point(field, n, 1, 1), &i(&c, &mss)));
        out.push(eq("C ∩ M** = C ∩ M*".into(), &i(&c, &ms), &i(&c, &mss)));
        if char_divides(p, ni + 1) {
            out.push(eq("N ∩ M** = Mstar(1,1) (char | n+1)".into(), &mstar_point(field, n, 1, 1), &i(&nn, &mss)));
        } else {
            out.push(eq("N ∩ M** = 0 (char ∤ n+1)".into(), &zero, &i(&nn, &mss)));
        }
        out.push(eq("C ⊕ K = Λ".into(), &m(ModuleId::Lambda), &s(&c, &k)));
        out.push(eq("C ∩ K = 0".into(), &zero, &i(&c, &k)));
        out.push(eq("T ∩ T~ = U ⊕ N".into(), &tct, &s(&u, &nn)));
        out.push(eq("U ∩ N = 0".into(), &zero, &i(&u, &nn)));
    }
    let tm = i(&t, &mss);
    out.push(eq("T + M** = Λ".into(), &m(ModuleId::Lambda), &s(&t, &mss)));
    out.push(Claim::compare(
        tag("dim(T ∩ M**) = n³/2 - n²/2"),
        A,
        json!((n * n * n - n * n) / 2),
        json!(tm.dim()),
    ));
    if char_divides(p, ni + 1) {
        let tctm = i(&tct, &mss);
        out.push(eq("(T ∩ T~) ∩ M** = T ∩ M** (char | n+1)".into(), &tm, &tctm));
        out.push(Claim::compare(
            tag("dim((T ∩ T~) ∩ M**) = n³/2 - n²/2 (char | n+1)"),
            A,
            json!((n * n * n - n * n) / 2),
            json!(tctm.dim()),
        ));
    }
    let ker_omega = functional_kernel(&mss, n, omega_unchecked);
    out.push(eq("ker(ω on M**) = K".into(), &k, &ker_omega));
    out.push(Claim::compare(
        tag("ω maps M** onto V̂"),
        A,
        json!(n),
        json!(functional_image(&mss, n, omega_unchecked).dim()),
    ));
    out
}

/// `T ∩ M** = T̃ ∩ M**` iff `char | n+1`, with the explicit witness for the
/// negative direction.
pub fn trace_biconditional(n: usize, field: &GaloisField) -> Vec<Claim> {
    const A: &str = "trace-biconditional";
    let tag = |s: &str| format!("{s} [n={n}, {}]", field_label(field));
    if field.size() <= 2 {
        return vec![Claim::skipped(tag("trace biconditional"), A, SMALL_FIELD)];
    }
    let divides = char_divides(field.characteristic(), n as i64 + 1);
    let mss = module(field, n, ModuleId::Mstarstar);
    let tm = mss.intersect(&module(field, n, ModuleId::T)).expect("ambient");
    let ttm = mss.intersect(&module(field, n, ModuleId::Ttilde)).expect("ambient");
    let mut out = vec![Claim::compare(
        tag("T ∩ M** = T~ ∩ M** iff char | n+1"),
        A,
        json!({"char_divides_n_plus_1": divides, "equal": divides}),
        json!({"char_divides_n_plus_1": divides, "equal": tm == ttm}),
    )];
    let w = trace_witness(field, n);
    let in_ttm = ttm.contains(w.coords());
    let in_t = predicate(ModuleId::T, &w).expect("no point");
    out.push(Claim::compare(
        tag("witness lies in T~ ∩ M**"),
        A,
        json!(true),
        json!(in_ttm),
    ));
    out.push(
        Claim::compare(tag("witness lies in T iff char | n+1"), A, json!(divides), json!(in_t))
            .with_data(json!({"tr_1(witness)": tr(&w)[0], "tr~(witness)": tr_op(&w)})),
    );
    out
}

/// Every claim in `claims` is verified (skips count as failures here).
pub fn claims_ok(claims: &[Claim]) -> bool {
    claims.iter().all(|c| c.status == Status::Verified)
}

/// Parses a named vector (`eta`, `delta`, `eps2`, `epst2`, `witness`), a
/// term expression such as `123-213` or `2*112+121`, or JSON (a coordinate
/// array or a full structure-vector object).
pub fn named_vector(field: &GaloisField, n: usize, spec: &str) -> Result<StructureVector<GaloisField>, CanonError> {
    let s = spec.trim();
    let bad = || CanonError::BadVector(spec.to_string());
    if s.starts_with('[') || s.starts_with('{') {
        let v: Value = serde_json::from_str(s).map_err(|_| bad())?;
        let sv = if v.is_array() { StructureVector::from_json_in(field, n, &v)? } else { StructureVector::from_json(&v)? };
        if sv.n() != n || sv.field() != field {
            return Err(bad());
        }
        return Ok(sv);
    }
    let index = |t: &str| t.parse::<usize>().ok().filter(|a| (1..=n).contains(a)).ok_or_else(bad);
    match s {
        "eta" => return Ok(eta(field, n)),
        "delta" => return Ok(delta(field, n)),
        "witness" => return Ok(trace_witness(field, n)),
        _ => {}
    }
    if let Some(a) = s.strip_prefix("epst") {
        return Ok(epsilon_tilde(field, n, index(a)?));
    }
    if let Some(a) = s.strip_prefix("eps") {
        return Ok(epsilon(field, n, index(a)?));
    }
    let mut terms = Vec::new();
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ if terms.is_empty() => (1, rest),
            _ => return Err(bad()),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let (term, tail) = body.split_at(end);
        let (coef, idx) = match term.split_once('*') {
            Some((c, t)) => (c.parse::<i64>().map_err(|_| bad())?, t),
            None => (1, term),
        };
        let digits: Vec<usize> = idx.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>().ok_or_else(bad)?;
        if digits.len() != 3 || digits.iter().any(|d| !(1..=n).contains(d)) {
            return Err(bad());
        }
        terms.push(((digits[0], digits[1], digits[2]), sign * coef));
        rest = tail;
    }
    if terms.is_empty() {
        return Err(bad());
    }
    Ok(StructureVector::from_terms(field, n, &terms)?)
}

/// JSON summary of a module: dimension and canonical basis.
pub fn module_json(id: ModuleId, s: &Subspace<GaloisField>) -> Value {
    json!({"module": id.to_string(), "dim": s.dim(), "subspace": s.to_json()})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structvec::{act, product};
    use crate::exactla::GroupElement;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64, k: u32) -> GaloisField {
        GaloisField::new(p, k).unwrap()
    }

    const ALL: [ModuleId; 12] = [
        ModuleId::Zero,
        ModuleId::C,
        ModuleId::K,
        ModuleId::Mstar,
        ModuleId::MstarP(1, -1),
        ModuleId::Mstarstar,
        ModuleId::T,
        ModuleId::Ttilde,
        ModuleId::TcapTtilde,
        ModuleId::N,
        ModuleId::U,
        ModuleId::Lambda,
    ];

    #[test]
    fn dims_n3_gf3() {
        let f = gf(3, 1);
        let dims: Vec<usize> = TABLE_MODULES.iter().map(|&id| build(&f, 3, id).unwrap().dim()).collect();
        assert_eq!(dims, vec![18, 9, 6, 12, 24, 24, 21, 15, 6]);
        for &id in &TABLE_MODULES {
            assert_eq!(build(&f, 3, id).unwrap().dim(), expected_dim(3, id));
        }
    }

    #[test]
    fn constructions_agree() {
        for f in [gf(3, 1), gf(2, 2), gf(5, 1), gf(3, 2)] {
            for n in [3, 4] {
                for id in ALL {
                    assert_eq!(build(&f, n, id).unwrap(), by_conditions(&f, n, id).unwrap(), "{id} n={n} {f:?}");
                }
                for p in ProjectivePoint::all(&f) {
                    let mut conds = conditions_mstar_p(&f, n, &p);
                    conds.truncate(conds.len());
                    let direct = basis_mstar_p(&f, n, &p);
                    let m = {
                        let d = n * n * n;
                        let mut m = Matrix::zeros(&f, conds.len(), d);
                        for (r, c) in conds.iter().enumerate() {
                            for (i, a) in c {
                                let cur = *m.get(r, *i);
                                m.set(r, *i, f.add(&cur, a));
                            }
                        }
                        m.null_space()
                    };
                    assert_eq!(direct, m);
                }
            }
        }
    }

    #[test]
    fn n_table_equals_c_cap_t() {
        for f in [gf(3, 1), gf(2, 2), gf(7, 1)] {
            for n in [3, 4, 5] {
                let inter = basis_c(&f, n).intersect(&basis_t(&f, n)).unwrap();
                assert_eq!(basis_n(&f, n), inter);
            }
        }
    }

    #[test]
    fn predicate_matches_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for f in [gf(3, 1), gf(2, 2)] {
            let n = 3;
            for id in ALL {
                let s = build(&f, n, id).unwrap();
                for idx in 0..27 {
                    let mut c = vec![0u32; 27];
                    c[idx] = 1;
                    let l = StructureVector::from_coords(&f, n, c).unwrap();
                    assert_eq!(predicate(id, &l).unwrap(), s.contains(l.coords()));
                }
                for _ in 0..200 {
                    // Half the samples are drawn from the module itself.
                    let l = if rand::Rng::gen_bool(&mut rng, 0.5) && s.dim() > 0 {
                        let mut v = vec![0u32; 27];
                        for b in s.basis() {
                            let c = f.random_elem(&mut rng);
                            f.sub_scaled(&mut v, b, &f.neg(&c));
                        }
                        StructureVector::from_coords(&f, n, v).unwrap()
                    } else {
                        let v = (0..27).map(|_| f.random_elem(&mut rng)).collect();
                        StructureVector::from_coords(&f, n, v).unwrap()
                    };
                    assert_eq!(predicate(id, &l).unwrap(), s.contains(l.coords()));
                }
            }
        }
    }

    #[test]
    fn membership_examples() {
        let f = gf(5, 1);
        let u = |a, b, c| StructureVector::unit(&f, 3, a, b, c).unwrap();
        assert!(predicate_c(&u(1, 1, 1)) && !predicate_k(&u(1, 1, 1)));
        assert!(predicate_k(&eta(&f, 3)));
        assert!(predicate_c(&delta(&f, 3)) && !predicate_k(&delta(&f, 3)));
        assert!(predicate_mstarstar(&eta(&f, 3)));
        assert!(!predicate_mstarstar(&delta(&f, 3)));
        let uu = build(&f, 3, ModuleId::U).unwrap();
        let nn = build(&f, 3, ModuleId::N).unwrap();
        assert!(uu.contains(eta(&f, 3).coords()));
        assert!(nn.contains(delta(&f, 3).coords()));
    }

    #[test]
    fn mstar_structure() {
        let f = gf(7, 1);
        let n = 3;
        let e1 = vec![1, 0, 0];
        let z = vec![0, 0, 0];
        assert_eq!(mu_alpha_delta(&f, &e1, &z).unwrap(), epsilon(&f, n, 1));
        assert_eq!(mu_alpha_delta(&f, &z, &e1).unwrap(), epsilon_tilde(&f, n, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a: Vec<u32> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
            let d: Vec<u32> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
            let mu = mu_alpha_delta(&f, &a, &d).unwrap();
            assert!(predicate_mstar(&mu));
            let g = loop {
                let e: Vec<u32> = (0..9).map(|_| f.random_elem(&mut rng)).collect();
                if let Ok(g) = GroupElement::new(Matrix::from_fn(&f, 3, 3, |i, j| e[i * 3 + j])) {
                    break g;
                }
            };
            let lhs = act(&mu, &g).unwrap();
            let ag = crate::structvec::dual_act(&a, &g);
            let dg = crate::structvec::dual_act(&d, &g);
            assert_eq!(lhs, mu_alpha_delta(&f, &ag, &dg).unwrap());
            let om = omega(&mu).unwrap();
            let sum: Vec<u32> = a.iter().zip(&d).map(|(x, y)| f.add(x, y)).collect();
            assert_eq!(om, sum);
        }
        let p10 = basis_mstar_p(&f, n, &ProjectivePoint::from_ints(&f, 1, 0).unwrap());
        let p01 = basis_mstar_p(&f, n, &ProjectivePoint::from_ints(&f, 0, 1).unwrap());
        assert!(p10.intersect(&p01).unwrap().is_zero());
        assert_eq!(ProjectivePoint::all(&f).len(), 8);
    }

    #[test]
    fn omega_examples() {
        let f = gf(7, 1);
        let n = 3;
        for i in 1..=n {
            let mut mu = vec![0u32; n];
            mu[i - 1] = 1;
            let pre = omega_preimage(&f, &mu);
            assert!(predicate_mstarstar(&pre));
            assert_eq!(omega(&pre).unwrap(), mu);
        }
        let pre = omega_preimage(&f, &[1, 0, 0]);
        let expect = StructureVector::from_terms(&f, 3, &[((1, 1, 1), 1), ((2, 1, 2), 1), ((3, 1, 3), 1)]).unwrap();
        assert_eq!(pre, expect);
        assert!(omega_preimage(&f, &[0, 0, 0]).is_zero());
        assert_eq!(omega(&eta(&f, 3)).unwrap(), vec![0, 0, 0]);
        assert_eq!(omega(&delta(&f, 3)), Err(CanonError::NotInMstarstar));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mss = basis_mstarstar(&f, n);
        for _ in 0..20 {
            let mu: Vec<u32> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
            assert_eq!(omega(&omega_preimage(&f, &mu)).unwrap(), mu);
            let mut c = vec![0u32; 27];
            for b in mss.basis() {
                let x = f.random_elem(&mut rng);
                f.sub_scaled(&mut c, b, &f.neg(&x));
            }
            let l = StructureVector::from_coords(&f, n, c).unwrap();
            let om = omega(&l).unwrap();
            let v: Vec<u32> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
            let sq = product(&l, &v, &v).unwrap();
            let w = crate::structvec::eval_dual(&f, &om, &v);
            let expect: Vec<u32> = v.iter().map(|x| f.mul(&w, x)).collect();
            assert_eq!(sq, expect);
        }
    }

    #[test]
    fn trace_maps_on_k_and_c() {
        for f in [gf(3, 1), gf(2, 2), gf(5, 1)] {
            for n in [3, 4] {
                let k = basis_k(&f, n);
                let c = basis_c(&f, n);
                assert_eq!(functional_image(&k, n, tr).dim(), n);
                assert_eq!(functional_kernel(&k, n, tr), build(&f, n, ModuleId::U).unwrap());
                assert_eq!(functional_image(&c, n, tr).dim(), n);
                assert_eq!(functional_kernel(&c, n, tr), basis_n(&f, n));
            }
        }
    }

    #[test]
    fn plus_tilde_in_char_two() {
        let f = gf(2, 2);
        for n in [3, 4] {
            let full = Subspace::full(&f, n * n * n);
            let pt = |v: &[u32]| crate::structvec::plus_tilde(&StructureVector::from_coords(&f, n, v.to_vec()).unwrap()).into_coords();
            let image = full.map(pt, n * n * n);
            assert_eq!(image, basis_k(&f, n));
            // Kernel on Λ: rows of the linear map's matrix.
            let cols: Vec<Vec<u32>> = full.basis().iter().map(|v| pt(v)).collect();
            let kernel = Matrix::from_rows(&f, n * n * n, &cols).unwrap().left_null_space();
            assert_eq!(kernel, basis_c(&f, n));
            let tct = build(&f, n, ModuleId::TcapTtilde).unwrap();
            let img = tct.map(pt, n * n * n);
            assert_eq!(img, build(&f, n, ModuleId::U).unwrap());
            let cols: Vec<Vec<u32>> = tct.basis().iter().map(|v| pt(v)).collect();
            let coeffs = Matrix::from_rows(&f, n * n * n, &cols).unwrap().left_null_space();
            let ker_rows: Vec<Vec<u32>> = coeffs
                .basis()
                .iter()
                .map(|x| {
                    let mut v = vec![0u32; n * n * n];
                    for (xi, b) in x.iter().zip(tct.basis()) {
                        f.sub_scaled(&mut v, b, &f.neg(xi));
                    }
                    v
                })
                .collect();
            assert_eq!(Subspace::from_vectors(&f, n * n * n, ker_rows), basis_n(&f, n));
        }
    }

    #[test]
    fn psi_vanishes_on_c_in_char_two() {
        let f = gf(2, 3);
        let c = basis_c(&f, 3);
        assert!(functional_image(&c, 3, crate::structvec::psi).is_zero());
    }

    #[test]
    fn intersection_examples() {
        let claims = intersection_table(3, &gf(5, 1));
        assert!(claims_ok(&claims), "{claims:#?}");
        assert!(claims.iter().any(|c| c.name.starts_with("U ∩ M* = 0")));
        let claims = intersection_table(4, &gf(3, 1));
        assert!(claims_ok(&claims), "{claims:#?}");
        assert!(claims.iter().any(|c| c.name.starts_with("U ∩ M* = Mstar(1,-1)")));
        let claims = intersection_table(4, &gf(5, 1));
        assert!(claims_ok(&claims), "{claims:#?}");
        assert!(claims.iter().any(|c| c.name.starts_with("N ∩ M** = Mstar(1,1)")));
        assert_eq!(intersection_table(3, &gf(2, 1))[0].status, Status::Skipped);
    }

    #[test]
    fn module_names_parse() {
        for id in ALL {
            assert_eq!(id.to_string().parse::<ModuleId>().unwrap(), id);
        }
        assert_eq!("MstarP:1,-1".parse::<ModuleId>().unwrap(), ModuleId::MstarP(1, -1));
        assert!("Q".parse::<ModuleId>().is_err());
    }

    #[test]
    fn named_vectors() {
        let f = GaloisField::new(5, 1).unwrap();
        assert_eq!(named_vector(&f, 3, "eta").unwrap(), eta(&f, 3));
        assert_eq!(named_vector(&f, 3, "123 - 213").unwrap(), eta(&f, 3));
        assert_eq!(named_vector(&f, 3, "2*112+121").unwrap(), StructureVector::from_terms(&f, 3, &[((1, 1, 2), 2), ((1, 2, 1), 1)]).unwrap());
        assert_eq!(named_vector(&f, 3, "eps2").unwrap(), epsilon(&f, 3, 2));
        let j = serde_json::to_string(&delta(&f, 3).to_json()).unwrap();
        assert_eq!(named_vector(&f, 3, &j).unwrap(), delta(&f, 3));
        for bad in ["", "eps4", "124", "12", "x", "112++121"] {
            assert!(named_vector(&f, 3, bad).is_err(), "{bad}");
        }
    }
}
