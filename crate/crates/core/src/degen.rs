//! Linear degenerations: the `λ(q̂)` truncation and the transvection
//! construction reaching `η` and `δ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::canon::{self, field_label, predicate, ModuleId, SMALL_FIELD};
use crate::exactla::{GroupElement, Matrix, Row, Subspace};
use crate::gfield::{Field, GaloisField};
use crate::report::Claim;
use crate::spinmx::{spin, GeneratorSet};
use crate::structvec::{act, eval_dual, flat, permutation, product, StructureVector, SvError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DegenError {
    #[error("q has length {got}, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("zeta(z) must vanish")]
    ZetaOnZ,
    #[error("z and zeta must be nonzero")]
    ZeroSpec,
    #[error("alpha must differ from 0 and 1")]
    BadAlpha,
    #[error("need |F| > 2")]
    SmallField,
    #[error("structure vector lies outside the required region: {0}")]
    Region(&'static str),
    #[error("construction failed: {0}")]
    Discrepancy(String),
    #[error(transparent)]
    Sv(#[from] SvError),
}

/// `q_i + q_j - q_k`.
pub fn weight(q: &[i64], i: usize, j: usize, k: usize) -> i64 {
    q[i - 1] + q[j - 1] - q[k - 1]
}

/// Keeps the coordinates of weight zero.
pub fn q_truncate<F: Field>(lambda: &StructureVector<F>, q: &[i64]) -> Result<StructureVector<F>, DegenError> {
    let n = lambda.n();
    if q.len() != n {
        return Err(DegenError::Length { expected: n, got: q.len() });
    }
    let f = lambda.field();
    let mut out = StructureVector::zero(f, n);
    for ((i, j, k), c) in lambda.support() {
        if weight(q, i, j, k) == 0 {
            out.set(i, j, k, c)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LindegCheck {
    pub applicable: bool,
    pub vanishing: bool,
    pub max_weight: i64,
}

/// Hypotheses of the truncation theorem: `λ` vanishes on negative weights
/// and every weight is below `|F| - 1`.
pub fn lindeg_theorem_check(lambda: &StructureVector<GaloisField>, q: &[i64]) -> Result<LindegCheck, DegenError> {
    let n = lambda.n();
    if q.len() != n {
        return Err(DegenError::Length { expected: n, got: q.len() });
    }
    let mut max_weight = i64::MIN;
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                max_weight = max_weight.max(weight(q, i, j, k));
            }
        }
    }
    let vanishing = lambda.support().iter().all(|&((i, j, k), _)| weight(q, i, j, k) >= 0);
    let bound = lambda.field().size() as i64 - 1;
    Ok(LindegCheck { applicable: vanishing && max_weight < bound, vanishing, max_weight })
}

/// `λ(q̂) ∈ λ(FG)`.
pub fn verify_lindeg(
    lambda: &StructureVector<GaloisField>,
    q: &[i64],
    gens: &GeneratorSet<GaloisField>,
) -> Result<bool, DegenError> {
    let t = q_truncate(lambda, q)?;
    Ok(spin(lambda, gens).contains(t.coords()))
}

/// The transvection `v ↦ v + ζ(v)z` scaled by `α` in the second pass.
#[derive(Debug, Clone, PartialEq)]
pub struct TransvectionSpec {
    pub z: Row<GaloisField>,
    pub zeta: Row<GaloisField>,
    pub alpha: u32,
}

impl TransvectionSpec {
    pub fn new(field: &GaloisField, z: Row<GaloisField>, zeta: Row<GaloisField>, alpha: u32) -> Result<Self, DegenError> {
        if z.iter().all(|x| *x == 0) || zeta.iter().all(|x| *x == 0) {
            return Err(DegenError::ZeroSpec);
        }
        if eval_dual(field, &zeta, &z) != 0 {
            return Err(DegenError::ZetaOnZ);
        }
        if alpha == 0 || alpha == 1 {
            return Err(DegenError::BadAlpha);
        }
        Ok(TransvectionSpec { z, zeta, alpha })
    }

    pub fn to_json(&self) -> Value {
        json!({"z": self.z, "zeta": self.zeta, "alpha": self.alpha})
    }
}

/// `I + c·z ζ`.
fn transvection(field: &GaloisField, z: &[u32], zeta: &[u32], c: u32) -> GroupElement<GaloisField> {
    let n = z.len();
    let m = Matrix::from_fn(field, n, n, |i, j| {
        let t = field.mul(&c, &field.mul(&z[i], &zeta[j]));
        if i == j {
            field.add(&1, &t)
        } else {
            t
        }
    });
    let inv = Matrix::from_fn(field, n, n, |i, j| {
        let t = field.neg(&field.mul(&c, &field.mul(&z[i], &zeta[j])));
        if i == j {
            field.add(&1, &t)
        } else {
            t
        }
    });
    GroupElement::with_inverse(m, inv).expect("transvection with zeta(z) = 0")
}

fn check_field(field: &GaloisField) -> Result<(), DegenError> {
    if field.size() <= 2 {
        return Err(DegenError::SmallField);
    }
    Ok(())
}

/// The chain `𝔤₁ … 𝔤₄` and the rescaled `𝔤₅`.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub g1: StructureVector<GaloisField>,
    pub g2: StructureVector<GaloisField>,
    pub g3: StructureVector<GaloisField>,
    pub g4: StructureVector<GaloisField>,
    pub g5: StructureVector<GaloisField>,
}

pub fn transvection_pipeline(lambda: &StructureVector<GaloisField>, spec: &TransvectionSpec) -> Result<Pipeline, DegenError> {
    let f = lambda.field();
    check_field(f)?;
    let a = spec.alpha;
    let g1 = act(lambda, &transvection(f, &spec.z, &spec.zeta, 1))?;
    let g2 = g1.sub(lambda)?;
    let g3 = act(lambda, &transvection(f, &spec.z, &spec.zeta, a))?.sub(lambda)?;
    let g4 = g3.sub(&g2.scale(&a))?;
    let denom = f.neg(&f.sub(&f.mul(&a, &a), &a));
    let g5 = g4.scale(&f.inv(&denom).ok_or(DegenError::BadAlpha)?);
    Ok(Pipeline { g1, g2, g3, g4, g5 })
}

pub fn transvection_g5(lambda: &StructureVector<GaloisField>, spec: &TransvectionSpec) -> Result<StructureVector<GaloisField>, DegenError> {
    Ok(transvection_pipeline(lambda, spec)?.g5)
}

/// `[u,v]₅ = ζ(u)ζ([z,v])z + ζ(v)ζ([u,z])z − ζ(u)ζ(v)[z,z] + (α+1)ζ(u)ζ(v)ζ([z,z])z`.
pub fn g5_closed_form(lambda: &StructureVector<GaloisField>, spec: &TransvectionSpec) -> Result<StructureVector<GaloisField>, DegenError> {
    let f = lambda.field();
    let n = lambda.n();
    let (z, zeta) = (&spec.z, &spec.zeta);
    let zz = product(lambda, z, z)?;
    let zeta_zz = eval_dual(f, zeta, &zz);
    let a1 = f.add(&spec.alpha, &1);
    let e = |i: usize| crate::structvec::basis_vector(f, n, i);
    let mut out = StructureVector::zero(f, n);
    for i in 1..=n {
        for j in 1..=n {
            let (zi, zj) = (zeta[i - 1], zeta[j - 1]);
            let c1 = f.mul(&zi, &eval_dual(f, zeta, &product(lambda, z, &e(j))?));
            let c2 = f.mul(&zj, &eval_dual(f, zeta, &product(lambda, &e(i), z)?));
            let zij = f.mul(&zi, &zj);
            let c4 = f.mul(&a1, &f.mul(&zij, &zeta_zz));
            let cz = f.add(&f.add(&c1, &c2), &c4);
            for k in 1..=n {
                let v = f.sub(&f.mul(&cz, &z[k - 1]), &f.mul(&zij, &zz[k - 1]));
                out.set(i, j, k, v)?;
            }
        }
    }
    Ok(out)
}

/// `(𝔤₅(α') − 𝔤₅(α)) / (α' − α)`.
pub fn transvection_g6(
    lambda: &StructureVector<GaloisField>,
    spec: &TransvectionSpec,
    alpha2: u32,
) -> Result<StructureVector<GaloisField>, DegenError> {
    let f = lambda.field();
    let other = TransvectionSpec { alpha: alpha2, ..spec.clone() };
    if alpha2 == 0 || alpha2 == 1 || alpha2 == spec.alpha {
        return Err(DegenError::BadAlpha);
    }
    let d = transvection_g5(lambda, &other)?.sub(&transvection_g5(lambda, spec)?)?;
    Ok(d.scale(&f.inv(&f.sub(&alpha2, &spec.alpha)).expect("distinct")))
}

/// `ζ(u)ζ(v)ζ([z,z])z`.
pub fn g6_closed_form(lambda: &StructureVector<GaloisField>, spec: &TransvectionSpec) -> Result<StructureVector<GaloisField>, DegenError> {
    let f = lambda.field();
    let n = lambda.n();
    let zz = product(lambda, &spec.z, &spec.z)?;
    let s = eval_dual(f, &spec.zeta, &zz);
    let mut out = StructureVector::zero(f, n);
    for i in 1..=n {
        for j in 1..=n {
            let c = f.mul(&s, &f.mul(&spec.zeta[i - 1], &spec.zeta[j - 1]));
            for k in 1..=n {
                out.set(i, j, k, f.mul(&c, &spec.z[k - 1]))?;
            }
        }
    }
    Ok(out)
}

/// `α`: primitive element (which is 2 over GF(3)).
pub fn default_alpha(field: &GaloisField) -> u32 {
    field.primitive_element().expect("finite field")
}

/// First element outside `{0, 1, α}`.
pub fn second_alpha(field: &GaloisField, alpha: u32) -> Option<u32> {
    (0..field.size()).find(|&x| x != 0 && x != 1 && x != alpha)
}

/// `x` with `k·x = 0` for each row `k` of `kernel_of` and `target·x = 1`.
fn pick_vector(field: &GaloisField, n: usize, kernel_of: &[Row<GaloisField>], target: &[u32]) -> Option<Row<GaloisField>> {
    let ker = if kernel_of.is_empty() {
        Subspace::full(field, n)
    } else {
        Matrix::from_rows(field, n, kernel_of).expect("n columns").null_space()
    };
    ker.basis().iter().find_map(|b| {
        let t = eval_dual(field, target, b);
        field.inv(&t).map(|ti| b.iter().map(|x| field.mul(x, &ti)).collect())
    })
}

fn independent(field: &GaloisField, n: usize, vs: &[&[u32]]) -> bool {
    Subspace::from_vectors(field, n, vs.iter().map(|v| v.to_vec()).collect()).dim() == vs.len()
}

/// All nonzero vectors of `F^n` with leading entry 1, standard basis first.
fn search_vectors(field: &GaloisField, n: usize) -> Vec<Row<GaloisField>> {
    let q = field.size() as u64;
    let mut out: Vec<Row<GaloisField>> = (1..=n).map(|i| crate::structvec::basis_vector(field, n, i)).collect();
    let total = q.pow(n as u32);
    for idx in 1..total {
        let mut v = vec![0u32; n];
        let mut r = idx;
        for x in v.iter_mut().rev() {
            *x = (r % q) as u32;
            r /= q;
        }
        let lead = v.iter().find(|x| **x != 0).copied().unwrap_or(0);
        if lead == 1 && v.iter().filter(|x| **x != 0).count() > 1 {
            out.push(v);
        }
    }
    out
}

fn basis_matrix(field: &GaloisField, cols: &[Row<GaloisField>]) -> Result<GroupElement<GaloisField>, DegenError> {
    let n = cols.len();
    let m = Matrix::from_fn(field, n, n, |i, j| cols[j][i]);
    GroupElement::new(m).map_err(|_| DegenError::Discrepancy("basis vectors are dependent".into()))
}

/// Extends `start` to a basis of `space` using its canonical basis.
fn complete(field: &GaloisField, space: &Subspace<GaloisField>, start: &[Row<GaloisField>]) -> Vec<Row<GaloisField>> {
    let mut eb = crate::exactla::EchelonBasis::new(field, space.ambient());
    for s in start {
        eb.insert(s);
    }
    let mut out = Vec::new();
    for b in space.basis() {
        if eb.insert(b).is_some() {
            out.push(b.clone());
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ReachCertificate {
    pub target: &'static str,
    pub branch: String,
    pub search: Value,
    pub steps: Vec<Value>,
    /// Structure vector after the final basis change.
    pub result: StructureVector<GaloisField>,
    pub constructive: bool,
    pub spin_oracle: bool,
}

impl ReachCertificate {
    pub fn success(&self) -> bool {
        self.constructive && self.spin_oracle
    }

    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target,
            "branch": self.branch,
            "search": self.search,
            "steps": self.steps,
            "result": self.result.to_string(),
            "constructive": self.constructive,
            "spin_oracle": self.spin_oracle,
        })
    }
}

fn ge_json(g: &GroupElement<GaloisField>) -> Value {
    g.mat().to_json()
}

/// For `λ ∈ M** − M*`, a transvection degeneration followed by a basis
/// change lands exactly on `η`.
pub fn reach_eta(lambda: &StructureVector<GaloisField>, gens: &GeneratorSet<GaloisField>) -> Result<ReachCertificate, DegenError> {
    let f = lambda.field();
    let n = lambda.n();
    check_field(f)?;
    if !predicate(ModuleId::Mstarstar, lambda).expect("no point") {
        return Err(DegenError::Region("not in M**"));
    }
    if predicate(ModuleId::Mstar, lambda).expect("no point") {
        return Err(DegenError::Region("in M*"));
    }
    let cands = search_vectors(f, n);
    let mut found = None;
    'outer: for (ia, a) in cands.iter().enumerate() {
        for (ib, b) in cands.iter().enumerate() {
            if ia == ib {
                continue;
            }
            let ab = product(lambda, a, b)?;
            if independent(f, n, &[a, b, &ab]) {
                found = Some((ia, ib, a.clone(), b.clone()));
                break 'outer;
            }
        }
    }
    let (ia, ib, a, b) = found.ok_or_else(|| DegenError::Discrepancy("no independent triple a, b, [a,b]".into()))?;
    let stage = if ia < n && ib < n { "standard basis" } else { "all lines" };
    let om = canon::omega(lambda).map_err(|_| DegenError::Region("not in M**"))?;
    let (wa, wb) = (eval_dual(f, &om, &a), eval_dual(f, &om, &b));
    let z: Row<GaloisField> = if wa == 0 && wb == 0 {
        a.clone()
    } else {
        a.iter().zip(&b).map(|(x, y)| f.sub(&f.mul(&wb, x), &f.mul(&wa, y))).collect()
    };
    let w = if independent(f, n, &[&z, &a]) { a.clone() } else { b.clone() };
    let zw = product(lambda, &z, &w)?;
    let zeta = pick_vector(f, n, &[z.clone(), w.clone()], &zw).ok_or_else(|| DegenError::Discrepancy("no functional with zeta([z,w]) = 1".into()))?;
    let alpha = default_alpha(f);
    let spec = TransvectionSpec::new(f, z.clone(), zeta.clone(), alpha)?;
    let g5 = transvection_g5(lambda, &spec)?;
    // ζ'(v) = ζ([z,v])
    let zeta2: Row<GaloisField> = (1..=n)
        .map(|j| Ok(eval_dual(f, &zeta, &product(lambda, &z, &crate::structvec::basis_vector(f, n, j))?)))
        .collect::<Result<_, DegenError>>()?;
    let u1 = pick_vector(f, n, std::slice::from_ref(&zeta2), &zeta).ok_or_else(|| DegenError::Discrepancy("u1".into()))?;
    let u2 = pick_vector(f, n, std::slice::from_ref(&zeta), &zeta2).ok_or_else(|| DegenError::Discrepancy("u2".into()))?;
    let kernel = Matrix::from_rows(f, n, &[zeta.clone(), zeta2.clone()]).expect("n columns").null_space();
    let mut cols = vec![u1, u2, z.clone()];
    cols.extend(complete(f, &kernel, std::slice::from_ref(&z)));
    let bm = basis_matrix(f, &cols)?;
    let result = act(&g5, &bm)?;
    let eta = canon::eta(f, n);
    let sp = spin(lambda, gens);
    Ok(ReachCertificate {
        target: "eta",
        branch: "transvection".into(),
        search: json!({"order": "standard basis pairs, then all normalized vectors", "stage": stage, "a": a, "b": b}),
        steps: vec![
            json!({"omega": om, "z": z, "w": w}),
            json!({"transvection": spec.to_json(), "zeta_prime": zeta2}),
            json!({"basis_change": ge_json(&bm)}),
        ],
        constructive: result == eta && sp.contains(g5.coords()),
        spin_oracle: sp.contains(eta.coords()),
        result,
    })
}

/// For `λ ∈ C − M**`, transvection degenerations reach `δ = 112`.
pub fn reach_delta(lambda: &StructureVector<GaloisField>, gens: &GeneratorSet<GaloisField>) -> Result<ReachCertificate, DegenError> {
    let f = lambda.field();
    let n = lambda.n();
    check_field(f)?;
    if !predicate(ModuleId::C, lambda).expect("no point") {
        return Err(DegenError::Region("not in C"));
    }
    if predicate(ModuleId::Mstarstar, lambda).expect("no point") {
        return Err(DegenError::Region("in M**"));
    }
    let cands = search_vectors(f, n);
    let (iz, z, w) = cands
        .iter()
        .enumerate()
        .find_map(|(i, z)| {
            let w = product(lambda, z, z).ok()?;
            independent(f, n, &[z, &w]).then(|| (i, z.clone(), w))
        })
        .ok_or_else(|| DegenError::Discrepancy("no z with [z,z] independent of z".into()))?;
    let stage = if iz < n { "standard basis" } else { "all lines" };
    let zeta = pick_vector(f, n, std::slice::from_ref(&z), &w).ok_or_else(|| DegenError::Discrepancy("zeta".into()))?;
    let alpha = default_alpha(f);
    let spec = TransvectionSpec::new(f, z.clone(), zeta.clone(), alpha)?;
    let sp = spin(lambda, gens);
    let delta = canon::delta(f, n);
    let mut steps = vec![json!({"z": z, "w": w, "zeta": zeta})];
    let (branch, result, members) = if let Some(alpha2) = second_alpha(f, alpha) {
        let g6 = transvection_g6(lambda, &spec, alpha2)?;
        steps.push(json!({"transvection": spec.to_json(), "alpha_prime": alpha2}));
        let kernel = Matrix::from_rows(f, n, std::slice::from_ref(&zeta)).expect("n columns").null_space();
        let mut cols = vec![w.clone(), z.clone()];
        cols.extend(complete(f, &kernel, std::slice::from_ref(&z)));
        let bm = basis_matrix(f, &cols)?;
        steps.push(json!({"basis_change": ge_json(&bm)}));
        let members = sp.contains(g6.coords());
        ("g6".to_string(), act(&g6, &bm)?, members)
    } else {
        // GF(3): α = 2 and the cubic term of 𝔤₅ vanishes.
        let g5 = transvection_g5(lambda, &spec)?;
        steps.push(json!({"transvection": spec.to_json()}));
        let zeta2: Row<GaloisField> = (1..=n)
            .map(|j| Ok(eval_dual(f, &zeta, &product(lambda, &z, &crate::structvec::basis_vector(f, n, j))?)))
            .collect::<Result<_, DegenError>>()?;
        let kernel = Matrix::from_rows(f, n, &[zeta.clone(), zeta2.clone()]).expect("n columns").null_space();
        let mut cols = vec![z.clone(), w.clone()];
        cols.extend(complete(f, &kernel, &[]));
        let bm = basis_matrix(f, &cols)?;
        let mu5 = act(&g5, &bm)?;
        let c = eval_dual(f, &zeta2, &w);
        let expect = StructureVector::from_terms(f, n, &[((1, 2, 1), 1), ((2, 1, 1), 1), ((2, 2, 2), -1)])?
            .sub(&StructureVector::unit(f, n, 2, 2, 1)?.scale(&c))?;
        if mu5 != expect {
            return Err(DegenError::Discrepancy(format!("mu5 = {mu5}, expected {expect}")));
        }
        steps.push(json!({"basis_change": ge_json(&bm), "mu5": mu5.to_string(), "zeta_prime_w": c}));
        let mut members = sp.contains(g5.coords());
        if c != 0 {
            let mut h = Matrix::identity(f, n);
            h.set(0, 0, f.neg(&1));
            let h = GroupElement::new(h).expect("diagonal");
            let diff = act(&mu5, &h)?.sub(&mu5)?;
            let scaled = diff.scale(&f.inv(&f.mul(&2, &c)).expect("char 3"));
            let mut sigma: Vec<usize> = (1..=n).collect();
            sigma.swap(0, 1);
            let p = permutation(f, &sigma);
            let out = act(&scaled, &p)?;
            members &= act(&sp_vector(&scaled, &bm)?, &GroupElement::identity(f, n)).map(|v| sp.contains(v.coords()))?;
            steps.push(json!({"h": ge_json(&h), "difference": scaled.to_string(), "swap": sigma}));
            ("gf3: zeta'(w) != 0".to_string(), out, members)
        } else {
            let mut g = Matrix::identity(f, n);
            g.set(2, 1, 1);
            let g = GroupElement::new(g).expect("unipotent");
            let diff = act(&mu5, &g)?.sub(&mu5)?;
            let unit223 = StructureVector::unit(f, n, 2, 2, 3)?;
            if diff != unit223 {
                return Err(DegenError::Discrepancy(format!("mu5 g - mu5 = {diff}")));
            }
            let sigma = cycle_to_112(f, n, &unit223)?;
            let p = permutation(f, &sigma);
            let out = act(&diff, &p)?;
            members &= sp.contains(sp_vector(&diff, &bm)?.coords());
            steps.push(json!({"g": ge_json(&g), "difference": diff.to_string(), "permutation": sigma}));
            ("gf3: zeta'(w) = 0".to_string(), out, members)
        }
    };
    Ok(ReachCertificate {
        target: "delta",
        branch,
        search: json!({"order": "standard basis, then all normalized vectors", "stage": stage}),
        steps,
        constructive: result == delta && members,
        spin_oracle: sp.contains(delta.coords()),
        result,
    })
}

/// Coordinates relative to the original basis of a vector expressed in the
/// basis `bm`: undo the basis change.
fn sp_vector(v: &StructureVector<GaloisField>, bm: &GroupElement<GaloisField>) -> Result<StructureVector<GaloisField>, DegenError> {
    Ok(act(v, &bm.inverse())?)
}

/// A permutation of the first three basis vectors taking `v` to `112`.
fn cycle_to_112(f: &GaloisField, n: usize, v: &StructureVector<GaloisField>) -> Result<Vec<usize>, DegenError> {
    let target = canon::delta(f, n);
    for p in [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]] {
        let mut sigma: Vec<usize> = p.to_vec();
        sigma.extend(4..=n);
        if act(v, &permutation(f, &sigma))? == target {
            return Ok(sigma);
        }
    }
    Err(DegenError::Discrepancy("no permutation takes 223 to 112".into()))
}

fn random_in(field: &GaloisField, s: &Subspace<GaloisField>, rng: &mut ChaCha8Rng) -> Row<GaloisField> {
    let mut v = vec![0u32; s.ambient()];
    for b in s.basis() {
        let c = field.random_elem(rng);
        field.sub_scaled(&mut v, b, &field.neg(&c));
    }
    v
}

/// Random `(λ, q̂)` with the theorem's hypotheses in force.
pub fn random_applicable_pair(field: &GaloisField, n: usize, rng: &mut ChaCha8Rng) -> (StructureVector<GaloisField>, Vec<i64>) {
    let bound = field.size() as i64 - 1;
    let q = loop {
        let q: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
        let mx = (1..=n)
            .flat_map(|i| (1..=n).flat_map(move |j| (1..=n).map(move |k| (i, j, k))))
            .map(|(i, j, k)| weight(&q, i, j, k))
            .max()
            .unwrap_or(0);
        if mx < bound {
            break q;
        }
    };
    let mut c = vec![0u32; n * n * n];
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                if weight(&q, i, j, k) >= 0 {
                    c[flat(n, i, j, k)] = field.random_elem(rng);
                }
            }
        }
    }
    (StructureVector::from_coords(field, n, c).expect("n^3"), q)
}

/// Seeded truncation suite over one field.
pub fn lindeg_suite(n: usize, field: &GaloisField, pairs: usize, seed: u64) -> Vec<Claim> {
    const A: &str = "linear-degeneration";
    let tag = |s: &str| format!("{s} [n={n}, {}]", field_label(field));
    if field.size() <= 2 {
        return vec![Claim::skipped(tag("truncation theorem"), A, SMALL_FIELD)];
    }
    let gens = GeneratorSet::standard(field, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut nontrivial = 0;
    for idx in 0..pairs {
        let (l, q) = random_applicable_pair(field, n, &mut rng);
        let chk = lindeg_theorem_check(&l, &q).expect("length n");
        let t = q_truncate(&l, &q).expect("length n");
        if t != l {
            nontrivial += 1;
        }
        let ok = chk.applicable && verify_lindeg(&l, &q, &gens).expect("length n");
        if !ok {
            failures.push(json!({"index": idx, "q": q, "lambda": l.to_json()}));
        }
    }
    vec![Claim::compare(
        tag(&format!("λ(q̂) ∈ λ(FG) for {pairs} random applicable pairs")),
        A,
        json!({"failures": 0}),
        json!({"failures": failures.len()}),
    )
    .with_data(json!({"seed": seed, "nontrivial_truncations": nontrivial, "failed": failures}))]
}

/// The worked examples: `q̂ = (1,1,2,…)` to `η` and `q̂ = (1,2,2,…)` to `δ`.
pub fn lindeg_examples(n: usize, field: &GaloisField, seed: u64) -> Vec<Claim> {
    const A: &str = "linear-degeneration";
    let tag = |s: &str| format!("{s} [n={n}, {}]", field_label(field));
    if field.size() <= 2 {
        return vec![Claim::skipped(tag("truncation examples"), A, SMALL_FIELD)];
    }
    let gens = GeneratorSet::standard(field, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big = field.size() >= 5;
    let mss = canon::build(field, n, ModuleId::Mstarstar).expect("valid");
    let ms = canon::build(field, n, ModuleId::Mstar).expect("valid");
    let lam = loop {
        let v = random_in(field, &mss, &mut rng);
        if !ms.contains(&v) {
            break StructureVector::from_coords(field, n, v).expect("n^3");
        }
    };
    // Move to a basis where v1, v2, [v1,v2] are independent.
    let cert = reach_eta(&lam, &gens).ok();
    let mut q_eta = vec![1i64, 1, 2];
    q_eta.extend(std::iter::repeat_n(2, n - 3));
    let mut q_delta = vec![1i64, 2, 2];
    q_delta.extend(std::iter::repeat_n(2, n - 3));
    let eta = canon::eta(field, n);
    let mw = |q: &[i64]| lindeg_theorem_check(&eta, q).expect("length").max_weight;
    let mut out = vec![
        Claim::compare(tag("max weight of (1,1,2,…)"), A, json!(3), json!(mw(&q_eta))),
        Claim::compare(tag("max weight of (1,2,2,…)"), A, json!(3), json!(mw(&q_delta))),
    ];
    out.push(Claim::compare(
        tag("η(q̂) = η for q̂ = (1,1,2,…)"),
        A,
        json!(eta.to_string()),
        json!(q_truncate(&eta, &q_eta).expect("length").to_string()),
    ));
    if big {
        let sp = spin(&lam, &gens);
        out.push(
            Claim::truth(tag("random λ ∈ M** − M* degenerates to η"), A, sp.contains(eta.coords()))
                .with_data(json!({"lambda": lam.to_json(), "certificate": cert.map(|c| c.to_json())})),
        );
        let c = canon::build(field, n, ModuleId::Lambda).expect("valid");
        let l2 = loop {
            let v = random_in(field, &c, &mut rng);
            if !mss.contains(&v) {
                break StructureVector::from_coords(field, n, v).expect("n^3");
            }
        };
        let sp = spin(&l2, &gens);
        out.push(Claim::truth(tag("random λ ∈ Λ − M** degenerates to δ"), A, sp.contains(canon::delta(field, n).coords())).with_data(json!({"lambda": l2.to_json()})));
    }
    out
}

/// Reachability of `η` from `M** − M*` and of `δ` from `C − M**`.
pub fn reach_suite(n: usize, field: &GaloisField, samples: usize, seed: u64) -> Vec<Claim> {
    const A: &str = "transvection-reach";
    let tag = |s: &str| format!("{s} [n={n}, {}]", field_label(field));
    if field.size() <= 2 {
        return vec![Claim::skipped(tag("transvection reachability"), A, SMALL_FIELD)];
    }
    let gens = GeneratorSet::standard(field, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mss = canon::build(field, n, ModuleId::Mstarstar).expect("valid");
    let ms = canon::build(field, n, ModuleId::Mstar).expect("valid");
    let c = canon::build(field, n, ModuleId::C).expect("valid");
    let u = canon::build(field, n, ModuleId::U).expect("valid");
    let nn = canon::build(field, n, ModuleId::N).expect("valid");
    let mut out = Vec::new();

    let mut bad = Vec::new();
    let mut stages = std::collections::BTreeMap::<String, usize>::new();
    for _ in 0..samples {
        let v = loop {
            let v = random_in(field, &mss, &mut rng);
            if !ms.contains(&v) {
                break v;
            }
        };
        let l = StructureVector::from_coords(field, n, v).expect("n^3");
        match reach_eta(&l, &gens) {
            Ok(cert) => {
                *stages.entry(cert.search["stage"].as_str().unwrap_or("").to_string()).or_default() += 1;
                let contains_u = spin(&l, &gens).contains_subspace(&u);
                if !(cert.success() && contains_u) {
                    bad.push(json!({"lambda": l.to_json(), "certificate": cert.to_json()}));
                }
            }
            Err(e) => bad.push(json!({"lambda": l.to_json(), "error": e.to_string()})),
        }
    }
    out.push(
        Claim::compare(
            tag(&format!("η reached from {samples} samples of M** − M* (certificate and spin agree, U ⊆ λ(FG))")),
            A,
            json!({"failures": 0}),
            json!({"failures": bad.len()}),
        )
        .with_data(json!({"seed": seed, "search_stages": stages, "failed": bad})),
    );

    let mut bad = Vec::new();
    let mut branches = std::collections::BTreeMap::<String, usize>::new();
    let mut fixtures: Vec<StructureVector<GaloisField>> = Vec::new();
    for _ in 0..samples {
        let v = loop {
            let v = random_in(field, &c, &mut rng);
            if !mss.contains(&v) {
                break v;
            }
        };
        fixtures.push(StructureVector::from_coords(field, n, v).expect("n^3"));
    }
    if field.size() == 3 {
        fixtures.extend(gf3_branch_fixtures(field, n));
    }
    for l in &fixtures {
        match reach_delta(l, &gens) {
            Ok(cert) => {
                *branches.entry(cert.branch.clone()).or_default() += 1;
                let contains_n = spin(l, &gens).contains_subspace(&nn);
                if !(cert.success() && contains_n) {
                    bad.push(json!({"lambda": l.to_json(), "certificate": cert.to_json()}));
                }
            }
            Err(e) => bad.push(json!({"lambda": l.to_json(), "error": e.to_string()})),
        }
    }
    out.push(
        Claim::compare(
            tag(&format!("δ reached from {} samples of C − M** (certificate and spin agree, N ⊆ λ(FG))", fixtures.len())),
            A,
            json!({"failures": 0}),
            json!({"failures": bad.len()}),
        )
        .with_data(json!({"seed": seed, "branches": branches, "failed": bad})),
    );
    if field.size() == 3 {
        let both = branches.contains_key("gf3: zeta'(w) != 0") && branches.contains_key("gf3: zeta'(w) = 0");
        out.push(Claim::truth(tag("both GF(3) branches exercised"), A, both).with_data(json!({"branches": branches})));
    }
    out
}

/// One structure vector per GF(3) branch of the `δ` construction, found by
/// a seeded scan of `C − M**`.
pub fn gf3_branch_fixtures(field: &GaloisField, n: usize) -> Vec<StructureVector<GaloisField>> {
    let gens = GeneratorSet::standard(field, n);
    let c = canon::build(field, n, ModuleId::C).expect("valid");
    let mss = canon::build(field, n, ModuleId::Mstarstar).expect("valid");
    let mut rng = ChaCha8Rng::seed_from_u64(0x6633);
    let mut found: std::collections::BTreeMap<String, StructureVector<GaloisField>> = Default::default();
    for _ in 0..1000 {
        if found.len() == 2 {
            break;
        }
        let v = random_in(field, &c, &mut rng);
        if mss.contains(&v) {
            continue;
        }
        let l = StructureVector::from_coords(field, n, v).expect("n^3");
        if let Ok(cert) = reach_delta(&l, &gens) {
            found.entry(cert.branch).or_insert(l);
        }
    }
    found.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, k: u32) -> GaloisField {
        GaloisField::new(p, k).unwrap()
    }

    #[test]
    fn truncation_examples() {
        let f = gf(5, 1);
        let l = StructureVector::from_terms(&f, 3, &[((3, 3, 1), 1), ((1, 1, 2), 1)]).unwrap();
        assert_eq!(q_truncate(&l, &[0, 0, 1]).unwrap(), StructureVector::unit(&f, 3, 1, 1, 2).unwrap());
        assert_eq!(q_truncate(&l, &[0, 0, 0]).unwrap(), l);
        let eta = canon::eta(&f, 3);
        assert_eq!(q_truncate(&eta, &[1, 1, 2]).unwrap(), eta);
        assert!(q_truncate(&eta, &[1, 1]).is_err());
        let f4 = gf(2, 2);
        let l4 = StructureVector::from_terms(&f4, 3, &[((3, 3, 1), 1), ((1, 1, 2), 1)]).unwrap();
        let chk = lindeg_theorem_check(&l4, &[0, 0, 1]).unwrap();
        assert_eq!(chk.max_weight, 2);
        assert!(chk.applicable);
        let chk = lindeg_theorem_check(&eta, &[1, 1, 2]).unwrap();
        assert_eq!(chk.max_weight, 3);
        assert!(chk.applicable);
        assert!(!lindeg_theorem_check(&canon::eta(&f4, 3), &[1, 1, 2]).unwrap().applicable);
        let abc = StructureVector::unit(&f, 3, 1, 2, 3).unwrap();
        assert!(verify_lindeg(&abc, &[0, 0, 0], &GeneratorSet::standard(&f, 3)).unwrap());
        assert_eq!(lindeg_theorem_check(&eta, &[0, 0, 0]).unwrap().max_weight, 0);
    }

    #[test]
    fn pipeline_matches_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in [gf(5, 1), gf(3, 1), gf(2, 2), gf(7, 1)] {
            let n = 3;
            for _ in 0..50 {
                let l = StructureVector::from_coords(&f, n, (0..27).map(|_| f.random_elem(&mut rng)).collect()).unwrap();
                let spec = loop {
                    let z: Vec<u32> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
                    let zeta: Vec<u32> = (0..n).map(|_| f.random_elem(&mut rng)).collect();
                    if let Ok(s) = TransvectionSpec::new(&f, z, zeta, default_alpha(&f)) {
                        break s;
                    }
                };
                assert_eq!(transvection_g5(&l, &spec).unwrap(), g5_closed_form(&l, &spec).unwrap());
                if let Some(a2) = second_alpha(&f, spec.alpha) {
                    assert_eq!(transvection_g6(&l, &spec, a2).unwrap(), g6_closed_form(&l, &spec).unwrap());
                }
            }
        }
    }

    #[test]
    fn g5_on_k_collapses() {
        let f = gf(5, 1);
        let l = canon::eta(&f, 3);
        let spec = TransvectionSpec::new(&f, vec![0, 0, 1], vec![1, 0, 0], 2).unwrap();
        let g5 = transvection_g5(&l, &spec).unwrap();
        assert_eq!(g5, g5_closed_form(&l, &spec).unwrap());
        assert!(transvection_g5(&StructureVector::zero(&f, 3), &spec).unwrap().is_zero());
        assert_eq!(TransvectionSpec::new(&f, vec![1, 0, 0], vec![1, 0, 0], 2), Err(DegenError::ZetaOnZ));
        assert_eq!(TransvectionSpec::new(&f, vec![0, 0, 1], vec![1, 0, 0], 1), Err(DegenError::BadAlpha));
    }

    #[test]
    fn reach_examples() {
        for f in [gf(5, 1), gf(3, 1), gf(2, 2)] {
            let gens = GeneratorSet::standard(&f, 3);
            let eta = canon::eta(&f, 3);
            assert!(reach_eta(&eta, &gens).unwrap().success());
            let l = eta.add(&canon::epsilon(&f, 3, 1)).unwrap();
            assert!(reach_eta(&l, &gens).unwrap().success());
            let d = canon::delta(&f, 3);
            assert!(reach_delta(&d, &gens).unwrap().success(), "{f:?}");
            let l = StructureVector::from_terms(&f, 3, &[((1, 1, 2), 1), ((1, 2, 1), 1), ((2, 1, 1), 1)]).unwrap();
            assert!(reach_delta(&l, &gens).unwrap().success());
            assert!(reach_eta(&d, &gens).is_err());
            assert!(reach_delta(&eta, &gens).is_err());
        }
    }

    #[test]
    fn gf3_fixtures_cover_both_branches() {
        let f = gf(3, 1);
        let gens = GeneratorSet::standard(&f, 3);
        let branches: std::collections::BTreeSet<String> =
            gf3_branch_fixtures(&f, 3).iter().map(|l| reach_delta(l, &gens).unwrap().branch).collect();
        assert_eq!(branches.len(), 2, "{branches:?}");
    }

    #[test]
    fn k_minus_mstar_reaches_eta_gf3_n4() {
        let f = gf(3, 1);
        let gens = GeneratorSet::standard(&f, 4);
        let k = canon::build(&f, 4, ModuleId::K).unwrap();
        let ms = canon::build(&f, 4, ModuleId::Mstar).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut done = 0;
        while done < 5 {
            let v = random_in(&f, &k, &mut rng);
            if ms.contains(&v) {
                continue;
            }
            let l = StructureVector::from_coords(&f, 4, v).unwrap();
            assert!(reach_eta(&l, &gens).unwrap().success());
            done += 1;
        }
    }

    #[test]
    fn g5_on_k_drops_square_terms() {
        let f = gf(5, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = canon::build(&f, 3, ModuleId::K).unwrap();
        let l = StructureVector::from_coords(&f, 3, random_in(&f, &k, &mut rng)).unwrap();
        let (z, zeta) = (vec![1, 2, 0], vec![0, 0, 1]);
        let spec = TransvectionSpec::new(&f, z.clone(), zeta.clone(), 2).unwrap();
        let g5 = transvection_g5(&l, &spec).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                let (u, v) = (crate::structvec::basis_vector(&f, 3, i), crate::structvec::basis_vector(&f, 3, j));
                let c = f.add(
                    &f.mul(&zeta[i - 1], &eval_dual(&f, &zeta, &product(&l, &z, &v).unwrap())),
                    &f.mul(&zeta[j - 1], &eval_dual(&f, &zeta, &product(&l, &u, &z).unwrap())),
                );
                let want: Vec<u32> = z.iter().map(|x| f.mul(&c, x)).collect();
                assert_eq!(product(&g5, &u, &v).unwrap(), want);
            }
        }
    }
}
