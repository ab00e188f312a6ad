//! `C/K` in characteristic 2 through the space `ΓV` of Frobenius-semilinear maps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::canon::{self, field_label, ModuleId};
use crate::exactla::{GroupElement, Matrix, Subspace};
use crate::gfield::{Field, GaloisField};
use crate::report::Claim;
use crate::spinmx::{norton_irreducible, GeneratorSet, ModuleHandle, Verdict};
use crate::structvec::{act, permutation, StructureVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GammaError {
    #[error("characteristic 2 required")]
    NotChar2,
    #[error("structure vector is not in C")]
    NotInC,
    #[error("e and f must be off-diagonal matrix units with ef = fe = 0")]
    BadUnits,
    #[error("dimension mismatch")]
    Dim,
    #[error("replay failed at {step}: got {state}")]
    Replay { step: String, state: String },
}

/// `φ(v_j) = Σ_i φ_ij v_i`, semilinear for `α ↦ α²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemilinearMap {
    pub mat: Matrix<GaloisField>,
}

impl SemilinearMap {
    pub fn zero(field: &GaloisField, n: usize) -> Self {
        SemilinearMap { mat: Matrix::zeros(field, n, n) }
    }

    /// The matrix unit `e_ij`, 1-based.
    pub fn unit(field: &GaloisField, n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        m.set(i - 1, j - 1, 1);
        SemilinearMap { mat: m }
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn field(&self) -> &GaloisField {
        self.mat.field()
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        *self.mat.get(i - 1, j - 1)
    }

    pub fn add(&self, o: &Self) -> Self {
        SemilinearMap { mat: self.mat.add(&o.mat) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        SemilinearMap { mat: self.mat.sub(&o.mat) }
    }

    pub fn scale(&self, c: u32) -> Self {
        SemilinearMap { mat: self.mat.scale(&c) }
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    /// Row-major coordinates in `F^{n²}`.
    pub fn coords(&self) -> Vec<u32> {
        self.mat.entries().to_vec()
    }

    pub fn from_coords(field: &GaloisField, n: usize, c: &[u32]) -> Self {
        SemilinearMap { mat: Matrix::from_fn(field, n, n, |i, j| c[i * n + j]) }
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n();
        (1..=n).all(|i| (1..=n).all(|j| i == j || self.get(i, j) == 0))
    }

    pub fn to_json(&self) -> Value {
        self.mat.to_json()
    }
}

fn require_char2(field: &GaloisField) -> Result<(), GammaError> {
    if field.characteristic() != 2 {
        return Err(GammaError::NotChar2);
    }
    Ok(())
}

/// `Σ_λ(v) = [v,v]`, so `Σ_λ` has `(i,j)` entry `λ_jji`.
pub fn sigma(lambda: &StructureVector<GaloisField>) -> Result<SemilinearMap, GammaError> {
    let f = lambda.field();
    require_char2(f)?;
    if !canon::predicate(ModuleId::C, lambda).expect("no point") {
        return Err(GammaError::NotInC);
    }
    let n = lambda.n();
    Ok(SemilinearMap { mat: Matrix::from_fn(f, n, n, |i, j| *lambda.get(j + 1, j + 1, i + 1).expect("in range")) })
}

/// `φ∗g = g⁻¹ φ g⁽²⁾`.
pub fn star(phi: &SemilinearMap, g: &GroupElement<GaloisField>) -> Result<SemilinearMap, GammaError> {
    let f = phi.field();
    require_char2(f)?;
    if g.n() != phi.n() {
        return Err(GammaError::Dim);
    }
    let n = phi.n();
    let g2 = Matrix::from_fn(f, n, n, |i, j| {
        let x = g.mat().get(i, j);
        f.mul(x, x)
    });
    let m = g.inv().mul(&phi.mat).and_then(|m| m.mul(&g2)).expect("square");
    Ok(SemilinearMap { mat: m })
}

fn unit_index(u: &SemilinearMap) -> Option<(usize, usize)> {
    let n = u.n();
    let mut hit = None;
    for i in 1..=n {
        for j in 1..=n {
            match u.get(i, j) {
                0 => {}
                1 if hit.is_none() => hit = Some((i, j)),
                _ => return None,
            }
        }
    }
    hit
}

fn plus_identity(e: &SemilinearMap) -> GroupElement<GaloisField> {
    let n = e.n();
    let m = Matrix::identity(e.field(), n).add(&e.mat);
    GroupElement::with_inverse(m.clone(), m).expect("order 2 in char 2")
}

/// `e&f(φ) = φ∗(I+e+f) + φ∗(I+e) + φ∗(I+f) + φ`, which equals `eφf + fφe`.
pub fn e_and_f(phi: &SemilinearMap, e: &SemilinearMap, f: &SemilinearMap) -> Result<SemilinearMap, GammaError> {
    require_char2(phi.field())?;
    let ok = |u: &SemilinearMap| matches!(unit_index(u), Some((i, j)) if i != j);
    if !ok(e) || !ok(f) || !e.mat.mul(&f.mat).expect("square").is_zero() || !f.mat.mul(&e.mat).expect("square").is_zero() {
        return Err(GammaError::BadUnits);
    }
    let four = star(phi, &plus_identity(&e.add(f)))?
        .add(&star(phi, &plus_identity(e))?)
        .add(&star(phi, &plus_identity(f))?)
        .add(phi);
    let closed = e_and_f_closed(phi, e, f);
    if four != closed {
        return Err(GammaError::Replay { step: "e&f simplification".into(), state: format!("{:?}", four.coords()) });
    }
    Ok(four)
}

/// `eφf + fφe`.
pub fn e_and_f_closed(phi: &SemilinearMap, e: &SemilinearMap, f: &SemilinearMap) -> SemilinearMap {
    let m = |a: &Matrix<GaloisField>, b: &Matrix<GaloisField>| a.mul(b).expect("square");
    SemilinearMap { mat: m(&m(&e.mat, &phi.mat), &f.mat).add(&m(&m(&f.mat, &phi.mat), &e.mat)) }
}

/// `e₁₂∗(I + αe₂₁) + e₁₂`.
pub fn eq_diag_extraction(field: &GaloisField, n: usize, alpha: u32) -> Result<SemilinearMap, GammaError> {
    let e12 = SemilinearMap::unit(field, n, 1, 2);
    let mut m = Matrix::identity(field, n);
    m.set(1, 0, alpha);
    let g = GroupElement::with_inverse(m.clone(), m).expect("order 2 in char 2");
    Ok(star(&e12, &g)?.add(&e12))
}

/// `ΓV` with one action matrix per generator: row `r` holds `e_r∗g`.
pub fn gamma_module(gens: &GeneratorSet<GaloisField>) -> Result<ModuleHandle<GaloisField>, GammaError> {
    let g0 = &gens.elements[0];
    let f = g0.mat().field();
    require_char2(f)?;
    let n = gens.n();
    let mats = gens
        .elements
        .iter()
        .map(|g| {
            let rows: Vec<Vec<u32>> = (0..n * n)
                .map(|r| star(&SemilinearMap::unit(f, n, r / n + 1, r % n + 1), g).map(|s| s.coords()))
                .collect::<Result<_, _>>()?;
            Ok(Matrix::from_rows(f, n * n, &rows).expect("n² columns"))
        })
        .collect::<Result<Vec<_>, GammaError>>()?;
    Ok(ModuleHandle::from_matrices(f, n * n, mats))
}

/// A permutation `σ` of `1..=n` with `σ(k) = v` for each `(k, v)` in `fixed`.
fn perm_with(n: usize, fixed: &[(usize, usize)]) -> Vec<usize> {
    let mut sigma = vec![0; n];
    for &(k, v) in fixed {
        sigma[k - 1] = v;
    }
    let mut rest = (1..=n).filter(|v| !fixed.iter().any(|&(_, w)| w == *v));
    for s in sigma.iter_mut() {
        if *s == 0 {
            *s = rest.next().expect("bijection");
        }
    }
    sigma
}

/// Replays the closure argument from a nonzero seed, producing every matrix
/// unit inside the submodule it generates. Returns the recorded steps.
pub fn replay(seed: &SemilinearMap) -> Result<Vec<Value>, GammaError> {
    let f = seed.field();
    let n = seed.n();
    require_char2(f)?;
    if seed.is_zero() || n < 3 {
        return Err(GammaError::Dim);
    }
    let alpha = f.primitive_element().expect("finite");
    if alpha == 1 {
        return Err(GammaError::Replay { step: "|F| >= 4".into(), state: field_label(f) });
    }
    let fail = |step: &str, s: &SemilinearMap| GammaError::Replay { step: step.into(), state: format!("{:?}", s.coords()) };
    let u = |i, j| SemilinearMap::unit(f, n, i, j);
    let mut steps = Vec::new();
    let mut phi = seed.clone();

    if phi.is_diagonal() {
        let pair = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).find(|&(i, j)| phi.get(i, i) != phi.get(j, j));
        let next = if let Some((i, j)) = pair {
            let p = permutation(f, &perm_with(n, &[(1, i), (2, j)]));
            let d = star(&phi, &p)?;
            let out = star(&d, &plus_identity(&u(1, 2)))?.add(&d);
            let want = u(1, 2).scale(f.add(&d.get(1, 1), &d.get(2, 2)));
            if out != want {
                return Err(fail("diagonal seed", &out));
            }
            steps.push(json!({"step": "diagonal seed: φ∗(I+e12) + φ", "pair": [i, j], "result": out.to_json()}));
            out
        } else {
            let mut m = Matrix::identity(f, n);
            m.set(0, 1, alpha);
            let g = GroupElement::with_inverse(m.clone(), m).expect("order 2 in char 2");
            let out = star(&phi, &g)?.add(&phi);
            let want = u(1, 2).scale(f.mul(&phi.get(1, 1), &f.add(&alpha, &f.mul(&alpha, &alpha))));
            if out != want {
                return Err(fail("scalar seed", &out));
            }
            steps.push(json!({"step": "scalar seed: φ∗(I+αe12) + φ", "alpha": alpha, "result": out.to_json()}));
            out
        };
        phi = next;
    }

    let (i, j) = (1..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && phi.get(i, j) != 0)
        .expect("off-diagonal entry");
    let sigma = perm_with(n, &[(1, i), (2, j)]);
    let phi = star(&phi, &permutation(f, &sigma))?;
    steps.push(json!({"step": "permute nonzero off-diagonal entry to (1,2)", "permutation": sigma}));
    let c12 = phi.get(1, 2);
    let psi = e_and_f(&phi, &u(2, 1), &u(3, 1))?;
    if psi != u(3, 1).scale(c12).add(&u(2, 1).scale(phi.get(1, 3))) {
        return Err(fail("e21&e31", &psi));
    }
    let chi = e_and_f(&psi, &u(1, 3), &u(2, 3))?;
    if chi != u(2, 3).scale(c12) {
        return Err(fail("e13&e23", &chi));
    }
    let e23 = chi.scale(f.inv(&c12).expect("nonzero"));
    steps.push(json!({"step": "e21&e31 then e13&e23", "intermediate": psi.to_json(), "result": "e23"}));

    let mut found = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            if a != b {
                let s = perm_with(n, &[(a, 2), (b, 3)]);
                let x = star(&e23, &permutation(f, &s))?;
                if x != u(a, b) {
                    return Err(fail("off-diagonal permutations", &x));
                }
                found.push(x);
            }
        }
    }
    steps.push(json!({"step": "permutations give every off-diagonal unit", "count": found.len()}));

    let mut diag = Vec::new();
    for a in [1, alpha] {
        let x = eq_diag_extraction(f, n, a)?;
        let a3 = f.mul(&a, &f.mul(&a, &a));
        let want = u(2, 2).scale(a).add(&u(1, 1).scale(f.mul(&a, &a))).add(&u(2, 1).scale(a3));
        if x != want {
            return Err(fail("e12∗(I+αe21) + e12", &x));
        }
        diag.push(x.sub(&u(2, 1).scale(a3)).scale(f.inv(&a).expect("nonzero")));
    }
    let e11 = diag[1].sub(&diag[0]).scale(f.inv(&f.sub(&alpha, &1)).expect("α ≠ 1"));
    if e11 != u(1, 1) {
        return Err(fail("e11 from two values of α", &e11));
    }
    steps.push(json!({"step": "e22 + αe11 for α ∈ {1, primitive} gives e11", "alpha": alpha}));
    for a in 1..=n {
        let s = perm_with(n, &[(a, 1)]);
        let x = star(&e11, &permutation(f, &s))?;
        if x != u(a, a) {
            return Err(fail("diagonal permutations", &x));
        }
        found.push(x);
    }
    let span = Subspace::from_vectors(f, n * n, found.iter().map(|x| x.coords()).collect());
    if !span.is_full() {
        return Err(GammaError::Replay { step: "span".into(), state: format!("dim {}", span.dim()) });
    }
    steps.push(json!({"step": "all matrix units reached", "dim": span.dim()}));
    Ok(steps)
}

/// Constructive replay from many seeds plus an independent MeatAxe run.
pub fn verify_gamma_irreducible(n: usize, field: &GaloisField, seed: u64, budget: u64) -> Vec<Claim> {
    const A: &str = "gamma-v";
    let tag = |s: &str| format!("{s} [n={n}, {}]", field_label(field));
    if field.characteristic() != 2 || field.size() < 4 {
        return vec![Claim::skipped(tag("ΓV irreducible"), A, "characteristic 2 with |F| >= 4 required")];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeds: Vec<(String, SemilinearMap)> = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            seeds.push((format!("e{i}{j}"), SemilinearMap::unit(field, n, i, j)));
        }
    }
    seeds.push(("I".into(), SemilinearMap { mat: Matrix::identity(field, n) }));
    let mut d = SemilinearMap::zero(field, n);
    for k in 1..=n {
        d.mat.set(k - 1, k - 1, k as u32 % field.size());
    }
    seeds.push(("diag".into(), d));
    for r in 0..32 {
        let m = loop {
            let c: Vec<u32> = (0..n * n).map(|_| field.random_elem(&mut rng)).collect();
            if c.iter().any(|x| *x != 0) {
                break SemilinearMap::from_coords(field, n, &c);
            }
        };
        seeds.push((format!("random{r}"), m));
    }
    let mut logs = serde_json::Map::new();
    let mut failures = Vec::new();
    for (name, s) in &seeds {
        match replay(s) {
            Ok(steps) => {
                if matches!(name.as_str(), "e12" | "e11" | "I" | "random0") {
                    logs.insert(name.clone(), Value::Array(steps));
                }
            }
            Err(e) => failures.push(json!({"seed": name, "matrix": s.to_json(), "error": e.to_string()})),
        }
    }
    let mut out = vec![Claim::compare(
        tag(&format!("constructive replay reaches ΓV from {} seeds", seeds.len())),
        A,
        json!({"failures": 0}),
        json!({"failures": failures.len()}),
    )
    .with_data(json!({"steps": logs, "failed": failures}))];

    let gens = GeneratorSet::standard(field, n);
    let module = gamma_module(&gens).expect("char 2");
    let verdict = norton_irreducible(&module, seed, budget);
    out.push(match verdict {
        Ok(Verdict::Irreducible { method }) => {
            Claim::truth(tag("ΓV irreducible (MeatAxe)"), A, true).with_data(json!({"method": method}))
        }
        Ok(Verdict::Reducible { witness }) => {
            Claim::truth(tag("ΓV irreducible (MeatAxe)"), A, false).with_data(json!({"witness_dim": witness.dim()}))
        }
        Ok(Verdict::Inconclusive) => Claim::inconclusive(tag("ΓV irreducible (MeatAxe)"), A, json!({"reason": "Norton attempts exhausted"})),
        Err(e) => Claim::inconclusive(tag("ΓV irreducible (MeatAxe)"), A, json!({"error": e.to_string()})),
    });
    out
}

/// Properties of `Σ`, the `∗`-action and the `e&f` operator.
pub fn gamma_properties(n: usize, field: &GaloisField, seed: u64) -> Vec<Claim> {
    const A: &str = "gamma-v";
    let tag = |s: &str| format!("{s} [n={n}, {}]", field_label(field));
    if field.characteristic() != 2 {
        return vec![Claim::skipped(tag("ΓV properties"), A, "characteristic 2 required")];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = GeneratorSet::standard(field, n);
    let c = canon::build(field, n, ModuleId::C).expect("valid");
    let k = canon::build(field, n, ModuleId::K).expect("valid");
    let mut out = Vec::new();

    let units_ok = (1..=n).all(|i| {
        (1..=n).all(|j| {
            let l = StructureVector::unit(field, n, j, j, i).expect("in range");
            sigma(&l).map(|s| s == SemilinearMap::unit(field, n, i, j)).unwrap_or(false)
        })
    });
    out.push(Claim::truth(tag("Σ(jji) = e_ij"), A, units_ok));

    let images: Vec<Vec<u32>> = c
        .basis()
        .iter()
        .map(|b| sigma(&StructureVector::from_coords(field, n, b.clone()).expect("n³")).expect("in C").coords())
        .collect();
    let sig = Matrix::from_rows(field, n * n, &images).expect("n² columns");
    out.push(Claim::compare(tag("rank of Σ on C equals dim ΓV"), A, json!(n * n), json!(sig.rank())));
    let kernel_coeffs = sig.left_null_space();
    let kernel = Subspace::from_vectors(
        field,
        n * n * n,
        kernel_coeffs
            .basis()
            .iter()
            .map(|co| {
                let mut v = vec![0u32; n * n * n];
                for (x, b) in co.iter().zip(c.basis()) {
                    field.sub_scaled(&mut v, b, &field.neg(x));
                }
                v
            })
            .collect(),
    );
    out.push(Claim::subspace_eq(tag("ker Σ on C = K"), A, &k, &kernel));

    let mut gmap = true;
    for b in c.basis() {
        let l = StructureVector::from_coords(field, n, b.clone()).expect("n³");
        let s = sigma(&l).expect("in C");
        for g in &gens.elements {
            let lhs = sigma(&act(&l, g).expect("n")).expect("C is stable");
            gmap &= lhs == star(&s, g).expect("char 2");
        }
    }
    out.push(Claim::truth(tag("Σ(λg) = Σ(λ)∗g on a basis of C and all generators"), A, gmap));

    let mut right = true;
    for _ in 0..20 {
        let phi = SemilinearMap::from_coords(field, n, &(0..n * n).map(|_| field.random_elem(&mut rng)).collect::<Vec<_>>());
        let g = gens.random_element(&mut rng, 4);
        let h = gens.random_element(&mut rng, 4);
        right &= star(&star(&phi, &g).unwrap(), &h).unwrap() == star(&phi, &g.compose(&h)).unwrap();
    }
    out.push(Claim::truth(tag("(φ∗g)∗h = φ∗(gh) on 20 random triples"), A, right));

    let mut ef = true;
    for _ in 0..50 {
        let phi = SemilinearMap::from_coords(field, n, &(0..n * n).map(|_| field.random_elem(&mut rng)).collect::<Vec<_>>());
        let (e, f) = (SemilinearMap::unit(field, n, 2, 1), SemilinearMap::unit(field, n, 3, 1));
        ef &= e_and_f(&phi, &e, &f).is_ok();
    }
    out.push(Claim::truth(tag("four-term e&f sum equals eφf + fφe on 50 random φ"), A, ef));

    let mut diag_ok = true;
    for a in 1..field.size() {
        let x = eq_diag_extraction(field, n, a).expect("char 2");
        let a2 = field.mul(&a, &a);
        let want = SemilinearMap::unit(field, n, 2, 2)
            .scale(a)
            .add(&SemilinearMap::unit(field, n, 1, 1).scale(a2))
            .add(&SemilinearMap::unit(field, n, 2, 1).scale(field.mul(&a, &a2)));
        diag_ok &= x == want;
    }
    out.push(Claim::truth(tag("e12∗(I+αe21) + e12 = αe22 + α²e11 + α³e21 for every α ≠ 0"), A, diag_ok));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, k: u32) -> GaloisField {
        GaloisField::new(p, k).unwrap()
    }

    #[test]
    fn sigma_units_and_errors() {
        let f = gf(2, 2);
        let l = StructureVector::unit(&f, 3, 2, 2, 1).unwrap();
        assert_eq!(sigma(&l).unwrap(), SemilinearMap::unit(&f, 3, 1, 2));
        assert!(sigma(&canon::eta(&f, 3)).unwrap().is_zero());
        assert_eq!(sigma(&StructureVector::unit(&gf(3, 1), 3, 1, 1, 1).unwrap()), Err(GammaError::NotChar2));
        assert_eq!(sigma(&StructureVector::unit(&f, 3, 1, 2, 3).unwrap()), Err(GammaError::NotInC));
    }

    #[test]
    fn star_examples() {
        let f = gf(2, 2);
        let n = 3;
        let phi = SemilinearMap::from_coords(&f, n, &[1, 2, 3, 0, 1, 2, 3, 3, 0]);
        assert_eq!(star(&phi, &GroupElement::identity(&f, n)).unwrap(), phi);
        let p = permutation(&f, &[2, 3, 1]);
        let conj = SemilinearMap { mat: p.inv().mul(&phi.mat).unwrap().mul(p.mat()).unwrap() };
        assert_eq!(star(&phi, &p).unwrap(), conj);
        let a = 2;
        let want = SemilinearMap::unit(&f, n, 2, 2)
            .scale(a)
            .add(&SemilinearMap::unit(&f, n, 1, 1).scale(f.mul(&a, &a)))
            .add(&SemilinearMap::unit(&f, n, 2, 1).scale(f.pow(&a, 3)));
        assert_eq!(eq_diag_extraction(&f, n, a).unwrap(), want);
    }

    #[test]
    fn e_and_f_examples() {
        let f = gf(2, 3);
        let n = 3;
        let phi = SemilinearMap::from_coords(&f, n, &[0, 5, 3, 1, 0, 0, 0, 0, 7]);
        let (e21, e31) = (SemilinearMap::unit(&f, n, 2, 1), SemilinearMap::unit(&f, n, 3, 1));
        let got = e_and_f(&phi, &e21, &e31).unwrap();
        assert_eq!(got, e31.scale(5).add(&e21.scale(3)));
        assert!(e_and_f(&SemilinearMap::zero(&f, n), &e21, &e31).unwrap().is_zero());
        assert_eq!(e_and_f(&phi, &e21, &SemilinearMap::unit(&f, n, 1, 3)), Err(GammaError::BadUnits));
    }

    #[test]
    fn irreducible_small() {
        for (n, f) in [(3, gf(2, 2)), (3, gf(2, 3)), (4, gf(2, 2))] {
            let claims = verify_gamma_irreducible(n, &f, 1, crate::spinmx::DEFAULT_BUDGET);
            assert!(claims.iter().all(|c| c.passed()), "{claims:?}");
            let props = gamma_properties(n, &f, 2);
            assert!(props.iter().all(|c| c.passed()), "{props:?}");
        }
        let skipped = verify_gamma_irreducible(3, &gf(2, 1), 1, 1000);
        assert_eq!(skipped.len(), 1);
    }
}
