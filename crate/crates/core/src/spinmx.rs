//! Module machinery for `FG`-modules given by generator actions: spinning,
//! sub- and quotient modules, Norton's irreducibility test, exhaustive
//! submodule surveys, homomorphism spaces and composition series.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::exactla::{CoordinateSolver, EchelonBasis, GroupElement, LaError, Matrix, Row, Subspace};
use crate::gfield::{Field, GaloisField, Rationals};
use crate::report::Claim;
use crate::structvec::{act_coords, StructureVector};

/// Default line budget for exhaustive enumeration.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

/// Norton redraw limit.
pub const NORTON_ATTEMPTS: usize = 64;

/// Most kernel lines spun per Norton attempt.
const MAX_KERNEL_LINES: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpinError {
    #[error("subspace is not stable under generator {0}")]
    NotStable(usize),
    #[error("chain is not strictly increasing at position {0}")]
    NotNested(usize),
    #[error("{lines} lines exceed the budget of {budget}")]
    BudgetExceeded { lines: u64, budget: u64 },
    #[error("operation needs a finite field")]
    NotFinite,
    #[error("module has dimension 0")]
    ZeroModule,
    #[error("generator lists differ in length")]
    GeneratorMismatch,
    #[error(transparent)]
    La(#[from] LaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    StandardFinite,
    RationalSubgroup,
}

/// Generators of `GL(n,q)` (or of a subgroup over `Q`).
#[derive(Debug, Clone)]
pub struct GeneratorSet<F: Field> {
    pub elements: Vec<GroupElement<F>>,
    pub provenance: Provenance,
}

impl<F: Field> GeneratorSet<F> {
    pub fn n(&self) -> usize {
        self.elements[0].n()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Spins over a generating subgroup only; closure does not imply
    /// `G`-stability.
    pub fn subgroup_caveat(&self) -> bool {
        self.provenance == Provenance::RationalSubgroup
    }

    /// Product of `len` uniformly chosen generators.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> GroupElement<F> {
        let f = self.elements[0].mat().field().clone();
        let mut g = GroupElement::identity(&f, self.n());
        for _ in 0..len {
            let i = rng.gen_range(0..self.elements.len());
            g = g.compose(&self.elements[i]);
        }
        g
    }
}

fn transvection<F: Field>(field: &F, n: usize, i: usize, j: usize, t: F::Elem) -> GroupElement<F> {
    let mut m = Matrix::identity(field, n);
    m.set(i, j, t.clone());
    let mut inv = Matrix::identity(field, n);
    inv.set(i, j, field.neg(&t));
    GroupElement::with_inverse(m, inv).expect("transvection inverse")
}

fn diagonal<F: Field>(field: &F, n: usize, d: F::Elem) -> GroupElement<F> {
    let mut m = Matrix::identity(field, n);
    let mut inv = Matrix::identity(field, n);
    inv.set(0, 0, field.inv(&d).expect("nonzero"));
    m.set(0, 0, d);
    GroupElement::with_inverse(m, inv).expect("diagonal inverse")
}

impl GeneratorSet<GaloisField> {
    /// `I + e_ij` for all `i ≠ j`, then `diag(ζ,1,…,1)` with `ζ` primitive.
    pub fn standard(field: &GaloisField, n: usize) -> Self {
        let mut elements = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    elements.push(transvection(field, n, i, j, field.one()));
                }
            }
        }
        if field.size() > 2 {
            let z = field.primitive_element().expect("finite field");
            elements.push(diagonal(field, n, z));
        }
        GeneratorSet { elements, provenance: Provenance::StandardFinite }
    }
}

impl GeneratorSet<Rationals> {
    /// `I ± e_ij`, `diag(2,1,…)` and `diag(1/2,1,…)`.
    pub fn rational_subgroup(n: usize) -> Self {
        let q = Rationals;
        let mut elements = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    elements.push(transvection(&q, n, i, j, q.one()));
                    elements.push(transvection(&q, n, i, j, q.from_int(-1)));
                }
            }
        }
        let two = q.from_int(2);
        elements.push(diagonal(&q, n, two.clone()));
        elements.push(diagonal(&q, n, q.inv(&two).expect("nonzero")));
        GeneratorSet { elements, provenance: Provenance::RationalSubgroup }
    }
}

/// A right action of the generators on row vectors of a fixed length.
pub trait LinearAction<F: Field>: Send + Sync {
    fn field(&self) -> &F;
    fn dim(&self) -> usize;
    fn num_gens(&self) -> usize;
    fn apply(&self, gen: usize, v: &[F::Elem]) -> Row<F>;
}

/// The change-of-basis action on `Λ = F^{n³}`.
#[derive(Debug, Clone)]
pub struct LambdaAction<F: Field> {
    pub n: usize,
    pub gens: GeneratorSet<F>,
}

impl<F: Field> LambdaAction<F> {
    pub fn new(gens: GeneratorSet<F>) -> Self {
        LambdaAction { n: gens.n(), gens }
    }
}

impl<F: Field> LinearAction<F> for LambdaAction<F> {
    fn field(&self) -> &F {
        self.gens.elements[0].mat().field()
    }

    fn dim(&self) -> usize {
        self.n * self.n * self.n
    }

    fn num_gens(&self) -> usize {
        self.gens.len()
    }

    fn apply(&self, gen: usize, v: &[F::Elem]) -> Row<F> {
        act_coords(self.field(), self.n, v, &self.gens.elements[gen])
    }
}

/// A module given by one matrix per generator, acting by `v ↦ v·A`.
///
/// When built as a subquotient `S/W` of an ambient action, `reps` holds the
/// ambient lifts of the basis and `sub` holds `W`.
#[derive(Debug, Clone)]
pub struct ModuleHandle<F: Field> {
    field: F,
    dim: usize,
    action: Vec<Matrix<F>>,
    reps: Vec<Row<F>>,
    sub: Option<Subspace<F>>,
}

impl<F: Field> ModuleHandle<F> {
    pub fn from_matrices(field: &F, dim: usize, action: Vec<Matrix<F>>) -> Self {
        let reps = (0..dim)
            .map(|i| {
                let mut v = vec![field.zero(); dim];
                v[i] = field.one();
                v
            })
            .collect();
        ModuleHandle { field: field.clone(), dim, action, reps, sub: None }
    }

    /// `S/W` for `W ⊆ S`, both stable under `action`.
    pub fn subquotient<A: LinearAction<F> + ?Sized>(
        action: &A,
        carrier: &Subspace<F>,
        sub: &Subspace<F>,
    ) -> Result<Self, SpinError> {
        let f = action.field();
        let reps = carrier.coset_representatives(sub)?;
        let k = sub.dim();
        let mut basis: Vec<Row<F>> = sub.basis().to_vec();
        basis.extend(reps.iter().cloned());
        let d = reps.len();
        let mut mats = Vec::with_capacity(action.num_gens());
        if d == 0 {
            mats = (0..action.num_gens()).map(|_| Matrix::zeros(f, 0, 0)).collect();
        } else {
            let solver = CoordinateSolver::new(f, action.dim(), &basis)?;
            for g in 0..action.num_gens() {
                // Stability of W is checked on its basis, the quotient rows on reps.
                for w in sub.basis() {
                    let img = action.apply(g, w);
                    if !sub.contains(&img) {
                        return Err(SpinError::NotStable(g));
                    }
                }
                let mut rows = Vec::with_capacity(d);
                for r in &reps {
                    let img = action.apply(g, r);
                    let c = solver.solve(&img).map_err(|_| SpinError::NotStable(g))?;
                    rows.push(c[k..].to_vec());
                }
                mats.push(Matrix::from_rows(f, d, &rows)?);
            }
        }
        Ok(ModuleHandle { field: f.clone(), dim: d, action: mats, reps, sub: Some(sub.clone()) })
    }

    pub fn submodule<A: LinearAction<F> + ?Sized>(action: &A, carrier: &Subspace<F>) -> Result<Self, SpinError> {
        Self::subquotient(action, carrier, &Subspace::zero(action.field(), action.dim()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self) -> &[Matrix<F>] {
        &self.action
    }

    /// Module with every generator matrix transposed.
    pub fn dual(&self) -> Self {
        Self::from_matrices(&self.field, self.dim, self.action.iter().map(|m| m.transpose()).collect())
    }

    /// Preimage in the ambient space of a subspace of this module.
    pub fn lift(&self, s: &Subspace<F>) -> Subspace<F> {
        let f = &self.field;
        let amb = self.reps.first().map(|r| r.len()).unwrap_or_else(|| self.sub.as_ref().map(|w| w.ambient()).unwrap_or(0));
        let mut rows: Vec<Row<F>> = s
            .basis()
            .iter()
            .map(|c| {
                let mut v = vec![f.zero(); amb];
                for (ci, r) in c.iter().zip(&self.reps) {
                    f.sub_scaled(&mut v, r, &f.neg(ci));
                }
                v
            })
            .collect();
        if let Some(w) = &self.sub {
            rows.extend(w.basis().iter().cloned());
        }
        Subspace::from_vectors(f, amb, rows)
    }
}

impl<F: Field> LinearAction<F> for ModuleHandle<F> {
    fn field(&self) -> &F {
        &self.field
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn num_gens(&self) -> usize {
        self.action.len()
    }

    fn apply(&self, gen: usize, v: &[F::Elem]) -> Row<F> {
        self.action[gen].vec_mul(v)
    }
}

/// `V̂` with `φ ↦ φ·g`.
pub fn dual_space_module<F: Field>(gens: &GeneratorSet<F>) -> ModuleHandle<F> {
    let f = gens.elements[0].mat().field();
    ModuleHandle::from_matrices(f, gens.n(), gens.elements.iter().map(|g| g.mat().clone()).collect())
}

/// `V` as a right module through `v ↦ g⁻¹v`, written on rows as `v·g⁻ᵀ`.
pub fn natural_module<F: Field>(gens: &GeneratorSet<F>) -> ModuleHandle<F> {
    let f = gens.elements[0].mat().field();
    ModuleHandle::from_matrices(f, gens.n(), gens.elements.iter().map(|g| g.inv().transpose()).collect())
}

/// Smallest generator-stable subspace containing `seeds`.
pub fn spin_vectors<F: Field, A: LinearAction<F> + ?Sized>(action: &A, seeds: &[Row<F>]) -> Subspace<F> {
    let d = action.dim();
    let mut eb = EchelonBasis::new(action.field(), d);
    let mut queue = VecDeque::new();
    for s in seeds {
        if let Some(r) = eb.insert(s) {
            queue.push_back(r.clone());
        }
    }
    while let Some(v) = queue.pop_front() {
        if eb.dim() == d {
            break;
        }
        for g in 0..action.num_gens() {
            let w = action.apply(g, &v);
            if let Some(r) = eb.insert(&w) {
                queue.push_back(r.clone());
            }
        }
    }
    eb.to_subspace()
}

/// `λ(FG)`.
pub fn spin<F: Field>(lambda: &StructureVector<F>, gens: &GeneratorSet<F>) -> Subspace<F> {
    spin_vectors(&LambdaAction::new(gens.clone()), &[lambda.coords().to_vec()])
}

pub fn close_subspace<F: Field, A: LinearAction<F> + ?Sized>(action: &A, s: &Subspace<F>) -> Subspace<F> {
    spin_vectors(action, s.basis())
}

/// Whether every generator maps `s` into itself.
pub fn is_stable<F: Field, A: LinearAction<F> + ?Sized>(action: &A, s: &Subspace<F>) -> bool {
    (0..action.num_gens()).all(|g| s.basis().iter().all(|v| s.contains(&action.apply(g, v))))
}

fn field_size<F: Field>(f: &F) -> Result<u64, SpinError> {
    f.order().ok_or(SpinError::NotFinite)
}

fn line_count(q: u64, k: usize) -> u64 {
    let mut total: u64 = 0;
    let mut pow: u64 = 1;
    for _ in 0..k {
        total = total.saturating_add(pow);
        pow = pow.saturating_mul(q);
    }
    total
}

/// The `idx`-th normalized vector of `F^k` (first nonzero entry 1).
fn line_vector<F: Field>(f: &F, elems: &[F::Elem], k: usize, mut idx: u64) -> Row<F> {
    let q = elems.len() as u64;
    let mut lead = 0;
    loop {
        let block = q.pow((k - lead - 1) as u32);
        if idx < block {
            break;
        }
        idx -= block;
        lead += 1;
    }
    let mut v = vec![f.zero(); k];
    v[lead] = f.one();
    for x in v[lead + 1..].iter_mut().rev() {
        *x = elems[(idx % q) as usize].clone();
        idx /= q;
    }
    v
}

/// Representatives of all lines of `s`, in a fixed order.
fn subspace_lines<F: Field>(s: &Subspace<F>) -> Result<Vec<Row<F>>, SpinError> {
    let f = s.field();
    let elems = f.enumerate().map_err(|_| SpinError::NotFinite)?;
    let k = s.dim();
    let count = line_count(elems.len() as u64, k);
    Ok((0..count)
        .map(|i| {
            let c = line_vector(f, &elems, k, i);
            let mut v = vec![f.zero(); s.ambient()];
            for (ci, b) in c.iter().zip(s.basis()) {
                f.sub_scaled(&mut v, b, &f.neg(ci));
            }
            v
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<F: Field> {
    Irreducible { method: &'static str },
    /// A proper nonzero submodule, in module coordinates.
    Reducible { witness: Subspace<F> },
    Inconclusive,
}

impl<F: Field> Verdict<F> {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Irreducible { .. } => "irreducible",
            Verdict::Reducible { .. } => "reducible",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn is_irreducible(&self) -> bool {
        matches!(self, Verdict::Irreducible { .. })
    }
}

fn random_algebra_element<F: Field>(m: &ModuleHandle<F>, rng: &mut ChaCha8Rng) -> Matrix<F> {
    let f = &m.field;
    let k = m.action.len();
    let mut words: Vec<Matrix<F>> = m.action.clone();
    for _ in 0..k.min(6) {
        let a = &m.action[rng.gen_range(0..k)];
        let b = &m.action[rng.gen_range(0..k)];
        let c = &m.action[rng.gen_range(0..k)];
        words.push(a.mul(b).and_then(|ab| ab.mul(c)).expect("square"));
    }
    let mut theta = Matrix::zeros(f, m.dim, m.dim);
    for w in &words {
        theta = theta.add(&w.scale(&f.random_elem(rng)));
    }
    theta
}

/// Norton's criterion with every kernel line spun in the module and its
/// dual, so that a full-spin verdict is a proof of irreducibility.
pub fn norton_irreducible<F: Field>(m: &ModuleHandle<F>, seed: u64, budget: u64) -> Result<Verdict<F>, SpinError> {
    let f = &m.field;
    let q = field_size(f)?;
    let d = m.dim;
    if d == 0 {
        return Err(SpinError::ZeroModule);
    }
    if d == 1 {
        return Ok(Verdict::Irreducible { method: "dimension 1" });
    }
    let elems = f.enumerate().map_err(|_| SpinError::NotFinite)?;
    let dual = m.dual();
    let id = Matrix::identity(f, d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..NORTON_ATTEMPTS {
        let theta0 = random_algebra_element(m, &mut rng);
        let mut best: Option<(usize, Matrix<F>)> = None;
        for c in &elems {
            let theta = theta0.sub(&id.scale(c));
            let nullity = d - theta.rank();
            if nullity > 0 && best.as_ref().is_none_or(|(b, _)| nullity < *b) {
                best = Some((nullity, theta));
            }
        }
        let Some((nullity, theta)) = best else { continue };
        if 2 * line_count(q, nullity) > MAX_KERNEL_LINES {
            continue;
        }
        for v in subspace_lines(&theta.left_null_space())? {
            let s = spin_vectors(m, &[v]);
            if s.dim() < d {
                return Ok(Verdict::Reducible { witness: s });
            }
        }
        for x in subspace_lines(&theta.null_space())? {
            let s = spin_vectors(&dual, &[x]);
            if s.dim() < d {
                return Ok(Verdict::Reducible { witness: s.annihilator() });
            }
        }
        return Ok(Verdict::Irreducible { method: "norton" });
    }
    let lines = line_count(q, d);
    if lines > budget {
        return Ok(Verdict::Inconclusive);
    }
    let full = Subspace::full(f, d);
    for v in subspace_lines(&full)? {
        let s = spin_vectors(m, &[v]);
        if s.dim() < d {
            return Ok(Verdict::Reducible { witness: s });
        }
    }
    Ok(Verdict::Irreducible { method: "exhaustive" })
}

/// Every submodule of `m`, sorted by dimension then basis.
pub fn survey_submodules<F: Field>(m: &ModuleHandle<F>, budget: u64) -> Result<Vec<Subspace<F>>, SpinError> {
    let f = &m.field;
    let q = field_size(f)?;
    let d = m.dim;
    let lines = line_count(q, d);
    if lines > budget {
        return Err(SpinError::BudgetExceeded { lines, budget });
    }
    let elems = f.enumerate().map_err(|_| SpinError::NotFinite)?;
    let chunk: u64 = 512;
    let chunks = lines.div_ceil(chunk);
    let found: BTreeSet<Subspace<F>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = BTreeSet::new();
            for i in c * chunk..((c + 1) * chunk).min(lines) {
                let v = line_vector(f, &elems, d, i);
                local.insert(spin_vectors(m, &[v]));
            }
            local
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let mut all = found;
    all.insert(Subspace::zero(f, d));
    all.insert(Subspace::full(f, d));
    loop {
        let list: Vec<_> = all.iter().cloned().collect();
        let mut new = BTreeSet::new();
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                for s in [a.sum(b)?, a.intersect(b)?] {
                    if !all.contains(&s) {
                        new.insert(s);
                    }
                }
            }
        }
        if new.is_empty() {
            break;
        }
        all.extend(new);
    }
    let mut out: Vec<_> = all.into_iter().collect();
    out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// `Hom_G(a, b)`, each map recorded by the images of the seeds of `a`.
pub struct HomSpace<F: Field> {
    pub maps: Subspace<F>,
    raw: Vec<Row<F>>,
    seed_of: Vec<usize>,
    word: Vec<Matrix<F>>,
    target_dim: usize,
}

impl<F: Field> HomSpace<F> {
    pub fn dim(&self) -> usize {
        self.maps.dim()
    }

    /// Image in `b` of the map with seed images `x`.
    pub fn image(&self, x: &[F::Elem]) -> Subspace<F> {
        let f = self.maps.field();
        let d2 = self.target_dim;
        let rows = (0..self.raw.len())
            .map(|t| {
                let s = self.seed_of[t];
                self.word[t].vec_mul(&x[s * d2..(s + 1) * d2])
            })
            .collect();
        Subspace::from_vectors(f, d2, rows)
    }
}

pub fn hom_dim<F: Field>(a: &ModuleHandle<F>, b: &ModuleHandle<F>) -> Result<usize, SpinError> {
    Ok(hom_space(a, b)?.dim())
}

/// Solves for `Hom_G(a, b)`.
///
/// `a` is presented by spinning a generating set: every basis vector is a
/// seed or a generator image of an earlier one, and each relation among the
/// generator images becomes a linear condition on the seed images in `b`.
pub fn hom_space<F: Field>(a: &ModuleHandle<F>, b: &ModuleHandle<F>) -> Result<HomSpace<F>, SpinError> {
    if a.num_gens() != b.num_gens() {
        return Err(SpinError::GeneratorMismatch);
    }
    let f = &a.field;
    let (d1, d2) = (a.dim, b.dim);
    let empty = |raw, seed_of, word| HomSpace { maps: Subspace::zero(f, 0), raw, seed_of, word, target_dim: d2 };
    if d1 == 0 || d2 == 0 {
        return Ok(empty(Vec::new(), Vec::new(), Vec::new()));
    }
    // raw basis of a, seed index and word matrix in b for each vector
    let mut eb = EchelonBasis::new(f, d1);
    let mut raw: Vec<Row<F>> = Vec::new();
    let mut seed_of: Vec<usize> = Vec::new();
    let mut word: Vec<Matrix<F>> = Vec::new();
    let mut seeds = 0;
    for s in 0..d1 {
        let mut e = vec![f.zero(); d1];
        e[s] = f.one();
        if eb.insert(&e).is_none() {
            continue;
        }
        let seed = seeds;
        seeds += 1;
        let start = raw.len();
        raw.push(e);
        seed_of.push(seed);
        word.push(Matrix::identity(f, d2));
        let mut t = start;
        while t < raw.len() {
            for g in 0..a.num_gens() {
                let img = a.action[g].vec_mul(&raw[t]);
                if eb.insert(&img).is_some() {
                    raw.push(img);
                    seed_of.push(seed);
                    word.push(word[t].mul(&b.action[g])?);
                }
            }
            t += 1;
        }
        if raw.len() == d1 {
            break;
        }
    }
    let solver = CoordinateSolver::new(f, d1, &raw)?;
    let unknowns = seeds * d2;
    let mut cols: Vec<Row<F>> = Vec::new();
    let mut current = Subspace::full(f, unknowns);
    for t in 0..d1 {
        for g in 0..a.num_gens() {
            let img = a.action[g].vec_mul(&raw[t]);
            let c = solver.solve(&img)?;
            let lhs = word[t].mul(&b.action[g])?;
            // E is unknowns × d2; equation b·E = 0
            let mut e = Matrix::zeros(f, unknowns, d2);
            for r in 0..d2 {
                for col in 0..d2 {
                    let off = seed_of[t] * d2 + r;
                    let cur = e.get(off, col).clone();
                    e.set(off, col, f.add(&cur, lhs.get(r, col)));
                }
            }
            for (j, cj) in c.iter().enumerate() {
                if f.is_zero(cj) {
                    continue;
                }
                for r in 0..d2 {
                    let off = seed_of[j] * d2 + r;
                    for col in 0..d2 {
                        let cur = e.get(off, col).clone();
                        e.set(off, col, f.sub(&cur, &f.mul(cj, word[j].get(r, col))));
                    }
                }
            }
            for col in 0..d2 {
                cols.push((0..unknowns).map(|r| e.get(r, col).clone()).collect());
            }
        }
        // Shrink the solution space periodically to keep the system small.
        if cols.len() >= 4 * unknowns || t + 1 == d1 {
            let restricted: Vec<Row<F>> = current
                .basis()
                .iter()
                .map(|x| cols.iter().map(|c| crate::structvec::eval_dual(f, x, c)).collect())
                .collect();
            if restricted.is_empty() {
                return Ok(empty(raw, seed_of, word));
            }
            let m = Matrix::from_rows(f, cols.len(), &restricted)?;
            let coeffs = m.left_null_space();
            let rows = coeffs
                .basis()
                .iter()
                .map(|x| {
                    let mut v = vec![f.zero(); unknowns];
                    for (xi, bv) in x.iter().zip(current.basis()) {
                        f.sub_scaled(&mut v, bv, &f.neg(xi));
                    }
                    v
                })
                .collect();
            current = Subspace::from_vectors(f, unknowns, rows);
            cols.clear();
            if current.is_zero() {
                return Ok(empty(raw, seed_of, word));
            }
        }
    }
    Ok(HomSpace { maps: current, raw, seed_of, word, target_dim: d2 })
}

/// Every simple submodule of `m` isomorphic to one of `simples`, found as
/// images of the lines of each `Hom_G(S, m)`.
pub fn simple_submodules<F: Field>(
    m: &ModuleHandle<F>,
    simples: &[ModuleHandle<F>],
    budget: u64,
) -> Result<Vec<Subspace<F>>, SpinError> {
    let mut found = BTreeSet::new();
    for s in simples {
        let h = hom_space(s, m)?;
        if h.dim() == 0 {
            continue;
        }
        let f = m.field();
        let lines = line_count(field_size(f)?, h.dim());
        if lines > budget {
            return Err(SpinError::BudgetExceeded { lines, budget });
        }
        let elems = f.enumerate().map_err(|_| SpinError::NotFinite)?;
        for idx in 0..lines {
            let c = line_vector(f, &elems, h.dim(), idx);
            let mut x = vec![m.field().zero(); h.maps.ambient()];
            for (ci, b) in c.iter().zip(h.maps.basis()) {
                m.field().sub_scaled(&mut x, b, &m.field().neg(ci));
            }
            found.insert(h.image(&x));
        }
    }
    Ok(found.into_iter().collect())
}

/// Number of composition series of `m`, whose composition factors are all
/// isomorphic to members of `simples`.
pub fn count_composition_series<F: Field>(
    m: &ModuleHandle<F>,
    simples: &[ModuleHandle<F>],
    budget: u64,
) -> Result<u64, SpinError> {
    if m.dim() == 0 {
        return Ok(1);
    }
    let socle_parts = simple_submodules(m, simples, budget)?;
    if socle_parts.is_empty() {
        return Err(SpinError::ZeroModule);
    }
    let full = Subspace::full(m.field(), m.dim());
    let mut total = 0u64;
    for s in &socle_parts {
        let q = ModuleHandle::subquotient(m, &full, s)?;
        total += count_composition_series(&q, simples, budget)?;
    }
    Ok(total)
}



#[derive(Debug, Clone)]
pub struct FactorResult<F: Field> {
    pub lower: String,
    pub upper: String,
    pub dim: usize,
    pub verdict: Verdict<F>,
}

/// Runs Norton on each consecutive factor of `chain`.
pub fn composition_series<F: Field, A: LinearAction<F> + ?Sized>(
    action: &A,
    chain: &[(String, Subspace<F>)],
    seed: u64,
    budget: u64,
) -> Result<Vec<FactorResult<F>>, SpinError> {
    let mut out = Vec::new();
    for (i, w) in chain.windows(2).enumerate() {
        let (lo, hi) = (&w[0], &w[1]);
        if !hi.1.contains_subspace(&lo.1) || hi.1.dim() == lo.1.dim() {
            return Err(SpinError::NotNested(i + 1));
        }
        let h = ModuleHandle::subquotient(action, &hi.1, &lo.1)?;
        let verdict = norton_irreducible(&h, seed.wrapping_add(i as u64), budget)?;
        let verdict = match verdict {
            Verdict::Reducible { witness } => Verdict::Reducible { witness: h.lift(&witness) },
            v => v,
        };
        out.push(FactorResult { lower: lo.0.clone(), upper: hi.0.clone(), dim: h.dim(), verdict });
    }
    Ok(out)
}

pub fn factors_json(factors: &[FactorResult<GaloisField>]) -> Value {
    Value::Array(
        factors
            .iter()
            .map(|fr| {
                let mut v = json!({"factor": format!("{}/{}", fr.upper, fr.lower), "dim": fr.dim, "verdict": fr.verdict.label()});
                match &fr.verdict {
                    Verdict::Reducible { witness } => v["witness"] = witness.to_json(),
                    Verdict::Irreducible { method } => v["method"] = json!(method),
                    Verdict::Inconclusive => {}
                }
                v
            })
            .collect(),
    )
}

/// Claim builders shared by the lattice and series suites.
pub struct LatticeCtx<'a> {
    pub n: usize,
    pub field: &'a GaloisField,
    pub gens: GeneratorSet<GaloisField>,
    pub action: LambdaAction<GaloisField>,
    pub seed: u64,
    pub budget: u64,
    anchor: &'static str,
    counter: std::cell::Cell<u64>,
}

impl<'a> LatticeCtx<'a> {
    pub fn new(n: usize, field: &'a GaloisField, seed: u64, budget: u64, anchor: &'static str) -> Self {
        let gens = GeneratorSet::standard(field, n);
        let action = LambdaAction::new(gens.clone());
        LatticeCtx { n, field, gens, action, seed, budget, anchor, counter: std::cell::Cell::new(0) }
    }

    pub fn tag(&self, s: &str) -> String {
        format!("{s} [n={}, {}]", self.n, crate::canon::field_label(self.field))
    }

    fn next_seed(&self) -> u64 {
        let c = self.counter.get();
        self.counter.set(c + 1);
        self.seed.wrapping_add(c.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn module(&self, id: crate::canon::ModuleId) -> Subspace<GaloisField> {
        crate::canon::build(self.field, self.n, id).expect("valid module id")
    }

    pub fn eq(&self, name: &str, want: &Subspace<GaloisField>, got: &Subspace<GaloisField>) -> Claim {
        Claim::subspace_eq(self.tag(name), self.anchor, want, got)
    }

    pub fn dim(&self, name: &str, want: usize, got: &Subspace<GaloisField>) -> Claim {
        Claim::compare(self.tag(name), self.anchor, json!(want), json!(got.dim()))
    }

    pub fn truth(&self, name: &str, holds: bool) -> Claim {
        Claim::truth(self.tag(name), self.anchor, holds)
    }

    pub fn quotient(&self, top: &Subspace<GaloisField>, bottom: &Subspace<GaloisField>) -> ModuleHandle<GaloisField> {
        ModuleHandle::subquotient(&self.action, top, bottom).expect("stable nested pair")
    }

    /// Irreducibility of `top/bottom` by Norton's test.
    pub fn irreducible(&self, name: &str, top: &Subspace<GaloisField>, bottom: &Subspace<GaloisField>) -> Claim {
        let h = self.quotient(top, bottom);
        let name = self.tag(name);
        match norton_irreducible(&h, self.next_seed(), self.budget) {
            Ok(Verdict::Irreducible { method }) => {
                Claim::compare(name, self.anchor, json!("irreducible"), json!("irreducible")).with_data(json!({"dim": h.dim(), "method": method}))
            }
            Ok(Verdict::Reducible { witness }) => Claim::compare(name, self.anchor, json!("irreducible"), json!("reducible"))
                .with_data(json!({"dim": h.dim(), "witness": h.lift(&witness).to_json()})),
            Ok(Verdict::Inconclusive) => Claim::inconclusive(name, self.anchor, json!({"dim": h.dim()})),
            Err(e) => Claim::compare(name, self.anchor, json!("irreducible"), json!(e.to_string())),
        }
    }

    pub fn hom(&self, name: &str, a: &ModuleHandle<GaloisField>, b: &ModuleHandle<GaloisField>, want_nonzero: bool) -> Claim {
        let d = hom_dim(a, b).expect("same generators");
        Claim::compare(self.tag(name), self.anchor, json!({"hom_nonzero": want_nonzero}), json!({"hom_nonzero": d > 0}))
            .with_data(json!({"hom_dim": d}))
    }

    pub fn dual_space(&self) -> ModuleHandle<GaloisField> {
        dual_space_module(&self.gens)
    }

    /// `top/bottom ≅ target` for an irreducible `target`: equal dimensions,
    /// target irreducible and a nonzero homomorphism into it.
    pub fn isomorphic(
        &self,
        name: &str,
        top: &Subspace<GaloisField>,
        bottom: &Subspace<GaloisField>,
        target: &ModuleHandle<GaloisField>,
    ) -> Vec<Claim> {
        let a = self.quotient(top, bottom);
        let irr = norton_irreducible(target, self.next_seed(), self.budget);
        let hd = hom_dim(&a, target).expect("same generators");
        let ok_irr = matches!(irr, Ok(Verdict::Irreducible { .. }));
        let status = if matches!(irr, Ok(Verdict::Inconclusive)) {
            return vec![Claim::inconclusive(self.tag(name), self.anchor, json!({"dim": a.dim()}))];
        } else {
            ok_irr && hd > 0 && a.dim() == target.dim()
        };
        vec![Claim::compare(
            self.tag(name),
            self.anchor,
            json!({"dim": target.dim(), "target_irreducible": true, "hom_nonzero": true}),
            json!({"dim": a.dim(), "target_irreducible": ok_irr, "hom_nonzero": hd > 0}),
        )
        .with_data(json!({"hom_dim": hd, "isomorphic": status}))]
    }

    /// A functional `Λ → V̂` restricted to `s`: G-equivariance on the basis
    /// of `s`, image dimension and kernel.
    pub fn surjection(
        &self,
        name: &str,
        s: &Subspace<GaloisField>,
        kernel: &Subspace<GaloisField>,
        map: impl Fn(&StructureVector<GaloisField>) -> Vec<u32> + Copy,
    ) -> Vec<Claim> {
        let n = self.n;
        let f = self.field;
        let equivariant = s.basis().iter().all(|v| {
            let l = StructureVector::from_coords(f, n, v.clone()).expect("n^3");
            self.gens.elements.iter().all(|g| {
                let lhs = map(&crate::structvec::act(&l, g).expect("same n"));
                lhs == crate::structvec::dual_act(&map(&l), g)
            })
        });
        vec![
            self.truth(&format!("{name} is a G-map"), equivariant),
            self.dim(&format!("{name} is onto V̂"), n, &crate::canon::functional_image(s, n, map)),
            self.eq(&format!("ker {name}"), kernel, &crate::canon::functional_kernel(s, n, map)),
        ]
    }
}

fn sum(a: &Subspace<GaloisField>, b: &Subspace<GaloisField>) -> Subspace<GaloisField> {
    a.sum(b).expect("same ambient")
}

fn cap(a: &Subspace<GaloisField>, b: &Subspace<GaloisField>) -> Subspace<GaloisField> {
    a.intersect(b).expect("same ambient")
}

/// Submodule diagrams of `M**` and `Λ`, and the trace filtration factors.
pub fn verify_lattice_diagrams(n: usize, field: &GaloisField, seed: u64, budget: u64) -> Vec<Claim> {
    use crate::canon::ModuleId as M;
    use crate::gfield::char_divides;
    use crate::structvec::{psi, tr};
    const A: &str = "lattice-diagrams";
    let cx = LatticeCtx::new(n, field, seed, budget, A);
    if field.size() <= 2 {
        return vec![Claim::skipped(cx.tag("lattice diagrams"), A, crate::canon::SMALL_FIELD)];
    }
    let p = field.characteristic();
    let ni = n as i64;
    let (n1, n2, n3) = (n, n * n, n * n * n);
    let lam = cx.module(M::Lambda);
    let zero = cx.module(M::Zero);
    let c = cx.module(M::C);
    let k = cx.module(M::K);
    let ms = cx.module(M::Mstar);
    let mss = cx.module(M::Mstarstar);
    let t = cx.module(M::T);
    let tct = cx.module(M::TcapTtilde);
    let nn = cx.module(M::N);
    let u = cx.module(M::U);
    let m11 = cx.module(M::MstarP(1, 1));
    let m1m = cx.module(M::MstarP(1, -1));
    let vh = cx.dual_space();
    let mut out = Vec::new();

    // trace filtration
    out.extend(cx.surjection("tr on Λ", &lam, &t, tr));
    out.extend(cx.surjection("tr on K", &k, &u, tr));
    out.extend(cx.surjection("tr on C", &c, &nn, tr));
    out.extend(cx.isomorphic("Λ/T ≅ V̂", &lam, &t, &vh));
    out.extend(cx.isomorphic("K/U ≅ V̂", &k, &u, &vh));
    out.extend(cx.isomorphic("C/N ≅ V̂", &c, &nn, &vh));

    // M** diagrams
    out.push(cx.truth("U ⊆ K ⊆ M**", k.contains_subspace(&u) && mss.contains_subspace(&k)));
    out.push(cx.truth("M* ⊆ M**", mss.contains_subspace(&ms)));
    out.extend(cx.surjection("ω on M**", &mss, &k, crate::canon::omega_unchecked));
    out.extend(cx.isomorphic("M**/K ≅ V̂", &mss, &k, &vh));
    let ums = sum(&u, &ms);
    if char_divides(p, ni - 1) {
        out.push(cx.eq("U ∩ M* = Mstar(1,-1) (char | n-1)", &m1m, &cap(&u, &ms)));
        out.push(cx.dim("dim(U + M*) = n³/2 - n²/2 (char | n-1)", (n3 - n2) / 2, &ums));
        out.push(cx.eq("K ∩ (U + M*) = U (char | n-1)", &u, &cap(&k, &ums)));
        out.push(cx.eq("K + (U + M*) = M** (char | n-1)", &mss, &sum(&k, &ums)));
        out.extend(cx.isomorphic("(U + M*)/U ≅ V̂ (char | n-1)", &ums, &u, &vh));
        out.push(cx.irreducible("(U + M*)/M* irreducible (char | n-1)", &ums, &ms));
        out.push(cx.irreducible("Mstar(1,-1) irreducible", &m1m, &zero));
        out.push(cx.hom("V̂ is a top quotient of M**/M* (char | n-1)", &cx.quotient(&mss, &ms), &vh, true));
        out.push(cx.hom("V̂ is not a top quotient of U (char | n-1)", &cx.quotient(&u, &zero), &vh, false));
    } else {
        out.push(cx.eq("U ∩ M* = 0 (char ∤ n-1)", &zero, &cap(&u, &ms)));
        out.push(cx.eq("U + M* = M** (char ∤ n-1)", &mss, &ums));
        out.push(cx.dim("dim U = n³/2 - n²/2 - n", (n3 - n2) / 2 - n1, &u));
        out.push(cx.irreducible("U irreducible (char ∤ n-1)", &u, &zero));
        let uh = cx.quotient(&u, &zero);
        out.extend(cx.isomorphic("M**/M* ≅ U (char ∤ n-1)", &mss, &ms, &uh));
    }

    // Λ diagrams
    let nm = sum(&nn, &mss);
    if p != 2 {
        if char_divides(p, ni + 1) {
            out.push(cx.eq("N ∩ M** = Mstar(1,1) (char | n+1)", &m11, &cap(&nn, &mss)));
            out.push(cx.dim("dim(N + M**) = n³ - n (char | n+1)", n3 - n1, &nm));
            out.extend(cx.surjection("ψ = tr + tr~", &lam, &nm, psi));
            out.extend(cx.isomorphic("Λ/(N + M**) ≅ V̂ (char | n+1)", &lam, &nm, &vh));
            out.push(cx.irreducible("(N + M**)/M** irreducible (char | n+1)", &nm, &mss));
            out.push(cx.hom("V̂ is a top quotient of Λ/M** (char | n+1)", &cx.quotient(&lam, &mss), &vh, true));
            out.push(cx.hom("V̂ is not a top quotient of N (char | n+1)", &cx.quotient(&nn, &zero), &vh, false));
        } else {
            out.push(cx.eq("N ∩ M** = 0 (char ∤ n+1)", &zero, &cap(&nn, &mss)));
            out.push(cx.eq("N + M** = Λ (char ∤ n+1)", &lam, &nm));
            out.push(cx.irreducible("N irreducible (char ∤ n+1)", &nn, &zero));
            let nh = cx.quotient(&nn, &zero);
            out.extend(cx.isomorphic("Λ/M** ≅ N (char ∤ n+1)", &lam, &mss, &nh));
        }
    } else {
        out.push(cx.eq("N ∩ M** = U (char 2)", &u, &cap(&nn, &mss)));
        out.push(cx.dim("dim(N + M**) = n³/2 + n²/2 + n (char 2)", (n3 + n2) / 2 + n1, &nm));
        out.push(cx.irreducible("(N + M**)/M** irreducible (char 2)", &nm, &mss));
        out.extend(cx.isomorphic("K/U ≅ V̂ (char 2 diamond)", &k, &u, &vh));
        out.extend(cx.isomorphic("C/N ≅ V̂ (char 2 diamond)", &c, &nn, &vh));
        if n.is_multiple_of(2) {
            out.push(cx.irreducible("U irreducible (char 2, n even)", &u, &zero));
            let uh = cx.quotient(&u, &zero);
            out.extend(cx.isomorphic("Λ/(N + M**) ≅ U (char 2, n even)", &lam, &nm, &uh));
            let tm = sum(&tct, &mss);
            out.push(cx.truth(
                "(T ∩ T~) + M** properly contains N + M** (char 2, n even)",
                tm.contains_subspace(&nm) && tm.dim() > nm.dim(),
            ));
        } else {
            let tm = sum(&tct, &mss);
            out.push(cx.dim("dim((T ∩ T~) + M**) = n³ - n (char 2, n odd)", n3 - n1, &tm));
            out.push(cx.truth(
                "(T ∩ T~) + M** properly contains N + M** (char 2, n odd)",
                tm.contains_subspace(&nm) && tm.dim() > nm.dim(),
            ));
            out.push(cx.irreducible("((T ∩ T~) + M**)/(N + M**) irreducible (char 2, n odd)", &tm, &nm));
            out.push(cx.irreducible("Λ/((T ∩ T~) + M**) irreducible (char 2, n odd)", &lam, &tm));
            out.push(Claim::compare(
                cx.tag("factor dims of Λ/(N + M**) match those of U (char 2, n odd)"),
                A,
                json!([m11.dim(), u.dim() - m11.dim()]),
                json!([tm.dim() - nm.dim(), n3 - tm.dim()]),
            ));
            out.push(cx.irreducible("U/Mstar(1,1) irreducible (char 2, n odd)", &u, &m11));
        }
    }
    out
}
