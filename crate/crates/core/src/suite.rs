//! Verification suites keyed by anchor, and the grid runner behind `verify-all`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::canon::{self, field_label, ModuleId, ProjectivePoint, SMALL_FIELD};
use crate::exactla::Subspace;
use crate::gfield::{char_divides, Field, GaloisField};
use crate::report::{Claim, Report, Status, ANCHORS};
use crate::spinmx::{
    composition_series, count_composition_series, factors_json, hom_dim, spin, survey_submodules,
    verify_lattice_diagrams, GeneratorSet, LambdaAction, ModuleHandle, Verdict,
};
use crate::{degen, gamma2};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub ns: Vec<usize>,
    pub fields: Vec<String>,
    pub seed: u64,
    pub budget: u64,
    /// Anchors to run; empty means all.
    pub anchors: Vec<String>,
    pub lindeg_pairs: usize,
    pub reach_samples: usize,
    #[serde(skip)]
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            ns: vec![3],
            fields: vec!["3".into(), "4".into(), "5".into()],
            seed: 1,
            budget: crate::spinmx::DEFAULT_BUDGET,
            anchors: Vec::new(),
            lindeg_pairs: 100,
            reach_samples: 50,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("n must be at least 3 (got {0})")]
    SmallN(usize),
    #[error("unknown anchor {0:?}")]
    Anchor(String),
    #[error("bad field spec {0:?}: {1}")]
    Field(String, String),
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<Vec<GaloisField>, ConfigError> {
        if let Some(&n) = self.ns.iter().find(|&&n| n < 3) {
            return Err(ConfigError::SmallN(n));
        }
        if let Some(a) = self.anchors.iter().find(|a| !ANCHORS.contains(&a.as_str())) {
            return Err(ConfigError::Anchor(a.clone()));
        }
        self.fields
            .iter()
            .map(|s| crate::gfield::parse_field_spec(s).map_err(|e| ConfigError::Field(s.clone(), e.to_string())))
            .collect()
    }

    fn wants(&self, anchor: &str) -> bool {
        self.anchors.is_empty() || self.anchors.iter().any(|a| a == anchor)
    }
}

fn tagger(n: usize, field: &GaloisField) -> impl Fn(&str) -> String {
    let label = field_label(field);
    move |s: &str| format!("{s} [n={n}, {label}]")
}

/// Closed-form dimensions against null spaces of the defining conditions,
/// and the explicit bases against the same null spaces.
pub fn dims_suite(n: usize, field: &GaloisField) -> Vec<Claim> {
    const A: &str = "dims";
    let tag = tagger(n, field);
    let mut out = Vec::new();
    for id in canon::TABLE_MODULES {
        let by_cond = canon::by_conditions(field, n, id).expect("no point");
        let explicit = canon::build(field, n, id).expect("no point");
        out.push(Claim::compare(tag(&format!("dim {id}")), A, json!(canon::expected_dim(n, id)), json!(by_cond.dim())));
        out.push(Claim::subspace_eq(tag(&format!("{id}: explicit basis spans the solution space")), A, &by_cond, &explicit));
    }
    out
}

/// `η(FG) = U` and `δ(FG) = N`.
pub fn spin_suite(n: usize, field: &GaloisField) -> Vec<Claim> {
    const A: &str = "spin-identities";
    let tag = tagger(n, field);
    if field.size() <= 2 {
        return vec![Claim::skipped(tag("spin identities"), A, SMALL_FIELD)];
    }
    let gens = GeneratorSet::standard(field, n);
    let u = canon::build(field, n, ModuleId::U).expect("valid");
    let nn = canon::build(field, n, ModuleId::N).expect("valid");
    vec![
        Claim::subspace_eq(tag("spin(η) = U"), A, &u, &spin(&canon::eta(field, n), &gens)),
        Claim::subspace_eq(tag("spin(δ) = N"), A, &nn, &spin(&canon::delta(field, n), &gens)),
    ]
}

fn lines_of(field: &GaloisField, dim: usize) -> Option<u64> {
    let q = field.size() as u64;
    q.checked_pow(dim as u32).map(|t| (t - 1) / (q - 1))
}

/// Exhaustive submodule lists of `K` (when `char ∤ n−1`) and `M*`.
pub fn survey_suite(n: usize, field: &GaloisField, budget: u64) -> Vec<Claim> {
    const A: &str = "submodule-survey";
    let tag = tagger(n, field);
    if field.size() <= 2 {
        return vec![Claim::skipped(tag("submodule survey"), A, SMALL_FIELD)];
    }
    let gens = GeneratorSet::standard(field, n);
    let action = LambdaAction::new(gens);
    let mut out = Vec::new();
    let mstar_points: Vec<Subspace<GaloisField>> = ProjectivePoint::all(field)
        .iter()
        .map(|p| canon::basis_mstar_p(field, n, p))
        .collect();
    let mut cases = vec![("M*", ModuleId::Mstar, mstar_points)];
    if !char_divides(field.characteristic(), n as i64 - 1) && field.characteristic() != 2 {
        let k_expect = vec![
            canon::build(field, n, ModuleId::U).expect("valid"),
            canon::build(field, n, ModuleId::MstarP(1, -1)).expect("valid"),
        ];
        cases.insert(0, ("K", ModuleId::K, k_expect));
    }
    for (name, id, proper) in cases {
        let carrier = canon::build(field, n, id).expect("valid");
        let label = tag(&format!("proper nonzero submodules of {name}"));
        match lines_of(field, carrier.dim()) {
            Some(l) if l <= budget => {}
            _ => {
                out.push(Claim::skipped(label, A, "line count exceeds the enumeration budget"));
                continue;
            }
        }
        let m = ModuleHandle::submodule(&action, &carrier).expect("stable");
        match survey_submodules(&m, budget) {
            Ok(all) => {
                let mut got: Vec<Subspace<GaloisField>> = all
                    .iter()
                    .filter(|s| !s.is_zero() && !s.is_full())
                    .map(|s| m.lift(s))
                    .collect();
                got.sort();
                let mut want = proper.clone();
                want.sort();
                want.dedup();
                let names = |v: &[Subspace<GaloisField>]| v.iter().map(|s| s.dim()).collect::<Vec<_>>();
                let status = if got == want { Status::Verified } else { Status::Falsified };
                let mut c = Claim::new(label, A, status);
                c.expected = json!({"count": want.len(), "dims": names(&want)});
                c.computed = json!({"count": got.len(), "dims": names(&got)});
                out.push(c.with_data(json!({"submodules": got.iter().map(|s| s.to_json()).collect::<Vec<_>>()})));
            }
            Err(e) => out.push(Claim::inconclusive(label, A, json!({"error": e.to_string()}))),
        }
    }
    out
}

/// A chain of named canonical modules from `0` to the top.
pub type Chain = Vec<ModuleId>;

/// Composition series predicted for `(n, F)`.
pub fn predicted_chains(n: usize, field: &GaloisField) -> Vec<Chain> {
    use ModuleId::*;
    let p = field.characteristic();
    let ni = n as i64;
    if p == 2 {
        if n % 2 == 1 {
            vec![
                vec![Zero, MstarP(1, 1), U, K, C],
                vec![Zero, MstarP(1, 1), U, N, C],
            ]
        } else {
            vec![vec![Zero, U, K, C], vec![Zero, MstarP(1, 1), K, C], vec![Zero, U, N, C]]
        }
    } else {
        let mut out = if char_divides(p, ni - 1) {
            vec![vec![Zero, MstarP(1, -1), U, K]]
        } else {
            vec![vec![Zero, U, K], vec![Zero, MstarP(1, -1), K]]
        };
        if char_divides(p, ni + 1) {
            out.push(vec![Zero, MstarP(1, 1), N, C]);
        } else {
            out.push(vec![Zero, N, C]);
            out.push(vec![Zero, MstarP(1, 1), C]);
        }
        out
    }
}

pub fn chain_label(chain: &[ModuleId]) -> String {
    chain.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ⊂ ")
}

/// Certifies every factor of `chain` irreducible; a reducible factor
/// falsifies the claim and an undecided one leaves it inconclusive.
pub fn certify_chain(n: usize, field: &GaloisField, chain: &[ModuleId], seed: u64, budget: u64) -> Claim {
    const A: &str = "composition-series";
    let tag = tagger(n, field);
    let label = tag(&format!("composition series {}", chain_label(chain)));
    if field.size() <= 2 {
        return Claim::skipped(label, A, SMALL_FIELD);
    }
    let action = LambdaAction::new(GeneratorSet::standard(field, n));
    let named: Vec<(String, Subspace<GaloisField>)> =
        chain.iter().map(|&id| (id.to_string(), canon::build(field, n, id).expect("valid"))).collect();
    match composition_series(&action, &named, seed, budget) {
        Ok(factors) => {
            let verdicts: Vec<&str> = factors.iter().map(|f| f.verdict.label()).collect();
            let status = if factors.iter().any(|f| matches!(f.verdict, Verdict::Reducible { .. })) {
                Status::Falsified
            } else if factors.iter().all(|f| f.verdict.is_irreducible()) {
                Status::Verified
            } else {
                Status::Inconclusive
            };
            let mut c = Claim::new(label, A, status);
            c.expected = json!(vec!["irreducible"; factors.len()]);
            c.computed = json!(verdicts);
            c.with_data(json!({"factors": factors_json(&factors)}))
        }
        Err(e) => Claim::new(label, A, Status::Falsified).with_data(json!({"error": e.to_string()})),
    }
}

/// Counts every composition series of the top of `chain`, using the
/// factors of `chain` as the list of simple modules up to isomorphism.
pub fn count_series(n: usize, field: &GaloisField, chain: &[ModuleId], budget: u64) -> Result<u64, String> {
    let action = LambdaAction::new(GeneratorSet::standard(field, n));
    let subs: Vec<Subspace<GaloisField>> = chain.iter().map(|&id| canon::build(field, n, id).expect("valid")).collect();
    let mut simples: Vec<ModuleHandle<GaloisField>> = Vec::new();
    for w in subs.windows(2) {
        let s = ModuleHandle::subquotient(&action, &w[1], &w[0]).map_err(|e| e.to_string())?;
        let mut known = false;
        for t in &simples {
            if t.dim() == s.dim() && hom_dim(&s, t).map_err(|e| e.to_string())? > 0 {
                known = true;
                break;
            }
        }
        if !known {
            simples.push(s);
        }
    }
    let top = ModuleHandle::submodule(&action, subs.last().expect("nonempty")).map_err(|e| e.to_string())?;
    count_composition_series(&top, &simples, budget).map_err(|e| e.to_string())
}

pub fn series_suite(n: usize, field: &GaloisField, seed: u64, budget: u64) -> Vec<Claim> {
    const A: &str = "composition-series";
    if field.size() <= 2 {
        return vec![Claim::skipped(tagger(n, field)("composition series"), A, SMALL_FIELD)];
    }
    let chains = predicted_chains(n, field);
    let mut out: Vec<Claim> = chains
        .iter()
        .enumerate()
        .map(|(i, c)| certify_chain(n, field, c, seed.wrapping_add(i as u64 * 1000), budget))
        .collect();
    let mut tops: Vec<ModuleId> = chains.iter().map(|c| *c.last().expect("nonempty")).collect();
    tops.dedup();
    for top in tops {
        let mine: Vec<&Chain> = chains.iter().filter(|c| c.last() == Some(&top)).collect();
        let label = tagger(n, field)(&format!("number of composition series of {top}"));
        out.push(match count_series(n, field, mine[0], budget) {
            Ok(k) => Claim::compare(label, A, json!(mine.len()), json!(k)),
            Err(e) => Claim::inconclusive(label, A, json!({"error": e})),
        });
    }
    out
}

pub fn gamma_suite(n: usize, field: &GaloisField, seed: u64, budget: u64) -> Vec<Claim> {
    let mut out = gamma2::gamma_properties(n, field, seed);
    if field.characteristic() == 2 {
        out.extend(gamma2::verify_gamma_irreducible(n, field, seed, budget));
    }
    out
}

/// Runs the anchor's suite at one grid point.
pub fn run_anchor(anchor: &str, n: usize, field: &GaloisField, cfg: &SuiteConfig, seed: u64) -> Vec<Claim> {
    match anchor {
        "dims" => dims_suite(n, field),
        "spin-identities" => spin_suite(n, field),
        "intersections" => canon::intersection_table(n, field),
        "linear-degeneration" => {
            let mut v = degen::lindeg_suite(n, field, cfg.lindeg_pairs, seed);
            v.extend(degen::lindeg_examples(n, field, seed));
            v
        }
        "transvection-reach" => degen::reach_suite(n, field, cfg.reach_samples, seed),
        "submodule-survey" => survey_suite(n, field, cfg.budget),
        "composition-series" => series_suite(n, field, seed, cfg.budget),
        "gamma-v" => gamma_suite(n, field, seed, cfg.budget),
        "lattice-diagrams" => verify_lattice_diagrams(n, field, seed, cfg.budget),
        "trace-biconditional" => canon::trace_biconditional(n, field),
        _ => Vec::new(),
    }
}

fn mix(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, &p| (h ^ p).wrapping_mul(0x1000_0000_01b3).rotate_left(17))
}

/// Every selected anchor over the `n × field` grid; output order is fixed
/// by the grid, independent of scheduling.
pub fn verify_all(cfg: &SuiteConfig) -> Result<Report, ConfigError> {
    let fields = cfg.validate()?;
    let mut tasks = Vec::new();
    for &n in &cfg.ns {
        for (fi, f) in fields.iter().enumerate() {
            for (ai, a) in ANCHORS.iter().enumerate() {
                if cfg.wants(a) {
                    tasks.push((n, fi, f, ai, *a));
                }
            }
        }
    }
    let results: Vec<Vec<Claim>> = tasks
        .par_iter()
        .map(|&(n, fi, f, ai, a)| {
            let seed = mix(cfg.seed, &[n as u64, fi as u64, ai as u64]);
            let t = Instant::now();
            let mut claims = run_anchor(a, n, f, cfg, seed);
            if cfg.timings {
                let ms = t.elapsed().as_millis() as u64;
                for c in &mut claims {
                    c.wall_ms = Some(ms);
                }
            }
            claims
        })
        .collect();
    let mut report = Report::new("verify-all", serde_json::to_value(cfg).expect("config serializes"));
    for r in results {
        report.extend(r);
    }
    Ok(report)
}

/// Claims grouped by anchor with status counts.
pub fn summarize(report: &Report) -> Value {
    let mut m = serde_json::Map::new();
    for a in ANCHORS {
        let cs: Vec<&Claim> = report.claims.iter().filter(|c| c.anchor == a).collect();
        if cs.is_empty() {
            continue;
        }
        let count = |s| cs.iter().filter(|c| c.status == s).count();
        m.insert(
            a.to_string(),
            json!({
                "verified": count(Status::Verified),
                "falsified": count(Status::Falsified),
                "inconclusive": count(Status::Inconclusive),
                "skipped": count(Status::Skipped),
            }),
        );
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        let cfg = SuiteConfig { ns: vec![2], ..Default::default() };
        assert_eq!(cfg.validate().unwrap_err(), ConfigError::SmallN(2));
        let cfg = SuiteConfig { fields: vec!["q".into()], ..Default::default() };
        assert!(matches!(cfg.validate(), Err(ConfigError::Field(..))));
        let cfg = SuiteConfig { anchors: vec!["nope".into()], ..Default::default() };
        assert!(matches!(cfg.validate(), Err(ConfigError::Anchor(_))));
    }

    #[test]
    fn gf2_is_skipped() {
        let f = GaloisField::new(2, 1).unwrap();
        let cfg = SuiteConfig::default();
        for a in ["spin-identities", "intersections", "linear-degeneration", "transvection-reach"] {
            let claims = run_anchor(a, 3, &f, &cfg, 1);
            assert!(claims.iter().all(|c| c.status == Status::Skipped), "{a}");
            assert_eq!(claims[0].data["reason"], SMALL_FIELD);
        }
    }

    #[test]
    fn dims_and_spins_small() {
        let f = GaloisField::new(3, 1).unwrap();
        assert!(dims_suite(3, &f).iter().all(|c| c.passed()));
        assert!(spin_suite(3, &f).iter().all(|c| c.passed()));
    }

    #[test]
    fn series_counts() {
        let f3 = GaloisField::new(3, 1).unwrap();
        let k_chains = predicted_chains(3, &f3);
        assert_eq!(count_series(3, &f3, &k_chains[0], 1 << 20).unwrap(), 2);
        let f4 = GaloisField::new(2, 2).unwrap();
        let c = predicted_chains(3, &f4);
        assert_eq!(count_series(3, &f4, &c[0], 1 << 20).unwrap(), 2);
    }

    #[test]
    fn chain_with_reducible_factor_is_falsified() {
        let f = GaloisField::new(2, 2).unwrap();
        let c = certify_chain(3, &f, &[ModuleId::Zero, ModuleId::U, ModuleId::N, ModuleId::C], 1, 1 << 20);
        assert_eq!(c.status, Status::Falsified);
        assert_eq!(c.computed[0], "reducible");
    }
}
