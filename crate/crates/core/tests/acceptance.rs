//! Acceptance inventory: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use algdeg_core::canon::ModuleId;
use algdeg_core::gfield::parse_field_spec;
use algdeg_core::report::{Claim, Status};
use algdeg_core::suite::{self, SuiteConfig};

const SIX: [&str; 6] = ["3", "4", "5", "7", "8", "9"];

fn run(anchor: &str, ns: &[usize], fields: &[&str]) -> Vec<Claim> {
    let cfg = SuiteConfig {
        ns: ns.to_vec(),
        fields: fields.iter().map(|s| s.to_string()).collect(),
        anchors: vec![anchor.to_string()],
        ..Default::default()
    };
    suite::verify_all(&cfg).expect("valid config").claims
}

fn failures(claims: &[Claim]) -> (usize, Vec<String>) {
    let mut out: Vec<String> = claims
        .iter()
        .filter(|c| c.status != Status::Verified)
        .map(|c| format!("{:?}: {} (computed {})", c.status, c.name, c.computed))
        .collect();
    if claims.is_empty() {
        out.push("no claims produced".into());
    }
    (claims.len(), out)
}

fn grid(anchor: &str, points: &[(usize, &str)]) -> Vec<Claim> {
    points.iter().flat_map(|&(n, f)| run(anchor, &[n], &[f])).collect()
}

fn series_counts() -> Vec<String> {
    use ModuleId::*;
    let cases: [(usize, &str, Vec<ModuleId>, u64); 4] = [
        (3, "5", vec![Zero, U, K], 2),
        (4, "3", vec![Zero, MstarP(1, -1), U, K], 1),
        (3, "4", vec![Zero, MstarP(1, 1), U, K, C], 2),
        (4, "4", vec![Zero, U, K, C], 3),
    ];
    let mut out = Vec::new();
    for (n, f, chain, want) in cases {
        let field = parse_field_spec(f).unwrap();
        match suite::count_series(n, &field, &chain, 1 << 22) {
            Ok(k) if k == want => {}
            Ok(k) => out.push(format!("n={n} GF({f}): {k} composition series, expected {want}")),
            Err(e) => out.push(format!("n={n} GF({f}): {e}")),
        }
    }
    out
}

fn main() -> ExitCode {
    type Check = Box<dyn Fn() -> (usize, Vec<String>)>;
    let criteria: Vec<(&str, Check)> = vec![
        ("dimension table", Box::new(|| failures(&run("dims", &[3, 4, 5], &SIX)))),
        ("spin identities", Box::new(|| failures(&run("spin-identities", &[3, 4], &SIX)))),
        ("intersection table", Box::new(|| failures(&run("intersections", &[3, 4], &SIX)))),
        ("linear degeneration", Box::new(|| failures(&run("linear-degeneration", &[3], &SIX)))),
        ("transvection reach", Box::new(|| failures(&run("transvection-reach", &[3, 4], &["3", "4", "5"])))),
        ("submodule survey", Box::new(|| failures(&run("submodule-survey", &[3], &["3"])))),
        (
            "composition series",
            Box::new(|| {
                let claims = grid("composition-series", &[(3, "5"), (4, "3"), (3, "4"), (4, "4")]);
                let (k, mut out) = failures(&claims);
                out.extend(series_counts());
                (k + 4, out)
            }),
        ),
        ("gamma module", Box::new(|| failures(&run("gamma-v", &[3, 4], &["4", "8"])))),
        ("lattice diagrams", Box::new(|| failures(&run("lattice-diagrams", &[3, 4], &["3", "4", "5"])))),
        (
            "trace biconditional",
            Box::new(|| failures(&grid("trace-biconditional", &[(4, "5"), (3, "5"), (3, "7")]))),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (checked, problems) = check();
        let verdict = if problems.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {name}: {verdict} ({checked} claims, {:.1?})", i + 1, t.elapsed());
        for p in &problems {
            println!("    {p}");
        }
        failed += usize::from(!problems.is_empty());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
