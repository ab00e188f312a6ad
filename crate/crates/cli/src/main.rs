use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use algdeg_core::canon::{self, field_label, ModuleId};
use algdeg_core::degen;
use algdeg_core::exactla::Subspace;
use algdeg_core::gamma2;
use algdeg_core::gfield::{parse_field_spec, Field, GaloisField};
use algdeg_core::report::{Claim, Report, Status};
use algdeg_core::spinmx::{self, GeneratorSet, LambdaAction, ModuleHandle, DEFAULT_BUDGET};
use algdeg_core::structvec::StructureVector;
use algdeg_core::suite::{self, SuiteConfig};

#[derive(Parser)]
#[command(name = "algdeg", version, about = "Submodule structure of the space of n-dimensional algebra structures")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Dimension of V (at least 3).
    #[arg(long, global = true, default_value_t = 3)]
    n: usize,
    /// Field as "p", "q" (a prime power) or "p^k".
    #[arg(long, global = true, default_value = "5")]
    field: String,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Maximum number of lines enumerated by exhaustive searches.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Record wall-clock milliseconds per claim.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimensions of the canonical submodules.
    Dims,
    /// Canonical submodules: list, show one, or check the intersection table.
    Canon {
        #[arg(long)]
        list: bool,
        #[arg(long)]
        check_intersections: bool,
        /// Print the basis of one module (e.g. K, Mstar, MstarP:1,-1).
        #[arg(long)]
        module: Option<String>,
    },
    /// Spin a vector under G and compare with a module.
    Spin {
        /// eta, delta, epsK, epstK, witness, a term list like 123-213, or JSON.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Enumerate every submodule of a canonical module.
    Survey {
        #[arg(long)]
        module: String,
    },
    /// Certify a chain of canonical modules as a composition series.
    Series {
        /// Comma-separated chain starting at 0, e.g. 0,MstarP:1,-1,U,K; omit for the predicted chains.
        #[arg(long, allow_hyphen_values = true)]
        chain: Option<String>,
    },
    /// Verify the submodule lattice diagrams and filtration factors.
    Lattice,
    /// Linear degenerations.
    Degen {
        #[command(subcommand)]
        op: DegenCmd,
    },
    /// The semilinear-map module in characteristic 2.
    Gamma {
        /// Also verify irreducibility by replay and MeatAxe.
        #[arg(long)]
        verify: bool,
    },
    /// Run every suite over a grid of dimensions and fields.
    VerifyAll {
        #[arg(long, value_delimiter = ',')]
        ns: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        fields: Vec<String>,
        /// Restrict to these anchors.
        #[arg(long, value_delimiter = ',')]
        anchors: Vec<String>,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum DegenCmd {
    /// Truncate by q and check the result lies in the orbit span.
    Q {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Vec<i64>,
    },
    /// Reach eta from a vector of M** outside M*.
    ReachEta {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Reach delta from a vector of C outside M**.
    ReachDelta {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn module_id(s: &str) -> Result<ModuleId, Usage> {
    ModuleId::from_str(s).map_err(|e| Usage(e.to_string()))
}

fn base_config(c: &Common, field: &GaloisField) -> Value {
    json!({"n": c.n, "field": field_label(field), "seed": c.seed, "budget": c.budget})
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.common.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(report) => {
            print_report(&report);
            if let Some(path) = &cli.common.json {
                if let Err(e) = std::fs::write(path, report.to_json_string()) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Report, Usage> {
    let c = &cli.common;
    if let Cmd::VerifyAll { ns, fields, anchors, pairs, samples } = &cli.cmd {
        let cfg = SuiteConfig {
            ns: if ns.is_empty() { vec![c.n] } else { ns.clone() },
            fields: if fields.is_empty() { SuiteConfig::default().fields } else { fields.clone() },
            seed: c.seed,
            budget: c.budget,
            anchors: anchors.clone(),
            lindeg_pairs: *pairs,
            reach_samples: *samples,
            timings: c.timings,
        };
        return Ok(suite::verify_all(&cfg)?);
    }
    if c.n < 3 {
        return Err(Usage(format!("n must be at least 3 (got {})", c.n)));
    }
    let field = parse_field_spec(&c.field)?;
    let n = c.n;
    let started = Instant::now();
    let (name, extra, claims) = match &cli.cmd {
        Cmd::Dims => {
            print_dims(n, &field);
            ("dims", json!({}), suite::dims_suite(n, &field))
        }
        Cmd::Canon { list, check_intersections, module } => {
            let mut claims = Vec::new();
            if let Some(m) = module {
                let id = module_id(m)?;
                let s = canon::build(&field, n, id)?;
                println!("{id}: dim {}", s.dim());
                for b in s.basis() {
                    println!("  {}", StructureVector::from_coords(&field, n, b.clone())?);
                }
                claims.push(
                    Claim::compare(format!("dim {id}"), "dims", json!(canon::expected_dim(n, id)), json!(s.dim()))
                        .with_data(canon::module_json(id, &s)),
                );
            }
            if *check_intersections {
                claims.extend(canon::intersection_table(n, &field));
                claims.extend(canon::trace_biconditional(n, &field));
            }
            if *list || (module.is_none() && !check_intersections) {
                print_dims(n, &field);
                claims.extend(suite::dims_suite(n, &field));
            }
            ("canon", json!({"module": module, "check_intersections": check_intersections}), claims)
        }
        Cmd::Spin { vector, expect } => {
            let v = canon::named_vector(&field, n, vector)?;
            let gens = GeneratorSet::standard(&field, n);
            let s = spinmx::spin(&v, &gens);
            println!("spin({v}) has dimension {}", s.dim());
            let claim = match expect {
                Some(m) => {
                    let id = module_id(m)?;
                    let want = canon::build(&field, n, id)?;
                    Claim::subspace_eq(format!("spin({vector}) = {id} [n={n}, {}]", field_label(&field)), "spin-identities", &want, &s)
                }
                None => {
                    let named = name_subspace(&field, n, &s);
                    let mut cl = Claim::new(format!("spin({vector}) [n={n}, {}]", field_label(&field)), "spin-identities", Status::Verified);
                    cl.computed = json!({"dim": s.dim(), "equals": named});
                    cl
                }
            };
            ("spin", json!({"vector": vector, "expect": expect}), vec![claim])
        }
        Cmd::Survey { module } => {
            let id = module_id(module)?;
            ("survey", json!({"module": module}), survey(n, &field, id, c.budget)?)
        }
        Cmd::Series { chain } => {
            let claims = match chain {
                None => suite::series_suite(n, &field, c.seed, c.budget),
                Some(ch) => {
                    let ids = split_chain(ch).iter().map(|s| module_id(s)).collect::<Result<Vec<_>, _>>()?;
                    vec![suite::certify_chain(n, &field, &ids, c.seed, c.budget)]
                }
            };
            for cl in &claims {
                if let Some(fs) = cl.data.get("factors").and_then(|f| f.as_array()) {
                    println!("{}", cl.name);
                    for f in fs {
                        println!("  {:<24} dim {:<5} {}", f["factor"].as_str().unwrap_or(""), f["dim"], f["verdict"].as_str().unwrap_or(""));
                    }
                }
            }
            ("series", json!({"chain": chain}), claims)
        }
        Cmd::Lattice => ("lattice", json!({}), spinmx::verify_lattice_diagrams(n, &field, c.seed, c.budget)),
        Cmd::Degen { op } => degen_cmd(op, n, &field)?,
        Cmd::Gamma { verify } => {
            if field.characteristic() != 2 {
                return Err(Usage("gamma requires a field of characteristic 2".into()));
            }
            let claims = if *verify {
                suite::gamma_suite(n, &field, c.seed, c.budget)
            } else {
                gamma2::gamma_properties(n, &field, c.seed)
            };
            ("gamma", json!({"verify": verify}), claims)
        }
        Cmd::VerifyAll { .. } => unreachable!("handled above"),
    };
    let mut config = base_config(c, &field);
    if let (Value::Object(m), Value::Object(e)) = (&mut config, extra) {
        m.extend(e);
    }
    let mut report = Report::new(name, config);
    let ms = started.elapsed().as_millis() as u64;
    report.extend(claims.into_iter().map(|mut cl| {
        if c.timings {
            cl.wall_ms = Some(ms);
        }
        cl
    }));
    Ok(report)
}

fn degen_cmd(op: &DegenCmd, n: usize, field: &GaloisField) -> Result<(&'static str, Value, Vec<Claim>), Usage> {
    let gens = GeneratorSet::standard(field, n);
    let tag = |s: &str| format!("{s} [n={n}, {}]", field_label(field));
    Ok(match op {
        DegenCmd::Q { lambda, q } => {
            let l = canon::named_vector(field, n, lambda)?;
            let t = degen::q_truncate(&l, q)?;
            let chk = degen::lindeg_theorem_check(&l, q)?;
            let member = degen::verify_lindeg(&l, q, &gens)?;
            println!("λ(q) = {t}");
            println!("max weight {}, vanishing precondition {}, applicable {}", chk.max_weight, chk.vanishing, chk.applicable);
            println!("λ(q) in λ(FG): {member}");
            let data = json!({"truncated": t.to_json(), "max_weight": chk.max_weight, "vanishing": chk.vanishing, "member": member});
            let name = tag("λ(q) ∈ λ(FG)");
            let claim = if chk.applicable {
                Claim::truth(name, "linear-degeneration", member).with_data(data)
            } else {
                let mut cl = Claim::skipped(name, "linear-degeneration", "theorem hypotheses do not hold");
                cl.data["details"] = data;
                cl
            };
            ("degen", json!({"op": "q", "lambda": lambda, "q": q}), vec![claim])
        }
        DegenCmd::ReachEta { lambda } | DegenCmd::ReachDelta { lambda } => {
            let l = canon::named_vector(field, n, lambda)?;
            let (op_name, cert) = if matches!(op, DegenCmd::ReachEta { .. }) {
                ("reach-eta", degen::reach_eta(&l, &gens)?)
            } else {
                ("reach-delta", degen::reach_delta(&l, &gens)?)
            };
            println!("branch {}; result {}", cert.branch, cert.result);
            println!("constructive {}, spin membership {}", cert.constructive, cert.spin_oracle);
            let claim = Claim::truth(tag(&format!("{} reached from {lambda}", cert.target)), "transvection-reach", cert.success())
                .with_data(cert.to_json());
            ("degen", json!({"op": op_name, "lambda": lambda}), vec![claim])
        }
    })
}

fn survey(n: usize, field: &GaloisField, id: ModuleId, budget: u64) -> Result<Vec<Claim>, Usage> {
    let action = LambdaAction::new(GeneratorSet::standard(field, n));
    let carrier = canon::build(field, n, id)?;
    let m = ModuleHandle::submodule(&action, &carrier)?;
    let label = format!("submodules of {id} [n={n}, {}]", field_label(field));
    match spinmx::survey_submodules(&m, budget) {
        Ok(all) => {
            let mut rows = Vec::new();
            for s in &all {
                let lifted = m.lift(s);
                let named = name_subspace(field, n, &lifted);
                println!("  dim {:<5} {}", lifted.dim(), named.as_deref().unwrap_or("-"));
                rows.push(json!({"dim": lifted.dim(), "equals": named, "subspace": lifted.to_json()}));
            }
            let mut cl = Claim::new(label, "submodule-survey", Status::Verified);
            cl.computed = json!({"count": all.len()});
            Ok(vec![cl.with_data(json!({"submodules": rows}))])
        }
        Err(e) => Ok(vec![Claim::inconclusive(label, "submodule-survey", json!({"error": e.to_string()}))]),
    }
}

/// Splits on commas outside parentheses, keeping `MstarP:a,d` whole.
fn split_chain(s: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 && !(cur.starts_with("MstarP:") && !cur.contains(',')) {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out.into_iter().map(|t| t.trim().to_string()).collect()
}

/// The canonical module equal to `s`, if any.
fn name_subspace(field: &GaloisField, n: usize, s: &Subspace<GaloisField>) -> Option<String> {
    let mut ids = vec![ModuleId::Zero, ModuleId::Lambda];
    ids.extend(canon::TABLE_MODULES);
    if let Some(id) = ids.into_iter().find(|&id| canon::build(field, n, id).map(|b| &b == s).unwrap_or(false)) {
        return Some(id.to_string());
    }
    canon::ProjectivePoint::all(field)
        .into_iter()
        .find(|p| &canon::basis_mstar_p(field, n, p) == s)
        .map(|p| p.label())
}

fn print_dims(n: usize, field: &GaloisField) {
    println!("{:<10} {:>12} {:>10}", "module", "closed form", "computed");
    for id in canon::TABLE_MODULES {
        let got = canon::by_conditions(field, n, id).map(|s| s.dim()).unwrap_or(0);
        println!("{:<10} {:>12} {:>10}", id.to_string(), canon::expected_dim(n, id), got);
    }
}

fn print_report(r: &Report) {
    for c in &r.claims {
        let mark = match c.status {
            Status::Verified => "ok",
            Status::Falsified => "FAIL",
            Status::Inconclusive => "??",
            Status::Skipped => "skip",
        };
        let detail = match c.status {
            Status::Falsified => format!("  expected {} got {}", c.expected, c.computed),
            Status::Skipped | Status::Inconclusive => format!("  {}", c.data.get("reason").or(c.data.get("error")).unwrap_or(&Value::Null)),
            _ => String::new(),
        };
        println!("{mark:<5} {:<20} {}{detail}", c.anchor, c.name);
    }
    println!(
        "{} verified, {} falsified, {} inconclusive, {} skipped",
        r.count(Status::Verified),
        r.count(Status::Falsified),
        r.count(Status::Inconclusive),
        r.count(Status::Skipped)
    );
}
