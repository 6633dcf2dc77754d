//! Batch front end: parse instance configs, run computations and check
//! suites, emit machine-readable (`report.json`) and human-readable
//! (`report.md`) reports.
//!
//! Exit codes: 0 success / all checks pass; 1 some check failed; 2 invalid
//! configuration; 3 unsupported instance (e.g. an oracle task on an infinite
//! ring); 4 a verify run with no failures but inconclusive entries.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use koszul_cech::adic::{limits, LimitValue, LimitsResult};
use koszul_cech::cech::{cech_cohomology_oracle, derived_completion_koszul, proregular_check};
use koszul_cech::koszul::KoszulVariant;
use koszul_cech::verify::{run_check, run_suite, InstanceConfig, ModuleSpec, SuiteReport, Verdict};
use koszul_cech::{Error, ModuleClassification};

#[derive(Parser)]
#[command(name = "koszul-cech", version, about = "Exact Koszul-avatar computations of Cech cohomology, local cohomology and derived completion over small commutative rings, with machine checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the computations listed in a job config and write reports.
    Compute {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a check suite; deterministic report regardless of --jobs.
    Verify {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the brute-force Cech cohomology table only.
    Oracle {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Truncation {
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    m: Option<usize>,
    #[serde(default)]
    n_max: Option<usize>,
    #[serde(default)]
    m_max: Option<usize>,
    #[serde(default)]
    window: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobConfig {
    ring: String,
    #[serde(default)]
    module: Option<ModuleSpec>,
    sequence: Vec<String>,
    #[serde(default)]
    y: Option<String>,
    #[serde(default)]
    truncation: Option<Truncation>,
    tasks: Vec<Task>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Task {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    compute: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    check: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    suite: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    entries: Vec<SuiteEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteEntry {
    check: String,
    instance: InstanceConfig,
}

impl JobConfig {
    fn instance(&self) -> InstanceConfig {
        let t = self.truncation.clone().unwrap_or(Truncation {
            n: None,
            m: None,
            n_max: None,
            m_max: None,
            window: None,
        });
        InstanceConfig {
            ring: self.ring.clone(),
            module: self.module.clone(),
            sequence: self.sequence.clone(),
            y: self.y.clone(),
            n: t.n,
            m: t.m,
            n_max: t.n_max,
            m_max: t.m_max,
            window: t.window,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if self.sequence.is_empty() {
            return Err(Error::InvalidConfig("sequence must not be empty".into()));
        }
        if self.tasks.is_empty() {
            return Err(Error::InvalidConfig("tasks must not be empty".into()));
        }
        for t in &self.tasks {
            let set = [t.compute.is_some(), t.check.is_some(), t.suite.is_some()];
            if set.iter().filter(|b| **b).count() != 1 {
                return Err(Error::InvalidConfig(
                    "each task must have exactly one of compute/check/suite".into(),
                ));
            }
            if let Some(c) = &t.compute {
                if !["localCohomology", "derivedCompletion", "koszulTable", "proregular"]
                    .contains(&c.as_str())
                {
                    return Err(Error::InvalidConfig(format!("unknown compute task {}", c)));
                }
            }
        }
        // the instance must resolve (ring literal, module, element literals)
        koszul_cech::verify::resolve_instance(&self.instance()).map(|_| ())
    }
}

fn limits_json(l: &LimitsResult, cohomological: bool) -> Value {
    let mut degrees = BTreeMap::new();
    for (d, dl) in &l.degrees {
        let key = if cohomological { format!("H^{}", -d) } else { format!("H_{}", d) };
        degrees.insert(key, serde_json::to_value(dl).unwrap());
    }
    json!({
        "window": l.window,
        "n_max": l.n_max,
        "degrees": degrees,
    })
}

fn classification_line(c: &ModuleClassification) -> String {
    c.to_string()
}

fn run_compute(cfg: &JobConfig, out_dir: &PathBuf, seed: u64) -> Result<i32, Error> {
    cfg.validate()?;
    let inst = koszul_cech::verify::resolve_instance(&cfg.instance())?;
    let mut results: Vec<Value> = Vec::new();
    let mut md = String::new();
    md.push_str(&format!("# Report\n\nInstance: `{}`\n\n", cfg.instance().describe()));
    for task in &cfg.tasks {
        if let Some(c) = &task.compute {
            match c.as_str() {
                "localCohomology" => {
                    let lim = koszul_cech::cech::local_cohomology_koszul(
                        &inst.ctx,
                        &inst.module,
                        inst.n_max,
                        inst.window,
                    )?;
                    md.push_str("## Local cohomology (window avatar colimits)\n\n");
                    md.push_str("| degree | value | certificate |\n|---|---|---|\n");
                    for (d, dl) in &lim.degrees {
                        let v = match &dl.lim {
                            LimitValue::Stabilized { value, .. } => classification_line(value),
                            LimitValue::ProObject => format!(
                                "pro-object: [{}]",
                                dl.stage_values.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
                            ),
                        };
                        md.push_str(&format!("| H^{} | {} | {} |\n", -d, v, dl.certificate));
                    }
                    md.push('\n');
                    results.push(json!({ "task": "localCohomology", "result": limits_json(&lim, true) }));
                }
                "derivedCompletion" => {
                    let rep = derived_completion_koszul(
                        &inst.ctx,
                        &inst.module,
                        inst.n_max,
                        inst.m_max,
                        inst.window,
                    )?;
                    md.push_str("## Derived completion (chain avatar limits)\n\n");
                    md.push_str(&format!(
                        "Weak pro-regularity witnessed: {}\n\n",
                        rep.identified
                    ));
                    md.push_str("| degree | value | lim1 | certificate |\n|---|---|---|---|\n");
                    for (d, dl) in &rep.limits.degrees {
                        let v = match &dl.lim {
                            LimitValue::Stabilized { value, .. } => classification_line(value),
                            LimitValue::ProObject => format!(
                                "pro-object: [{}]",
                                dl.stage_values.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
                            ),
                        };
                        let l1 = match &dl.lim1 {
                            LimitValue::Stabilized { value, .. } => classification_line(value),
                            LimitValue::ProObject => "pro-object".to_string(),
                        };
                        md.push_str(&format!("| Lambda_{} | {} | {} | {} |\n", d, v, l1, dl.certificate));
                    }
                    md.push('\n');
                    results.push(json!({
                        "task": "derivedCompletion",
                        "identified": rep.identified,
                        "proregular": serde_json::to_value(&rep.proregular).unwrap(),
                        "result": limits_json(&rep.limits, false),
                    }));
                }
                "koszulTable" => {
                    let sys = koszul_cech::adic::xu_systems(
                        &inst.ctx,
                        &inst.module,
                        inst.n_max,
                        KoszulVariant::Chain,
                    )?;
                    let lim = limits(&sys, inst.window);
                    md.push_str("## Koszul stage homology\n\n| degree | stages |\n|---|---|\n");
                    for (d, dl) in &lim.degrees {
                        md.push_str(&format!(
                            "| H_{} | {} |\n",
                            d,
                            dl.stage_values.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
                        ));
                    }
                    md.push('\n');
                    results.push(json!({ "task": "koszulTable", "result": limits_json(&lim, false) }));
                }
                "proregular" => {
                    let v = proregular_check(&inst.ctx, &inst.module, inst.n_max.min(4), inst.m_max)?;
                    md.push_str(&format!(
                        "## Pro-regularity\n\nVerified: {}\n\n",
                        v.verified()
                    ));
                    results.push(json!({ "task": "proregular", "result": serde_json::to_value(&v).unwrap() }));
                }
                _ => unreachable!("validated"),
            }
        } else if let Some(id) = &task.check {
            let report = run_check(id, &cfg.instance());
            md.push_str(&format!(
                "## Check {}\n\nVerdict: {:?}\n\n",
                id, report.verdict
            ));
            results.push(json!({ "task": "check", "report": serde_json::to_value(&report).unwrap() }));
        } else if let Some(s) = &task.suite {
            return Err(Error::InvalidConfig(format!(
                "suite task '{}' belongs to the verify subcommand",
                s
            )));
        }
    }
    let report = json!({
        "config": serde_json::to_value(cfg).unwrap(),
        "seed": seed,
        "results": results,
    });
    std::fs::create_dir_all(out_dir).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    std::fs::write(out_dir.join("report.json"), serde_json::to_string_pretty(&report).unwrap())
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    std::fs::write(out_dir.join("report.md"), md).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    println!("report written to {}", out_dir.display());
    Ok(0)
}

fn suite_exit_code(report: &SuiteReport) -> i32 {
    if report.failed > 0 {
        1
    } else if report.inconclusive > 0 {
        4
    } else {
        0
    }
}

fn run_verify(path: &PathBuf, jobs: usize, seed: u64, out: Option<&PathBuf>) -> Result<i32, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let suite: SuiteFile =
        serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let entries: Vec<(String, InstanceConfig)> =
        suite.entries.into_iter().map(|e| (e.check, e.instance)).collect();
    for (id, inst) in &entries {
        // resolve early so malformed suites exit 2, not as inconclusives
        koszul_cech::verify::resolve_instance(inst)?;
        let _ = id;
    }
    let report = run_suite(&entries, jobs);
    for r in &report.reports {
        let tag = match &r.verdict {
            Verdict::Pass => "PASS".to_string(),
            Verdict::Fail { .. } => "FAIL".to_string(),
            Verdict::Inconclusive { .. } => "INCONCLUSIVE".to_string(),
        };
        println!("{:<12} {:<12} {}", tag, r.check_id, r.instance);
        if let Verdict::Fail { witness } = &r.verdict {
            println!("             witness: {}", witness);
        }
        if let Verdict::Inconclusive { reason } = &r.verdict {
            println!("             reason: {}", reason);
        }
    }
    println!(
        "{} passed, {} failed, {} inconclusive",
        report.passed, report.failed, report.inconclusive
    );
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let doc = json!({ "seed": seed, "suite": serde_json::to_value(&report).unwrap() });
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&doc).unwrap())
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    Ok(suite_exit_code(&report))
}

fn run_oracle(path: &PathBuf) -> Result<i32, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let cfg: JobConfig = serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    if cfg.sequence.is_empty() {
        return Err(Error::InvalidConfig("sequence must not be empty".into()));
    }
    let inst = koszul_cech::verify::resolve_instance(&cfg.instance())?;
    let table = cech_cohomology_oracle(&inst.ctx, &inst.module)?;
    let (gamma, _) = koszul_cech::cech::torsion_submodule(&inst.module, &inst.ctx)?;
    println!("| degree | classification |");
    println!("|--------|----------------|");
    for (i, c) in &table {
        println!("| H^{}    | {} |", i, c);
    }
    println!("| Gamma  | {} |", gamma.classify());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute { config, out } => {
            let text = match std::fs::read_to_string(config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read config: {}", e);
                    return ExitCode::from(2);
                }
            };
            match serde_json::from_str::<JobConfig>(&text) {
                Ok(cfg) => run_compute(&cfg, out, 0),
                Err(e) => {
                    eprintln!("invalid config: {}", e);
                    return ExitCode::from(2);
                }
            }
        }
        Command::Verify { suite, jobs, seed, out } => run_verify(suite, *jobs, *seed, out.as_ref()),
        Command::Oracle { config } => run_oracle(config),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e @ (Error::InfiniteRing | Error::TooLarge(_) | Error::UnsupportedInstance(_))) => {
            eprintln!("unsupported instance: {}", e);
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("invalid config: {}", e);
            ExitCode::from(2)
        }
    }
}
