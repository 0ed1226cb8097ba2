//! Command-line front end over the library: loads language and instance
//! files, runs one operation, prints a one-line summary on stdout, and
//! writes a structured result file embedding the tool version, the full
//! configuration, and every input file consumed.
//!
//! Exit codes: 0 on success, 1 when verify-evidence rejects, 2 on an
//! unknown verdict or an exceeded budget, 3 on bad input.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use vcsp::classify::{
    classify_boolean, classify_conservative, hardness_certificate, parse_formula,
    reduce_one_in_three, verify_verdict, Evidence, Verdict, VerdictStatus,
};
use vcsp::cores::{compute_core, reduce_rigid_instance, rigid_core};
use vcsp::indicator::build_indicator;
use vcsp::instance::{parse_instance_text, serialize_instance, Instance};
use vcsp::lang::{parse_language, serialize_language, Language, Operation};
use vcsp::poly::{
    enumerate_polymorphisms, parse_operation_set, serialize_operation_set, OperationSet,
};
use vcsp::posclone::positive_clone;
use vcsp::variety::{
    parse_congruence, power_lift, power_lift_instance, quotient_lift, quotient_lift_instance,
    subalgebra_lift_instance, subalgebra_restrict,
};
use vcsp::weighting::{is_weighted_polymorphism, parse_weighting, WpolCheck};
use vcsp::{Budget, Error};

#[derive(Parser)]
#[command(
    name = "vcsp",
    version,
    about = "Exact tooling for valued constraint satisfaction: solving, \
             polymorphism searches, and dichotomy classification"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Cap on assignments enumerated by exhaustive solves.
    #[arg(long, global = true, default_value_t = Budget::default().assignments)]
    budget_assignments: u64,
    /// Cap on operations kept in one operation set.
    #[arg(long, global = true, default_value_t = Budget::default().ops)]
    budget_ops: u64,
    /// Cap on rows and columns of generated linear systems.
    #[arg(long, global = true, default_value_t = Budget::default().lp_rows)]
    budget_rows: u64,
    /// Cap on backtracking search nodes.
    #[arg(long, global = true, default_value_t = Budget::default().nodes)]
    budget_nodes: u64,
    /// Cap on operation table cells (domain size to the arity).
    #[arg(long, global = true, default_value_t = Budget::default().table_cells)]
    budget_cells: u64,
    /// Seed recorded in the result file; commands themselves are
    /// deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Result file path.
    #[arg(long, global = true, default_value = "result.json")]
    out: PathBuf,
}

impl ConfigArgs {
    fn budget(&self) -> Budget {
        Budget {
            assignments: self.budget_assignments,
            ops: self.budget_ops,
            lp_rows: self.budget_rows,
            nodes: self.budget_nodes,
            table_cells: self.budget_cells,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact optimum of an instance.
    Solve { instance: PathBuf },
    /// Cost function expressed by an instance over the listed variables.
    Express {
        instance: PathBuf,
        /// Projection variables, repeats allowed.
        #[arg(required = true)]
        variables: Vec<String>,
    },
    /// All polymorphisms of a language at one arity.
    Polymorphisms {
        language: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// The positively weighted part of the polymorphism clone at one arity.
    PositiveClone {
        language: PathBuf,
        #[arg(long)]
        arity: usize,
    },
    /// Checks whether a weighting improves every feasible tuple list.
    WpolCheck {
        language: PathBuf,
        weighting: PathBuf,
    },
    /// Builds the indicator instance whose optimum separates positively
    /// weighted operations.
    Indicator {
        language: PathBuf,
        #[arg(long, default_value_t = 1)]
        arity: usize,
    },
    /// Core test and core computation.
    Core { language: PathBuf },
    /// Core with all elements pinned by fresh unary functions.
    RigidCore { language: PathBuf },
    /// Rewrites an instance over the pinned language as one over the core
    /// plus equality and an indicator.
    ReduceRigid {
        language: PathBuf,
        instance: PathBuf,
    },
    /// Reshapes a language or instance along a variety construction.
    Lift {
        #[command(subcommand)]
        transform: LiftCommand,
    },
    /// Tractability classification with machine-checkable evidence.
    Classify {
        #[command(subcommand)]
        target: ClassifyCommand,
    },
    /// Builds the instance family giving the one-in-three reduction.
    #[command(name = "reduce-1in3")]
    Reduce1in3 {
        language: PathBuf,
        /// Plain-text formula: one clause of three variable names per line.
        formula: PathBuf,
        /// Result file holding an NP-hardness verdict; computed afresh when
        /// omitted.
        #[arg(long)]
        evidence: Option<PathBuf>,
    },
    /// Re-checks the evidence inside a result file against a language.
    VerifyEvidence {
        language: PathBuf,
        result: PathBuf,
    },
}

#[derive(Subcommand)]
enum LiftCommand {
    /// Blockwise power lift; instances are repacked over the base domain.
    Power {
        input: PathBuf,
        #[arg(long)]
        exponent: usize,
    },
    /// Pullback along a congruence from class indices to elements.
    Quotient {
        input: PathBuf,
        /// JSON file listing the congruence classes.
        #[arg(long)]
        congruence: PathBuf,
    },
    /// Restriction to a subset, or the inverse re-reading of an instance.
    Sub {
        input: PathBuf,
        /// Comma-separated kept elements, strictly increasing.
        #[arg(long)]
        subset: String,
        /// Operation-set file certifying closure of the subset; defaults to
        /// the identity alone.
        #[arg(long)]
        operations: Option<PathBuf>,
        /// Full domain size, required when lifting an instance back.
        #[arg(long)]
        domain_size: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ClassifyCommand {
    /// Two-element dichotomy via the six multimorphism checks.
    Boolean { language: PathBuf },
    /// Cyclic-weighting search up to an arity cap; exhaustion at a prime
    /// above the domain size yields a hardness certificate.
    Taylor {
        language: PathBuf,
        #[arg(long, default_value_t = 3)]
        arity: usize,
    },
    /// Conservative dichotomy over the binary-pair and ternary searches.
    Conservative { language: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_ok = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if usage_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let budget = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::BudgetExceeded { .. })));
            ExitCode::from(if budget { 2 } else { 3 })
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let mut session = Session {
        budget: cli.config.budget(),
        inputs: BTreeMap::new(),
    };
    let (summary, result, code) = dispatch(&cli.command, &mut session)?;
    let report = json!({
        "tool": {"name": "vcsp", "version": env!("CARGO_PKG_VERSION")},
        "command": command_line(std::env::args().skip(1)),
        "config": {
            "budget": serde_json::to_value(&session.budget).expect("budget serializes"),
            "seed": cli.config.seed,
        },
        "input": session.inputs,
        "result": result,
    });
    let text = serde_json::to_string_pretty(&report).expect("result serializes") + "\n";
    fs::write(&cli.config.out, text)
        .with_context(|| format!("writing {}", cli.config.out.display()))?;
    println!("{summary}");
    Ok(code)
}

/// Invocation with the output path removed, so the result file's bytes
/// depend only on the inputs and the semantic configuration.
fn command_line(args: impl Iterator<Item = String>) -> String {
    let mut kept = Vec::new();
    let mut skip_value = false;
    for arg in args {
        if skip_value {
            skip_value = false;
            continue;
        }
        if arg == "--out" {
            skip_value = true;
            continue;
        }
        if arg.starts_with("--out=") {
            continue;
        }
        kept.push(arg);
    }
    kept.join(" ")
}

/// One command's file context: the budget and every input text consumed,
/// keyed by path, for embedding into the result file.
struct Session {
    budget: Budget,
    inputs: BTreeMap<String, String>,
}

enum Loaded {
    Language(Language),
    Instance(Instance),
}

impl Session {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(path.display().to_string(), text.clone());
        Ok(text)
    }

    fn language(&mut self, path: &Path) -> Result<Language> {
        let text = self.read(path)?;
        parse_language(&text).with_context(|| format!("parsing language {}", path.display()))
    }

    /// Loads an instance, resolving its language file relative to the
    /// instance file's directory.
    fn instance(&mut self, path: &Path) -> Result<Instance> {
        let text = self.read(path)?;
        let parsed = parse_instance_text(&text)
            .with_context(|| format!("parsing instance {}", path.display()))?;
        let language_path = match path.parent() {
            Some(dir) if !dir.as_os_str().is_empty() => dir.join(&parsed.language_file),
            _ => PathBuf::from(&parsed.language_file),
        };
        let language = self.language(&language_path)?;
        parsed
            .resolve(&language)
            .with_context(|| format!("resolving instance {}", path.display()))
    }

    fn either(&mut self, path: &Path) -> Result<Loaded> {
        let text = self.read(path)?;
        match parse_instance_text(&text) {
            Ok(_) => Ok(Loaded::Instance(self.instance(path)?)),
            Err(instance_error) => match parse_language(&text) {
                Ok(language) => Ok(Loaded::Language(language)),
                Err(language_error) => bail!(
                    "{} is neither an instance ({instance_error}) nor a language \
                     ({language_error})",
                    path.display()
                ),
            },
        }
    }
}

fn language_value(language: &Language) -> Value {
    serde_json::from_str(&serialize_language(language)).expect("language serializes to JSON")
}

fn operations_value(set: &OperationSet) -> Value {
    serde_json::from_str(&serialize_operation_set(set)).expect("operation set serializes to JSON")
}

fn operation_value(op: &Operation) -> Value {
    json!({"domain_size": op.domain_size, "arity": op.arity, "table": op.table})
}

fn instance_value(instance: &Instance, language: &Language) -> Result<Value> {
    let text = serialize_instance(instance, language, "derived.lang")?;
    Ok(serde_json::from_str(&text).expect("instance serializes to JSON"))
}

/// Relabels a derived instance so every label names exactly one table, and
/// returns the language those labels resolve in.  Derived instances reuse a
/// source label for differently scaled copies, which the file format
/// forbids.
fn embeddable(instance: &Instance) -> (Instance, Language) {
    let mut out = instance.clone();
    let mut language = Language::new(instance.domain.size);
    for c in &mut out.constraints {
        let mut label = c.label.clone();
        let mut k = 1usize;
        loop {
            match language.get(&label) {
                Some(existing) if *existing == c.function => break,
                Some(_) => {
                    k += 1;
                    label = format!("{}#{k}", c.label);
                }
                None => {
                    language.add(label.clone(), c.function.clone()).expect("fresh label");
                    break;
                }
            }
        }
        c.label = label;
    }
    (out, language)
}

fn instance_report(instance: &Instance) -> Result<Value> {
    let (relabeled, language) = embeddable(instance);
    Ok(json!({
        "language": language_value(&language),
        "instance": instance_value(&relabeled, &language)?,
    }))
}

fn verdict_output(verdict: Verdict) -> (String, Value, ExitCode) {
    let summary = match (&verdict.status, &verdict.evidence) {
        (VerdictStatus::NpHard, _) => "NP-hard".to_string(),
        (VerdictStatus::Tractable, Evidence::Multimorphism { name, .. }) => {
            format!("tractable ({name})")
        }
        (VerdictStatus::Tractable, Evidence::CoreCollapse { .. }) => {
            "tractable (core collapse)".to_string()
        }
        (VerdictStatus::Tractable, Evidence::Conservative(_)) => {
            "tractable (conservative witness)".to_string()
        }
        (VerdictStatus::Tractable, _) => "tractable".to_string(),
        (VerdictStatus::ConjecturedTractable, Evidence::CyclicWeighting { arity, .. }) => {
            format!("conjectured tractable (cyclic weighting at arity {arity})")
        }
        (VerdictStatus::ConjecturedTractable, _) => "conjectured tractable".to_string(),
        (VerdictStatus::Unknown, Evidence::Budget { note })
        | (VerdictStatus::Unknown, Evidence::Exhausted { note }) => format!("unknown: {note}"),
        (VerdictStatus::Unknown, _) => "unknown".to_string(),
    };
    let code = if verdict.status == VerdictStatus::Unknown {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    };
    (summary, json!({"verdict": verdict.to_json()}), code)
}

fn embedded_verdict(text: &str, path: &Path) -> Result<Verdict> {
    let value: Value = serde_json::from_str(text)
        .with_context(|| format!("parsing result file {}", path.display()))?;
    let inner = if value["result"]["verdict"].is_object() {
        &value["result"]["verdict"]
    } else if value["verdict"].is_object() {
        &value["verdict"]
    } else {
        bail!("{} holds no verdict", path.display());
    };
    Ok(Verdict::from_json(inner)?)
}

fn integer_root(n: usize, k: usize) -> Option<usize> {
    (1..=n).find(|b| (*b as u128).checked_pow(k as u32) == Some(n as u128))
}

fn parse_subset(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .context("subset is a comma-separated list of elements")
}

fn dispatch(command: &Command, session: &mut Session) -> Result<(String, Value, ExitCode)> {
    match command {
        Command::Solve { instance } => {
            let inst = session.instance(instance)?;
            let optimum = inst.solve(&session.budget)?;
            Ok((
                format!("optimum {}", optimum.cost),
                json!({
                    "optimum": optimum.cost.to_string(),
                    "assignment": optimum.assignment,
                }),
                ExitCode::SUCCESS,
            ))
        }
        Command::Express {
            instance,
            variables,
        } => {
            let inst = session.instance(instance)?;
            let names: Vec<&str> = variables.iter().map(String::as_str).collect();
            let function = inst.express_named(&names, &session.budget)?;
            let mut language = Language::new(function.domain_size);
            language.add("expressed", function.clone())?;
            Ok((
                format!("expressed an arity {} function", function.arity),
                json!({"language": language_value(&language)}),
                ExitCode::SUCCESS,
            ))
        }
        Command::Polymorphisms { language, arity } => {
            let lang = session.language(language)?;
            let ops = enumerate_polymorphisms(&lang, *arity, &session.budget)?;
            Ok((
                format!("{} polymorphisms at arity {arity}", ops.len()),
                json!({"count": ops.len(), "operations": operations_value(&ops)}),
                ExitCode::SUCCESS,
            ))
        }
        Command::PositiveClone { language, arity } => {
            let lang = session.language(language)?;
            let ops = positive_clone(&lang, *arity, &session.budget)?;
            Ok((
                format!("{} operations in the positive clone at arity {arity}", ops.len()),
                json!({"count": ops.len(), "operations": operations_value(&ops)}),
                ExitCode::SUCCESS,
            ))
        }
        Command::WpolCheck {
            language,
            weighting,
        } => {
            let lang = session.language(language)?;
            let text = session.read(weighting)?;
            let w = parse_weighting(&text, lang.domain.size)?;
            match is_weighted_polymorphism(&w, &lang)? {
                WpolCheck::Holds => Ok((
                    "holds".to_string(),
                    json!({"holds": true}),
                    ExitCode::SUCCESS,
                )),
                WpolCheck::Fails(v) => Ok((
                    format!("fails on {} with excess {}", v.function, v.excess),
                    json!({
                        "holds": false,
                        "violation": {
                            "function": v.function,
                            "tuples": v.tuples,
                            "excess": v.excess.to_string(),
                        },
                    }),
                    ExitCode::SUCCESS,
                )),
            }
        }
        Command::Indicator { language, arity } => {
            let lang = session.language(language)?;
            let gadget = build_indicator(&lang, *arity, &session.budget)?;
            let mut result = instance_report(&gadget.instance)?;
            result["arity"] = json!(gadget.arity);
            result["p"] = json!(gadget.p.to_string());
            result["tuples"] = json!(gadget.tuples);
            Ok((
                format!(
                    "indicator over {} variables attains {} on the positive clone",
                    gadget.instance.variables.len(),
                    gadget.p
                ),
                result,
                ExitCode::SUCCESS,
            ))
        }
        Command::Core { language } => {
            let lang = session.language(language)?;
            let (core, report) = compute_core(&lang, &session.budget)?;
            let summary = if report.is_core {
                format!("already a core over {} elements", lang.domain.size)
            } else {
                format!(
                    "core over {} of {} elements",
                    core.domain.size, lang.domain.size
                )
            };
            Ok((
                summary,
                json!({
                    "is_core": report.is_core,
                    "witness": report.witness.as_ref().map(operation_value),
                    "restriction_chain": report.restriction_chain,
                    "core": language_value(&core),
                }),
                ExitCode::SUCCESS,
            ))
        }
        Command::RigidCore { language } => {
            let lang = session.language(language)?;
            let rigid = rigid_core(&lang, &session.budget)?;
            Ok((
                format!(
                    "rigid core with {} functions over {} elements",
                    rigid.len(),
                    rigid.domain.size
                ),
                json!({"language": language_value(&rigid)}),
                ExitCode::SUCCESS,
            ))
        }
        Command::ReduceRigid { language, instance } => {
            let lang = session.language(language)?;
            let inst = session.instance(instance)?;
            let reduction = reduce_rigid_instance(&lang, &inst, &session.budget)?;
            Ok((
                format!("appended {} indicator copies", reduction.copies_m),
                json!({
                    "copies": reduction.copies_m,
                    "p": reduction.p.to_string(),
                    "q": reduction.q.to_string(),
                    "bound": reduction.bound_c.to_string(),
                    "language": language_value(&reduction.augmented_language),
                    "instance": instance_value(&reduction.instance, &reduction.augmented_language)?,
                }),
                ExitCode::SUCCESS,
            ))
        }
        Command::Lift { transform } => lift(transform, session),
        Command::Classify { target } => match target {
            ClassifyCommand::Boolean { language } => {
                let lang = session.language(language)?;
                Ok(verdict_output(classify_boolean(&lang, &session.budget)?))
            }
            ClassifyCommand::Taylor { language, arity } => {
                let lang = session.language(language)?;
                Ok(verdict_output(hardness_certificate(
                    &lang,
                    *arity,
                    &session.budget,
                )?))
            }
            ClassifyCommand::Conservative { language } => {
                let lang = session.language(language)?;
                Ok(verdict_output(classify_conservative(
                    &lang,
                    &session.budget,
                )?))
            }
        },
        Command::Reduce1in3 {
            language,
            formula,
            evidence,
        } => {
            let lang = session.language(language)?;
            let formula_text = session.read(formula)?;
            let parsed = parse_formula(&formula_text)?;
            let verdict = match evidence {
                Some(path) => {
                    let text = session.read(path)?;
                    embedded_verdict(&text, path)?
                }
                None => hardness_certificate(&lang, 3, &session.budget)?,
            };
            let reduction = reduce_one_in_three(&lang, &verdict, &parsed, &session.budget)?;
            let clauses = BigRational::from_integer((parsed.clauses.len() as u64).into());
            let threshold = &clauses * &reduction.unit_cost;
            let mut result = instance_report(&reduction.instance)?;
            result["unit_cost"] = json!(reduction.unit_cost.to_string());
            result["relation"] = json!(reduction.relation);
            result["verdict"] = verdict.to_json();
            Ok((
                format!(
                    "{} clauses over {} variables; satisfiable exactly at optimum {}",
                    parsed.clauses.len(),
                    parsed.variables.len(),
                    threshold
                ),
                result,
                ExitCode::SUCCESS,
            ))
        }
        Command::VerifyEvidence { language, result } => {
            let lang = session.language(language)?;
            let text = session.read(result)?;
            let verdict = embedded_verdict(&text, result)?;
            let accepted = verify_verdict(&lang, &verdict, &session.budget)?;
            let summary = if accepted { "verified" } else { "rejected" };
            let code = if accepted {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
            Ok((
                summary.to_string(),
                json!({"verified": accepted, "verdict": verdict.to_json()}),
                code,
            ))
        }
    }
}

fn lift(transform: &LiftCommand, session: &mut Session) -> Result<(String, Value, ExitCode)> {
    match transform {
        LiftCommand::Power { input, exponent } => match session.either(input)? {
            Loaded::Language(language) => {
                let lifted = power_lift(&language, *exponent, &session.budget)?;
                Ok((
                    format!("power lift with {} functions", lifted.len()),
                    json!({"language": language_value(&lifted)}),
                    ExitCode::SUCCESS,
                ))
            }
            Loaded::Instance(instance) => {
                let base = integer_root(instance.domain.size, *exponent).ok_or_else(|| {
                    anyhow!(
                        "domain size {} is not a perfect power with exponent {exponent}",
                        instance.domain.size
                    )
                })?;
                let lifted = power_lift_instance(&instance, base, *exponent)?;
                let result = instance_report(&lifted)?;
                Ok((
                    format!(
                        "repacked over {} variables on {} elements",
                        lifted.variables.len(),
                        base
                    ),
                    result,
                    ExitCode::SUCCESS,
                ))
            }
        },
        LiftCommand::Quotient { input, congruence } => {
            let text = session.read(congruence)?;
            let cong = parse_congruence(&text)?;
            match session.either(input)? {
                Loaded::Language(language) => {
                    let lifted = quotient_lift(&language, &cong, &session.budget)?;
                    Ok((
                        format!(
                            "pulled {} functions back to {} elements",
                            lifted.len(),
                            lifted.domain.size
                        ),
                        json!({"language": language_value(&lifted)}),
                        ExitCode::SUCCESS,
                    ))
                }
                Loaded::Instance(instance) => {
                    let lifted = quotient_lift_instance(&instance, &cong, &session.budget)?;
                    let result = instance_report(&lifted)?;
                    Ok((
                        format!(
                            "pulled the instance back to {} elements",
                            lifted.domain.size
                        ),
                        result,
                        ExitCode::SUCCESS,
                    ))
                }
            }
        }
        LiftCommand::Sub {
            input,
            subset,
            operations,
            domain_size,
        } => {
            let subset = parse_subset(subset)?;
            match session.either(input)? {
                Loaded::Language(language) => {
                    let ops = match operations {
                        Some(path) => {
                            let text = session.read(path)?;
                            parse_operation_set(&text)?
                        }
                        None => OperationSet::new(
                            language.domain.size,
                            1,
                            [Operation::identity(language.domain.size)],
                        )?,
                    };
                    let restricted = subalgebra_restrict(&language, &subset, &ops)?;
                    Ok((
                        format!("restricted to {} elements", restricted.domain.size),
                        json!({"language": language_value(&restricted)}),
                        ExitCode::SUCCESS,
                    ))
                }
                Loaded::Instance(instance) => {
                    let full = domain_size.ok_or_else(|| {
                        anyhow!("--domain-size is required when lifting an instance")
                    })?;
                    let lifted = subalgebra_lift_instance(&instance, &subset, full)?;
                    let result = instance_report(&lifted)?;
                    Ok((
                        format!("re-read over {} elements", lifted.domain.size),
                        result,
                        ExitCode::SUCCESS,
                    ))
                }
            }
        }
    }
}
