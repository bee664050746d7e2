//! `betlogic` command-line interface.
//!
//! Exit status: 0 on success or a positive verdict, 1 on a negative verdict
//! (INFEASIBLE, Rejected, Fails, NONE), 2 on usage, parse or validation
//! errors.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use betlogic::calculus::{check_derivation_with, CheckOptions, CheckResult, Derivation, Theory};
use betlogic::corpus;
use betlogic::modelfile::{load_model, save_model, to_model_file, LoadedModel};
use betlogic::neighborhood::{check_base_properties_model, check_conjectured, check_mid_threshold};
use betlogic::semantics::{find_nbhd_countermodel, sample_prob_countermodel, CountermodelResult, SearchBound};
use betlogic::synthesis::{
    check_definetti, dump, explore_thresholds, measure_constraints, realize_comparative, synthesize_measure,
    ComparativeRelation, Comparison, ComparisonTable, SynthesisResult,
};
use betlogic::{
    derive_neighborhoods, eval_kb_nbhd, eval_kb_prob, eval_l, parse_kb, parse_l, BruteForceBudget, NeighborhoodModel,
    ProbabilityModel, PropertyReport, Threshold,
};

#[derive(Parser)]
#[command(
    name = "betlogic",
    version,
    about = "Knowledge and high-probability belief: exact model checking, measure synthesis, proof checking"
)]
struct Cli {
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Semantics {
    Prob,
    Nbhd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    WalleyFine,
    Kps,
    Horses,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a formula at a world
    Eval {
        /// Model file or built-in name (horses1, horses2, horses-uniform, walley-fine)
        #[arg(long)]
        model: String,
        #[arg(long)]
        world: String,
        #[arg(long)]
        formula: String,
        /// Belief threshold for K/B formulas on probability models
        #[arg(long, default_value = "1/2")]
        threshold: String,
        /// Defaults to the model's own kind; `nbhd` on a probability model
        /// evaluates on the derived neighborhood model
        #[arg(long, value_enum)]
        semantics: Option<Semantics>,
    },
    /// Check neighborhood-model properties
    CheckModel {
        #[arg(long)]
        model: String,
        /// Also check (d), (sc) and (scott)
        #[arg(long)]
        mid_threshold: bool,
        /// Also check the conjectured properties for this threshold
        #[arg(long)]
        conjectured: Option<String>,
        /// Longest lists tried for (scott) and (ws)
        #[arg(long, default_value_t = 3)]
        m_max: usize,
    },
    /// Neighborhood model of a probability model at a threshold
    Derive {
        #[arg(long)]
        model: String,
        #[arg(long)]
        threshold: String,
    },
    /// Probability measure agreeing with a neighborhood model
    Synthesize {
        #[arg(long)]
        model: String,
        #[arg(long)]
        threshold: String,
        /// Write the per-cell linear systems to this file
        #[arg(long)]
        dump_lp: Option<String>,
    },
    /// Check that a probability model agrees with a neighborhood model
    Agree {
        #[arg(long)]
        nbhd: String,
        #[arg(long)]
        prob: String,
        #[arg(long)]
        threshold: String,
    },
    /// Search for a model falsifying a formula
    Countermodel {
        #[arg(long)]
        formula: String,
        /// Exhaustive neighborhood search up to this many worlds
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        /// Only models with (d), (sc) and (scott)
        #[arg(long)]
        mid_threshold: bool,
        /// Sample probability models instead
        #[arg(long)]
        prob: bool,
        #[arg(long, default_value = "1/2")]
        threshold: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a derivation file
    Prove {
        #[arg(long, value_parser = parse_theory)]
        theory: Theory,
        #[arg(long)]
        proof: String,
        /// Accept any truth-table tautology as an axiom line (scheme TAUT)
        #[arg(long)]
        allow_taut: bool,
    },
    /// Print a stored derivation, or list them
    Corpus { name: Option<String> },
    /// Realize comparative statements by a measure
    Comparative {
        /// Space-separated element names
        #[arg(long)]
        universe: String,
        /// One statement per line: `{a,b} < {c}`, `<=` or `~`
        #[arg(long)]
        statements: String,
        /// Check the de Finetti conditions on the relation as given (plus X ⪯ X)
        #[arg(long)]
        definetti: bool,
        /// Require every element to get positive weight
        #[arg(long)]
        full_support: bool,
    },
    /// Run a built-in scenario
    Demo {
        #[arg(value_enum)]
        which: Demo,
    },
    /// Tally property verdicts against LP verdicts on small single-cell models
    Explore {
        #[arg(long, value_delimiter = ',', default_value = "1/2,3/5,2/3")]
        thresholds: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        #[arg(long, default_value_t = 3)]
        m_max: usize,
    },
}

fn parse_theory(s: &str) -> Result<Theory, String> {
    s.parse()
}

fn threshold(s: &str) -> Result<Threshold> {
    let r = s.parse().map_err(|e| anyhow!("{e}"))?;
    Threshold::new(r).map_err(|e| anyhow!("{e}"))
}

fn prob_model(spec: &str) -> Result<ProbabilityModel> {
    match load_model(spec)? {
        LoadedModel::Probability(m) => Ok(m),
        LoadedModel::Neighborhood(_) => bail!("{spec}: expected a probability model"),
    }
}

fn nbhd_model(spec: &str) -> Result<NeighborhoodModel> {
    match load_model(spec)? {
        LoadedModel::Neighborhood(m) => Ok(m),
        LoadedModel::Probability(_) => bail!("{spec}: expected a neighborhood model (see `derive`)"),
    }
}

struct Output {
    json: bool,
}

impl Output {
    fn emit(&self, text: impl AsRef<str>, value: Value) {
        let mut stdout = std::io::stdout().lock();
        // a closed pipe is not worth a panic
        let _ = if self.json {
            writeln!(stdout, "{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"))
        } else {
            write!(stdout, "{}", text.as_ref())
        };
    }
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn report_json(r: &PropertyReport, frame: &betlogic::Frame) -> Value {
    json!({"all_hold": r.all_hold(), "properties": r.to_json(frame)})
}

fn run(cli: Cli) -> Result<ExitCode> {
    let out = Output { json: cli.json };
    match cli.cmd {
        Cmd::Eval { model, world, formula, threshold: c, semantics } => {
            let m = load_model(&model)?;
            let w = m.frame().world_index(&world).ok_or_else(|| anyhow!("unknown world {world:?}"))?;
            let c = threshold(&c)?;
            let value = match (&m, semantics) {
                (LoadedModel::Probability(p), None | Some(Semantics::Prob)) => match parse_kb(&formula) {
                    Ok(f) => eval_kb_prob(p, w, &f, &c),
                    Err(kb_err) => match parse_l(&formula) {
                        Ok(f) => eval_l(p, w, &f),
                        Err(l_err) if formula.contains("P(") => bail!("{l_err}"),
                        Err(_) => bail!("{kb_err}"),
                    },
                },
                (LoadedModel::Probability(p), Some(Semantics::Nbhd)) => {
                    eval_kb_nbhd(&derive_neighborhoods(p, &c), w, &parse_kb(&formula)?)
                }
                (LoadedModel::Neighborhood(n), None | Some(Semantics::Nbhd)) => {
                    eval_kb_nbhd(n, w, &parse_kb(&formula)?)
                }
                (LoadedModel::Neighborhood(_), Some(Semantics::Prob)) => {
                    bail!("probability semantics needs a probability model")
                }
            };
            out.emit(format!("{value}\n"), json!({"world": world, "formula": formula, "value": value}));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CheckModel { model, mid_threshold, conjectured, m_max } => {
            let m = nbhd_model(&model)?;
            let budget = BruteForceBudget::with_m_max(m_max);
            let mut r = check_base_properties_model(&m);
            if mid_threshold {
                r.extend(check_mid_threshold(&m, &budget)?);
            }
            if let Some(c) = conjectured {
                r.extend(check_conjectured(&m, &threshold(&c)?, &budget)?);
            }
            out.emit(r.render(m.frame()), report_json(&r, m.frame()));
            Ok(status(r.all_hold()))
        }
        Cmd::Derive { model, threshold: c } => {
            let n = derive_neighborhoods(&prob_model(&model)?, &threshold(&c)?);
            let n = LoadedModel::Neighborhood(n);
            out.emit(save_model(&n), serde_json::to_value(to_model_file(&n))?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Synthesize { model, threshold: c, dump_lp } => {
            let m = nbhd_model(&model)?;
            let c = threshold(&c)?;
            if let Some(path) = dump_lp {
                let mut text = String::new();
                for k in 0..m.frame().cells().len() {
                    let (cons, pos) = measure_constraints(&m, &c, k);
                    text.push_str(&format!("# cell {k}\n{}", dump(&cons, &pos)));
                }
                fs::write(&path, text).with_context(|| format!("writing {path}"))?;
            }
            match synthesize_measure(&m, &c) {
                SynthesisResult::Feasible(p) => {
                    let p = LoadedModel::Probability(p);
                    out.emit(save_model(&p), json!({"feasible": true, "model": to_model_file(&p)}));
                    Ok(ExitCode::SUCCESS)
                }
                SynthesisResult::Infeasible { cell } => {
                    let names = m.frame().names_of(&m.frame().cells()[cell]);
                    out.emit(
                        format!("INFEASIBLE (cell {{{}}})\n", names.join(",")),
                        json!({"feasible": false, "cell": names}),
                    );
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Agree { nbhd, prob, threshold: c } => {
            let n = nbhd_model(&nbhd)?;
            let p = prob_model(&prob)?;
            let v = betlogic::check_agreement(&n, &p, &threshold(&c)?)?;
            let ok = v.holds();
            let r = PropertyReport { entries: vec![("agreement".into(), v)] };
            out.emit(r.render(n.frame()), report_json(&r, n.frame()));
            Ok(status(ok))
        }
        Cmd::Countermodel { formula, max_worlds, mid_threshold, prob, threshold: c, trials, seed } => {
            let f = parse_kb(&formula)?;
            let (found, bound) = if prob {
                match sample_prob_countermodel(&f, &threshold(&c)?, trials, 6, seed) {
                    CountermodelResult::Found { model, world } => {
                        (Some((LoadedModel::Probability(model), world)), None)
                    }
                    CountermodelResult::NoneUpToBound(b) => (None, Some(b)),
                }
            } else {
                match find_nbhd_countermodel(&f, max_worlds, mid_threshold)? {
                    CountermodelResult::Found { model, world } => {
                        (Some((LoadedModel::Neighborhood(model), world)), None)
                    }
                    CountermodelResult::NoneUpToBound(b) => (None, Some(b)),
                }
            };
            match found {
                Some((m, w)) => {
                    let name = m.frame().world_name(w).to_string();
                    out.emit(
                        format!("# false at world {name}\n{}", save_model(&m)),
                        json!({"found": true, "world": name, "model": to_model_file(&m)}),
                    );
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    let b: Option<SearchBound> = bound;
                    out.emit("NONE\n", json!({"found": false, "bound": b}));
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Prove { theory, proof, allow_taut } => {
            let text = fs::read_to_string(&proof).with_context(|| format!("reading {proof}"))?;
            let d: Derivation = text.parse().map_err(|e| anyhow!("{proof}: {e}"))?;
            match check_derivation_with(&d, theory, CheckOptions { allow_taut }) {
                CheckResult::Accepted => {
                    let concl = d.conclusion().map(|f| f.to_string()).unwrap_or_default();
                    out.emit(
                        format!("Accepted ({theory}, {} lines): {concl}\n", d.lines.len()),
                        json!({"accepted": true, "theory": theory.to_string(), "lines": d.lines.len(), "conclusion": concl}),
                    );
                    Ok(ExitCode::SUCCESS)
                }
                CheckResult::RejectedAt { line, reason } => {
                    out.emit(
                        format!("RejectedAt line {line}: {reason}\n"),
                        json!({"accepted": false, "line": line, "reason": reason}),
                    );
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Corpus { name } => {
            let all = corpus::proof_corpus();
            match name {
                None => {
                    let text: String = all
                        .iter()
                        .map(|p| {
                            format!(
                                "{:<16} {:<14} {:>5} lines  {}\n",
                                p.name,
                                p.theory,
                                p.derivation.lines.len(),
                                p.statement
                            )
                        })
                        .collect();
                    let v: Vec<Value> = all
                        .iter()
                        .map(|p| json!({"name": p.name, "theory": p.theory.to_string(), "lines": p.derivation.lines.len(), "statement": p.statement}))
                        .collect();
                    out.emit(text, Value::Array(v));
                }
                Some(n) => {
                    let p =
                        all.iter().find(|p| p.name == n).ok_or_else(|| anyhow!("no stored derivation named {n:?}"))?;
                    out.emit(
                        format!("# {} in {}\n{}", p.statement, p.theory, p.derivation),
                        json!({"name": p.name, "theory": p.theory.to_string(), "derivation": p.derivation.to_string()}),
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Comparative { universe, statements, definetti, full_support } => {
            let names: Vec<String> = universe.split_whitespace().map(str::to_string).collect();
            let text = fs::read_to_string(&statements).with_context(|| format!("reading {statements}"))?;
            let rel = ComparativeRelation::parse_statements(names.clone(), &text)
                .map_err(|e| anyhow!("{statements}: {e}"))?;
            if definetti {
                let table = literal_table(&rel)?;
                let r = check_definetti(&table);
                out.emit(r.render(&table.frame()), report_json(&r, &table.frame()));
                return Ok(status(r.all_hold()));
            }
            let res = realize_comparative(&rel, full_support);
            match res.assignment() {
                Some(a) => {
                    let text: String = names.iter().map(|n| format!("{n} = {}\n", a[n])).collect();
                    let measure: serde_json::Map<String, Value> =
                        names.iter().map(|n| (n.clone(), json!(a[n].to_string()))).collect();
                    out.emit(text, json!({"feasible": true, "measure": measure}));
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    out.emit(
                        format!("{rel}INFEASIBLE\n"),
                        json!({"feasible": false, "statements": rel.to_string().lines().collect::<Vec<_>>()}),
                    );
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Demo { which } => match which {
            Demo::WalleyFine => {
                let cs: Vec<Threshold> =
                    [(1, 3), (1, 2), (3, 5), (2, 3), (3, 4)].iter().map(|&(p, q)| Threshold::of(p, q)).collect();
                let budget = BruteForceBudget { max_cell: 7, ..BruteForceBudget::with_m_max(2) };
                let r = corpus::walley_fine_demo(&cs, &budget);
                let ok = r.base.all_hold() && r.scott_violation && r.synthesis.iter().all(|(_, f)| !f);
                out.emit(r.render(), r.to_json());
                Ok(status(ok))
            }
            Demo::Kps => {
                let r = corpus::kps_demo();
                let ok = !r.realization.is_feasible();
                out.emit(r.render(), r.to_json());
                Ok(status(ok))
            }
            Demo::Horses => {
                let js = corpus::horses_demo();
                let text: String = js
                    .iter()
                    .map(|j| {
                        format!(
                            "{} {}: {} (expected {})\n",
                            if j.ok() { "ok  " } else { "FAIL" },
                            j.description,
                            j.value,
                            j.expected
                        )
                    })
                    .collect();
                let v: Vec<Value> = js
                    .iter()
                    .map(|j| json!({"description": j.description, "value": j.value, "expected": j.expected, "ok": j.ok()}))
                    .collect();
                out.emit(text, Value::Array(v));
                Ok(status(js.iter().all(|j| j.ok())))
            }
        },
        Cmd::Explore { thresholds, max_worlds, m_max } => {
            if max_worlds > 4 {
                bail!("--max-worlds is limited to 4");
            }
            let cs = thresholds.iter().map(|s| threshold(s)).collect::<Result<Vec<_>>>()?;
            let rows = explore_thresholds(&cs, max_worlds, &BruteForceBudget::with_m_max(m_max))?;
            let text: String = rows
                .iter()
                .map(|r| {
                    format!(
                        "c = {}: {} models, [{}] vs LP: holds&feasible {}, holds&infeasible {}, fails&feasible {}, fails&infeasible {}\n",
                        r.threshold,
                        r.models,
                        r.properties.join(" "),
                        r.holds_and_feasible,
                        r.holds_but_infeasible,
                        r.fails_but_feasible,
                        r.fails_and_infeasible
                    )
                })
                .collect();
            out.emit(text, serde_json::to_value(&rows)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// The relation exactly as stated, plus `X ⪯ X`.
fn literal_table(rel: &ComparativeRelation) -> Result<ComparisonTable> {
    let stated: Vec<(u64, u64)> = rel
        .statements
        .iter()
        .flat_map(|(x, c, y)| {
            let (x, y) = (x.mask(), y.mask());
            match c {
                Comparison::Strict | Comparison::Weak => vec![(x, y)],
                Comparison::Equiv => vec![(x, y), (y, x)],
            }
        })
        .collect();
    ComparisonTable::from_fn(rel.universe.clone(), |x, y| x == y || stated.contains(&(x, y)))
        .map_err(|e| anyhow!("{e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
