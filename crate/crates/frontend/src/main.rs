//! Command-line checker for recursive systems and mathematical systems
//! with structural induction.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser as ClapParser, Subcommand};

use indukt::corpus;
use indukt::files::{parse_proof, parse_rderivation, parse_system, print_proof};
use indukt::pipeline;
use indukt_core::binding::vars_of;
use indukt_core::kernel::{check_proof, MathSystem, Proof};
use indukt_core::rsys::{check_rderivation, r_derivable, saturate, Verdict};
use indukt_core::semantics::{EvalBounds, Evaluator, TV3};
use indukt_core::syntax::{parse_formula, Formula, Symbol, Variable};
use indukt_core::transform::{c_eliminate, deduction, generalize_constants, relativize_gamma, relativize_psi, theta_proof};

#[derive(ClapParser)]
#[command(name = "indukt", version, about = "Proof checker for formal systems with structural induction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof file against a system
    Check { system: PathBuf, proof: PathBuf },
    /// Check an R-derivation file against a system
    Rcheck { system: PathBuf, derivation: PathBuf },
    /// Saturate ground facts up to a size bound and print them sorted
    Saturate {
        system: PathBuf,
        #[arg(long)]
        bound: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
    /// Decide bounded derivability of a ground prime formula
    Derivable {
        system: PathBuf,
        /// prime formula, e.g. "(pred D (l 1))" or "(eq (l a) (l a))"
        prime: String,
        #[arg(long)]
        bound: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
    /// Enumerate the variable-free language members up to a length
    EnumerateLists {
        system: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
    /// Evaluate a statement at bounded list size
    Eval {
        system: PathBuf,
        formula: String,
        #[arg(long, default_value_t = 6)]
        list_size: usize,
        #[arg(long, default_value_t = 4_000_000)]
        budget: u64,
    },
    /// Translate a proof into the reduced connective fragment
    Theta {
        system: PathBuf,
        proof: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Eliminate a predicate arity from a proof
    Celim {
        system: PathBuf,
        proof: PathBuf,
        #[arg(long)]
        pred: String,
        #[arg(long)]
        arity: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Discharge an adjoined statement from a proof
    Deduce {
        system: PathBuf,
        proof: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Replace extension constants by fresh variables
    Genconst {
        /// the unextended target system
        system: PathBuf,
        proof: PathBuf,
        /// constant=variable pairs, e.g. --map c=p --map d=q
        #[arg(long)]
        map: Vec<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Relativize a formula to a guard predicate
    Relativize {
        system: PathBuf,
        formula: String,
        #[arg(long, default_value = "N0")]
        guard: String,
        #[arg(long, default_value = "both", value_parser = ["gamma", "psi", "both"])]
        mode: String,
    },
    /// Run the reversal-theorem pipeline end to end
    #[command(name = "pipeline-3-3")]
    Pipeline33 {
        /// directory for the intermediate proof files
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Corpus operations
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Check every corpus entry against its expected verdict
    Run,
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))
}

fn load_system_file(path: &Path) -> Result<MathSystem, String> {
    parse_system(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_proof_file(path: &Path, sys: &MathSystem) -> Result<Proof, String> {
    parse_proof(&read(path)?, sys).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_statement(text: &str, sys: &MathSystem) -> Result<Formula, String> {
    let mut pool = sys.pool.clone();
    parse_formula(text, &mut pool).map_err(|e| e.to_string())
}

/// exit 0 = accepted / done, 1 = rejected, 2 = usage or I/O error
fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Check { system, proof } => {
            let sys = load_system_file(&system)?;
            let p = load_proof_file(&proof, &sys)?;
            let report = check_proof(&sys, &p);
            println!("{report}");
            Ok(report.accepted)
        }
        Command::Rcheck { system, derivation } => {
            let sys = load_system_file(&system)?;
            let d = parse_rderivation(&read(&derivation)?, &sys)
                .map_err(|e| format!("{}: {e}", derivation.display()))?;
            let report = check_rderivation(&sys.rsys, &sys.lang, &d);
            println!("{report}");
            Ok(report.accepted)
        }
        Command::Saturate { system, bound, budget } => {
            let sys = load_system_file(&system)?;
            let facts = saturate(&sys.rsys, &sys.lang, bound, budget);
            for line in facts.sorted_lines() {
                println!("{line}");
            }
            eprintln!(
                "; {} facts, bound {bound}, {}",
                facts.len(),
                if facts.complete { "complete" } else { "partial" }
            );
            Ok(true)
        }
        Command::Derivable { system, prime, bound, budget } => {
            let sys = load_system_file(&system)?;
            let f = parse_statement(&prime, &sys)?;
            let Formula::Prime(p) = f else {
                return Err("expected a prime formula".into());
            };
            if !p.is_ground() {
                return Err("expected a ground prime formula".into());
            }
            let facts = saturate(&sys.rsys, &sys.lang, bound, budget);
            let v = r_derivable(&sys.rsys, &sys.lang, &facts, &p);
            println!(
                "{}",
                match v {
                    Verdict::True => "true",
                    Verdict::False => "false",
                    Verdict::Unknown => "unknown",
                }
            );
            Ok(v == Verdict::True)
        }
        Command::EnumerateLists { system, max_len } => {
            let sys = load_system_file(&system)?;
            for l in sys.lang.enumerate_ground(max_len) {
                println!("{l}");
            }
            Ok(true)
        }
        Command::Eval { system, formula, list_size, budget } => {
            let sys = load_system_file(&system)?;
            let f = parse_statement(&formula, &sys)?;
            let ev = Evaluator::new(&sys);
            let bounds = EvalBounds { list_size, depth_budget: budget };
            let v = ev.eval_statement(&f, &bounds).map_err(|e| e.to_string())?;
            println!("{v}");
            Ok(v == TV3::True)
        }
        Command::Theta { system, proof, out } => {
            let sys = load_system_file(&system)?;
            let p = load_proof_file(&proof, &sys)?;
            let (_, mapped) = theta_proof(&sys, &p).map_err(|e| e.to_string())?;
            emit(&out, &print_proof(&mapped))?;
            Ok(true)
        }
        Command::Celim { system, proof, pred, arity, out } => {
            let sys = load_system_file(&system)?;
            let p = load_proof_file(&proof, &sys)?;
            let mapped =
                c_eliminate(&sys, &Symbol::new(&pred), arity, &p).map_err(|e| e.to_string())?;
            emit(&out, &print_proof(&mapped))?;
            Ok(true)
        }
        Command::Deduce { system, proof, name, out } => {
            let sys = load_system_file(&system)?;
            let p = load_proof_file(&proof, &sys)?;
            let (_, trace) = deduction(&sys, &name, &p).map_err(|e| e.to_string())?;
            emit(&out, &print_proof(&trace.output))?;
            Ok(true)
        }
        Command::Genconst { system, proof, map, out } => {
            let base = load_system_file(&system)?;
            let mut consts = BTreeSet::new();
            let mut pairs: Vec<(Symbol, String)> = Vec::new();
            for entry in &map {
                let (c, v) = entry
                    .split_once('=')
                    .ok_or_else(|| format!("bad --map entry `{entry}`, expected const=var"))?;
                consts.insert(Symbol::new(c));
                pairs.push((Symbol::new(c), v.to_string()));
            }
            let extended = base.extend_alphabet(&consts).map_err(|e| e.to_string())?;
            let p = load_proof_file(&proof, &extended)?;
            let mut used: BTreeSet<Variable> = BTreeSet::new();
            for (f, _) in &p.steps {
                used.extend(vars_of(f));
            }
            let next_index =
                used.iter().map(|v| v.index()).max().map_or(0, |i| i + 1);
            let mut vmap: BTreeMap<Symbol, Variable> = BTreeMap::new();
            for (i, (c, v)) in pairs.into_iter().enumerate() {
                vmap.insert(c, Variable::new(&v, next_index + i as u32));
            }
            let mapped = generalize_constants(&base, &vmap, &p).map_err(|e| e.to_string())?;
            emit(&out, &print_proof(&mapped))?;
            Ok(true)
        }
        Command::Relativize { system, formula, guard, mode } => {
            let sys = load_system_file(&system)?;
            let f = parse_statement(&formula, &sys)?;
            let g = Symbol::new(&guard);
            match mode.as_str() {
                "gamma" => println!("{}", relativize_gamma(&f, &g)),
                "psi" => println!("{}", relativize_psi(&f, &g)),
                _ => {
                    let psi = relativize_psi(&f, &g);
                    println!("{}", relativize_gamma(&psi, &g));
                }
            }
            Ok(true)
        }
        Command::Pipeline33 { out_dir } => {
            let out = pipeline::pipeline_3_3().map_err(|e| e.to_string())?;
            for s in &out.stages {
                println!("{s}");
            }
            for t in &out.targets {
                println!("proved: {t}");
            }
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| format!("creating {}: {e}", dir.display()))?;
                for p in &out.proofs {
                    let path = dir.join(format!("{}.mproof", p.name));
                    std::fs::write(&path, print_proof(&p.proof))
                        .map_err(|e| format!("writing {}: {e}", path.display()))?;
                    println!("wrote {} ({}, {} steps)", path.display(), p.system_label, p.proof.steps.len());
                }
            }
            Ok(true)
        }
        Command::Corpus { command: CorpusCommand::Run } => {
            let mut all_pass = true;
            for e in corpus::entries() {
                let r = corpus::run_entry(&e);
                println!("{r}");
                all_pass &= r.pass;
            }
            // the two pipeline constructions count as corpus entries
            match pipeline::pipeline_3_3() {
                Ok(_) => println!("PASS pipeline-3-3"),
                Err(e) => {
                    println!("FAIL pipeline-3-3      {e}");
                    all_pass = false;
                }
            }
            let pa_ok = (|| -> Result<(), String> {
                let sys = corpus::load_system("spa.msys").map_err(|e| e.to_string())?;
                let mut pool = sys.pool.clone();
                let h = parse_formula("(eq (l + ( ?x 0 )) (l ?x))", &mut pool)
                    .map_err(|e| e.to_string())?;
                let x = pool.lookup("x").unwrap();
                pipeline::pa_induction_pipeline(&sys, &h, &x).map_err(|e| e.to_string())?;
                Ok(())
            })();
            match pa_ok {
                Ok(()) => println!("PASS pa-induction"),
                Err(e) => {
                    println!("FAIL pa-induction      {e}");
                    all_pass = false;
                }
            }
            Ok(all_pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
