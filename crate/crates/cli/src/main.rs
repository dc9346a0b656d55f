//! `nabla`: command-line front end for nabla-core.
//!
//! Exit codes: 0 success (or VALID), 1 INVALID or a rejected proof,
//! 2 any error.

use std::fs;
use std::io::{self, Read};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nabla_core::{
    check_derivation, decide_valid, in_lifting, lifted_members, lifting_witness, model_check, neg_dual,
    negation_normal_form, parse_coalgebra_file, parse_elem, parse_elem_of_sets, parse_elem_set, parse_formula,
    parse_inequality, parse_proof, parse_relation, slim_redistributions, CoalgebraFile, FinalSequence, Formula,
    Functor, PropFrame, Validity, DEFAULT_MAX_ENUM,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "nabla", version, about = "Coalgebraic logic with the cover modality")]
struct Cli {
    /// Cap on the size of any enumeration.
    #[arg(long, global = true, env = "NABLA_MAX_ENUM", default_value_t = DEFAULT_MAX_ENUM as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_enum: u64,

    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Machine,
}

#[derive(Args)]
struct FunctorArg {
    /// Functor expression, e.g. `P`, `Const(c)*Id*Id`, `P.P`.
    #[arg(long)]
    functor: String,
}

#[derive(Args)]
struct PropsArg {
    /// Proposition letters, comma separated; wraps the functor with a
    /// constant recording which letters hold.
    #[arg(long, value_delimiter = ',')]
    props: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a formula canonically with its depth and subformula count.
    Parse {
        #[command(flatten)]
        functor: FunctorArg,
        formula: String,
    },
    /// Model check a formula at a state of a coalgebra file (`-` for stdin).
    Check {
        file: String,
        state: String,
        formula: String,
        #[command(flatten)]
        props: PropsArg,
    },
    /// Decide `a <= b`; prints a countermodel when it fails.
    Valid {
        #[command(flatten)]
        functor: FunctorArg,
        #[command(flatten)]
        props: PropsArg,
        inequality: String,
    },
    /// List the slim redistributions of a set `{α, ...}`.
    Srd {
        #[command(flatten)]
        functor: FunctorArg,
        set: String,
    },
    /// List the lifted members of an element of `T P X`.
    Members {
        #[command(flatten)]
        functor: FunctorArg,
        phi: String,
    },
    /// Decide whether two elements are related by the lifting of a relation
    /// file.
    Lift {
        #[command(flatten)]
        functor: FunctorArg,
        relation: String,
        left: String,
        right: String,
    },
    /// Negation normal form; with `--dual`, list `Q(α)` for `nab α`.
    Nnf {
        #[command(flatten)]
        functor: FunctorArg,
        #[arg(long)]
        dual: bool,
        formula: String,
    },
    /// Sizes of the levels `T^k 1` for `k <= n`.
    Finalseq {
        #[command(flatten)]
        functor: FunctorArg,
        n: usize,
        /// Also list the elements of each level.
        #[arg(long)]
        elements: bool,
    },
    /// Check a proof file (`-` for stdin).
    Checkproof {
        file: String,
        /// Functor for files without a `functor:` header.
        #[arg(long)]
        functor: Option<String>,
    },
}

struct Report {
    text: String,
    machine: Value,
    code: u8,
}

impl Report {
    fn ok(text: String, machine: Value) -> Self {
        Report { text, machine, code: 0 }
    }
}

type CmdResult = Result<Report, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output;
    match run(cli) {
        Ok(report) => {
            match output {
                Output::Text => print!("{}", report.text),
                Output::Machine => println!("{}", report.machine),
            }
            ExitCode::from(report.code)
        }
        Err(msg) => {
            match output {
                Output::Text => eprintln!("error: {msg}"),
                Output::Machine => println!("{}", json!({ "error": msg })),
            }
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let cap = usize::try_from(cli.max_enum).unwrap_or(usize::MAX);
    let functor = |arg: &FunctorArg| -> Result<Functor, String> {
        Functor::parse(&arg.functor).map(|f| f.with_max_enum(cap)).map_err(err)
    };
    match cli.command {
        Command::Parse { functor: f, formula } => cmd_parse(&functor(&f)?, &formula),
        Command::Check {
            file,
            state,
            formula,
            props,
        } => cmd_check(&read_input(&file)?, &state, &formula, &props.props),
        Command::Valid {
            functor: f,
            props,
            inequality,
        } => cmd_valid(&functor(&f)?, &props.props, &inequality),
        Command::Srd { functor: f, set } => cmd_srd(&functor(&f)?, &set),
        Command::Members { functor: f, phi } => cmd_members(&functor(&f)?, &phi),
        Command::Lift {
            functor: f,
            relation,
            left,
            right,
        } => cmd_lift(&functor(&f)?, &read_input(&relation)?, &left, &right),
        Command::Nnf {
            functor: f,
            dual,
            formula,
        } => cmd_nnf(&functor(&f)?, dual, &formula),
        Command::Finalseq {
            functor: f,
            n,
            elements,
        } => cmd_finalseq(&functor(&f)?, n, elements),
        Command::Checkproof { file, functor: f } => {
            let f = f
                .map(|s| Functor::parse(&s).map(|f| f.with_max_enum(cap)).map_err(err))
                .transpose()?;
            cmd_checkproof(&read_input(&file)?, f.as_ref(), cap)
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn lines<T: ToString>(items: &[T]) -> String {
    items.iter().map(|x| format!("{}\n", x.to_string())).collect()
}

fn strings<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(ToString::to_string).collect()
}

fn cmd_parse(functor: &Functor, text: &str) -> CmdResult {
    let a = parse_formula(text, functor).map_err(err)?;
    let (depth, subs) = (a.depth(), a.subformulas().len());
    Ok(Report::ok(
        format!("formula: {a}\ndepth: {depth}\nsubformulas: {subs}\n"),
        json!({ "formula": a.to_string(), "depth": depth, "subformulas": subs }),
    ))
}

fn cmd_check(text: &str, state: &str, formula: &str, props: &[String]) -> CmdResult {
    let props = (!props.is_empty()).then_some(props);
    let file = parse_coalgebra_file(text, props).map_err(err)?;
    let a = parse_formula(formula, file.formula_functor()).map_err(err)?;
    let prepared = file.prepare(&a).map_err(err)?;
    let holds = model_check(&file.coalgebra, state, &prepared).map_err(err)?;
    Ok(Report::ok(
        format!("{holds}\n"),
        json!({ "state": state, "formula": a.to_string(), "holds": holds }),
    ))
}

fn cmd_valid(functor: &Functor, props: &[String], text: &str) -> CmdResult {
    let ineq = parse_inequality(text, functor).map_err(err)?;
    let frame = if props.is_empty() {
        None
    } else {
        Some(PropFrame::new(props, functor.clone()).map_err(err)?)
    };
    let verdict = match &frame {
        Some(fr) => {
            let lhs = fr.embed(&ineq.lhs).map_err(err)?;
            let rhs = fr.embed(&ineq.rhs).map_err(err)?;
            decide_valid(fr.wrapped(), &lhs, &rhs)
        }
        None => decide_valid(functor, &ineq.lhs, &ineq.rhs),
    }
    .map_err(err)?;
    match verdict {
        Validity::Valid => Ok(Report::ok(
            "VALID\n".into(),
            json!({ "inequality": ineq.to_string(), "valid": true }),
        )),
        Validity::Invalid(cm) => {
            let file = CoalgebraFile {
                coalgebra: cm.coalgebra,
                props: frame,
                witness: Some(cm.state.clone()),
            };
            let dump = file.to_string();
            Ok(Report {
                text: format!("INVALID\n{dump}"),
                machine: json!({
                    "inequality": ineq.to_string(),
                    "valid": false,
                    "witness": cm.state,
                    "countermodel": dump,
                }),
                code: 1,
            })
        }
    }
}

fn cmd_srd(functor: &Functor, text: &str) -> CmdResult {
    let a = parse_elem_set(functor.shape(), text).map_err(err)?;
    let out = strings(&slim_redistributions(functor, &a).map_err(err)?);
    Ok(Report::ok(lines(&out), json!({ "srd": out })))
}

fn cmd_members(functor: &Functor, text: &str) -> CmdResult {
    let phi = parse_elem_of_sets(functor.shape(), text).map_err(err)?;
    let out = strings(&lifted_members(functor, &phi).map_err(err)?);
    Ok(Report::ok(lines(&out), json!({ "members": out })))
}

fn cmd_lift(functor: &Functor, relation: &str, left: &str, right: &str) -> CmdResult {
    let r = parse_relation(relation).map_err(err)?;
    let e1 = parse_elem(functor.shape(), left).map_err(err)?;
    let e2 = parse_elem(functor.shape(), right).map_err(err)?;
    let related = in_lifting(functor, &r, &e1, &e2).map_err(err)?;
    let mut text = format!("{related}\n");
    let mut flow = Vec::new();
    if related {
        if let Some(w) = lifting_witness(functor, &r, &e1, &e2).map_err(err)? {
            for (a, b, k) in &w.assignments {
                text.push_str(&format!("  {a} -> {b} : {k}\n"));
                flow.push(json!([a.to_string(), b.to_string(), k.to_string()]));
            }
        }
    }
    Ok(Report::ok(text, json!({ "related": related, "witness": flow })))
}

fn cmd_nnf(functor: &Functor, dual: bool, text: &str) -> CmdResult {
    let a = parse_formula(text, functor).map_err(err)?;
    if dual {
        let Formula::Nabla(alpha) = &a else {
            return Err(format!("--dual needs a formula `nab α`, not `{a}`"));
        };
        let out = strings(&neg_dual(functor, alpha).map_err(err)?);
        return Ok(Report::ok(lines(&out), json!({ "dual": out })));
    }
    let n = negation_normal_form(functor, &a).map_err(err)?;
    Ok(Report::ok(format!("{n}\n"), json!({ "nnf": n.to_string() })))
}

fn cmd_finalseq(functor: &Functor, n: usize, elements: bool) -> CmdResult {
    let seq = FinalSequence::build(functor, n).map_err(err)?;
    let mut text = String::new();
    let mut levels = Vec::new();
    for k in 0..=n {
        text.push_str(&format!("level {k}: {}\n", seq.size(k)));
        let rendered: Vec<String> = (0..seq.size(k)).map(|i| seq.render(k, i)).collect();
        if elements {
            for r in &rendered {
                text.push_str(&format!("  {r}\n"));
            }
            levels.push(json!({ "level": k, "size": seq.size(k), "elements": rendered }));
        } else {
            levels.push(json!({ "level": k, "size": seq.size(k) }));
        }
    }
    Ok(Report::ok(text, json!({ "levels": levels })))
}

fn cmd_checkproof(text: &str, functor: Option<&Functor>, cap: usize) -> CmdResult {
    let file = parse_proof(text, functor).map_err(err)?;
    let f = file.functor.clone().with_max_enum(cap);
    match check_derivation(&f, &file.derivation) {
        Ok(()) => Ok(Report::ok(
            "Ok\n".into(),
            json!({ "ok": true, "nodes": file.derivation.size() }),
        )),
        Err(e) => Ok(Report {
            text: format!("FAIL {}: {}: {}\n", e.path, e.reason, e.detail),
            machine: json!({ "ok": false, "path": e.path, "reason": e.reason.as_str(), "detail": e.detail }),
            code: 1,
        }),
    }
}
