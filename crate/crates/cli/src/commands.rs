use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};

use cl15_core::analysis::{
    audit_resolution, build_tree, dominated_set, dominates, drives, find_total_resolution_with,
    opposite_pairs, parse_pairing, parse_resolution, strictly_drives, visible, Domination,
    OppositionPairing, Resolution, SearchBudget, TruncUnitTree,
};
use cl15_core::cirquent::{
    check_proof, parse_derivation_file, write_cirquent, write_derivation_file, write_rule,
    DerivationFile,
};
use cl15_core::derivation::{prove, Finitization, Proof, ProveError, ProveOptions, ProveSource, Stage};
use cl15_core::formula::{parse_formula, render, Formula};
use cl15_core::game::{
    parse_transcript, play_match, write_transcript, Copycat, MatchTranscripts, Run, Scripted, Silent,
};
use cl15_core::hyper::{
    build_hyperformula, counter_model, finitize, is_binary, Hypermodel, LiteralSource, ATOM_CAP,
};
use cl15_core::unit::UnitRef;

use crate::args::{
    AdversaryKind, AnalyzeArgs, Budgets, CheckArgs, Cli, Command, Evidence, FormulaInput, Play,
    ProveArgs, SimulateArgs, TautArgs,
};
use crate::repl::Repl;
use crate::report::{Reached, Report};

/// Result of a command that ran to the end. Usage, input and budget
/// failures are errors instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Not a tautology, no proof found, or proof rejected.
    Negative,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> ExitCode {
        match s {
            Status::Success => ExitCode::SUCCESS,
            Status::Negative => ExitCode::from(1),
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Status> {
    let b = &cli.budgets;
    match &cli.command {
        Command::Parse(input) => {
            println!("{}", render(&formula(input)?));
            Ok(Status::Success)
        }
        Command::Simulate(args) => simulate(args, b),
        Command::Analyze(args) => analyze(args, b),
        Command::Taut(args) => taut(args, b),
        Command::Prove(args) => prove_command(args, b),
        Command::Check(args) => check(args),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn formula(input: &FormulaInput) -> Result<Formula> {
    let text = match (&input.formula, &input.formula_file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => read(p)?,
        (None, None) => bail!("no formula given"),
    };
    parse_formula(text.trim()).context("formula")
}

fn play(f: &Formula, p: &Play, b: &Budgets) -> Result<MatchTranscripts> {
    let (n, limit) = (p.iterations, b.move_budget);
    let t = match p.adversary {
        AdversaryKind::Silent => play_match(f, Silent, n, limit),
        AdversaryKind::Scripted => {
            let path = p.script.as_ref().context("--script is required")?;
            let script = parse_transcript(&read(path)?)?;
            play_match(f, Scripted::from_transcript(&script), n, limit)
        }
        AdversaryKind::Copycat => play_match(f, Copycat::new(f).burst(p.burst), n, limit),
        AdversaryKind::Interactive => {
            let stdin = io::stdin();
            play_match(f, Repl::new(stdin.lock(), io::stderr()), n, limit)
        }
    };
    t.context("play")
}

enum Source {
    Run(Run),
    Pairing(OppositionPairing),
}

impl Source {
    /// Opposite pairs among the units of `t`.
    fn pairing_on(&self, t: &TruncUnitTree) -> Result<OppositionPairing> {
        Ok(match self {
            Source::Run(run) => opposite_pairs(t, run)?,
            Source::Pairing(p) => p.restrict(t),
        })
    }

    fn literals<'a>(&'a self, p: &'a OppositionPairing) -> LiteralSource<'a> {
        match self {
            Source::Run(run) => LiteralSource::Run(run),
            Source::Pairing(_) => LiteralSource::Pairing(p),
        }
    }
}

struct Gathered {
    source: Source,
    /// How the source was obtained, for reports.
    origin: String,
    played: bool,
}

fn gather(f: &Formula, e: &Evidence, b: &Budgets) -> Result<Gathered> {
    if let Some(path) = &e.pairing {
        let p = parse_pairing(&read(path)?, f).context("pairing file")?;
        return Ok(Gathered {
            source: Source::Pairing(p),
            origin: format!("pairing {}", path.display()),
            played: false,
        });
    }
    if let Some(path) = &e.transcript {
        let run = parse_transcript(&read(path)?)?;
        return Ok(Gathered {
            source: Source::Run(run),
            origin: format!("transcript {}", path.display()),
            played: false,
        });
    }
    let t = play(f, &e.play, b)?;
    let kind = format!("{:?}", e.play.adversary).to_lowercase();
    Ok(Gathered {
        source: Source::Run(t.hpm),
        origin: format!("{kind} adversary, {} iterations", e.play.iterations),
        played: true,
    })
}

fn resolution(path: Option<&PathBuf>) -> Result<Resolution> {
    match path {
        Some(p) => parse_resolution(&read(p)?).context("resolution file"),
        None => Ok(Resolution::new()),
    }
}

fn simulate(args: &SimulateArgs, b: &Budgets) -> Result<Status> {
    let f = formula(&args.input)?;
    let t = play(&f, &args.play, b)?;
    let text = write_transcript(&t.hpm);
    match &args.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    eprintln!(
        "{} grants, {} labmoves{}",
        t.grants,
        t.hpm.len(),
        if t.quit { ", ended by the adversary" } else { "" }
    );
    Ok(Status::Success)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>, empty: &str) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if v.is_empty() {
        empty.to_string()
    } else {
        v.join(" ")
    }
}

fn resolution_text(r: &Resolution) -> String {
    join(r.iter().map(|(u, bits)| format!("{u}={}", bits.token())), "empty")
}

/// Everything a query may consult.
struct Scene<'a> {
    f: &'a Formula,
    height: usize,
    t: &'a TruncUnitTree,
    pairing: &'a OppositionPairing,
    full_pairing: &'a OppositionPairing,
    source: &'a Source,
    budget: SearchBudget,
}

fn answer(s: &Scene<'_>, query: &str) -> Result<String> {
    let unit = |text: &str| -> Result<UnitRef> { Ok(text.parse()?) };
    let words: Vec<&str> = query.split_whitespace().collect();
    let r = s.t.resolution();
    Ok(match words.as_slice() {
        ["drives", e, g] => match drives(s.t, &unit(e)?, &unit(g)?)? {
            Some(x) => format!("yes via {x}"),
            None => "no".into(),
        },
        ["strictly", e, g] => yes_no(strictly_drives(s.t, r, &unit(e)?, &unit(g)?)?).into(),
        ["visible", e, g] => yes_no(visible(s.t, r, s.pairing, &unit(e)?, &unit(g)?)?).into(),
        ["dominates", e, g] => match dominates(s.t, s.pairing, &unit(e)?, &unit(g)?)? {
            None => "no".into(),
            Some(Domination::ProperSubunit) => "yes as a proper subunit".into(),
            Some(Domination::Chain(links)) => format!(
                "yes via {}",
                join(links.iter().map(|l| format!("{}/{}/{}", l.l, l.m, l.x)), "")
            ),
        },
        ["dominated", e] => join(dominated_set(s.t, s.pairing, &unit(e)?)?, "none"),
        ["pairing"] => join(s.pairing.pairs().iter().map(|(l, m)| format!("{l}~{m}")), "empty"),
        ["audit"] => {
            let a = audit_resolution(s.t, s.pairing)?;
            if let Some(e) = a.root_dominated_by {
                format!("fails: {e} dominates the root")
            } else if let Some((e, g)) = a.mutual {
                format!("fails: {e} and {g} dominate each other")
            } else if let Some((e, g, h)) = a.intransitive {
                format!("fails: {e} dominates {g}, {g} dominates {h}, {e} misses {h}")
            } else {
                "passes".into()
            }
        }
        ["find"] => {
            let found = find_total_resolution_with(
                s.f,
                s.height,
                s.full_pairing,
                s.source.literals(s.full_pairing),
                s.budget,
            )?;
            match found {
                Some((r, _)) => format!("found {}", resolution_text(&r)),
                None => "none".into(),
            }
        }
        _ => bail!("unknown query {query:?}"),
    })
}

fn analyze(args: &AnalyzeArgs, b: &Budgets) -> Result<Status> {
    let f = formula(&args.input)?;
    let g = gather(&f, &args.evidence, b)?;
    let r = resolution(args.resolution.as_ref())?;
    let full = build_tree(&f, args.height, &Resolution::new(), b.node_budget)?;
    let full_pairing = g.source.pairing_on(&full)?;
    let t = build_tree(&f, args.height, &r, b.node_budget)?;
    let pairing = full_pairing.restrict(&t);
    let scene = Scene {
        f: &f,
        height: args.height,
        t: &t,
        pairing: &pairing,
        full_pairing: &full_pairing,
        source: &g.source,
        budget: SearchBudget {
            nodes: b.node_budget,
            candidates: b.candidate_budget,
        },
    };
    let queries = read(&args.queries)?;
    let mut out = io::stdout().lock();
    for (i, line) in queries.lines().enumerate() {
        let q = line.trim();
        if q.is_empty() || q.starts_with('#') {
            continue;
        }
        let a = answer(&scene, q).with_context(|| format!("query line {}", i + 1))?;
        writeln!(out, "{q}: {a}")?;
    }
    Ok(Status::Success)
}

fn print_model(out: &mut impl Write, model: &Hypermodel) -> io::Result<()> {
    for (atom, value) in &model.values {
        writeln!(out, "counter-model: {atom} = {value}")?;
    }
    writeln!(out, "counter-model: others = {}", model.default)
}

fn taut(args: &TautArgs, b: &Budgets) -> Result<Status> {
    let f = formula(&args.input)?;
    let g = gather(&f, &args.evidence, b)?;
    let r = resolution(args.resolution.as_ref())?;
    let full = build_tree(&f, args.height, &Resolution::new(), b.node_budget)?;
    let t = build_tree(&f, args.height, &r, b.node_budget)?;
    let pairing = g.source.pairing_on(&full)?.restrict(&t);
    let image = build_hyperformula(&t, g.source.literals(&pairing))?;
    let mut out = io::stdout().lock();
    writeln!(out, "units: {}", t.len())?;
    writeln!(out, "hyperatoms: {}", image.atoms().len())?;
    writeln!(out, "binary: {}", yes_no(is_binary(&image)))?;
    if args.show {
        writeln!(out, "image: {image}")?;
    }
    if let Some(model) = counter_model(&image, ATOM_CAP)? {
        writeln!(out, "tautology: no")?;
        print_model(&mut out, &model)?;
        return Ok(Status::Negative);
    }
    writeln!(out, "tautology: yes")?;
    if args.minimize {
        let m = finitize(&image)?;
        writeln!(out, "minimized-size: {} of {}", m.size(), image.size())?;
        if args.show {
            writeln!(out, "minimized: {m}")?;
        }
    }
    Ok(Status::Success)
}

/// Stage, outcome name and whether the failure is a domain-negative answer.
fn classify(e: &ProveError) -> (Stage, &'static str, bool) {
    match e {
        ProveError::NotTautological { .. } => (Stage::Image, "NotTautological", true),
        ProveError::NoResolution => (Stage::Resolution, "NoResolution", true),
        ProveError::NotBinary => (Stage::Image, "NotBinary", true),
        ProveError::Rejected(_) => (Stage::Check, "Rejected", true),
        ProveError::Analysis { stage, .. }
        | ProveError::Hyper { stage, .. }
        | ProveError::Derivation { stage, .. } => (*stage, "Error", false),
    }
}

fn trace(f: &Formula, proof: &Proof) {
    eprintln!("trace image: {}", proof.image);
    eprintln!("trace resolution: {}", resolution_text(&proof.resolution));
    for (e, dominated) in proof.oracle.entries() {
        eprintln!("trace dominates {e}: {}", join(dominated, "none"));
    }
    let first = &proof.first;
    eprintln!("trace start: {}", write_cirquent(&first.cirquents[0]));
    for (i, step) in first.steps.iter().enumerate() {
        let pending = if step.completes { "" } else { " (continues)" };
        eprintln!(
            "trace step {} stage {}: {}{pending}",
            i + 1,
            step.stage,
            write_rule(&step.rule)
        );
        eprintln!("trace   cirquent: {}", write_cirquent(&first.cirquents[i + 1]));
        for (slot, h) in first.images[i + 1].resolve(&proof.image).iter().enumerate() {
            eprintln!("trace   image {slot}: {h}");
        }
    }
    let end = &proof.endgame;
    for (i, rule) in end.rules.iter().enumerate().rev() {
        eprintln!("trace endgame: {} to {}", write_rule(rule), write_cirquent(&end.cirquents[i]));
    }
    eprintln!("trace proved: {}", render(f));
}

fn prove_command(args: &ProveArgs, b: &Budgets) -> Result<Status> {
    let f = formula(&args.input)?;
    let mut report = Report::default();
    report.set("formula", render(&f));
    report.set("height", args.height);
    report.set("budget.moves", b.move_budget);
    report.set("budget.nodes", b.node_budget);
    report.set("budget.candidates", b.candidate_budget);
    let finish = |report: &Report| -> Result<()> {
        match &args.report {
            Some(path) => write(path, &report.render()),
            None => Ok(()),
        }
    };
    let g = match gather(&f, &args.evidence, b) {
        Ok(g) => g,
        Err(e) => {
            report.stages(Reached::FailedPlay, true, args.minimize);
            report.set("outcome", "Error");
            finish(&report)?;
            return Err(e);
        }
    };
    report.set("source", &g.origin);
    if let Source::Run(run) = &g.source {
        report.set("moves.used", run.len());
    }
    if let Ok(t) = build_tree(&f, args.height, &Resolution::new(), b.node_budget) {
        report.set("units.full", t.len());
    }
    let opts = ProveOptions {
        height: args.height,
        budget: SearchBudget {
            nodes: b.node_budget,
            candidates: b.candidate_budget,
        },
        finitization: if args.minimize {
            Finitization::Minimize
        } else {
            Finitization::Keep
        },
    };
    let result = match &g.source {
        Source::Run(run) => prove(&f, ProveSource::Run(run), opts),
        Source::Pairing(p) => prove(&f, ProveSource::Pairing(p), opts),
    };
    let proof = match result {
        Ok(proof) => proof,
        Err(e) => {
            let (stage, name, negative) = classify(&e);
            report.stages(Reached::FailedAt(stage), g.played, args.minimize);
            report.set("outcome", name);
            report.set("reason", &e);
            finish(&report)?;
            if !negative {
                bail!("{e}");
            }
            println!("{name}: {e}");
            if let ProveError::NotTautological { counter_model } = &e {
                print_model(&mut io::stdout().lock(), counter_model)?;
            }
            return Ok(Status::Negative);
        }
    };
    if args.trace {
        trace(&f, &proof);
    }
    let text = write_derivation_file(&DerivationFile {
        formula: Some(f.clone()),
        derivation: proof.derivation.clone(),
    });
    let reread = parse_derivation_file(&text).context("proof file does not read back")?;
    check_proof(&reread.derivation, &f).context("proof file does not check after reading back")?;
    let d = &proof.derivation;
    report.stages(Reached::All, g.played, args.minimize);
    report.set("outcome", "Proved");
    if let Ok(t) = build_tree(&f, args.height, &proof.resolution, b.node_budget) {
        report.set("units.trimmed", t.len());
    }
    report.set("rules", d.rules.len());
    report.set("rules.first", proof.first.steps.len());
    report.set("rules.endgame", proof.endgame.rules.len());
    report.set("cirquents", d.cirquents.len());
    report.set("pairs", proof.pairing.len());
    report.set("resolution", resolution_text(&proof.resolution));
    finish(&report)?;
    match &args.out {
        Some(path) => {
            write(path, &text)?;
            println!(
                "Proved: {} rules, {} cirquents, written to {}",
                d.rules.len(),
                d.cirquents.len(),
                path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(Status::Success)
}

fn check(args: &CheckArgs) -> Result<Status> {
    let text = read(&args.file)?;
    let file = match parse_derivation_file(&text) {
        Ok(file) => file,
        Err(e) => {
            println!("Rejected: {e}");
            return Ok(Status::Negative);
        }
    };
    let f = match (&args.formula, &file.formula) {
        (Some(t), _) => parse_formula(t).context("formula")?,
        (None, Some(f)) => f.clone(),
        (None, None) => bail!("the file names no formula; pass --formula"),
    };
    match check_proof(&file.derivation, &f) {
        Ok(()) => {
            println!("Accepted: {} rules", file.derivation.rules.len());
            Ok(Status::Success)
        }
        Err(v) => {
            match v.step {
                Some(s) => println!("Rejected at step {s}: {}", v.reason),
                None => println!("Rejected: {}", v.reason),
            }
            Ok(Status::Negative)
        }
    }
}
