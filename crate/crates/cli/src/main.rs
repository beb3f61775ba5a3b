mod args;

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use derivekit::dataset::{Census, DerivationSequence};
use derivekit::eval::ReportFormat;
use derivekit::generator::{audit, GenError};
use derivekit::kb::load_kb;
use derivekit::search::{reconstruct_hops, Reconstruction};
use derivekit::{
    builtin_action_set, evaluate, generate, EquationState, GenConfig, HeuristicParams,
    KnowledgeBase, Measure, Rendering, SearchConfig, StateType,
};
use rayon::prelude::*;
use serde_json::json;

use args::{
    ActionsCommand, Cli, Command, DatasetCommand, EvaluateArgs, GenerateArgs, MeasureName,
    MetricsArgs, ReconstructArgs, RenderingName, Report, SearchArgs,
};

enum Failure {
    Usage(String),
    Data(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn data_at(path: &Path) -> impl Fn(&dyn Display) -> Failure + '_ {
    move |e| Failure::Data(format!("{}: {e}", path.display()))
}

fn internal(e: impl Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_str()?;
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn parse(argv: Vec<OsString>) -> std::result::Result<Cli, ExitCode> {
    let argv = match config_path(&argv) {
        None => argv,
        Some(path) => {
            let merged = std::fs::read_to_string(&path)
                .map_err(|e| format!("{}: {e}", path.display()))
                .and_then(|text| args::merge_config(argv, &text, &path.display().to_string()));
            match merged {
                Ok(argv) => argv,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Err(ExitCode::from(1));
                }
            }
        }
    };
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        ExitCode::from(if e.use_stderr() { 1 } else { 0 })
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    let outcome = std::panic::catch_unwind(|| run(cli.command))
        .unwrap_or_else(|_| Err(internal("internal error")));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Result<()> {
    let mut out = std::io::stdout().lock();
    let text = match command {
        Command::Dataset { command: DatasetCommand::Stats { path, report } } => stats(&path, report)?,
        Command::Dataset { command: DatasetCommand::Validate { path, replay } } => {
            validate(&path, replay)?
        }
        Command::Metrics(a) => metrics(&a)?,
        Command::Reconstruct(a) => reconstruct(&a)?,
        Command::Evaluate(a) => evaluate_cmd(&a)?,
        Command::Generate(a) => generate_cmd(&a)?,
        Command::Actions { command: ActionsCommand::List { report } } => actions(report),
    };
    out.write_all(text.as_bytes()).map_err(internal)?;
    out.flush().map_err(internal)
}

fn measure(name: MeasureName, jw_p: f64) -> Result<Measure> {
    Ok(match name {
        MeasureName::Levenshtein => Measure::Levenshtein,
        MeasureName::Damerau => Measure::DamerauLevenshtein,
        MeasureName::Osa => Measure::Osa,
        MeasureName::Hamming => Measure::Hamming,
        MeasureName::Jaro => Measure::Jaro,
        MeasureName::JaroWinkler => Measure::jaro_winkler(jw_p).map_err(usage)?,
    })
}

fn search_config(a: &SearchArgs) -> Result<SearchConfig> {
    Ok(SearchConfig {
        measure: measure(a.measure.measure, a.measure.jw_p)?,
        params: HeuristicParams { n1: a.n1, n2: a.n2, n3: a.n3, threshold: a.threshold },
        rendering: match a.rendering {
            RenderingName::Text => Rendering::Text,
            RenderingName::Latex => Rendering::Latex,
        },
    })
}

fn requisite(a: &SearchArgs) -> Result<Vec<EquationState>> {
    match &a.kb {
        None => Ok(Vec::new()),
        Some(path) => load_kb(path).map_err(|e| Failure::Data(e.to_string())),
    }
}

fn load(path: &Path) -> Result<DerivationSequence> {
    log::info!("loading {}", path.display());
    DerivationSequence::load(path).map_err(|e| data_at(path)(&e))
}

fn json_line(v: serde_json::Result<String>) -> Result<String> {
    v.map(|s| s + "\n").map_err(internal)
}

fn stats(path: &Path, report: Report) -> Result<String> {
    let census = load(path)?.census();
    match report {
        Report::Json => json_line(serde_json::to_string(&census)),
        Report::Table => Ok(census_table(&census)),
    }
}

fn census_table(c: &Census) -> String {
    let mut s = format!("records {}\npadded states {}\n", c.records, c.padded_states);
    for (role, n) in &c.state_types {
        s += &format!("{role:<12} {n:>6}\n");
    }
    for (role, row) in &c.cells {
        for (category, n) in row {
            s += &format!("{role:<12} {category:<16} {n:>6}\n");
        }
    }
    for (name, stats) in [("text", &c.text_len), ("latex", &c.latex_len), ("tree", &c.tree_len)] {
        if let Some(l) = stats {
            s += &format!("{name:<6} length min {} max {} mean {:.1}\n", l.min, l.max, l.mean);
        }
    }
    s
}

fn validate(path: &Path, replay: bool) -> Result<String> {
    let seq = load(path)?;
    let roles = seq.categorize();
    let actions = builtin_action_set();
    let mut issues: Vec<(usize, String)> = Vec::new();
    for (i, r) in seq.records.iter().enumerate() {
        match r.state_type() {
            None => issues.push((i + 1, format!("unknown state type {:?}", r.state_type))),
            Some(t) if t != roles[i] => {
                issues.push((i + 1, format!("state type {} but the actions imply {}", t, roles[i])))
            }
            Some(_) => {}
        }
        if r.action_type().is_none() {
            issues.push((i + 1, format!("unknown action type {:?}", r.action_type)));
        }
    }
    if replay {
        issues.extend(audit(&seq, &actions).into_iter().map(|x| (x.record, x.message)));
        issues.sort();
        issues.dedup();
    }
    let report = json!({
        "path": path.display().to_string(),
        "records": seq.len(),
        "valid": issues.is_empty(),
        "issues": issues.iter().map(|(r, m)| json!({"record": r, "message": m})).collect::<Vec<_>>(),
    });
    let line = json_line(serde_json::to_string(&report))?;
    if issues.is_empty() {
        Ok(line)
    } else {
        print!("{line}");
        Err(Failure::Data(format!("{}: {} issue(s)", path.display(), issues.len())))
    }
}

fn metrics(a: &MetricsArgs) -> Result<String> {
    let one = |m: Measure| format!("{}", m.between::<f64>(&a.a, &a.b));
    match a.measure {
        Some(name) => Ok(one(measure(name, a.jw_p)?) + "\n"),
        None => {
            let mut all: Vec<Measure> = Measure::ALL_DEFAULT.to_vec();
            all[4] = Measure::jaro_winkler(a.jw_p).map_err(usage)?;
            all.insert(2, Measure::Osa);
            Ok(all.into_iter().map(|m| format!("{}\t{}\n", m.name(), one(m))).collect())
        }
    }
}

fn reconstruct(a: &ReconstructArgs) -> Result<String> {
    let cfg = search_config(&a.search)?;
    let seeds = requisite(&a.search)?;
    let seq = load(&a.dataset)?;
    let states = seq.states().map_err(|e| data_at(&a.dataset)(&e))?;
    let n = seq.len();
    let units: Vec<usize> = match a.unit {
        Some(i) if (1..=n).contains(&i) => vec![i],
        Some(i) => return Err(usage(format!("--unit {i} outside 1..={n}"))),
        None => (1..=n).collect(),
    };
    if a.hops == 0 {
        return Err(usage("--hops must be at least 1"));
    }
    let actions = builtin_action_set();
    let lines: Result<Vec<String>> = units
        .par_iter()
        .map(|&i| {
            let (s_prev, truth, s_next) = (&states[i - 1], &states[i], &states[i + 1]);
            let kb = KnowledgeBase::build(&seeds, &states[1..i], s_prev, s_next);
            let unit = derivekit::DerivationUnit {
                s_prev: s_prev.clone(),
                s_next: s_next.clone(),
                hidden_truth: Some(truth.clone()),
            };
            let r: Reconstruction<f64> =
                reconstruct_hops(&unit, &actions, &kb, &cfg, a.hops).map_err(internal)?;
            let to_truth = cfg.measure.distance::<f64>(&r.s_hat, truth, cfg.rendering);
            json_line(serde_json::to_string(&json!({
                "unit": i,
                "s_prev": s_prev,
                "s_next": s_next,
                "truth": truth,
                "distance_to_truth": to_truth,
                "reconstruction": r,
            })))
        })
        .collect();
    Ok(lines?.concat())
}

fn evaluate_cmd(a: &EvaluateArgs) -> Result<String> {
    let cfg = search_config(&a.search)?;
    let seeds = requisite(&a.search)?;
    let eta = a.eta_real.unwrap_or(f64::from(a.eta));
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(usage(format!("eta must be finite and non-negative, got {eta}")));
    }
    let seq = load(&a.dataset)?;
    let actions = builtin_action_set();
    let replayable = audit(&seq, &actions).is_empty();
    let note = "steps do not replay with the built-in actions; \
                only string-level results (eps_low, census) are comparable";
    if !replayable {
        log::warn!("{}: {note}", a.dataset.display());
    }
    let ev = evaluate::<f64>(&seq, &actions, &seeds, &cfg).map_err(|e| data_at(&a.dataset)(&e))?;
    let report = ev.report(eta).map_err(usage)?;
    Ok(match a.report {
        Report::Json => report.render(ReportFormat::Json) + "\n",
        Report::Table if replayable => report.render(ReportFormat::Table),
        Report::Table => format!("# note: {note}\n{}", report.render(ReportFormat::Table)),
    })
}

fn generate_cmd(a: &GenerateArgs) -> Result<String> {
    let seeds = load_kb(&a.seed_eqs).map_err(|e| Failure::Data(e.to_string()))?;
    let mut cfg = GenConfig::new(seeds, a.length, a.branch_p, a.rng);
    cfg.max_state_chars = a.max_state_chars;
    let seq = generate(&cfg, &builtin_action_set()).map_err(|e| match e {
        GenError::TooShort(_) | GenError::BranchP(_) => usage(e),
        e => data_at(&a.seed_eqs)(&e),
    })?;
    seq.save(&a.out).map_err(|e| data_at(&a.out)(&e))?;
    let roles = seq.categorize();
    let count = |t: StateType| roles.iter().filter(|r| **r == t).count();
    json_line(serde_json::to_string(&json!({
        "out": a.out.display().to_string(),
        "records": seq.len(),
        "integrative": count(StateType::Integrative),
        "consequent": count(StateType::Consequent),
        "terminal": count(StateType::Terminal),
    })))
}

fn actions(report: Report) -> String {
    let actions = builtin_action_set();
    match report {
        Report::Json => actions
            .iter()
            .map(|a| {
                json!({"name": a.name(), "category": a.category(), "summary": a.summary()})
                    .to_string()
                    + "\n"
            })
            .collect(),
        Report::Table => actions
            .iter()
            .map(|a| format!("{:<28} {:<16} {}\n", a.name(), a.category().as_str(), a.summary()))
            .collect(),
    }
}
