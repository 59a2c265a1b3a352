use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use steiner_core::analysis::{
    are_isomorphic, automorphism_report, format_cycles, invariant_vector, AnalysisError,
    AnalysisOptions, CensusMode,
};
use steiner_core::design::{
    develop as develop_family, left_translation_perms, parse_design_file, parse_family_file,
    write_design_file, write_family_file, DesignError,
};
use steiner_core::group::{build_group, parse_group_spec, validate_spec, GroupError};
use steiner_core::search::{parse_search_config, search as run_search, SearchError};

pub struct Context {
    pub threads: usize,
    pub budget_nodes: u64,
    pub seed: u64,
    pub sampled: Option<u64>,
    pub porcelain: bool,
}

impl Context {
    fn analysis_options(&self) -> AnalysisOptions {
        AnalysisOptions {
            threads: self.threads,
            ir_node_budget: self.budget_nodes,
            ..Default::default()
        }
    }
}

/// Failures mapped onto the exit-code contract.
#[derive(Debug)]
pub enum CommandError {
    /// Exit 2: unreadable/ill-formed input or config.
    Input(String),
    /// Exit 3: a budget stopped the computation before a verdict.
    Inconclusive(String),
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandError::Input(m) | CommandError::Inconclusive(m) => write!(f, "{m}"),
        }
    }
}

impl CommandError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CommandError::Input(_) => ExitCode::from(2),
            CommandError::Inconclusive(_) => ExitCode::from(3),
        }
    }
}

impl From<DesignError> for CommandError {
    fn from(e: DesignError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<GroupError> for CommandError {
    fn from(e: GroupError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<AnalysisError> for CommandError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::TooLarge { .. } | AnalysisError::BudgetExceeded { .. } => {
                CommandError::Inconclusive(e.to_string())
            }
            other => CommandError::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CommandError> {
    std::fs::read_to_string(path)
        .map_err(|e| CommandError::Input(format!("{}: {e}", path.display())))
}

fn load_design(path: &Path) -> Result<steiner_core::design::Design, CommandError> {
    let text = read(path)?;
    // Family files are accepted anywhere a design is: they are developed on
    // the fly.
    if path.extension().is_some_and(|e| e == "fam") {
        let family = parse_family_file(&text)?;
        Ok(develop_family(&family)?.design)
    } else {
        Ok(parse_design_file(&text)?)
    }
}

pub fn develop(
    ctx: &Context,
    family_path: &Path,
    output: Option<&Path>,
) -> Result<ExitCode, CommandError> {
    let family = parse_family_file(&read(family_path)?)?;
    let dev = develop_family(&family)?;
    let design = dev.design;
    let mut orbit_hist: std::collections::BTreeMap<usize, usize> = Default::default();
    for &len in &dev.orbit_lengths {
        *orbit_hist.entry(len).or_insert(0) += 1;
    }
    let orbits: Vec<String> = orbit_hist
        .iter()
        .map(|(len, count)| format!("{len}x{count}"))
        .collect();
    if ctx.porcelain {
        println!("v {}", design.v());
        println!("k {}", design.k());
        println!("blocks {}", design.block_count());
        for (len, count) in &orbit_hist {
            println!("orbit {len} {count}");
        }
    } else {
        println!("v = {}", design.v());
        println!("k = {}", design.k());
        println!("blocks = {}", design.block_count());
        println!("orbits = {}", orbits.join(" "));
    }
    if let Some(out) = output {
        std::fs::write(out, write_design_file(&design))?;
        if !ctx.porcelain {
            println!("wrote {}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn verify(ctx: &Context, design_path: &Path) -> Result<ExitCode, CommandError> {
    let design = load_design(design_path)?;
    let report = steiner_core::design::verify_steiner(&design, ctx.threads)?;
    if report.is_steiner {
        println!(
            "STEINER OK v={} k={} b={}",
            report.v, report.k, report.block_count
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "STEINER FAIL v={} k={} b={} uncovered={} multiple={}",
            report.v,
            report.k,
            report.block_count,
            report.uncovered_pairs,
            report.multiply_covered_pairs
        );
        for (i, j) in &report.uncovered_witnesses {
            println!("uncovered {i} {j}");
        }
        for (i, j, c) in &report.multiple_witnesses {
            println!("multiple {i} {j} {c}");
        }
        Ok(ExitCode::from(1))
    }
}

pub fn invariants(ctx: &Context, design_path: &Path) -> Result<ExitCode, CommandError> {
    let design = load_design(design_path)?;
    let mode = match ctx.sampled {
        Some(sample_size) => CensusMode::Sampled {
            sample_size,
            seed: ctx.seed,
        },
        None => CensusMode::Exact,
    };
    let vector = invariant_vector(&design, mode, &ctx.analysis_options())?;
    match vector.mode {
        CensusMode::Exact => println!("mode exact"),
        CensusMode::Sampled { sample_size, seed } => {
            println!("mode sampled {sample_size} {seed} # non-conclusive")
        }
    }
    for (degree, count) in &vector.replication {
        println!("replication {degree} {count}");
    }
    for (t, count) in vector.diagonal.iter().enumerate() {
        println!("diag {t} {count}");
    }
    Ok(ExitCode::SUCCESS)
}

pub fn iso(ctx: &Context, left: &Path, right: &Path) -> Result<ExitCode, CommandError> {
    let a = load_design(left)?;
    let b = load_design(right)?;
    let isomorphic = are_isomorphic(&a, &b, &ctx.analysis_options())?;
    if ctx.porcelain {
        println!("iso {}", u8::from(isomorphic));
    } else {
        println!("isomorphic = {isomorphic}");
    }
    Ok(if isomorphic {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn aut(ctx: &Context, input: &Path, hint: Option<&str>) -> Result<ExitCode, CommandError> {
    let text = read(input)?;
    let is_family = input.extension().is_some_and(|e| e == "fam");
    let (design, hints) = if is_family {
        let family = parse_family_file(&text)?;
        let design = develop_family(&family)?.design;
        let hints = match hint {
            Some("translations") => {
                let table = build_group(&family.group)?;
                left_translation_perms(&table, family.rotational)
            }
            Some(other) => return Err(CommandError::Input(format!("unknown hint kind `{other}`"))),
            None => Vec::new(),
        };
        (design, hints)
    } else {
        if hint.is_some() {
            return Err(CommandError::Input(
                "--hint translations needs a family file input".into(),
            ));
        }
        (parse_design_file(&text)?, Vec::new())
    };
    let report = automorphism_report(&design, &hints, &ctx.analysis_options())?;
    println!("order = {}", report.order);
    if !ctx.porcelain {
        println!("generators = {}", report.generators.len());
    }
    for g in &report.generators {
        println!("gen {}", format_cycles(g));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn search(
    ctx: &Context,
    config_path: &Path,
    output: Option<&Path>,
) -> Result<ExitCode, CommandError> {
    let mut config = parse_search_config(&read(config_path)?)?;
    if config.seed == 0 {
        config.seed = ctx.seed;
    }
    let outcome = run_search(&config).map_err(|e| match e {
        SearchError::Inadmissible { v, k } => {
            CommandError::Input(format!("inadmissible parameters ({v},{k})"))
        }
        other => CommandError::Input(other.to_string()),
    })?;
    let prefix = output
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| config_path.with_extension(""));
    for (i, family) in outcome.families.iter().enumerate() {
        let path = prefix.with_file_name(format!(
            "{}_{:03}.fam",
            prefix
                .file_name()
                .and_then(|s| s.to_str())
                .unwrap_or("family"),
            i + 1
        ));
        std::fs::write(&path, write_family_file(family)?)?;
        println!("family {} -> {}", i + 1, path.display());
    }
    println!(
        "found {} complete {} nodes {}",
        outcome.families.len(),
        outcome.complete,
        outcome.nodes
    );
    if !outcome.families.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else if outcome.complete {
        // Exhausted the space without a hit: a definite negative.
        Ok(ExitCode::from(1))
    } else {
        Err(CommandError::Inconclusive(
            "budget exhausted with no family found".into(),
        ))
    }
}

pub fn group_check(ctx: &Context, spec_text: &str) -> Result<ExitCode, CommandError> {
    let spec = parse_group_spec(spec_text)?;
    let report = validate_spec(&spec);
    match report.order {
        Some(order) => println!("order = {order}"),
        None => println!("order = overflow"),
    }
    for check in &report.checks {
        let path = if check.path.is_empty() {
            "<root>"
        } else {
            &check.path
        };
        println!(
            "semidirect {} acting_order {} automorphism {} action_order {} power_identity {}",
            path,
            check.acting_order,
            check.action_is_automorphism,
            check
                .action_order
                .map_or("-".to_string(), |o| o.to_string()),
            check.power_is_identity
        );
    }
    for problem in &report.problems {
        println!("problem {problem}");
    }
    if report.is_valid() {
        if !ctx.porcelain {
            println!("valid = true");
        }
        Ok(ExitCode::SUCCESS)
    } else {
        if !ctx.porcelain {
            println!("valid = false");
        }
        Ok(ExitCode::from(1))
    }
}
