use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use ptolemaic::metric::{parse_generator_spec, read_csv, read_json, validate, Generator, Seed};
use ptolemaic::ExtendedMetricSpace;

use crate::args::SpaceSource;
use crate::report::InputInfo;
use crate::CliError;

/// Parse a generator spec, applying `seed` unless the spec sets its own.
pub fn generator(spec: &str, seed: Option<u64>) -> Result<Generator, CliError> {
    let mut g = parse_generator_spec(spec)?;
    let has_seed = spec.split_once(':').is_some_and(|(_, rest)| rest.split(',').any(|kv| kv.trim().starts_with("seed=")));
    if let (Some(s), false) = (seed, has_seed) {
        g.seed = Seed(s);
    }
    Ok(g)
}

fn read_file(path: &Path) -> Result<ExtendedMetricSpace, CliError> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut text)?;
    } else {
        File::open(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
            .read_to_string(&mut text)?;
    }
    let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    let space = if json { read_json(text.as_bytes())? } else { read_csv(text.as_bytes())? };
    Ok(space)
}

/// Load a space without checking the metric axioms.
pub fn load_raw(
    input: Option<&Path>,
    gen: Option<&str>,
    seed: Option<u64>,
) -> Result<(ExtendedMetricSpace, InputInfo), CliError> {
    let (space, source) = match (input, gen) {
        (Some(p), _) => (read_file(p)?, format!("file:{}", p.display())),
        (None, Some(spec)) => (generator(spec, seed)?.build()?, format!("gen:{spec}")),
        (None, None) => return Err(CliError::Usage("no input given".into())),
    };
    let info = InputInfo::new(source, &space);
    Ok((space, info))
}

/// Load a space and reject it unless it is an extended metric.
pub fn load(src: &SpaceSource, seed: Option<u64>) -> Result<(ExtendedMetricSpace, InputInfo), CliError> {
    let (space, info) = load_raw(src.input.as_deref(), src.gen.as_deref(), seed)?;
    let report = validate(&space);
    if !report.ok {
        let listed: Vec<String> = report
            .violations
            .iter()
            .take(10)
            .map(|v| format!("{:?} at {:?} by {:.3e}", v.kind, v.witness, v.magnitude))
            .collect();
        return Err(CliError::Invalid(format!(
            "{} violation(s): {}{}",
            report.violations.len(),
            listed.join("; "),
            if report.violations.len() > 10 { "; ..." } else { "" }
        )));
    }
    Ok((space, info))
}
