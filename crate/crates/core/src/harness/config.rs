//! Flat key-value experiment configuration.
//!
//! Format: one `key = value` per line, `#` comments, `[name]` headers
//! opening one experiment cell each. Keys before the first header are
//! batch-global. Unset cell keys fall back to the standard per-problem
//! parameter values.
//!
//! ```text
//! runs = 30
//! root_seed = 42
//!
//! [sga_gc]
//! problem = f9
//! strategy = static
//! coding = gc
//! ```

use std::fs;
use std::path::Path;

use crate::encoding::Coding;
use crate::engine::GaParams;
use crate::error::{Error, Result};
use crate::objectives::{Problem, ProblemId};
use crate::strategies::{StrategyConfig, StrategyVariant};

/// One (problem, strategy) experiment cell.
#[derive(Debug, Clone)]
pub struct CellSpec {
    pub name: String,
    pub problem: Problem,
    pub params: GaParams,
    pub strategy: StrategyConfig,
}

/// A parsed experiment batch.
#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub runs: u32,
    pub root_seed: u64,
    /// Fixed SR2 reference generation; when absent the driver uses the
    /// minimum finite GNTO across cells of the same problem.
    pub reference_gen: Option<u32>,
    pub cells: Vec<CellSpec>,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            runs: 30,
            root_seed: 42,
            reference_gen: None,
            cells: Vec::new(),
        }
    }
}

const GLOBAL_KEYS: &str = "runs, root_seed, reference_gen";
const CELL_KEYS: &str = "problem, strategy, coding, starter, coding1, coding2, period, min_p, \
                         max_p, epsilon, steady_gen, start_gen, pop_size, t_size, p_cross, \
                         one_point_rate, p_mut, p_mut_per_bit, max_gen, elitism";

#[derive(Debug, Default)]
struct RawCell {
    name: String,
    entries: Vec<(String, String, usize)>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| {
        Error::config(format!("line {line}: invalid value `{value}` for key `{key}`"))
    })
}

fn build_cell(raw: &RawCell, default_runs_max_gen: Option<u32>) -> Result<CellSpec> {
    let lookup = |key: &str| {
        raw.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    };

    let (problem_str, _) = lookup("problem").ok_or_else(|| {
        Error::config(format!("cell [{}] is missing required key `problem`", raw.name))
    })?;
    let problem = Problem::standard(ProblemId::parse(problem_str)?);

    let (strategy_str, _) = lookup("strategy").ok_or_else(|| {
        Error::config(format!("cell [{}] is missing required key `strategy`", raw.name))
    })?;
    let variant = StrategyVariant::parse(strategy_str)?;

    let mut params = GaParams::standard(&problem);
    if let Some(g) = default_runs_max_gen {
        params.max_gen = g;
    }
    let mut strategy = StrategyConfig::standard(variant, problem.id);

    for (key, value, line) in &raw.entries {
        let line = *line;
        match key.as_str() {
            "problem" | "strategy" => {}
            "coding" | "starter" => strategy.starter = Coding::parse(value)?,
            "coding1" => strategy.coding1 = Coding::parse(value)?,
            "coding2" => strategy.coding2 = Coding::parse(value)?,
            "period" => strategy.period = parse_num(key, value, line)?,
            "min_p" => strategy.min_p = parse_num(key, value, line)?,
            "max_p" => strategy.max_p = parse_num(key, value, line)?,
            "epsilon" => strategy.epsilon = parse_num(key, value, line)?,
            "steady_gen" => strategy.steady_gen = parse_num(key, value, line)?,
            "start_gen" => strategy.start_gen = parse_num(key, value, line)?,
            "pop_size" => params.pop_size = parse_num(key, value, line)?,
            "t_size" => params.t_size = parse_num(key, value, line)?,
            "p_cross" => params.p_cross = parse_num(key, value, line)?,
            "one_point_rate" => params.one_point_rate = parse_num(key, value, line)?,
            "p_mut" => params.p_mut = parse_num(key, value, line)?,
            "p_mut_per_bit" => params.p_mut_per_bit = parse_num(key, value, line)?,
            "max_gen" => params.max_gen = parse_num(key, value, line)?,
            "elitism" => params.elitism = parse_num(key, value, line)?,
            other => {
                return Err(Error::config(format!(
                    "line {line}: unknown cell key `{other}` (allowed: {CELL_KEYS})"
                )))
            }
        }
    }

    params.validate()?;
    strategy.validate()?;
    Ok(CellSpec {
        name: raw.name.clone(),
        problem,
        params,
        strategy,
    })
}

/// Parse a config from text. `max_gen_override` applies to cells that do
/// not set their own `max_gen`.
pub fn parse_config(text: &str, max_gen_override: Option<u32>) -> Result<BatchConfig> {
    let mut batch = BatchConfig::default();
    let mut raw_cells: Vec<RawCell> = Vec::new();
    let mut in_cell = false;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::config(format!("line {lineno}: unterminated section header")))?
                .trim();
            if name.is_empty() {
                return Err(Error::config(format!("line {lineno}: empty section name")));
            }
            if raw_cells.iter().any(|c| c.name == name) {
                return Err(Error::config(format!(
                    "line {lineno}: duplicate cell name `{name}`"
                )));
            }
            raw_cells.push(RawCell {
                name: name.to_string(),
                entries: Vec::new(),
            });
            in_cell = true;
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("line {lineno}: expected `key = value`, got `{line}`"))
        })?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if in_cell {
            raw_cells
                .last_mut()
                .expect("in_cell implies a cell exists")
                .entries
                .push((key, value, lineno));
        } else {
            match key.as_str() {
                "runs" => batch.runs = parse_num(&key, &value, lineno)?,
                "root_seed" => batch.root_seed = parse_num(&key, &value, lineno)?,
                "reference_gen" => {
                    batch.reference_gen = Some(parse_num(&key, &value, lineno)?)
                }
                other => {
                    return Err(Error::config(format!(
                        "line {lineno}: unknown global key `{other}` (allowed: {GLOBAL_KEYS})"
                    )))
                }
            }
        }
    }

    for raw in &raw_cells {
        batch.cells.push(build_cell(raw, max_gen_override)?);
    }
    if batch.runs == 0 {
        return Err(Error::config("runs must be >= 1"));
    }
    if batch.cells.is_empty() {
        return Err(Error::config("config defines no experiment cells"));
    }
    Ok(batch)
}

pub fn load_config(path: &Path, max_gen_override: Option<u32>) -> Result<BatchConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text, max_gen_override)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# batch
runs = 5
root_seed = 7

[sga_gc]
problem = f9
strategy = static
coding = gc
max_gen = 100

[smga]
problem = f9
strategy = smga
start_gen = 50
max_gen = 100
";

    #[test]
    fn parses_globals_and_cells() {
        let cfg = parse_config(SAMPLE, None).unwrap();
        assert_eq!(cfg.runs, 5);
        assert_eq!(cfg.root_seed, 7);
        assert_eq!(cfg.cells.len(), 2);
        assert_eq!(cfg.cells[0].name, "sga_gc");
        assert_eq!(cfg.cells[0].strategy.starter, Coding::Gray);
        assert_eq!(cfg.cells[0].params.max_gen, 100);
        assert_eq!(cfg.cells[1].strategy.start_gen, 50);
        // standard per-problem defaults fill the rest
        assert_eq!(cfg.cells[0].params.p_mut_per_bit, 0.006);
        assert_eq!(cfg.cells[0].params.vec_size, 150);
    }

    #[test]
    fn unknown_keys_name_the_key_and_alternatives() {
        let err = parse_config("bogus = 1\n[a]\nproblem = f2\nstrategy = static\n", None)
            .unwrap_err()
            .to_string();
        assert!(err.contains("bogus"), "{err}");
        assert!(err.contains("root_seed"), "{err}");

        let err = parse_config("[a]\nproblem = f2\nstrategy = static\nwat = 3\n", None)
            .unwrap_err()
            .to_string();
        assert!(err.contains("wat"), "{err}");
        assert!(err.contains("pop_size"), "{err}");
    }

    #[test]
    fn invalid_values_are_rejected() {
        for bad in [
            "[a]\nproblem = f1\nstrategy = static\n",
            "[a]\nproblem = f2\nstrategy = nope\n",
            "[a]\nproblem = f2\nstrategy = static\ncoding = binary\n",
            "[a]\nproblem = f2\nstrategy = static\npop_size = x\n",
            "[a]\nstrategy = static\n",
            "[a]\nproblem = f2\n",
        ] {
            assert!(parse_config(bad, None).is_err(), "accepted: {bad}");
        }
    }
}
