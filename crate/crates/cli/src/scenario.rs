use std::collections::BTreeSet;
use std::path::Path;

use coopgame::{Mode, PayoffMatrix};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::GlobalOpts;
use crate::Failure;

/// Every parameter a command may read. Reports embed the resolved scenario,
/// so a report can be fed back through `--scenario`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub payoffs: PayoffMatrix,
    pub relatedness: f64,
    pub fc: f64,
    pub mode: Mode,
    /// Initial cooperation frequencies: one value for a single locus, two
    /// for the coupled loci.
    pub start: Option<Vec<f64>>,
    pub curve_samples: usize,
    pub dynamics: DynamicsParams,
    pub abm: AbmParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsParams {
    pub dt: f64,
    pub t_end: f64,
    pub grid_n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbmParams {
    pub n: u64,
    pub size: usize,
    pub generations: usize,
    pub seed: u64,
    pub replicates: usize,
    pub fitness_shift: Option<f64>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            payoffs: PayoffMatrix::canonical(),
            relatedness: 5.0 / 12.0,
            fc: 0.5,
            mode: Mode::Single,
            start: None,
            curve_samples: 101,
            dynamics: DynamicsParams::default(),
            abm: AbmParams::default(),
        }
    }
}

impl Default for DynamicsParams {
    fn default() -> Self {
        DynamicsParams {
            dt: coopgame::dynamics::DEFAULT_DT,
            t_end: coopgame::dynamics::DEFAULT_T_END,
            grid_n: coopgame::dynamics::DEFAULT_GRID_N,
        }
    }
}

impl Default for AbmParams {
    fn default() -> Self {
        AbmParams { n: 100_000, size: 1000, generations: 500, seed: 1, replicates: 1, fitness_shift: None }
    }
}

/// A resolved scenario and the names of the fields the user set, through
/// either the scenario file or a flag.
pub struct Resolved {
    pub scenario: Scenario,
    pub user_set: BTreeSet<String>,
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn read_document(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read scenario {}: {e}", path.display())))?;
    let is_toml = path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("toml"));
    let doc: Value = if is_toml {
        toml::from_str(&text).map_err(|e| invalid(format!("invalid scenario {}: {e}", path.display())))?
    } else {
        serde_json::from_str(&text).map_err(|e| invalid(format!("invalid scenario {}: {e}", path.display())))?
    };
    // Reports carry their scenario under this key.
    match doc {
        Value::Object(mut map) if map.contains_key("scenario") => Ok(map.remove("scenario").unwrap_or_default()),
        other => Ok(other),
    }
}

fn merge(base: &mut Value, overlay: Value, prefix: &str, touched: &mut BTreeSet<String>) {
    match (base, overlay) {
        (Value::Object(base), Value::Object(overlay)) => {
            for (key, value) in overlay {
                let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                // Payoffs are one parameter even when nested.
                if path == "payoffs" || !value.is_object() {
                    touched.insert(path.clone());
                }
                match base.get_mut(&key) {
                    Some(slot) if slot.is_object() && value.is_object() => merge(slot, value, &path, touched),
                    _ => {
                        base.insert(key, value);
                    }
                }
            }
        }
        (slot, value) => *slot = value,
    }
}

fn parse_start(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("--start expects comma-separated frequencies, got `{text}`")))
        })
        .collect()
}

impl Scenario {
    /// Layers `base`, then the scenario file, then explicit flags.
    pub fn resolve(base: Scenario, opts: &GlobalOpts) -> Result<Resolved, Failure> {
        let mut user_set = BTreeSet::new();
        let mut scenario = match &opts.scenario {
            Some(path) => {
                let mut merged = serde_json::to_value(&base).expect("scenario serializes");
                merge(&mut merged, read_document(path)?, "", &mut user_set);
                serde_json::from_value(merged)
                    .map_err(|e| invalid(format!("invalid scenario {}: {e}", path.display())))?
            }
            None => base,
        };

        let mut set = |name: &str| {
            user_set.insert(name.to_owned());
        };
        if let Some(m) = opts.payoffs {
            scenario.payoffs = m;
            set("payoffs");
        }
        if let Some(r) = opts.r {
            scenario.relatedness = r;
            set("relatedness");
        }
        if let Some(fc) = opts.fc {
            scenario.fc = fc;
            set("fc");
        }
        if let Some(mode) = opts.mode {
            scenario.mode = mode;
            set("mode");
        }
        if let Some(start) = &opts.start {
            scenario.start = Some(parse_start(start)?);
            set("start");
        }
        if let Some(samples) = opts.samples {
            scenario.curve_samples = samples;
            set("curve_samples");
        }
        if let Some(dt) = opts.dt {
            scenario.dynamics.dt = dt;
            set("dynamics.dt");
        }
        if let Some(t_end) = opts.t_end {
            scenario.dynamics.t_end = t_end;
            set("dynamics.t_end");
        }
        if let Some(grid) = opts.grid {
            scenario.dynamics.grid_n = grid;
            set("dynamics.grid_n");
        }
        if let Some(n) = opts.n {
            scenario.abm.n = n;
            set("abm.n");
        }
        if let Some(size) = opts.size {
            scenario.abm.size = size;
            set("abm.size");
        }
        if let Some(generations) = opts.generations {
            scenario.abm.generations = generations;
            set("abm.generations");
        }
        if let Some(seed) = opts.seed {
            scenario.abm.seed = seed;
            set("abm.seed");
        }
        if let Some(replicates) = opts.replicates {
            scenario.abm.replicates = replicates;
            set("abm.replicates");
        }
        if let Some(shift) = opts.fitness_shift {
            scenario.abm.fitness_shift = Some(shift);
            set("abm.fitness_shift");
        }

        scenario.validate()?;
        Ok(Resolved { scenario, user_set })
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let probability = |name: &str, value: f64| {
            if value.is_finite() && (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(invalid(format!("{name} must lie in [0, 1], got {value}")))
            }
        };
        probability("relatedness", self.relatedness)?;
        probability("fc", self.fc)?;
        if let Some(start) = &self.start {
            if start.is_empty() || start.len() > 2 {
                return Err(invalid(format!("start needs one or two frequencies, got {}", start.len())));
            }
            for &f in start {
                probability("start", f)?;
            }
        }
        let DynamicsParams { dt, t_end, grid_n } = self.dynamics;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid(format!("dt must be positive, got {dt}")));
        }
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(invalid(format!("t_end must be non-negative, got {t_end}")));
        }
        if grid_n < 2 {
            return Err(invalid(format!("grid_n must be at least 2, got {grid_n}")));
        }
        if self.curve_samples < 2 {
            return Err(invalid(format!("curve_samples must be at least 2, got {}", self.curve_samples)));
        }
        let abm = &self.abm;
        if abm.n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if abm.size == 0 {
            return Err(invalid("size must be at least 1"));
        }
        if abm.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        if let Some(shift) = abm.fitness_shift {
            if !shift.is_finite() {
                return Err(invalid(format!("fitness_shift must be finite, got {shift}")));
            }
        }
        Ok(())
    }

    /// Starting frequencies for `loci` loci, filling in defaults.
    pub fn start_for(&mut self, loci: usize) -> Result<Vec<f64>, Failure> {
        let start = self.start.get_or_insert_with(|| if loci == 1 { vec![0.2] } else { vec![0.2, 0.7] });
        if start.len() != loci {
            return Err(invalid(format!(
                "start needs {loci} frequenc{} in this mode, got {}",
                if loci == 1 { "y" } else { "ies" },
                start.len()
            )));
        }
        Ok(start.clone())
    }
}
