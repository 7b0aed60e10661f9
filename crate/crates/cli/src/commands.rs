use coopgame::abm::{self, PopulationConfig};
use coopgame::analytics::{self, Outcome, ThresholdBounds};
use coopgame::dynamics::{self, FixedPointReport, SingleLocus, TwoLocus};
use coopgame::export;
use coopgame::game::{self, DEFAULT_ADDITIVITY_TOLERANCE};
use coopgame::strategy::{parse_strategy, play_match};
use coopgame::{Error, KinContext, Mode, PairingModel, PayoffMatrix};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{AbmAction, Format};
use crate::output::{rows, table, to_value, Output, Report};
use crate::scenario::{Resolved, Scenario};
use crate::Failure;

fn output(command: &str, scenario: Scenario, result: Value, tables: Vec<crate::output::Table>) -> Output {
    Output {
        report: Report { command: command.to_owned(), scenario, metadata: None, result },
        tables,
        default_format: Format::Json,
    }
}

pub fn classify(s: Scenario) -> Result<Output, Failure> {
    let m = s.payoffs;
    let class = game::classify_ordinal(&m);
    let synergy = game::synergy_class(&m, DEFAULT_ADDITIVITY_TOLERANCE)?;
    let dec = game::decompose(&m);
    let pd = game::check_pd(&m);
    let altruism = game::strong_altruism_map(&m);
    let result = json!({
        "class": class,
        "synergy": synergy,
        "d": dec.d,
        "decomposition": dec,
        "pd_check": pd,
        "strong_altruism": altruism,
    });
    let altruist = altruism.map(|a| a.altruist_action.to_string()).unwrap_or_default();
    let t = rows(
        "classify",
        &["class", "synergy", "d", "b", "c", "is_pd", "altruist_action"],
        vec![vec![
            class.to_string(),
            synergy.to_string(),
            dec.d.to_string(),
            dec.b.to_string(),
            dec.c.to_string(),
            pd.is_pd.to_string(),
            altruist,
        ]],
    )?;
    Ok(output("classify", s, result, vec![t]))
}

pub fn decompose(s: Scenario) -> Result<Output, Failure> {
    let dec = game::decompose(&s.payoffs);
    let t = rows("decompose", &["b", "c", "d"], vec![vec![dec.b.to_string(), dec.c.to_string(), dec.d.to_string()]])?;
    Ok(output("decompose", s, to_value(dec), vec![t]))
}

fn bounds(m: &PayoffMatrix, mode: Mode) -> Result<ThresholdBounds, Error> {
    match mode {
        Mode::Single => analytics::threshold_bounds_single(m),
        Mode::Roles => analytics::threshold_bounds_roles(m),
    }
}

fn fitness_gap(m: &PayoffMatrix, mode: Mode, r: f64, f: f64) -> Result<(f64, f64), Error> {
    Ok(match mode {
        Mode::Single => analytics::fitness_single(m, &KinContext::new(r, f)?),
        Mode::Roles => analytics::inclusive_fitness_roles(m, r, f),
    })
}

pub fn threshold(s: Scenario, curve: bool) -> Result<Output, Failure> {
    let m = s.payoffs;
    if curve {
        let c = match s.mode {
            Mode::Single => analytics::threshold_curve_single(&m, s.curve_samples)?,
            Mode::Roles => analytics::threshold_curve_roles(&m, s.curve_samples)?,
        };
        let t = table("threshold_curve", |w| export::write_threshold_curve(&c, w))?;
        return Ok(output("threshold --curve", s, to_value(&c), vec![t]));
    }
    let threshold = match s.mode {
        Mode::Single => analytics::threshold_single(&m, s.fc)?,
        Mode::Roles => analytics::threshold_roles(&m, s.fc)?,
    };
    let b = bounds(&m, s.mode)?;
    let (w_c, w_d) = fitness_gap(&m, s.mode, s.relatedness, s.fc)?;
    let result = json!({
        "mode": s.mode,
        "f_c": s.fc,
        "r_prime": threshold.value,
        "in_unit_interval": threshold.in_unit_interval,
        "bounds": b,
        "r": s.relatedness,
        "fitness": [w_c, w_d],
        "cooperation_favoured": w_c > w_d,
    });
    let t = rows(
        "threshold",
        &["f_c", "r_prime", "lo", "hi"],
        vec![vec![s.fc.to_string(), threshold.value.to_string(), b.lo.to_string(), b.hi.to_string()]],
    )?;
    Ok(output("threshold", s, result, vec![t]))
}

#[derive(Serialize)]
struct EquilibriumOut {
    mode: Mode,
    r: f64,
    f_star: Option<f64>,
    stable: bool,
    interval: Option<[f64; 2]>,
    outcome: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    fixed_points: Vec<FixedPointReport>,
}

fn fixed_point_rows(points: &[FixedPointReport]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| {
            let at = |i: usize| p.location.get(i).map(f64::to_string).unwrap_or_default();
            let eig = |i: usize| p.eigenvalues.get(i).map(|e| e.re.to_string()).unwrap_or_default();
            vec![at(0), at(1), to_value(p.kind).as_str().unwrap_or("").to_owned(),
                to_value(p.classification).as_str().unwrap_or("").to_owned(), eig(0), eig(1)]
        })
        .collect()
}

const FIXED_POINT_HEADER: [&str; 6] = ["f1", "f2", "kind", "class", "eig1_re", "eig2_re"];

fn two_locus_fixed_points(m: &PayoffMatrix, r: f64) -> Result<Vec<FixedPointReport>, Failure> {
    Ok(dynamics::fixed_points(m, r)?)
}

pub fn equilibrium(s: Scenario) -> Result<Output, Failure> {
    let (m, r) = (s.payoffs, s.relatedness);
    let report = match s.mode {
        Mode::Single => analytics::equilibrium_single(&m, r),
        Mode::Roles => analytics::equilibrium_roles(&m, r),
    };
    let fixed_points = match s.mode {
        Mode::Single => dynamics::fixed_points_single(&m, r)?,
        Mode::Roles => two_locus_fixed_points(&m, r)?,
    };
    let out = match report {
        Ok(eq) => EquilibriumOut {
            mode: s.mode,
            r,
            f_star: eq.f_star,
            stable: eq.stable,
            interval: Some([eq.interval_lo, eq.interval_hi]),
            outcome: Some(eq.outcome),
            note: None,
            fixed_points,
        },
        Err(e @ Error::AdditiveMatrix) => EquilibriumOut {
            mode: s.mode,
            r,
            f_star: None,
            stable: false,
            interval: None,
            outcome: None,
            note: Some(e.to_string()),
            fixed_points,
        },
        Err(e) => return Err(e.into()),
    };
    let t = rows("fixed_points", &FIXED_POINT_HEADER, fixed_point_rows(&out.fixed_points))?;
    Ok(output("equilibrium", s, to_value(&out), vec![t]))
}

pub fn phase(s: Scenario) -> Result<Output, Failure> {
    let grid = s.dynamics.grid_n;
    let (result, t) = match s.mode {
        Mode::Single => {
            let field = dynamics::vector_field(&SingleLocus::new(s.payoffs, s.relatedness)?, grid)?;
            let t = table("vector_field", |w| export::write_vector_field(&field, w))?;
            (to_value(&field), t)
        }
        Mode::Roles => {
            let field = dynamics::vector_field(&TwoLocus::new(s.payoffs, s.relatedness)?, grid)?;
            let t = table("vector_field", |w| export::write_vector_field(&field, w))?;
            (to_value(&field), t)
        }
    };
    let mut out = output("phase", s, json!({ "samples": result }), vec![t]);
    out.default_format = Format::Csv;
    Ok(out)
}

fn trajectory_result<const N: usize>(traj: &dynamics::Trajectory<N>) -> Value {
    json!({
        "converged_at": traj.converged_at,
        "final_state": traj.last().to_vec(),
        "times": traj.times,
        "states": traj.states.iter().map(|x| x.to_vec()).collect::<Vec<_>>(),
    })
}

pub fn simulate(mut s: Scenario) -> Result<Output, Failure> {
    let (dt, t_end) = (s.dynamics.dt, s.dynamics.t_end);
    let (result, t) = match s.mode {
        Mode::Single => {
            let start = s.start_for(1)?;
            let traj = dynamics::integrate(&SingleLocus::new(s.payoffs, s.relatedness)?, [start[0]], dt, t_end)?;
            (trajectory_result(&traj), table("trajectory", |w| export::write_trajectory(&traj, w))?)
        }
        Mode::Roles => {
            let start = s.start_for(2)?;
            let system = TwoLocus::new(s.payoffs, s.relatedness)?;
            let traj = dynamics::integrate(&system, [start[0], start[1]], dt, t_end)?;
            (trajectory_result(&traj), table("trajectory", |w| export::write_trajectory(&traj, w))?)
        }
    };
    let mut out = output("simulate", s, result, vec![t]);
    out.default_format = Format::Csv;
    Ok(out)
}

pub fn abm(mut s: Scenario, action: AbmAction) -> Result<Output, Failure> {
    let m = s.payoffs;
    let (r, f, n, seed) = (s.relatedness, s.fc, s.abm.n, s.abm.seed);
    match action {
        AbmAction::Estimate => {
            let (names, reports, closed) = match s.mode {
                Mode::Single => {
                    let est = abm::estimate_single_locus(&m, &PairingModel::new(r, f)?, n, seed)?;
                    let (w_c, w_d) = analytics::fitness_single(&m, &KinContext::new(r, f)?);
                    (["w_c", "w_d"], [est.w_c, est.w_d], [w_c, w_d])
                }
                Mode::Roles => {
                    let est = abm::estimate_roles(&m, r, f, n, seed)?;
                    let (i_c, i_d) = analytics::inclusive_fitness_roles(&m, r, f);
                    (["i_c", "i_d"], [est.i_c, est.i_d], [i_c, i_d])
                }
            };
            let records: Vec<_> = reports.iter().zip(closed).map(|(e, c)| e.record(c)).collect();
            let difference_z = abm::joint_z_score(&reports[0], &reports[1], closed[0] - closed[1]);
            let result = json!({
                "mode": s.mode,
                names[0]: records[0],
                names[1]: records[1],
                "difference_z_score": difference_z,
            });
            let t = rows(
                "estimates",
                &["quantity", "mean", "std_error", "n", "seed", "closed_form", "z_score"],
                names
                    .iter()
                    .zip(&records)
                    .map(|(name, rec)| {
                        vec![
                            name.to_string(),
                            rec.mean.to_string(),
                            rec.std_error.to_string(),
                            rec.n.to_string(),
                            rec.seed.to_string(),
                            rec.closed_form.to_string(),
                            rec.z_score.to_string(),
                        ]
                    })
                    .collect(),
            )?;
            Ok(output("abm estimate", s, result, vec![t]))
        }
        AbmAction::Evolve => {
            let loci = match s.mode {
                Mode::Single => 1,
                Mode::Roles => 2,
            };
            let initial = s.start_for(loci)?;
            let cfg = PopulationConfig {
                size: s.abm.size,
                initial,
                r,
                generations: s.abm.generations,
                seed,
                fitness_shift: s.abm.fitness_shift,
            };
            let seeds: Vec<u64> = (0..s.abm.replicates as u64).map(|i| seed.wrapping_add(i)).collect();
            let runs = abm::evolve_replicates(&cfg, &m, s.mode, &seeds)?;
            let t = table("population", |w| export::write_population(&runs, w))?;
            let result = json!({
                "mode": s.mode,
                "relatedness_held_fixed": runs.iter().all(|run| run.relatedness_held_fixed),
                "fitness_shift": runs.first().map(|run| run.fitness_shift),
                "terminal": runs.iter().map(|run| json!({"seed": run.seed, "state": run.terminal()})).collect::<Vec<_>>(),
                "runs": runs,
            });
            let mut out = output("abm evolve", s, result, vec![t]);
            out.default_format = Format::Csv;
            Ok(out)
        }
    }
}

pub fn play(s: Scenario, player1: &str, player2: &str) -> Result<Output, Failure> {
    let g1 = parse_strategy(player1)?;
    let g2 = parse_strategy(player2)?;
    let out = play_match(&g1, &g2, &s.payoffs);
    let m = s.payoffs;
    let transcript: Vec<String> = out.transcript.iter().map(|j| j.to_string()).collect();
    let result = json!({
        "player1": g1.to_string(),
        "player2": g2.to_string(),
        "transcript": transcript,
        "cycle_start": out.cycle_start,
        "cycle_length": out.cycle_length,
        "cycle": out.cycle().iter().map(|j| j.to_string()).collect::<Vec<_>>(),
        "mean_payoffs": [out.mean_payoffs.0, out.mean_payoffs.1],
    });
    let t = rows(
        "match",
        &["round", "player1", "player2", "payoff1", "payoff2", "in_cycle"],
        out.transcript
            .iter()
            .enumerate()
            .map(|(i, j)| {
                vec![
                    i.to_string(),
                    j.0.to_string(),
                    j.1.to_string(),
                    m.payoff(j.0, j.1).to_string(),
                    m.payoff(j.1, j.0).to_string(),
                    (i >= out.cycle_start).to_string(),
                ]
            })
            .collect(),
    )?;
    Ok(output("match", s, result, vec![t]))
}

#[derive(Serialize)]
struct Parameter {
    name: &'static str,
    value: Value,
    source: &'static str,
}

fn source(res: &Resolved, name: &str, from_reference: bool) -> &'static str {
    if res.user_set.contains(name) {
        "user"
    } else if from_reference {
        "reference"
    } else {
        "default"
    }
}

/// Scenario defaults for each figure, and whether the original figure
/// states its payoffs and relatedness.
pub fn figure_base(which: &str) -> (Scenario, bool, bool) {
    let base = Scenario::default();
    match which {
        "1" => (Scenario { mode: Mode::Single, relatedness: 5.0 / 12.0, ..base }, true, true),
        "3" => (Scenario { mode: Mode::Roles, ..base }, true, false),
        "4" => (Scenario { mode: Mode::Roles, relatedness: 5.0 / 12.0, ..base }, true, false),
        _ => (
            Scenario {
                mode: Mode::Roles,
                payoffs: PayoffMatrix::new(6.0, 5.0, 2.0, 0.0).expect("finite payoffs"),
                relatedness: 0.3,
                ..base
            },
            true,
            false,
        ),
    }
}

pub fn figure(res: Resolved, which: &str) -> Result<Output, Failure> {
    let (_, stated_payoffs, stated_r) = figure_base(which);
    let s = res.scenario.clone();
    let m = s.payoffs;
    let mut params = vec![Parameter {
        name: "payoffs",
        value: to_value(m),
        source: source(&res, "payoffs", stated_payoffs),
    }];
    let uses_r = which != "3";
    if uses_r {
        params.push(Parameter {
            name: "relatedness",
            value: json!(s.relatedness),
            source: source(&res, "relatedness", stated_r),
        });
    }

    let mut summary = Value::Null;
    let (result, tables, description) = match which {
        "1" | "3" => {
            params.push(Parameter {
                name: "curve_samples",
                value: json!(s.curve_samples),
                source: source(&res, "curve_samples", false),
            });
            let (curve, eq, title) = if which == "1" {
                let eq = analytics::equilibrium_single(&m, s.relatedness);
                (analytics::threshold_curve_single(&m, s.curve_samples)?, Some(eq), "single-locus relatedness threshold r'(f_c)")
            } else {
                (analytics::threshold_curve_roles(&m, s.curve_samples)?, None, "two-locus relatedness threshold r'(f_c)")
            };
            let equilibrium = match eq {
                Some(Ok(eq)) => to_value(eq),
                Some(Err(Error::AdditiveMatrix)) | None => Value::Null,
                Some(Err(e)) => return Err(e.into()),
            };
            let t = table("threshold_curve", |w| export::write_threshold_curve(&curve, w))?;
            (json!({ "curve": curve, "equilibrium": equilibrium }), vec![t], title)
        }
        _ => {
            params.push(Parameter {
                name: "grid_n",
                value: json!(s.dynamics.grid_n),
                source: source(&res, "dynamics.grid_n", false),
            });
            let system = TwoLocus::new(m, s.relatedness)?;
            let field = dynamics::vector_field(&system, s.dynamics.grid_n)?;
            let points = two_locus_fixed_points(&m, s.relatedness)?;
            let field_table = table("vector_field", |w| export::write_vector_field(&field, w))?;
            summary = points
                .iter()
                .map(|p| json!({ "location": p.location, "class": p.classification }))
                .collect();
            let points_table = rows("fixed_points", &FIXED_POINT_HEADER, fixed_point_rows(&points))?;
            (
                json!({ "vector_field": field, "fixed_points": points }),
                vec![field_table, points_table],
                "two-locus replicator vector field and fixed points",
            )
        }
    };

    let synergy = game::synergy_class(&m, DEFAULT_ADDITIVITY_TOLERANCE)?;
    let metadata = json!({
        "figure": which.parse::<u8>().unwrap_or_default(),
        "description": description,
        "synergy": synergy,
        "parameters": params,
    });
    let mut metadata = metadata;
    if !summary.is_null() {
        metadata["fixed_points"] = summary;
    }
    let mut out = output(&format!("figure {which}"), s, result, tables);
    out.report.metadata = Some(metadata);
    out.default_format = Format::Csv;
    Ok(out)
}
