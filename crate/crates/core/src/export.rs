//! CSV output for curves, fields, trajectories and population series.
//!
//! Every table starts with a header row and uses `.` as decimal separator.

use std::io::Write;

use crate::abm::PopulationRun;
use crate::analytics::ThresholdCurve;
use crate::dynamics::{FieldSample, Trajectory};
use crate::error::Result;

fn axis_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Columns `f_c,r_prime`.
pub fn write_threshold_curve<W: Write>(curve: &ThresholdCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["f_c", "r_prime"])?;
    for (f, r) in &curve.points {
        w.write_record([f.to_string(), r.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `f1,f2,df1,df2` (or `f1,df1` for one locus).
pub fn write_vector_field<const N: usize, W: Write>(field: &[FieldSample<N>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = axis_names("f", N);
    header.extend(axis_names("df", N));
    w.write_record(&header)?;
    for sample in field {
        let row: Vec<String> =
            sample.state.iter().chain(sample.velocity.iter()).map(f64::to_string).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t,f1,f2` (or `t,f1`).
pub fn write_trajectory<const N: usize, W: Write>(traj: &Trajectory<N>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_owned()];
    header.extend(axis_names("f", N));
    w.write_record(&header)?;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let row: Vec<String> = std::iter::once(t).chain(state.iter()).map(f64::to_string).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `generation,f1[,f2],seed`, one block per run.
pub fn write_population<W: Write>(runs: &[PopulationRun], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let two_loci = runs.iter().any(|run| run.series.iter().any(|g| g.f2.is_some()));
    let header: &[&str] =
        if two_loci { &["generation", "f1", "f2", "seed"] } else { &["generation", "f1", "seed"] };
    w.write_record(header)?;
    for run in runs {
        for g in &run.series {
            let mut row = vec![g.generation.to_string(), g.f1.to_string()];
            if two_loci {
                row.push(g.f2.map(|f| f.to_string()).unwrap_or_default());
            }
            row.push(run.seed.to_string());
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}
