//! On-disk formats. Every float is written with 17 significant digits, so
//! the exact double round-trips through the file.
//!
//! CSV layouts:
//! - `datum.csv` — `x,u,v,w`; each row is the value on the cell whose left
//!   edge is `x`, first row `x = -inf`.
//! - `fronts.csv` — `id,family,birth_t,death_t,strength,lineage`; family is
//!   `1|2|3|np`, `death_t` empty for fronts alive at the end, lineage is
//!   the reflection generation.
//! - `events.csv` — `t,x,in_ids,out_ids,V,Q,F`; id lists joined with `;`.
//! - `diagram.csv` — one spacetime segment per front for plotting.
//! - scalar samples — `t,x,u,y_min`; shock censuses — `position,jump`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

use fronttrack_core::scalar::{ScalarSolutionSample, ShockDetection};
use fronttrack_core::{Family, FtSolution, StepFunction};

/// 17 significant digits: 1 before the point, 16 after.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn family_code(f: Family) -> &'static str {
    match f {
        Family::One => "1",
        Family::Two => "2",
        Family::Three => "3",
        Family::NonPhysical => "np",
    }
}

fn writer(path: &Path) -> Result<BufWriter<File>> {
    let file =
        File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

pub fn write_datum_csv(path: &Path, datum: &StepFunction) -> Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "x,u,v,w")?;
    for (j, s) in datum.values().iter().enumerate() {
        let x = if j == 0 {
            fmt(f64::NEG_INFINITY)
        } else {
            fmt(datum.breakpoints()[j - 1])
        };
        writeln!(w, "{x},{},{},{}", fmt(s.u), fmt(s.v), fmt(s.w))?;
    }
    Ok(w.flush()?)
}

pub fn write_fronts_csv(path: &Path, sol: &FtSolution) -> Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "id,family,birth_t,death_t,strength,lineage")?;
    for f in &sol.fronts {
        let death = f.death_t.map(fmt).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{death},{},{}",
            f.id,
            family_code(f.family),
            fmt(f.birth_t),
            fmt(f.strength),
            f.generation
        )?;
    }
    Ok(w.flush()?)
}

pub fn write_events_csv(path: &Path, sol: &FtSolution) -> Result<()> {
    let join = |ids: &[u32]| {
        ids.iter()
            .map(|id| id.to_string())
            .collect::<Vec<_>>()
            .join(";")
    };
    let mut w = writer(path)?;
    writeln!(w, "t,x,in_ids,out_ids,V,Q,F")?;
    for e in &sol.events {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt(e.t),
            fmt(e.x),
            join(&e.incoming),
            join(&e.outgoing),
            fmt(e.v_total),
            fmt(e.q_total),
            fmt(e.f_total)
        )?;
    }
    Ok(w.flush()?)
}

/// One straight spacetime segment per front; fronts alive at the end are
/// drawn through to the final time.
pub fn write_diagram_csv(path: &Path, sol: &FtSolution) -> Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "id,family,generation,strength,t0,x0,t1,x1")?;
    for f in &sol.fronts {
        let t1 = f.death_t.unwrap_or(sol.t_end);
        let x1 = f.death_x.unwrap_or_else(|| f.position_at(sol.t_end));
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            f.id,
            family_code(f.family),
            f.generation,
            fmt(f.strength),
            fmt(f.birth_t),
            fmt(f.birth_x),
            fmt(t1),
            fmt(x1)
        )?;
    }
    Ok(w.flush()?)
}

pub fn write_scalar_csv(path: &Path, sample: &ScalarSolutionSample) -> Result<()> {
    let mut w = writer(path)?;
    write_scalar_rows(&mut w, sample)?;
    Ok(w.flush()?)
}

pub fn write_scalar_rows(w: &mut impl Write, sample: &ScalarSolutionSample) -> Result<()> {
    writeln!(w, "t,x,u,y_min")?;
    for i in 0..sample.xs.len() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt(sample.t),
            fmt(sample.xs[i]),
            fmt(sample.us[i]),
            fmt(sample.ys[i])
        )?;
    }
    Ok(())
}

pub fn write_census_rows(w: &mut impl Write, census: &[ShockDetection]) -> Result<()> {
    writeln!(w, "position,jump")?;
    for d in census {
        writeln!(w, "{},{}", fmt(d.position), fmt(d.jump))?;
    }
    Ok(())
}

/// Pretty JSON for small human-facing records (reports, parameter packs).
pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = writer(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .with_context(|| format!("writing {}", path.display()))?;
    writeln!(w)?;
    Ok(w.flush()?)
}

/// Compact JSON for bulk records (full run solutions).
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = writer(path)?;
    serde_json::to_writer(&mut w, value)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(w.flush()?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fronttrack_core::State;

    #[test]
    fn floats_round_trip_through_the_serialized_form() {
        for x in [
            0.3,
            1.0 / 3.0,
            -2.0e-13,
            6.02e23,
            f64::MIN_POSITIVE,
            -0.027,
        ] {
            let s = fmt(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn datum_rows_carry_left_edges() {
        let f = StepFunction::new(
            vec![-1.0, 2.0],
            vec![
                State::new(0.0, 0.0, 0.0),
                State::new(1.0, 0.0, 0.0),
                State::new(0.0, 0.5, 0.0),
            ],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("datum.csv");
        write_datum_csv(&path, &f).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0], "x,u,v,w");
        assert!(rows[1].starts_with("-inf,"));
        assert!(rows[2].starts_with(&fmt(-1.0)));
    }
}
