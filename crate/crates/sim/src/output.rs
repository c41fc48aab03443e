//! CSV writers. Floats use Rust's shortest round-trip formatting, so equal
//! results give byte-identical files.

use std::io::Write;

use poltrack_core::algebra::stokes_from_jones;
use poltrack_core::constellation::Constellation;

use crate::config::ExperimentConfig;
use crate::experiments::{ConvergenceRow, SerPoint, Tolerance};
use crate::opcount::AuditRow;
use crate::trial::TraceRow;
use crate::SimError;

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn f(v: f64) -> String {
    format!("{v}")
}

pub fn write_sweep<W: Write>(w: W, points: &[SerPoint]) -> Result<(), SimError> {
    let mut out = writer(w);
    out.write_record(["axis", "value", "ser", "ci95", "errors", "symbols", "trials"])?;
    for p in points {
        out.write_record([
            p.axis.name().to_string(),
            f(p.value),
            f(p.ser),
            f(p.ci95),
            p.errors.to_string(),
            p.symbols.to_string(),
            p.trials.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_convergence<W: Write>(w: W, rows: &[ConvergenceRow]) -> Result<(), SimError> {
    let mut out = writer(w);
    out.write_record(["k", "ser_mean", "ci95", "realizations"])?;
    for r in rows {
        out.write_record([r.k.to_string(), f(r.ser_mean), f(r.ci95), r.realizations.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_trace<W: Write>(w: W, rows: &[TraceRow]) -> Result<(), SimError> {
    let mut out = writer(w);
    out.write_record([
        "k",
        "theta_cum",
        "alpha1_cum",
        "alpha2_cum",
        "alpha3_cum",
        "est_theta_cum",
        "est_alpha1_cum",
        "est_alpha2_cum",
        "est_alpha3_cum",
    ])?;
    for r in rows {
        let mut rec = vec![r.k.to_string(), f(r.theta_cum)];
        rec.extend(r.alpha_cum.iter().map(|v| f(*v)));
        rec.push(f(r.est_theta_cum));
        rec.extend(r.est_alpha_cum.iter().map(|v| f(*v)));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Tolerance summary followed by every probe in the sweep schema.
pub fn write_tolerance<W: Write>(mut w: W, cfg: &ExperimentConfig, t: &Tolerance) -> Result<(), SimError> {
    let value = match (t.value, t.above_max) {
        (_, true) => format!(">{}", f(t.search_max)),
        (Some(v), false) => f(v),
        (None, false) => "none".to_string(),
    };
    {
        let mut out = writer(&mut w);
        out.write_record(["format", "algorithm", "axis", "snr_db", "tolerance", "reference"])?;
        out.write_record([
            cfg.format.name().to_string(),
            cfg.algorithm.name().to_string(),
            t.axis.name().to_string(),
            f(cfg.snr_db()),
            value,
            t.reference.map(f).unwrap_or_default(),
        ])?;
        out.flush()?;
    }
    writeln!(w)?;
    write_sweep(w, &t.probes)
}

pub fn write_audit<W: Write>(w: W, rows: &[AuditRow]) -> Result<(), SimError> {
    let mut out = writer(w);
    out.write_record(["format", "sop_period", "ops", "comparisons", "memory", "reference"])?;
    for r in rows {
        out.write_record([
            r.format.name().to_string(),
            r.sop_period.to_string(),
            f(r.ops),
            f(r.comparisons),
            r.memory.to_string(),
            f(r.reference),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_constellation<W: Write>(w: W, c: &Constellation) -> Result<(), SimError> {
    let mut out = writer(w);
    out.write_record(["index", "x_re", "x_im", "y_re", "y_im", "s1", "s2", "s3", "stokes_index"])?;
    for (i, p) in c.points().iter().enumerate() {
        let s = stokes_from_jones(p);
        out.write_record([
            i.to_string(),
            f(p.x.re),
            f(p.x.im),
            f(p.y.re),
            f(p.y.im),
            f(s.0[0]),
            f(s.0[1]),
            f(s.0[2]),
            c.stokes_index_of(i).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Axis;

    #[test]
    fn sweep_header_and_row() {
        let p = SerPoint {
            axis: Axis::Pol,
            value: 1e-5,
            ser: 0.00125,
            ci95: 0.0001,
            errors: 125,
            symbols: 100000,
            trials: 1,
            cycle_slips: 0,
        };
        let mut buf = Vec::new();
        write_sweep(&mut buf, &[p]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "axis,value,ser,ci95,errors,symbols,trials\ndp_t,0.00001,0.00125,0.0001,125,100000,1\n"
        );
    }

    #[test]
    fn constellation_dump_has_one_row_per_point() {
        let mut buf = Vec::new();
        write_constellation(&mut buf, &Constellation::new(poltrack_core::constellation::Format::PsQpsk)).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 9);
    }
}
