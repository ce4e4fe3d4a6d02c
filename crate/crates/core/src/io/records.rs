//! CSV tables for study records and sweeps.

use std::io::Write;
use std::path::Path;

use crate::study::{Record, SweepCell};
use crate::Result;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<&f64>) -> String {
    x.map_or_else(String::new, |&v| num(v))
}

fn numbered(prefix: &str, m: usize) -> impl Iterator<Item = String> + '_ {
    (1..=m).map(move |i| format!("{prefix}_{i}"))
}

pub fn record_header(m: usize) -> Vec<String> {
    ["iter", "dof", "h_max"]
        .map(String::from)
        .into_iter()
        .chain(numbered("kappa_hat", m))
        .chain(numbered("freq", m))
        .chain(numbered("err", m))
        .chain(["eta", "eta_sq", "theta_osc", "eff_1", "seconds"].map(String::from))
        .collect()
}

/// Writes `records` with `m` eigenvalue columns each; missing values are empty fields.
pub fn write_records<W: Write>(out: W, records: &[Record], m: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(record_header(m))?;
    for r in records {
        let mut row = vec![r.iter.to_string(), r.dof.to_string(), num(r.h_max)];
        for list in [&r.kappa_hat, &r.freq, &r.err] {
            row.extend((0..m).map(|i| opt(list.get(i))));
        }
        row.extend([
            num(r.eta),
            num(r.eta_sq),
            num(r.theta_osc),
            opt(r.eff.as_ref()),
            num(r.seconds),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_records(path: &Path, records: &[Record], m: usize) -> Result<()> {
    write_records(std::fs::File::create(path)?, records, m)
}

/// One row per `(k, a)` cell: frequencies, spurious flags (0/1) and any error.
pub fn write_sweep<W: Write>(out: W, cells: &[SweepCell], m: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = ["k", "a"]
        .map(String::from)
        .into_iter()
        .chain(numbered("freq", m))
        .chain(numbered("spurious", m))
        .chain(std::iter::once("error".to_string()))
        .collect();
    w.write_record(&header)?;
    for c in cells {
        let mut row = vec![c.k.to_string(), num(c.a)];
        row.extend((0..m).map(|i| opt(c.frequencies.get(i))));
        row.extend((0..m).map(|i| c.spurious.get(i).map_or_else(String::new, |&s| u8::from(s).to_string())));
        row.push(c.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_sweep(path: &Path, cells: &[SweepCell], m: usize) -> Result<()> {
    write_sweep(std::fs::File::create(path)?, cells, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(iter: usize) -> Record {
        Record {
            iter,
            dof: 126,
            h_max: 0.5,
            n_elements: 18,
            min_angle: std::f64::consts::FRAC_PI_4,
            kappa_hat: vec![4.6, 10.0],
            freq: vec![4.6f64.sqrt(), 10f64.sqrt()],
            err: vec![0.1],
            eta: 2.0,
            eta_sq: 4.0,
            theta_osc: 0.0,
            eff: Some(0.025),
            seconds: 0.01,
        }
    }

    fn text(records: &[Record], m: usize) -> String {
        let mut buf = Vec::new();
        write_records(&mut buf, records, m).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_run_has_only_the_header() {
        assert_eq!(
            text(&[], 2),
            "iter,dof,h_max,kappa_hat_1,kappa_hat_2,freq_1,freq_2,err_1,err_2,eta,eta_sq,theta_osc,eff_1,seconds\n"
        );
    }

    #[test]
    fn one_row_per_record_with_round_trippable_numbers() {
        let out = text(&[record(0), record(1), record(2)], 2);
        let mut rd = csv::Reader::from_reader(out.as_bytes());
        let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(&rows[2][0], "2");
        assert_eq!(rows[0][5].parse::<f64>().unwrap(), 4.6f64.sqrt());
        // err_2 missing
        assert_eq!(&rows[0][8], "");
        assert_eq!(rows[0][12].parse::<f64>().unwrap(), 0.025);
    }

    #[test]
    fn sweep_rows_carry_flags_and_errors() {
        let cells = [
            SweepCell {
                k: 1,
                a: 0.25,
                frequencies: vec![0.5, 1.0],
                spurious: vec![false, true],
                error: None,
            },
            SweepCell {
                k: 2,
                a: 1.0,
                frequencies: vec![],
                spurious: vec![],
                error: Some("factorization failed".into()),
            },
        ];
        let mut buf = Vec::new();
        write_sweep(&mut buf, &cells, 2).unwrap();
        let out = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "k,a,freq_1,freq_2,spurious_1,spurious_2,error");
        assert!(lines[1].ends_with(",0,1,"));
        assert!(lines[2].starts_with("2,") && lines[2].ends_with("factorization failed"));
    }
}
