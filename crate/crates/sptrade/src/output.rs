//! CSV output of sweep rows.
//!
//! Columns: the sweep value (named by the experiment, e.g. `p_max_dbm`),
//! `scheme`, `ee_bits_per_joule`, `rate_bps`, `selected_mu_count`,
//! `feasible_fraction`, `mc_power_saved_w`. Reals use 10 significant digits
//! in exponent form; means over zero feasible drops and the saved power
//! outside the distance experiment are left empty.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::config::Experiment;
use crate::experiment::SweepRow;

pub const VALUE_COLUMNS: [&str; 6] = [
    "scheme",
    "ee_bits_per_joule",
    "rate_bps",
    "selected_mu_count",
    "feasible_fraction",
    "mc_power_saved_w",
];

fn real(x: f64) -> String {
    format!("{x:.9e}")
}

fn maybe(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// Streams rows to a CSV writer, flushing after every batch.
pub struct CsvSink<W: Write> {
    out: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(inner: W, experiment: Experiment) -> io::Result<Self> {
        let mut out = csv::Writer::from_writer(inner);
        let mut header = vec![experiment.sweep_column()];
        header.extend(VALUE_COLUMNS);
        out.write_record(&header)?;
        out.flush()?;
        Ok(Self { out })
    }

    pub fn write_rows(&mut self, rows: &[SweepRow]) -> io::Result<()> {
        for r in rows {
            self.out.write_record([
                real(r.value),
                r.scheme.name().to_string(),
                maybe(r.ee),
                maybe(r.rate),
                maybe(r.selected),
                real(r.feasible_fraction),
                maybe(r.mc_power_saved),
            ])?;
        }
        self.out.flush()
    }
}

pub fn write_csv(rows: &[SweepRow], experiment: Experiment, path: impl AsRef<Path>) -> io::Result<()> {
    let mut sink = CsvSink::new(File::create(path)?, experiment)?;
    sink.write_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sptrade_core::selection::Scheme;

    fn render(rows: &[SweepRow]) -> String {
        let mut buf = Vec::new();
        CsvSink::new(&mut buf, Experiment::EeVsPc).unwrap().write_rows(rows).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(
            render(&[]),
            "p_c_w,scheme,ee_bits_per_joule,rate_bps,selected_mu_count,feasible_fraction,mc_power_saved_w\n"
        );
    }

    #[test]
    fn one_row_gives_two_lines() {
        let row = SweepRow {
            value: 0.2,
            scheme: Scheme::NonSpt,
            ee: Some(1234567.891234),
            rate: None,
            selected: Some(0.0),
            feasible_fraction: 1.0,
            mc_power_saved: None,
        };
        let text = render(&[row]);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "2.000000000e-1,non-spt,1.234567891e6,,0.000000000e0,1.000000000e0,"
        );
    }
}
