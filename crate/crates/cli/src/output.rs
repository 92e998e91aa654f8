use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use nevanlinna::{Error, Result};
use num_complex::Complex64;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rows are flushed every this many records during sweeps.
const FLUSH_EVERY: usize = 1024;

enum Sink {
    Raw(Box<dyn Write>),
    Csv(csv::Writer<Box<dyn Write>>),
    Taken,
}

pub struct Output {
    sink: Sink,
    pub format: Format,
    header: String,
    rows: usize,
}

fn io_err(e: io::Error) -> Error {
    Error::BadParameters(format!("output: {e}"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::BadParameters(format!("output: {e}"))
}

fn misuse() -> Error {
    Error::BadParameters("output: CSV and JSON writes mixed".into())
}

impl Output {
    pub fn open(path: Option<&Path>, format: Format, header: String) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_err)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Output { sink: Sink::Raw(sink), format, header, rows: 0 })
    }

    pub fn json(&mut self, v: &Value) -> Result<()> {
        let Sink::Raw(w) = &mut self.sink else { return Err(misuse()) };
        writeln!(w, "{}", serde_json::to_string_pretty(v)?).map_err(io_err)?;
        w.flush().map_err(io_err)
    }

    /// Starts a CSV table; the reproducibility header goes first as a
    /// comment line.
    pub fn csv_header(&mut self, columns: &[&str]) -> Result<()> {
        let Sink::Raw(mut w) = std::mem::replace(&mut self.sink, Sink::Taken) else { return Err(misuse()) };
        writeln!(w, "# {}", self.header).map_err(io_err)?;
        let mut csv = csv::WriterBuilder::new().from_writer(w);
        csv.write_record(columns).map_err(csv_err)?;
        self.sink = Sink::Csv(csv);
        Ok(())
    }

    pub fn csv_row(&mut self, fields: &[String]) -> Result<()> {
        let Sink::Csv(w) = &mut self.sink else { return Err(misuse()) };
        w.write_record(fields).map_err(csv_err)?;
        self.rows += 1;
        if self.rows % FLUSH_EVERY == 0 {
            w.flush().map_err(io_err)?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        match &mut self.sink {
            Sink::Raw(w) => w.flush().map_err(io_err),
            Sink::Csv(w) => w.flush().map_err(io_err),
            Sink::Taken => Ok(()),
        }
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn pair(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}
