//! Sweep logs: CSV with `time,input,output` columns preceded by a
//! `# sample_time=<seconds>` comment line.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{fmt17, write_atomic};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepLog {
    pub sample_time: f64,
    pub time: Vec<f64>,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
}

impl SweepLog {
    pub fn new(sample_time: f64, input: Vec<f64>, output: Vec<f64>) -> Result<Self> {
        if input.len() != output.len() {
            return Err(Error::LengthMismatch(input.len(), output.len()));
        }
        let time = (0..input.len()).map(|k| k as f64 * sample_time).collect();
        Ok(Self {
            sample_time,
            time,
            input,
            output,
        })
    }

    pub fn render(&self) -> String {
        let mut s = format!("# sample_time={}\ntime,input,output\n", fmt17(self.sample_time));
        for i in 0..self.time.len() {
            s.push_str(&format!("{},{},{}\n", fmt17(self.time[i]), fmt17(self.input[i]), fmt17(self.output[i])));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }

    pub fn parse(reader: impl Read, origin: &Path) -> Result<Self> {
        let mut buf = BufReader::new(reader);
        let mut first = String::new();
        buf.read_line(&mut first)?;
        let sample_time = first
            .trim()
            .strip_prefix('#')
            .and_then(|r| r.trim().strip_prefix("sample_time="))
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| *v > 0.0)
            .ok_or_else(|| Error::config(origin, "line 1: expected '# sample_time=<seconds>'"))?;
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(buf);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::config(origin, format!("line 2: missing column '{name}'")))
        };
        let (ti, ui, yi) = (col("time")?, col("input")?, col("output")?);
        let (mut time, mut input, mut output) = (Vec::new(), Vec::new(), Vec::new());
        for (n, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let get = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::config(origin, format!("line {}: bad number in column {}", n + 3, i + 1)))
            };
            time.push(get(ti)?);
            input.push(get(ui)?);
            output.push(get(yi)?);
        }
        Ok(Self {
            sample_time,
            time,
            input,
            output,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(std::fs::File::open(path)?, path)
    }
}
