//! On-disk formats: instances and binary programs as JSON, benchmark tables
//! as CSV.
//!
//! Floats in JSON are written with 17 significant digits so that a written
//! instance reads back bit-for-bit. CSV uses the shortest round-trip `f64`
//! representation, `.` decimals and LF line endings.

use crate::CliError;
use rootsqp::linalg::CMatrix;
use rootsqp::reformulate::{BinaryQuadraticProgram, Constraint, DecoderTag, VarDomain};
use rootsqp::{Complex64, ProblemInstance};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub m: usize,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Row-major real part of `Q`, as decimal strings.
    pub q_re: Vec<Vec<String>>,
    pub q_im: Vec<Vec<String>>,
}

fn float_text(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_float(s: &str) -> Result<f64, CliError> {
    s.trim().parse().map_err(|_| CliError::Argument(format!("not a number: {s:?}")))
}

impl InstanceFile {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let q = inst.q();
        let grid = |f: &dyn Fn(Complex64) -> f64| {
            (0..inst.n()).map(|i| (0..inst.n()).map(|j| float_text(f(q[(i, j)]))).collect()).collect()
        };
        InstanceFile {
            n: inst.n(),
            m: inst.m(),
            label: inst.label.clone(),
            seed: inst.seed,
            q_re: grid(&|c| c.re),
            q_im: grid(&|c| c.im),
        }
    }

    /// Rebuilds the instance, rejecting shape errors and non-Hermitian data.
    pub fn to_instance(&self) -> Result<ProblemInstance, CliError> {
        let n = self.n;
        let shape_ok = |g: &Vec<Vec<String>>| g.len() == n && g.iter().all(|r| r.len() == n);
        if !shape_ok(&self.q_re) || !shape_ok(&self.q_im) {
            return Err(CliError::Argument(format!("q_re and q_im must both be {n}x{n}")));
        }
        let mut q = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] = Complex64::new(parse_float(&self.q_re[i][j])?, parse_float(&self.q_im[i][j])?);
            }
        }
        let inst = ProblemInstance::new(q, self.m, self.label.clone())?;
        Ok(match self.seed {
            Some(s) => inst.with_seed(s),
            None => inst,
        })
    }
}

pub fn write_instance<W: Write>(inst: &ProblemInstance, out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(out, &InstanceFile::from_instance(inst)).map_err(io_json)
}

pub fn read_instance<R: Read>(input: R) -> Result<ProblemInstance, CliError> {
    let file: InstanceFile =
        serde_json::from_reader(input).map_err(|e| CliError::Argument(format!("bad instance file: {e}")))?;
    file.to_instance()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainFile {
    ZeroOne,
    PlusMinusOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintFile {
    None,
    OneHot { block: usize },
    BlockPatterns { block: usize, allowed: Vec<Vec<i8>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramFile {
    pub dim: usize,
    pub domain: DomainFile,
    pub constraint: ConstraintFile,
    pub m_matrix: Vec<Vec<String>>,
    pub offset: String,
    /// `basic:<m>`, `zonotope:<m>`, `quarter` or `raw`.
    pub decoder_tag: String,
}

impl ProgramFile {
    pub fn from_program(p: &BinaryQuadraticProgram) -> Self {
        ProgramFile {
            dim: p.dim,
            domain: match p.domain {
                VarDomain::ZeroOne => DomainFile::ZeroOne,
                VarDomain::PlusMinusOne => DomainFile::PlusMinusOne,
            },
            constraint: match &p.constraint {
                Constraint::None => ConstraintFile::None,
                Constraint::OneHot { block } => ConstraintFile::OneHot { block: *block },
                Constraint::BlockPatterns { block, allowed } => {
                    ConstraintFile::BlockPatterns { block: *block, allowed: allowed.clone() }
                }
            },
            m_matrix: (0..p.dim).map(|i| (0..p.dim).map(|j| float_text(p.matrix[(i, j)])).collect()).collect(),
            offset: float_text(p.offset),
            decoder_tag: match p.decoder {
                DecoderTag::Basic { m } => format!("basic:{m}"),
                DecoderTag::Zonotope { m } => format!("zonotope:{m}"),
                DecoderTag::Quarter => "quarter".into(),
                DecoderTag::Raw => "raw".into(),
            },
        }
    }

    pub fn to_program(&self) -> Result<BinaryQuadraticProgram, CliError> {
        let dim = self.dim;
        if self.m_matrix.len() != dim || self.m_matrix.iter().any(|r| r.len() != dim) {
            return Err(CliError::Argument(format!("m_matrix must be {dim}x{dim}")));
        }
        let mut cells = Vec::with_capacity(dim * dim);
        for row in &self.m_matrix {
            for c in row {
                cells.push(parse_float(c)?);
            }
        }
        let matrix = nalgebra::DMatrix::from_row_slice(dim, dim, &cells);
        let decoder = match self.decoder_tag.split_once(':') {
            Some(("basic", m)) => DecoderTag::Basic { m: parse_order(m)? },
            Some(("zonotope", m)) => DecoderTag::Zonotope { m: parse_order(m)? },
            None if self.decoder_tag == "quarter" => DecoderTag::Quarter,
            None if self.decoder_tag == "raw" => DecoderTag::Raw,
            _ => return Err(CliError::Argument(format!("unknown decoder tag {:?}", self.decoder_tag))),
        };
        let domain = match self.domain {
            DomainFile::ZeroOne => VarDomain::ZeroOne,
            DomainFile::PlusMinusOne => VarDomain::PlusMinusOne,
        };
        let constraint = match &self.constraint {
            ConstraintFile::None => Constraint::None,
            ConstraintFile::OneHot { block } => Constraint::OneHot { block: *block },
            ConstraintFile::BlockPatterns { block, allowed } => {
                Constraint::BlockPatterns { block: *block, allowed: allowed.clone() }
            }
        };
        Ok(BinaryQuadraticProgram::new(matrix, domain, constraint, parse_float(&self.offset)?, decoder)?)
    }
}

fn parse_order(s: &str) -> Result<usize, CliError> {
    s.parse().map_err(|_| CliError::Argument(format!("bad root order {s:?}")))
}

pub fn write_program<W: Write>(p: &BinaryQuadraticProgram, out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(out, &ProgramFile::from_program(p)).map_err(io_json)
}

pub fn read_program<R: Read>(input: R) -> Result<BinaryQuadraticProgram, CliError> {
    let file: ProgramFile =
        serde_json::from_reader(input).map_err(|e| CliError::Argument(format!("bad program file: {e}")))?;
    file.to_program()
}

fn io_json(e: serde_json::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// A table with a fixed header and numeric cells; an empty cell is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header).map_err(io_csv)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.map(|v| v.to_string()).unwrap_or_default()))
                .map_err(io_csv)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn read<R: Read>(input: R) -> Result<Self, CliError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers().map_err(io_csv)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(io_csv)?;
            let row = rec
                .iter()
                .map(|c| if c.is_empty() { Ok(None) } else { parse_float(c).map(Some) })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn to_string_lossless(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

fn io_csv(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rootsqp::instances::{gen_mimo_instance, gen_potts_instance};
    use rootsqp::reformulate::{basic_reformulation, quarter_reformulation, zonotope_reformulation};

    #[test]
    fn instance_round_trip_is_exact() {
        let (inst, _) = gen_mimo_instance(3, 2, 4, 7.0, 9).unwrap();
        let mut buf = Vec::new();
        write_instance(&inst, &mut buf).unwrap();
        let back = read_instance(buf.as_slice()).unwrap();
        assert_eq!(back.q(), inst.q());
        assert_eq!((back.m(), back.seed, &back.label), (4, Some(9), &inst.label));
    }

    #[test]
    fn non_hermitian_file_rejected() {
        let inst = gen_potts_instance(2, 3, -1.0, 1.0, 0).unwrap();
        let mut f = InstanceFile::from_instance(&inst);
        f.q_im[0][1] = "0.5".into();
        assert!(matches!(f.to_instance(), Err(CliError::Argument(_))));
        f.q_im[1][0] = "-0.5".into();
        assert!(f.to_instance().is_ok());
    }

    #[test]
    fn program_round_trip() {
        let inst = gen_potts_instance(3, 4, -10.0, 10.0, 2).unwrap();
        for p in [
            basic_reformulation(&inst),
            zonotope_reformulation(&inst).unwrap(),
            quarter_reformulation(&inst).unwrap(),
        ] {
            let mut buf = Vec::new();
            write_program(&p, &mut buf).unwrap();
            assert_eq!(read_program(buf.as_slice()).unwrap(), p);
        }
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["snr", "bravg", "zravg"]);
        t.push(vec![Some(0.1), Some(1.5e-3), None]);
        assert_eq!(t.to_string_lossless(), "snr,bravg,zravg\n0.1,0.0015,\n");
        assert_eq!(Table::read(t.to_string_lossless().as_bytes()).unwrap(), t);
    }
}
