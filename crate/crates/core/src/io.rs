//! JSON file formats and CSV traces.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::inverse::{InverseDiagnostics, RecoveredInput};
use crate::linalg::{self, CMat};
use crate::types::{
    validate_boundary, validate_potential, validate_scattering_data, BoundState, BoundaryCondition, Potential,
    PotentialShape, ScatteringData, StepPotentialSpec,
};

/// Complex matrix as separate real and imaginary row lists; `im` may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDto {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

impl MatrixDto {
    pub fn from_mat(m: &CMat) -> Self {
        let (re, im) = linalg::to_parts(m);
        let im = if im.iter().flatten().all(|v| *v == 0.0) { Vec::new() } else { im };
        Self { re, im }
    }

    pub fn to_mat(&self) -> Result<CMat> {
        parts_to_mat(&self.re, &self.im)
    }
}

fn parts_to_mat(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<CMat> {
    let im = if im.is_empty() { None } else { Some(im) };
    linalg::from_parts(re, im).ok_or_else(|| ScatterError::InvalidInput("ragged or mismatched matrix rows".into()))
}

fn im_or_empty(m: &CMat) -> Vec<Vec<f64>> {
    MatrixDto::from_mat(m).im
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDto {
    pub x: f64,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "lowercase")]
pub enum ClosedForm {
    Zero,
    Step { boundaries: Vec<f64>, layers: Vec<MatrixDto> },
    Exponential { amplitude: MatrixDto, rate: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    pub n: usize,
    pub x_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<SampleDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedForm>,
}

impl PotentialFile {
    pub fn from_potential(p: &Potential) -> Self {
        let (samples, closed_form) = match p.shape() {
            PotentialShape::Zero => (None, Some(ClosedForm::Zero)),
            PotentialShape::Step(s) => (
                None,
                Some(ClosedForm::Step {
                    boundaries: s.boundaries.clone(),
                    layers: s.layers.iter().map(MatrixDto::from_mat).collect(),
                }),
            ),
            PotentialShape::Exponential { amplitude, rate } => {
                (None, Some(ClosedForm::Exponential { amplitude: MatrixDto::from_mat(amplitude), rate: *rate }))
            }
            PotentialShape::Sampled { x, values } => (
                Some(
                    x.iter()
                        .zip(values)
                        .map(|(x, v)| {
                            let m = MatrixDto::from_mat(v);
                            SampleDto { x: *x, re: m.re, im: m.im }
                        })
                        .collect(),
                ),
                None,
            ),
        };
        Self { n: p.n(), x_max: p.x_max(), samples, closed_form }
    }

    pub fn to_potential(&self) -> Result<Potential> {
        let p = match (&self.samples, &self.closed_form) {
            (Some(samples), None) => {
                let x = samples.iter().map(|s| s.x).collect();
                let values = samples.iter().map(|s| parts_to_mat(&s.re, &s.im)).collect::<Result<Vec<_>>>()?;
                validate_potential(x, values, self.x_max)?
            }
            (None, Some(ClosedForm::Zero)) => {
                if !(self.x_max > 0.0) || !self.x_max.is_finite() {
                    return Err(ScatterError::InvalidConfig(format!("x_max must be positive, got {}", self.x_max)));
                }
                Potential::zero(self.n, self.x_max)
            }
            (None, Some(ClosedForm::Step { boundaries, layers })) => {
                let layers = layers.iter().map(MatrixDto::to_mat).collect::<Result<Vec<_>>>()?;
                Potential::step(StepPotentialSpec::new(boundaries.clone(), layers)?, self.x_max)?
            }
            (None, Some(ClosedForm::Exponential { amplitude, rate })) => {
                Potential::exponential(amplitude.to_mat()?, *rate, self.x_max)?
            }
            _ => {
                return Err(ScatterError::InvalidInput(
                    "potential needs exactly one of `samples` or `closed_form`".into(),
                ))
            }
        };
        if p.n() != self.n {
            return Err(ScatterError::DimensionMismatch { expected: self.n, found: p.n() });
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct BoundaryFile {
    pub A_re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub A_im: Vec<Vec<f64>>,
    pub B_re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub B_im: Vec<Vec<f64>>,
}

impl BoundaryFile {
    pub fn from_boundary(bc: &BoundaryCondition) -> Self {
        Self {
            A_re: linalg::to_parts(bc.a()).0,
            A_im: im_or_empty(bc.a()),
            B_re: linalg::to_parts(bc.b()).0,
            B_im: im_or_empty(bc.b()),
        }
    }

    pub fn to_boundary(&self) -> Result<BoundaryCondition> {
        validate_boundary(parts_to_mat(&self.A_re, &self.A_im)?, parts_to_mat(&self.B_re, &self.B_im)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct BoundStateDto {
    pub kappa: f64,
    pub M_re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub M_im: Vec<Vec<f64>>,
    /// Informational; recomputed from `M` on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringFile {
    pub k_grid: Vec<f64>,
    #[serde(rename = "S")]
    pub s: Vec<MatrixDto>,
    #[serde(default)]
    pub bound_states: Vec<BoundStateDto>,
}

impl ScatteringFile {
    pub fn from_data(data: &ScatteringData) -> Self {
        Self {
            k_grid: data.k_grid().to_vec(),
            s: data.s_values().iter().map(MatrixDto::from_mat).collect(),
            bound_states: data
                .bound_states()
                .iter()
                .map(|b| BoundStateDto {
                    kappa: b.kappa,
                    M_re: linalg::to_parts(&b.m).0,
                    M_im: im_or_empty(&b.m),
                    multiplicity: Some(b.multiplicity),
                })
                .collect(),
        }
    }

    pub fn to_data(&self) -> Result<ScatteringData> {
        let s = self.s.iter().map(MatrixDto::to_mat).collect::<Result<Vec<_>>>()?;
        let bound = self
            .bound_states
            .iter()
            .map(|b| BoundState::new(b.kappa, parts_to_mat(&b.M_re, &b.M_im)?))
            .collect::<Result<Vec<_>>>()?;
        validate_scattering_data(self.k_grid.clone(), s, bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredFile {
    pub potential: PotentialFile,
    pub boundary: BoundaryFile,
    pub diagnostics: InverseDiagnostics,
}

impl RecoveredFile {
    pub fn from_recovered(r: &RecoveredInput) -> Self {
        Self {
            potential: PotentialFile::from_potential(&r.potential),
            boundary: BoundaryFile::from_boundary(&r.bc),
            diagnostics: r.diagnostics.clone(),
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| ScatterError::InvalidInput(format!("{what}: {e}")))
}

pub fn parse_potential(text: &str) -> Result<Potential> {
    parse::<PotentialFile>(text, "potential")?.to_potential()
}

pub fn parse_boundary(text: &str) -> Result<BoundaryCondition> {
    parse::<BoundaryFile>(text, "boundary condition")?.to_boundary()
}

pub fn parse_scattering(text: &str) -> Result<ScatteringData> {
    parse::<ScatteringFile>(text, "scattering data")?.to_data()
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| ScatterError::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Header `label, M11_re, M11_im, M12_re, …` for `n × n` matrices.
pub fn csv_header(label: &str, name: &str, n: usize) -> String {
    let mut h = label.to_string();
    for i in 1..=n {
        for j in 1..=n {
            h.push_str(&format!(",{name}{i}{j}_re,{name}{i}{j}_im"));
        }
    }
    h
}

/// One matrix per row, row-major, `{:.17e}` for bitwise-stable output.
pub fn write_matrix_csv<W: Write>(
    out: &mut W,
    label: &str,
    name: &str,
    rows: impl IntoIterator<Item = (f64, CMat)>,
    n: usize,
) -> std::io::Result<()> {
    writeln!(out, "{}", csv_header(label, name, n))?;
    for (t, m) in rows {
        write!(out, "{t:.17e}")?;
        for i in 0..n {
            for j in 0..n {
                write!(out, ",{:.17e},{:.17e}", m[(i, j)].re, m[(i, j)].im)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn scattering_csv<W: Write>(out: &mut W, data: &ScatteringData) -> std::io::Result<()> {
    let rows = data.k_grid().iter().copied().zip(data.s_values().iter().cloned());
    write_matrix_csv(out, "k", "S", rows, data.n())
}

pub fn bound_states_csv<W: Write>(out: &mut W, data: &ScatteringData) -> std::io::Result<()> {
    let n = data.n();
    writeln!(out, "{}", csv_header("kappa,multiplicity", "M", n))?;
    for b in data.bound_states() {
        write!(out, "{:.17e},{}", b.kappa, b.multiplicity)?;
        for i in 0..n {
            for j in 0..n {
                write!(out, ",{:.17e},{:.17e}", b.m[(i, j)].re, b.m[(i, j)].im)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// `V(x)` on a uniform grid of `count + 1` points over `[0, x_end]`.
pub fn potential_csv<W: Write>(out: &mut W, p: &Potential, x_end: f64, count: usize) -> std::io::Result<()> {
    let rows = (0..=count).map(|i| {
        let x = x_end * i as f64 / count as f64;
        (x, p.eval(x))
    });
    write_matrix_csv(out, "x", "V", rows, p.n())
}

/// Kernel traces of an inversion: `(F_s, F, K(x,x))`, each as CSV text.
pub fn kernel_csvs(r: &RecoveredInput) -> (String, String, String) {
    let k = &r.kernel;
    let n = r.potential.n();
    let off = k.fs_offset() as f64;
    let mut fs = Vec::new();
    let rows = k.fs_values.iter().enumerate().map(|(m, v)| ((m as f64 - off) * k.h, v.clone()));
    write_matrix_csv(&mut fs, "y", "Fs", rows, n).expect("write to memory");
    let mut f = Vec::new();
    let rows = k.f_values.iter().enumerate().map(|(m, v)| (m as f64 * k.h, v.clone()));
    write_matrix_csv(&mut f, "y", "F", rows, n).expect("write to memory");
    let mut kd = Vec::new();
    let rows = k.x_grid.iter().copied().zip(k.k_diagonal());
    write_matrix_csv(&mut kd, "x", "K", rows, n).expect("write to memory");
    let s = |b: Vec<u8>| String::from_utf8(b).expect("ascii csv");
    (s(fs), s(f), s(kd))
}
