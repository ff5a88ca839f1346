//! JSON formats for states, channels and τ breakdowns (double precision).
//!
//! State: `{"d1": 3, "d2": 3, "re": [...], "im": [...]}` where `re`/`im` hold
//! either d1·d2 amplitudes (pure state) or a (d1·d2)² density matrix, flat in
//! row-major order or as nested rows. `im` may be omitted.
//!
//! Channel: `{"dim": d, "kraus": [{"re": [[…]], "im": [[…]]}, …]}` or the
//! shorthand `{"builtin": "depolarizing" | "phase_damping", "dim": d, "eps": ε}`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bounds::TauBreakdown;
use crate::channels::QuantumChannel;
use crate::dynamics::ChannelFamily;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::states::{BipartiteDims, DensityMatrix, PureState};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealArray {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

impl RealArray {
    fn flatten(self) -> (Vec<f64>, Option<(usize, usize)>) {
        match self {
            RealArray::Flat(v) => (v, None),
            RealArray::Nested(rows) => {
                let shape = (rows.len(), rows.first().map_or(0, Vec::len));
                (rows.into_iter().flatten().collect(), Some(shape))
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub d1: usize,
    pub d2: usize,
    pub re: RealArray,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<RealArray>,
}

/// A state read from JSON.
#[derive(Clone, Debug)]
pub enum LoadedState {
    Pure(PureState<f64>),
    Mixed(DensityMatrix<f64>),
}

impl LoadedState {
    pub fn density(&self) -> DensityMatrix<f64> {
        match self {
            LoadedState::Pure(p) => p.density(),
            LoadedState::Mixed(m) => m.clone(),
        }
    }

    pub fn dims(&self) -> BipartiteDims {
        match self {
            LoadedState::Pure(p) => p.dims(),
            LoadedState::Mixed(m) => m.dims(),
        }
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Serialization(e.to_string())
}

/// Flattened entries and, for nested input, the (rows, cols) shape.
type Entries = (Vec<Complex<f64>>, Option<(usize, usize)>);

fn complex_entries(re: RealArray, im: Option<RealArray>) -> Result<Entries> {
    let (re, shape) = re.flatten();
    let im = match im {
        Some(a) => {
            let (v, im_shape) = a.flatten();
            if v.len() != re.len() || (im_shape.is_some() && im_shape != shape) {
                return Err(Error::Serialization(format!(
                    "real part has {} entries, imaginary part {}",
                    re.len(),
                    v.len()
                )));
            }
            v
        }
        None => vec![0.0; re.len()],
    };
    Ok((re.into_iter().zip(im).map(|(a, b)| Complex::new(a, b)).collect(), shape))
}

pub fn parse_state(json: &str) -> Result<LoadedState> {
    let file: StateFile = serde_json::from_str(json).map_err(parse_err)?;
    let dims = BipartiteDims::new(file.d1, file.d2)?;
    let (entries, shape) = complex_entries(file.re, file.im)?;
    let n = dims.total();
    if entries.len() == n && shape.is_none_or(|s| s == (n, 1) || s == (1, n)) {
        return Ok(LoadedState::Pure(PureState::new(dims, entries)?));
    }
    if entries.len() == n * n && shape.is_none_or(|s| s == (n, n)) {
        let m = Matrix::from_vec(n, n, entries)?;
        return Ok(LoadedState::Mixed(DensityMatrix::new(dims, m)?));
    }
    Err(Error::Serialization(format!(
        "expected {n} amplitudes or {}x{} density matrix entries, found {}",
        n,
        n,
        entries.len()
    )))
}

fn split_matrix(m: &Matrix<f64>) -> (RealArray, Option<RealArray>) {
    let rows = |f: fn(&Complex<f64>) -> f64| {
        (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| f(&m[(i, j)])).collect())
            .collect::<Vec<Vec<f64>>>()
    };
    (
        RealArray::Nested(rows(|z| z.re)),
        Some(RealArray::Nested(rows(|z| z.im))),
    )
}

pub fn pure_state_to_json(psi: &PureState<f64>) -> String {
    let dims = psi.dims();
    let file = StateFile {
        d1: dims.d1,
        d2: dims.d2,
        re: RealArray::Flat(psi.amplitudes().iter().map(|z| z.re).collect()),
        im: Some(RealArray::Flat(psi.amplitudes().iter().map(|z| z.im).collect())),
    };
    serde_json::to_string_pretty(&file).expect("state serializes")
}

pub fn density_to_json(rho: &DensityMatrix<f64>) -> String {
    let dims = rho.dims();
    let (re, im) = split_matrix(rho.matrix());
    let file = StateFile {
        d1: dims.d1,
        d2: dims.d2,
        re,
        im,
    };
    serde_json::to_string_pretty(&file).expect("state serializes")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausFile {
    pub re: RealArray,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<RealArray>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelFile {
    Builtin { builtin: String, dim: usize, eps: f64 },
    Kraus { dim: usize, kraus: Vec<KrausFile> },
}

pub fn parse_channel(json: &str) -> Result<QuantumChannel<f64>> {
    let file: ChannelFile = serde_json::from_str(json).map_err(parse_err)?;
    match file {
        ChannelFile::Builtin { builtin, dim, eps } => builtin.parse::<ChannelFamily>()?.channel(dim, eps),
        ChannelFile::Kraus { dim, kraus } => {
            let ops = kraus
                .into_iter()
                .map(|k| {
                    let (entries, shape) = complex_entries(k.re, k.im)?;
                    if entries.len() != dim * dim || shape.is_some_and(|s| s != (dim, dim)) {
                        return Err(Error::Serialization(format!(
                            "Kraus operator is not {dim}x{dim} ({} entries)",
                            entries.len()
                        )));
                    }
                    Matrix::from_vec(dim, dim, entries)
                })
                .collect::<Result<Vec<_>>>()?;
            if ops.is_empty() {
                return Err(Error::InvalidChannel("no Kraus operators".into()));
            }
            QuantumChannel::cp_map(ops)
        }
    }
}

pub fn channel_to_json(ch: &QuantumChannel<f64>) -> String {
    let file = ChannelFile::Kraus {
        dim: ch.dim(),
        kraus: ch
            .kraus()
            .iter()
            .map(|k| {
                let (re, im) = split_matrix(k);
                KrausFile { re, im }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("channel serializes")
}

#[derive(Serialize)]
struct ComponentEntry {
    p: usize,
    r: usize,
    pp: usize,
    rp: usize,
    c: f64,
}

#[derive(Serialize)]
struct BreakdownFile {
    total: f64,
    components: Vec<ComponentEntry>,
}

/// `{"total": …, "components": [{"p", "r", "pp", "rp", "c"}, …]}`
pub fn tau_breakdown_json(t: &TauBreakdown<f64>) -> serde_json::Value {
    let file = BreakdownFile {
        total: t.total,
        components: t
            .components
            .iter()
            .map(|&(i, c)| ComponentEntry {
                p: i.p,
                r: i.r,
                pp: i.pp,
                rp: i.rp,
                c,
            })
            .collect(),
    };
    serde_json::to_value(file).expect("breakdown serializes")
}
