//! JSON formats shared with the command-line tool.
//!
//! Floats are written with 17 significant digits in lowercase scientific
//! notation (`-2.5000000000000000e-1`), which round-trips every `f64`
//! exactly and is byte-stable across platforms. Non-finite values are
//! written as `null`.
//!
//! * matrix: `{"rows": R, "cols": C, "re": [...], "im": [...]}`, row-major;
//! * state: `{"dims": [dA, dB], "re": [...], "im": [...]}`, row-major.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::BipartiteState;
use crate::{ComplexMatrix, Ket, C64};

/// `x` with 17 significant digits, lowercase scientific.
pub fn format_sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// Serde adapter writing an `f64` via [`format_sci`].
pub mod sci17 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(super::format_sci(*x)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Serde adapter for `Vec<f64>` via [`format_sci`].
pub mod vec_sci17 {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for &x in xs {
            let raw = RawValue::from_string(super::format_sci(x)).map_err(serde::ser::Error::custom)?;
            seq.serialize_element(&raw)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(Vec::<Option<f64>>::deserialize(d)?
            .into_iter()
            .map(|x| x.unwrap_or(f64::NAN))
            .collect())
    }
}

/// Serde adapter for `Option<f64>`; `None` is written as `null`.
pub mod opt_sci17 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::sci17::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<f64>::deserialize(d)
    }
}

#[derive(Serialize, Deserialize)]
struct KetJson {
    #[serde(with = "vec_sci17")]
    re: Vec<f64>,
    #[serde(with = "vec_sci17")]
    im: Vec<f64>,
}

/// Serde adapter for a ket as `{"re": [...], "im": [...]}`.
pub mod ket_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::KetJson;
    use crate::{Ket, C64};

    pub fn serialize<S: Serializer>(k: &Ket, s: S) -> Result<S::Ok, S::Error> {
        KetJson { re: k.iter().map(|z| z.re).collect(), im: k.iter().map(|z| z.im).collect() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ket, D::Error> {
        let j = KetJson::deserialize(d)?;
        if j.re.len() != j.im.len() {
            return Err(serde::de::Error::custom("re and im have different lengths"));
        }
        Ok(Ket::from_iterator(j.re.len(), j.re.iter().zip(&j.im).map(|(&r, &i)| C64::new(r, i))))
    }
}

/// Dense matrix in the shared JSON layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    #[serde(with = "vec_sci17")]
    pub re: Vec<f64>,
    #[serde(with = "vec_sci17")]
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                re.push(m[(r, c)].re);
                im.push(m[(r, c)].im);
            }
        }
        Self { rows, cols, re, im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.rows * self.cols;
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::Format(format!(
                "{}x{} matrix needs {n} entries, got re={} im={}",
                self.rows,
                self.cols,
                self.re.len(),
                self.im.len()
            )));
        }
        if self.re.iter().chain(&self.im).any(|x| !x.is_finite()) {
            return Err(Error::Format("matrix contains non-finite entries".into()));
        }
        Ok(DMatrix::from_fn(self.rows, self.cols, |r, c| {
            let k = r * self.cols + c;
            C64::new(self.re[k], self.im[k])
        }))
    }
}

/// State file contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: [usize; 2],
    #[serde(with = "vec_sci17")]
    pub re: Vec<f64>,
    #[serde(with = "vec_sci17")]
    pub im: Vec<f64>,
}

impl StateJson {
    pub fn from_state(state: &BipartiteState) -> Self {
        let m = MatrixJson::from_matrix(state.rho());
        Self { dims: [state.da(), state.db()], re: m.re, im: m.im }
    }

    pub fn to_state(&self) -> Result<BipartiteState> {
        let [da, db] = self.dims;
        let d = da * db;
        let m = MatrixJson { rows: d, cols: d, re: self.re.clone(), im: self.im.clone() }.to_matrix()?;
        BipartiteState::new(da, db, m)
    }
}

pub fn state_to_json(state: &BipartiteState) -> String {
    to_json_pretty(&StateJson::from_state(state))
}

pub fn state_from_json(text: &str) -> Result<BipartiteState> {
    let parsed: StateJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    parsed.to_state()
}

pub fn read_state(path: &Path) -> Result<BipartiteState> {
    let text = fs::read_to_string(path)?;
    state_from_json(&text)
}

pub fn write_state(path: &Path, state: &BipartiteState) -> Result<()> {
    fs::write(path, state_to_json(state))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn ket_to_pairs(k: &Ket) -> (Vec<f64>, Vec<f64>) {
    (k.iter().map(|z| z.re).collect(), k.iter().map(|z| z.im).collect())
}
