//! Two-user MISO channel state, random ensembles and the JSON channel file.
//!
//! `h_ji` is the channel from transmitter `i` to receiver `j`; the struct
//! fields are named accordingly (`h21` goes from Tx 1 to Rx 2).
//!
//! Randomness comes from `ChaCha20Rng` seeded with `seed_from_u64`, so a
//! given seed yields the same channels on every platform. Gaussian entries
//! are produced by Box-Muller: each complex entry consumes one pair of
//! uniforms `(u1, u2)` and equals `r (cos t + i sin t) / sqrt(2)` with
//! `r = sqrt(-2 ln(1 - u1))`, `t = 2 pi u2`, so `E|h|^2 = 1`.

use crate::linalg::{cos_angle, proj_orth, unit, CVec, LinalgError};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::Value;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

/// Which user a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum User {
    One,
    Two,
}

impl User {
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub h11: CVec,
    pub h12: CVec,
    pub h21: CVec,
    pub h22: CVec,
}

#[derive(Debug, thiserror::Error)]
pub enum ChannelError {
    #[error("antenna count must be at least 2 (got {0})")]
    TooFewAntennas(usize),
    #[error("sir must be positive and finite (got {0})")]
    BadSir(f64),
    #[error("channel vectors have inconsistent lengths")]
    DimensionMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("could not read channel file: {0}")]
    Io(#[from] std::io::Error),
    #[error("channel file parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("channel file: missing field `{0}`")]
    MissingField(String),
    #[error("channel file: field `{field}`: {msg}")]
    BadField { field: String, msg: String },
}

impl Channel {
    pub fn new(h11: CVec, h12: CVec, h21: CVec, h22: CVec) -> Result<Self, ChannelError> {
        let n = h11.len();
        if n < 2 {
            return Err(ChannelError::TooFewAntennas(n));
        }
        if h12.len() != n || h21.len() != n || h22.len() != n {
            return Err(ChannelError::DimensionMismatch);
        }
        Ok(Channel { h11, h12, h21, h22 })
    }

    pub fn n(&self) -> usize {
        self.h11.len()
    }

    /// Direct channel of user `i` (`h_ii`).
    pub fn direct(&self, i: User) -> &CVec {
        match i {
            User::One => &self.h11,
            User::Two => &self.h22,
        }
    }

    /// Channel from Tx `i` to the other receiver (`h_ji`).
    pub fn cross(&self, i: User) -> &CVec {
        match i {
            User::One => &self.h21,
            User::Two => &self.h12,
        }
    }

    /// Exchange the user labels.
    pub fn swap(&self) -> Channel {
        Channel {
            h11: self.h22.clone(),
            h12: self.h21.clone(),
            h21: self.h12.clone(),
            h22: self.h11.clone(),
        }
    }

    /// Every vector multiplied by `sqrt(p)`; absorbs the power into the channel.
    pub fn scaled(&self, p: f64) -> Channel {
        let s = p.sqrt();
        Channel {
            h11: self.h11.scale_real(s),
            h12: self.h12.scale_real(s),
            h21: self.h21.scale_real(s),
            h22: self.h22.scale_real(s),
        }
    }

    /// `cos^2` of the angle between `h_ii` and `h_ji`.
    pub fn cos2(&self, i: User) -> Result<f64, LinalgError> {
        cos_angle(self.direct(i), self.cross(i)).map(|c| c * c)
    }

    pub fn is_finite(&self) -> bool {
        [&self.h11, &self.h12, &self.h21, &self.h22]
            .iter()
            .all(|v| v.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }
}

/// Angle in `[0, pi/2]` between two channel vectors.
pub fn angle(a: &CVec, b: &CVec) -> Result<f64, LinalgError> {
    Ok(cos_angle(a, b)?.acos())
}

/// Per-trial seed derived from a base seed.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

/// How a Monte-Carlo ensemble draws its channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelEnsembleSpec {
    Iid { n: usize },
    Symmetric { n: usize, sir: f64, theta: f64 },
}

impl ChannelEnsembleSpec {
    pub fn n(&self) -> usize {
        match *self {
            ChannelEnsembleSpec::Iid { n } | ChannelEnsembleSpec::Symmetric { n, .. } => n,
        }
    }

    pub fn draw(&self, seed: u64) -> Result<Channel, ChannelError> {
        match *self {
            ChannelEnsembleSpec::Iid { n } => gen_iid(n, seed),
            ChannelEnsembleSpec::Symmetric { n, sir, theta } => gen_symmetric(n, sir, theta, seed),
        }
    }
}

struct Gauss {
    rng: ChaCha20Rng,
}

impl Gauss {
    fn new(seed: u64) -> Self {
        Gauss { rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    /// One CN(0, 1) sample via Box-Muller.
    fn complex(&mut self) -> Complex64 {
        let u1: f64 = self.rng.gen();
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let t = 2.0 * PI * u2;
        Complex64::new(r * t.cos(), r * t.sin()) / std::f64::consts::SQRT_2
    }

    fn vector(&mut self, n: usize) -> CVec {
        CVec((0..n).map(|_| self.complex()).collect())
    }

    fn uniform(&mut self) -> f64 {
        self.rng.gen()
    }
}

/// Independent CN(0, 1) entries; vectors drawn in the order h11, h12, h21, h22.
pub fn gen_iid(n: usize, seed: u64) -> Result<Channel, ChannelError> {
    if n < 2 {
        return Err(ChannelError::TooFewAntennas(n));
    }
    let mut g = Gauss::new(seed);
    let h11 = g.vector(n);
    let h12 = g.vector(n);
    let h21 = g.vector(n);
    let h22 = g.vector(n);
    Channel::new(h11, h12, h21, h22)
}

/// Direct channels i.i.d.; each cross channel sits at angle `theta` from the
/// direct channel of the same transmitter with `||h_ji||^2 = ||h_ii||^2 / sir`.
///
/// `h_ji = ||h_ji|| (cos(theta) h_ii/||h_ii|| + sin(theta) e^{i psi} u)` where
/// `u` is a uniformly random unit vector orthogonal to `h_ii` and `psi` is
/// uniform on `[0, 2 pi)`.
pub fn gen_symmetric(n: usize, sir: f64, theta: f64, seed: u64) -> Result<Channel, ChannelError> {
    if n < 2 {
        return Err(ChannelError::TooFewAntennas(n));
    }
    if !(sir > 0.0) || !sir.is_finite() {
        return Err(ChannelError::BadSir(sir));
    }
    let mut g = Gauss::new(seed);
    let h11 = g.vector(n);
    let h22 = g.vector(n);
    let cross = |direct: &CVec, g: &mut Gauss| -> Result<CVec, ChannelError> {
        let e = unit(direct)?;
        let u = loop {
            let z = g.vector(n);
            if let Ok(u) = unit(&proj_orth(&e, &z)?) {
                break u;
            }
        };
        let psi = 2.0 * PI * g.uniform();
        let mag = direct.norm() / sir.sqrt();
        let dir = e.scale_real(theta.cos()).axpy(Complex64::from_polar(theta.sin(), psi), &u);
        Ok(dir.scale_real(mag))
    };
    let h21 = cross(&h11, &mut g)?;
    let h12 = cross(&h22, &mut g)?;
    Channel::new(h11, h12, h21, h22)
}

const FIELDS: [&str; 4] = ["h11", "h12", "h21", "h22"];

/// Serialize as `{"n": N, "h11": [[re, im], ...], ...}` with 17 significant
/// digits per float.
pub fn to_json(ch: &Channel) -> String {
    let mut s = String::new();
    let _ = write!(s, "{{\n  \"n\": {}", ch.n());
    for (name, v) in FIELDS.iter().zip([&ch.h11, &ch.h12, &ch.h21, &ch.h22]) {
        let _ = write!(s, ",\n  \"{name}\": [");
        for (k, z) in v.iter().enumerate() {
            if k > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "[{:.16e}, {:.16e}]", z.re, z.im);
        }
        s.push(']');
    }
    s.push_str("\n}\n");
    s
}

pub fn from_json(text: &str) -> Result<Channel, ChannelError> {
    let v: Value = serde_json::from_str(text).map_err(|e| ChannelError::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let obj = v.as_object().ok_or_else(|| ChannelError::Parse {
        line: 1,
        column: 1,
        msg: "top-level value must be an object".into(),
    })?;
    let n = obj
        .get("n")
        .ok_or_else(|| ChannelError::MissingField("n".into()))?
        .as_u64()
        .ok_or_else(|| ChannelError::BadField { field: "n".into(), msg: "must be a non-negative integer".into() })?
        as usize;
    if n < 2 {
        return Err(ChannelError::TooFewAntennas(n));
    }
    let mut vecs = Vec::with_capacity(4);
    for name in FIELDS {
        let arr = obj
            .get(name)
            .ok_or_else(|| ChannelError::MissingField(name.into()))?
            .as_array()
            .ok_or_else(|| ChannelError::BadField { field: name.into(), msg: "must be an array".into() })?;
        if arr.len() != n {
            return Err(ChannelError::BadField {
                field: name.into(),
                msg: format!("expected {n} entries, found {}", arr.len()),
            });
        }
        let mut entries = Vec::with_capacity(n);
        for (k, e) in arr.iter().enumerate() {
            let pair = e.as_array().filter(|p| p.len() == 2);
            let parsed = pair.and_then(|p| Some(Complex64::new(p[0].as_f64()?, p[1].as_f64()?)));
            match parsed {
                Some(z) => entries.push(z),
                None => {
                    return Err(ChannelError::BadField {
                        field: name.into(),
                        msg: format!("entry {k} must be a [re, im] pair of numbers"),
                    })
                }
            }
        }
        vecs.push(CVec(entries));
    }
    let h22 = vecs.pop().unwrap();
    let h21 = vecs.pop().unwrap();
    let h12 = vecs.pop().unwrap();
    let h11 = vecs.pop().unwrap();
    Channel::new(h11, h12, h21, h22)
}

pub fn save(ch: &Channel, path: &Path) -> Result<(), ChannelError> {
    std::fs::write(path, to_json(ch))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Channel, ChannelError> {
    let text = std::fs::read_to_string(path)?;
    from_json(&text)
}
