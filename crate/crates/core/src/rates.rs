//! Achievable rates under the four decoding structures.
//!
//! With received powers `g_jk = |h_jk^H w_k|^2 p_k` the per-user quantities
//! are
//!
//! * `C_i = log2(1 + g_ii)`: interference removed,
//! * `D_i = log2(1 + g_ii / (1 + g_ij))`: interference treated as noise,
//! * `T_i = log2(1 + g_ji / (1 + g_jj))`: rate at which receiver `j` can
//!   decode message `i` while treating its own signal as noise.
//!
//! A user whose message is decoded at the other receiver is capped by both
//! its own receiver and the eavesdropping one.

use crate::channel::Channel;
use crate::linalg::{inner_unchecked, CVec};
use std::fmt;
use std::str::FromStr;

/// Which receivers decode the interfering message. The first letter
/// belongs to receiver 1: `N` treats interference as noise, `D` decodes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecodingStructure {
    NN,
    ND,
    DN,
    DD,
}

impl DecodingStructure {
    pub const ALL: [DecodingStructure; 4] =
        [DecodingStructure::NN, DecodingStructure::ND, DecodingStructure::DN, DecodingStructure::DD];

    pub fn name(self) -> &'static str {
        match self {
            DecodingStructure::NN => "NN",
            DecodingStructure::ND => "ND",
            DecodingStructure::DN => "DN",
            DecodingStructure::DD => "DD",
        }
    }

    /// The structure seen after exchanging user labels.
    pub fn swapped(self) -> DecodingStructure {
        match self {
            DecodingStructure::ND => DecodingStructure::DN,
            DecodingStructure::DN => DecodingStructure::ND,
            s => s,
        }
    }
}

impl fmt::Display for DecodingStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecodingStructure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "NN" => Ok(DecodingStructure::NN),
            "ND" => Ok(DecodingStructure::ND),
            "DN" => Ok(DecodingStructure::DN),
            "DD" => Ok(DecodingStructure::DD),
            _ => Err(format!("unknown decoding structure `{s}` (expected NN, ND, DN or DD)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TxError {
    #[error("beamformer {0} is not unit norm (norm {1})")]
    NotUnitNorm(u8, f64),
    #[error("power {0} outside [0, {1}]")]
    PowerOutOfRange(f64, f64),
    #[error("beamformer length does not match the channel")]
    DimensionMismatch,
}

/// Beamformers and powers of both transmitters.
#[derive(Debug, Clone, PartialEq)]
pub struct TxStrategy {
    pub w1: CVec,
    pub w2: CVec,
    pub p1: f64,
    pub p2: f64,
}

impl TxStrategy {
    /// Checks unit norms (to `1e-9`) and `0 <= p_i <= pmax`.
    pub fn new(w1: CVec, w2: CVec, p1: f64, p2: f64, pmax: f64) -> Result<Self, TxError> {
        for (k, w) in [(1u8, &w1), (2u8, &w2)] {
            let n = w.norm();
            if (n - 1.0).abs() > 1e-9 {
                return Err(TxError::NotUnitNorm(k, n));
            }
        }
        for p in [p1, p2] {
            if !(0.0..=pmax).contains(&p) {
                return Err(TxError::PowerOutOfRange(p, pmax));
            }
        }
        Ok(TxStrategy { w1, w2, p1, p2 })
    }
}

/// Received powers `g11 = |h11^H w1|^2 p1`, `g21`, `g22`, `g12` likewise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Gains {
    pub g11: f64,
    pub g21: f64,
    pub g22: f64,
    pub g12: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

impl Gains {
    pub fn c1(&self) -> f64 {
        (1.0 + self.g11).log2()
    }
    pub fn c2(&self) -> f64 {
        (1.0 + self.g22).log2()
    }
    pub fn d1(&self) -> f64 {
        (1.0 + self.g11 / (1.0 + self.g12)).log2()
    }
    pub fn d2(&self) -> f64 {
        (1.0 + self.g22 / (1.0 + self.g21)).log2()
    }
    pub fn t1(&self) -> f64 {
        (1.0 + self.g21 / (1.0 + self.g22)).log2()
    }
    pub fn t2(&self) -> f64 {
        (1.0 + self.g12 / (1.0 + self.g11)).log2()
    }

    pub fn rates(&self, s: DecodingStructure) -> RatePoint {
        match s {
            DecodingStructure::NN => RatePoint { r1: self.d1(), r2: self.d2() },
            DecodingStructure::ND => RatePoint { r1: self.d1().min(self.t1()), r2: self.c2() },
            DecodingStructure::DN => RatePoint { r1: self.c1(), r2: self.d2().min(self.t2()) },
            DecodingStructure::DD => RatePoint { r1: self.c1().min(self.t1()), r2: self.c2().min(self.t2()) },
        }
    }

    pub fn sum_rate(&self, s: DecodingStructure) -> f64 {
        self.rates(s).sum()
    }

    /// `2^(R1 + R2)` written as a minimum of products, cheaper than the logs.
    #[inline]
    pub fn sum_exponent(&self, s: DecodingStructure) -> f64 {
        let Gains { g11, g21, g22, g12 } = *self;
        match s {
            DecodingStructure::NN => (1.0 + g11 / (1.0 + g12)) * (1.0 + g22 / (1.0 + g21)),
            DecodingStructure::ND => ((1.0 + g22) * (1.0 + g11 / (1.0 + g12))).min(1.0 + g22 + g21),
            DecodingStructure::DN => ((1.0 + g11) * (1.0 + g22 / (1.0 + g21))).min(1.0 + g11 + g12),
            DecodingStructure::DD => {
                let z = zdd_terms(self);
                z[0].min(z[1]).min(z[2]).min(z[3])
            }
        }
    }

    pub fn swapped(&self) -> Gains {
        Gains { g11: self.g22, g21: self.g12, g22: self.g11, g12: self.g21 }
    }
}

/// Received powers of a strategy over a channel.
pub fn gains(ch: &Channel, tx: &TxStrategy) -> Gains {
    Gains {
        g11: inner_unchecked(&ch.h11.0, &tx.w1.0).norm_sqr() * tx.p1,
        g21: inner_unchecked(&ch.h21.0, &tx.w1.0).norm_sqr() * tx.p1,
        g22: inner_unchecked(&ch.h22.0, &tx.w2.0).norm_sqr() * tx.p2,
        g12: inner_unchecked(&ch.h12.0, &tx.w2.0).norm_sqr() * tx.p2,
    }
}

pub fn rate_pair(s: DecodingStructure, ch: &Channel, tx: &TxStrategy) -> RatePoint {
    gains(ch, tx).rates(s)
}

pub fn sum_rate(s: DecodingStructure, ch: &Channel, tx: &TxStrategy) -> f64 {
    rate_pair(s, ch, tx).sum()
}

/// The four linear-domain terms whose minimum is `2^(R1 + R2)` under DD:
/// `(1+g11)(1+g22)`, `1+g11+g12`, `1+g21+g22`, and
/// `(1+g11+g12)(1+g21+g22) / ((1+g11)(1+g22))`.
pub fn zdd_terms(g: &Gains) -> [f64; 4] {
    let z1 = (1.0 + g.g11) * (1.0 + g.g22);
    let z2 = 1.0 + g.g11 + g.g12;
    let z3 = 1.0 + g.g21 + g.g22;
    // Written as a product of two ratios to avoid forming z2 * z3.
    let z4 = (1.0 + g.g21 / (1.0 + g.g22)) * (1.0 + g.g12 / (1.0 + g.g11));
    [z1, z2, z3, z4]
}

/// Equal time sharing, each user alone on the air with a matched filter at
/// full power for half the time.
pub fn tdma_sum_rate(ch: &Channel, pmax: f64) -> f64 {
    0.5 * (1.0 + ch.h11.norm_sqr() * pmax).log2() + 0.5 * (1.0 + ch.h22.norm_sqr() * pmax).log2()
}
