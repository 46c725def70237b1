//! Low-complexity beamformer selection: evaluate a fixed list of matched
//! filter and zero-forcing pairs under each decoding structure, plus TDMA,
//! and keep the best.

use crate::channel::{Channel, User};
use crate::linalg::{unit, CVec};
use crate::pareto::{FamilyKind, LambdaFamily};
use crate::rates::{sum_rate, tdma_sum_rate, DecodingStructure, TxStrategy};
use crate::sumrate::SumRateError;

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicEntry {
    /// Short label such as `ND(h21,h22)`.
    pub label: String,
    /// `None` for TDMA.
    pub structure: Option<DecodingStructure>,
    pub w1: Option<CVec>,
    pub w2: Option<CVec>,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicChoice {
    /// Every evaluated entry in listing order.
    pub table: Vec<HeuristicEntry>,
    /// Index of the winner in `table`; ties go to the earlier entry.
    pub best: usize,
}

impl HeuristicChoice {
    pub fn winner(&self) -> &HeuristicEntry {
        &self.table[self.best]
    }
}

/// Evaluate, at full power:
/// NN with the zero-forcing pair and the selfish pair;
/// ND with `(h21, h22)` and `(h11, h22)`;
/// DN with `(h11, h12)` and `(h11, h22)`;
/// DD with `(h21, h12)`, `(h11, h22)`, `(h21, h22)`, `(h11, h12)`;
/// then TDMA. Vectors are normalized channel directions.
pub fn heuristic_choice(ch: &Channel, pmax: f64) -> Result<HeuristicChoice, SumRateError> {
    if !(pmax > 0.0) || !pmax.is_finite() {
        return Err(SumRateError::BadPower(pmax));
    }
    let u11 = unit(&ch.h11)?;
    let u21 = unit(&ch.h21)?;
    let u22 = unit(&ch.h22)?;
    let u12 = unit(&ch.h12)?;
    // Zero forcing is the W-family member with no cross power.
    let zf1 = LambdaFamily::new(ch, User::One, FamilyKind::W)?.w(0.0)?;
    let zf2 = LambdaFamily::new(ch, User::Two, FamilyKind::W)?.w(0.0)?;
    use DecodingStructure::*;
    let list: Vec<(DecodingStructure, &str, &CVec, &CVec)> = vec![
        (NN, "NN(zf,zf)", &zf1, &zf2),
        (NN, "NN(h11,h22)", &u11, &u22),
        (ND, "ND(h21,h22)", &u21, &u22),
        (ND, "ND(h11,h22)", &u11, &u22),
        (DN, "DN(h11,h12)", &u11, &u12),
        (DN, "DN(h11,h22)", &u11, &u22),
        (DD, "DD(h21,h12)", &u21, &u12),
        (DD, "DD(h11,h22)", &u11, &u22),
        (DD, "DD(h21,h22)", &u21, &u22),
        (DD, "DD(h11,h12)", &u11, &u12),
    ];
    let mut table: Vec<HeuristicEntry> = list
        .into_iter()
        .map(|(s, label, w1, w2)| {
            let tx = TxStrategy { w1: w1.clone(), w2: w2.clone(), p1: pmax, p2: pmax };
            HeuristicEntry {
                label: label.to_string(),
                structure: Some(s),
                w1: Some(w1.clone()),
                w2: Some(w2.clone()),
                rate: sum_rate(s, ch, &tx),
            }
        })
        .collect();
    table.push(HeuristicEntry {
        label: "TDMA".into(),
        structure: None,
        w1: None,
        w2: None,
        rate: tdma_sum_rate(ch, pmax),
    });
    let mut best = 0;
    for (k, e) in table.iter().enumerate() {
        if e.rate > table[best].rate {
            best = k;
        }
    }
    Ok(HeuristicChoice { table, best })
}
