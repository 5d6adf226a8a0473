use std::collections::BTreeMap;
use std::io::Write;

use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::io::write_field;
use crate::spectral::SpectralField;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    HeatDecay,
    CoercivityQ,
    SignIntegralQ1,
    MaxPointBound,
    GagliardoEquiv,
    AbPointwise,
    SpectralMassContraction,
    LqSemigroupDecay,
    PhaseLowerBound,
    CounterexampleGamma2,
    BilinearRatio,
    TrilinearBound,
    CommutatorVanishing,
}

impl LemmaId {
    pub const ALL: [LemmaId; 13] = [
        LemmaId::HeatDecay,
        LemmaId::CoercivityQ,
        LemmaId::SignIntegralQ1,
        LemmaId::MaxPointBound,
        LemmaId::GagliardoEquiv,
        LemmaId::AbPointwise,
        LemmaId::SpectralMassContraction,
        LemmaId::LqSemigroupDecay,
        LemmaId::PhaseLowerBound,
        LemmaId::CounterexampleGamma2,
        LemmaId::BilinearRatio,
        LemmaId::TrilinearBound,
        LemmaId::CommutatorVanishing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::HeatDecay => "heat_decay",
            LemmaId::CoercivityQ => "coercivity_q",
            LemmaId::SignIntegralQ1 => "sign_integral_q1",
            LemmaId::MaxPointBound => "max_point_bound",
            LemmaId::GagliardoEquiv => "gagliardo_equiv",
            LemmaId::AbPointwise => "ab_pointwise",
            LemmaId::SpectralMassContraction => "spectral_mass_contraction",
            LemmaId::LqSemigroupDecay => "lq_semigroup_decay",
            LemmaId::PhaseLowerBound => "phase_lower_bound",
            LemmaId::CounterexampleGamma2 => "counterexample_gamma2",
            LemmaId::BilinearRatio => "bilinear_ratio",
            LemmaId::TrilinearBound => "trilinear_bound",
            LemmaId::CommutatorVanishing => "commutator_vanishing",
        }
    }

    pub fn parse(s: &str) -> Option<LemmaId> {
        LemmaId::ALL.into_iter().find(|l| l.as_str() == s)
    }
}

impl std::fmt::Display for LemmaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unknown {
    Unknown,
}

/// A constant given explicitly, or "unknown" for implicit ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TheoreticalBound {
    Value(f64),
    Unknown(Unknown),
}

impl TheoreticalBound {
    pub const UNKNOWN: TheoreticalBound = TheoreticalBound::Unknown(Unknown::Unknown);
}

/// One row of an inequality sweep. Unused columns stay empty in CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub j: Option<i32>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub gamma: Option<f64>,
    pub t: Option<f64>,
    pub measured_ratio: f64,
}

/// The sample that attained the extremal value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub sample_index: u64,
    pub value: f64,
    /// `sqgf` for a binary field container, `f64le` for raw 1D samples.
    pub encoding: String,
    pub data_base64: String,
}

impl Witness {
    pub fn field(sample_index: u64, value: f64, field: &SpectralField) -> Result<Self> {
        let mut buf = Vec::new();
        write_field(field, &mut buf)?;
        Ok(Self {
            sample_index,
            value,
            encoding: "sqgf".into(),
            data_base64: base64::engine::general_purpose::STANDARD.encode(buf),
        })
    }

    pub fn samples_1d(sample_index: u64, value: f64, samples: &[f64]) -> Self {
        let bytes: Vec<u8> = samples.iter().flat_map(|v| v.to_le_bytes()).collect();
        Self {
            sample_index,
            value,
            encoding: "f64le".into(),
            data_base64: base64::engine::general_purpose::STANDARD.encode(bytes),
        }
    }

    pub fn decode(&self) -> Result<Vec<u8>> {
        base64::engine::general_purpose::STANDARD
            .decode(&self.data_base64)
            .map_err(|e| crate::error::SqgError::Format(format!("witness payload: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub schema_version: u32,
    pub lemma_id: LemmaId,
    pub parameters: BTreeMap<String, f64>,
    pub n_samples: u64,
    pub measured_constant: f64,
    pub theoretical_bound: TheoreticalBound,
    pub verdict: Verdict,
    pub seed: u64,
    /// Tolerances and stability factors the verdict was judged against.
    pub thresholds: BTreeMap<String, f64>,
    /// Secondary measured quantities.
    pub measurements: BTreeMap<String, f64>,
    pub sweep: Vec<SweepRow>,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl InequalityReport {
    pub fn new(lemma_id: LemmaId, seed: u64) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            lemma_id,
            parameters: BTreeMap::new(),
            n_samples: 0,
            measured_constant: f64::NAN,
            theoretical_bound: TheoreticalBound::UNKNOWN,
            verdict: Verdict::Fail,
            seed,
            thresholds: BTreeMap::new(),
            measurements: BTreeMap::new(),
            sweep: Vec::new(),
            witness: None,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, v: f64) -> Self {
        self.parameters.insert(key.into(), v);
        self
    }

    pub fn threshold(mut self, key: &str, v: f64) -> Self {
        self.thresholds.insert(key.into(), v);
        self
    }

    pub fn measure(&mut self, key: impl Into<String>, v: f64) {
        self.measurements.insert(key.into(), v);
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_sweep_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write_sweep_csv(&self.sweep, &mut w)
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> Result<()> {
    writeln!(w, "j,p,q,gamma,t,measured_ratio")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            opt(r.j),
            opt(r.p),
            opt(r.q),
            opt(r.gamma),
            opt(r.t),
            r.measured_ratio
        )?;
    }
    Ok(())
}
