//! JSON and CSV artifacts.
//!
//! Complex numbers are written as `[re, im]` pairs and matrices as nested
//! row arrays. Floats round-trip exactly, so reloading an artifact gives
//! bit-identical values.

use std::io::Write;
use std::path::Path;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::designs::{DesignEntry, DesignKind, WeightedUnitarySet};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::mes::JointState;
use crate::mps::SequentialCircuit;
use crate::protocols::BranchRecord;
use crate::scalar::CMat;
use crate::symcheck::{GapEstimate, PowerLawFit};
use crate::symspace::Unitary2;

pub type ComplexPair = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexPair>>;

pub fn matrix_to_json(m: &CMat<f64>) -> MatrixJson {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMat<f64>> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if let Some(bad) = rows.iter().find(|r| r.len() != nc) {
        return Err(Error::Dimension {
            expected: nc,
            got: bad.len(),
        });
    }
    Ok(CMat::<f64>::from_fn(nr, nc, |r, c| {
        C64::new(rows[r][c][0], rows[r][c][1])
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub n: usize,
    pub authority_dim: usize,
    /// `amplitudes[α][β]`: authority basis state `α`, Dicke state `β`.
    pub amplitudes: MatrixJson,
}

impl StateJson {
    pub fn from_state(s: &JointState<f64>) -> Self {
        Self {
            n: s.n(),
            authority_dim: s.authority_dim(),
            amplitudes: matrix_to_json(s.amplitudes()),
        }
    }

    pub fn to_state(&self) -> Result<JointState<f64>> {
        JointState::new(self.n, matrix_from_json(&self.amplitudes)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignEntryJson {
    pub weight: f64,
    pub unitary: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignJson {
    /// `"state"` or `"channel"`.
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<MatrixJson>,
    pub entries: Vec<DesignEntryJson>,
}

impl DesignJson {
    pub fn from_design(d: &WeightedUnitarySet) -> Self {
        let rho = match d.kind() {
            DesignKind::StateTwirl { rho } => Some(matrix_to_json(rho)),
            DesignKind::ChannelTwirl => None,
        };
        Self {
            kind: d.kind().name().to_string(),
            n: d.n(),
            rho,
            entries: d
                .entries()
                .iter()
                .map(|e| DesignEntryJson {
                    weight: e.weight,
                    unitary: matrix_to_json(&e.unitary.to_dmatrix()),
                })
                .collect(),
        }
    }

    pub fn to_design(&self) -> Result<WeightedUnitarySet> {
        let kind = match (self.kind.as_str(), &self.rho) {
            ("channel", _) => DesignKind::ChannelTwirl,
            ("state", Some(r)) => DesignKind::StateTwirl {
                rho: matrix_from_json(r)?,
            },
            ("state", None) => return Err(Error::KindMismatch("state design without rho".into())),
            (other, _) => return Err(Error::KindMismatch(format!("unknown kind '{other}'"))),
        };
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let m = matrix_from_json(&e.unitary)?;
                if m.nrows() != 2 || m.ncols() != 2 {
                    return Err(Error::Dimension {
                        expected: 2,
                        got: m.nrows(),
                    });
                }
                Ok(DesignEntry {
                    weight: e.weight,
                    unitary: Unitary2::new(Matrix2::new(
                        m[(0, 0)],
                        m[(0, 1)],
                        m[(1, 0)],
                        m[(1, 1)],
                    ))?,
                })
            })
            .collect::<Result<_>>()?;
        WeightedUnitarySet::new(self.n, kind, entries)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateJson {
    pub site: usize,
    pub matrix: MatrixJson,
}

pub fn circuit_to_json(c: &SequentialCircuit<f64>) -> Vec<GateJson> {
    c.gates
        .iter()
        .map(|g| GateJson {
            site: g.site,
            matrix: matrix_to_json(&g.matrix),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchJson {
    pub outcome: usize,
    pub probability: f64,
    pub fidelity: f64,
    pub correction_applied: String,
}

impl From<&BranchRecord> for BranchJson {
    fn from(b: &BranchRecord) -> Self {
        Self {
            outcome: b.outcome,
            probability: b.probability,
            fidelity: b.fidelity,
            correction_applied: b.correction_applied.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionJson {
    pub exponent: f64,
    pub prefactor: f64,
    pub r2: f64,
}

impl From<PowerLawFit> for RegressionJson {
    fn from(f: PowerLawFit) -> Self {
        Self {
            exponent: f.exponent,
            prefactor: f.prefactor,
            r2: f.r2,
        }
    }
}

/// CSV with header `n,lambda2,gap,iterations`.
pub fn gap_csv(records: &[GapEstimate]) -> String {
    let mut s = String::from("n,lambda2,gap,iterations\n");
    for r in records {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.n, r.lambda2, r.gap, r.iterations
        ));
    }
    s
}

/// Whitespace-separated `n gap` columns for plotting.
pub fn gap_dat(records: &[GapEstimate]) -> String {
    let mut s = String::from("# n gap\n");
    for r in records {
        s.push_str(&format!("{} {}\n", r.n, r.gap));
    }
    s
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn load_design(path: &Path) -> Result<WeightedUnitarySet> {
    read_json::<DesignJson>(path)?.to_design()
}

pub fn save_design(path: &Path, d: &WeightedUnitarySet) -> Result<()> {
    write_json(path, &DesignJson::from_design(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::find_channel_design;
    use crate::mes::{build_phi, random_joint_state};
    use crate::rng::seeded;

    #[test]
    fn state_roundtrip_is_bit_exact() {
        let s = random_joint_state(3, &mut seeded(1));
        let text = to_json(&StateJson::from_state(&s)).unwrap();
        let back: StateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_state().unwrap(), s);
    }

    #[test]
    fn phi_json_has_square_amplitudes() {
        let j = StateJson::from_state(&build_phi::<f64>(4).unwrap());
        assert_eq!(j.amplitudes.len() * j.amplitudes[0].len(), 25);
    }

    #[test]
    fn design_roundtrip_is_bit_exact() {
        let d = find_channel_design(1, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("design.json");
        save_design(&p, &d).unwrap();
        assert_eq!(load_design(&p).unwrap(), d);
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let j = DesignJson {
            kind: "other".into(),
            n: 1,
            rho: None,
            entries: vec![],
        };
        assert!(matches!(j.to_design(), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn csv_header() {
        let r = GapEstimate {
            n: 2,
            lambda2: 0.25,
            gap: 0.75,
            iterations: 3,
            residual: 0.0,
        };
        assert_eq!(gap_csv(&[r]), "n,lambda2,gap,iterations\n2,0.25,0.75,3\n");
    }
}
