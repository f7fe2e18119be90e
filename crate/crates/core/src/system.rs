//! Control systems `ẋ = Ax + Σ Bᵢx uᵢ`, their file format, and piecewise-constant schedules.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{expm_skew, operator_norm, ComplexMatrix, C64, SKEW_TOL};

/// Allowed deviation of `‖A‖` from 1.
pub const DRIFT_NORM_TOL: f64 = 1e-8;

/// Validated system: skew-Hermitian drift of operator norm 1 and a nonempty list of
/// skew-Hermitian controls, all `n × n`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumSystem {
    n: usize,
    drift: ComplexMatrix,
    controls: Vec<ComplexMatrix>,
}

impl QuantumSystem {
    pub fn new(drift: ComplexMatrix, controls: Vec<ComplexMatrix>) -> Result<Self> {
        let n = drift.rows();
        if !drift.is_square() || n == 0 {
            return Err(Error::Input(format!(
                "drift must be a nonempty square matrix, got {}×{}",
                drift.rows(),
                drift.cols()
            )));
        }
        if controls.is_empty() {
            return Err(Error::Input(
                "at least one control matrix is required".into(),
            ));
        }
        for (i, b) in controls.iter().enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(Error::Input(format!(
                    "control {i} is {}×{}, expected {n}×{n}",
                    b.rows(),
                    b.cols()
                )));
            }
            b.ensure_skew_hermitian(SKEW_TOL, &format!("control {i}"))
                .map_err(to_input)?;
        }
        drift
            .ensure_skew_hermitian(SKEW_TOL, "drift")
            .map_err(to_input)?;
        let norm = operator_norm(&drift)?;
        if (norm - 1.0).abs() > DRIFT_NORM_TOL {
            return Err(Error::Input(format!(
                "drift has operator norm {norm:.12}, expected 1 (use --normalize to rescale)"
            )));
        }
        Ok(Self { n, drift, controls })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn drift(&self) -> &ComplexMatrix {
        &self.drift
    }

    pub fn controls(&self) -> &[ComplexMatrix] {
        &self.controls
    }

    /// `A + Σ uᵢBᵢ`.
    pub fn generator(&self, u: &[f64]) -> Result<ComplexMatrix> {
        if u.len() != self.controls.len() {
            return Err(Error::Usage(format!(
                "{} control values given for {} controls",
                u.len(),
                self.controls.len()
            )));
        }
        let mut m = self.drift.clone();
        for (b, &ui) in self.controls.iter().zip(u) {
            m.axpy(C64::new(ui, 0.0), b);
        }
        Ok(m)
    }
}

fn to_input(e: Error) -> Error {
    match e {
        Error::Domain(msg) | Error::Usage(msg) => Error::Input(msg),
        other => other,
    }
}

/// JSON entry `{"re": …, "im": …}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

/// On-disk layout of a system: row-major nested arrays of complex entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub n: usize,
    pub drift: Vec<Vec<ComplexEntry>>,
    pub controls: Vec<Vec<Vec<ComplexEntry>>>,
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<ComplexEntry>> {
    m.to_rows()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|z| ComplexEntry { re: z.re, im: z.im })
                .collect()
        })
        .collect()
}

fn rows_to_matrix(rows: &[Vec<ComplexEntry>], n: usize, what: &str) -> Result<ComplexMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Input(format!("{what} is not {n}×{n}")));
    }
    let data: Vec<C64> = rows
        .iter()
        .flatten()
        .map(|e| C64::new(e.re, e.im))
        .collect();
    if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Input(format!("{what} has a non-finite entry")));
    }
    ComplexMatrix::new(n, n, data).map_err(to_input)
}

impl SystemFile {
    pub fn from_system(system: &QuantumSystem) -> Self {
        Self {
            n: system.n,
            drift: matrix_to_rows(&system.drift),
            controls: system.controls.iter().map(matrix_to_rows).collect(),
        }
    }

    /// Builds the system, rescaling the drift to norm 1 when `normalize` is set.
    /// Returns the notes produced by rescaling.
    pub fn into_system(self, normalize: bool) -> Result<(QuantumSystem, Vec<String>)> {
        if self.n == 0 {
            return Err(Error::Input("n must be positive".into()));
        }
        let mut drift = rows_to_matrix(&self.drift, self.n, "drift")?;
        let controls = self
            .controls
            .iter()
            .enumerate()
            .map(|(i, rows)| rows_to_matrix(rows, self.n, &format!("control {i}")))
            .collect::<Result<Vec<_>>>()?;
        let mut notes = Vec::new();
        if normalize {
            drift
                .ensure_skew_hermitian(SKEW_TOL, "drift")
                .map_err(to_input)?;
            let norm = operator_norm(&drift)?;
            if norm == 0.0 {
                return Err(Error::Input(
                    "drift is zero and cannot be normalized".into(),
                ));
            }
            if (norm - 1.0).abs() > DRIFT_NORM_TOL {
                drift = drift.scale_real(1.0 / norm);
                notes.push(format!(
                    "drift rescaled by factor {:.12e} to operator norm 1",
                    1.0 / norm
                ));
            }
        }
        Ok((QuantumSystem::new(drift, controls)?, notes))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("cannot parse {}: {e}", path.display())))
}

/// Reads and validates a system file.
pub fn load_system(path: &Path, normalize: bool) -> Result<(QuantumSystem, Vec<String>)> {
    read_json::<SystemFile>(path)?.into_system(normalize)
}

/// One constancy interval of a control schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub duration: f64,
    pub controls: Vec<f64>,
}

/// Piecewise-constant controls, applied from `t = 0` in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSchedule {
    pub segments: Vec<Segment>,
}

impl ControlSchedule {
    pub fn validate(&self, controls: usize) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Usage("control schedule has no segments".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(Error::Usage(format!(
                    "segment {i} has duration {}",
                    s.duration
                )));
            }
            if s.controls.len() != controls {
                return Err(Error::Usage(format!(
                    "segment {i} has {} control values, system has {controls}",
                    s.controls.len()
                )));
            }
            if s.controls.iter().any(|u| !u.is_finite()) {
                return Err(Error::Usage(format!(
                    "segment {i} has a non-finite control value"
                )));
            }
        }
        Ok(())
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Propagator from `t0` to `t1` (`t0 ≤ t1`), by exact exponentials on each
    /// constancy interval.
    pub fn propagator(&self, system: &QuantumSystem, t0: f64, t1: f64) -> Result<ComplexMatrix> {
        let mut u = ComplexMatrix::identity(system.n());
        let mut start = 0.0;
        for s in &self.segments {
            let end = start + s.duration;
            let a = t0.max(start);
            let b = t1.min(end);
            if b > a {
                let step = expm_skew(&system.generator(&s.controls)?, b - a)?;
                u = &step * &u;
            }
            start = end;
            if start >= t1 {
                break;
            }
        }
        Ok(u)
    }
}

pub fn load_schedule(path: &Path) -> Result<ControlSchedule> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::I;

    fn diag_drift() -> ComplexMatrix {
        ComplexMatrix::from_diag(&[I, -I])
    }

    fn su2_controls() -> Vec<ComplexMatrix> {
        crate::repkit::su_standard(2).unwrap()
    }

    #[test]
    fn valid_system() {
        let s = QuantumSystem::new(diag_drift(), su2_controls()).unwrap();
        assert_eq!(s.n(), 2);
        let g = s.generator(&[1.0, 0.0, 0.0]).unwrap();
        assert!(g.skew_residual() < 1e-15);
        assert!(s.generator(&[1.0]).is_err());
    }

    #[test]
    fn rejects_bad_drift_norm() {
        let err = QuantumSystem::new(diag_drift().scale_real(2.0), su2_controls()).unwrap_err();
        assert!(matches!(err, Error::Input(ref m) if m.contains("norm 2.0")));
        let file = SystemFile {
            n: 2,
            drift: matrix_to_rows(&diag_drift().scale_real(2.0)),
            controls: su2_controls().iter().map(matrix_to_rows).collect(),
        };
        assert!(file.clone().into_system(false).is_err());
        let (sys, notes) = file.into_system(true).unwrap();
        assert!((operator_norm(sys.drift()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(notes.len(), 1);
        assert!(notes[0].contains("5.000000000000e-1"));
    }

    #[test]
    fn rejects_hermitian_control() {
        let herm = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let err =
            QuantumSystem::new(diag_drift(), vec![su2_controls()[0].clone(), herm]).unwrap_err();
        assert!(
            matches!(err, Error::Input(ref m) if m.contains("control 1") && m.contains("skew"))
        );
    }

    #[test]
    fn rejects_malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.json");
        std::fs::write(&p, "{\"n\": 2, \"drift\": []}").unwrap();
        assert!(matches!(load_system(&p, false), Err(Error::Input(_))));
        std::fs::write(
            &p,
            "{\"n\": 2, \"drift\": [[{\"re\":0,\"im\":1}]], \"controls\": []}",
        )
        .unwrap();
        assert!(matches!(load_system(&p, false), Err(Error::Input(_))));
        assert!(matches!(
            load_system(&dir.path().join("missing.json"), false),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn file_round_trip() {
        let s = QuantumSystem::new(diag_drift(), su2_controls()).unwrap();
        let text = serde_json::to_string(&SystemFile::from_system(&s)).unwrap();
        let back: SystemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_system(false).unwrap().0, s);
    }

    #[test]
    fn schedule_propagation() {
        let s = QuantumSystem::new(diag_drift(), su2_controls()).unwrap();
        let sched = ControlSchedule {
            segments: vec![
                Segment {
                    duration: 0.5,
                    controls: vec![1.0, 0.0, 0.0],
                },
                Segment {
                    duration: 1.0,
                    controls: vec![0.0, -1.0, 0.5],
                },
            ],
        };
        sched.validate(3).unwrap();
        assert!(sched.validate(2).is_err());
        assert_eq!(sched.total_duration(), 1.5);
        let full = sched.propagator(&s, 0.0, 1.5).unwrap();
        let split =
            &sched.propagator(&s, 0.7, 1.5).unwrap() * &sched.propagator(&s, 0.0, 0.7).unwrap();
        assert!(full.max_abs_diff(&split) < 1e-10);
        assert!(full.unitarity_residual() < 1e-10);
        let zero = ControlSchedule {
            segments: vec![Segment {
                duration: 2.0,
                controls: vec![0.0; 3],
            }],
        };
        let u = zero.propagator(&s, 0.0, 1.0).unwrap();
        assert!((u[(0, 0)] - C64::new(1f64.cos(), 1f64.sin())).norm() < 1e-12);
    }
}
