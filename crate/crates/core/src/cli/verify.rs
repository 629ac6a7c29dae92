//! Self-check of the code: codewords, correction tables and the
//! recover-any-input property over seeded random inputs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::losscode::{
    codewords, correction_tables, decode, derive_correction_table, encode, recover_forced,
    PauliWord, CODEWORD_KETS, DATA_QUBITS,
};
use crate::simcore::PureState;

pub const DEFAULT_STATES: u64 = 100;
const FIDELITY_TOL: f64 = 1e-10;
const EXACT_TOL: f64 = 1e-12;
/// Expected corrections for a loss on the lowest rail, outcomes 00..11.
pub const REFERENCE_TABLE: [PauliWord; 4] =
    [PauliWord::I, PauliWord::X, PauliWord::Z, PauliWord::XZ];
const REFERENCE_POSITION: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub property: &'static str,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss_position: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logical_amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub property: &'static str,
    pub cases: u64,
    pub passed: bool,
    /// Largest deviation seen, in the property's own units.
    pub worst_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub states: u64,
    pub properties: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn first_failure(&self) -> Option<&Counterexample> {
        self.properties
            .iter()
            .find_map(|p| p.counterexample.as_ref())
    }
}

struct Check {
    property: &'static str,
    cases: u64,
    worst: f64,
    tol: f64,
    counterexample: Option<Counterexample>,
}

impl Check {
    fn new(property: &'static str, tol: f64) -> Self {
        Self {
            property,
            cases: 0,
            worst: 0.0,
            tol,
            counterexample: None,
        }
    }

    /// Records one case; `make` builds the counterexample on the first miss.
    fn case(&mut self, deviation: f64, make: impl FnOnce() -> Counterexample) {
        self.cases += 1;
        if deviation.is_nan() || deviation > self.worst {
            self.worst = deviation;
        }
        if (deviation.is_nan() || deviation > self.tol) && self.counterexample.is_none() {
            self.counterexample = Some(make());
        }
    }

    fn fail(&mut self, detail: String) {
        let property = self.property;
        self.case(f64::INFINITY, || Counterexample {
            property,
            detail,
            state_index: None,
            loss_position: None,
            outcome: None,
            logical_amplitudes: None,
        });
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            property: self.property,
            cases: self.cases,
            passed: self.counterexample.is_none(),
            worst_deviation: self.worst,
            counterexample: self.counterexample,
        }
    }
}

fn plain(property: &'static str, detail: String) -> Counterexample {
    Counterexample {
        property,
        detail,
        state_index: None,
        loss_position: None,
        outcome: None,
        logical_amplitudes: None,
    }
}

fn amplitudes(state: &PureState<f64>) -> Vec<[f64; 2]> {
    state.amplitudes().iter().map(|a| [a.re, a.im]).collect()
}

fn bits(outcome: [bool; 2]) -> String {
    outcome.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

const OUTCOMES: [[bool; 2]; 4] = [[false, false], [false, true], [true, false], [true, true]];

fn codeword_table() -> PropertyResult {
    let mut check = Check::new("codeword_table", EXACT_TOL);
    for (k, kets) in CODEWORD_KETS.iter().enumerate() {
        let expected = PureState::<f64>::from_kets(&[(1.0, kets[0]), (1.0, kets[1])]);
        let got = PureState::<f64>::basis(2, k).and_then(|b| encode(&b));
        match (expected, got) {
            (Ok(e), Ok(g)) => {
                let dev = g.max_abs_diff(&e);
                check.case(dev, || {
                    plain(
                        "codeword_table",
                        format!("basis {k:02b}: max |Δamplitude| = {dev:e}"),
                    )
                });
            }
            (Err(e), _) | (_, Err(e)) => check.fail(e.to_string()),
        }
    }
    check.finish()
}

fn orthonormality() -> PropertyResult {
    let mut check = Check::new("codeword_orthonormality", EXACT_TOL);
    let words = codewords::<f64>();
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            let dev = a
                .state
                .inner(&b.state)
                .map_or(f64::INFINITY, |z| (z - target).norm());
            check.case(dev, || {
                plain(
                    "codeword_orthonormality",
                    format!("<c{i}|c{j}> off by {dev:e}"),
                )
            });
        }
    }
    check.finish()
}

fn reference_table() -> PropertyResult {
    let mut check = Check::new("reference_correction_table", 0.0);
    match derive_correction_table(REFERENCE_POSITION) {
        Ok(table) => {
            for (k, (&got, &want)) in table.entries.iter().zip(&REFERENCE_TABLE).enumerate() {
                let dev = if got == want { 0.0 } else { 1.0 };
                check.case(dev, || Counterexample {
                    outcome: Some(format!("{k:02b}")),
                    loss_position: Some(REFERENCE_POSITION),
                    ..plain(
                        "reference_correction_table",
                        format!("derived {got}, expected {want}"),
                    )
                });
            }
        }
        Err(e) => check.fail(e.to_string()),
    }
    check.finish()
}

fn all_tables() -> PropertyResult {
    let mut check = Check::new("correction_tables_derivable", 0.0);
    for pos in 0..DATA_QUBITS {
        match derive_correction_table(pos) {
            Ok(_) => check.case(0.0, || unreachable!()),
            Err(e) => check.fail(format!("loss position {pos}: {e}")),
        }
    }
    check.finish()
}

/// Random inputs × loss positions × forced outcomes: corrected fidelity,
/// outcome probability, and decoded logical state.
fn recovery_properties(states: u64, seed: u64) -> Vec<PropertyResult> {
    let mut fidelity = Check::new("recovery_fidelity", FIDELITY_TOL);
    let mut uniform = Check::new("outcome_uniformity", EXACT_TOL);
    let mut decoded = Check::new("decode_round_trip", FIDELITY_TOL);
    if let Err(e) = correction_tables() {
        fidelity.fail(e.to_string());
        return vec![fidelity.finish(), uniform.finish(), decoded.finish()];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for index in 0..states {
        let logical = match PureState::<f64>::random(2, &mut rng) {
            Ok(s) => s,
            Err(e) => {
                fidelity.fail(e.to_string());
                break;
            }
        };
        let cx = |property: &'static str,
                  pos: usize,
                  outcome: Option<[bool; 2]>,
                  detail: String| Counterexample {
            property,
            detail,
            state_index: Some(index),
            loss_position: Some(pos),
            outcome: outcome.map(bits),
            logical_amplitudes: Some(amplitudes(&logical)),
        };
        let encoded = match encode(&logical) {
            Ok(e) => e,
            Err(e) => {
                fidelity.fail(e.to_string());
                continue;
            }
        };
        match decode(&encoded).and_then(|d| d.fidelity(&logical)) {
            Ok(f) => decoded.case(1.0 - f, || {
                cx("decode_round_trip", 0, None, format!("fidelity {f}"))
            }),
            Err(e) => decoded.fail(e.to_string()),
        }
        for pos in 0..DATA_QUBITS {
            let damaged = match encoded.to_density().partial_trace(pos) {
                Ok(d) => d,
                Err(e) => {
                    fidelity.fail(e.to_string());
                    continue;
                }
            };
            for outcome in OUTCOMES {
                match recover_forced(&damaged, pos, outcome) {
                    Ok(o) => {
                        let p = o.measurement.probability;
                        uniform.case((p - 0.25).abs(), || {
                            cx(
                                "outcome_uniformity",
                                pos,
                                Some(outcome),
                                format!("probability {p}"),
                            )
                        });
                        let f = o.corrected_state.fidelity(&encoded).unwrap_or(f64::NAN);
                        fidelity.case(1.0 - f, || {
                            cx(
                                "recovery_fidelity",
                                pos,
                                Some(outcome),
                                format!("fidelity {f}"),
                            )
                        });
                    }
                    Err(e) => fidelity.case(f64::INFINITY, || {
                        cx("recovery_fidelity", pos, Some(outcome), e.to_string())
                    }),
                }
            }
        }
    }
    vec![fidelity.finish(), uniform.finish(), decoded.finish()]
}

pub fn run_suite(states: u64, seed: u64) -> VerifyReport {
    let mut properties = vec![
        codeword_table(),
        orthonormality(),
        reference_table(),
        all_tables(),
    ];
    properties.extend(recovery_properties(states, seed));
    VerifyReport {
        seed,
        states,
        properties,
    }
}

/// Correction the derived table applies for one loss position and outcome.
pub fn lookup(loss_position: usize, outcome: [bool; 2]) -> Result<PauliWord> {
    let tables = correction_tables()?;
    match tables.get(loss_position) {
        Some(t) => Ok(t.correction(&outcome)),
        None => crate::error::domain(format!(
            "loss position {loss_position} outside 0..{DATA_QUBITS}"
        )),
    }
}

pub fn parse_outcome(s: &str) -> Option<[bool; 2]> {
    let b: Vec<bool> = s
        .chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect::<Option<_>>()?;
    <[bool; 2]>::try_from(b).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = run_suite(3, 1);
        assert!(report.passed(), "{report:#?}");
        let fid = report
            .properties
            .iter()
            .find(|p| p.property == "recovery_fidelity")
            .unwrap();
        assert_eq!(fid.cases, 3 * 16);
    }

    #[test]
    fn outcome_parsing() {
        assert_eq!(parse_outcome("01"), Some([false, true]));
        assert_eq!(parse_outcome("2"), None);
        assert_eq!(parse_outcome("011"), None);
    }

    #[test]
    fn reference_lookup() {
        assert_eq!(lookup(3, [false, true]).unwrap(), PauliWord::X);
        assert!(lookup(4, [false, false]).is_err());
    }
}
