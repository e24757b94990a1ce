//! Mamdani fuzzy inference: trapezoidal membership functions, a conjunctive
//! rule base over linguistic terms, min implication, max aggregation, and
//! centroid defuzzification on a sampled output domain.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trapezoid with vertices a <= b <= c <= d; a triangle has b == c.
/// Membership is 0 outside [a, d], 1 on [b, c], linear on the shoulders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipFunction {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MembershipFunction {
    pub fn trapezoid(a: f64, b: f64, c: f64, d: f64) -> Self {
        debug_assert!(a <= b && b <= c && c <= d);
        Self { a, b, c, d }
    }

    pub fn triangle(a: f64, b: f64, c: f64) -> Self {
        Self::trapezoid(a, b, b, c)
    }

    pub fn membership(&self, x: f64) -> f64 {
        if x < self.a || x > self.d {
            0.0
        } else if x >= self.b && x <= self.c {
            1.0
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.d - x) / (self.d - self.c)
        }
    }

    fn ordered(&self) -> bool {
        self.a <= self.b && self.b <= self.c && self.c <= self.d
    }
}

/// A named linguistic term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyTerm {
    pub name: String,
    pub mf: MembershipFunction,
}

/// A variable with a real domain and an ordered list of terms covering it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyVariable {
    pub name: String,
    pub domain: [f64; 2],
    pub terms: Vec<FuzzyTerm>,
}

impl FuzzyVariable {
    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.domain[0], self.domain[1])
    }

    fn validate(&self) -> Result<()> {
        let [lo, hi] = self.domain;
        if !(lo < hi) {
            return Err(Error::InvalidFis(format!(
                "variable {}: empty domain [{lo}, {hi}]",
                self.name
            )));
        }
        if self.terms.len() < 2 {
            return Err(Error::InvalidFis(format!(
                "variable {}: needs at least 2 terms",
                self.name
            )));
        }
        for t in &self.terms {
            if !t.mf.ordered() {
                return Err(Error::InvalidFis(format!(
                    "variable {} term {}: vertices out of order",
                    self.name, t.name
                )));
            }
            if t.mf.a < lo - 1e-12 || t.mf.d > hi + 1e-12 {
                return Err(Error::InvalidFis(format!(
                    "variable {} term {}: vertices outside the domain",
                    self.name, t.name
                )));
            }
        }
        // coverage: every domain point must activate some term
        const PROBES: usize = 1001;
        for i in 0..PROBES {
            let x = lo + (hi - lo) * i as f64 / (PROBES - 1) as f64;
            if !self.terms.iter().any(|t| t.mf.membership(x) > 0.0) {
                return Err(Error::InvalidFis(format!(
                    "variable {}: no term covers x = {x}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Conjunctive rule: one term index per input variable, one consequent term
/// index on the output variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyRule {
    pub antecedent: Vec<usize>,
    pub consequent: usize,
    /// Set to "inferred" on rules whose consequent is not pinned down by
    /// domain knowledge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// How a tuned system was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningProvenance {
    pub mode: String,
    pub seed: u64,
    pub iterations: usize,
    pub final_rmse: f64,
}

/// A complete Mamdani system. Serializes to JSON so tuned systems are
/// persistable and diffable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FISConfig {
    pub inputs: Vec<FuzzyVariable>,
    pub output: FuzzyVariable,
    pub rules: Vec<FuzzyRule>,
    pub defuzz_resolution: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<TuningProvenance>,
}

impl FISConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::InvalidFis("no input variables".to_string()));
        }
        for v in &self.inputs {
            v.validate()?;
        }
        self.output.validate()?;
        if self.defuzz_resolution < 101 {
            return Err(Error::InvalidFis(format!(
                "defuzz_resolution {} < 101",
                self.defuzz_resolution
            )));
        }
        for (i, r) in self.rules.iter().enumerate() {
            if r.antecedent.len() != self.inputs.len() {
                return Err(Error::InvalidFis(format!(
                    "rule {i}: antecedent arity {} != {} inputs",
                    r.antecedent.len(),
                    self.inputs.len()
                )));
            }
            for (v, &term) in self.inputs.iter().zip(&r.antecedent) {
                if term >= v.terms.len() {
                    return Err(Error::InvalidFis(format!(
                        "rule {i}: term index {term} out of range for {}",
                        v.name
                    )));
                }
            }
            if r.consequent >= self.output.terms.len() {
                return Err(Error::InvalidFis(format!(
                    "rule {i}: consequent index {} out of range",
                    r.consequent
                )));
            }
        }
        // completeness over the antecedent grid
        let mut combo = vec![0usize; self.inputs.len()];
        loop {
            if !self.rules.iter().any(|r| r.antecedent == combo) {
                return Err(Error::InvalidFis(format!(
                    "no rule covers antecedent combination {combo:?}"
                )));
            }
            let mut k = 0;
            loop {
                combo[k] += 1;
                if combo[k] < self.inputs[k].terms.len() {
                    break;
                }
                combo[k] = 0;
                k += 1;
                if k == self.inputs.len() {
                    return Ok(());
                }
            }
        }
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|v| v.name == name)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(s: &str) -> Result<FISConfig> {
        let fis: FISConfig = serde_json::from_str(s)?;
        fis.validate()?;
        Ok(fis)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut body = self.to_json_string()?;
        body.push('\n');
        fs::write(path, body).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<FISConfig> {
        let body = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&body)
    }
}

/// Uniformly spread three-term layout over a domain: on width W, low is a
/// trapezoid pinned to the left edge, medium a centered triangle, high a
/// trapezoid pinned to the right edge, with generous overlaps.
fn three_terms(lo: f64, hi: f64) -> Vec<FuzzyTerm> {
    let w = hi - lo;
    vec![
        FuzzyTerm {
            name: "low".to_string(),
            mf: MembershipFunction::trapezoid(lo, lo, lo + 0.2 * w, lo + 0.45 * w),
        },
        FuzzyTerm {
            name: "medium".to_string(),
            mf: MembershipFunction::triangle(lo + 0.3 * w, lo + 0.5 * w, lo + 0.7 * w),
        },
        FuzzyTerm {
            name: "high".to_string(),
            mf: MembershipFunction::trapezoid(lo + 0.55 * w, lo + 0.8 * w, hi, hi),
        },
    ]
}

const LOW: usize = 0;
const MEDIUM: usize = 1;
const HIGH: usize = 2;

/// The handcrafted system: inputs are the frame-mean depth discrepancy on
/// [-1, 1] and the frame-mean IoU on [0, 1], output is risk on [0, 1].
/// High discrepancy always means high risk; for medium and low discrepancy
/// the risk depends on the IoU. Two cells are not pinned down by domain
/// knowledge and are flagged as inferred.
pub fn default_fis() -> FISConfig {
    let rule = |rdd: usize, iou_t: usize, risk: usize, inferred: bool| FuzzyRule {
        antecedent: vec![rdd, iou_t],
        consequent: risk,
        provenance: inferred.then(|| "inferred".to_string()),
    };
    let fis = FISConfig {
        inputs: vec![
            FuzzyVariable {
                name: "rdd".to_string(),
                domain: [-1.0, 1.0],
                terms: three_terms(-1.0, 1.0),
            },
            FuzzyVariable {
                name: "iou".to_string(),
                domain: [0.0, 1.0],
                terms: three_terms(0.0, 1.0),
            },
        ],
        output: FuzzyVariable {
            name: "risk".to_string(),
            domain: [0.0, 1.0],
            terms: three_terms(0.0, 1.0),
        },
        rules: vec![
            rule(HIGH, LOW, HIGH, false),
            rule(HIGH, MEDIUM, HIGH, false),
            rule(HIGH, HIGH, HIGH, false),
            rule(MEDIUM, HIGH, LOW, false),
            rule(MEDIUM, MEDIUM, LOW, true),
            rule(MEDIUM, LOW, MEDIUM, false),
            rule(LOW, HIGH, LOW, false),
            rule(LOW, MEDIUM, MEDIUM, true),
            rule(LOW, LOW, MEDIUM, false),
        ],
        defuzz_resolution: 1001,
        provenance: None,
    };
    debug_assert!(fis.validate().is_ok());
    fis
}

/// Reusable inference state: output-term memberships pre-sampled on the
/// defuzzification grid. Cheap to build, and amortized when one system is
/// evaluated across a whole dataset.
pub struct InferenceEngine<'a> {
    fis: &'a FISConfig,
    samples: Vec<f64>,
    term_grids: Vec<Vec<f64>>,
}

impl<'a> InferenceEngine<'a> {
    pub fn new(fis: &'a FISConfig) -> Result<Self> {
        fis.validate()?;
        Ok(Self::new_unchecked(fis))
    }

    pub(crate) fn new_unchecked(fis: &'a FISConfig) -> Self {
        let [lo, hi] = fis.output.domain;
        let n = fis.defuzz_resolution;
        let samples: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let term_grids = fis
            .output
            .terms
            .iter()
            .map(|t| samples.iter().map(|&x| t.mf.membership(x)).collect())
            .collect();
        Self {
            fis,
            samples,
            term_grids,
        }
    }

    /// Firing strength of every rule for the given (clamped) inputs.
    fn rule_strengths(&self, inputs: &[f64]) -> Vec<f64> {
        let memberships: Vec<Vec<f64>> = self
            .fis
            .inputs
            .iter()
            .zip(inputs)
            .map(|(v, &x)| {
                let cx = v.clamp(x);
                v.terms.iter().map(|t| t.mf.membership(cx)).collect()
            })
            .collect();
        self.fis
            .rules
            .iter()
            .map(|r| {
                r.antecedent
                    .iter()
                    .enumerate()
                    .map(|(vi, &ti)| memberships[vi][ti])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Mamdani inference: min conjunction, min implication, max
    /// aggregation, centroid defuzzification. Zero aggregate mass falls
    /// back to the domain midpoint.
    pub fn infer(&self, inputs: &[f64]) -> f64 {
        assert_eq!(inputs.len(), self.fis.inputs.len(), "input arity mismatch");
        let strengths = self.rule_strengths(inputs);
        // max-min distributes: aggregate per output term at the max
        // strength among rules sharing that consequent
        let mut clip = vec![0.0f64; self.fis.output.terms.len()];
        for (r, &s) in self.fis.rules.iter().zip(&strengths) {
            if s > clip[r.consequent] {
                clip[r.consequent] = s;
            }
        }
        self.defuzzify(&clip)
    }

    pub(crate) fn defuzzify(&self, clip: &[f64]) -> f64 {
        let mut mass = 0.0;
        let mut moment = 0.0;
        for (i, &x) in self.samples.iter().enumerate() {
            let mut mu: f64 = 0.0;
            for (t, &c) in clip.iter().enumerate() {
                if c > 0.0 {
                    mu = mu.max(self.term_grids[t][i].min(c));
                }
            }
            mass += mu;
            moment += x * mu;
        }
        if mass == 0.0 {
            let [lo, hi] = self.fis.output.domain;
            (lo + hi) / 2.0
        } else {
            moment / mass
        }
    }
}

/// One-shot inference. Builds a fresh engine; prefer [`InferenceEngine`]
/// when evaluating many inputs against the same system.
pub fn infer(fis: &FISConfig, inputs: &[f64]) -> Result<f64> {
    Ok(InferenceEngine::new(fis)?.infer(inputs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_membership_shape() {
        let mf = MembershipFunction::triangle(0.0, 0.5, 1.0);
        assert_eq!(mf.membership(0.5), 1.0);
        assert_eq!(mf.membership(0.25), 0.5);
        assert_eq!(mf.membership(-0.1), 0.0);
        assert_eq!(mf.membership(1.1), 0.0);
        assert_eq!(mf.membership(0.0), 0.0);
    }

    #[test]
    fn degenerate_shoulders() {
        // vertical left shoulder: plateau starts at the edge
        let mf = MembershipFunction::trapezoid(0.0, 0.0, 0.2, 0.45);
        assert_eq!(mf.membership(0.0), 1.0);
        assert_eq!(mf.membership(0.45), 0.0);
        let spike = MembershipFunction::trapezoid(0.3, 0.3, 0.3, 0.3);
        assert_eq!(spike.membership(0.3), 1.0);
        assert_eq!(spike.membership(0.31), 0.0);
    }

    #[test]
    fn single_rule_centroid() {
        let fis = FISConfig {
            inputs: vec![FuzzyVariable {
                name: "x".to_string(),
                domain: [0.0, 1.0],
                terms: vec![
                    FuzzyTerm {
                        name: "off".to_string(),
                        mf: MembershipFunction::trapezoid(0.0, 0.0, 0.0, 0.5),
                    },
                    FuzzyTerm {
                        name: "on".to_string(),
                        mf: MembershipFunction::trapezoid(0.0, 0.5, 1.0, 1.0),
                    },
                ],
            }],
            output: FuzzyVariable {
                name: "y".to_string(),
                domain: [0.0, 1.0],
                terms: vec![
                    FuzzyTerm {
                        name: "lo".to_string(),
                        mf: MembershipFunction::trapezoid(0.0, 0.0, 0.25, 0.5),
                    },
                    FuzzyTerm {
                        name: "hi".to_string(),
                        mf: MembershipFunction::triangle(0.5, 0.75, 1.0),
                    },
                ],
            },
            rules: vec![
                FuzzyRule {
                    antecedent: vec![0],
                    consequent: 0,
                    provenance: None,
                },
                FuzzyRule {
                    antecedent: vec![1],
                    consequent: 1,
                    provenance: None,
                },
            ],
            defuzz_resolution: 1001,
            provenance: None,
        };
        // at x = 1 only the second rule fires, at strength 1: the output is
        // the centroid of the symmetric triangle (0.5, 0.75, 1.0)
        let y = infer(&fis, &[1.0]).unwrap();
        assert!((y - 0.75).abs() < 1e-9, "{y}");
    }

    #[test]
    fn mirror_symmetric_rules_yield_midpoint() {
        let term = |a: f64, b: f64, c: f64| FuzzyTerm {
            name: format!("t{a}"),
            mf: MembershipFunction::triangle(a, b, c),
        };
        let fis = FISConfig {
            inputs: vec![FuzzyVariable {
                name: "x".to_string(),
                domain: [0.0, 1.0],
                terms: vec![
                    term(0.0, 0.0, 1.0),
                    term(0.0, 1.0, 1.0),
                ],
            }],
            output: FuzzyVariable {
                name: "y".to_string(),
                domain: [0.0, 1.0],
                terms: vec![term(0.0, 0.25, 0.5), term(0.5, 0.75, 1.0)],
            },
            rules: vec![
                FuzzyRule {
                    antecedent: vec![0],
                    consequent: 0,
                    provenance: None,
                },
                FuzzyRule {
                    antecedent: vec![1],
                    consequent: 1,
                    provenance: None,
                },
            ],
            defuzz_resolution: 1001,
            provenance: None,
        };
        // both rules fire at strength 0.5; consequents mirror about 0.5
        let y = infer(&fis, &[0.5]).unwrap();
        assert!((y - 0.5).abs() < 1e-9, "{y}");
    }

    #[test]
    fn default_system_rule_grid_is_complete() {
        let fis = default_fis();
        fis.validate().unwrap();
        assert_eq!(fis.rules.len(), 9);
        let inferred = fis
            .rules
            .iter()
            .filter(|r| r.provenance.as_deref() == Some("inferred"))
            .count();
        assert_eq!(inferred, 2);
    }

    #[test]
    fn default_system_corner_behavior() {
        let fis = default_fis();
        let engine = InferenceEngine::new(&fis).unwrap();
        assert!(engine.infer(&[0.9, 0.05]) >= 0.7);
        assert!(engine.infer(&[-0.9, 0.9]) <= 0.35);
    }

    #[test]
    fn infer_stays_in_domain_for_random_inputs() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let fis = default_fis();
        let engine = InferenceEngine::new(&fis).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            // deliberately sample beyond the domains; inputs clamp
            let r = engine.infer(&[rng.random_range(-1.5..1.5), rng.random_range(-0.5..1.5)]);
            assert!((0.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn infer_is_continuous_along_rdd() {
        let fis = default_fis();
        let engine = InferenceEngine::new(&fis).unwrap();
        for iou_pct in [0usize, 50, 100] {
            let iou = iou_pct as f64 / 100.0;
            let mut prev = None;
            for i in 0..=200 {
                let rdd = -1.0 + 2.0 * i as f64 / 200.0;
                let y = engine.infer(&[rdd, iou]);
                if let Some(p) = prev {
                    assert!(
                        (y - p as f64).abs() < 0.05,
                        "jump at rdd={rdd}, iou={iou}"
                    );
                }
                prev = Some(y);
            }
        }
    }

    #[test]
    fn incomplete_rule_grid_rejected() {
        let mut fis = default_fis();
        fis.rules.pop();
        assert!(matches!(fis.validate(), Err(Error::InvalidFis(_))));
    }

    #[test]
    fn coverage_gap_rejected() {
        let mut fis = default_fis();
        // shrink "medium" and pull "low"/"high" apart to open a gap
        fis.inputs[1].terms[0].mf = MembershipFunction::trapezoid(0.0, 0.0, 0.1, 0.2);
        fis.inputs[1].terms[1].mf = MembershipFunction::triangle(0.25, 0.3, 0.35);
        fis.inputs[1].terms[2].mf = MembershipFunction::trapezoid(0.8, 0.9, 1.0, 1.0);
        assert!(matches!(fis.validate(), Err(Error::InvalidFis(_))));
    }

    #[test]
    fn json_round_trip_preserves_the_system() {
        let fis = default_fis();
        let json = fis.to_json_string().unwrap();
        let back = FISConfig::from_json_str(&json).unwrap();
        assert_eq!(back, fis);
        assert!(json.contains("\"provenance\": \"inferred\""));
    }
}
