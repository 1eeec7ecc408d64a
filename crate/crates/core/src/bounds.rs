//! Per-case trace bounds and the density lower bounds built from them.
//!
//! Every non-tempered case forces some trace (of the class, of its exterior
//! square, or of the exterior square with one character summand removed) to
//! be large once a parameter leaves `[1/r, r]`. Ramakrishnan's bound
//! `δ({|a_v| > k}) ≤ 1/k²` for cuspidal objects then caps the density of each
//! case, and the theorem calculators combine the caps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::class::{SatakeClass, Scalar, MATCH_TOL};
use crate::classifier::CaseLabel;
use crate::error::{contract, Error, Result};
use crate::lifts::{exterior_square, remove_summand};

/// `m = r + 1/r`, the value of `Q_t` on the boundary of `S(r)`.
pub fn m_of_r(r: f64) -> f64 {
    r + 1.0 / r
}

/// `Q_a = q^a + q^-a`.
pub fn q_sum(a: f64, q: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(contract(format!("q must exceed 1, got {q}")));
    }
    Ok(q.powf(a) + q.powf(-a))
}

/// Lower density of `{v : |a_v| ≤ k}` for a cuspidal representation: `max(0, 1 - 1/k²)`.
pub fn ramakrishnan_density(k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(contract(format!("k must be positive, got {k}")));
    }
    Ok((1.0 - 1.0 / (k * k)).max(0.0))
}

/// Closed forms in `m` that appear as trace lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundFormula {
    MMinus2,
    TwoTimesMMinus1,
    MSquaredMinus2,
    TwoTimesMMinus2,
    TwoMMinus3,
    MMinus1,
    M,
    MSquaredMinus3,
    TwoMMinus1,
}

impl BoundFormula {
    pub fn eval(self, m: f64) -> f64 {
        match self {
            BoundFormula::MMinus2 => m - 2.0,
            BoundFormula::TwoTimesMMinus1 => 2.0 * (m - 1.0),
            BoundFormula::MSquaredMinus2 => m * m - 2.0,
            BoundFormula::TwoTimesMMinus2 => 2.0 * (m - 2.0),
            BoundFormula::TwoMMinus3 => 2.0 * m - 3.0,
            BoundFormula::MMinus1 => m - 1.0,
            BoundFormula::M => m,
            BoundFormula::MSquaredMinus3 => m * m - 3.0,
            BoundFormula::TwoMMinus1 => 2.0 * m - 1.0,
        }
    }

    pub fn expr(self) -> &'static str {
        match self {
            BoundFormula::MMinus2 => "m-2",
            BoundFormula::TwoTimesMMinus1 => "2(m-1)",
            BoundFormula::MSquaredMinus2 => "m^2-2",
            BoundFormula::TwoTimesMMinus2 => "2(m-2)",
            BoundFormula::TwoMMinus3 => "2m-3",
            BoundFormula::MMinus1 => "m-1",
            BoundFormula::M => "m",
            BoundFormula::MSquaredMinus3 => "m^2-3",
            BoundFormula::TwoMMinus1 => "2m-1",
        }
    }
}

impl fmt::Display for BoundFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.expr())
    }
}

/// The object whose trace is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    /// The class itself.
    SelfRep,
    /// Its exterior square.
    Ext2,
    /// The exterior square with the character summand `ω` removed.
    R5,
}

/// The character `ω` split off from `Λ²` to leave the degree 5 piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Summand {
    /// `ω = η⁻¹` (so `ω = 1` when `η = 1`).
    EtaInverse,
    Trivial,
}

impl Summand {
    pub fn value(self, eta: Option<Scalar>) -> Scalar {
        match (self, eta) {
            (Summand::EtaInverse, Some(eta)) => eta.inv(),
            _ => Scalar::new(1.0, 0.0),
        }
    }
}

/// How the listed bounds combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Combine {
    /// Every listed bound holds.
    All,
    /// At least one branch holds for each class.
    AnyBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSource {
    /// As stated for the case.
    Stated,
    /// A sharper per-case value following from the same trace expression.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    pub target: Target,
    pub formula: BoundFormula,
    pub source: BoundSource,
    /// `formula` evaluated at the requested `m`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceBoundSpec {
    pub case: CaseLabel,
    pub m: f64,
    pub combine: Combine,
    pub bounds: Vec<BoundTerm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summand: Option<Summand>,
    pub cuspidality_note: String,
}

impl TraceBoundSpec {
    /// Bounds flagged as the stated (unified) values.
    pub fn stated(&self) -> impl Iterator<Item = &BoundTerm> {
        self.bounds
            .iter()
            .filter(|b| b.source == BoundSource::Stated)
    }
}

/// Guaranteed strict lower bound(s) on the trace of the relevant object, for classes of `case`
/// with a parameter of modulus above `r` where `m = r + 1/r`.
pub fn trace_bound(case: CaseLabel, m: f64) -> Result<TraceBoundSpec> {
    use BoundFormula::*;
    use BoundSource::*;
    use CaseLabel::*;
    use Target::*;
    if !(m >= 2.0) {
        return Err(contract(format!("m must be at least 2, got {m}")));
    }
    let term = |target, formula: BoundFormula, source| BoundTerm {
        target,
        formula,
        source,
        value: formula.eval(m),
    };
    let (combine, bounds, summand, note) = match case {
        Tempered => return Err(Error::NoBoundForTempered),
        G4I => (
            Combine::All,
            vec![term(SelfRep, MMinus2, Stated)],
            None,
            "the representation is cuspidal",
        ),
        G4II => (
            Combine::All,
            vec![term(Ext2, TwoTimesMMinus1, Stated)],
            None,
            "exterior square cuspidal when not essentially self-dual and without self-twist",
        ),
        Esd1 => (
            Combine::All,
            vec![
                term(Ext2, MSquaredMinus2, Stated),
                term(R5, TwoMMinus3, Stated),
                term(R5, MSquaredMinus3, Derived),
            ],
            Some(Summand::EtaInverse),
            "degree 5 summand cuspidal for symplectic type without self-twist",
        ),
        Esd2aI | Esd2aII | Esd2bI => (
            Combine::All,
            vec![term(SelfRep, MMinus2, Stated)],
            None,
            "the representation is cuspidal",
        ),
        Esd2bII => (
            Combine::All,
            vec![
                term(Ext2, TwoTimesMMinus2, Stated),
                term(R5, TwoMMinus3, Stated),
                term(R5, TwoMMinus1, Derived),
            ],
            Some(Summand::EtaInverse),
            "degree 5 summand cuspidal for symplectic type without self-twist",
        ),
        SdI | SdIII => (
            Combine::All,
            vec![term(Ext2, M, Stated), term(R5, MMinus1, Stated)],
            Some(Summand::Trivial),
            "degree 5 summand cuspidal; omega trivial for trivial central character",
        ),
        SdII => (
            Combine::AnyBranch,
            vec![term(SelfRep, MMinus1, Stated), term(R5, MMinus1, Stated)],
            Some(Summand::Trivial),
            "branch on u(v + conj v) >= -1: the representation, otherwise the degree 5 summand",
        ),
        SdQuadNeg => (
            Combine::All,
            vec![term(SelfRep, M, Stated)],
            None,
            "the representation is cuspidal",
        ),
        G3Std => (
            Combine::All,
            vec![term(SelfRep, MMinus1, Derived)],
            None,
            "the representation is cuspidal",
        ),
    };
    Ok(TraceBoundSpec {
        case,
        m,
        combine,
        bounds,
        summand,
        cuspidality_note: note.to_owned(),
    })
}

/// `|trace|` of the target object built from `class`.
pub fn target_trace(
    target: Target,
    class: &SatakeClass,
    summand: Option<Summand>,
    eta: Option<Scalar>,
) -> Result<f64> {
    Ok(match target {
        Target::SelfRep => class.trace().norm(),
        Target::Ext2 => exterior_square(class)?.trace().norm(),
        Target::R5 => {
            let omega = summand
                .ok_or_else(|| contract("R5 target needs a summand rule"))?
                .value(eta);
            remove_summand(&exterior_square(class)?, omega, MATCH_TOL)?
                .trace()
                .norm()
        }
    })
}

/// Smallest `|trace| - bound` over the relevant bounds (largest over branches for `AnyBranch`).
pub fn bound_margin(
    spec: &TraceBoundSpec,
    class: &SatakeClass,
    eta: Option<Scalar>,
) -> Result<f64> {
    let mut margins = Vec::with_capacity(spec.bounds.len());
    for b in &spec.bounds {
        margins.push(target_trace(b.target, class, spec.summand, eta)? - b.value);
    }
    let fold = match spec.combine {
        Combine::All => margins.into_iter().fold(f64::INFINITY, f64::min),
        Combine::AnyBranch => margins.into_iter().fold(f64::NEG_INFINITY, f64::max),
    };
    Ok(fold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// GL(4) not of type (T); `c = 1` when essentially self-dual.
    T1,
    /// Self-dual GL(4) not of type (T), by central character.
    T2,
    /// GL(4) of type (T).
    T3,
    /// GL(3), uniform interval around 1.
    T4,
    /// Self-dual GL(3).
    GL3SelfDual,
    /// Ramanujan primes for self-dual GL(4) with non-trivial central character.
    CorollaryQuarter,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::T1,
        Theorem::T2,
        Theorem::T3,
        Theorem::T4,
        Theorem::GL3SelfDual,
        Theorem::CorollaryQuarter,
    ];

    /// Degree of the representations the theorem is about.
    pub fn degree(self) -> usize {
        match self {
            Theorem::T4 | Theorem::GL3SelfDual => 3,
            _ => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Theorem::T1 => "t1",
            Theorem::T2 => "t2",
            Theorem::T3 => "t3",
            Theorem::T4 => "t4",
            Theorem::GL3SelfDual => "gl3-self-dual",
            Theorem::CorollaryQuarter => "corollary-quarter",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Theorem::ALL
            .into_iter()
            .find(|t| t.as_str() == key)
            .or(match key.as_str() {
                "gl3selfdual" | "gl3-sd" => Some(Theorem::GL3SelfDual),
                "corollaryquarter" | "quarter" => Some(Theorem::CorollaryQuarter),
                _ => None,
            })
            .ok_or_else(|| contract(format!("unknown theorem {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Character {
    #[default]
    Trivial,
    Quadratic,
}

impl FromStr for Character {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trivial" => Ok(Character::Trivial),
            "quadratic" => Ok(Character::Quadratic),
            _ => Err(contract(format!("unknown central character {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeT {
    AsaiDihedral,
    Ai,
    Tensor,
    #[default]
    Overall,
}

impl TypeT {
    pub const ALL: [TypeT; 4] = [
        TypeT::AsaiDihedral,
        TypeT::Ai,
        TypeT::Tensor,
        TypeT::Overall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TypeT::AsaiDihedral => "asai_dihedral",
            TypeT::Ai => "ai",
            TypeT::Tensor => "tensor",
            TypeT::Overall => "overall",
        }
    }
}

impl FromStr for TypeT {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        TypeT::ALL
            .into_iter()
            .find(|t| t.as_str() == key)
            .ok_or_else(|| contract(format!("unknown type (T) subtype {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TheoremOptions {
    /// 1 when essentially self-dual (T1 only).
    pub c: u8,
    pub character: Character,
    pub subtype: TypeT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub cases: Vec<String>,
    /// Upper bound on the density of the exceptional set covered by `cases`.
    pub cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportFlag {
    /// A bound denominator vanished; its cap was replaced by the trivial cap 1.
    DegenerateDenominator { term: String },
    /// `1 - Σ caps` was negative and the bound was clamped to 0.
    Clamped { raw: f64 },
    /// A quoted numerical remark disagrees with direct evaluation of the formula.
    RemarkDiscrepancy {
        quoted: f64,
        computed: f64,
        note: String,
    },
    /// Fixed weights used without derivation.
    CharacterSignSplit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub theorem: Theorem,
    pub r: f64,
    pub m: f64,
    pub contributions: Vec<Contribution>,
    /// `1 - Σ caps`, before clamping.
    pub raw_bound: f64,
    pub lower_bound: f64,
    pub closed_form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<ReportFlag>,
}

fn labels(ls: &[CaseLabel]) -> Vec<String> {
    ls.iter().map(|l| l.as_str().to_owned()).collect()
}

/// `1/k²`, or the trivial cap 1 with a flag when `k` is not positive.
fn inverse_square_cap(k: f64, term: &str, flags: &mut Vec<ReportFlag>) -> f64 {
    if k > 0.0 {
        1.0 / (k * k)
    } else {
        flags.push(ReportFlag::DegenerateDenominator {
            term: term.to_owned(),
        });
        1.0
    }
}

/// Endpoints `(1/x, x)` with `x = (r+1)/2 + sqrt(((r+1)/2)² - 1)`.
pub fn t4_interval(r: f64) -> Result<(f64, f64)> {
    if !(r >= 1.0) {
        return Err(contract(format!("r must be at least 1, got {r}")));
    }
    let half = (r + 1.0) / 2.0;
    let high = half + (half * half - 1.0).max(0.0).sqrt();
    Ok((1.0 / high, high))
}

/// Density lower bound of `theorem` at radius `r`.
pub fn theorem_bound(theorem: Theorem, r: f64, opts: &TheoremOptions) -> Result<DensityReport> {
    use CaseLabel::*;
    if !(r >= 1.0) || !r.is_finite() {
        return Err(contract(format!("r must be a finite value >= 1, got {r}")));
    }
    let mut flags = Vec::new();
    let mut interval = None;
    // theorems about Ramanujan primes only live at r = 1
    let r = match theorem {
        Theorem::T3 | Theorem::GL3SelfDual | Theorem::CorollaryQuarter => 1.0,
        _ => r,
    };
    let m = m_of_r(r);

    let (contributions, closed_form): (Vec<Contribution>, String) = match theorem {
        Theorem::T1 => {
            if opts.c > 1 {
                return Err(contract(format!("c must be 0 or 1, got {}", opts.c)));
            }
            let c = f64::from(opts.c);
            let (first, second) = if opts.c == 0 {
                (labels(&[G4I]), labels(&[G4II]))
            } else {
                (labels(&[Esd2aI, Esd2aII, Esd2bI]), labels(&[Esd1, Esd2bII]))
            };
            let a = inverse_square_cap(m - 2.0, "m-2", &mut flags);
            let b = inverse_square_cap(2.0 * m - 2.0 - c, "2m-2-c", &mut flags);
            (
                vec![
                    Contribution {
                        cases: first,
                        cap: a,
                    },
                    Contribution {
                        cases: second,
                        cap: b,
                    },
                ],
                format!("1 - (1/(m-2)^2 + 1/(2m-2-c)^2), c = {}", opts.c),
            )
        }
        Theorem::T2 => match opts.character {
            Character::Trivial => {
                let a = inverse_square_cap(m - 1.0, "m-1", &mut flags);
                if (r - 3.0).abs() < 1e-12 {
                    flags.push(ReportFlag::RemarkDiscrepancy {
                        quoted: 0.82,
                        computed: 1.0 - 2.0 * a,
                        note: "the remark quotes a value above 0.82 at r = 3; the formula gives 1 - 18/49"
                            .into(),
                    });
                }
                (
                    vec![
                        Contribution {
                            cases: vec!["SD_II (|a(Pi)| > m-1 branch)".into()],
                            cap: a,
                        },
                        Contribution {
                            cases: vec![
                                "SD_I".into(),
                                "SD_III".into(),
                                "SD_II (|a(r5)| > m-1 branch)".into(),
                            ],
                            cap: a,
                        },
                    ],
                    "1 - 2/(m-1)^2".into(),
                )
            }
            Character::Quadratic => {
                flags.push(ReportFlag::CharacterSignSplit);
                let a = inverse_square_cap(m - 1.0, "m-1", &mut flags);
                let b = inverse_square_cap(m, "m", &mut flags);
                (
                    vec![
                        Contribution {
                            cases: labels(&[SdI, SdII, SdIII]),
                            cap: (2.0 * a).min(0.5),
                        },
                        Contribution {
                            cases: labels(&[SdQuadNeg]),
                            cap: b,
                        },
                    ],
                    "(1/2 - min{1/2, 2/(m-1)^2}) + (1/2 - 1/m^2)".into(),
                )
            }
        },
        Theorem::CorollaryQuarter => {
            flags.push(ReportFlag::CharacterSignSplit);
            (
                vec![
                    Contribution {
                        cases: labels(&[SdI, SdII, SdIII]),
                        cap: 0.5,
                    },
                    Contribution {
                        cases: labels(&[SdQuadNeg]),
                        cap: 0.25,
                    },
                ],
                "(1/2 - min{1/2, 2/(m-1)^2}) + (1/2 - 1/m^2) at r = 1".into(),
            )
        }
        Theorem::T3 => {
            let pi_exc = 1.0 / 35.0;
            match opts.subtype {
                TypeT::AsaiDihedral => (Vec::new(), "1".into()),
                TypeT::Tensor => (
                    vec![
                        Contribution {
                            cases: vec!["pi_1 non-Ramanujan".into()],
                            cap: pi_exc,
                        },
                        Contribution {
                            cases: vec!["pi_2 non-Ramanujan".into()],
                            cap: pi_exc,
                        },
                    ],
                    "1 - 2/35 = 33/35".into(),
                ),
                TypeT::Ai | TypeT::Overall => (
                    vec![
                        Contribution {
                            cases: vec!["inert places".into()],
                            cap: 0.5,
                        },
                        Contribution {
                            cases: vec!["split places, pi_w1 or pi_w2 non-Ramanujan".into()],
                            cap: 0.5 * 2.0 * pi_exc,
                        },
                    ],
                    "1/2 * 33/35 = 33/70".into(),
                ),
            }
        }
        Theorem::T4 => {
            interval = Some(t4_interval(r)?);
            (
                vec![Contribution {
                    cases: labels(&[G3Std]),
                    cap: 1.0 / (r * r),
                }],
                "1 - 1/r^2".into(),
            )
        }
        Theorem::GL3SelfDual => (
            vec![Contribution {
                cases: vec!["underlying GL(2) non-Ramanujan".into()],
                cap: 1.0 / 35.0,
            }],
            "34/35".into(),
        ),
    };

    let raw_bound = 1.0 - contributions.iter().map(|c| c.cap).sum::<f64>();
    let lower_bound = if raw_bound < 0.0 {
        flags.push(ReportFlag::Clamped { raw: raw_bound });
        0.0
    } else {
        raw_bound.min(1.0)
    };
    Ok(DensityReport {
        theorem,
        r,
        m,
        contributions,
        raw_bound,
        lower_bound,
        closed_form,
        interval,
        flags,
    })
}

/// One report per grid point `r_min, r_min + step, ...` up to `r_max`.
pub fn sweep(
    theorem: Theorem,
    r_min: f64,
    r_max: f64,
    step: f64,
    opts: &TheoremOptions,
) -> Result<Vec<DensityReport>> {
    if !(r_min >= 1.0 && r_max >= r_min && r_max.is_finite()) {
        return Err(contract(format!("bad grid [{r_min}, {r_max}]")));
    }
    if !(step > 0.0) {
        return Err(contract(format!("step must be positive, got {step}")));
    }
    let points = ((r_max - r_min) / step + 1e-9).floor() as usize + 1;
    if points > 1_000_000 {
        return Err(contract(format!("grid of {points} points is too large")));
    }
    (0..points)
        .map(|i| theorem_bound(theorem, r_min + i as f64 * step, opts))
        .collect()
}

/// Sweep table as CSV with header `r,m,lower_bound,closed_form`.
pub fn sweep_csv(reports: &[DensityReport]) -> String {
    let mut out = String::from("r,m,lower_bound,closed_form\n");
    for rep in reports {
        out.push_str(&format!(
            "{},{},{},\"{}\"\n",
            rep.r,
            rep.m,
            rep.lower_bound,
            rep.closed_form.replace('"', "\"\"")
        ));
    }
    out
}

/// Smallest `r` at which the unclamped bound becomes positive, by bisection.
pub fn positivity_threshold(theorem: Theorem, opts: &TheoremOptions) -> Result<f64> {
    let raw = |r: f64| theorem_bound(theorem, r, opts).map(|rep| rep.raw_bound);
    if raw(1.0)? > 0.0 {
        return Ok(1.0);
    }
    let mut hi = 2.0;
    while raw(hi)? <= 0.0 {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(contract(format!("{theorem} bound never becomes positive")));
        }
    }
    let mut lo = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if raw(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> TheoremOptions {
        TheoremOptions::default()
    }

    #[test]
    fn q_sum_examples() {
        assert_eq!(q_sum(0.0, 7.0).unwrap(), 2.0);
        assert_eq!(q_sum(1.0, 2.0).unwrap(), 2.5);
        for a in [0.3, 1.7, -2.2] {
            assert_eq!(q_sum(a, 3.0).unwrap(), q_sum(-a, 3.0).unwrap());
            assert!(q_sum(a, 3.0).unwrap() >= 2.0);
        }
        assert!(q_sum(1.0, 1.0).is_err());
    }

    #[test]
    fn ramakrishnan_examples() {
        assert_eq!(ramakrishnan_density(2.0).unwrap(), 0.75);
        assert_eq!(ramakrishnan_density(1.0).unwrap(), 0.0);
        let m = m_of_r(4.0);
        let d = ramakrishnan_density(m - 2.0).unwrap();
        assert!((d - (1.0 - 1.0 / 5.0625)).abs() < 1e-12);
        assert!((d - 0.8024691).abs() < 1e-7);
        assert!(ramakrishnan_density(0.0).is_err());
        for k in [1.0, 1.5, 3.0, 17.0] {
            assert!((ramakrishnan_density(k).unwrap() + 1.0 / (k * k) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn trace_bound_table() {
        let m = 3.0;
        let g4i = trace_bound(CaseLabel::G4I, m).unwrap();
        assert_eq!(g4i.bounds[0].target, Target::SelfRep);
        assert_eq!(g4i.bounds[0].value, 1.0);
        let g4ii = trace_bound(CaseLabel::G4II, m).unwrap();
        assert_eq!(g4ii.bounds[0].target, Target::Ext2);
        assert_eq!(g4ii.bounds[0].value, 4.0);
        let quad = trace_bound(CaseLabel::SdQuadNeg, m).unwrap();
        assert_eq!(quad.bounds[0].formula, BoundFormula::M);
        assert_eq!(quad.bounds[0].target, Target::SelfRep);
        let sd2 = trace_bound(CaseLabel::SdII, m).unwrap();
        assert_eq!(sd2.combine, Combine::AnyBranch);
        let esd1 = trace_bound(CaseLabel::Esd1, m).unwrap();
        let stated: Vec<_> = esd1.stated().map(|b| b.formula).collect();
        assert_eq!(
            stated,
            vec![BoundFormula::MSquaredMinus2, BoundFormula::TwoMMinus3]
        );
        assert!(matches!(
            trace_bound(CaseLabel::Tempered, m),
            Err(Error::NoBoundForTempered)
        ));
        assert!(trace_bound(CaseLabel::G4I, 1.5).is_err());
    }

    #[test]
    fn theorem_one_at_r4() {
        let rep = theorem_bound(Theorem::T1, 4.0, &opts()).unwrap();
        assert!((rep.lower_bound - 0.7788005).abs() < 1e-6);
        assert!((rep.lower_bound - (1.0 - (1.0 / 5.0625 + 1.0 / 42.25))).abs() < 1e-15);
        assert!(rep.lower_bound > 0.77);
    }

    #[test]
    fn theorem_one_degenerate_at_r1() {
        let rep = theorem_bound(Theorem::T1, 1.0, &opts()).unwrap();
        assert_eq!(rep.lower_bound, 0.0);
        assert!(rep
            .flags
            .iter()
            .any(|f| matches!(f, ReportFlag::DegenerateDenominator { .. })));
    }

    #[test]
    fn essentially_self_dual_bound_is_weaker() {
        for r in [2.7, 3.0, 4.0, 10.0, 100.0] {
            let c0 = theorem_bound(Theorem::T1, r, &opts()).unwrap().raw_bound;
            let c1 = theorem_bound(Theorem::T1, r, &TheoremOptions { c: 1, ..opts() })
                .unwrap()
                .raw_bound;
            assert!(c1 <= c0);
        }
    }

    #[test]
    fn quadratic_character_corollary() {
        let o = TheoremOptions {
            character: Character::Quadratic,
            ..opts()
        };
        assert_eq!(
            theorem_bound(Theorem::T2, 1.0, &o).unwrap().lower_bound,
            0.25
        );
        assert_eq!(
            theorem_bound(Theorem::CorollaryQuarter, 1.0, &opts())
                .unwrap()
                .lower_bound,
            0.25
        );
    }

    #[test]
    fn trivial_character_remark_is_flagged() {
        let rep = theorem_bound(Theorem::T2, 3.0, &opts()).unwrap();
        assert!((rep.lower_bound - (1.0 - 18.0 / 49.0)).abs() < 1e-15);
        assert!(rep
            .flags
            .iter()
            .any(|f| matches!(f, ReportFlag::RemarkDiscrepancy { quoted, .. } if *quoted == 0.82)));
        let rep = theorem_bound(Theorem::T2, 4.0, &opts()).unwrap();
        assert!(rep.flags.is_empty());
    }

    #[test]
    fn type_t_constants() {
        let get = |s| {
            theorem_bound(
                Theorem::T3,
                1.0,
                &TheoremOptions {
                    subtype: s,
                    ..opts()
                },
            )
            .unwrap()
            .lower_bound
        };
        assert_eq!(get(TypeT::AsaiDihedral), 1.0);
        assert!((get(TypeT::Ai) - 33.0 / 70.0).abs() < 1e-15);
        assert!((get(TypeT::Tensor) - 33.0 / 35.0).abs() < 1e-15);
        assert!((get(TypeT::Overall) - 33.0 / 70.0).abs() < 1e-15);
    }

    #[test]
    fn gl3_bounds() {
        let rep = theorem_bound(Theorem::T4, 3.0, &opts()).unwrap();
        assert!((rep.lower_bound - 8.0 / 9.0).abs() < 1e-15);
        let (lo, hi) = rep.interval.unwrap();
        assert!((lo - (2.0 - 3f64.sqrt())).abs() < 1e-12);
        assert!((hi - (2.0 + 3f64.sqrt())).abs() < 1e-12);
        assert_eq!(t4_interval(1.0).unwrap(), (1.0, 1.0));
        assert!(t4_interval(0.9).is_err());
        let sd = theorem_bound(Theorem::GL3SelfDual, 1.0, &opts()).unwrap();
        assert!((sd.lower_bound - 34.0 / 35.0).abs() < 1e-15);
    }

    #[test]
    fn t4_endpoints_are_reciprocal() {
        for i in 0..200 {
            let r = 1.0 + 0.37 * i as f64;
            let (lo, hi) = t4_interval(r).unwrap();
            assert!((lo * hi - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reports_close_over_contributions() {
        for th in Theorem::ALL {
            for r in [1.0, 1.5, 2.66, 3.0, 8.0] {
                let rep = theorem_bound(th, r, &opts()).unwrap();
                let sum: f64 = rep.contributions.iter().map(|c| c.cap).sum();
                assert_eq!(rep.raw_bound, 1.0 - sum);
                assert!((0.0..=1.0).contains(&rep.lower_bound));
                assert_eq!(rep.m, rep.r + 1.0 / rep.r);
            }
        }
        assert!(theorem_bound(Theorem::T1, 0.5, &opts()).is_err());
        assert!(theorem_bound(Theorem::T1, 3.0, &TheoremOptions { c: 2, ..opts() }).is_err());
    }

    #[test]
    fn sweep_examples() {
        let reps = sweep(Theorem::T4, 1.0, 3.0, 1.0, &opts()).unwrap();
        let got: Vec<f64> = reps.iter().map(|r| r.lower_bound).collect();
        assert_eq!(got.len(), 3);
        assert_eq!(got[0], 0.0);
        assert_eq!(got[1], 0.75);
        assert!((got[2] - 8.0 / 9.0).abs() < 1e-15);

        let reps = sweep(Theorem::T1, 3.0, 5.0, 1.0, &opts()).unwrap();
        assert!(reps.windows(2).all(|w| w[0].lower_bound < w[1].lower_bound));

        let reps = sweep(Theorem::T1, 1.0, 4.0, 0.01, &opts()).unwrap();
        let first = reps.iter().find(|r| r.lower_bound > 0.0).unwrap();
        assert!((2.6..=2.7).contains(&first.r), "{}", first.r);

        assert!(sweep(Theorem::T1, 0.5, 2.0, 0.1, &opts()).is_err());
        assert!(sweep(Theorem::T1, 2.0, 1.5, 0.1, &opts()).is_err());
        assert!(sweep(Theorem::T1, 1.0, 2.0, 0.0, &opts()).is_err());
    }

    #[test]
    fn sweeps_are_monotone() {
        let quad = TheoremOptions {
            character: Character::Quadratic,
            ..opts()
        };
        for (th, o) in [
            (Theorem::T1, opts()),
            (Theorem::T1, TheoremOptions { c: 1, ..opts() }),
            (Theorem::T2, opts()),
            (Theorem::T2, quad),
            (Theorem::T4, opts()),
        ] {
            let reps = sweep(th, 1.0, 20.0, 0.05, &o).unwrap();
            assert!(reps
                .windows(2)
                .all(|w| w[0].lower_bound <= w[1].lower_bound));
        }
    }

    #[test]
    fn positivity_thresholds() {
        let t1 = positivity_threshold(Theorem::T1, &opts()).unwrap();
        assert!((2.5..=2.8).contains(&t1));
        assert!((t1 - 2.66).abs() < 0.01);
        let t2 = positivity_threshold(Theorem::T2, &opts()).unwrap();
        assert!((t2 - 1.88).abs() < 0.01);
    }

    #[test]
    fn csv_layout() {
        let reps = sweep(Theorem::T4, 1.0, 2.0, 1.0, &opts()).unwrap();
        let csv = sweep_csv(&reps);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "r,m,lower_bound,closed_form");
        assert_eq!(lines[2], "2,2.5,0.75,\"1 - 1/r^2\"");
    }
}
