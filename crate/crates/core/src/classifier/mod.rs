//! Case analysis of non-tempered Satake classes.
//!
//! Given a class satisfying the duality constraints of a [`Mode`], the
//! classifier either reports it tempered or finds the first case shape (in
//! precedence order) that reproduces the class, together with witnesses.
//! Matching is done by brute force over parameter orderings: each ordering
//! proposes witnesses, the shape is rebuilt from them and compared with the
//! input as a multiset.

mod generate;
mod shapes;

pub use generate::{generate_case, Generated, Generator};
pub use shapes::{build_shape, CaseLabel, Mode, Shape, Witnesses};

use serde::{Deserialize, Serialize};

use crate::class::{polar, SatakeClass, Scalar};
use crate::error::{contract, Error, Result};
use crate::matching::multiset_match;

/// Default tolerance for structural classification.
pub const CLASSIFY_TOL: f64 = 1e-6;

/// Which duality closures a class satisfies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    /// `{ᾱ} = {α⁻¹}`.
    pub unitary_closed: bool,
    pub unitary_residual: Option<f64>,
    /// `{ηα} = {α⁻¹}`, present when `η` was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twist_dual: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twist_residual: Option<f64>,
    #[serde(with = "crate::class::pair")]
    pub determinant: Scalar,
    /// `w = ±1` when the determinant is within tolerance of a sign.
    pub w: Option<i8>,
}

impl ConstraintReport {
    fn worst_residual(&self) -> f64 {
        self.unitary_residual
            .unwrap_or(0.0)
            .max(self.twist_residual.unwrap_or(0.0))
    }
}

pub fn check_constraints(
    c: &SatakeClass,
    eta: Option<Scalar>,
    tol: f64,
) -> Result<ConstraintReport> {
    let inverse: Vec<Scalar> = c.params().iter().map(|z| z.inv()).collect();
    let conj: Vec<Scalar> = c.params().iter().map(|z| z.conj()).collect();
    let unitary = multiset_match(&conj, &inverse, tol)?;
    let (twist_dual, twist_residual) = match eta {
        Some(eta) => {
            let twisted: Vec<Scalar> = c.params().iter().map(|z| z * eta).collect();
            let m = multiset_match(&twisted, &inverse, tol)?;
            (Some(m.is_some()), m.map(|m| m.max_residual))
        }
        None => (None, None),
    };
    let det = c.determinant();
    let w = if (det - 1.0).norm() <= tol {
        Some(1)
    } else if (det + 1.0).norm() <= tol {
        Some(-1)
    } else {
        None
    };
    Ok(ConstraintReport {
        unitary_closed: unitary.is_some(),
        unitary_residual: unitary.map(|m| m.max_residual),
        twist_dual,
        twist_residual,
        determinant: det,
        w,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub label: CaseLabel,
    pub witnesses: Witnesses,
    /// Largest constraint or shape-matching residual encountered.
    pub residual: f64,
}

impl ClassificationResult {
    /// Rebuilds the class described by the label and witnesses.
    pub fn regenerate(&self, q: f64) -> Result<SatakeClass> {
        let shape = build_shape(self.label, &self.witnesses, q, CLASSIFY_TOL)?;
        SatakeClass::with_prime(shape.params, None, q)
    }
}

/// Case labels tried in order for a mode (and determinant sign in self-dual mode).
///
/// The ESD order follows the derivation, except that the doubled-unit shape
/// `{α, α⁻¹η̄, γ, γ}` is tried before `{.., γ, ±γ}`, which contains it.
pub fn precedence(mode: Mode, w: Option<i8>) -> &'static [CaseLabel] {
    use CaseLabel::*;
    match mode {
        Mode::General4 => &[G4I, G4II],
        Mode::Esd4 => &[Esd1, Esd2bI, Esd2aI, Esd2aII, Esd2bII],
        Mode::SelfDual4 => match w {
            Some(-1) => &[SdQuadNeg],
            _ => &[SdI, SdII, SdIII],
        },
        Mode::Gl3 => &[G3Std],
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn unit_of(z: Scalar) -> Scalar {
    z / z.norm()
}

fn nearest_sign(z: Scalar) -> Scalar {
    if z.re >= 0.0 {
        Scalar::new(1.0, 0.0)
    } else {
        Scalar::new(-1.0, 0.0)
    }
}

/// `±base`, whichever is closer to `z`.
fn nearest_of_pm(z: Scalar, base: Scalar) -> Scalar {
    if (z - base).norm() <= (z + base).norm() {
        base
    } else {
        -base
    }
}

/// Proposes witnesses for `label` reading the parameters in the given order.
fn propose(
    label: CaseLabel,
    p: &[Scalar],
    eta: Option<Scalar>,
    q: f64,
    tol: f64,
) -> Result<Option<Witnesses>> {
    use CaseLabel::*;
    let lead = p[0];
    if lead.norm() <= 1.0 {
        return Ok(None);
    }
    let lp = polar(lead, q)?;
    let (u, t) = (lp.unit, lp.exponent);
    let u_sq_conj = (u * u).conj();
    let case2 = |eta: Scalar| (eta - u_sq_conj).norm() <= tol;
    let w = match label {
        Tempered => return Ok(None),
        G4I => Witnesses {
            u: Some(u),
            t: Some(t),
            gamma: Some(unit_of(p[2])),
            delta: Some(unit_of(p[3])),
            ..Default::default()
        },
        G4II => {
            let pp = polar(p[2], q)?;
            if pp.exponent <= 0.0 {
                return Ok(None);
            }
            Witnesses {
                u: Some(u),
                t: Some(t),
                v: Some(pp.unit),
                s: Some(pp.exponent),
                ..Default::default()
            }
        }
        Esd1 => {
            let eta = eta.ok_or_else(|| contract("ESD shapes need eta"))?;
            if case2(eta) {
                return Ok(None);
            }
            Witnesses {
                u: Some(u),
                t: Some(t),
                eta: Some(eta),
                ..Default::default()
            }
        }
        Esd2aI | Esd2bI => {
            let eta = eta.ok_or_else(|| contract("ESD shapes need eta"))?;
            if !case2(eta) {
                return Ok(None);
            }
            let root = eta.conj().sqrt();
            let gamma = nearest_of_pm(p[2], root);
            let delta = if label == Esd2bI {
                None
            } else {
                Some(nearest_of_pm(p[3], gamma))
            };
            Witnesses {
                u: Some(u),
                t: Some(t),
                gamma: Some(gamma),
                delta,
                eta: Some(eta),
                ..Default::default()
            }
        }
        Esd2aII => {
            let eta = eta.ok_or_else(|| contract("ESD shapes need eta"))?;
            if !case2(eta) {
                return Ok(None);
            }
            Witnesses {
                u: Some(u),
                t: Some(t),
                v: Some(unit_of(p[2])),
                eta: Some(eta),
                ..Default::default()
            }
        }
        Esd2bII => {
            let eta = eta.ok_or_else(|| contract("ESD shapes need eta"))?;
            if !case2(eta) {
                return Ok(None);
            }
            let pp = polar(p[2], q)?;
            Witnesses {
                u: Some(u),
                t: Some(t),
                v: Some(nearest_of_pm(pp.unit, u)),
                s: Some(pp.exponent.abs()),
                eta: Some(eta),
                ..Default::default()
            }
        }
        SdI => {
            let pp = polar(p[2], q)?;
            Witnesses {
                u: Some(nearest_sign(u)),
                t: Some(t),
                v: Some(nearest_sign(pp.unit)),
                s: Some(pp.exponent.abs()),
                ..Default::default()
            }
        }
        SdII => Witnesses {
            u: Some(nearest_sign(u)),
            t: Some(t),
            beta: Some(unit_of(p[2])),
            ..Default::default()
        },
        SdIII => Witnesses {
            u: Some(u),
            t: Some(t),
            ..Default::default()
        },
        SdQuadNeg => Witnesses {
            u: Some(nearest_sign(u)),
            t: Some(t),
            ..Default::default()
        },
        G3Std => Witnesses {
            u: Some(u),
            t: Some(t),
            alpha: Some(unit_of(p[2])),
            ..Default::default()
        },
    };
    Ok(Some(w))
}

/// Best (smallest residual) reading of the class as `label`, if any.
fn match_label(
    label: CaseLabel,
    c: &SatakeClass,
    eta: Option<Scalar>,
    tol: f64,
) -> Result<Option<(Witnesses, f64)>> {
    let q = c.prime_norm();
    let mut best: Option<(Witnesses, f64)> = None;
    for perm in permutations(c.degree()) {
        let p: Vec<Scalar> = perm.iter().map(|&i| c.params()[i]).collect();
        let Some(w) = propose(label, &p, eta, q, tol)? else {
            continue;
        };
        let Ok(shape) = build_shape(label, &w, q, tol) else {
            continue;
        };
        if let Some(m) = multiset_match(c.params(), &shape.params, tol)? {
            if best.as_ref().is_none_or(|(_, r)| m.max_residual < *r) {
                best = Some((w, m.max_residual));
            }
        }
    }
    Ok(best)
}

/// Classifies `c` under the duality constraints of `mode`.
pub fn classify(
    c: &SatakeClass,
    mode: Mode,
    eta: Option<Scalar>,
    tol: f64,
) -> Result<ClassificationResult> {
    if c.degree() != mode.degree() {
        return Err(contract(format!(
            "{mode} mode needs degree {}, got {}",
            mode.degree(),
            c.degree()
        )));
    }
    let eta = match mode {
        Mode::Esd4 => {
            let eta = eta.ok_or_else(|| contract("esd4 mode needs eta"))?;
            if (eta.norm() - 1.0).abs() > tol {
                return Err(contract(format!("eta must have modulus 1, got {eta}")));
            }
            Some(eta)
        }
        Mode::SelfDual4 => {
            if let Some(eta) = eta {
                if (eta - 1.0).norm() > tol {
                    return Err(contract("selfdual4 mode requires eta = 1"));
                }
            }
            Some(Scalar::new(1.0, 0.0))
        }
        Mode::General4 | Mode::Gl3 => None,
    };

    let report = check_constraints(c, eta, tol)?;
    let violated = |detail: &str| Error::ConstraintViolated {
        mode: mode.to_string(),
        detail: detail.to_owned(),
    };
    if !report.unitary_closed {
        return Err(violated("not closed under α ↦ 1/conj(α)"));
    }
    if report.twist_dual == Some(false) {
        return Err(violated("twist by eta does not give the dual class"));
    }
    if mode == Mode::SelfDual4 && report.w.is_none() {
        return Err(violated("determinant is not ±1"));
    }
    let constraint_residual = report.worst_residual();

    if c.in_s_r(1.0, tol)? {
        return Ok(ClassificationResult {
            label: CaseLabel::Tempered,
            witnesses: Witnesses::default(),
            residual: constraint_residual,
        });
    }

    for &label in precedence(mode, report.w) {
        if let Some((witnesses, r)) = match_label(label, c, eta, tol)? {
            return Ok(ClassificationResult {
                label,
                witnesses,
                residual: constraint_residual.max(r),
            });
        }
    }
    Err(Error::Unclassifiable {
        mode: mode.to_string(),
    })
}
