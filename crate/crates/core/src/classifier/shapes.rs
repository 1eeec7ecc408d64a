//! Case labels, their witnesses, and the class shape each label describes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::class::{pair, Scalar};
use crate::error::{contract, Error, Result};

/// Structural case realised by a (non-)tempered class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    Tempered,
    /// `{uq^t, uq^-t, γ, δ}`, `|γ| = |δ| = 1`.
    #[serde(rename = "G4_I")]
    G4I,
    /// `{uq^t, uq^-t, vq^s, vq^-s}`, `t, s > 0` (`s = 0` accepted as a boundary instance).
    #[serde(rename = "G4_II")]
    G4II,
    /// `{uq^t, ūη̄q^-t, ūη̄q^t, uq^-t}` with `η ≠ ū²`.
    #[serde(rename = "ESD_1")]
    Esd1,
    /// `{uq^t, ūη̄q^-t, γ, ±γ}` with `γ²η = 1`.
    #[serde(rename = "ESD_2a_i")]
    Esd2aI,
    /// `{uq^t, uq^-t, v, v̄η̄}`, `|v| = 1`.
    #[serde(rename = "ESD_2a_ii")]
    Esd2aII,
    /// `{α, α⁻¹η̄, γ, γ}` with `γ²η = 1`.
    #[serde(rename = "ESD_2b_i")]
    Esd2bI,
    /// `{uq^t, uq^-t, vq^s, vq^-s}` with `v = ±u`, `η = ū²`, `s ≥ 0`.
    #[serde(rename = "ESD_2b_ii")]
    Esd2bII,
    /// `{uq^t, uq^-t, vq^s, vq^-s}`, `u, v ∈ {±1}`.
    #[serde(rename = "SD_I")]
    SdI,
    /// `{uq^t, uq^-t, β, β⁻¹}`, `u ∈ {±1}`, `|β| = 1`.
    #[serde(rename = "SD_II")]
    SdII,
    /// `{α, α⁻¹, ᾱ, ᾱ⁻¹}`.
    #[serde(rename = "SD_III")]
    SdIII,
    /// `{uq^t, uq^-t, 1, -1}`, `u ∈ {±1}`.
    #[serde(rename = "SD_QuadNeg")]
    SdQuadNeg,
    /// `{α, uq^t, uq^-t}`, `|α| = 1`.
    #[serde(rename = "G3_Std")]
    G3Std,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 13] = [
        CaseLabel::Tempered,
        CaseLabel::G4I,
        CaseLabel::G4II,
        CaseLabel::Esd1,
        CaseLabel::Esd2aI,
        CaseLabel::Esd2aII,
        CaseLabel::Esd2bI,
        CaseLabel::Esd2bII,
        CaseLabel::SdI,
        CaseLabel::SdII,
        CaseLabel::SdIII,
        CaseLabel::SdQuadNeg,
        CaseLabel::G3Std,
    ];

    /// Every label except `Tempered`.
    pub fn non_tempered() -> impl Iterator<Item = CaseLabel> {
        Self::ALL.into_iter().skip(1)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::Tempered => "Tempered",
            CaseLabel::G4I => "G4_I",
            CaseLabel::G4II => "G4_II",
            CaseLabel::Esd1 => "ESD_1",
            CaseLabel::Esd2aI => "ESD_2a_i",
            CaseLabel::Esd2aII => "ESD_2a_ii",
            CaseLabel::Esd2bI => "ESD_2b_i",
            CaseLabel::Esd2bII => "ESD_2b_ii",
            CaseLabel::SdI => "SD_I",
            CaseLabel::SdII => "SD_II",
            CaseLabel::SdIII => "SD_III",
            CaseLabel::SdQuadNeg => "SD_QuadNeg",
            CaseLabel::G3Std => "G3_Std",
        }
    }

    /// The classification mode a non-tempered label belongs to.
    pub fn mode(self) -> Option<Mode> {
        use CaseLabel::*;
        match self {
            Tempered => None,
            G4I | G4II => Some(Mode::General4),
            Esd1 | Esd2aI | Esd2aII | Esd2bI | Esd2bII => Some(Mode::Esd4),
            SdI | SdII | SdIII | SdQuadNeg => Some(Mode::SelfDual4),
            G3Std => Some(Mode::Gl3),
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| contract(format!("unknown case label {s:?}")))
    }
}

/// Which duality constraints the input class is assumed to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Degree 4, closed under `α ↦ 1/ᾱ`.
    General4,
    /// Degree 4, additionally `ηA = A⁻¹` for a unit `η`.
    Esd4,
    /// Degree 4, `A = A⁻¹` (so `η = 1`, `det = ±1`).
    SelfDual4,
    /// Degree 3, closed under `α ↦ 1/ᾱ`.
    Gl3,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::General4, Mode::Esd4, Mode::SelfDual4, Mode::Gl3];

    pub fn degree(self) -> usize {
        match self {
            Mode::Gl3 => 3,
            _ => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::General4 => "general4",
            Mode::Esd4 => "esd4",
            Mode::SelfDual4 => "selfdual4",
            Mode::Gl3 => "gl3",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| contract(format!("unknown mode {s:?}")))
    }
}

/// Named witnesses of a case shape. Exponents are `log_q` of moduli.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "pair::opt")]
    pub u: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "pair::opt")]
    pub v: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "pair::opt")]
    pub gamma: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "pair::opt")]
    pub delta: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "pair::opt")]
    pub alpha: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "pair::opt")]
    pub beta: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "pair::opt")]
    pub eta: Option<Scalar>,
}

fn need<T>(x: Option<T>, name: &str, label: CaseLabel) -> Result<T> {
    x.ok_or_else(|| contract(format!("{label} needs witness {name}")))
}

fn unit(z: Option<Scalar>, name: &str, label: CaseLabel, tol: f64) -> Result<Scalar> {
    let z = need(z, name, label)?;
    if (z.norm() - 1.0).abs() > tol {
        return Err(contract(format!(
            "{label}: witness {name} must have modulus 1"
        )));
    }
    Ok(z)
}

fn sign(z: Option<Scalar>, name: &str, label: CaseLabel, tol: f64) -> Result<Scalar> {
    let z = need(z, name, label)?;
    if (z - 1.0).norm() > tol && (z + 1.0).norm() > tol {
        return Err(contract(format!("{label}: witness {name} must be ±1")));
    }
    Ok(z)
}

fn positive(x: Option<f64>, name: &str, label: CaseLabel) -> Result<f64> {
    let x = need(x, name, label)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(contract(format!(
            "{label}: exponent {name} must be positive"
        )));
    }
    Ok(x)
}

fn non_negative(x: Option<f64>, name: &str, label: CaseLabel) -> Result<f64> {
    let x = need(x, name, label)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(contract(format!(
            "{label}: exponent {name} must be non-negative"
        )));
    }
    Ok(x)
}

fn relation(ok: bool, label: CaseLabel, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(contract(format!("{label}: witnesses violate {what}")))
    }
}

/// A shape instance: the parameters and the twist character (if the label has one).
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub params: Vec<Scalar>,
    pub eta: Option<Scalar>,
}

/// Evaluates a case formula at fully specified witnesses, checking admissibility within `tol`.
pub fn build_shape(label: CaseLabel, w: &Witnesses, q: f64, tol: f64) -> Result<Shape> {
    use CaseLabel::*;
    if !(q > 1.0) {
        return Err(contract(format!("prime norm must exceed 1, got {q}")));
    }
    let one = Scalar::new(1.0, 0.0);
    let qp = |e: f64| q.powf(e);
    let shape = match label {
        Tempered => return Err(contract("the tempered case has no witness formula")),
        G4I => {
            let u = unit(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            let g = unit(w.gamma, "gamma", label, tol)?;
            let d = unit(w.delta, "delta", label, tol)?;
            Shape {
                params: vec![u * qp(t), u * qp(-t), g, d],
                eta: None,
            }
        }
        G4II => {
            let u = unit(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            let v = unit(w.v, "v", label, tol)?;
            // s = 0 is the boundary instance shared with G4_I
            let s = non_negative(w.s, "s", label)?;
            Shape {
                params: vec![u * qp(t), u * qp(-t), v * qp(s), v * qp(-s)],
                eta: None,
            }
        }
        Esd1 => {
            let u = unit(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            let eta = unit(w.eta, "eta", label, tol)?;
            let ue = (u * eta).conj();
            Shape {
                params: vec![u * qp(t), ue * qp(-t), ue * qp(t), u * qp(-t)],
                eta: Some(eta),
            }
        }
        Esd2aI => {
            let u = unit(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            let eta = unit(w.eta, "eta", label, tol)?;
            let g = unit(w.gamma, "gamma", label, tol)?;
            let d = unit(w.delta, "delta", label, tol)?;
            relation(
                (eta - u.conj() * u.conj()).norm() <= tol,
                label,
                "eta = conj(u)^2",
            )?;
            relation((g * g * eta - one).norm() <= tol, label, "gamma^2 eta = 1")?;
            relation(
                (d - g).norm() <= tol || (d + g).norm() <= tol,
                label,
                "delta = ±gamma",
            )?;
            let ue = (u * eta).conj();
            Shape {
                params: vec![u * qp(t), ue * qp(-t), g, d],
                eta: Some(eta),
            }
        }
        Esd2aII => {
            let u = unit(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            let eta = unit(w.eta, "eta", label, tol)?;
            let v = unit(w.v, "v", label, tol)?;
            relation(
                (eta - u.conj() * u.conj()).norm() <= tol,
                label,
                "eta = conj(u)^2",
            )?;
            Shape {
                params: vec![u * qp(t), u * qp(-t), v, (v * eta).conj()],
                eta: Some(eta),
            }
        }
        Esd2bI => {
            let u = unit(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            let eta = unit(w.eta, "eta", label, tol)?;
            let g = unit(w.gamma, "gamma", label, tol)?;
            relation(
                (eta - u.conj() * u.conj()).norm() <= tol,
                label,
                "eta = conj(u)^2",
            )?;
            relation((g * g * eta - one).norm() <= tol, label, "gamma^2 eta = 1")?;
            let alpha = u * qp(t);
            Shape {
                params: vec![alpha, eta.conj() / alpha, g, g],
                eta: Some(eta),
            }
        }
        Esd2bII => {
            let u = unit(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            let eta = unit(w.eta, "eta", label, tol)?;
            let v = unit(w.v, "v", label, tol)?;
            let s = non_negative(w.s, "s", label)?;
            relation(
                (eta - u.conj() * u.conj()).norm() <= tol,
                label,
                "eta = conj(u)^2",
            )?;
            relation(
                (v - u).norm() <= tol || (v + u).norm() <= tol,
                label,
                "v = ±u",
            )?;
            Shape {
                params: vec![u * qp(t), u * qp(-t), v * qp(s), v * qp(-s)],
                eta: Some(eta),
            }
        }
        SdI => {
            let u = sign(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            let v = sign(w.v, "v", label, tol)?;
            let s = non_negative(w.s, "s", label)?;
            Shape {
                params: vec![u * qp(t), u * qp(-t), v * qp(s), v * qp(-s)],
                eta: Some(one),
            }
        }
        SdII => {
            let u = sign(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            let b = unit(w.beta, "beta", label, tol)?;
            Shape {
                params: vec![u * qp(t), u * qp(-t), b, b.inv()],
                eta: Some(one),
            }
        }
        SdIII => {
            let u = unit(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            let a = u * qp(t);
            Shape {
                params: vec![a, a.inv(), a.conj(), a.conj().inv()],
                eta: Some(one),
            }
        }
        SdQuadNeg => {
            let u = sign(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            Shape {
                params: vec![u * qp(t), u * qp(-t), one, -one],
                eta: Some(one),
            }
        }
        G3Std => {
            let a = unit(w.alpha, "alpha", label, tol)?;
            let u = unit(w.u, "u", label, tol)?;
            let t = positive(w.t, "t", label)?;
            Shape {
                params: vec![a, u * qp(t), u * qp(-t)],
                eta: None,
            }
        }
    };
    Ok(shape)
}
