//! Conjugacy classes of Satake parameters and the elementary operations on them.
//!
//! A [`SatakeClass`] is a multiset of nonzero complex numbers attached to an
//! unramified prime of norm `q`. Parameters are stored in canonical order
//! (modulus, argument in `[0, 2π)`, re, im) so that printing, matching and
//! permutation search are deterministic.

use std::cmp::Ordering;
use std::f64::consts::{E, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::matching::{multiset_match, Matching};

/// A complex number. Unit-modulus values (u, v, η, ω, ...) are scalars with `|z| = 1`.
pub type Scalar = Complex64;

/// Default relative tolerance for multiset identities.
pub const MATCH_TOL: f64 = 1e-9;

/// Serde adapter writing a [`Scalar`] as a `[re, im]` pair.
pub mod pair {
    use super::Scalar;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Scalar::new(re, im))
    }

    /// Same as the parent module, for `Option<Scalar>` fields.
    pub mod opt {
        use super::Scalar;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(z: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
            z.map(|z| [z.re, z.im]).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Scalar>, D::Error> {
            Ok(Option::<[f64; 2]>::deserialize(d)?.map(|[re, im]| Scalar::new(re, im)))
        }
    }

    /// Same as the parent module, for `Vec<Scalar>` fields.
    pub mod vec {
        use super::Scalar;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(zs: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
            let pairs: Vec<[f64; 2]> = zs.iter().map(|z| [z.re, z.im]).collect();
            pairs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
            let pairs = Vec::<[f64; 2]>::deserialize(d)?;
            Ok(pairs
                .into_iter()
                .map(|[re, im]| Scalar::new(re, im))
                .collect())
        }
    }
}

/// Argument normalised into `[0, 2π)`.
fn arg_0_tau(z: Scalar) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        let shifted = a + TAU;
        // -0 and tiny negatives round up to exactly TAU
        if shifted >= TAU {
            0.0
        } else {
            shifted
        }
    } else {
        a
    }
}

/// Canonical order on parameters: modulus, then argument in `[0, 2π)`, then re, im.
pub fn canonical_cmp(a: &Scalar, b: &Scalar) -> Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then_with(|| arg_0_tau(*a).total_cmp(&arg_0_tau(*b)))
        .then_with(|| a.re.total_cmp(&b.re))
        .then_with(|| a.im.total_cmp(&b.im))
}

pub(crate) fn canonicalize(params: &mut [Scalar]) {
    params.sort_by(canonical_cmp);
}

pub(crate) fn check_scalar(z: Scalar, what: &str) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(contract(format!("{what} must be finite, got {z}")));
    }
    Ok(())
}

/// Unit part `u` and log-modulus exponent `t` of a parameter: `a = u·q^t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarParam {
    #[serde(with = "pair")]
    pub unit: Scalar,
    pub exponent: f64,
}

impl PolarParam {
    /// `unit · q^exponent`.
    pub fn reconstruct(&self, q: f64) -> Scalar {
        self.unit * q.powf(self.exponent)
    }
}

/// Splits `a` into its unit part and `log_q |a|`.
pub fn polar(a: Scalar, q: f64) -> Result<PolarParam> {
    check_scalar(a, "parameter")?;
    if !(q > 1.0) || !q.is_finite() {
        return Err(contract(format!("prime norm must exceed 1, got {q}")));
    }
    let modulus = a.norm();
    if modulus == 0.0 {
        return Err(contract("cannot take the polar form of zero"));
    }
    Ok(PolarParam {
        unit: a / modulus,
        exponent: modulus.ln() / q.ln(),
    })
}

/// Which elementwise map [`SatakeClass::transform`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    /// `α ↦ α⁻¹`, the contragredient.
    Dual,
    /// `α ↦ ᾱ`.
    Conjugate,
    /// `α ↦ χ·α`.
    Twist,
}

/// The Satake class `A_q(Π)` of a representation at an unramified prime.
#[derive(Debug, Clone, PartialEq)]
pub struct SatakeClass {
    params: Vec<Scalar>,
    prime_label: Option<String>,
    prime_norm: f64,
}

impl SatakeClass {
    pub const MIN_DEGREE: usize = 2;
    pub const MAX_DEGREE: usize = 6;

    /// Builds a class with no prime attached (`q = e`).
    pub fn new(params: impl Into<Vec<Scalar>>) -> Result<Self> {
        Self::with_prime(params, None, E)
    }

    pub fn with_prime(
        params: impl Into<Vec<Scalar>>,
        prime_label: Option<String>,
        prime_norm: f64,
    ) -> Result<Self> {
        let mut params = params.into();
        let n = params.len();
        if !(Self::MIN_DEGREE..=Self::MAX_DEGREE).contains(&n) {
            return Err(contract(format!(
                "degree must lie in {}..={}, got {n}",
                Self::MIN_DEGREE,
                Self::MAX_DEGREE
            )));
        }
        for z in &params {
            check_scalar(*z, "parameter")?;
            if z.norm() == 0.0 {
                return Err(contract("Satake parameters must be nonzero"));
            }
        }
        if !(prime_norm > 1.0) || !prime_norm.is_finite() {
            return Err(contract(format!(
                "prime norm must exceed 1, got {prime_norm}"
            )));
        }
        canonicalize(&mut params);
        Ok(Self {
            params,
            prime_label,
            prime_norm,
        })
    }

    /// Same prime metadata, new parameters.
    pub fn with_params(&self, params: impl Into<Vec<Scalar>>) -> Result<Self> {
        Self::with_prime(params, self.prime_label.clone(), self.prime_norm)
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&x| Scalar::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    pub fn degree(&self) -> usize {
        self.params.len()
    }

    /// Parameters in canonical order.
    pub fn params(&self) -> &[Scalar] {
        &self.params
    }

    pub fn prime_label(&self) -> Option<&str> {
        self.prime_label.as_deref()
    }

    pub fn prime_norm(&self) -> f64 {
        self.prime_norm
    }

    pub fn same_prime(&self, other: &SatakeClass) -> bool {
        self.prime_label == other.prime_label && self.prime_norm == other.prime_norm
    }

    /// `a_q`, the sum of the parameters.
    pub fn trace(&self) -> Scalar {
        self.params.iter().sum()
    }

    /// The central value `w`, the product of the parameters.
    pub fn determinant(&self) -> Scalar {
        self.params.iter().product()
    }

    pub fn max_modulus(&self) -> f64 {
        self.params.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn transform(&self, kind: TransformKind, chi: Option<Scalar>) -> Result<Self> {
        let params: Vec<Scalar> = match kind {
            TransformKind::Dual => self.params.iter().map(|z| z.inv()).collect(),
            TransformKind::Conjugate => self.params.iter().map(|z| z.conj()).collect(),
            TransformKind::Twist => {
                let chi = chi.ok_or_else(|| contract("twist requires a character value"))?;
                check_scalar(chi, "twisting character")?;
                if chi.norm() == 0.0 {
                    return Err(contract("twisting character must be nonzero"));
                }
                self.params.iter().map(|z| z * chi).collect()
            }
        };
        self.with_params(params)
    }

    pub fn dual(&self) -> Self {
        self.transform(TransformKind::Dual, None)
            .expect("inverse of a valid class is valid")
    }

    pub fn conjugate(&self) -> Self {
        self.transform(TransformKind::Conjugate, None)
            .expect("conjugate of a valid class is valid")
    }

    pub fn twist(&self, chi: Scalar) -> Result<Self> {
        self.transform(TransformKind::Twist, Some(chi))
    }

    /// Membership in `S(r)`: every modulus lies in `[1/r - tol, r + tol]`.
    pub fn in_s_r(&self, r: f64, tol: f64) -> Result<bool> {
        if !(r >= 1.0) {
            return Err(contract(format!("S(r) needs r >= 1, got {r}")));
        }
        let (lo, hi) = (1.0 / r - tol, r + tol);
        Ok(self.params.iter().all(|z| {
            let m = z.norm();
            lo <= m && m <= hi
        }))
    }

    /// Multiset comparison against another class (prime metadata ignored).
    pub fn matches(&self, other: &SatakeClass, tol: f64) -> Result<Option<Matching>> {
        multiset_match(&self.params, &other.params, tol)
    }
}

/// JSON file layout of a single class, optionally carrying the twist character `η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFile {
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime_norm: Option<f64>,
    #[serde(with = "pair::vec")]
    pub satake: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "pair::opt")]
    pub eta: Option<Scalar>,
}

impl ClassFile {
    pub fn from_class(class: &SatakeClass, eta: Option<Scalar>) -> Self {
        Self {
            degree: class.degree(),
            prime: class.prime_label.clone(),
            prime_norm: Some(class.prime_norm),
            satake: class.params.clone(),
            eta,
        }
    }

    /// Validates the record and returns the canonicalised class.
    pub fn to_class(&self) -> Result<SatakeClass> {
        if self.satake.len() != self.degree {
            return Err(contract(format!(
                "degree {} does not match {} parameters",
                self.degree,
                self.satake.len()
            )));
        }
        if let Some(eta) = self.eta {
            check_scalar(eta, "eta")?;
        }
        SatakeClass::with_prime(
            self.satake.clone(),
            self.prime.clone(),
            self.prime_norm.unwrap_or(E),
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(Error::from)
    }
}
