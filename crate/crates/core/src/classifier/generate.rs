//! Seeded sampling of classes of a given case shape.

use std::f64::consts::{E, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::shapes::{build_shape, CaseLabel, Witnesses};
use crate::class::{SatakeClass, Scalar};
use crate::error::{contract, Result};

/// Witness tolerance for caller-supplied values.
const WITNESS_TOL: f64 = 1e-9;

/// Draws within this distance of an overlap with another case are redrawn.
const DEGENERACY_GAP: f64 = 1e-3;

/// A sampled class with its witnesses and twist character.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub class: SatakeClass,
    pub eta: Option<Scalar>,
    pub witnesses: Witnesses,
}

/// Sampling configuration.
///
/// The leading modulus `q^t` is drawn log-uniformly in `modulus_range`
/// (lower end excluded). Secondary exponents `s` are drawn in `[0.05 t, t)`,
/// so the leading modulus stays the largest one.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub prime_norm: f64,
    pub modulus_range: (f64, f64),
    /// Degree of classes drawn for `Tempered`.
    pub tempered_degree: usize,
}

impl Default for Generator {
    fn default() -> Self {
        Self {
            prime_norm: E,
            modulus_range: (1.1, 10.0),
            tempered_degree: 4,
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::from_polar(1.0, rng.gen_range(0.0..TAU))
}

fn random_sign(rng: &mut ChaCha8Rng) -> Scalar {
    if rng.gen_bool(0.5) {
        Scalar::new(1.0, 0.0)
    } else {
        Scalar::new(-1.0, 0.0)
    }
}

/// A unit at least `DEGENERACY_GAP` away from the real axis.
fn random_nonreal_unit(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let z = random_unit(rng);
        if z.im.abs() > DEGENERACY_GAP {
            return z;
        }
    }
}

impl Generator {
    pub fn new(prime_norm: f64, modulus_range: (f64, f64)) -> Result<Self> {
        let g = Self {
            prime_norm,
            modulus_range,
            ..Self::default()
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.modulus_range;
        if !(self.prime_norm > 1.0) {
            return Err(contract("prime norm must exceed 1"));
        }
        if !(lo >= 1.0 && hi > lo && hi.is_finite()) {
            return Err(contract(format!("bad modulus range ({lo}, {hi}]")));
        }
        Ok(())
    }

    fn random_exponent(&self, rng: &mut ChaCha8Rng) -> f64 {
        let (lo, hi) = self.modulus_range;
        // 1 - U lies in (0, 1], keeping the lower end open
        let frac = 1.0 - rng.gen::<f64>();
        let log_mod = lo.ln() + frac * (hi.ln() - lo.ln());
        log_mod / self.prime_norm.ln()
    }

    fn secondary_exponent(rng: &mut ChaCha8Rng, t: f64) -> f64 {
        t * rng.gen_range(0.05..1.0)
    }

    /// Samples a class of shape `label`, keeping any witnesses the caller fixed.
    pub fn generate(&self, label: CaseLabel, fixed: &Witnesses, seed: u64) -> Result<Generated> {
        use CaseLabel::*;
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = self.prime_norm;

        if label == Tempered {
            return self.tempered(&mut rng);
        }

        let mut w = fixed.clone();
        let sd_unit = matches!(label, SdI | SdII | SdQuadNeg);
        if w.u.is_none() {
            w.u = Some(match label {
                _ if sd_unit => random_sign(&mut rng),
                SdIII => random_nonreal_unit(&mut rng),
                _ => random_unit(&mut rng),
            });
        }
        if w.t.is_none() {
            w.t = Some(self.random_exponent(&mut rng));
        }
        let u = w.u.unwrap();
        let t = w.t.unwrap();
        let case2_eta = (u * u).conj();

        match label {
            Tempered => unreachable!(),
            G4I => {
                w.gamma.get_or_insert_with(|| random_unit(&mut rng));
                w.delta.get_or_insert_with(|| random_unit(&mut rng));
            }
            G4II => {
                w.v.get_or_insert_with(|| random_unit(&mut rng));
                w.s.get_or_insert_with(|| Self::secondary_exponent(&mut rng, t));
            }
            Esd1 => {
                w.eta.get_or_insert_with(|| loop {
                    let eta = random_unit(&mut rng);
                    if (eta - case2_eta).norm() > DEGENERACY_GAP {
                        break eta;
                    }
                });
            }
            Esd2aI => {
                let eta = *w.eta.get_or_insert(case2_eta);
                let gamma = *w
                    .gamma
                    .get_or_insert_with(|| random_sign(&mut rng) * eta.conj().sqrt());
                // the +γ branch is the doubled shape, so default to -γ
                w.delta.get_or_insert(-gamma);
            }
            Esd2aII => {
                let eta = *w.eta.get_or_insert(case2_eta);
                w.v.get_or_insert_with(|| loop {
                    let v = random_unit(&mut rng);
                    let vv = v * v;
                    if (vv - eta.conj()).norm() > DEGENERACY_GAP
                        && (vv + eta.conj()).norm() > DEGENERACY_GAP
                    {
                        break v;
                    }
                });
            }
            Esd2bI => {
                let eta = *w.eta.get_or_insert(case2_eta);
                w.gamma
                    .get_or_insert_with(|| random_sign(&mut rng) * eta.conj().sqrt());
            }
            Esd2bII => {
                w.eta.get_or_insert(case2_eta);
                w.v.get_or_insert_with(|| random_sign(&mut rng) * u);
                w.s.get_or_insert_with(|| Self::secondary_exponent(&mut rng, t));
            }
            SdI => {
                w.v.get_or_insert_with(|| random_sign(&mut rng));
                w.s.get_or_insert_with(|| Self::secondary_exponent(&mut rng, t));
            }
            SdII => {
                w.beta.get_or_insert_with(|| random_nonreal_unit(&mut rng));
            }
            SdIII | SdQuadNeg => {}
            G3Std => {
                w.alpha.get_or_insert_with(|| random_unit(&mut rng));
            }
        }

        let shape = build_shape(label, &w, q, WITNESS_TOL)?;
        let class = SatakeClass::with_prime(shape.params, None, q)?;
        Ok(Generated {
            class,
            eta: shape.eta,
            witnesses: w,
        })
    }

    /// Unit parameters in conjugate pairs, plus a sign when the degree is odd.
    fn tempered(&self, rng: &mut ChaCha8Rng) -> Result<Generated> {
        let n = self.tempered_degree;
        let mut params = Vec::with_capacity(n);
        for _ in 0..n / 2 {
            let z = random_unit(rng);
            params.push(z);
            params.push(z.conj());
        }
        if n % 2 == 1 {
            params.push(random_sign(rng));
        }
        let class = SatakeClass::with_prime(params, None, self.prime_norm)?;
        Ok(Generated {
            class,
            eta: None,
            witnesses: Witnesses::default(),
        })
    }
}

/// Samples with the default generator (`q = e`, leading modulus in `(1.1, 10]`).
pub fn generate_case(label: CaseLabel, params: &Witnesses, seed: u64) -> Result<Generated> {
    Generator::default().generate(label, params, seed)
}
