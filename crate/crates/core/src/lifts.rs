//! Functorial lifts realised on local Satake classes.

use serde::{Deserialize, Serialize};

use crate::class::{canonical_cmp, SatakeClass, Scalar};
use crate::error::{contract, Error, Result};
use crate::matching::scaled_distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LiftKind {
    /// `Λ²`: degree 4 → 6.
    Ext2,
    /// `Sym²`: degree 2 → 3.
    Sym2,
    /// Adjoint: degree 2 → 3.
    Adjoint,
    /// Langlands tensor product: (2, 2) → 4.
    Tensor,
    /// Automorphic induction at a split place: (n, n) → 2n.
    AISplit,
    /// Automorphic induction from a quadratic extension at an inert place: 2 → 4.
    AIInert,
    /// Asai transfer at a split place, which is the tensor product: (2, 2) → 4.
    AsaiSplit,
}

impl LiftKind {
    /// Number of input classes.
    pub fn arity(self) -> usize {
        match self {
            LiftKind::Ext2 | LiftKind::Sym2 | LiftKind::Adjoint | LiftKind::AIInert => 1,
            LiftKind::Tensor | LiftKind::AISplit | LiftKind::AsaiSplit => 2,
        }
    }
}

/// Local shape of a place in a quadratic extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlaceType {
    Split,
    Inert,
}

fn expect_degree(c: &SatakeClass, n: usize, what: &str) -> Result<()> {
    if c.degree() != n {
        return Err(contract(format!(
            "{what} needs a degree {n} class, got degree {}",
            c.degree()
        )));
    }
    Ok(())
}

fn expect_same_prime(a: &SatakeClass, b: &SatakeClass, what: &str) -> Result<()> {
    if !a.same_prime(b) {
        return Err(contract(format!("{what} inputs must share prime metadata")));
    }
    Ok(())
}

/// `{α_i α_j : i < j}`.
pub fn exterior_square(c: &SatakeClass) -> Result<SatakeClass> {
    expect_degree(c, 4, "exterior square")?;
    let p = c.params();
    let mut out = Vec::with_capacity(6);
    for i in 0..4 {
        for j in (i + 1)..4 {
            out.push(p[i] * p[j]);
        }
    }
    c.with_params(out)
}

/// `Sym²{α,β} = {α², αβ, β²}`, `Ad{α,β} = {α/β, 1, β/α}`.
pub fn sym_or_adjoint(c: &SatakeClass, kind: LiftKind) -> Result<SatakeClass> {
    expect_degree(c, 2, "symmetric square / adjoint")?;
    let (a, b) = (c.params()[0], c.params()[1]);
    let out = match kind {
        LiftKind::Sym2 => vec![a * a, a * b, b * b],
        LiftKind::Adjoint => vec![a / b, Scalar::new(1.0, 0.0), b / a],
        other => return Err(contract(format!("{other:?} is not Sym2 or Adjoint"))),
    };
    c.with_params(out)
}

/// `{α,β} ⊠ {γ,δ} = {αγ, αδ, βγ, βδ}`.
pub fn tensor(a: &SatakeClass, b: &SatakeClass) -> Result<SatakeClass> {
    expect_degree(a, 2, "tensor product")?;
    expect_degree(b, 2, "tensor product")?;
    expect_same_prime(a, b, "tensor product")?;
    let out: Vec<Scalar> = a
        .params()
        .iter()
        .flat_map(|x| b.params().iter().map(move |y| x * y))
        .collect();
    a.with_params(out)
}

/// Automorphic induction from a quadratic extension.
///
/// At a split place the local factor is the product of the two components'
/// factors, so the class is their union. At an inert place the component
/// `{α_w, β_w}` lives at `w` with `Nw = Nv²` and each `(1 - α_w X²)` splits as
/// `(1 - √α_w X)(1 + √α_w X)`, giving `{±√α_w, ±√β_w}` at `v`.
pub fn ai_lift(components: &[SatakeClass], place: PlaceType) -> Result<SatakeClass> {
    match place {
        PlaceType::Split => {
            let [a, b] = components else {
                return Err(contract(format!(
                    "split induction needs two components, got {}",
                    components.len()
                )));
            };
            if a.degree() != b.degree() {
                return Err(contract("split induction needs components of equal degree"));
            }
            expect_same_prime(a, b, "split induction")?;
            let union: Vec<Scalar> = a.params().iter().chain(b.params()).copied().collect();
            a.with_params(union)
        }
        PlaceType::Inert => {
            let [w] = components else {
                return Err(contract(format!(
                    "inert induction needs one component, got {}",
                    components.len()
                )));
            };
            expect_degree(w, 2, "inert induction")?;
            let roots: Vec<Scalar> = w
                .params()
                .iter()
                .flat_map(|z| {
                    let r = z.sqrt();
                    [r, -r]
                })
                .collect();
            SatakeClass::with_prime(
                roots,
                w.prime_label().map(str::to_owned),
                w.prime_norm().sqrt(),
            )
        }
    }
}

/// Asai transfer. Only split places are supported; there it is the tensor product.
pub fn asai(a: &SatakeClass, b: &SatakeClass, place: PlaceType) -> Result<SatakeClass> {
    match place {
        PlaceType::Split => tensor(a, b),
        PlaceType::Inert => Err(Error::NotSupported(
            "Asai local parameters at inert places".into(),
        )),
    }
}

pub fn asai_split(a: &SatakeClass, b: &SatakeClass) -> Result<SatakeClass> {
    asai(a, b, PlaceType::Split)
}

/// Drops one copy of the isobaric summand `ω` from the class.
///
/// The closest parameter within `tol` is removed; ties go to the first in
/// canonical order.
pub fn remove_summand(c: &SatakeClass, omega: Scalar, tol: f64) -> Result<SatakeClass> {
    if c.degree() <= SatakeClass::MIN_DEGREE {
        return Err(contract("cannot remove a summand from a degree 2 class"));
    }
    let best = c
        .params()
        .iter()
        .enumerate()
        .map(|(i, z)| (i, scaled_distance(*z, omega)))
        .filter(|&(_, d)| d <= tol)
        .min_by(|x, y| {
            x.1.total_cmp(&y.1)
                .then_with(|| canonical_cmp(&c.params()[x.0], &c.params()[y.0]))
        });
    let Some((idx, _)) = best else {
        return Err(Error::SummandNotPresent {
            re: omega.re,
            im: omega.im,
        });
    };
    let mut rest = c.params().to_vec();
    rest.remove(idx);
    c.with_params(rest)
}

/// Applies `kind` to `inputs` (one or two classes depending on the arity).
pub fn lift(kind: LiftKind, inputs: &[SatakeClass]) -> Result<SatakeClass> {
    if inputs.len() != kind.arity() {
        return Err(contract(format!(
            "{kind:?} takes {} input classes, got {}",
            kind.arity(),
            inputs.len()
        )));
    }
    match kind {
        LiftKind::Ext2 => exterior_square(&inputs[0]),
        LiftKind::Sym2 | LiftKind::Adjoint => sym_or_adjoint(&inputs[0], kind),
        LiftKind::Tensor => tensor(&inputs[0], &inputs[1]),
        LiftKind::AsaiSplit => asai_split(&inputs[0], &inputs[1]),
        LiftKind::AISplit => ai_lift(inputs, PlaceType::Split),
        LiftKind::AIInert => ai_lift(inputs, PlaceType::Inert),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::MATCH_TOL;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    fn cls(v: &[(f64, f64)]) -> SatakeClass {
        SatakeClass::new(v.iter().map(|&(a, b)| c(a, b)).collect::<Vec<_>>()).unwrap()
    }

    fn same(a: &SatakeClass, b: &SatakeClass) -> bool {
        a.matches(b, MATCH_TOL).unwrap().is_some()
    }

    #[test]
    fn exterior_square_examples() {
        let id = SatakeClass::from_reals(&[1.; 4]).unwrap();
        assert!(same(
            &exterior_square(&id).unwrap(),
            &SatakeClass::from_reals(&[1.; 6]).unwrap()
        ));

        let x = SatakeClass::from_reals(&[2., 0.5, 1., 1.]).unwrap();
        let want = SatakeClass::from_reals(&[1., 2., 2., 0.5, 0.5, 1.]).unwrap();
        assert!(same(&exterior_square(&x).unwrap(), &want));

        let x = cls(&[(0., 2.), (0., -0.5), (0., -2.), (0., 0.5)]);
        let want = SatakeClass::from_reals(&[1., 4., -1., -1., 0.25, 1.]).unwrap();
        assert!(same(&exterior_square(&x).unwrap(), &want));

        assert!(exterior_square(&SatakeClass::from_reals(&[1., 1., 1.]).unwrap()).is_err());
    }

    #[test]
    fn sym_and_adjoint_examples() {
        let x = SatakeClass::from_reals(&[2., 0.5]).unwrap();
        let want = SatakeClass::from_reals(&[4., 1., 0.25]).unwrap();
        assert!(same(&sym_or_adjoint(&x, LiftKind::Adjoint).unwrap(), &want));

        let x = cls(&[(0., 1.), (0., -1.)]);
        let want = SatakeClass::from_reals(&[-1., 1., -1.]).unwrap();
        assert!(same(&sym_or_adjoint(&x, LiftKind::Adjoint).unwrap(), &want));

        let x = SatakeClass::from_reals(&[1., 1.]).unwrap();
        let want = SatakeClass::from_reals(&[1., 1., 1.]).unwrap();
        assert!(same(&sym_or_adjoint(&x, LiftKind::Sym2).unwrap(), &want));

        assert!(sym_or_adjoint(&x, LiftKind::Ext2).is_err());
    }

    #[test]
    fn tensor_examples() {
        let a = SatakeClass::from_reals(&[1., -1.]).unwrap();
        let b = cls(&[(0., 1.), (0., -1.)]);
        let want = cls(&[(0., 1.), (0., -1.), (0., -1.), (0., 1.)]);
        assert!(same(&tensor(&a, &b).unwrap(), &want));

        let gd = cls(&[(0.3, 0.8), (1.7, -0.2)]);
        let ones = SatakeClass::from_reals(&[1., 1.]).unwrap();
        let want = cls(&[(0.3, 0.8), (1.7, -0.2), (0.3, 0.8), (1.7, -0.2)]);
        assert!(same(&tensor(&ones, &gd).unwrap(), &want));

        let t = tensor(
            &SatakeClass::from_reals(&[2., 3.]).unwrap(),
            &SatakeClass::from_reals(&[5., 7.]).unwrap(),
        )
        .unwrap();
        assert!((t.trace() - c(60., 0.)).norm() < 1e-12);
    }

    #[test]
    fn tensor_requires_matching_primes() {
        let a = SatakeClass::with_prime(vec![c(1., 0.); 2], Some("p5".into()), 5.0).unwrap();
        let b = SatakeClass::with_prime(vec![c(1., 0.); 2], Some("p7".into()), 7.0).unwrap();
        assert!(tensor(&a, &b).is_err());
        assert!(asai_split(&a, &b).is_err());
    }

    #[test]
    fn ai_examples() {
        let ab = cls(&[(0.4, 0.1), (2.0, -1.0)]);
        let cd = cls(&[(-1.5, 0.0), (0.0, 0.7)]);
        let split = ai_lift(&[ab.clone(), cd.clone()], PlaceType::Split).unwrap();
        assert_eq!(split.degree(), 4);
        assert!((split.trace() - (ab.trace() + cd.trace())).norm() < 1e-12);

        let w = SatakeClass::from_reals(&[1., -1.]).unwrap();
        let inert = ai_lift(&[w], PlaceType::Inert).unwrap();
        let want = cls(&[(1., 0.), (-1., 0.), (0., 1.), (0., -1.)]);
        assert!(same(&inert, &want));
        assert!(inert.trace().norm() < 1e-15);

        let th: f64 = 0.9;
        let w = cls(&[(th.cos(), th.sin()), (th.cos(), -th.sin())]);
        let inert = ai_lift(&[w], PlaceType::Inert).unwrap();
        assert!(inert
            .params()
            .iter()
            .all(|z| (z.norm() - 1.0).abs() < 1e-15));

        assert!(ai_lift(std::slice::from_ref(&ab), PlaceType::Split).is_err());
        assert!(ai_lift(&[ab.clone(), ab.clone()], PlaceType::Inert).is_err());
        let three = SatakeClass::from_reals(&[1., 2., 3.]).unwrap();
        assert!(ai_lift(&[ab, three], PlaceType::Split).is_err());
    }

    #[test]
    fn inert_place_uses_the_square_root_norm() {
        let w =
            SatakeClass::with_prime(vec![c(1., 0.), c(-1., 0.)], Some("w".into()), 49.0).unwrap();
        let out = ai_lift(&[w], PlaceType::Inert).unwrap();
        assert_eq!(out.prime_norm(), 7.0);
    }

    #[test]
    fn asai_examples() {
        let a = SatakeClass::from_reals(&[2., 3.]).unwrap();
        let b = SatakeClass::from_reals(&[5., 7.]).unwrap();
        assert!(same(&asai_split(&a, &b).unwrap(), &tensor(&a, &b).unwrap()));
        assert!(matches!(
            asai(&a, &b, PlaceType::Inert),
            Err(Error::NotSupported(_))
        ));
        let d1 = cls(&[(0.6, 0.8), (0.6, -0.8)]);
        let d2 = cls(&[(0.0, 1.0), (-1.0, 0.0)]);
        let out = asai_split(&d1, &d2).unwrap();
        assert!(out.params().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn remove_summand_examples() {
        let x = SatakeClass::from_reals(&[1., 2., 2., 0.5, 0.5, 1.]).unwrap();
        let r = remove_summand(&x, c(1., 0.), 1e-9).unwrap();
        assert!(same(
            &r,
            &SatakeClass::from_reals(&[1., 2., 2., 0.5, 0.5]).unwrap()
        ));

        let x = SatakeClass::from_reals(&[1., 4., -1., -1., 0.25, 1.]).unwrap();
        let r = remove_summand(&x, c(1., 0.), 1e-9).unwrap();
        assert_eq!(r.degree(), 5);
        assert!((r.trace() - (x.trace() - 1.0)).norm() < 1e-12);

        let x = SatakeClass::from_reals(&[1., 2., 2., 0.5, 0.5, 1.]).unwrap();
        assert!(matches!(
            remove_summand(&x, c(3., 0.), 1e-9),
            Err(Error::SummandNotPresent { .. })
        ));
    }

    #[test]
    fn remove_summand_takes_the_closest_copy() {
        let x = SatakeClass::from_reals(&[1.0 + 5e-10, 1.0 + 1e-10, 3.0]).unwrap();
        let r = remove_summand(&x, c(1., 0.), 1e-9).unwrap();
        assert_eq!(r.params()[0], c(1.0 + 5e-10, 0.));
    }

    #[test]
    fn dispatcher_checks_arity() {
        let a = SatakeClass::from_reals(&[2., 3.]).unwrap();
        assert!(lift(LiftKind::Tensor, std::slice::from_ref(&a)).is_err());
        assert_eq!(lift(LiftKind::Sym2, &[a]).unwrap().degree(), 3);
    }

    fn scalar() -> impl Strategy<Value = Scalar> {
        (0.2f64..4.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, th)| Scalar::from_polar(r, th))
    }

    fn rel(a: Scalar, b: Scalar) -> f64 {
        (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
    }

    proptest! {
        #[test]
        fn exterior_square_identities(p in proptest::collection::vec(scalar(), 4), chi in scalar()) {
            let x = SatakeClass::new(p).unwrap();
            let e = exterior_square(&x).unwrap();
            let tr = x.trace();
            let tr_sq: Scalar = x.params().iter().map(|z| z * z).sum();
            prop_assert!(rel(e.trace(), (tr * tr - tr_sq) / 2.0) < 1e-9);
            prop_assert!(rel(e.determinant(), x.determinant().powi(3)) < 1e-9);
            let lhs = exterior_square(&x.twist(chi).unwrap()).unwrap();
            let rhs = e.twist(chi * chi).unwrap();
            prop_assert!(lhs.matches(&rhs, 1e-9).unwrap().is_some());
        }

        #[test]
        fn tensor_multiplicativity(a in proptest::collection::vec(scalar(), 2), b in proptest::collection::vec(scalar(), 2)) {
            let a = SatakeClass::new(a).unwrap();
            let b = SatakeClass::new(b).unwrap();
            let t = tensor(&a, &b).unwrap();
            prop_assert!(rel(t.trace(), a.trace() * b.trace()) < 1e-9);
            let want = a.determinant().powi(2) * b.determinant().powi(2);
            prop_assert!(rel(t.determinant(), want) < 1e-9);
        }

        #[test]
        fn sym2_is_twisted_adjoint(p in proptest::collection::vec(scalar(), 2)) {
            let x = SatakeClass::new(p).unwrap();
            let sym = sym_or_adjoint(&x, LiftKind::Sym2).unwrap();
            let ad = sym_or_adjoint(&x, LiftKind::Adjoint).unwrap();
            prop_assert!(sym.matches(&ad.twist(x.determinant()).unwrap(), 1e-9).unwrap().is_some());
        }

        #[test]
        fn inert_induction_has_zero_trace(p in proptest::collection::vec(scalar(), 2)) {
            let x = SatakeClass::new(p).unwrap();
            prop_assert!(ai_lift(&[x], PlaceType::Inert).unwrap().trace().norm() < 1e-12);
        }

        #[test]
        fn unit_inputs_give_unit_outputs(a in proptest::collection::vec(0.0f64..6.3, 4), b in proptest::collection::vec(0.0f64..6.3, 2)) {
            let units = |v: &[f64]| SatakeClass::new(v.iter().map(|&t| Scalar::from_polar(1.0, t)).collect::<Vec<_>>()).unwrap();
            let x4 = units(&a);
            let x2 = units(&b);
            let y2 = units(&a[..2]);
            let outs = [
                exterior_square(&x4).unwrap(),
                sym_or_adjoint(&x2, LiftKind::Sym2).unwrap(),
                sym_or_adjoint(&x2, LiftKind::Adjoint).unwrap(),
                tensor(&x2, &y2).unwrap(),
                ai_lift(&[x2.clone(), y2.clone()], PlaceType::Split).unwrap(),
                ai_lift(&[x2], PlaceType::Inert).unwrap(),
            ];
            for o in outs {
                prop_assert!(o.params().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
            }
        }
    }
}
