use carlitz::motive::{anderson_det, check_morphism, MotivePresentation, TPolyMatrix};
use carlitz::{FieldConfig, LocalElement, TPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const T_DEG: usize = 40;
const PREC: i64 = 200;
const FLOOR: i64 = PREC / 2;

fn zeta_motive() -> MotivePresentation {
    let f = FieldConfig::default_field();
    MotivePresentation::x_alphas(&[LocalElement::zeta(&f)], T_DEG, PREC).unwrap()
}

#[test]
fn constructors_are_trivialized() {
    let f = FieldConfig::default_field();
    let c1 = MotivePresentation::carlitz_power(&f, 1, T_DEG, PREC).unwrap();
    let x = zeta_motive();
    let cases = vec![
        MotivePresentation::one(&f, T_DEG),
        c1.clone(),
        MotivePresentation::carlitz_power(&f, -1, T_DEG, PREC).unwrap(),
        MotivePresentation::carlitz_power(&f, 2, T_DEG, PREC).unwrap(),
        x.clone(),
        x.tensor(&c1).unwrap(),
        x.dual().unwrap(),
    ];
    for m in &cases {
        let r = m.check_trivialization(FLOOR).unwrap();
        assert!(r.pass, "{}: {r:?}", m.name);
    }
}

#[test]
fn corrupted_psi_fails() {
    let f = FieldConfig::default_field();
    let mut m = MotivePresentation::carlitz_power(&f, 1, T_DEG, PREC).unwrap();
    let s = m.psi.get(0, 0).clone();
    let c = s.coeff(3).add_ref(&LocalElement::one(&f));
    m.psi.set(0, 0, s.with_coeff(3, c));
    let r = m.check_trivialization(FLOOR).unwrap();
    assert!(!r.pass);
    assert!(!r.residual.upper_bound);
    assert!(r.residual.log_q >= 0.into());
}

#[test]
fn anderson_determinants() {
    let f = FieldConfig::default_field();
    let one = LocalElement::one(&f);
    let (c, s) = zeta_motive().check_anderson_det().unwrap().unwrap();
    assert_eq!((c, s), (one.clone(), 1));
    let x2 =
        MotivePresentation::x_alphas(&[LocalElement::zeta(&f), LocalElement::theta(&f).inv().unwrap()], 8, 60).unwrap();
    assert_eq!(x2.check_anderson_det().unwrap(), Some((one.clone(), 1)));
    for n in [-2i64, -1, 1, 2, 3] {
        let m = MotivePresentation::carlitz_power(&f, n, 8, 60).unwrap();
        assert_eq!(m.check_anderson_det().unwrap(), Some((one.clone(), n)), "n = {n}");
    }
}

#[test]
fn embedding_of_carlitz_into_x_is_a_morphism() {
    let f = FieldConfig::default_field();
    let c = MotivePresentation::carlitz_power(&f, 1, 8, 60).unwrap();
    let x = MotivePresentation::x_alphas(&[LocalElement::zeta(&f)], 8, 60).unwrap();
    let b = TPolyMatrix::new(&f, 1, 2, vec![TPoly::one(&f), TPoly::zero(&f)]).unwrap();
    assert!(check_morphism(&c, &x, &b).unwrap());
    assert!(check_morphism(&x, &x, &TPolyMatrix::identity(&f, 2)).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = f.residue().size();
    let random_poly = |rng: &mut ChaCha8Rng| {
        let cs = (0..3)
            .map(|_| {
                let terms: Vec<_> = (-2..2).map(|k| (k, rng.random_range(0..n))).collect();
                LocalElement::from_terms(&f, &terms, carlitz::EXACT)
            })
            .collect();
        TPoly::new(&f, cs)
    };
    let mut failures = 0;
    while failures < 5 {
        let b0 = random_poly(&mut rng);
        let b1 = random_poly(&mut rng);
        if b1.is_zero() {
            continue;
        }
        let b = TPolyMatrix::new(&f, 1, 2, vec![b0, b1]).unwrap();
        assert!(!check_morphism(&c, &x, &b).unwrap());
        failures += 1;
    }
}

#[test]
fn tensor_and_dual_identities() {
    let f = FieldConfig::default_field();
    let c1 = MotivePresentation::carlitz_power(&f, 1, 12, 80).unwrap();
    let cm1 = MotivePresentation::carlitz_power(&f, -1, 12, 80).unwrap();
    let c2 = MotivePresentation::carlitz_power(&f, 2, 12, 80).unwrap();
    let one = MotivePresentation::one(&f, 12);

    assert!(cm1.tensor(&c1).unwrap().phi.same_as(&one.phi));
    assert!(c1.tensor(&c1).unwrap().phi.same_as(&c2.phi));
    assert!(c1.dual().unwrap().phi.same_as(&cm1.phi));
    assert!(one.dual().unwrap().phi.same_as(&one.phi));
    assert!(one.tensor(&c1).unwrap().phi.same_as(&c1.phi));

    let x = MotivePresentation::x_alphas(&[LocalElement::zeta(&f)], 12, 80).unwrap();
    let dd = x.dual().unwrap().dual().unwrap();
    assert!(dd.phi.same_as(&x.phi));
    let diff = dd.psi.sub(&x.psi).unwrap();
    assert!(diff.gauss_norm().upper_bound);
}

#[test]
fn determinant_of_tensor() {
    let f = FieldConfig::default_field();
    let x = MotivePresentation::x_alphas(&[LocalElement::zeta(&f)], 8, 60).unwrap();
    let c2 = MotivePresentation::carlitz_power(&f, 2, 8, 60).unwrap();
    let xc = x.tensor(&c2).unwrap();
    // det(P (x) Q) = det(P)^{rank Q} det(Q)^{rank P}: s adds up as 1*1 + 2*2
    assert_eq!(anderson_det(&xc.phi).unwrap(), Some((LocalElement::one(&f), 5)));
}

#[test]
fn x_psi_first_column() {
    let f = FieldConfig::default_field();
    let x = zeta_motive();
    let om = carlitz::carlitz::omega(&f, T_DEG, PREC);
    let d = x.psi.get(0, 0).sub(&om);
    assert!(d.gauss_norm().upper_bound);
    assert!(x.psi.get(0, 1).coeffs().iter().all(|c| c.is_zero() && c.is_exact()));
}

#[test]
fn presentation_json_roundtrip() {
    let f = FieldConfig::default_field();
    let x = MotivePresentation::x_alphas(&[LocalElement::zeta(&f)], 6, 40).unwrap();
    for m in [x.clone(), x.dual().unwrap()] {
        let s = serde_json::to_string(&m.to_json()).unwrap();
        let back = MotivePresentation::from_json(&f, &serde_json::from_str(&s).unwrap()).unwrap();
        assert!(back.phi.same_as(&m.phi));
        assert!(back.check_trivialization(10).unwrap().pass);
    }
}
