use std::time::Instant;

use carlitz::carlitz::{carlitz_log, carlitz_t, pi_tilde};
use carlitz::relations::*;
use carlitz::{FieldConfig, LocalElement, TPoly};

#[test]
fn zeta_relation() {
    let f = FieldConfig::default_field();
    let z = LocalElement::zeta(&f);
    let th = LocalElement::theta(&f);
    let alphas = [z.clone()];
    let b = SearchBounds::new(1, -1, 0, 200, 40);
    let t0 = Instant::now();
    let rep = relation_report(&f, &alphas, &b).unwrap();
    eprintln!("zeta report in {:?}", t0.elapsed());
    assert_eq!(rep.relations.len(), 1);
    assert_eq!(rep.rejected, 0);

    // zeta (t - theta) X_0 - t X_1 - 1, up to scalar
    let expect =
        [TPoly::constant(LocalElement::from_int(&f, -1)), TPoly::t_minus_theta(&f).scale(&z), TPoly::t(&f).neg()];
    let got = &rep.relations[0].slots;
    let s = got[0].coeff(0).mul_ref(&expect[0].coeff(0).inv().unwrap());
    for (g, e) in got.iter().zip(&expect) {
        assert_eq!(g, &e.scale(&s));
    }

    let ev = &rep.evaluated[0];
    assert!(ev.c_const.is_zero() && ev.c_const.is_exact());
    // theta log(zeta) - pi_tilde = 0 up to the normalization scalar
    let ratio = ev.c_log[0].mul_ref(&ev.c_pitilde.inv().unwrap());
    assert_eq!(ratio, th.neg_ref());
    assert!(ev.identity_residual.is_zero());
    assert!(ev.identity_residual.prec() >= 190);

    assert_eq!(rep.gamma.dim, 1);
    let g = &rep.gamma.polys[0];
    // G = t X_1 - X_0 + 1 up to an F_q scalar
    let one = carlitz::FqPoly::one(&f);
    let c = g.constant.num.coeffs()[0];
    let t = carlitz::FqPoly::t(&f).scale(c);
    assert_eq!(g.xi[0].num, t);
    assert_eq!(g.x0.num, one.scale(c).neg());
    assert_eq!(g.v_form[0].num, one);
    // f = zeta (t - theta) - 1 up to the recorded scalar
    let zf = TPoly::t_minus_theta(&f).scale(&z).sub(&TPoly::one(&f));
    let r = g.f.coeff(1).mul_ref(&zf.coeff(1).inv().unwrap());
    assert_eq!(g.f, zf.scale(&r));
}

#[test]
fn certification_rejects_perturbed_relation() {
    let f = FieldConfig::default_field();
    let alphas = [LocalElement::zeta(&f)];
    let b = SearchBounds::new(1, -1, 0, 120, 24);
    let rels = search_relations(&f, &alphas, &b).unwrap();
    assert_eq!(rels.len(), 1);
    assert!(certify_relation(&f, &rels[0], &alphas, &b).unwrap().certified);
    let mut bad = rels[0].clone();
    bad.slots[2] = bad.slots[2].add(&TPoly::constant(LocalElement::monomial(&f, 1, 0)));
    let c = certify_relation(&f, &bad, &alphas, &b).unwrap();
    assert!(!c.certified);
    assert_eq!(evaluate_relation_at_theta(&bad, &alphas, 100).unwrap_err(), carlitz::Error::NotCertified);
}

#[test]
fn omega_alone_has_no_relation() {
    let f = FieldConfig::default_field();
    let b = SearchBounds::new(2, -2, 2, 200, 40);
    assert!(search_relations(&f, &[], &b).unwrap().is_empty());
    let rep = relation_report(&f, &[], &b).unwrap();
    assert_eq!(rep.gamma.dim, 1);
}

#[test]
fn module_law_relation() {
    let f = FieldConfig::default_field();
    let a = LocalElement::theta(&f).inv().unwrap();
    let a1 = carlitz_t(&a);
    let alphas = [a.clone(), a1.clone()];
    let b = SearchBounds::new(2, -2, 2, 200, 40);
    let t0 = Instant::now();
    let rep = relation_report(&f, &alphas, &b).unwrap();
    eprintln!("module law report in {:?}", t0.elapsed());
    assert!(!rep.relations.is_empty());
    assert_eq!(rep.gamma.dim + rep.relations.len(), 3);
    let th = LocalElement::theta(&f);
    let la = carlitz_log(&a, 220).unwrap();
    let la1 = carlitz_log(&a1, 220).unwrap();
    let pt = pi_tilde(&f, 220);
    let mut saw_module_law = false;
    for ev in &rep.evaluated {
        assert!(ev.c_const.is_zero(), "artifact {:?}", ev.artifact_norm);
        assert!(ev.identity_residual.is_zero());
        assert!(ev.identity_residual.prec() >= 150, "{}", ev.identity_residual.prec());
        // c_log = s (theta, -1): theta log a - log a' + f(theta) pi_tilde = 0
        if !ev.c_log[1].is_zero() {
            let s = ev.c_log[1].neg_ref();
            assert_eq!(ev.c_log[0], th.mul_ref(&s));
            let fp = ev.c_pitilde.mul_ref(&s.inv().unwrap());
            let id = th.mul_ref(&la).sub_ref(&la1).add_ref(&fp.mul_ref(&pt));
            assert!(id.is_zero(), "{id}");
            saw_module_law = true;
        }
    }
    assert!(saw_module_law);
}

#[test]
fn independence_evidence() {
    let f = FieldConfig::default_field();
    let th = LocalElement::theta(&f);
    let alphas = [th.clone(), th.inv().unwrap()];
    for prec in [200, 400] {
        let b = SearchBounds::new(2, -2, 2, prec, 40);
        assert!(search_relations(&f, &alphas, &b).unwrap().is_empty());
    }
    let rep = relation_report(&f, &alphas, &SearchBounds::new(2, -2, 2, 200, 40)).unwrap();
    assert_eq!(rep.gamma.dim, 3);
    assert!(rep.gamma.polys.is_empty());
}

#[test]
fn theta_and_theta_plus_one_are_dependent() {
    // theta + 1 = C_t(1), so theta log(theta) = (theta - 1) log(theta + 1)
    let f = FieldConfig::default_field();
    let th = LocalElement::theta(&f);
    let one = LocalElement::one(&f);
    let alphas = [th.clone(), th.add_ref(&one)];
    let rep = relation_report(&f, &alphas, &SearchBounds::new(2, -2, 2, 200, 40)).unwrap();
    assert_eq!(rep.relations.len(), 1);
    assert_eq!(rep.gamma.dim, 2);
    let ev = &rep.evaluated[0];
    assert!(ev.c_pitilde.is_zero() && ev.c_const.is_zero());
    let s = ev.c_log[0].mul_ref(&th.inv().unwrap());
    assert_eq!(ev.c_log[1], th.sub_ref(&one).mul_ref(&s).neg_ref());
    let l = |a: &LocalElement| carlitz_log(a, 200).unwrap();
    let id = th.mul_ref(&l(&alphas[0])).sub_ref(&th.sub_ref(&one).mul_ref(&l(&alphas[1])));
    assert!(id.is_zero());
}

#[test]
fn refinement_keeps_relations() {
    let f = FieldConfig::default_field();
    let a = LocalElement::theta(&f).inv().unwrap();
    let alphas = [a.clone(), carlitz_t(&a)];
    let mut last = usize::MAX;
    for (prec, t_deg) in [(60, 12), (120, 24), (200, 40)] {
        let k = search_relations(&f, &alphas, &SearchBounds::new(2, -2, 2, prec, t_deg)).unwrap().len();
        assert!(k <= last);
        last = k;
    }
    let b = SearchBounds::new(2, -2, 2, 100, 20);
    let two = find_certified(&f, &alphas, &b).unwrap();
    let four = find_certified(&f, &alphas, &b.with_margin(4)).unwrap();
    assert_eq!(two.relations.len(), four.relations.len());
    assert!(four.rejected.is_empty());
}

#[test]
fn underdetermined_is_reported() {
    let f = FieldConfig::default_field();
    let b = SearchBounds::new(3, -4, 4, 4, 2);
    assert!(matches!(
        search_relations(&f, &[LocalElement::zeta(&f)], &b),
        Err(carlitz::Error::UnderdeterminedSystem { .. })
    ));
}

#[test]
fn report_json_shape() {
    let f = FieldConfig::default_field();
    let rep = relation_report(&f, &[LocalElement::zeta(&f)], &SearchBounds::new(1, -1, 0, 100, 20)).unwrap();
    let v = serde_json::to_value(rep.to_json()).unwrap();
    for key in ["alphas", "bounds", "relations", "evaluated", "gamma", "certified_at"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["gamma"]["dim"], 1);
    assert!(v["gamma"]["polys"][0].get("X0").is_some());
    assert!(v["evaluated"][0].get("artifact_norm").is_some());
}
