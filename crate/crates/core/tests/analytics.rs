use carlitz::carlitz::*;
use carlitz::{FieldConfig, FqPoly, LocalElement, TPoly, TateSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_small(f: &carlitz::Field, rng: &mut ChaCha8Rng, vmin: i64) -> LocalElement {
    let n = f.residue().size();
    let terms: Vec<_> = (0..6).map(|k| (vmin + k, rng.random_range(0..n))).collect();
    let mut x = LocalElement::from_terms(f, &terms, carlitz::EXACT);
    if x.valuation() != Some(vmin) {
        x = x.add_ref(&LocalElement::monomial(f, 1, vmin));
    }
    x
}

#[test]
fn exp_theta_functional_equation() {
    let f = FieldConfig::default_field();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let th = LocalElement::theta(&f);
    for _ in 0..10 {
        let z = random_small(&f, &mut rng, 1);
        let e = carlitz_exp(&z, 200);
        let lhs = carlitz_exp(&th.mul_ref(&z), 200);
        let rhs = th.mul_ref(&e).add_ref(&e.twist(1).unwrap());
        let r = lhs.sub_ref(&rhs);
        assert!(r.is_zero(), "{r}");
        assert!(r.prec() >= 190);
    }
}

#[test]
fn exp_log_roundtrip() {
    let f = FieldConfig::default_field();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let z = random_small(&f, &mut rng, -2);
        let l = carlitz_log(&carlitz_exp(&z, 220).truncate(220), 200).unwrap();
        let r = l.sub_ref(&z);
        assert!(r.is_zero(), "{r}");
        assert!(r.prec() >= 190);
    }
}

#[test]
fn log_theta_functional_equation() {
    let f = FieldConfig::default_field();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let th = LocalElement::theta(&f);
    for _ in 0..10 {
        // theta z must also be in the domain: v(z) > -3 + 2
        let z = random_small(&f, &mut rng, 0);
        let lhs = th.mul_ref(&carlitz_log(&z, 200).unwrap());
        let rhs = carlitz_log(&th.mul_ref(&z), 200).unwrap().add_ref(&carlitz_log(&z.twist(1).unwrap(), 200).unwrap());
        assert!(lhs.sub_ref(&rhs).is_zero());
    }
}

#[test]
fn exp_intertwines_the_action() {
    let f = FieldConfig::default_field();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for a in [vec![0, 1], vec![1, 1], vec![2, 0, 1], vec![1, 2, 1]] {
        let a = FqPoly::from_ints(&f, &a);
        let z = random_small(&f, &mut rng, 3);
        let lhs = carlitz_exp(&a.eval_theta().mul_ref(&z), 200);
        let rhs = carlitz_action(&a, &carlitz_exp(&z, 200));
        assert!(lhs.sub_ref(&rhs).is_zero());
    }
}

#[test]
fn action_is_multiplicative() {
    let f = FieldConfig::default_field();
    let x = LocalElement::from_terms(&f, &[(-1, 1), (2, 2), (3, 1)], carlitz::EXACT);
    let a = FqPoly::from_ints(&f, &[1, 2]);
    let b = FqPoly::from_ints(&f, &[2, 0, 1]);
    assert_eq!(carlitz_action(&a.mul(&b), &x), carlitz_action(&a, &carlitz_action(&b, &x)));
}

#[test]
fn omega_functional_equation_and_period() {
    let f = FieldConfig::default_field();
    let o = omega(&f, 40, 200);
    let tq = TateSeries::from_poly(&TPoly::t_minus(&LocalElement::theta_pow(&f, 3)), 40);
    let r = o.sub(&tq.mul(&o.twist(1).unwrap()));
    let n = r.gauss_norm();
    assert!(n.upper_bound);
    assert!(r.min_prec() >= 200);

    let th = LocalElement::theta(&f);
    let w = o.eval_entire(&th).unwrap();
    let p = pi_tilde(&f, 200);
    let one = p.mul_ref(&w).add_ref(&LocalElement::one(&f));
    assert!(one.is_zero());
    assert!(one.prec() >= 190, "{}", one.prec());

    let at_tq = o.eval_entire(&LocalElement::theta_pow(&f, 3)).unwrap();
    assert!(at_tq.is_zero());
}

#[test]
fn l_alpha_functional_equation_and_value() {
    let f = FieldConfig::default_field();
    let th = LocalElement::theta(&f);
    for alpha in [LocalElement::zeta(&f), th.inv().unwrap(), th.clone()] {
        let l = l_alpha(&alpha, 40, 200).unwrap();
        let tq = TateSeries::from_poly(&TPoly::t_minus(&LocalElement::theta_pow(&f, 3)), 40);
        let lhs = tq.mul(&l);
        let rhs = tq.scale(&alpha).add(&l.twist(1).unwrap());
        let r = lhs.sub(&rhs);
        assert!(r.gauss_norm().upper_bound, "alpha = {alpha}");
        // multiplying by theta^q costs q ram digits
        assert!(r.min_prec() >= 200 - 6);

        let at = l.eval_entire(&th).unwrap();
        let log = carlitz_log(&alpha, 200).unwrap();
        let d = at.sub_ref(&log);
        assert!(d.is_zero(), "alpha = {alpha}: {d}");
        assert!(d.prec() >= 150, "{}", d.prec());
    }
}

#[test]
fn division_points_recover_the_preimage() {
    let f = FieldConfig::default_field();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let v = rng.random_range(-6..4);
        let x0 = random_small(&f, &mut rng, v);
        let beta = carlitz_t(&x0);
        let roots = division_points(&beta, 200).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().any(|r| r.sub_ref(&x0).is_zero()));
        for r in &roots {
            assert!(carlitz_t(&r.sub_ref(&roots[0])).is_zero());
        }
    }
}

#[test]
fn reduce_log_greedy_and_forced() {
    let f = FieldConfig::default_field();
    let th = LocalElement::theta(&f);
    // small input: loop not entered
    let small = th.inv().unwrap();
    let r = reduce_log(&small, 200).unwrap();
    assert_eq!(r.n, 0);

    let beta = carlitz_t_pow(&th, 2);
    let r = reduce_log(&beta, 200).unwrap();
    assert_eq!(r.n, 2);
    assert!(r.action_residual.is_zero());
    assert!(r.exp_residual.is_zero());

    let a0 = th.pow(-2).unwrap();
    let beta = carlitz_t_pow(&a0, 2);
    let r = reduce_log_with(&beta, 200, 2).unwrap();
    assert_eq!(r.n, 2);
    assert!(r.action_residual.is_zero());
    assert!(r.exp_residual.is_zero(), "{}", r.exp_residual);
    assert!(carlitz_t_pow(&r.alpha.sub_ref(&a0), 2).is_zero());
}
