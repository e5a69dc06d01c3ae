use affgap::bg::flattening_trace;
use affgap::decay::mu0_construct;
use affgap::sampling::{sample_rng, sample_symmetric_measure};
use affgap::{AffineGroup, GroupMeasure, Representation, WalkOperator};

fn norm(mu: &GroupMeasure, rep: Representation) -> f64 {
    WalkOperator::new(mu, rep).unwrap().l0_norm(3).unwrap().norm
}

fn sampled(p: u32, i: u64) -> GroupMeasure {
    let g = AffineGroup::shared(p, 2).unwrap();
    sample_symmetric_measure(&g, 2, &mut sample_rng(99, i, p)).unwrap()
}

#[test]
fn squaring_a_symmetric_walk_squares_its_norm() {
    for i in 0..6 {
        let mu = sampled(3, i);
        let sq = mu.convolve(&mu).unwrap();
        for rep in [Representation::Regular, Representation::Quotient, Representation::DualPunctured] {
            let (a, b) = (norm(&mu, rep), norm(&sq, rep));
            assert!((b - a * a).abs() < 1e-8, "{rep:?}: {b} vs {a}²");
        }
    }
}

#[test]
fn mu0_quotient_norm_is_a_power() {
    for (p, i) in [(3, 0), (3, 1), (5, 0), (5, 1)] {
        let mu = sampled(p, i);
        let m = mu0_construct(&mu).unwrap();
        let expected = m.quotient_norm.powi(2 * m.l0 as i32);
        let got = m.hypotheses.quotient_norm;
        assert!((got - expected).abs() < 1e-8 * expected.max(1e-3), "p={p}: {got} vs {expected}");
        assert!(got <= 0.5);
    }
}

#[test]
fn flattening_is_monotone_and_floored() {
    for i in 0..4 {
        let mu = sampled(3, i);
        let t = flattening_trace(&mu, 1, 6, 2.5).unwrap();
        let floor = 1.0 / t.group_order as f64;
        let a = t.a();
        assert!(a.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        assert!(a.iter().all(|&x| x >= floor * (1.0 - 1e-12)));
        for s in &t.steps[1..] {
            assert_eq!(s.flattened, Some(s.ratio.unwrap() <= 1.0 / 6.25));
        }
    }
}

#[test]
fn sampled_walk_flattens_to_uniform() {
    let g = AffineGroup::shared(5, 2).unwrap();
    let mu = sample_symmetric_measure(&g, 2, &mut sample_rng(5, 0, 5)).unwrap();
    let t = flattening_trace(&mu, 1, 7, 2.5).unwrap();
    let last = *t.a().last().unwrap();
    assert!(last <= 2.0 / g.order() as f64, "a_7 = {last}, 1/|G| = {}", 1.0 / g.order() as f64);
}
