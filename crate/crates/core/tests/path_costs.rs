use discflux::flux::ConvexFlux;
use discflux::paths::{cost_j, cost_jpm, make_curve, InitialProfile, Sign};
use proptest::prelude::*;

fn flux() -> ConvexFlux {
    ConvexFlux::builtin("shifted", (-4.0, 4.0)).unwrap()
}

fn data() -> InitialProfile {
    InitialProfile::piecewise_constant(vec![-0.9, -0.2, 0.4, 1.1], vec![0.0, 0.6, -0.3, 0.8, 0.0]).unwrap()
}

proptest! {
    #[test]
    fn cost_splits_into_side_and_interface_parts(
        x in 0.0f64..1.0,
        y in 0.0f64..1.0,
        a in 0.3f64..1.2,
        b in 0.3f64..1.2,
        positive in prop::bool::ANY,
    ) {
        let h = flux();
        let d = data();
        let t = 1.5;
        let (t2, t1) = (a.min(b), a.max(b));
        let (sign, x, y) = if positive { (Sign::Positive, x, y) } else { (Sign::Negative, -x, -y) };
        let c = make_curve(t, x, y, t2, t1, sign).unwrap();
        let j = cost_j(&c, &d, &h).unwrap();
        let jpm = cost_jpm(&c, &d, &h, sign).unwrap();
        let rest = (t1 - t2) * h.legendre(0.0).unwrap();
        prop_assert!((j - jpm - rest).abs() <= 1e-12 * j.abs().max(1.0));
        let other = match sign { Sign::Positive => Sign::Negative, Sign::Negative => Sign::Positive };
        prop_assert!((cost_jpm(&c, &d, &h, other).unwrap() - d.v0(y)).abs() <= 1e-15);
    }

    #[test]
    fn cost_adds_over_the_three_pieces(
        x in 0.05f64..1.0,
        y in 0.05f64..1.0,
        a in 0.3f64..1.2,
        b in 0.3f64..1.2,
    ) {
        let h = flux();
        let d = data();
        let t = 1.5;
        let (t2, t1) = (a.min(b), a.max(b));
        let c = make_curve(t, x, y, t2, t1, Sign::Positive).unwrap();
        let by_hand = d.v0(y)
            + t2 * h.legendre(-y / t2).unwrap()
            + (t1 - t2) * h.legendre(0.0).unwrap()
            + (t - t1) * h.legendre(x / (t - t1)).unwrap();
        prop_assert!((cost_j(&c, &d, &h).unwrap() - by_hand).abs() <= 1e-12 * by_hand.abs().max(1.0));
    }

    #[test]
    fn a_straight_curve_costs_its_one_segment(x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let h = flux();
        let d = data();
        let c = make_curve(2.0, x, y, 0.0, 0.0, Sign::Positive).unwrap();
        let expected = d.v0(y) + 2.0 * h.legendre((x - y) / 2.0).unwrap();
        prop_assert!((cost_j(&c, &d, &h).unwrap() - expected).abs() <= 1e-13);
    }
}
