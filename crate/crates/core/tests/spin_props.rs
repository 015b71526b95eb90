mod common;

use nalgebra::Vector3;
use proptest::prelude::*;

use epr_transport::scenario::transported_singlet;
use epr_transport::spin::{chsh, correlation, singlet, Direction};
use epr_transport::transport::pair_transport;
use epr_transport::{Event, Gauge, Spacetime, Tetrad};

/// The spinor and vector routes agree to the second-order error of the
/// spinor product, well inside the 1e-6 cross-check tolerance.
#[test]
fn correlation_matches_the_frame_correspondence() {
    let mut rng = common::rng(10);
    for _ in 0..100 {
        let (s1, s2) = common::schwarzschild_pair(&mut rng);
        let pair = pair_transport(&s1, &s2, Gauge::Static).unwrap();
        let state = transported_singlet(&pair).unwrap();
        state.validate().unwrap();
        let r = pair.correspondence_rotation();
        let [d1, d2] = pair.detector_frames;
        let a = common::unit_vector(&mut rng);
        let b = common::unit_vector(&mut rng);
        let e = correlation(
            &state,
            &Direction::new(a, d1).unwrap(),
            &Direction::new(b, d2).unwrap(),
        )
        .unwrap();
        assert!(
            (e + (r * a).dot(&b)).abs() < 1e-6,
            "E = {e}, gap {:e}, length {} {}",
            e + (r * a).dot(&b),
            s1.proper_length(),
            s2.proper_length()
        );
        let matched = correlation(
            &state,
            &Direction::new(a, d1).unwrap(),
            &Direction::new(r * a, d2).unwrap(),
        )
        .unwrap();
        assert!((matched + 1.0).abs() < 1e-6);
    }
}

#[test]
fn gauge_choice_does_not_change_correlations() {
    let mut rng = common::rng(11);
    for _ in 0..20 {
        let (s1, s2) = common::schwarzschild_pair(&mut rng);
        let a = common::unit_vector(&mut rng);
        let b = common::unit_vector(&mut rng);
        let e: Vec<f64> = [Gauge::Static, Gauge::BoostedStatic { rapidity: 0.7 }]
            .iter()
            .map(|&g| {
                let pair = pair_transport(&s1, &s2, g).unwrap();
                let [d1, d2] = pair.detector_frames;
                correlation(
                    &transported_singlet(&pair).unwrap(),
                    &Direction::new(a, d1).unwrap(),
                    &Direction::new(b, d2).unwrap(),
                )
                .unwrap()
            })
            .collect();
        assert!((e[0] - e[1]).abs() < 1e-9);
    }
}

#[test]
fn directions_must_match_the_state_frames() {
    let mut rng = common::rng(12);
    let (s1, s2) = common::schwarzschild_pair(&mut rng);
    let pair = pair_transport(&s1, &s2, Gauge::Static).unwrap();
    let state = transported_singlet(&pair).unwrap();
    let wrong = Direction::new(Vector3::z(), pair.decay_frame).unwrap();
    let right = Direction::new(Vector3::z(), pair.detector_frames[1]).unwrap();
    assert!(correlation(&state, &wrong, &right).is_err());
}

fn flat_frame() -> Tetrad {
    Tetrad::new(
        Event::new(0.0, 0.0, 0.0, 0.0),
        nalgebra::Matrix4::identity(),
    )
}

fn direction() -> impl Strategy<Value = Vector3<f64>> {
    proptest::array::uniform3(-1.0f64..1.0)
        .prop_filter("non-degenerate", |v| Vector3::from(*v).norm() > 0.1)
        .prop_map(|v| Vector3::from(v).normalize())
}

proptest! {
    #[test]
    fn singlet_correlations_are_bounded(
        a in direction(), a2 in direction(), b in direction(), b2 in direction(),
    ) {
        let n = flat_frame();
        let st = singlet(n);
        let d = |v: Vector3<f64>| Direction::new(v, n).unwrap();
        let e = correlation(&st, &d(a), &d(b)).unwrap();
        prop_assert!(e.abs() <= 1.0 + 1e-12);
        prop_assert!((e + a.dot(&b)).abs() < 1e-12);
        let s = chsh(&st, &d(a), &d(a2), &d(b), &d(b2)).unwrap();
        prop_assert!(s.abs() <= 2.0 * 2f64.sqrt() + 1e-12);
    }

    #[test]
    fn flipping_one_axis_flips_the_sign(a in direction(), b in direction()) {
        let n = flat_frame();
        let st = singlet(n);
        let d = |v: Vector3<f64>| Direction::new(v, n).unwrap();
        let e = correlation(&st, &d(a), &d(b)).unwrap();
        prop_assert!((correlation(&st, &d(-a), &d(b)).unwrap() + e).abs() < 1e-12);
        prop_assert!((correlation(&st, &d(a), &d(-b)).unwrap() + e).abs() < 1e-12);
        prop_assert!((correlation(&st, &d(-a), &d(-b)).unwrap() - e).abs() < 1e-12);
    }
}

#[test]
fn flat_spacetime_gives_no_rotation_for_back_to_back_pairs() {
    let st = Spacetime::minkowski();
    let frame = flat_frame();
    let u = frame.vector_from_components(&nalgebra::Vector4::new(1.25, 0.75, 0.0, 0.0));
    let v = frame.vector_from_components(&nalgebra::Vector4::new(1.25, -0.75, 0.0, 0.0));
    let cfg = epr_transport::IntegratorConfig::default();
    let s1 = epr_transport::geodesic::integrate_geodesic(&st, &u, 3.0, &cfg).unwrap();
    let s2 = epr_transport::geodesic::integrate_geodesic(&st, &v, 3.0, &cfg).unwrap();
    let pair = pair_transport(&s1, &s2, Gauge::Static).unwrap();
    let state = transported_singlet(&pair).unwrap();
    let [d1, d2] = pair.detector_frames;
    let mut rng = common::rng(13);
    for _ in 0..20 {
        let a = common::unit_vector(&mut rng);
        let e = correlation(
            &state,
            &Direction::new(a, d1).unwrap(),
            &Direction::new(a, d2).unwrap(),
        )
        .unwrap();
        assert!((e + 1.0).abs() < 1e-12);
    }
}
