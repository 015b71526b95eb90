#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use epr_transport::frame::gauge_frame;
use epr_transport::geodesic::{integrate_geodesic, GeodesicSegment, IntegratorConfig};
use epr_transport::spacetime::Vec4;
use epr_transport::{Event, Gauge, Spacetime, Tangent};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector(rng: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random event outside the strong-field region of a unit-mass black hole.
pub fn schwarzschild_event(rng: &mut impl Rng) -> Event {
    Event::new(
        rng.random_range(-5.0..5.0),
        rng.random_range(8.0..30.0),
        rng.random_range(0.4..PI - 0.4),
        rng.random_range(0.0..2.0 * PI),
    )
}

/// Four-velocity with a random spatial proper velocity (|w| < `wmax`)
/// relative to the static observer.
pub fn velocity(st: &Spacetime, e: &Event, rng: &mut impl Rng, wmax: f64) -> Tangent {
    let w = unit_vector(rng) * rng.random_range(0.0..wmax);
    let frame = gauge_frame(st, Gauge::Static, e).unwrap();
    frame.vector_from_components(&Vec4::new(
        (1.0 + w.norm_squared()).sqrt(),
        w[0],
        w[1],
        w[2],
    ))
}

/// Random timelike geodesic in Schwarzschild (M = 1) that stays in the chart.
pub fn schwarzschild_segment(rng: &mut impl Rng) -> GeodesicSegment {
    let st = Spacetime::schwarzschild(1.0).unwrap();
    loop {
        let e = schwarzschild_event(rng);
        let u = velocity(&st, &e, rng, 0.8);
        let tau = rng.random_range(3.0..25.0);
        if let Ok(seg) = integrate_geodesic(&st, &u, tau, &IntegratorConfig::default()) {
            let ok = seg
                .samples()
                .iter()
                .all(|s| s.event.coords[1] > 4.0 && s.event.coords[2].sin() > 0.1);
            if ok {
                return seg;
            }
        }
    }
}

/// Two geodesics from a common random event.
pub fn schwarzschild_pair(rng: &mut impl Rng) -> (GeodesicSegment, GeodesicSegment) {
    let st = Spacetime::schwarzschild(1.0).unwrap();
    loop {
        let o = schwarzschild_event(rng);
        let mut segs = Vec::new();
        for _ in 0..2 {
            let u = velocity(&st, &o, rng, 0.8);
            let tau = rng.random_range(3.0..20.0);
            match integrate_geodesic(&st, &u, tau, &IntegratorConfig::default()) {
                Ok(seg)
                    if seg
                        .samples()
                        .iter()
                        .all(|s| s.event.coords[1] > 4.0 && s.event.coords[2].sin() > 0.1) =>
                {
                    segs.push(seg)
                }
                _ => break,
            }
        }
        if segs.len() == 2 {
            let s2 = segs.pop().unwrap();
            return (segs.pop().unwrap(), s2);
        }
    }
}

/// Equatorial circular geodesic of radius r around M = 1, starting at φ = 0.
pub fn circular_orbit(r: f64) -> Tangent {
    let ut = 1.0 / (1.0 - 3.0 / r).sqrt();
    let omega = (1.0 / (r * r * r)).sqrt();
    Tangent::new(
        Event::new(0.0, r, PI / 2.0, 0.0),
        Vec4::new(ut, 0.0, 0.0, omega * ut),
    )
}

/// Proper time of one revolution of [`circular_orbit`].
pub fn orbit_period(r: f64) -> f64 {
    let ut = 1.0 / (1.0 - 3.0 / r).sqrt();
    let omega = (1.0 / (r * r * r)).sqrt();
    2.0 * PI / (omega * ut)
}

/// Closed-form geodetic precession per revolution.
pub fn geodetic_angle(r: f64) -> f64 {
    2.0 * PI * (1.0 - (1.0 - 3.0 / r).sqrt())
}

pub fn scenario(name: &str) -> String {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/");
    std::fs::read_to_string(format!("{path}{name}.scn")).unwrap()
}
