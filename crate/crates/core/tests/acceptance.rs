//! Acceptance report: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

mod common;

use std::process::ExitCode;

use nalgebra::Matrix3;

use epr_transport::decoherence::Mode;
use epr_transport::frame::gauge_frame;
use epr_transport::geodesic::{
    integrate_geodesic, solve_bvp, BvpConfig, GeodesicSegment, IntegratorConfig,
};
use epr_transport::lorentz::rotation_angle;
use epr_transport::scenario::{emit_report, parse_scenario, run_scenario, Format, Report};
use epr_transport::spin::{apply_transports, correlation, singlet, Direction};
use epr_transport::spinor::{self, pauli, Mat2, C64};
use epr_transport::transport::{
    correspondence_rotation, pair_transport, rest_frame_rotation, rest_frame_spin,
    transport_spinor, transport_tetrad,
};
use epr_transport::{Gauge, Spacetime, Tetrad};

type Check = Result<(bool, String), String>;

/// Worst conservation errors seen by the random batteries.
#[derive(Default)]
struct Battery {
    norm: f64,
    ortho: f64,
    segments: usize,
}

impl Battery {
    fn segment(&mut self, seg: &GeodesicSegment) {
        self.norm = self.norm.max(seg.norm_drift());
        self.segments += 1;
    }

    fn tetrad(&mut self, st: &Spacetime, t: &Tetrad) {
        self.ortho = self.ortho.max(t.orthonormality_error(st).unwrap());
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn run_csv(text: &str) -> Result<(Report, String), String> {
    let s = parse_scenario(text).map_err(err)?;
    let r = run_scenario(&s).map_err(err)?;
    let csv = emit_report(&r, Format::Csv);
    Ok((r, csv))
}

fn flat_identity(runs: &mut Vec<(String, String)>) -> Check {
    let text = common::scenario("flat_random_axes");
    let (r, csv) = run_csv(&text)?;
    runs.push((text, csv));
    if let Some(f) = r.failure {
        return Ok((false, f));
    }
    let diag: Vec<f64> = r
        .correlations
        .iter()
        .filter(|c| c.a_index == c.b_index)
        .map(|c| (c.value + 1.0).abs())
        .collect();
    let worst = diag.iter().cloned().fold(0.0, f64::max);
    let s_err = (r.chsh.ok_or("no CHSH row")? + 2.0 * 2.0f64.sqrt()).abs();
    Ok((
        diag.len() == 20 && worst <= 1e-10 && s_err <= 1e-9,
        format!(
            "{} matched pairs, max|E+1| = {worst:.2e}; |S+2√2| = {s_err:.2e}",
            diag.len()
        ),
    ))
}

fn geodetic_precession(battery: &mut Battery) -> Check {
    let r = 10.0;
    let st = Spacetime::schwarzschild(1.0).map_err(err)?;
    let u = common::circular_orbit(r);
    let seg = integrate_geodesic(
        &st,
        &u,
        common::orbit_period(r),
        &IntegratorConfig::default(),
    )
    .map_err(err)?;
    battery.segment(&seg);
    let start = gauge_frame(&st, Gauge::Static, &seg.first().event).map_err(err)?;
    let end = gauge_frame(&st, Gauge::Static, &seg.last().event).map_err(err)?;
    battery.tetrad(&st, &transport_tetrad(&seg, &start).map_err(err)?);

    let oracle = common::geodetic_angle(r);
    let vector = rotation_angle(&rest_frame_rotation(&seg, &start, &end).map_err(err)?);
    let spin = spinor::rotation_angle(&transport_spinor(&seg, Gauge::Static).map_err(err)?.matrix);
    let (dv, ds) = ((vector - oracle).abs(), (spin - oracle).abs());
    Ok((
        dv <= 1e-4 && ds <= 1e-4,
        format!(
            "oracle {oracle:.9}, vector {vector:.9} (Δ {dv:.1e}), spinor {spin:.9} (Δ {ds:.1e})"
        ),
    ))
}

fn double_cover(battery: &mut Battery) -> Check {
    let mut rng = common::rng(3);
    let s = pauli();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let seg = common::schwarzschild_segment(&mut rng);
        battery.segment(&seg);
        let st = *seg.spacetime();
        let from = gauge_frame(&st, Gauge::Static, &seg.first().event).map_err(err)?;
        let to = gauge_frame(&st, Gauge::Static, &seg.last().event).map_err(err)?;
        let w = rest_frame_rotation(&seg, &from, &to).map_err(err)?;
        let v = rest_frame_spin(&seg, Gauge::Static, &from, &to)
            .map_err(err)?
            .matrix;
        for k in 0..3 {
            let lhs = v * s[k + 1] * v.adjoint();
            let rhs: Mat2 = (0..3).map(|j| s[j + 1] * C64::from(w[(j, k)])).sum();
            worst = worst.max((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    Ok((
        worst <= 1e-6,
        format!("100 segments, max |Uσ_kU† − Σ_j R_jk σ_j| = {worst:.2e}"),
    ))
}

fn central_claim(battery: &mut Battery) -> Check {
    let mut rng = common::rng(4);
    let bvp = BvpConfig::default();
    let (mut worst, mut worst_gauge, mut configs) = (0.0f64, 0.0f64, 0);
    while configs < 25 {
        let (g1, g2) = common::schwarzschild_pair(&mut rng);
        let st = *g1.spacetime();
        let o = g1.first().event;
        // re-derive both legs as boundary value problems towards the
        // endpoints, starting from the static observer
        let guess = gauge_frame(&st, Gauge::Static, &o).map_err(err)?.leg(0);
        let mut legs = Vec::new();
        for g in [&g1, &g2] {
            let (seg, rep) = solve_bvp(&st, &o, &g.last().event, &guess, 0.0, &bvp).map_err(err)?;
            if !rep.converged {
                return Ok((false, format!("shooting failed to converge: {rep:?}")));
            }
            battery.segment(&seg);
            legs.push(seg);
        }
        configs += 1;
        let (s1, s2) = (&legs[0], &legs[1]);
        let pair = pair_transport(s1, s2, Gauge::Static).map_err(err)?;
        let alt = pair_transport(s1, s2, Gauge::BoostedStatic { rapidity: 0.3 }).map_err(err)?;
        battery.ortho = battery.ortho.max(pair.ortho_drift);
        let r: Matrix3<f64> = correspondence_rotation(s1, s2, Gauge::Static).map_err(err)?;
        let state = apply_transports(&singlet(pair.decay_frame), &pair.spin[0], &pair.spin[1])
            .map_err(err)?;
        let state_alt =
            apply_transports(&singlet(alt.decay_frame), &alt.spin[0], &alt.spin[1]).map_err(err)?;
        let [d1, d2] = pair.detector_frames;
        for _ in 0..5 {
            let a = Direction::new(common::unit_vector(&mut rng), d1).map_err(err)?;
            let b = Direction::normalized(r * a.components(), d2).map_err(err)?;
            let other = Direction::new(common::unit_vector(&mut rng), d2).map_err(err)?;
            let e = correlation(&state, &a, &b).map_err(err)?;
            worst = worst.max((e + 1.0).abs());
            for bb in [&b, &other] {
                let e1 = correlation(&state, &a, bb).map_err(err)?;
                let e2 = correlation(&state_alt, &a, bb).map_err(err)?;
                worst_gauge = worst_gauge.max((e1 - e2).abs());
            }
        }
    }
    Ok((
        worst <= 1e-6 && worst_gauge <= 1e-6,
        format!("25 configurations × 5 axes, max|E+1| = {worst:.2e}; static vs boosted gauge max|ΔE| = {worst_gauge:.2e}"),
    ))
}

fn retraced_holonomy(battery: &mut Battery) -> Check {
    let mut rng = common::rng(5);
    let (mut vec_err, mut spin_err) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let seg = common::schwarzschild_segment(&mut rng);
        battery.segment(&seg);
        let st = *seg.spacetime();
        let back = seg.reverse();
        let n0 = gauge_frame(&st, Gauge::Static, &seg.first().event).map_err(err)?;
        let there = transport_tetrad(&seg, &n0).map_err(err)?;
        let home = transport_tetrad(&back, &there).map_err(err)?;
        battery.tetrad(&st, &there);
        battery.tetrad(&st, &home);
        vec_err = vec_err.max((home.legs - n0.legs).amax());
        let u = transport_spinor(&seg, Gauge::Static)
            .and_then(|f| f.then(&transport_spinor(&back, Gauge::Static)?))
            .map_err(err)?;
        spin_err = spin_err.max(
            (u.matrix - Mat2::identity())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        );
    }
    Ok((
        vec_err <= 1e-8 && spin_err <= 1e-6,
        format!("50 segments, vector max dev {vec_err:.2e}, spinor max dev {spin_err:.2e}"),
    ))
}

fn conservation(battery: &Battery) -> Check {
    Ok((
        battery.norm <= 1e-8 && battery.ortho <= 1e-8,
        format!(
            "{} segments, max norm drift {:.2e}, max tetrad orthonormality drift {:.2e}",
            battery.segments, battery.norm, battery.ortho
        ),
    ))
}

fn weak_field_linearity(runs: &mut Vec<(String, String)>) -> Check {
    let text = common::scenario("weak_field_linearity");
    let half = text.replace("epsilon = 0.001", "epsilon = 0.0005");
    if half == text {
        return Err("epsilon line not found".into());
    }
    let mut angles = Vec::new();
    for t in [text, half] {
        let (r, csv) = run_csv(&t)?;
        runs.push((t, csv));
        angles.push(r.rotation.ok_or("no rotation")?.angle);
    }
    let ratio = angles[0] / angles[1];
    Ok((
        (ratio - 2.0).abs() <= 0.04,
        format!(
            "angle(ε) = {:.6e}, angle(ε/2) = {:.6e}, ratio {ratio:.5}",
            angles[0], angles[1]
        ),
    ))
}

fn decoherence(runs: &mut Vec<(String, String)>) -> Check {
    let text = common::scenario("decoherence_schwarzschild");
    let s = parse_scenario(&text).map_err(err)?;
    let dec = s.decoherence.as_ref().ok_or("no decoherence block")?;
    if dec.n_paths != 2000
        || dec.mode != Mode::Incoherent
        || dec.sigma.len() != 3
        || dec.sigma[0] != 0.0
    {
        return Err("unexpected decoherence settings".into());
    }
    let (r, csv) = run_csv(&text)?;
    runs.push((text, csv));
    let rows = &r.decoherence;
    let f0 = (rows[0].fidelity - 1.0).abs();
    let (f1, f2) = (&rows[1], &rows[2]);
    let margin = 2.0 * (f1.fidelity_se.powi(2) + f2.fidelity_se.powi(2)).sqrt();
    let monotone = f2.fidelity <= f1.fidelity + margin;

    let flat_text = common::scenario("decoherence_minkowski");
    let (flat, csv) = run_csv(&flat_text)?;
    runs.push((flat_text, csv));
    let flat_dev = flat
        .decoherence
        .iter()
        .map(|d| (d.fidelity - 1.0).abs())
        .fold(0.0, f64::max);
    Ok((
        f0 <= 1e-8 && monotone && flat_dev <= 1e-8 && flat.decoherence.len() == 3,
        format!(
            "F(0) dev {f0:.1e}; F(σ={}) = {:.9} ± {:.1e}, F(σ={}) = {:.9} ± {:.1e}; Minkowski max dev {flat_dev:.1e}",
            f1.sigma, f1.fidelity, f1.fidelity_se, f2.sigma, f2.fidelity, f2.fidelity_se
        ),
    ))
}

fn determinism(runs: &[(String, String)]) -> Check {
    let mut differing = 0;
    for (text, csv) in runs {
        let (_, again) = run_csv(text)?;
        if &again != csv {
            differing += 1;
        }
    }
    Ok((
        differing == 0 && !runs.is_empty(),
        format!("{} scenario runs repeated, {differing} differ", runs.len()),
    ))
}

fn main() -> ExitCode {
    let mut battery = Battery::default();
    let mut runs = Vec::new();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, outcome: Check| {
        let (ok, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        if !ok {
            failed += 1;
        }
        println!("{} {n}. {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    };

    report(1, "flat-space identity", flat_identity(&mut runs));
    report(2, "geodetic precession", geodetic_precession(&mut battery));
    report(3, "double-cover consistency", double_cover(&mut battery));
    report(
        4,
        "correlation along the frame correspondence",
        central_claim(&mut battery),
    );
    report(5, "retraced-path holonomy", retraced_holonomy(&mut battery));
    report(6, "conservation", conservation(&battery));
    report(7, "weak-field linearity", weak_field_linearity(&mut runs));
    report(8, "decoherence", decoherence(&mut runs));
    report(9, "determinism", determinism(&runs));

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
