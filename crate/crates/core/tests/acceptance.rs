//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.
//!
//! Criteria whose targets are known to be out of reach of the model (see the
//! README) are reported but do not fail the run; any other failure does.

mod common;

use std::f64::consts::TAU;
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use rayon::prelude::*;

use common::*;
use wqed_core::boundstate::{
    localization_length, photonic_wavefunction, quasiparticle_weight, quasiparticle_weight_closed,
    solve_bound_state,
};
use wqed_core::dynamics::{chevron_map_rates, simulate_bloch_rates, steady_state_magnitude, DriveSpec};
use wqed_core::greens::lattice::{
    effective_mass, hopping_for_mass, lattice_decay_constant, lattice_i_quadrature,
    quadratic_band_decay_constant,
};
use wqed_core::greens::{
    g0_pole, g0_truncated, lattice_g0_broadband, lattice_i, LatticeSpec, PoleGreens,
    SingleModeGreens, TruncatedGreens,
};
use wqed_core::interaction::{j_linear, j_single_mode, solve_pair_determinant, splitting_selfconsistent};
use wqed_core::model::{ghz, mhz, PortSpec, QubitSpec, SystemSpec};
use wqed_core::purcell::{purcell_finite, purcell_infinite, purcell_single_mode};
use wqed_core::scattering::{gp, s_rl, s_rl_full_green};

/// Criteria documented as unattainable within the model.
const KNOWN_GAPS: &[u32] = &[2, 12];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Outcome);
    let criteria: Vec<Criterion> = vec![
        (1, "dressed-qubit vs full-propagator S_RL", c1_representation_equivalence),
        (2, "pole closed form vs 10^6-mode sum", c2_pole_vs_mode_sum),
        (3, "port-dressed closed form vs dense Dyson solve", c3_dyson_oracle),
        (4, "photonic normalization 1 - Z", c4_normalization),
        (5, "Z closed form vs numerical derivative", c5_weight_closed_form),
        (6, "photonic localization slope -2/xi", c6_localization),
        (7, "exchange ladder and exponential law", c7_exchange_ladder),
        (8, "single-mode crossover", c8_single_mode),
        (9, "Purcell ordering and convergence", c9_purcell),
        (10, "Bloch dynamics", c10_dynamics),
        (11, "tight-binding lattice", c11_lattice),
        (12, "empty-waveguide spectrum shape", c12_empty_spectrum),
    ];

    panic::set_hook(Box::new(|_| {}));
    let mut unexpected = Vec::new();
    for (id, title, check) in criteria {
        let start = Instant::now();
        let out = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = match (out.pass, KNOWN_GAPS.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known gap)",
            (false, false) => "FAIL",
        };
        println!(
            "criterion {id:>2} [{tag}] {title}: {} ({:.1} s)",
            out.detail,
            start.elapsed().as_secs_f64()
        );
        if !out.pass && !KNOWN_GAPS.contains(&id) {
            unexpected.push(id);
        }
    }
    let _ = panic::take_hook();
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance failures: {unexpected:?}");
        std::process::exit(1);
    }
}

fn random_pair_system(rng: &mut StdRng) -> SystemSpec {
    let len = rng.random_range(0.05..0.4);
    let wg = guide(len);
    let h = 0.5 * len;
    let port = |rng: &mut StdRng, sign: f64| PortSpec {
        position: sign * rng.random_range(0.5 * h..h),
        gamma: mhz(rng.random_range(50.0..600.0)),
    };
    let left = port(rng, -1.0);
    let right = port(rng, 1.0);
    let qubits = (0..2)
        .map(|_| QubitSpec {
            position: rng.random_range(-0.45 * len..0.45 * len),
            omega_q: ghz(rng.random_range(6.0..7.0)),
            gamma_a: mhz(rng.random_range(0.1..5.0)),
            g: mhz(rng.random_range(20.0..300.0)),
        })
        .collect();
    SystemSpec::new(wg, left, right, qubits).unwrap()
}

fn c1_representation_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    for _ in 0..20 {
        let sys = random_pair_system(&mut rng);
        let p = PoleGreens(sys.waveguide);
        let wc = sys.waveguide.omega_c;
        for w in linspace(0.85 * wc, 1.2 * wc, 200) {
            let a = s_rl(&sys, &p, w).unwrap().amplitude;
            let b = s_rl_full_green(&sys, &p, w).unwrap().amplitude;
            worst = worst.max(rel_err(a, b));
            evaluated += 1;
        }
    }
    outcome(
        worst < 1e-10,
        format!("max relative difference {worst:.2e} over {evaluated} points (tol 1e-10)"),
    )
}

fn c2_pole_vs_mode_sum() -> Outcome {
    let wg = guide(0.30);
    let wc = wg.omega_c;
    let modes = wg.modes();
    let zs: [f64; 4] = [-0.11, -0.04, 0.03, 0.09];
    let mut pairs = Vec::new();
    for (i, &a) in zs.iter().enumerate() {
        for &b in &zs[i + 1..] {
            if (a - b).abs() > 0.05 * wg.length {
                pairs.push((a, b));
            }
        }
    }
    let guard = 3.0 * wg.eta * wc;
    let freqs: Vec<f64> = linspace(0.8, 0.99, 12)
        .into_iter()
        .chain(linspace(1.01, 1.2, 12))
        .map(|r| r * wc)
        .filter(|&w| (1..2000).all(|l| (w - modes.epsilon_of(l)).abs() > guard))
        .collect();
    let jobs: Vec<(f64, f64, f64)> = freqs
        .iter()
        .flat_map(|&w| pairs.iter().map(move |&(a, b)| (a, b, w)))
        .collect();
    let errs: Vec<(f64, f64, f64, f64)> = jobs
        .par_iter()
        .map(|&(a, b, w)| {
            let pole = g0_pole(&wg, a, b, w).unwrap();
            let sum = g0_truncated(&wg, a, b, w, 1_000_000, false).unwrap();
            (rel_err(pole, sum), a, b, w / wc)
        })
        .collect();
    let failing = errs.iter().filter(|e| e.0 >= 1e-4).count();
    let worst = errs.iter().cloned().fold((0.0, 0.0, 0.0, 0.0), |m, e| if e.0 > m.0 { e } else { m });
    outcome(
        failing == 0,
        format!(
            "{failing}/{} points above 1e-4; worst {:.2e} at z={}, z'={}, omega/omega_c={:.4}",
            errs.len(),
            worst.0,
            worst.1,
            worst.2,
            worst.3
        ),
    )
}

fn c3_dyson_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let wg = guide(0.2);
    let (l, r) = ports(&wg, 0.02, 0.0);
    let sys = SystemSpec::new(
        wg,
        PortSpec {
            gamma: mhz(rng.random_range(100.0..600.0)),
            ..l
        },
        PortSpec {
            gamma: mhz(rng.random_range(100.0..600.0)),
            ..r
        },
        vec![],
    )
    .unwrap();
    let n = 2000;
    let p = TruncatedGreens::new(wg, n);
    let h = 0.5 * wg.length;
    let triples: Vec<(f64, f64, f64)> = (0..10)
        .map(|_| {
            (
                rng.random_range(-h..h),
                rng.random_range(-h..h),
                rng.random_range(0.8..1.2) * wg.omega_c,
            )
        })
        .collect();
    let worst = triples
        .par_iter()
        .map(|&(z, zp, w)| rel_err(gp(&sys, &p, z, zp, w).unwrap(), dyson_oracle(&sys, z, zp, w, n)))
        .reduce(|| 0.0, f64::max);
    outcome(worst < 1e-6, format!("max relative difference {worst:.2e} over 10 triples, 2000 modes (tol 1e-6)"))
}

fn c4_normalization() -> Outcome {
    // An explicit mode sum is a complete spectral representation, for which the
    // photonic weight is exactly 1 - Z.
    // A long guide, so the bound state can sit close enough to the cutoff to be mostly photonic.
    // Unbroadened: the lowest mode is only ~1e7 rad/s above the cutoff.
    let wg = exact_guide(1.0);
    let n_modes = 800;
    let configs = [
        (7.0, 37.0),
        (6.6, 10.0),
        (7.0, 60.0),
        (6.6, 30.0),
        (7.0, 150.0),
        (6.4, 60.0),
        (6.0, 100.0),
        (6.0, 30.0),
        (6.0, 10.0),
        (5.8, 5.0),
    ];
    let grid = linspace(-0.5 * wg.length, 0.5 * wg.length, 100_001);
    let p = TruncatedGreens::new(wg, n_modes);
    let mut worst = 0.0f64;
    let (mut zmin, mut zmax) = (1.0f64, 0.0f64);
    for (wq, g) in configs {
        let sys = system(wg, 0.01, 225.0, vec![qubit(0.013, wq, g, 0.5)]);
        let b = solve_bound_state(&sys, &p, 0).unwrap();
        let prof = photonic_wavefunction(&sys, &p, &b, &grid).unwrap();
        worst = worst.max((prof.integral - (1.0 - b.weight)).abs());
        zmin = zmin.min(b.weight);
        zmax = zmax.max(b.weight);
    }
    let spans = zmin <= 0.06 && zmax >= 0.98;
    outcome(
        worst < 1e-6 && spans,
        format!("max |integral - (1 - Z)| = {worst:.2e} (tol 1e-6), Z spans [{zmin:.3}, {zmax:.3}]"),
    )
}

fn c5_weight_closed_form() -> Outcome {
    let wg = guide(1.0);
    let p = PoleGreens(wg);
    let mut worst = 0.0f64;
    let mut min_wl = f64::INFINITY;
    for wq in [6.0, 6.2, 6.4] {
        for g in [50.0, 150.0, 300.0] {
            let sys = system(wg, 0.05, 225.0, vec![qubit(0.0, wq, g, 0.5)]);
            let b = solve_bound_state(&sys, &p, 0).unwrap();
            let wbar = (wg.omega_c.powi(2) - b.omega_b.powi(2)).sqrt();
            min_wl = min_wl.min(wbar * wg.length / wg.speed_c);
            let closed = quasiparticle_weight_closed(&wg, sys.gamma_eff(0).unwrap(), b.omega_b).unwrap();
            let numeric = quasiparticle_weight(&sys, &p, 0, b.omega_b).unwrap();
            worst = worst.max(rel(closed, numeric));
        }
    }
    outcome(
        worst < 1e-6 && min_wl > 20.0,
        format!("max relative difference {worst:.2e} (tol 1e-6), min wbar L/c = {min_wl:.1}"),
    )
}

fn c6_localization() -> Outcome {
    let wg = guide(1.0);
    let p = PoleGreens(wg);
    let z1 = 0.05;
    let sys = system(wg, 0.05, 225.0, vec![qubit(z1, 6.2, 150.0, 0.5)]);
    let b = solve_bound_state(&sys, &p, 0).unwrap();
    let xi = b.xi;
    let wl = wg.length / xi;
    let mut worst = 0.0f64;
    for side in [-1.0, 1.0] {
        let dist = linspace(0.0, 4.0 * xi, 81);
        let zs: Vec<f64> = if side > 0.0 {
            dist.iter().map(|d| z1 + d).collect()
        } else {
            dist.iter().rev().map(|d| z1 - d).collect()
        };
        let prof = photonic_wavefunction(&sys, &p, &b, &zs).unwrap();
        let mut d: Vec<f64> = zs.iter().map(|z| (z - z1).abs()).collect();
        let mut logd: Vec<f64> = prof.density.iter().map(|x| x.ln()).collect();
        if side < 0.0 {
            d.reverse();
            logd.reverse();
        }
        let s = slope(&d, &logd);
        worst = worst.max(rel(s, -2.0 / xi));
    }
    outcome(
        worst < 0.01 && wl > 20.0,
        format!("max relative slope deviation {worst:.2e} (tol 1e-2), wbar L/c = {wl:.1}"),
    )
}

fn c7_exchange_ladder() -> Outcome {
    let wg = guide(1.0);
    let p = PoleGreens(wg);
    let wc = wg.omega_c;
    // ladder at one separation
    let d = 0.12;
    let pair = system(
        wg,
        0.05,
        225.0,
        vec![qubit(-0.5 * d, 6.3, 40.0, 0.0), qubit(0.5 * d, 6.3, 40.0, 0.0)],
    );
    let det = solve_pair_determinant(&pair, &p).unwrap();
    let sc = splitting_selfconsistent(&pair, &p, det.omega_bar_b).unwrap();
    let lin = j_linear(&pair, &p, det.omega_bar_b).unwrap();
    let det_sc = rel(det.delta, sc.delta);
    let small = lin.delta < 0.02 * (wc - det.omega_bar_b);
    let sc_lin = rel(sc.delta, lin.delta);

    // exponential law at fixed mean frequency
    let wbar = det.omega_bar_b;
    let xi = localization_length(&wg, wbar).unwrap();
    let ds = linspace(2.0 * xi, 6.0 * xi, 9);
    let lnj: Vec<f64> = ds
        .iter()
        .map(|&d| {
            let s = system(
                wg,
                0.05,
                225.0,
                vec![qubit(-0.5 * d, 6.3, 40.0, 0.0), qubit(0.5 * d, 6.3, 40.0, 0.0)],
            );
            j_linear(&s, &p, wbar).unwrap().delta.ln()
        })
        .collect();
    let law = rel(slope(&ds, &lnj), -1.0 / xi);
    outcome(
        det_sc < 1e-6 && small && sc_lin < 0.02 && law < 0.02,
        format!(
            "det vs self-consistent {det_sc:.2e} (tol 1e-6); self-consistent vs linear {sc_lin:.2e} \
             (tol 2e-2, J/(omega_c - w) = {:.2e}); ln J slope deviation {law:.2e} (tol 2e-2)",
            lin.delta / (wc - det.omega_bar_b)
        ),
    )
}

fn c8_single_mode() -> Outcome {
    let wg = exact_guide(0.1);
    let eps1 = wg.modes().epsilon_of(1);
    let spacing = wg.mode_spacing();
    let mut worst = 0.0f64;
    for (offset, z) in [(0.005, 0.01), (-0.008, 0.02), (0.002, 0.0)] {
        let w = eps1 - offset * spacing;
        let sys = system(wg, 0.01, 225.0, vec![qubit(-z, 7.0, 40.0, 0.0), qubit(z, 7.0, 40.0, 0.0)]);
        let closed = j_single_mode(&sys, w).unwrap().j;
        let linear = j_linear(&sys, &SingleModeGreens(wg), w).unwrap().delta;
        worst = worst.max(rel(closed, linear));
    }
    let one = system(wg, 0.01, 225.0, vec![qubit(0.01, 7.0, 40.0, 0.0)]);
    let sm = purcell_single_mode(&one, 0, eps1, true).unwrap();
    let kappa_ok = sm.result.gamma_r == sm.kappa;
    outcome(
        worst < 1e-8 && kappa_ok,
        format!(
            "J single-mode vs linear {worst:.2e} (tol 1e-8); on-resonance rate {:.6e} vs kappa {:.6e}",
            sm.result.gamma_r, sm.kappa
        ),
    )
}

fn c9_purcell() -> Outcome {
    // ordering in a short cavity
    let cav = guide(0.05);
    let cav_sys = system(cav, 0.1 * cav.length, 225.0, vec![qubit(0.0, 6.0, 62.53, 0.0)]);
    let p = PoleGreens(cav);
    let mut ordered = true;
    let mut tightest = f64::INFINITY;
    for r in [0.8, 0.9, 0.95, 0.99] {
        let w = r * cav.omega_c;
        let inf = purcell_infinite(&cav_sys, &p, 0, w).unwrap().gamma_r;
        for n in [1, 5, 20] {
            let fin = purcell_finite(&cav_sys, 0, w, n).unwrap().gamma_r;
            ordered &= inf <= fin;
            tightest = tightest.min(fin / inf);
        }
    }
    // convergence of the mode sum in a long guide
    let long = guide(0.3);
    let long_sys = system(long, 0.1 * long.length, 225.0, vec![qubit(0.0, 6.0, 62.53, 0.0)]);
    let lp = PoleGreens(long);
    let conv = [0.8, 0.9, 0.95]
        .par_iter()
        .map(|&r| {
            let w = r * long.omega_c;
            let inf = purcell_infinite(&long_sys, &lp, 0, w).unwrap().gamma_r;
            let fin = purcell_finite(&long_sys, 0, w, 1_000_000).unwrap().gamma_r;
            rel(fin, inf)
        })
        .reduce(|| 0.0, f64::max);
    outcome(
        ordered && conv < 1e-3,
        format!(
            "Gamma_inf <= Gamma_N for N in {{1,5,20}}: {ordered} (min ratio {tightest:.3}, L = 5 cm); \
             10^6 modes vs closed form {conv:.2e} (tol 1e-3, L = 30 cm)"
        ),
    )
}

/// Frequency of the largest non-DC DFT component and the bin width, rad/s.
fn dominant_frequency(t: &[f64], x: &[f64]) -> (f64, f64) {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let span = t[n - 1] - t[0] + (t[1] - t[0]);
    let bin = TAU / span;
    let mut best = (0.0, 0.0);
    for k in 1..n / 2 {
        let f = k as f64 * bin;
        let c: Complex64 = t
            .iter()
            .zip(x)
            .map(|(&ti, &xi)| (xi - mean) * Complex64::from_polar(1.0, -f * (ti - t[0])))
            .sum();
        if c.norm() > best.1 {
            best = (f, c.norm());
        }
    }
    (best.0, bin)
}

fn c10_dynamics() -> Outcome {
    // steady state over a 5x5 grid
    let gamma = mhz(1.0);
    let mut ss_worst = 0.0f64;
    for a in [0.1, 0.3, 1.0, 3.0, 10.0] {
        for b in [-5.0, -2.5, 0.0, 2.5, 5.0] {
            let (rabi, delta) = (a * gamma, b * gamma);
            let drive = DriveSpec::new(delta, rabi, 1.0).unwrap();
            let fastest = rabi.max(gamma).max(delta.abs());
            let dt = 1.0 / (50.0 * fastest);
            let tr = simulate_bloch_rates(0.0, gamma, &drive, 50.0 / gamma, dt).unwrap();
            let last = *tr.emission.last().unwrap();
            ss_worst = ss_worst.max((last - steady_state_magnitude(gamma, rabi, delta)).abs());
        }
    }

    // generalized Rabi frequency of off-resonant columns
    let rabi = mhz(10.0);
    let g = 0.28 * rabi;
    let window = 30.0 * TAU / rabi;
    let t = linspace(0.0, window, 3001);
    let detunings: Vec<f64> = [1.5, 2.0, 3.0, -1.5, -2.5].iter().map(|k| k * rabi).collect();
    let map = chevron_map_rates(0.0, g, rabi, 2.0 * window, &detunings, &t).unwrap();
    let mut fft_ok = true;
    let mut fft_worst = 0.0f64;
    for (col, &d) in map.emission.iter().zip(&detunings) {
        let (f, bin) = dominant_frequency(&t, col);
        let target = rabi.hypot(d);
        fft_ok &= (f - target).abs() <= bin;
        fft_worst = fft_worst.max((f - target).abs() / bin);
    }

    // free decay after the pulse
    let tau = 2.0 / g;
    let drive = DriveSpec::new(0.3 * rabi, rabi, tau).unwrap();
    let dt = 1.0 / (50.0 * rabi.hypot(0.3 * rabi));
    let tr = simulate_bloch_rates(0.0, g, &drive, tau + 6.0 / g, dt).unwrap();
    let (ts, logs): (Vec<f64>, Vec<f64>) = tr
        .times
        .iter()
        .zip(&tr.emission)
        .filter(|(t, _)| **t > tau + 1e-12)
        .map(|(t, e)| (*t, e.ln()))
        .unzip();
    let decay = rel(slope(&ts, &logs), -0.5 * g);

    // chevron at the measured ratio Gamma_b/Omega_r = 0.28
    let (morph_ok, morph) = reference_chevron();

    outcome(
        ss_worst < 1e-6 && fft_ok && decay < 0.01 && morph_ok,
        format!(
            "steady state {ss_worst:.1e} (tol 1e-6); FFT offset {fft_worst:.2} bins (tol 1); \
             free-decay slope deviation {decay:.1e} (tol 1e-2); {morph}"
        ),
    )
}

fn reference_chevron() -> (bool, String) {
    let omega_b = ghz(6.077);
    let rabi = mhz(5.0);
    let gamma = 0.28 * rabi;
    let tau_p = 1.3e-6;
    let offsets = linspace(-4.0 * rabi, 4.0 * rabi, 41);
    let drives: Vec<f64> = offsets.iter().map(|d| omega_b + d).collect();
    let t = linspace(0.0, tau_p + 1.0e-6, 1201);
    let map = chevron_map_rates(omega_b, gamma, rabi, tau_p, &drives, &t).unwrap();

    let mut asym = 0.0f64;
    for i in 0..drives.len() {
        let j = drives.len() - 1 - i;
        for k in 0..t.len() {
            asym = asym.max((map.emission[i][k] - map.emission[j][k]).abs());
        }
    }
    let centre = &map.emission[20];
    let plateau: Vec<f64> = t
        .iter()
        .zip(centre)
        .filter(|(tt, _)| **tt > 0.8 * tau_p && **tt < tau_p)
        .map(|(_, e)| *e)
        .collect();
    let ss = steady_state_magnitude(gamma, rabi, 0.0);
    let flat = plateau.iter().map(|e| (e - ss).abs()).fold(0.0, f64::max) / ss;
    let (tt, lg): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(centre)
        .filter(|(tt, _)| **tt > tau_p)
        .map(|(tt, e)| (*tt, e.ln()))
        .unzip();
    let tail = rel(slope(&tt, &lg), -0.5 * gamma);
    // The Rabi transient has only decayed to ~exp(-3 Gamma t / 4) ~ 1e-3 by 0.8 tau_p.
    let ok = asym < 1e-8 && flat < 1e-2 && tail < 0.01;
    (
        ok,
        format!("chevron asymmetry {asym:.1e}, plateau deviation {flat:.1e}, tail slope deviation {tail:.1e}"),
    )
}

fn c11_lattice() -> Outcome {
    let t = mhz(100.0);
    let lat = LatticeSpec::new(50, t, 1e-3, ghz(6.5)).unwrap();
    let delta = mhz(10.0);
    let quad_worst = (0..=10)
        .map(|n| {
            let closed = lattice_i(&lat, n, delta).unwrap();
            let q = lattice_i_quadrature(&lat, n, delta, 1e-13).unwrap();
            rel(closed, q)
        })
        .fold(0.0, f64::max);

    let d_bb = 4.0 * t / 100.0;
    let bb_worst = (0..=10usize)
        .map(|n| {
            let bb = lattice_g0_broadband(&lat, 1, 1 + n, d_bb).unwrap();
            rel(bb, lattice_i(&lat, n as u32, d_bb).unwrap())
        })
        .fold(0.0, f64::max);

    let wg = guide(0.3);
    let a = 2e-3;
    let mapped = LatticeSpec::new(149, hopping_for_mass(wg.omega_c, wg.speed_c, a), a, wg.omega_c).unwrap();
    let mass = wg.omega_c / (wg.speed_c * wg.speed_c);
    let mass_err = rel(effective_mass(&mapped), mass);
    let decay_worst = [mhz(1.0), mhz(10.0), mhz(100.0)]
        .iter()
        .map(|&d| {
            rel(
                lattice_decay_constant(&mapped, d).unwrap(),
                quadratic_band_decay_constant(mass, d).unwrap(),
            )
        })
        .fold(mass_err, f64::max);
    outcome(
        quad_worst < 1e-8 && bb_worst < 0.05 && decay_worst < 1e-10,
        format!(
            "I_n closed vs quadrature {quad_worst:.1e} (tol 1e-8); broadband vs I_n {bb_worst:.1e} (tol 5e-2); \
             decay constants {decay_worst:.1e} (tol 1e-10)"
        ),
    )
}

fn c12_empty_spectrum() -> Outcome {
    let wc_ghz = OMEGA_C_GHZ;
    // middle half of the band between the cutoff and 8 GHz
    let (mid_lo, mid_hi) = (wc_ghz + 0.25 * (8.0 - wc_ghz), wc_ghz + 0.75 * (8.0 - wc_ghz));
    let stop_hi = wc_ghz - 0.3;
    let mut pass_ok = true;
    let mut stop_ok = true;
    let mut parts = Vec::new();
    for len in [0.2, 0.3, 0.5] {
        let wg = guide(len);
        let sys = system(wg, 0.02, 225.0, vec![]);
        let p = PoleGreens(wg);
        let mag = |f: f64| s_rl(&sys, &p, ghz(f)).unwrap().amplitude.norm();
        let pass: Vec<f64> = linspace(mid_lo, mid_hi, 2001).into_iter().map(mag).collect();
        let (lo, hi) = pass.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        let stop_db = linspace(5.5, stop_hi, 501)
            .into_iter()
            .map(|f| 20.0 * mag(f).log10())
            .fold(f64::NEG_INFINITY, f64::max);
        pass_ok &= lo >= 0.5 && hi <= 1.05;
        stop_ok &= stop_db < -20.0;
        parts.push(format!("L={len} m: |S| in [{lo:.3}, {hi:.3}], stopband max {stop_db:.1} dB"));
    }
    outcome(
        pass_ok && stop_ok,
        format!(
            "passband [0.5, 1.05] {}; stopband < -20 dB {}; {}",
            if pass_ok { "met" } else { "missed" },
            if stop_ok { "met" } else { "missed" },
            parts.join("; ")
        ),
    )
}

