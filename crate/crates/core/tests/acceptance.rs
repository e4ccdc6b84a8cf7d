//! Acceptance suite. Each test prints one `[PASS]` or `[FAIL]` line; run with
//! `cargo test -p pbg-core --test acceptance -- --nocapture` to see them.

use std::f64::consts::PI;
use std::fs;

use pbg_core::dynamics::{convergence_check, solve_b2, solve_c2, steady_state_c2};
use pbg_core::emission::emission_value;
use pbg_core::reservoir::{kernel_laplace, kernel_laplace_on_axis, kernel_time};
use pbg_core::scenario::{execute, presets, reproduce_figure, select, OutputFormat};
use pbg_core::susceptibility::chi_value;
use pbg_core::{
    find_peaks, spectrum_eval, spectrum_from_trajectory, Complex64, DetuningGrid, EmissionParams,
    ProbeParams, ReservoirModel, SolverGrid,
};

const EDGE_OFFSET: f64 = 1e-6;

fn verdict(criterion: u32, title: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("[PASS] criterion {criterion}: {title}");
    } else {
        println!("[FAIL] criterion {criterion}: {title}");
        for f in failures {
            println!("         {f}");
        }
    }
    assert!(
        failures.is_empty(),
        "criterion {criterion} failed: {failures:#?}"
    );
}

fn double(lo: f64, hi: f64) -> ReservoirModel {
    ReservoirModel::double_band(1.0, lo, hi).unwrap()
}

fn default_grid() -> Vec<f64> {
    DetuningGrid::default().samples()
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Gap edges used by the emission figures and, again, by the susceptibility figures.
const FIGURE_GAPS: [(f64, f64); 6] = [
    (-1.0, 0.0),
    (-2.0, 0.0),
    (-3.0, 0.0),
    (-1.0, 1.0),
    (-2.0, 2.0),
    (-3.0, 3.0),
];

#[test]
fn criterion_01_dark_lines() {
    let mut failures = Vec::new();
    for (lo, hi) in FIGURE_GAPS {
        let model = double(lo, hi);
        let params = EmissionParams::new(1.0, model);
        let spectrum =
            spectrum_eval(&params, &DetuningGrid::default().samples_snapped(&[lo, hi])).unwrap();
        let max = spectrum.max_value();
        for edge in [lo, hi] {
            if emission_value(&params, edge) != 0.0 {
                failures.push(format!("({lo},{hi}): S({edge}) != 0"));
            }
            for offset in [-EDGE_OFFSET, EDGE_OFFSET] {
                let s = emission_value(&params, edge + offset);
                if s >= 1e-4 * max {
                    failures.push(format!("({lo},{hi}): S({edge}{offset:+e}) = {s:e}"));
                }
            }
        }
        if spectrum.dark_lines != vec![lo, hi] {
            failures.push(format!("({lo},{hi}): dark lines {:?}", spectrum.dark_lines));
        }
    }
    verdict(1, "spectrum vanishes at every band edge", &failures);
}

#[test]
fn criterion_02_transparency() {
    let mut failures = Vec::new();
    for (lo, hi) in FIGURE_GAPS {
        let params = ProbeParams::new(1.0, double(lo, hi));
        let max = default_grid()
            .iter()
            .map(|&d| chi_value(&params, d).norm())
            .fold(0.0, f64::max);
        for edge in [lo, hi] {
            if chi_value(&params, edge) != Complex64::new(0.0, 0.0) {
                failures.push(format!("({lo},{hi}): chi({edge}) != 0"));
            }
            for offset in [-EDGE_OFFSET, EDGE_OFFSET] {
                let ratio = chi_value(&params, edge + offset).norm() / max;
                if ratio >= 1e-3 {
                    failures.push(format!(
                        "({lo},{hi}): |chi({edge}{offset:+e})| / max|chi| = {ratio:.6e}"
                    ));
                }
            }
        }
    }
    verdict(2, "susceptibility vanishes at every band edge", &failures);
}

#[test]
fn criterion_03_markovian_limits() {
    let mut failures = Vec::new();
    let gamma = 1.0;
    let chi0 = 1.0;
    let emission = EmissionParams::new(gamma, ReservoirModel::None);
    let probe = ProbeParams::new(gamma, ReservoirModel::None).with_chi0(chi0);
    let grid = default_grid();
    assert_eq!(grid.len(), 2001);
    let spectrum = spectrum_eval(&emission, &grid).unwrap();
    let mut worst_s: f64 = 0.0;
    let mut worst_chi: f64 = 0.0;
    for (i, &d) in grid.iter().enumerate() {
        let exact = gamma / (d * d + gamma * gamma / 4.0);
        worst_s = worst_s.max(relative(spectrum.values[i], exact));
        let exact_chi = -chi0 / Complex64::new(d, -gamma / 2.0);
        worst_chi = worst_chi.max((chi_value(&probe, d) - exact_chi).norm() / exact_chi.norm());
    }
    if worst_s > 1e-12 {
        failures.push(format!("S relative error {worst_s:e}"));
    }
    if worst_chi > 1e-12 {
        failures.push(format!("chi relative error {worst_chi:e}"));
    }
    verdict(3, "Lorentzian limits without a reservoir", &failures);
}

#[test]
fn criterion_04_branch_physics() {
    let mut failures = Vec::new();
    let models = [
        double(-1.0, 1.0),
        double(-3.0, 0.0),
        double(0.5, 2.5),
        ReservoirModel::double_band(2.0, -0.3, 0.2).unwrap(),
        ReservoirModel::single_band(1.0, 0.0).unwrap(),
    ];
    for model in models {
        let mut inside_checked = 0;
        for i in 0..10_000 {
            let d = -10.0 + 20.0 * (i as f64 + 0.5) / 10_000.0;
            let Some(k) = kernel_laplace_on_axis(&model, d).finite() else {
                continue;
            };
            if k.re < -1e-12 {
                failures.push(format!("{model:?}: Re K({d}) = {:e}", k.re));
            }
            if model.in_gap(d) {
                inside_checked += 1;
                if k.re > 1e-12 {
                    failures.push(format!("{model:?}: Re K({d}) = {:e} inside gap", k.re));
                }
            }
        }
        if inside_checked == 0 {
            failures.push(format!("{model:?}: scan never entered the gap"));
        }
    }
    verdict(
        4,
        "kernel real part: non-negative, zero inside the gap",
        &failures,
    );
}

#[test]
fn criterion_05_symmetric_gap() {
    let mut failures = Vec::new();
    let grid = default_grid();
    let n = grid.len();
    for d in [1.0, 2.0, 3.0] {
        let model = double(-d, d);
        let e = EmissionParams::new(1.0, model);
        let p = ProbeParams::new(1.0, model);
        let (mut ws, mut wa, mut wd): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for i in 0..n {
            assert_eq!(grid[i], -grid[n - 1 - i]);
            let (x, y) = (grid[i], grid[n - 1 - i]);
            ws = ws.max(relative(emission_value(&e, x), emission_value(&e, y)));
            let (cx, cy) = (chi_value(&p, x), chi_value(&p, y));
            wa = wa.max(relative(-cx.im, -cy.im));
            wd = wd.max(relative(cx.re, -cy.re));
        }
        for (what, worst) in [("S", ws), ("absorption", wa), ("dispersion", wd)] {
            if worst > 1e-12 {
                failures.push(format!("(-{d},{d}) {what}: {worst:e}"));
            }
        }
    }
    verdict(5, "mirror symmetry in a centred gap", &failures);
}

/// Integral of `K(t) exp(-s t)` over `t > 0` with `t = v^2`, composite
/// five-point Gauss-Legendre in `v`.
fn laplace_quadrature(model: &ReservoirModel, s: Complex64) -> Complex64 {
    const NODES: [(f64, f64); 5] = [
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.0, 0.568_888_888_888_888_9),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let v_max = (40.0 / s.re).sqrt();
    let pieces = 20_000;
    let dv = v_max / pieces as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..pieces {
        let mid = (k as f64 + 0.5) * dv;
        for (x, w) in NODES {
            let v = mid + 0.5 * dv * x;
            let t = v * v;
            let f = kernel_time(model, t).unwrap() * (-s * t).exp() * 2.0 * v;
            sum += f * w * 0.5 * dv;
        }
    }
    sum
}

#[test]
fn criterion_06_laplace_pair() {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for model in [
        double(-2.0, 0.5),
        ReservoirModel::single_band(1.5, 1.0).unwrap(),
    ] {
        for re in [0.1, 0.4, 1.0, 2.5, 5.0] {
            for im in [-3.0, -0.5, 1.0, 4.0] {
                let s = Complex64::new(re, im);
                let closed = kernel_laplace(&model, s).unwrap();
                let quad = laplace_quadrature(&model, s);
                let err = (closed - quad).norm() / closed.norm();
                worst = worst.max(err);
                if err > 1e-3 {
                    failures.push(format!("{model:?} s={s}: relative error {err:e}"));
                }
            }
        }
    }
    println!("         worst relative error {worst:.3e}");
    verdict(6, "time kernel and Laplace closed form agree", &failures);
}

#[test]
fn criterion_07_time_frequency_crosscheck() {
    let mut failures = Vec::new();
    for preset in select("fig2b").unwrap() {
        let mut config = preset.config.clone();
        config.task = pbg_core::scenario::Task::Crosscheck;
        config.grid = DetuningGrid::new(-4.0, 4.0, 801).unwrap();
        config.solver = SolverGrid::new(120.0, 24_000).unwrap();
        let params = EmissionParams::new(config.gamma, config.model);
        let grid = config.grid.samples_snapped(&config.model.band_edges());
        let frequency = spectrum_eval(&params, &grid).unwrap();
        let traj = solve_b2(&params, &config.solver).unwrap();
        let time = spectrum_from_trajectory(&traj, &params, &grid).unwrap();
        let deviation = frequency
            .values
            .iter()
            .zip(&time.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / frequency.max_value();
        println!(
            "         {}: max relative deviation {deviation:.3e}",
            preset.name
        );
        if deviation >= 0.02 {
            failures.push(format!("{}: deviation {deviation:e}", preset.name));
        }
        // the scenario path must report the same figure
        let (table, failure) = execute(&config).unwrap();
        if failure.is_some() || table.metadata["max_rel_dev"].as_f64() != Some(deviation) {
            failures.push(format!("{}: scenario crosscheck disagrees", preset.name));
        }
    }
    verdict(
        7,
        "time-domain spectrum matches closed form within 2%",
        &failures,
    );
}

#[test]
fn criterion_08_steady_state_probe() {
    let mut failures = Vec::new();
    let params = ProbeParams::new(1.0, double(-1.0, 1.0));
    let omega = 0.01;
    let grid = SolverGrid::new(400.0, 20_000).unwrap();
    let detunings = [-3.0, -2.0, -1.4, -0.7, -0.3, 0.0, 0.4, 0.75, 1.5, 2.6];
    for d in detunings {
        assert!(params
            .reservoir
            .band_edges()
            .iter()
            .all(|e| (d - e).abs() >= 0.2));
        let steady = steady_state_c2(&params, omega, d).unwrap().value;
        let traj = solve_c2(&params, omega, d, &grid).unwrap();
        let err = (traj.final_value() - steady).norm() / steady.norm();
        if err > 1e-3 {
            failures.push(format!("delta {d}: time-domain tail off by {err:e}"));
        }
        let chi = chi_value(&params, d);
        let from_amplitude = -params.chi0 * steady.conj() / omega;
        let rounding = (chi - from_amplitude).norm() / chi.norm();
        if rounding > 1e-14 {
            failures.push(format!(
                "delta {d}: chi and amplitude differ by {rounding:e}"
            ));
        }
    }
    verdict(
        8,
        "driven amplitude settles on the closed-form steady state",
        &failures,
    );
}

#[test]
fn criterion_09_single_band_approach() {
    let mut failures = Vec::new();
    let grid = DetuningGrid::new(-1.0, 3.0, 2001).unwrap().samples();
    let h = grid[1] - grid[0];
    let single = EmissionParams::new(1.0, ReservoirModel::single_band(1.0, 0.0).unwrap());
    let reference: Vec<f64> = grid.iter().map(|&d| emission_value(&single, d)).collect();
    let mut distances = Vec::new();
    for lo in [-1.0, -2.0, -3.0, -6.0, -12.0] {
        let params = EmissionParams::new(1.0, double(lo, 0.0));
        let sum: f64 = grid
            .iter()
            .zip(&reference)
            .map(|(&d, r)| (emission_value(&params, d) - r).powi(2))
            .sum();
        distances.push((sum * h).sqrt());
    }
    println!("         L2 distances {distances:.4?}");
    if !distances.windows(2).all(|w| w[1] < w[0]) {
        failures.push(format!("not strictly decreasing: {distances:?}"));
    }
    verdict(9, "wider gaps approach the single-band spectrum", &failures);
}

#[test]
fn criterion_10_figure_structure() {
    let mut failures = Vec::new();
    let grid = |lo: f64, hi: f64| DetuningGrid::default().samples_snapped(&[lo, hi]);
    for (lo, hi) in [(-1.0, 1.0), (-2.0, 2.0), (-3.0, 3.0)] {
        let s = spectrum_eval(&EmissionParams::new(1.0, double(lo, hi)), &grid(lo, hi)).unwrap();
        if s.peaks.len() != 3 || s.dark_lines.len() != 2 {
            failures.push(format!(
                "({lo},{hi}): {} peaks, {} zeros",
                s.peaks.len(),
                s.dark_lines.len()
            ));
        }
    }
    let s = spectrum_eval(
        &EmissionParams::new(1.0, double(-3.0, 0.0)),
        &grid(-3.0, 0.0),
    )
    .unwrap();
    let peaks = find_peaks(&s);
    let central = peaks.iter().map(|p| p.1).fold(0.0, f64::max);
    match peaks.first() {
        Some(&(at, height)) if height < 0.25 * central => {
            println!(
                "         (-3,0) left peak at {at:.3}: {:.2}% of central",
                100.0 * height / central
            );
        }
        other => failures.push(format!(
            "(-3,0) left peak not suppressed: {other:?} vs {central}"
        )),
    }
    for (lo, hi) in [(-1.0, 1.0), (-2.0, 2.0), (-3.0, 3.0)] {
        let config = select(&format!("fig6{}", ["a", "b", "c"][(-lo) as usize - 1]))
            .unwrap()
            .remove(0)
            .config;
        let (table, _) = execute(&config).unwrap();
        let slopes = table.metadata["group_slopes"].as_array().unwrap();
        if slopes.len() != 2 {
            failures.push(format!("({lo},{hi}): {} transparency slopes", slopes.len()));
        }
        for pair in slopes {
            let slope = pair[1].as_f64().unwrap();
            if slope <= 0.0 {
                failures.push(format!("({lo},{hi}): slope {slope} at {}", pair[0]));
            }
        }
    }
    verdict(10, "peaks, zeros and slow-light slopes", &failures);
}

#[test]
fn criterion_11_solver_convergence() {
    let mut failures = Vec::new();
    let singular = EmissionParams::new(1.0, double(-1.0, 1.0));
    let report = convergence_check(
        |g| solve_b2(&singular, g),
        SolverGrid::new(10.0, 500).unwrap(),
        3,
    )
    .unwrap();
    println!("         singular kernel orders {:.3?}", report.orders);
    if report.observed_order.is_nan() || report.observed_order < 0.9 {
        failures.push(format!("singular kernel order {}", report.observed_order));
    }
    let markov = ProbeParams::new(1.0, ReservoirModel::None);
    let report = convergence_check(
        |g| solve_c2(&markov, 0.01, 0.5, g),
        SolverGrid::new(10.0, 200).unwrap(),
        3,
    )
    .unwrap();
    println!("         Markovian orders {:.3?}", report.orders);
    if (report.observed_order - 2.0).abs() > 0.1 {
        failures.push(format!("Markovian order {}", report.observed_order));
    }
    verdict(11, "solver convergence order", &failures);
}

#[test]
fn criterion_12_determinism() {
    let mut failures = Vec::new();
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    for preset in presets() {
        let a = reproduce_figure(preset.name, first.path(), OutputFormat::Csv).unwrap();
        let b = reproduce_figure(preset.name, second.path(), OutputFormat::Csv).unwrap();
        for (x, y) in a.iter().zip(&b) {
            if fs::read(x).unwrap() != fs::read(y).unwrap() {
                failures.push(format!("{} differs between runs", x.display()));
            }
        }
    }
    let written = fs::read_dir(first.path()).unwrap().count();
    if written != 16 {
        failures.push(format!("{written} preset files written"));
    }
    verdict(
        12,
        "figure presets are byte-identical across runs",
        &failures,
    );
}

#[test]
fn laplace_oracle_sanity() {
    // single band with edge at zero: K~(s) = e^{-i pi/4} / sqrt(s)
    let model = ReservoirModel::single_band(1.0, 0.0).unwrap();
    let s = Complex64::new(1.0, 0.0);
    let expected = Complex64::from_polar(1.0, -PI / 4.0);
    assert!((laplace_quadrature(&model, s) - expected).norm() < 1e-6);
}
