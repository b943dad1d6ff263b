//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use heatctl::control::coefficients::compute_wnm_matrix;
use heatctl::control::pulse::delta_moment_residual;
use heatctl::control::spectra::{phi_difference_bound, phi_difference_norm, phi_l_eval, SQRT_2_OVER_PI};
use heatctl::control::{
    example_g_pm, example_wnm, z_terminal, CoefficientSet, ControlParams, Provenance, ResidualTarget,
};
use heatctl::example::ReferenceExample;
use heatctl::field::GridSpec;
use heatctl::hermite::{psi_scaled_eval, BasisSpec};
use heatctl::io;
use heatctl::quadrature::{inner_product, QuadratureRule, TensorRule};
use heatctl::simulation::{
    counterexample_norms, Experiment, ExperimentConfig, ExperimentOutcome, TraceError, GRID_SLACK,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn criterion<F: FnOnce() -> Verdict>(label: &str, limit: Option<Duration>, f: F) -> bool {
    let start = Instant::now();
    let v = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = v.pass && in_time;
    let limit_note = limit.map_or(String::new(), |l| format!(", limit {:.0}s", l.as_secs_f64()));
    println!(
        "{} {label}: {} [{:.2}s{limit_note}]",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        elapsed.as_secs_f64()
    );
    pass
}

fn orthonormality() -> Verdict {
    let mut worst = 0.0f64;
    for alpha in [2.0, 6.0] {
        let spec = BasisSpec::new(alpha, 12).unwrap();
        let rule = QuadratureRule::gauss_legendre(400, 12.0 * (2.0 * alpha).sqrt()).unwrap();
        for n in 0..=12 {
            for m in 0..=12 {
                let ip = inner_product(
                    &rule,
                    |x| psi_scaled_eval(&spec, n, x).unwrap(),
                    |x| psi_scaled_eval(&spec, m, x).unwrap(),
                )
                .unwrap();
                let delta = if n == m { 1.0 } else { 0.0 };
                worst = worst.max((ip - delta).abs());
            }
        }
    }
    verdict(worst < 1e-8, format!("max deviation {worst:.3e} (< 1e-8)"))
}

fn spectral_identity() -> Verdict {
    let t = 2.0;
    let mut worst = 0.0f64;
    for p in 0..=6 {
        for l in [10u32, 40, 200] {
            for k in 0..1000 {
                let s = -20.0 + 40.0 * k as f64 / 999.0;
                let z = z_terminal(p, l, t, s).unwrap();
                let phi = phi_l_eval(p, l, t, s);
                worst = worst.max((z + phi * SQRT_2_OVER_PI).norm());
            }
        }
    }
    verdict(
        worst < 1e-12,
        format!("max |z + sqrt(2/pi) phi^l| {worst:.3e} (< 1e-12)"),
    )
}

fn dual_route_w() -> Verdict {
    let params = ControlParams::new(2.0, 6.0, 6, 6, 200).unwrap();
    let ex = ReferenceExample::new(2.0);
    let f = move |a: f64, b: f64| ex.residual(a, b);
    let rule = TensorRule::default_for(2.0, 6.0).unwrap();
    let w = compute_wnm_matrix(&ResidualTarget::Callback(&f), &params, Some(&rule)).unwrap();
    let mut worst = 0.0f64;
    for n in 0..=6 {
        for m in 0..=6 {
            let exact = example_wnm(n, m, 2.0, 6.0).unwrap();
            worst = worst.max((w[[n, m]] - exact).abs() / exact.abs());
        }
    }
    verdict(worst < 1e-6, format!("max relative error {worst:.3e} (< 1e-6)"))
}

fn dual_route_g() -> Verdict {
    let params = ControlParams::new(2.0, 6.0, 6, 6, 200).unwrap();
    let w = ndarray::Array2::from_shape_fn((7, 7), |(n, m)| example_wnm(n, m, 2.0, 6.0).unwrap());
    let set = CoefficientSet::from_targets(&params, w, Provenance::ClosedForm).unwrap();
    let mut worst = 0.0f64;
    for p in 0..=6 {
        for m in 0..=6 {
            let exact = example_g_pm(p, m, 6, 2.0, 6.0).unwrap();
            worst = worst.max((set.g_pm[[p, m]] - exact).abs() / exact.abs());
        }
    }
    verdict(worst < 1e-10, format!("max relative error {worst:.3e} (< 1e-10)"))
}

struct Run {
    exp: Experiment,
    outcome: ExperimentOutcome,
}

fn run(n: usize, m: usize, l: u32) -> Run {
    let params = ControlParams::new(2.0, 6.0, n, m, l).unwrap();
    let exp = Experiment::prepare(&ExperimentConfig::example(params)).unwrap();
    let outcome = exp.run().unwrap();
    Run { exp, outcome }
}

fn end_to_end(coarse: &Run, fine: &Run) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [coarse, fine] {
        let rep = &r.outcome.report;
        let total = rep.budget.as_ref().map_or(f64::NAN, |b| b.total);
        let ok = rep.measured_error <= total + GRID_SLACK;
        pass &= ok;
        parts.push(format!(
            "({},{},{}) error {:.6e} <= budget {:.6e}",
            rep.params.n, rep.params.m, rep.params.l, rep.measured_error, total
        ));
    }
    let (a, b) = (coarse.outcome.report.measured_error, fine.outcome.report.measured_error);
    pass &= b < a;
    parts.push(format!("refined error smaller: {}", b < a));
    verdict(pass, parts.join("; "))
}

fn phi_bound() -> Verdict {
    let mut worst = 0.0f64;
    for p in 0..=4 {
        for l in [16u32, 64, 256] {
            let lhs = phi_difference_norm(p, l, 2.0).unwrap();
            worst = worst.max(lhs / phi_difference_bound(p, l, 2.0));
        }
    }
    verdict(worst <= 1.0, format!("max norm / bound {worst:.4} (<= 1)"))
}

fn response_bound(runs: &[&Run]) -> Verdict {
    let mut pass = true;
    let mut worst = 0.0f64;
    for r in runs {
        let probe = ExperimentConfig {
            time_probes: Some(vec![0.5, 1.0, 2.0]),
            ..r.exp.config().clone()
        };
        let exp = Experiment::prepare(&probe).unwrap();
        for c in exp.response_bound_checks(&r.outcome.admissibility).unwrap() {
            if c.name.starts_with("control-response") {
                pass &= c.lhs <= c.rhs;
                worst = worst.max(c.lhs / c.rhs);
            }
        }
    }
    verdict(pass, format!("max ||W_u(t)|| / (2 t^(1/4) ||g||) {worst:.4} (<= 1)"))
}

fn strictly_decreasing(errs: &[TraceError], probes: &[f64]) -> Vec<(f64, Vec<f64>)> {
    probes
        .iter()
        .map(|&t| (t, errs.iter().filter(|e| e.t == t).map(|e| e.error).collect::<Vec<_>>()))
        .filter(|(_, seq)| !(seq.len() == 3 && seq.windows(2).all(|w| w[1] < w[0])))
        .collect()
}

/// Checked on the 1024^2 grid over the same domain: at 512^2 the offset
/// `4h` exceeds the boundary layer left just after the last pulse of the
/// (3,3,10) control. The 512^2 outcome is reported alongside.
fn trace_decrease(runs: &[&Run]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in runs {
        let cfg = r.exp.config();
        let fine = cfg.clone().with_grid(GridSpec::square(40.0, 1024).unwrap());
        let probes = fine.probes();
        let errs = Experiment::prepare(&fine).unwrap().trace_consistency().unwrap();
        let bad = strictly_decreasing(&errs, &probes);
        pass &= bad.is_empty();
        for (t, seq) in bad {
            let s: Vec<String> = seq.iter().map(|v| format!("{v:.3e}")).collect();
            parts.push(format!("l={} t={t} at 1024^2: {}", cfg.params.l, s.join(" ")));
        }
        let coarse_bad = strictly_decreasing(&r.outcome.report.trace_errors, &cfg.probes());
        for (t, seq) in coarse_bad {
            let s: Vec<String> = seq.iter().map(|v| format!("{v:.3e}")).collect();
            parts.push(format!(
                "(info) l={} t={t} at 512^2 not monotone: {}",
                cfg.params.l,
                s.join(" ")
            ));
        }
    }
    if pass {
        parts.insert(0, "strictly decreasing at every probe on 1024^2".into());
    }
    verdict(pass, parts.join("; "))
}

fn counterexample() -> Verdict {
    let rep = counterexample_norms(2.0, 6).unwrap();
    let increasing = rep.rows.windows(2).all(|w| w[1].norm > w[0].norm);
    let target = 2f64.powf(0.25);
    let ratios_ok = rep
        .increment_ratios
        .iter()
        .all(|r| (0.9 * target..=1.1 * target).contains(r));
    let spots_ok = rep.spot_checks.iter().all(|s| s.pass);
    let (lo, hi) = rep
        .increment_ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    verdict(
        increasing && ratios_ok && spots_ok,
        format!("norms increasing {increasing}; ratios in [{lo:.6}, {hi:.6}]; spot values above bound {spots_ok}"),
    )
}

fn pulse_moments() -> Verdict {
    let mut exact = 0.0f64;
    let mut worst_halving = 0.0f64;
    for p in 0..=3 {
        let mut mono = vec![0.0; p + 1];
        mono[p] = 1.0;
        let mut next = vec![0.0; p + 2];
        next[p + 1] = 1.0;
        for l in [10u32, 20, 40, 80] {
            exact = exact.max(delta_moment_residual(p, l, &mono).unwrap());
            let r1 = delta_moment_residual(p, l, &next).unwrap();
            let r2 = delta_moment_residual(p, 2 * l, &next).unwrap();
            worst_halving = worst_halving.max((r2 / r1 / 0.5 - 1.0).abs());
        }
    }
    verdict(
        exact < 1e-12 && worst_halving <= 0.2,
        format!("degree-p residual {exact:.3e} (< 1e-12); halving deviation {worst_halving:.3e} (<= 0.2)"),
    )
}

fn figures(coarse: &Run, fine: &Run) -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut missing = Vec::new();
    for (name, r) in [("coarse", coarse), ("fine", fine)] {
        let d = dir.path().join(name);
        io::write_field_with_manifest(&d, "difference", &r.outcome.difference).unwrap();
        io::write_sections(&d, &r.outcome.target, &r.outcome.end_state).unwrap();
        let x2 = io::linspace(-10.0, 10.0, 81);
        let xi = io::linspace(0.0, r.exp.config().params.pulse_support_end().min(2.0), 41);
        io::write_control_csv(d.join("control.csv"), &r.outcome.control, &x2, &xi).unwrap();
        io::write_plot_scripts(&d).unwrap();
        for f in [
            "difference.csv",
            "difference.json",
            "section_x2.csv",
            "section_x1.csv",
            "control.csv",
            "plot_difference.py",
            "plot_sections.py",
            "plot_control.py",
        ] {
            if !d.join(f).is_file() {
                missing.push(format!("{name}/{f}"));
            }
        }
    }
    let header = |p: &std::path::Path| {
        std::fs::read_to_string(p)
            .ok()
            .and_then(|s| s.lines().next().map(String::from))
    };
    let headers_ok = header(&dir.path().join("coarse/section_x2.csv")).as_deref() == Some("x1,target,state,difference")
        && header(&dir.path().join("coarse/section_x1.csv")).as_deref() == Some("x2,target,state,difference");
    let a: io::FieldManifest = io::read_json(dir.path().join("coarse/difference.json")).unwrap();
    let b: io::FieldManifest = io::read_json(dir.path().join("fine/difference.json")).unwrap();
    let decreasing = b.norm < a.norm;
    verdict(
        missing.is_empty() && headers_ok && decreasing,
        format!(
            "files complete {}; section headers {headers_ok}; difference norm {:.4e} -> {:.4e}",
            missing.is_empty(),
            a.norm,
            b.norm
        ),
    )
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut all = true;
    all &= criterion("1 basis orthonormality", Some(secs(10)), orthonormality);
    all &= criterion("2 spectral identity", Some(secs(5)), spectral_identity);
    all &= criterion("3 dual-route W_nm", Some(secs(60)), dual_route_w);
    all &= criterion("4 dual-route g_pm", Some(secs(1)), dual_route_g);

    let start = Instant::now();
    let coarse = run(3, 3, 10);
    let fine = run(6, 6, 200);
    let shared = start.elapsed();
    all &= criterion("5 example end-to-end", Some(secs(120).saturating_sub(shared)), || {
        end_to_end(&coarse, &fine)
    });
    all &= criterion("6 phi approximation bound", None, phi_bound);
    all &= criterion("7 response bound", None, || response_bound(&[&coarse, &fine]));
    all &= criterion("8 boundary trace", None, || trace_decrease(&[&coarse, &fine]));
    all &= criterion("9 counterexample", None, counterexample);
    all &= criterion("10 pulse moments", None, pulse_moments);
    all &= criterion("figures file-level", None, || figures(&coarse, &fine));
    println!(
        "experiments: {:.2}s shared by criteria 5, 7, 8 and figures",
        shared.as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
