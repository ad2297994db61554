//! One function per subcommand; each returns a [`Report`].

use gravmetro::estimator::{crb_validation_report, TrialResult};
use gravmetro::metrology::qfi::{appendix_relative_bound_x, AppendixPath};
use gravmetro::metrology::{
    bound_l, bound_rs, figure_of_merit, fisher_matrix_rs_l, printed_bound_l, printed_bound_rs,
    scheme_relative_bound_x, scheme_relative_bound_x_nbar, x_from_link, CentralMatrixMode, SchemeKind, SchemeSpec,
};
use gravmetro::wavepacket::{channel_params, ln_overlap_from_delta, overlap_perturbative, propagate};
use gravmetro::{GaussianWavepacket, ObserverPair, PacketPreset, SqueezingConvention};
use rayon::prelude::*;

use crate::error::{CliError, Context};
use crate::output::{Cell, Report};
use crate::scenario::{check_replicas, Resolved, Scenario};

const F_METRIC: &str = "f(r) = 1 - r_s/r";
const F_REDSHIFT: &str = "Omega_B/Omega_A = sqrt(f(r_A)/f(r_B))";
const F_DELTA: &str = "delta = (f(r_A)/f(r_B))^(1/4) - 1";
const F_DELTA_APPROX: &str = "delta ~ -(r_s/4) L/(r_A r_B)";
const F_PROPER_TIME: &str = "tau_B/tau_A = sqrt(f(r_B)/f(r_A))";
const F_OVERLAP: &str = "Theta = sqrt(2/(1+(1+delta)^2)) (1+delta)^-1 exp(-delta^2 Omega0^2/(4(1+(1+delta)^2) sigma^2))";
const F_X: &str = "x = delta^2 Omega0^2/(8 sigma^2)";
const F_FISHER: &str = "Q = Q_dd grad(delta) grad(delta)^T";
const F_FISHER_BOUND: &str = "dr_s/r_s = 1/(r_s sqrt(N Q_rs_rs))";
const F_FOM: &str = "sigma r_A^2/(Omega sinh r sqrt(N) r_s L)";

/// Metadata shared by every report.
fn describe(report: &mut Report, res: &Resolved) {
    report.meta("units", "lengths in m; Omega0 and sigma in cyclic Hz (only Omega0/sigma enters)");
    report.meta("r_s", format!("{:e} m", res.geometry.r_s()));
    report.meta("r_A", format!("{:e} m", res.pair.r_a));
    report.meta("r_B", format!("{:e} m", res.pair.r_b));
    report.meta("L", format!("{:e} m", res.pair.separation()));
    report.meta("scheme", res.scheme.kind.name());
    report.meta("seed", res.seed.to_string());
}

pub fn redshift(res: &Resolved) -> Result<Report, CliError> {
    let (g, p) = (&res.geometry, &res.pair);
    let mut r = Report::new("redshift", &["quantity", "value", "formula"]);
    describe(&mut r, res);
    let delta = g.delta_exact(p).context("delta")?;
    let rows: [(&str, f64, &str); 9] = [
        ("f(r_A)", g.metric_function(p.r_a).context("r_a")?, F_METRIC),
        ("f(r_B)", g.metric_function(p.r_b).context("r_b")?, F_METRIC),
        ("1-f(r_A)", g.compactness(p.r_a).context("r_a")?, "r_s/r_A"),
        ("1-f(r_B)", g.compactness(p.r_b).context("r_b")?, "r_s/r_B"),
        ("Omega_B/Omega_A", g.redshift_ratio(p).context("redshift")?, F_REDSHIFT),
        ("Omega_B/Omega_A-1", delta * (2.0 + delta), "(1 + delta)^2 - 1"),
        ("delta_exact", delta, F_DELTA),
        ("delta_approx", g.delta_approx(p).context("delta")?, F_DELTA_APPROX),
        ("tau_B/tau_A", g.proper_time_ratio(p).context("proper time")?, F_PROPER_TIME),
    ];
    for (q, v, f) in rows {
        r.push(vec![q.into(), v.into(), f.into()]);
    }
    Ok(r)
}

pub fn overlap(res: &Resolved) -> Result<Report, CliError> {
    let (g, p) = (&res.geometry, &res.pair);
    let mut r = Report::new("overlap", &["mode", "quantity", "value", "formula"]);
    describe(&mut r, res);
    let delta = g.delta_exact(p).context("delta")?;
    for (k, packet) in res.scheme.packets(res.packet.sigma).context("packet")?.iter().enumerate() {
        let received = propagate(packet, g, p).context("propagate")?;
        let ch = channel_params(packet, g, p).context("overlap")?;
        let pert = overlap_perturbative(&received, delta);
        let rows: [(&str, f64, &str); 11] = [
            ("omega0_sent", packet.omega0, "input"),
            ("sigma_sent", packet.sigma, "input"),
            ("omega0_received", received.omega0, F_REDSHIFT),
            ("sigma_received", received.sigma, F_REDSHIFT),
            ("delta", delta, F_DELTA),
            ("theta", ch.theta, F_OVERLAP),
            ("ln_theta", ln_overlap_from_delta(delta, &received).context("overlap")?, F_OVERLAP),
            ("q", ch.q, "q = 1 - Theta^2"),
            ("x", ch.x, F_X),
            ("theta_perturbative", pert.theta, "Theta ~ 1 - x"),
            ("regime_parameter", pert.regime_parameter, "(delta Omega0/sigma)^2"),
        ];
        for (q, v, f) in rows {
            r.push(vec![(k + 1).into(), q.into(), v.into(), f.into()]);
        }
        r.push(vec![(k + 1).into(), "single_photon_fidelity".into(), ch.single_photon_fidelity().into(), "|Theta|^2".into()]);
    }
    Ok(r)
}

fn fisher_bound_rs(res: &Resolved, mode: CentralMatrixMode) -> Result<f64, CliError> {
    let q = fisher_matrix_rs_l(&res.scheme, &res.geometry, &res.pair, res.packet.sigma, mode).context("fisher matrix")?;
    Ok(1.0 / (res.geometry.r_s() * (res.n * q.matrix[(0, 0)]).sqrt()))
}

pub fn bounds(res: &Resolved) -> Result<Report, CliError> {
    let (g, p, s, sigma, n) = (&res.geometry, &res.pair, &res.scheme, res.packet.sigma, res.n);
    let mut r = Report::new(
        "bounds",
        &["parameter", "scheme", "N", "n_bar", "bound", "bound_at_4N", "ratio_4N", "formula"],
    );
    describe(&mut r, res);
    let x = x_from_link(s, g, p, sigma).context("x")?;
    r.meta("x", format!("{x:e}"));
    let mut push = |name: &str, at: &dyn Fn(f64) -> Result<f64, CliError>, formula: String| -> Result<(), CliError> {
        let (b1, b4) = (at(n)?, at(4.0 * n)?);
        r.push(vec![
            name.into(),
            s.kind.name().into(),
            n.into(),
            s.mean_photon_number().into(),
            b1.into(),
            b4.into(),
            (b4 / b1).into(),
            formula.into(),
        ]);
        Ok(())
    };
    let bx = scheme_relative_bound_x(s, x, n).context("bound on x")?;
    push("x", &|m| Ok(scheme_relative_bound_x(s, x, m).context("bound on x")?.relative_error_bound), bx.formula)?;
    let brs = bound_rs(s, g, p, sigma, n).context("bound on r_s")?;
    push("r_s", &|m| Ok(bound_rs(s, g, p, sigma, m).context("bound on r_s")?.relative_error_bound), brs.formula)?;
    let bl = bound_l(s, g, p, sigma, n).context("bound on L")?;
    push("L", &|m| Ok(bound_l(s, g, p, sigma, m).context("bound on L")?.relative_error_bound), bl.formula)?;
    if s.kind != SchemeKind::Coherent {
        push(
            "r_s_printed",
            &|m| Ok(printed_bound_rs(s, g, p, sigma, m).context("printed bound")?.unwrap_or(f64::NAN)),
            "closed-form dr_s/r_s".into(),
        )?;
        push(
            "L_printed",
            &|m| Ok(printed_bound_l(s, g, p, sigma, m).context("printed bound")?.unwrap_or(f64::NAN)),
            "closed-form dL/L".into(),
        )?;
    }
    for mode in CentralMatrixMode::ALL {
        let scaled = |m: f64| fisher_bound_rs(&Resolved { n: m, ..res.clone() }, mode);
        push(&format!("r_s_fisher_{}", mode.name()), &scaled, F_FISHER_BOUND.into())?;
    }
    Ok(r)
}

pub fn fisher(res: &Resolved) -> Result<Report, CliError> {
    let (g, p) = (&res.geometry, &res.pair);
    let mut r = Report::new(
        "fisher-matrix",
        &[
            "mode", "Q_rs_rs", "Q_rs_L", "Q_L_L", "q_delta", "det", "det_over_norm2", "ratio_LL", "k_squared",
            "ratio_rL", "k", "formula",
        ],
    );
    describe(&mut r, res);
    let (r_a, l) = (p.r_a, p.separation());
    let k = r_a * g.r_s() / (l * (l + r_a));
    for mode in CentralMatrixMode::ALL {
        let q = fisher_matrix_rs_l(&res.scheme, g, p, res.packet.sigma, mode).context("fisher matrix")?;
        let m = q.matrix;
        r.push(vec![
            mode.name().into(),
            m[(0, 0)].into(),
            m[(0, 1)].into(),
            m[(1, 1)].into(),
            q.q_delta.into(),
            q.determinant().into(),
            (q.determinant() / q.frobenius_norm().powi(2)).into(),
            q.ratio_ll().into(),
            (k * k).into(),
            q.ratio_rl().into(),
            k.into(),
            F_FISHER.into(),
        ]);
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    #[value(name = "L")]
    L,
    R,
    #[value(name = "N")]
    N,
    Omega0,
    Sigma,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::L => "L",
            Axis::R => "r",
            Axis::N => "N",
            Axis::Omega0 => "omega0",
            Axis::Sigma => "sigma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

pub fn grid(from: f64, to: f64, steps: usize, spacing: Spacing) -> Result<Vec<f64>, CliError> {
    if steps < 2 || !from.is_finite() || !to.is_finite() {
        return Err(CliError::Argument("a sweep needs finite end points and at least 2 steps".into()));
    }
    if spacing == Spacing::Log && !(from > 0.0 && to > 0.0) {
        return Err(CliError::Argument("log spacing needs positive end points".into()));
    }
    let t = |i: usize| i as f64 / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| match spacing {
            Spacing::Linear => from + (to - from) * t(i),
            Spacing::Log => (from.ln() + (to.ln() - from.ln()) * t(i)).exp(),
        })
        .collect())
}

fn at_point(base: &Resolved, axis: Axis, v: f64) -> Result<Resolved, CliError> {
    let mut res = base.clone();
    match axis {
        Axis::L => res.pair = ObserverPair::from_separation(base.pair.r_a, v).context("sweep L")?,
        Axis::R => res.scheme.r = v,
        Axis::N => res.n = v,
        Axis::Omega0 => {
            let k = v / base.packet.omega0;
            res.packet = GaussianWavepacket::new(v, base.packet.sigma).context("sweep omega0")?;
            res.scheme.omega1 *= k;
            res.scheme.omega2 *= k;
        }
        Axis::Sigma => res.packet = GaussianWavepacket::new(base.packet.omega0, v).context("sweep sigma")?,
    }
    Ok(res)
}

pub fn sweep(base: &Resolved, axis: Axis, values: &[f64]) -> Result<Report, CliError> {
    let mut r = Report::new(
        "sweep",
        &[
            "index", "axis", "value", "x", "n_bar", "bound_x", "bound_rs", "bound_L", "bound_x_coherent_same_nbar",
            "formula",
        ],
    );
    describe(&mut r, base);
    let rows = values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| -> Result<Vec<Cell>, CliError> {
            let res = at_point(base, axis, v)?;
            let (g, p, s, sigma) = (&res.geometry, &res.pair, &res.scheme, res.packet.sigma);
            let x = x_from_link(s, g, p, sigma).context("x")?;
            let bx = scheme_relative_bound_x(s, x, res.n).context("bound on x")?;
            let brs = bound_rs(s, g, p, sigma, res.n).context("bound on r_s")?;
            let bl = bound_l(s, g, p, sigma, res.n).context("bound on L")?;
            let nbar = s.mean_photon_number();
            let coh = scheme_relative_bound_x_nbar(SchemeKind::Coherent, x, nbar, res.n).context("coherent bound")?;
            Ok(vec![
                i.into(),
                axis.name().into(),
                v.into(),
                x.into(),
                nbar.into(),
                bx.relative_error_bound.into(),
                brs.relative_error_bound.into(),
                bl.relative_error_bound.into(),
                coh.into(),
                bx.formula.into(),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    for row in rows {
        r.push(row);
    }
    Ok(r)
}

pub fn validate(res: &Resolved, replicas: usize) -> Result<(Report, TrialResult), CliError> {
    check_replicas(replicas).map_err(CliError::Argument)?;
    let trial = res.trial();
    let t = crb_validation_report(&trial, replicas).context("estimator")?;
    let columns: Vec<&str> = TrialResult::CSV_HEADER.split(',').collect();
    let mut r = Report::new("validate", &columns);
    describe(&mut r, res);
    r.meta("measurement", t.measurement.name());
    r.meta("var_crb_quantum", "1/(N H), H the quantum Fisher information at theta_true");
    r.meta("var_crb_measurement", format!("{:e}", t.classical_crb_variance));
    r.meta("estimate_mean", format!("{:e}", t.estimate));
    r.meta("bias", format!("{:e}", t.bias));
    r.meta("var_std_error", format!("{:e}", t.variance_std_error));
    r.meta("status", if t.passed { "pass" } else { "violation" });
    r.push(vec![
        t.scheme.name().into(),
        t.theta_true.into(),
        t.n_shots.into(),
        t.replicas.into(),
        t.empirical_variance.into(),
        t.crb_variance.into(),
        t.ratio().into(),
        t.seed.into(),
    ]);
    Ok((r, t))
}

struct Check<'a> {
    name: &'a str,
    preset: Option<PacketPreset>,
    convention: Option<SqueezingConvention>,
    mode: Option<CentralMatrixMode>,
    computed: f64,
    printed: f64,
    rule: Rule,
    formula: String,
}

#[derive(Clone, Copy)]
enum Rule {
    Factor(f64),
    OrderOfMagnitude,
    Relative(f64),
    AtMost(f64),
    /// Improvement factor over the printed value of at least this much.
    Improves(f64),
    Info,
}

impl Rule {
    fn describe(self) -> String {
        match self {
            Rule::Factor(f) => format!("within factor {f}"),
            Rule::OrderOfMagnitude => "within one order of magnitude".into(),
            Rule::Relative(t) => format!("relative deviation <= {t:e}"),
            Rule::AtMost(t) => format!("<= {t:e}"),
            Rule::Improves(f) => format!("at least {f}x below printed"),
            Rule::Info => "reported only".into(),
        }
    }

    fn status(self, c: f64, p: f64) -> &'static str {
        let ok = match self {
            Rule::Factor(f) => c / p <= f && p / c <= f,
            Rule::OrderOfMagnitude => (c / p).log10().abs() <= 1.0,
            Rule::Relative(t) => ((c - p) / p).abs() <= t,
            Rule::AtMost(t) => c.abs() <= t,
            Rule::Improves(f) => c * f <= p,
            Rule::Info => return "info",
        };
        if ok {
            "pass"
        } else {
            "flag"
        }
    }
}

/// Pinned Earth-to-geostationary reproduction over both presets, conventions and central-matrix modes.
pub fn reproduce() -> Result<Report, CliError> {
    let mut r = Report::new(
        "reproduce-paper",
        &["check", "preset", "convention", "mode", "computed", "printed", "rule", "status", "formula"],
    );
    r.meta(
        "L",
        "r_B = 4.237e7 m with r_A = 6.371e6 m, so L = 3.5999e7 m; the quoted L = 3.6e6 m is inconsistent with r_B and is not used",
    );
    r.meta("r_s", "2GM/c^2 with G = 6.67430e-11, M = 5.972e24 kg, c = 299792458 m/s (about 8.870e-3 m; quoted ~1e-2 m)");
    r.meta("units", "Omega and sigma in cyclic Hz; only Omega/sigma enters the bounds");
    r.meta("delta", "first order in r_s/r for x, exact for channel overlaps");
    r.meta("printed_values", "quoted for the 400 THz preset; rows for other presets are reported only");
    let mut checks: Vec<Check> = Vec::new();
    for preset in PacketPreset::ALL {
        let quoted = preset == PacketPreset::StateOfTheArt400THz;
        let gate = |rule: Rule| if quoted { rule } else { Rule::Info };
        let res = |kind: SchemeKind| Scenario::reproduction(preset, kind).resolve();
        let single = res(SchemeKind::SingleModeSqueezed)?;
        let two = res(SchemeKind::TwoModeSqueezed)?;
        let (g, p, sigma, n) = (&single.geometry, &single.pair, single.packet.sigma, single.n);
        let omega = single.packet.omega0;
        let bs = bound_rs(&single.scheme, g, p, sigma, n).context("single-mode bound")?;
        let bt = bound_rs(&two.scheme, g, p, sigma, n).context("two-mode bound")?;
        let base = |name, computed, printed, rule, formula: String| Check {
            name,
            preset: Some(preset),
            convention: None,
            mode: None,
            computed,
            printed,
            rule,
            formula,
        };
        checks.push(base("single_mode_rs", bs.relative_error_bound, 2.4e-5, gate(Rule::Factor(1.5)), bs.formula.clone()));
        checks.push(base("two_mode_rs", bt.relative_error_bound, 4.8e-5, gate(Rule::Factor(1.5)), bt.formula.clone()));
        let s2 = two.scheme;
        let mean_sq = (s2.omega1.powi(2) + s2.omega2.powi(2)) / 2.0;
        checks.push(base(
            "two_over_single_ratio",
            bt.relative_error_bound / bs.relative_error_bound,
            2.0 * (omega * omega / mean_sq).sqrt(),
            Rule::Relative(1e-12),
            "2 sqrt(Omega^2/((Omega_1^2 + Omega_2^2)/2))".into(),
        ));
        for (name, s, b) in [("single_mode_rs_closed_form", &single.scheme, &bs), ("two_mode_rs_closed_form", &s2, &bt)] {
            let printed = printed_bound_rs(s, g, p, sigma, n).context("printed bound")?.unwrap_or(f64::NAN);
            checks.push(base(name, printed, b.relative_error_bound, Rule::Relative(1e-8), "closed-form dr_s/r_s vs chain rule".into()));
        }
        for (name, s) in [("single_mode_L_closed_form", &single.scheme), ("two_mode_L_closed_form", &s2)] {
            let chain = bound_l(s, g, p, sigma, n).context("bound on L")?.relative_error_bound;
            let printed = printed_bound_l(s, g, p, sigma, n).context("printed bound")?.unwrap_or(f64::NAN);
            checks.push(base(name, printed, chain, Rule::Relative(1e-8), "closed-form dL/L vs chain rule".into()));
        }
        let fom = figure_of_merit(sigma, omega, single.scheme.r, n, g, p).context("figure of merit")?;
        checks.push(base("figure_of_merit", fom, 5.8e-7, gate(Rule::OrderOfMagnitude), F_FOM.into()));
        let future = SchemeSpec { r: 6.0, ..single.scheme };
        let bf = bound_rs(&future, g, p, sigma, 1e16).context("five-year bound")?;
        checks.push(base(
            "five_year_single_mode_rs",
            bf.relative_error_bound,
            2e-9,
            gate(Rule::Improves(10.0)),
            format!("{} at r = 6, N = 1e16", bf.formula),
        ));
        for convention in SqueezingConvention::ALL {
            for mode in CentralMatrixMode::ALL {
                let at = |base: &Resolved| Resolved {
                    scheme: base.scheme.with_convention(convention),
                    ..base.clone()
                };
                let (s1, t1) = (at(&single), at(&two));
                for (name, rr) in [("single_mode_fisher_det", &s1), ("two_mode_fisher_det", &t1)] {
                    let q = fisher_matrix_rs_l(&rr.scheme, g, p, sigma, mode).context("fisher matrix")?;
                    checks.push(Check {
                        convention: Some(convention),
                        mode: Some(mode),
                        ..base(name, q.determinant() / q.frobenius_norm().powi(2), 0.0, Rule::AtMost(1e-10), "Det Q/|Q|^2".into())
                    });
                }
                checks.push(Check {
                    convention: Some(convention),
                    mode: Some(mode),
                    ..base("single_mode_fisher_rs", fisher_bound_rs(&s1, mode)?, 2.4e-5, Rule::Info, F_FISHER_BOUND.into())
                });
            }
        }
    }
    // Which squeezing convention reproduces the appendix determinant.
    let (theta, rsq) = (0.9, 1.5);
    for convention in SqueezingConvention::ALL {
        let s = SchemeSpec::single_mode_squeezed(rsq, 4e14).with_convention(convention);
        let det = s.output_state_at_theta(theta).context("appendix state")?.determinant();
        let printed = 1.0 + 4.0 * rsq.sinh().powi(2) * theta * theta * (1.0 - theta * theta);
        checks.push(Check {
            name: "appendix_det_theta_0.9_r_1.5",
            preset: None,
            convention: Some(convention),
            mode: None,
            computed: det,
            printed,
            rule: Rule::Relative(1e-12),
            formula: "det Sigma_b = 1 + 4 sinh^2 r Theta^2 (1 - Theta^2)".into(),
        });
    }
    // The appendix routes to dx/x against the stated small-x bound; they differ by sqrt 2.
    let (x, n) = (1e-3, 1e10);
    let (stated, _) = appendix_relative_bound_x(x, rsq, n, AppendixPath::Series).context("appendix bound")?;
    for (name, path) in [
        ("appendix_dx_over_x_from_H", AppendixPath::ClosedFormH),
        ("appendix_dx_over_x_from_dTheta", AppendixPath::PrintedDeltaTheta),
    ] {
        let (v, _) = appendix_relative_bound_x(x, rsq, n, path).context("appendix bound")?;
        checks.push(Check {
            name,
            preset: None,
            convention: None,
            mode: None,
            computed: v,
            printed: stated,
            rule: Rule::Relative(1e-2),
            formula: format!("x = 1e-3, r = 1.5, N = 1e10; computed/stated = {:.6}", v / stated),
        });
    }
    for c in checks {
        r.push(vec![
            c.name.into(),
            c.preset.map_or("-", |p| p.name()).into(),
            c.convention.map_or("-", |v| v.name()).into(),
            c.mode.map_or("-", |m| m.name()).into(),
            c.computed.into(),
            c.printed.into(),
            c.rule.describe().into(),
            c.rule.status(c.computed, c.printed).into(),
            c.formula.into(),
        ]);
    }
    Ok(r)
}
