//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::DMatrix;
use periodic_invasion::floquet::{
    monodromy_apply, principal_eigenpair, FieldPotential, FnPotential, ShiftedPotential,
    ZeroPotential,
};
use periodic_invasion::invasion::{
    competition_peak, eigenvalue_bounds, full_report, mu_hat, Agreement, Report,
};
use periodic_invasion::pde::{sup_distance, sup_norm, Grid, Potential};
use periodic_invasion::simulate::{classify_invasion, coupled_run, Classification, EmpiricalClass};
use periodic_invasion::steady::{periodic_steady_state, periodic_steady_state_with, SteadyOptions};
use periodic_invasion::{DomainMotion, Error, PeriodicFunction, Scenario, Species};
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }

    fn error(e: Error) -> Self {
        Self::new(false, format!("error: {e}"))
    }
}

fn scenario(domain: &str, reaction: &str, grid: (usize, usize)) -> Scenario {
    let text = format!(
        "[domain]\n{domain}\n[reaction]\n{reaction}\n[grid]\nM = {}\nNt = {}\n",
        grid.0, grid.1
    );
    Scenario::from_toml(&text).unwrap_or_else(|e| panic!("bad scenario: {e}\n{text}"))
}

const DESK: &str = "r1 = 6.0\nr2 = 6.0\nh1_hat = 1.0\nh2_hat = 1.0\ng2_hat = 0.5";

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn c1_stationary_eigenvalue() -> Result<Outcome, Error> {
    let start = Instant::now();
    let d = DomainMotion::translating(0.0, 1.0, 1.0)?;
    let g = Grid::new(200, 2000, 1.0, 1.0)?;
    let mu = principal_eigenpair(1.0, &d, g, ZeroPotential)?.mu;
    let elapsed = start.elapsed().as_secs_f64();
    let err = rel(mu, PI * PI);
    Ok(Outcome::new(
        err < 1e-3 && elapsed < 10.0,
        format!("mu = {mu:.10}, rel err {err:.2e} (tol 1e-3), {elapsed:.2} s (limit 10 s)"),
    ))
}

fn c2_translating_eigenvalue() -> Result<Outcome, Error> {
    let cases = [(2.0, 1.0, PI * PI + 1.0), (1.0, 2.0, 2.0 * PI * PI + 0.125)];
    let mut out = Outcome::new(true, String::new());
    let mut worst = 0.0f64;
    for (c, diff, exact) in cases {
        let d = DomainMotion::translating(c, 1.0, 1.0)?;
        let g = Grid::new(200, 2000, 1.0, 1.0)?;
        let mu = principal_eigenpair(diff, &d, g, ZeroPotential)?.mu;
        let err = rel(mu, exact);
        worst = worst.max(err);
        out.pass &= err < 1e-3;
        out.details.push(format!(
            "c = {c}, D = {diff}: mu = {mu:.10}, exact {exact:.10}, rel err {err:.2e}"
        ));
    }
    out.summary = format!("worst rel err {worst:.2e} (tol 1e-3)");
    Ok(out)
}

fn shift_gap(
    diff: f64,
    domain: &DomainMotion,
    grid: Grid,
    q: &dyn Potential,
    shift: f64,
) -> Result<f64, Error> {
    let base = principal_eigenpair(diff, domain, grid, q)?.mu;
    let moved = principal_eigenpair(diff, domain, grid, ShiftedPotential { inner: q, shift })?.mu;
    Ok(((moved - base) - shift).abs())
}

fn c3_potential_shift() -> Result<Outcome, Error> {
    let desk = scenario("L = { mean = 2.0 }", DESK, (80, 400));
    let u1 = periodic_steady_state(Species::One, &desk.model, &desk.domain, desk.grid)?;
    let model = desk.model;
    let competition = FieldPotential::new(&u1.field, move |u| model.g2(u.max(0.0)));

    let breathing = scenario(
        "L = { mean = 2.0, sin = [0.2] }\nA = { cos = [0.1] }",
        DESK,
        (60, 300),
    );
    let bump = FnPotential(|xi: f64, t: f64| {
        3.0 * (PI * xi / 2.0).sin().powi(2) * (1.0 + (2.0 * PI * t).cos())
    });

    let drifting = scenario("c = 1.0\nL = { mean = 2.0 }", DESK, (60, 300));

    let cases: [(&str, &Scenario, &dyn Potential, f64); 3] = [
        ("desk, q = g2(u1*)", &desk, &competition, 1.0),
        ("breathing interval, q = bump", &breathing, &bump, 1.0),
        ("translating c = 1, q = 0", &drifting, &ZeroPotential, 1.5),
    ];
    let mut out = Outcome::new(true, String::new());
    let mut worst = 0.0f64;
    for (name, s, q, diff) in cases {
        for shift in [0.5, 2.0] {
            let gap = shift_gap(diff, &s.domain, s.grid, q, shift)?;
            worst = worst.max(gap);
            out.pass &= gap <= 1e-9;
            out.details.push(format!(
                "{name}, beta0 = {shift}: |dmu - beta0| = {gap:.2e}"
            ));
        }
    }
    out.summary = format!("worst |dmu - beta0| = {worst:.2e} (tol 1e-9)");
    Ok(out)
}

fn c4_sandwich() -> Result<Outcome, Error> {
    let lengths = [
        (
            "L = 1 + 0.1 sin",
            PeriodicFunction::new(1.0, 1.0, vec![], vec![0.1])?,
        ),
        (
            "L = 1 + 0.05 sin + 0.02 cos(4 pi t)",
            PeriodicFunction::new(1.0, 1.0, vec![0.0, 0.02], vec![0.05])?,
        ),
    ];
    let offsets = [
        ("A = 0", PeriodicFunction::constant(1.0, 0.0)?),
        (
            "A = 0.05 sin",
            PeriodicFunction::new(1.0, 0.0, vec![], vec![0.05])?,
        ),
    ];
    let slack = 1e-6;
    let mut out = Outcome::new(true, String::new());
    let mut worst = f64::INFINITY;
    for (ln, l) in &lengths {
        for (an, a) in &offsets {
            let d = DomainMotion::new(0.0, l.clone(), a.clone(), None)?;
            let g = Grid::for_domain(&d, 150, 1500)?;
            let mu = principal_eigenpair(1.0, &d, g, ZeroPotential)?.mu;
            let b = eigenvalue_bounds(1.0, &d);
            let upper = b.upper();
            let lower_margin = mu - b.lower;
            let upper_margin = upper - mu;
            worst = worst.min(lower_margin).min(upper_margin);
            out.pass &= lower_margin >= -slack && upper_margin >= -slack;
            out.details.push(format!(
                "{ln}, {an}: {:.6} <= mu = {mu:.6} <= {upper:.6} (margins {lower_margin:.4e}, {upper_margin:.4e})",
                b.lower
            ));
        }
    }
    out.summary = format!("smallest margin {worst:.4e} (slack 1e-6)");
    Ok(out)
}

fn c5_prop1_chain() -> Result<Outcome, Error> {
    let s = scenario("L = { mean = 2.0 }", DESK, (100, 500));
    let mu2 = principal_eigenpair(s.model.d2, &s.domain, s.grid, ZeroPotential)?.mu;
    let u1 = periodic_steady_state(Species::One, &s.model, &s.domain, s.grid)?;
    let beta = competition_peak(&s.model, &u1.field);
    let mh = mu_hat(&s.model, &s.domain, s.grid, &u1.field)?.mu;
    Ok(Outcome::new(
        mu2 < mh && mh < mu2 + beta,
        format!(
            "mu2 = {mu2:.6} < mu_hat = {mh:.6} < mu2 + beta = {:.6} (beta = {beta:.6})",
            mu2 + beta
        ),
    ))
}

fn c6_prop2_identity() -> Result<Outcome, Error> {
    let cases = [
        (
            "stationary",
            scenario("L = { mean = 2.0 }", DESK, (100, 500)),
        ),
        (
            "periodic",
            scenario(
                "L = { mean = 2.0, sin = [0.2] }\nA = { sin = [0.1] }",
                DESK,
                (100, 1000),
            ),
        ),
    ];
    let mut out = Outcome::new(true, String::new());
    let (mut worst_mu, mut worst_phi) = (0.0f64, 0.0f64);
    for (name, s) in &cases {
        let u2 = periodic_steady_state(Species::Two, &s.model, &s.domain, s.grid)?;
        let model = s.model;
        let q = FieldPotential::new(&u2.field, move |u| model.h2(u.max(0.0)));
        let eig = principal_eigenpair(s.model.d2, &s.domain, s.grid, q)?;
        let star = u2.field.snapshot(0);
        let norm = sup_norm(star);
        let normalized: Vec<f64> = star.iter().map(|v| v / norm).collect();
        let dmu = (eig.mu - s.model.r2).abs();
        let dphi = sup_distance(eig.phi.snapshot(0), &normalized);
        worst_mu = worst_mu.max(dmu);
        worst_phi = worst_phi.max(dphi);
        out.pass &= dmu <= 1e-4 && dphi <= 1e-4;
        out.details.push(format!(
            "{name}: |mu* - r2| = {dmu:.2e}, |phi - u2*/|u2*|| = {dphi:.2e}"
        ));
    }
    out.summary = format!(
        "worst |mu* - r2| = {worst_mu:.2e}, worst eigenfunction gap {worst_phi:.2e} (tol 1e-4)"
    );
    Ok(out)
}

fn c7_steady_quality() -> Result<Outcome, Error> {
    let s = {
        let text = format!(
            "[domain]\nT = 0.25\nL = {{ mean = 2.0, sin = [0.1] }}\n[reaction]\n{DESK}\n[grid]\nM = 80\nNt = 250\n"
        );
        Scenario::from_toml(&text)?
    };
    let run = |amplitude: f64| {
        let options = SteadyOptions {
            initial_amplitude: amplitude,
            ..SteadyOptions::default()
        };
        periodic_steady_state_with(Species::One, &s.model, &s.domain, s.grid, options, None)
    };
    let low = run(0.1)?;
    let high = run(0.9)?;
    let mut out = Outcome::new(true, String::new());
    for (name, state) in [("0.1 K", &low), ("0.9 K", &high)] {
        let h = state.convergence_history();
        let tail = &h[h.len().saturating_sub(20)..];
        let monotone = h.len() >= 20 && tail.windows(2).all(|w| w[1] < w[0]);
        let last = *h.last().unwrap_or(&f64::NAN);
        let in_range = state.field.min() >= 0.0 && state.field.max() <= s.model.k1();
        out.pass &= monotone && last < 1e-9 && in_range;
        out.details.push(format!(
            "init {name}: {} periods, last-20 monotone {monotone}, final delta {last:.2e}, range [{:.3e}, {:.6}] vs K1 = {}",
            h.len(),
            state.field.min(),
            state.field.max(),
            s.model.k1()
        ));
    }
    let gap = low
        .field
        .snapshots()
        .iter()
        .zip(high.field.snapshots())
        .map(|(a, b)| sup_distance(a, b))
        .fold(0.0f64, f64::max);
    out.pass &= gap <= 1e-7;
    out.summary = format!("initialisations agree within {gap:.2e} (tol 1e-7)");
    Ok(out)
}

struct SweepRow {
    name: String,
    r2: f64,
    period: f64,
    report: Report,
    empirical: Result<Classification, Error>,
}

/// Geometry, reaction overrides and the invading / non-invading `r2`.
const SWEEP: [(&str, &str, &str, f64, f64); 6] = [
    ("constant", "L = { mean = 2.0 }", "D2 = 1.0", 4.8, 3.6),
    (
        "translating c = 0.5",
        "c = 0.5\nL = { mean = 2.0 }",
        "D2 = 1.0",
        4.9,
        3.7,
    ),
    (
        "translating c = 1",
        "c = 1.0\nL = { mean = 2.0 }",
        "D2 = 1.5",
        6.1,
        4.9,
    ),
    (
        "periodic L",
        "L = { mean = 2.0, sin = [0.2] }",
        "D2 = 1.0",
        4.9,
        3.7,
    ),
    (
        "periodic A",
        "L = { mean = 2.0 }\nA = { sin = [0.1] }",
        "D2 = 1.0",
        4.9,
        3.7,
    ),
    (
        "periodic L and A",
        "L = { mean = 2.0, sin = [0.2] }\nA = { cos = [0.1] }",
        "D2 = 0.8",
        4.4,
        3.2,
    ),
];

fn sweep() -> &'static (Vec<Result<SweepRow, Error>>, f64) {
    static SWEEP_RESULTS: OnceLock<(Vec<Result<SweepRow, Error>>, f64)> = OnceLock::new();
    SWEEP_RESULTS.get_or_init(|| {
        let start = Instant::now();
        let cases: Vec<(String, String, String)> = SWEEP
            .iter()
            .flat_map(|&(name, domain, extra, up, down)| {
                [(up, "invade"), (down, "non-invade")].map(|(r2, label)| {
                    let reaction = format!(
                        "r1 = 6.0\nr2 = {r2}\nh1_hat = 1.0\nh2_hat = 1.0\ng2_hat = 0.5\n{extra}"
                    );
                    (format!("{name}, {label}"), domain.to_string(), reaction)
                })
            })
            .collect();
        let rows = cases
            .par_iter()
            .map(|(name, domain, reaction)| {
                let text = format!(
                    "[domain]\n{domain}\n[reaction]\n{reaction}\n[grid]\nM = 80\nNt = 400\n[run]\nperiods = 40\nseed_amplitude = 1e-8\n"
                );
                let s = Scenario::from_toml(&text)?;
                let report = full_report(&s)?;
                let empirical = coupled_run(
                    &s.model,
                    &s.domain,
                    s.grid,
                    &report.u1star.field,
                    s.seed_amplitude,
                    s.periods,
                )
                .and_then(|t| classify_invasion(&t, Some(s.growth_margin)));
                Ok(SweepRow {
                    name: name.clone(),
                    r2: s.model.r2,
                    period: s.grid.period(),
                    report,
                    empirical,
                })
            })
            .collect();
        (rows, start.elapsed().as_secs_f64())
    })
}

fn c8_linearized_rate() -> Result<Outcome, Error> {
    let (rows, elapsed) = sweep();
    let mut out = Outcome::new(*elapsed < 300.0, String::new());
    let (mut matched, mut worst) = (0usize, 0.0f64);
    for row in rows {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                out.pass = false;
                out.details.push(format!("scenario failed: {e}"));
                continue;
            }
        };
        let mh = row.report.mu_hat.mu;
        let predicted = (row.r2 - mh) * row.period;
        if predicted.abs() <= 0.05 {
            out.pass = false;
            out.details.push(format!(
                "{}: |r2 - mu_hat| T = {:.3} is too small",
                row.name,
                predicted.abs()
            ));
            continue;
        }
        match &row.empirical {
            Ok(c) => {
                let err = rel(c.log_growth_per_period, predicted);
                let expected = if predicted > 0.0 {
                    EmpiricalClass::Invades
                } else {
                    EmpiricalClass::Decays
                };
                worst = worst.max(err);
                let ok_class = c.class == expected;
                matched += ok_class as usize;
                out.pass &= err <= 0.1 && ok_class;
                out.details.push(format!(
                    "{}: r2 = {}, mu_hat = {mh:.5}, predicted {predicted:+.5}, measured {:+.5} (rel err {err:.2e}), class {}",
                    row.name,
                    row.r2,
                    c.log_growth_per_period,
                    c.class.as_str()
                ));
            }
            Err(e) => {
                out.pass = false;
                out.details
                    .push(format!("{}: classification failed: {e}", row.name));
            }
        }
    }
    out.pass &= matched == rows.len();
    out.summary = format!(
        "classes {matched}/{}, worst rel growth err {worst:.2e} (tol 0.1), sweep {elapsed:.1} s (limit 300 s)",
        rows.len()
    );
    Ok(out)
}

fn c9_verdict_soundness() -> Result<Outcome, Error> {
    let (rows, _) = sweep();
    let mut out = Outcome::new(true, String::new());
    let (mut decisive, mut disagreements) = (0usize, 0usize);
    for row in rows {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                out.pass = false;
                out.details.push(format!("scenario failed: {e}"));
                continue;
            }
        };
        let mut fired = Vec::new();
        for check in &row.report.checks {
            match check.agreement {
                Agreement::Agrees => {
                    decisive += 1;
                    fired.push(check.verdict.condition.clone());
                }
                Agreement::Disagrees => {
                    decisive += 1;
                    disagreements += 1;
                    out.pass = false;
                    fired.push(format!("{} (DISAGREES)", check.verdict.condition));
                }
                Agreement::NotComparable => {}
            }
        }
        out.details.push(format!(
            "{}: linearization {}, decisive checks [{}]",
            row.name,
            row.report.linearization.verdict,
            fired.join(", ")
        ));
    }
    out.summary = format!(
        "{decisive} decisive verdicts, {disagreements} disagreements with sign(r2 - mu_hat)"
    );
    Ok(out)
}

fn self_convergence(values: [f64; 3]) -> f64 {
    (values[0] - values[1]) / (values[1] - values[2])
}

fn c10_scheme_order() -> Result<Outcome, Error> {
    let base = Grid::new(39, 100, 2.0, 1.0)?;
    let grids = [base, base.refined(), base.refined().refined()];

    let periodic = scenario(
        "L = { mean = 2.0, sin = [0.2] }\nA = { sin = [0.1] }",
        DESK,
        (39, 100),
    );
    let mut mus = [0.0; 3];
    for (slot, g) in mus.iter_mut().zip(&grids) {
        *slot = principal_eigenpair(1.0, &periodic.domain, *g, ZeroPotential)?.mu;
    }
    let eigen_factor = self_convergence(mus);

    // Value of u1* at the interval midpoint and t = 0, a node on every grid.
    let mut mids = [0.0; 3];
    for (slot, g) in mids.iter_mut().zip(&grids) {
        let state = periodic_steady_state(Species::One, &periodic.model, &periodic.domain, *g)?;
        *slot = state.field.snapshot(0)[g.m() / 2];
    }
    let steady_factor = self_convergence(mids);

    let within = |f: f64| (3.0..=5.0).contains(&f);
    let mut out = Outcome::new(
        within(eigen_factor) && within(steady_factor),
        format!("eigenvalue factor {eigen_factor:.3}, steady-state factor {steady_factor:.3} (want [3, 5])"),
    );
    out.details.push(format!(
        "mu on M = 39, 79, 159: {:.10}, {:.10}, {:.10}",
        mus[0], mus[1], mus[2]
    ));
    out.details.push(format!(
        "u1*(L0/2, 0) on M = 39, 79, 159: {:.10}, {:.10}, {:.10}",
        mids[0], mids[1], mids[2]
    ));
    Ok(out)
}

fn c11_dense_oracle() -> Result<Outcome, Error> {
    let s = scenario(
        "L = { mean = 2.0, sin = [0.2] }\nA = { sin = [0.1] }",
        DESK,
        (60, 300),
    );
    let m = s.grid.m();
    let power = principal_eigenpair(1.0, &s.domain, s.grid, ZeroPotential)?.mu;
    let mut matrix = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        let column = monodromy_apply(&e, 1.0, &s.domain, s.grid, ZeroPotential)?;
        for (i, v) in column.into_iter().enumerate() {
            matrix[(i, j)] = v;
        }
    }
    let rho = matrix
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    let dense = -rho.ln() / s.grid.period();
    let err = rel(power, dense);
    Ok(Outcome::new(
        err <= 1e-6,
        format!("power iteration {power:.12}, dense {dense:.12}, rel diff {err:.2e} (tol 1e-6)"),
    ))
}

type Criterion = fn() -> Result<Outcome, Error>;

const CRITERIA: [(&str, Criterion); 11] = [
    (
        "exact eigenvalue, stationary interval",
        c1_stationary_eigenvalue,
    ),
    (
        "exact eigenvalue, translating interval",
        c2_translating_eigenvalue,
    ),
    ("potential-shift identity", c3_potential_shift),
    ("eigenvalue sandwich", c4_sandwich),
    ("ordering mu2 < mu_hat < mu2 + beta", c5_prop1_chain),
    (
        "self-consistency of the h2(u2*) eigenproblem",
        c6_prop2_identity,
    ),
    ("steady-state quality", c7_steady_quality),
    ("linearized growth rate agreement", c8_linearized_rate),
    ("analytic verdict soundness", c9_verdict_soundness),
    ("second-order self-convergence", c10_scheme_order),
    ("dense period-map oracle", c11_dense_oracle),
];

fn main() -> ExitCode {
    let start = Instant::now();
    let outcomes: Vec<Outcome> = CRITERIA
        .par_iter()
        .map(|(_, run)| run().unwrap_or_else(Outcome::error))
        .collect();
    let mut failed = 0;
    println!("acceptance suite");
    for (i, ((name, _), outcome)) in CRITERIA.iter().zip(&outcomes).enumerate() {
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        failed += !outcome.pass as usize;
        println!("{status} [{:>2}] {name}: {}", i + 1, outcome.summary);
        for line in &outcome.details {
            println!("          {line}");
        }
    }
    println!(
        "{} passed, {failed} failed ({:.1} s)",
        CRITERIA.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
