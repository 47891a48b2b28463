//! Sufficient conditions for invasion and non-invasion of `(u1*, 0)` by species 2.
//!
//! The definitive criterion at linear order is the sign of `r2 - mu_hat`, where
//! `mu_hat` is the principal periodic eigenvalue of `phi_t - L_2 phi + g2(u1*) phi`.
//! The checks here bracket `mu_hat` without computing it (closed forms, bounds)
//! or with cheaper field comparisons, and each one reports which condition fired.

use std::f64::consts::PI;
use std::fmt;

use crate::domain::DomainMotion;
use crate::error::{Error, Result};
use crate::floquet::{principal_eigenpair, EigenResult, FieldPotential, ZeroPotential};
use crate::pde::{Grid, SpaceTimeField};
use crate::periodic_fn::{period_average, DEFAULT_QUADRATURE_NODES};
use crate::reaction::{ReactionModel, Species};
use crate::scenario::Scenario;
use crate::steady::{periodic_steady_state_with, SteadyOptions, SteadyState};

/// Pointwise comparison margin for the "<= everywhere, < somewhere" order.
pub const ORDER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Invades,
    CannotInvade,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Invades => "Invades",
            Verdict::CannotInvade => "CannotInvade",
            Verdict::Inconclusive => "Inconclusive",
        }
    }

    pub fn is_decisive(self) -> bool {
        self != Verdict::Inconclusive
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvasionVerdict {
    pub verdict: Verdict,
    /// Which condition decided, e.g. `Prop1.1` or `Cor1.case3.noninvade`.
    pub condition: String,
    pub witnesses: Vec<Witness>,
    pub note: Option<String>,
}

impl InvasionVerdict {
    fn new(verdict: Verdict, condition: impl Into<String>, witnesses: Vec<Witness>) -> Self {
        Self {
            verdict,
            condition: condition.into(),
            witnesses,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn witness(&self, name: &str) -> Option<f64> {
        self.witnesses
            .iter()
            .find(|w| w.name == name)
            .map(|w| w.value)
    }
}

fn w(name: &'static str, value: f64) -> Witness {
    Witness { name, value }
}

/// `D pi^2 / L0^2 + c^2 / (4 D)`: the principal eigenvalue on a rigid translating interval.
pub fn translating_eigenvalue(diffusivity: f64, speed: f64, length: f64) -> f64 {
    diffusivity * PI * PI / (length * length) + speed * speed / (4.0 * diffusivity)
}

/// `mu_hat`: principal eigenvalue for species 2 with potential `g2(u1*)`.
pub fn mu_hat(
    model: &ReactionModel,
    domain: &DomainMotion,
    grid: Grid,
    u1star: &SpaceTimeField,
) -> Result<EigenResult> {
    let potential = FieldPotential::new(u1star, |u| model.g2(u.max(0.0)));
    principal_eigenpair(model.d2, domain, grid, potential)
}

/// `beta = max g2(u1*)` over every stored node and snapshot.
pub fn competition_peak(model: &ReactionModel, u1star: &SpaceTimeField) -> f64 {
    u1star
        .snapshots()
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &u| acc.max(model.g2(u.max(0.0))))
}

/// `r2 >= mu2 + beta` invades, `r2 <= mu2` cannot invade.
pub fn prop1_check(model: &ReactionModel, mu2: f64, beta: f64) -> Result<InvasionVerdict> {
    if !(beta > 0.0) {
        return Err(Error::invalid(
            "beta",
            format!("must be positive (peak of g2 over u1*), got {beta}"),
        ));
    }
    let r2 = model.r2;
    let beta_hat = model.beta_hat();
    let upper = mu2 + beta;
    let witnesses = vec![
        w("r2", r2),
        w("mu2", mu2),
        w("beta", beta),
        w("mu2_plus_beta", upper),
        w("beta_hat", beta_hat),
    ];
    let mut out = if r2 >= upper {
        let mut v = InvasionVerdict::new(Verdict::Invades, "Prop1.1", witnesses);
        if r2 == upper {
            v = v.with_note("boundary case r2 = mu2 + beta");
        }
        v
    } else if r2 <= mu2 {
        InvasionVerdict::new(Verdict::CannotInvade, "Prop1.2", witnesses)
    } else {
        InvasionVerdict::new(Verdict::Inconclusive, "Prop1", witnesses)
            .with_note("mu2 < r2 < mu2 + beta")
    };
    if beta > beta_hat * (1.0 + 1e-12) {
        out = out.with_note(format!("beta {beta} exceeds beta_hat {beta_hat}"));
    }
    Ok(out)
}

/// Pointwise order of `g2(u1*)` and `h2(u2*)` over all nodes and snapshots.
pub fn prop2_check(
    model: &ReactionModel,
    u1star: &SpaceTimeField,
    u2star: &SteadyState,
) -> Result<InvasionVerdict> {
    if u2star.extinct {
        return Err(Error::Extinct {
            species: 2,
            rate: model.r2,
            mu: u2star.mu,
        });
    }
    let f2 = &u2star.field;
    if u1star.grid() != f2.grid() {
        return Err(Error::invalid("u2star", "is on a different grid from u1*"));
    }
    let mut max_excess = f64::NEG_INFINITY;
    let mut min_excess = f64::INFINITY;
    for (a, b) in u1star.period_snapshots().iter().zip(f2.period_snapshots()) {
        for (&u1, &u2) in a.iter().zip(b) {
            let excess = model.g2(u1.max(0.0)) - model.h2(u2.max(0.0));
            max_excess = max_excess.max(excess);
            min_excess = min_excess.min(excess);
        }
    }
    let tau = ORDER_TOLERANCE;
    let witnesses = vec![
        w("max_g2_minus_h2", max_excess),
        w("min_g2_minus_h2", min_excess),
        w("tolerance", tau),
    ];
    Ok(if max_excess <= tau && min_excess < -tau {
        InvasionVerdict::new(Verdict::Invades, "Prop2.invade", witnesses)
    } else if min_excess >= -tau && max_excess > tau {
        InvasionVerdict::new(Verdict::CannotInvade, "Prop2.noninvade", witnesses)
    } else {
        InvasionVerdict::new(Verdict::Inconclusive, "Prop2", witnesses)
            .with_note("no strict pointwise order between g2(u1*) and h2(u2*)")
    })
}

/// Paired inequalities with "at least one strict".
fn ordered_pair(a: f64, a_ref: f64, b: f64, b_ref: f64) -> Verdict {
    let up = a >= a_ref && b >= b_ref && (a > a_ref || b > b_ref);
    let down = a <= a_ref && b <= b_ref && (a < a_ref || b < b_ref);
    if up {
        Verdict::Invades
    } else if down {
        Verdict::CannotInvade
    } else {
        Verdict::Inconclusive
    }
}

fn suffix(v: Verdict) -> &'static str {
    match v {
        Verdict::Invades => ".invade",
        Verdict::CannotInvade => ".noninvade",
        Verdict::Inconclusive => "",
    }
}

/// Rigid interval translating at speed `c` with length `L0`; closed-form conditions.
pub fn cor1_check(model: &ReactionModel, speed: f64, length: f64) -> InvasionVerdict {
    let (d1, d2) = (model.d1, model.d2);
    let (r1, r2, n) = (model.r1, model.r2, model.n);
    let mu1 = translating_eigenvalue(d1, speed, length);
    let mu2 = translating_eigenvalue(d2, speed, length);
    let mut witnesses = vec![w("mu1_exact", mu1), w("mu2_exact", mu2)];
    if !(r1 > mu1 && r2 > mu2) {
        return InvasionVerdict::new(Verdict::Inconclusive, "Cor1.hypotheses", witnesses)
            .with_note("requires r1 > mu1 and r2 > mu2");
    }
    let rate_ratio = r2 / r1;
    let scaled_h1 = rate_ratio.powf(1.0 / n) * model.h1_hat;
    if speed == 0.0 || d1 == d2 {
        // Case 1 compares r2/r1 with D2/D1; case 2 (D1 = D2) compares r2 with r1.
        let (case, reference) = if speed == 0.0 {
            ("Cor1.case1", d2 / d1)
        } else {
            ("Cor1.case2", 1.0)
        };
        let verdict = ordered_pair(rate_ratio, reference, scaled_h1, model.g2_hat);
        witnesses.extend([
            w("r2_over_r1", rate_ratio),
            w("rate_reference", reference),
            w("scaled_h1_hat", scaled_h1),
            w("g2_hat", model.g2_hat),
        ]);
        return InvasionVerdict::new(verdict, format!("{case}{}", suffix(verdict)), witnesses);
    }

    let lhs = r2 - speed * speed / (4.0 * d2);
    let rhs = d2 / d1 * (r1 - speed * speed / (4.0 * d1));
    let spread = 0.5 * length * (speed * (1.0 / d2 - 1.0 / d1)).abs();
    let base = (d2 / d1).powf(1.0 / n);
    let invade_threshold = base * (-spread).exp();
    let noninvade_threshold = base * spread.exp();
    let ratio = model.g2_hat / model.h1_hat;
    let verdict = if lhs >= rhs && ratio <= invade_threshold {
        Verdict::Invades
    } else if lhs <= rhs && ratio >= noninvade_threshold {
        Verdict::CannotInvade
    } else {
        Verdict::Inconclusive
    };
    witnesses.extend([
        w("shifted_r2", lhs),
        w("scaled_shifted_r1", rhs),
        w("g2_over_h1", ratio),
        w("invade_threshold", invade_threshold),
        w("noninvade_threshold", noninvade_threshold),
    ]);
    InvasionVerdict::new(verdict, format!("Cor1.case3{}", suffix(verdict)), witnesses)
}

/// Interval `A(t) < x < A(t) + L(t)` (no constant drift). Uses the computed
/// `u1*` for the `D1 != D2` case.
pub fn cor2_check(
    model: &ReactionModel,
    domain: &DomainMotion,
    u1star: &SpaceTimeField,
    mu1: f64,
    mu2: f64,
) -> InvasionVerdict {
    let (d1, d2) = (model.d1, model.d2);
    let (r1, r2, n) = (model.r1, model.r2, model.n);
    let mut witnesses = vec![w("mu1", mu1), w("mu2", mu2)];
    if domain.speed() != 0.0 {
        return InvasionVerdict::new(Verdict::Inconclusive, "Cor2.not_applicable", witnesses)
            .with_note("requires a domain without constant drift (c = 0)");
    }
    if !(r1 > mu1 && r2 > mu2) {
        return InvasionVerdict::new(Verdict::Inconclusive, "Cor2.hypotheses", witnesses)
            .with_note("requires r1 > mu1 and r2 > mu2");
    }
    if d1 == d2 {
        let scaled_h1 = (r2 / r1).powf(1.0 / n) * model.h1_hat;
        let verdict = ordered_pair(r2, r1, scaled_h1, model.g2_hat);
        witnesses.extend([w("scaled_h1_hat", scaled_h1), w("g2_hat", model.g2_hat)]);
        return InvasionVerdict::new(verdict, format!("Cor2.case1{}", suffix(verdict)), witnesses);
    }

    let slack = cor2_slack(model, domain, u1star);
    let delta_e = domain.delta_e();
    let spread = (1.0 / d2 - 1.0 / d1).abs() * delta_e;
    let base = (d2 / d1).powf(1.0 / n);
    let invade_threshold = base * (-spread).exp();
    let noninvade_threshold = base * spread.exp();
    let ratio = model.g2_hat / model.h1_hat;
    let verdict = if slack.min >= 0.0 && ratio <= invade_threshold {
        Verdict::Invades
    } else if slack.max <= 0.0 && ratio >= noninvade_threshold {
        Verdict::CannotInvade
    } else {
        Verdict::Inconclusive
    };
    witnesses.extend([
        w("min_slack", slack.min),
        w("max_slack", slack.max),
        w("delta_e", delta_e),
        w("g2_over_h1", ratio),
        w("invade_threshold", invade_threshold),
        w("noninvade_threshold", noninvade_threshold),
    ]);
    InvasionVerdict::new(verdict, format!("Cor2.case2{}", suffix(verdict)), witnesses)
}

/// Range of `rhs - lhs` of the `D1 != D2` field inequality.
#[derive(Debug, Clone, Copy)]
pub struct SlackRange {
    pub min: f64,
    pub max: f64,
}

/// Evaluates `rhs - (1 - D2/D1) v1_t / v1` with `v1 = u1* exp(E / D1)` on nodes
/// `xi in [2 dxi, L0 - 2 dxi]` and every snapshot; `v1_t` by centered differences.
pub fn cor2_slack(
    model: &ReactionModel,
    domain: &DomainMotion,
    u1star: &SpaceTimeField,
) -> SlackRange {
    let (d1, d2) = (model.d1, model.d2);
    let grid = *u1star.grid();
    let (nt, m, dt, l0) = (grid.nt(), grid.m(), grid.dt(), grid.l0());
    let snaps = u1star.period_snapshots();
    let v = |k: usize, i: usize| -> f64 {
        let k = k % nt;
        snaps[k][i] * (domain.e_field(grid.xi(i), u1star.time(k)) / d1).exp()
    };
    let ratio = d2 / d1;
    let mixed = 1.0 / d2 - d2 / (d1 * d1);
    let mut range = SlackRange {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
    };
    for k in 0..nt {
        let t = u1star.time(k);
        let l = domain.length(t);
        let ld = domain.length_rate(t);
        let ldd = domain.length_accel(t);
        let ad = domain.offset_rate(t);
        let add = domain.offset_accel(t);
        for i in 1..m.saturating_sub(1) {
            let xi = grid.xi(i);
            let log_rate = (v(k + 1, i) - v(k + nt - 1, i)) / (2.0 * dt) / v(k, i);
            let lhs = (1.0 - ratio) * log_rate;
            let rhs = model.r2 - ratio * model.r1 - (1.0 - ratio) * ld / (2.0 * l)
                + mixed
                    * (-ad * ad / 4.0
                        + ldd * l * xi * xi / (4.0 * l0 * l0)
                        + add * l * xi / (2.0 * l0));
            let s = rhs - lhs;
            range.min = range.min.min(s);
            range.max = range.max.max(s);
        }
    }
    range
}

/// Averaged eigenvalue bounds for a periodically varying interval (`c = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueBounds {
    /// `<D pi^2 / L^2>`.
    pub lower_static: f64,
    /// `<D pi^2 / L^2 + A'^2 / 4D - Q_bar / 2D>`.
    pub lower_motion: f64,
    pub lower: f64,
    /// `<D pi^2 / L^2 + A'^2 / 4D + Q_low / 2D>`.
    pub upper_integral: f64,
    /// `D pi^2 / w^2` with `w = min(A + L) - max A`, when `w > 0`.
    pub upper_overlap: Option<f64>,
}

impl EigenvalueBounds {
    pub fn upper(&self) -> f64 {
        match self.upper_overlap {
            Some(o) => o.min(self.upper_integral),
            None => self.upper_integral,
        }
    }
}

pub fn eigenvalue_bounds(diffusivity: f64, domain: &DomainMotion) -> EigenvalueBounds {
    eigenvalue_bounds_with(diffusivity, domain, DEFAULT_QUADRATURE_NODES)
}

pub fn eigenvalue_bounds_with(
    diffusivity: f64,
    domain: &DomainMotion,
    nodes: usize,
) -> EigenvalueBounds {
    let d = diffusivity;
    let period = domain.period();
    let dirichlet = |t: f64| d * PI * PI / domain.length(t).powi(2);
    let drift = |t: f64| domain.offset_rate(t).powi(2) / (4.0 * d);
    let lower_static = period_average(dirichlet, period, nodes);
    let lower_motion = period_average(
        |t| dirichlet(t) + drift(t) - domain.q_bounds(t).0 / (2.0 * d),
        period,
        nodes,
    );
    let upper_integral = period_average(
        |t| dirichlet(t) + drift(t) + domain.q_bounds(t).1 / (2.0 * d),
        period,
        nodes,
    );
    let width = domain.overlap_width();
    EigenvalueBounds {
        lower_static,
        lower_motion,
        lower: lower_static.max(lower_motion),
        upper_integral,
        upper_overlap: (width > 0.0).then(|| d * PI * PI / (width * width)),
    }
}

/// Rigid translating interval: `r2 <= mu2` cannot invade, `r2 >= mu2 + beta_hat` invades.
pub fn ex2_check(model: &ReactionModel, speed: f64, length: f64) -> InvasionVerdict {
    let mu2 = translating_eigenvalue(model.d2, speed, length);
    let beta_hat = model.beta_hat();
    let witnesses = vec![
        w("mu2_exact", mu2),
        w("beta_hat", beta_hat),
        w("r2", model.r2),
    ];
    if model.r2 >= mu2 + beta_hat {
        InvasionVerdict::new(Verdict::Invades, "Ex2.invade", witnesses)
    } else if model.r2 <= mu2 {
        InvasionVerdict::new(Verdict::CannotInvade, "Ex2.noninvade", witnesses)
    } else {
        InvasionVerdict::new(Verdict::Inconclusive, "Ex2", witnesses)
    }
}

/// Periodic interval (`c = 0`): the averaged bounds on `mu2` combined with `beta_hat`.
pub fn ex3_check(model: &ReactionModel, domain: &DomainMotion) -> InvasionVerdict {
    let bounds = eigenvalue_bounds(model.d2, domain);
    let beta_hat = model.beta_hat();
    let r2 = model.r2;
    let mut witnesses = vec![
        w("r2", r2),
        w("beta_hat", beta_hat),
        w("lower", bounds.lower),
        w("upper_integral", bounds.upper_integral),
    ];
    if let Some(o) = bounds.upper_overlap {
        witnesses.push(w("upper_overlap", o));
    }
    if domain.speed() != 0.0 {
        return InvasionVerdict::new(Verdict::Inconclusive, "Ex3.not_applicable", witnesses)
            .with_note("requires a domain without constant drift (c = 0)");
    }
    if r2 <= bounds.lower {
        InvasionVerdict::new(Verdict::CannotInvade, "Ex3.noninvade", witnesses)
    } else if r2 >= beta_hat + bounds.upper_integral {
        InvasionVerdict::new(Verdict::Invades, "Ex3.invade.integral", witnesses)
    } else if bounds.upper_overlap.is_some_and(|o| r2 >= beta_hat + o) {
        InvasionVerdict::new(Verdict::Invades, "Ex3.invade.overlap", witnesses)
    } else {
        InvasionVerdict::new(Verdict::Inconclusive, "Ex3", witnesses)
    }
}

/// `sign(r2 - mu_hat)`: growth or decay of the linearised invader.
pub fn linearization_verdict(r2: f64, mu_hat: f64) -> InvasionVerdict {
    let verdict = if r2 > mu_hat {
        Verdict::Invades
    } else if r2 < mu_hat {
        Verdict::CannotInvade
    } else {
        Verdict::Inconclusive
    };
    InvasionVerdict::new(
        verdict,
        "Linearization",
        vec![
            w("r2", r2),
            w("mu_hat", mu_hat),
            w("r2_minus_mu_hat", r2 - mu_hat),
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Agrees,
    Disagrees,
    /// The check was inconclusive or the reference was.
    NotComparable,
}

impl Agreement {
    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Agrees => "agrees",
            Agreement::Disagrees => "disagrees",
            Agreement::NotComparable => "not_comparable",
        }
    }
}

pub fn agreement(check: Verdict, reference: Verdict) -> Agreement {
    if !check.is_decisive() || !reference.is_decisive() {
        Agreement::NotComparable
    } else if check == reference {
        Agreement::Agrees
    } else {
        Agreement::Disagrees
    }
}

/// A check together with its agreement with the linearization criterion.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub verdict: InvasionVerdict,
    pub agreement: Agreement,
}

/// Everything computed for one scenario.
#[derive(Debug, Clone)]
pub struct Report {
    pub mu1: f64,
    pub mu2: f64,
    pub mu_hat: EigenResult,
    /// `max g2(u1*)`; zero when species 1 is extinct.
    pub beta: f64,
    pub beta_hat: f64,
    pub u1star: SteadyState,
    pub u2star: SteadyState,
    /// Averaged bounds on `mu1` and `mu2`, for domains without constant drift.
    pub bounds: Option<[EigenvalueBounds; 2]>,
    pub linearization: InvasionVerdict,
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    pub fn disagreements(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks
            .iter()
            .filter(|c| c.agreement == Agreement::Disagrees)
    }
}

/// Runs the eigen and steady-state solves and every applicable check.
pub fn full_report(scenario: &Scenario) -> Result<Report> {
    let (model, domain, grid) = (&scenario.model, &scenario.domain, scenario.grid);
    let mu1 = principal_eigenpair(model.d1, domain, grid, ZeroPotential)?.mu;
    let mu2 = if model.d2 == model.d1 {
        mu1
    } else {
        principal_eigenpair(model.d2, domain, grid, ZeroPotential)?.mu
    };
    let options = SteadyOptions::default();
    let u1star = periodic_steady_state_with(Species::One, model, domain, grid, options, Some(mu1))?;
    let u2star = periodic_steady_state_with(Species::Two, model, domain, grid, options, Some(mu2))?;
    let mu_hat = mu_hat(model, domain, grid, &u1star.field)?;
    let beta = competition_peak(model, &u1star.field);
    let linearization = linearization_verdict(model.r2, mu_hat.mu);

    let mut verdicts = Vec::new();
    verdicts.push(if u1star.extinct {
        InvasionVerdict::new(
            Verdict::Inconclusive,
            "Prop1.hypotheses",
            vec![w("mu1", mu1)],
        )
        .with_note("species 1 has no positive periodic state")
    } else {
        prop1_check(model, mu2, beta)?
    });
    verdicts.push(if u2star.extinct {
        InvasionVerdict::new(
            Verdict::Inconclusive,
            "Prop2.hypotheses",
            vec![w("mu2", mu2)],
        )
        .with_note("species 2 has no positive periodic state")
    } else {
        prop2_check(model, &u1star.field, &u2star)?
    });
    let drift_free = domain.speed() == 0.0;
    if domain.is_rigid() {
        verdicts.push(cor1_check(model, domain.speed(), domain.length(0.0)));
    }
    if drift_free {
        verdicts.push(cor2_check(model, domain, &u1star.field, mu1, mu2));
    }
    if domain.is_rigid() {
        verdicts.push(ex2_check(model, domain.speed(), domain.length(0.0)));
    }
    if drift_free {
        verdicts.push(ex3_check(model, domain));
    }
    let checks = verdicts
        .into_iter()
        .map(|verdict| CheckOutcome {
            agreement: agreement(verdict.verdict, linearization.verdict),
            verdict,
        })
        .collect();
    let bounds = drift_free.then(|| {
        [
            eigenvalue_bounds(model.d1, domain),
            eigenvalue_bounds(model.d2, domain),
        ]
    });
    Ok(Report {
        mu1,
        mu2,
        mu_hat,
        beta,
        beta_hat: model.beta_hat(),
        u1star,
        u2star,
        bounds,
        linearization,
        checks,
    })
}
