use serde::Serialize;
use serde_json::json;

use super::format::{as_pure, QpdFile, StateSpec};
use super::{operator_json, tolerances, CliError, CliResult, Report, EXIT_CHECK, EXIT_PARSE};
use crate::channels::{is_cptp, is_hptp, optimal_qpd, QpDecomposition};
use crate::cloning::{
    build_cloning_map, check_virtually_clonable, cost_bounds, cost_lower_bound, cost_upper_bound, default_prior_grid,
    discrimination_cloner, min_copies_for_independence, optimal_cost, optimal_pure_map, pure_pair_cost, CloneProblem,
};
use crate::linalg::{DensityMatrix, HermitianOperator, PureState};
use crate::sampler::{empirical_coverage, exact_expectation, hoeffding_bound, simulate_virtual_measurement, DichotomicObservable};
use crate::sdp::SolverOptions;

const HOEFFDING_EPS: [f64; 3] = [0.01, 0.05, 0.1];
const MAX_COPIES: usize = 16;

fn resolve(specs: &[StateSpec]) -> CliResult<Vec<DensityMatrix>> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| s.resolve().map_err(|e| CliError::new(EXIT_PARSE, format!("states[{i}]: {e}"))))
        .collect()
}

fn pair(states: &[DensityMatrix]) -> CliResult<(&DensityMatrix, &DensityMatrix)> {
    match states {
        [a, b] => Ok((a, b)),
        _ => Err(CliError::new(EXIT_PARSE, format!("this command needs exactly two states, got {}", states.len()))),
    }
}

fn pure_pair(states: &[DensityMatrix]) -> Option<(PureState, PureState)> {
    match states {
        [a, b] => Some((as_pure(a).ok()?, as_pure(b).ok()?)),
        _ => None,
    }
}

#[derive(Serialize)]
struct QpdSummary {
    cost: f64,
    lambda_plus: f64,
    lambda_minus: f64,
    plus_cptp: bool,
    minus_cptp: bool,
    plus_min_eigenvalue: Option<f64>,
    minus_min_eigenvalue: Option<f64>,
}

fn summarize(q: &QpDecomposition) -> QpdSummary {
    let p = is_cptp(&q.choi_plus, 1e-8);
    let m = is_cptp(&q.choi_minus, 1e-8);
    QpdSummary {
        cost: q.cost(),
        lambda_plus: q.lambda_plus,
        lambda_minus: q.lambda_minus,
        plus_cptp: p.ok,
        minus_cptp: m.ok,
        plus_min_eigenvalue: p.min_eigenvalue,
        minus_min_eigenvalue: m.min_eigenvalue,
    }
}

pub fn cmd_clonable(specs: &[StateSpec]) -> CliResult<Report> {
    let mut r = Report::new("clonable", json!({ "states": specs }));
    let states = resolve(specs)?;
    let tol = tolerances(None);
    let c = r.timed("clonability", || check_virtually_clonable(&states, tol.rank))?;
    r.set("states", states.len());
    r.set("clonable", c.clonable);
    r.set("rank", c.rank);
    r.set("gram_singular_values", &c.gram_singular_values);
    if !c.clonable {
        let k = r.timed("min_copies", || min_copies_for_independence(&states, MAX_COPIES))?;
        r.set("min_copies", k);
        r.no_go = true;
    }
    Ok(r)
}

pub fn cmd_cost(specs: &[StateSpec], k: usize, n: usize, tol: Option<f64>) -> CliResult<Report> {
    let t = tolerances(tol);
    let mut r = Report::new("cost", json!({ "states": specs, "k": k, "n": n, "tol": t.sdp }));
    let states = resolve(specs)?;
    let problem = CloneProblem::new(states.clone(), k, n)?;
    let c = check_virtually_clonable(&problem.inputs(), t.rank)?;
    if !c.clonable {
        return Err(CliError::new(
            super::EXIT_NO_GO,
            format!(
                "no-go: the {}-copy inputs span rank {} < {} states; linearly dependent sets admit no HPTP cloner",
                k,
                c.rank,
                states.len()
            ),
        ));
    }
    let opts = SolverOptions::from(&t);
    let res = r.timed("sdp", || optimal_cost(&problem, &opts))?;
    r.set("eta", res.eta);
    r.set("primal_objective", res.primal_obj);
    r.set("dual_objective", res.dual_obj);
    r.set("duality_gap", res.gap);
    r.set("iterations", res.iterations);
    r.set("qpd", summarize(&res.qpd));
    r.set("clone_residual", res.clone_residual);
    r.certificates = json!({
        "check": res.certificate_check,
        "y": res.dual_certificate.y.iter().map(operator_json).collect::<Vec<_>>(),
        "m_plus": operator_json(&res.dual_certificate.m_plus),
        "m_minus": operator_json(&res.dual_certificate.m_minus),
        "objective": res.dual_certificate.objective,
    });
    let loose = t.sdp.sqrt().max(1e-6);
    r.check("duality gap", res.gap < loose, format!("|primal - dual| = {:e}", res.gap));
    r.check(
        "dual certificate",
        res.certificate_check.feasible,
        format!(
            "min eigenvalues {:e}, {:e}",
            res.certificate_check.upper_min_eig, res.certificate_check.lower_min_eig
        ),
    );
    r.check("solution verification", res.verification.passed(), res.verification.failures().join(", "));
    let s = summarize(&res.qpd);
    r.check("branches CPTP", s.plus_cptp && s.minus_cptp, format!("cost {}", s.cost));
    r.check("clone residual", res.clone_residual < loose, format!("{:e}", res.clone_residual));

    if states.len() == 2 && k == 1 {
        let b = r.timed("bounds", || cost_bounds(&states[0], &states[1], n, &default_prior_grid()))?;
        r.set("bounds", b);
        r.check(
            "bounds sandwich",
            b.lower - 1e-7 <= res.eta && res.eta <= b.upper + 1e-7,
            format!("{} <= {} <= {}", b.lower, res.eta, b.upper),
        );
    }
    if let Some((a, b)) = pure_pair(&states) {
        let exact = pure_pair_cost(&a, &b, k, n)?;
        r.set("analytic_eta", exact);
        let tol_a = (10.0 * t.sdp).max(1e-5);
        r.check("analytic agreement", (res.eta - exact).abs() < tol_a, format!("|eta - analytic| = {:e}", (res.eta - exact).abs()));
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Priors {
    Grid,
    Value(f64),
}

impl std::str::FromStr for Priors {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "grid" {
            return Ok(Self::Grid);
        }
        match s.parse::<f64>() {
            Ok(p) if p > 0.0 && p < 1.0 => Ok(Self::Value(p)),
            _ => Err(format!("expected 'grid' or a prior in (0, 1), got '{s}'")),
        }
    }
}

pub fn cmd_bounds(specs: &[StateSpec], n: usize, priors: Priors) -> CliResult<Report> {
    let prior_echo = match priors {
        Priors::Grid => json!("grid"),
        Priors::Value(p) => json!(p),
    };
    let mut r = Report::new("bounds", json!({ "states": specs, "n": n, "priors": prior_echo }));
    let states = resolve(specs)?;
    let (a, b) = pair(&states)?;
    match priors {
        Priors::Grid => {
            let bounds = r.timed("bounds", || cost_bounds(a, b, n, &default_prior_grid()))?;
            r.set("lower", bounds.lower);
            r.set("upper", bounds.upper);
            r.set("priors_used", bounds.priors_used);
            r.set("equal_prior_lower", bounds.equal_prior_lower);
            r.check(
                "grid improves on equal priors",
                bounds.lower >= bounds.equal_prior_lower,
                format!("{} >= {}", bounds.lower, bounds.equal_prior_lower),
            );
        }
        Priors::Value(p) => {
            let lower = cost_lower_bound(a, b, n, p)?;
            r.set("lower", lower);
            r.set("upper", cost_upper_bound(a, b)?);
            r.set("priors_used", (p, 1.0 - p));
        }
    }
    let (lo, hi) = (r.get_f64("lower").unwrap_or(f64::NAN), r.get_f64("upper").unwrap_or(f64::NAN));
    r.check("lower <= upper", lo <= hi + 1e-9, format!("{lo} <= {hi}"));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapMethod {
    /// The unique linear map fixed by the images of a basis extending the inputs.
    BasisImages,
    PureOptimal,
    Discrimination,
}

impl MapMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::BasisImages => "thm1",
            Self::PureOptimal => "pure-optimal",
            Self::Discrimination => "discrimination",
        }
    }
}

impl std::str::FromStr for MapMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "thm1" => Ok(Self::BasisImages),
            "pure-optimal" => Ok(Self::PureOptimal),
            "discrimination" => Ok(Self::Discrimination),
            _ => Err(format!("unknown method '{s}' (thm1, pure-optimal, discrimination)")),
        }
    }
}

/// Builds a `1 → n` cloner; the decomposition is returned next to the report.
pub fn cmd_map(specs: &[StateSpec], method: MapMethod, n: usize, tol: Option<f64>) -> CliResult<(Report, QpdFile)> {
    let t = tolerances(tol);
    let mut r = Report::new("map", json!({ "states": specs, "method": method.name(), "n": n, "tol": t.sdp }));
    let states = resolve(specs)?;
    let problem = CloneProblem::new(states.clone(), 1, n)?;
    let (q, residual_tol) = match method {
        MapMethod::BasisImages => {
            let j = r.timed("cloning_map", || build_cloning_map(&states, n))?;
            let h = is_hptp(&j, 1e-9);
            r.set("hptp", h);
            r.check("HPTP", h.ok, format!("trace deviation {:e}", h.trace_deviation));
            let exact = problem.clone_residual(|x| crate::channels::apply_choi(&j, x))?;
            r.set("map_clone_residual", exact);
            r.check("map clones inputs", exact < 1e-9, format!("{exact:e}"));
            let opt = r.timed("optimal_qpd", || optimal_qpd(&j, &SolverOptions::from(&t)))?;
            r.set("qpd_gap", opt.gap);
            (opt.qpd, t.sdp.sqrt().max(1e-6))
        }
        MapMethod::PureOptimal => {
            let (a, b) = pure_pair(&states).ok_or_else(|| {
                CliError::new(EXIT_PARSE, "pure-optimal needs exactly two pure states".to_string())
            })?;
            let q = r.timed("pure_map", || optimal_pure_map((&a, &b), (&a.tensor_power(n), &b.tensor_power(n))))?;
            let exact = pure_pair_cost(&a, &b, 1, n)?;
            r.set("analytic_cost", exact);
            r.check("exact cost", (q.cost() - exact).abs() < 1e-12, format!("{} vs {}", q.cost(), exact));
            (q, 1e-9)
        }
        MapMethod::Discrimination => {
            let q = r.timed("discrimination", || discrimination_cloner(&states, n))?;
            (q, 1e-9)
        }
    };
    let s = summarize(&q);
    r.check("branches CPTP", s.plus_cptp && s.minus_cptp, format!("λ+ = {}, λ- = {}", s.lambda_plus, s.lambda_minus));
    r.set("qpd", s);
    let residual = problem.clone_residual(|x| q.apply(x))?;
    r.set("clone_residual", residual);
    r.check("clone residual", residual < residual_tol, format!("{residual:e}"));
    Ok((r, QpdFile::from_qpd(&q)))
}

/// `X` given as a Pauli string (`"XX"`) or a JSON `[re, im]` matrix.
pub fn parse_observable(s: &str) -> CliResult<DichotomicObservable> {
    let t = s.trim();
    let x = if t.starts_with('[') {
        let m: super::MatrixJson =
            serde_json::from_str(t).map_err(|e| CliError::new(EXIT_PARSE, format!("observable: {e}")))?;
        DichotomicObservable::from_general(HermitianOperator::new(super::matrix_from_json(&m)?)?)
    } else {
        DichotomicObservable::pauli(t)
    };
    x.map_err(|e| CliError::new(EXIT_PARSE, format!("observable: {e}")))
}

#[derive(Debug, Clone)]
pub struct SimulateOptions {
    /// Input state; tensor powers are taken when its dimension is smaller than the channel input.
    pub state: StateSpec,
    pub observable: String,
    pub rounds: u64,
    pub seed: u64,
    pub trials: Option<u64>,
    pub epsilon: f64,
}

pub fn cmd_simulate(qpd: &QpdFile, o: &SimulateOptions) -> CliResult<Report> {
    let mut r = Report::new(
        "simulate",
        json!({
            "qpd": qpd, "state": o.state, "observable": o.observable,
            "rounds": o.rounds, "seed": o.seed, "trials": o.trials, "epsilon": o.epsilon,
        }),
    );
    r.seeds.push(o.seed);
    let q = qpd.to_qpd()?;
    let rho = o.state.resolve().map_err(|e| CliError::new(EXIT_PARSE, format!("state: {e}")))?;
    let x = parse_observable(&o.observable)?;
    let est = r.timed("sampling", || simulate_virtual_measurement(&q, &rho, &x, o.rounds, o.seed))?;
    let truth = exact_expectation(&q, &rho, &x)?;
    r.set("estimate", &est);
    r.set("exact", truth);
    if let Some((lo, hi)) = est.rescaling {
        r.set("estimate_original_scale", x.to_original(est.mean));
        r.set("exact_original_scale", x.to_original(truth));
        r.set("note", format!("observable rescaled from [{lo}, {hi}] to [-1, 1]; eta_used is the rescaled overhead"));
    }
    let curve: serde_json::Map<_, _> = HOEFFDING_EPS
        .iter()
        .map(|&e| (format!("eps={e}"), json!(hoeffding_bound(est.eta_used, est.rounds, e))))
        .collect();
    r.set("hoeffding", curve);
    r.check(
        "second moment",
        est.second_moment == est.eta_used * est.eta_used,
        format!("{} = eta^2", est.second_moment),
    );
    let five_sigma = 5.0 * est.eta_used / (est.rounds as f64).sqrt();
    r.check(
        "mean within 5 eta / sqrt(N)",
        (est.mean - truth).abs() <= five_sigma,
        format!("|{} - {}| <= {}", est.mean, truth, five_sigma),
    );
    if let Some(trials) = o.trials {
        let cov = r.timed("coverage", || empirical_coverage(&q, &rho, &x, o.rounds, trials, o.epsilon, o.seed))?;
        r.set("coverage", cov);
        r.check(
            "coverage",
            cov.within_bound(),
            format!("{} <= {:e} + {:e}", cov.fraction, cov.bound, cov.slack),
        );
    }
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct DemoOptions {
    pub seed: u64,
    pub rounds: u64,
    pub trials: u64,
    pub trial_rounds: u64,
}

impl Default for DemoOptions {
    fn default() -> Self {
        Self { seed: 7, rounds: 1_000_000, trials: 200, trial_rounds: 10_000 }
    }
}

fn absorb(r: &mut Report, stage: &str, sub: &Report) {
    r.set(stage, &sub.results);
    for c in &sub.checks {
        r.check(&format!("{stage}: {}", c.name), c.passed, c.detail.clone());
    }
    for (k, v) in &sub.timings {
        *r.timings.entry(format!("{stage}.{k}")).or_default() += v;
    }
}

/// The `|0⟩, |+⟩` pipeline end to end: clonability, cost, bounds, maps,
/// a serialized round trip and sampling.
pub fn cmd_demo(o: &DemoOptions) -> CliResult<Report> {
    let specs = vec![StateSpec::Preset("zero".into()), StateSpec::Preset("plus".into())];
    let mut r = Report::new(
        "demo",
        json!({ "states": specs, "seed": o.seed, "rounds": o.rounds, "trials": o.trials, "trial_rounds": o.trial_rounds }),
    );
    r.seeds.push(o.seed);
    let sqrt32 = 1.5f64.sqrt();

    let c = cmd_clonable(&specs)?;
    r.check("clonable", c.get("clonable") == Some(&json!(true)), "zero, plus linearly independent");
    absorb(&mut r, "clonable", &c);

    let cost = cmd_cost(&specs, 1, 2, None)?;
    let eta = cost.get_f64("eta").unwrap_or(f64::NAN);
    r.check("cost = sqrt(3/2)", (eta - sqrt32).abs() < 1e-6, format!("{eta}"));
    absorb(&mut r, "cost", &cost);
    r.certificates = cost.certificates.clone();

    let bounds = cmd_bounds(&specs, 2, Priors::Grid)?;
    let lo = bounds.get_f64("lower").unwrap_or(f64::NAN);
    let hi = bounds.get_f64("upper").unwrap_or(f64::NAN);
    r.check("lower bound", (lo - sqrt32).abs() < 1e-9, format!("{lo}"));
    r.check("upper bound", (hi - (2.0 * 2f64.sqrt() - 1.0)).abs() < 1e-9, format!("{hi}"));
    absorb(&mut r, "bounds", &bounds);

    let (thm1, _) = cmd_map(&specs, MapMethod::BasisImages, 2, None)?;
    absorb(&mut r, "map_thm1", &thm1);
    let (disc, _) = cmd_map(&specs, MapMethod::Discrimination, 2, None)?;
    let dc = disc.get("qpd").and_then(|v| v.get("cost")).and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    r.check("discrimination cost = 2 sqrt 2 - 1", (dc - (2.0 * 2f64.sqrt() - 1.0)).abs() < 1e-9, format!("{dc}"));
    absorb(&mut r, "map_discrimination", &disc);
    let (pure, file) = cmd_map(&specs, MapMethod::PureOptimal, 2, None)?;
    absorb(&mut r, "map_pure", &pure);

    let text = serde_json::to_string(&file).map_err(|e| CliError::new(EXIT_CHECK, e.to_string()))?;
    let reloaded = QpdFile::parse(&text)?;
    let q = reloaded.to_qpd()?;
    let problem = CloneProblem::new(resolve(&specs)?, 1, 2)?;
    let rt = problem.clone_residual(|x| q.apply(x))?;
    r.set("round_trip_residual", rt);
    r.check("QPD round trip", rt < 1e-8, format!("{rt:e}"));

    let sim = cmd_simulate(
        &reloaded,
        &SimulateOptions {
            state: StateSpec::Preset("plus".into()),
            observable: "XX".into(),
            rounds: o.rounds,
            seed: o.seed,
            trials: None,
            epsilon: 0.1,
        },
    )?;
    absorb(&mut r, "simulate", &sim);
    let cov = cmd_simulate(
        &reloaded,
        &SimulateOptions {
            state: StateSpec::Preset("zero".into()),
            observable: "ZZ".into(),
            rounds: o.trial_rounds,
            seed: o.seed,
            trials: Some(o.trials),
            epsilon: 0.1,
        },
    )?;
    absorb(&mut r, "coverage", &cov);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn presets(names: &[&str]) -> Vec<StateSpec> {
        names.iter().map(|s| StateSpec::Preset(s.to_string())).collect()
    }

    #[test]
    fn clonable_examples() {
        let r = cmd_clonable(&presets(&["zero", "plus"])).unwrap();
        assert_eq!(r.get("clonable"), Some(&json!(true)));
        assert_eq!(r.exit_code(), 0);
        let r = cmd_clonable(&presets(&["zero", "one", "mixed"])).unwrap();
        assert_eq!(r.get("clonable"), Some(&json!(false)));
        assert_eq!(r.get("min_copies"), Some(&json!(2)));
        assert_eq!(r.exit_code(), 3);
        assert_eq!(cmd_clonable(&presets(&["y+"])).unwrap().get("clonable"), Some(&json!(true)));
    }

    #[test]
    fn cost_examples() {
        let r = cmd_cost(&presets(&["zero", "plus"]), 1, 2, None).unwrap();
        assert!((r.get_f64("eta").unwrap() - 1.224_744_871_391_589).abs() < 1e-6);
        assert!(r.all_passed(), "{}", r.table());
        let r = cmd_cost(&presets(&["zero", "one"]), 1, 2, None).unwrap();
        assert!((r.get_f64("eta").unwrap() - 1.0).abs() < 1e-6);
        let e = cmd_cost(&presets(&["zero", "one", "mixed"]), 1, 2, None).unwrap_err();
        assert_eq!(e.code, 3);
        assert!(e.message.contains("no-go"));
    }

    #[test]
    fn bounds_examples() {
        let r = cmd_bounds(&presets(&["zero", "plus"]), 2, Priors::Grid).unwrap();
        assert!((r.get_f64("lower").unwrap() - 1.22474).abs() < 1e-5);
        assert!((r.get_f64("upper").unwrap() - 1.82843).abs() < 1e-5);
        let r = cmd_bounds(&presets(&["zero", "one"]), 2, Priors::Value(0.5)).unwrap();
        assert!((r.get_f64("lower").unwrap() - 1.0).abs() < 1e-9);
        assert!((r.get_f64("upper").unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(cmd_bounds(&presets(&["zero"]), 2, Priors::Grid).unwrap_err().code, EXIT_PARSE);
    }

    #[test]
    fn map_examples() {
        let s = presets(&["zero", "plus"]);
        let (r, f) = cmd_map(&s, MapMethod::PureOptimal, 2, None).unwrap();
        assert!(r.all_passed(), "{}", r.table());
        assert!((f.lambda_plus + f.lambda_minus - 1.5f64.sqrt()).abs() < 1e-12);
        let (r, f) = cmd_map(&s, MapMethod::Discrimination, 2, None).unwrap();
        assert!(r.all_passed());
        assert!((f.lambda_plus + f.lambda_minus - (2.0 * 2f64.sqrt() - 1.0)).abs() < 1e-9);
        let (r, _) = cmd_map(&s, MapMethod::BasisImages, 2, None).unwrap();
        assert!(r.all_passed(), "{}", r.table());
    }

    #[test]
    fn simulate_is_reproducible() {
        let (_, f) = cmd_map(&presets(&["zero", "plus"]), MapMethod::PureOptimal, 2, None).unwrap();
        let o = SimulateOptions {
            state: StateSpec::Preset("plus".into()),
            observable: "XX".into(),
            rounds: 20_000,
            seed: 3,
            trials: None,
            epsilon: 0.1,
        };
        let a = cmd_simulate(&f, &o).unwrap();
        let b = cmd_simulate(&f, &o).unwrap();
        assert_eq!(a.results, b.results);
        assert!(a.all_passed());
        assert_eq!(a.get("hoeffding").unwrap().as_object().unwrap().len(), 3);
    }

    #[test]
    fn general_observable_reports_rescaling() {
        let (_, f) = cmd_map(&presets(&["zero", "plus"]), MapMethod::PureOptimal, 2, None).unwrap();
        let obs = "[[[2,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]";
        let o = SimulateOptions {
            state: StateSpec::Preset("zero".into()),
            observable: obs.into(),
            rounds: 10_000,
            seed: 1,
            trials: None,
            epsilon: 0.1,
        };
        let r = cmd_simulate(&f, &o).unwrap();
        assert!(r.get("note").is_some());
        assert!((r.get_f64("exact_original_scale").unwrap() - 2.0).abs() < 1e-9);
    }
}
