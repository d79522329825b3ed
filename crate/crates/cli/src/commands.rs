use std::fmt::Write as _;

use holant::approx::{approx_partition, verify_zero_free, zero_free_constants, ApproxCertificate, ApproxOptions};
use holant::exact::{exact_partition, exact_poly_by_interpolation, vertex_model_partition};
use holant::exptype::{chi_k_coefficients, estimate_root_radius, eval_exp_type, exp_type_polynomial, tutte_direct, ExpTypeSpec, MAX_SUBSET_EDGES};
use holant::graph::simple_graphs_up_to_isomorphism;
use holant::limits::{convergence_run, log_potential_check};
use holant::models::RegionParams;
use holant::poly::poly_roots;
use holant::selftest::run_selftest;
use holant::{Complex64, HolantError, Result};
use serde_json::{json, Value};

use crate::args::{Command, Common};
use crate::input::{self, Model};

/// Largest vertex count of the sample graphs used to estimate a root radius.
const ROOT_SAMPLE_VERTICES: usize = 6;

/// Rendered result of a command. `ok` is false when the command ran but
/// observed a violation (a failed region check or self-test).
pub struct Output {
    pub json: String,
    pub text: String,
    pub ok: bool,
}

impl Output {
    fn new(json: String, text: String) -> Self {
        Output { json, text, ok: true }
    }
}

pub fn run(command: &Command, common: &Common) -> Result<Output> {
    match command {
        Command::Exact => exact(common),
        Command::Approx => approx(common),
        Command::Tutte { v, q } => tutte(common, *v, *q),
        Command::Exptype { poly, x, radius } => exptype(common, poly, *x, *radius),
        Command::Limits { sizes, tolerance, log_potential } => limits(common, sizes, *tolerance, *log_potential),
        Command::Roots { reversed, poly } => roots(common, *reversed, poly.as_deref()),
        Command::RegionCheck { eta, theta, samples } => region_check(common, *eta, *theta, *samples),
        Command::Constants => Ok(constants()),
        Command::Selftest => Ok(selftest(common)),
    }
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("values serialize")
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn complex_text(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn options(common: &Common) -> Result<ApproxOptions> {
    Ok(ApproxOptions {
        engine: common.engine,
        budget: input::budget(common)?,
    })
}

fn certificate_output(cert: &ApproxCertificate) -> Output {
    let mut text = String::new();
    let _ = writeln!(text, "value      {}", complex_text(cert.value));
    let _ = writeln!(text, "ln value   {}", complex_text(cert.log_value));
    let _ = writeln!(text, "M          {}", cert.radius);
    let _ = writeln!(text, "q0         {}", cert.q0);
    let _ = writeln!(text, "order n    {}", cert.n);
    let _ = writeln!(text, "bound      {}", cert.bound);
    if cert.heuristic_radius {
        let _ = writeln!(text, "radius is a heuristic estimate, not proven");
    }
    Output::new(cert.to_json(), text)
}

fn exact(common: &Common) -> Result<Output> {
    let g = input::graph(common)?;
    let budget = input::budget(common)?;
    let value = match input::model(common, g.max_degree())? {
        Model::Edge(h) => exact_partition(&g, &h, budget)?,
        Model::Vertex(vm) => vertex_model_partition(&g, &vm, budget)?,
    };
    Ok(Output::new(pretty(&complex_json(value)), complex_text(value)))
}

fn approx(common: &Common) -> Result<Output> {
    let g = input::graph(common)?;
    let h = input::model(common, g.max_degree())?.edge(g.max_degree())?;
    let cert = approx_partition(&g, &h, common.eps, common.mode, options(common)?)?;
    Ok(certificate_output(&cert))
}

fn tutte(common: &Common, v: Complex64, q: Option<Complex64>) -> Result<Output> {
    let g = input::graph(common)?;
    if let Some(q) = q {
        let value = tutte_direct(&g, q, v)?;
        return Ok(Output::new(pretty(&complex_json(value)), complex_text(value)));
    }
    let coeffs = chi_k_coefficients(&g, &ExpTypeSpec::tutte(v))?;
    let text = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| format!("q^{i}  {}\n", complex_text(*c)))
        .collect();
    let json = Value::Array(coeffs.iter().copied().map(complex_json).collect());
    Ok(Output::new(pretty(&json), text))
}

fn exptype(common: &Common, poly: &str, x: Complex64, radius: Option<f64>) -> Result<Output> {
    let g = input::graph(common)?;
    let spec = ExpTypeSpec::parse(poly)?;
    let spec = match radius {
        Some(c) => spec.with_root_radius(c),
        None => {
            let delta = g.max_degree();
            let mut samples = Vec::new();
            for n in 1..=ROOT_SAMPLE_VERTICES {
                samples.extend(
                    simple_graphs_up_to_isomorphism(n)?
                        .into_iter()
                        .filter(|s| s.max_degree() <= delta),
                );
            }
            if g.m() <= MAX_SUBSET_EDGES {
                samples.push(g.clone());
            }
            let c = estimate_root_radius(&spec, delta, &samples)?;
            eprintln!("root radius {c} estimated from {} sample graphs", samples.len());
            spec.with_heuristic_radius(c)
        }
    };
    let cert = eval_exp_type(&g, &spec, x, common.eps, common.mode, input::budget(common)?)?;
    Ok(certificate_output(&cert))
}

fn limits(common: &Common, sizes: &[usize], tolerance: f64, log_potential: bool) -> Result<Output> {
    if log_potential {
        let g = input::graph(common)?;
        let h = input::model(common, g.max_degree())?.edge(g.max_degree())?;
        let check = log_potential_check(&g, &h, input::budget(common)?)?;
        let text = format!("lhs {}\nrhs {}\ndiscrepancy {}\n", check.lhs, check.rhs, check.discrepancy);
        let json = serde_json::to_string_pretty(&check)?;
        return Ok(Output::new(json, text));
    }
    if sizes.is_empty() {
        return Err(HolantError::Parse("--sizes is required for a convergence run".into()));
    }
    let family = input::family(common)?;
    let degree = family.declared_max_degree();
    let h = input::model(common, degree)?.edge(degree)?;
    let report = convergence_run(&family, sizes, &h, common.eps, tolerance, options(common)?)?;
    Ok(Output::new(report.to_json(), report.to_table()))
}

fn roots(common: &Common, reversed: bool, poly: Option<&str>) -> Result<Output> {
    let g = input::graph(common)?;
    let p = match poly {
        Some(name) => exp_type_polynomial(&g, &ExpTypeSpec::parse(name)?)?,
        None => {
            let h = input::model(common, g.max_degree())?.edge(g.max_degree())?;
            let q = exact_poly_by_interpolation(&g, &h, input::budget(common)?)?;
            if reversed {
                let scale = (h.k() as f64).powi(-(g.m() as i32));
                q.reversed(g.n()).scale(Complex64::new(scale, 0.0))
            } else {
                q
            }
        }
    };
    if p.is_zero() {
        return Err(HolantError::Precondition("the polynomial is identically zero".into()));
    }
    let found = poly_roots(&p)?;
    let moduli: Vec<f64> = found.iter().map(|z| z.norm()).collect();
    let min = moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let max = moduli.iter().copied().fold(0.0, f64::max);
    let json = json!({
        "degree": p.degree().unwrap_or(0),
        "roots": found.iter().copied().map(complex_json).collect::<Vec<_>>(),
        "min_modulus": if min.is_finite() { json!(min) } else { Value::Null },
        "max_modulus": max,
    });
    let mut text: String = found.iter().map(|z| format!("{}  |z| = {}\n", complex_text(*z), z.norm())).collect();
    let _ = writeln!(text, "min |z| {min}, max |z| {max}");
    Ok(Output::new(pretty(&json), text))
}

fn region_check(common: &Common, eta: f64, theta: Option<f64>, samples: usize) -> Result<Output> {
    let g = input::graph(common)?;
    let theta = theta.unwrap_or(zero_free_constants().theta_star);
    let params = RegionParams::for_degree(eta, theta, g.max_degree())?;
    let report = verify_zero_free(&g, common.colors, &params, samples, common.seed, input::budget(common)?)?;
    let text = format!(
        "samples {}\nmin |p| {}\nlower bound {}\nzero violations {}\nbound violations {}\n{}\n",
        report.samples,
        report.min_abs,
        report.lower_bound,
        report.zero_violations,
        report.bound_violations,
        if report.held() { "held" } else { "VIOLATED" }
    );
    Ok(Output {
        json: serde_json::to_string_pretty(&report)?,
        text,
        ok: report.held(),
    })
}

fn constants() -> Output {
    let c = zero_free_constants();
    let betas: Vec<f64> = (1..=8).map(|d| c.beta_star(d)).collect();
    let json = json!({ "theta_star": c.theta_star, "x_star": c.x_star, "beta_star": betas });
    let mut text = format!("theta* {}\nx*     {}\n", c.theta_star, c.x_star);
    for (d, b) in betas.iter().enumerate() {
        let _ = writeln!(text, "beta*({}) {b}", d + 1);
    }
    Output::new(pretty(&json), text)
}

fn selftest(common: &Common) -> Output {
    let report = run_selftest(common.seed);
    let text = report
        .checks
        .iter()
        .map(|c| format!("{} {} ({:.2}s): {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.seconds, c.detail))
        .collect();
    Output {
        json: serde_json::to_string_pretty(&report).expect("report serializes"),
        text,
        ok: report.passed(),
    }
}
