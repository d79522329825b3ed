//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. A criterion also fails when it exceeds its time
//! limit.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use holant::approx::{
    approx_partition, q_derivative, verify_zero_free, zero_free_constants, ApproxOptions,
    DerivativeEngine, Mode,
};
use holant::error::Result;
use holant::exact::{exact_partition, exact_poly_by_interpolation};
use holant::exptype::{chi_k_coefficients, estimate_root_radius, eval_exp_type, tutte_direct, ExpTypeSpec};
use holant::graph::{generate, simple_graphs_up_to_isomorphism, GraphFamilySpec};
use holant::limits::{cycle_transfer_pf, dominant_eigenvalue, log_potential_check, normalized_pf, PfEngine};
use holant::models::{
    apply_orthogonal_model, model_from_predicate, EdgeColoringModel, perturbed_ones, random_orthogonal, PredicateKind,
    RegionParams,
};
use holant::poly::{poly_roots, ComplexPoly};
use holant::selftest::{
    count_matchings, count_proper_colorings, random_bounded_multigraph,
    random_model_with_deviation, random_simple_graph, rel_diff,
};
use holant::Budget;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<(bool, String)>;

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + criterion)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn constants() -> Outcome {
    let z = zero_free_constants();
    let ok = (z.theta_star - 1.72067).abs() <= 1e-4
        && (z.x_star - 1.12219).abs() <= 1e-4
        && (z.beta_star(1) - 0.71885).abs() <= 1e-4;
    Ok((
        ok,
        format!("theta*={:.6} x*={:.6} beta*(1)={:.6}", z.theta_star, z.x_star, z.beta_star(1)),
    ))
}

fn matching_oracle() -> Outcome {
    let h = model_from_predicate(PredicateKind::Matching, 2, 6)?;
    let mut graphs = Vec::new();
    for n in 0..=7 {
        graphs.extend(simple_graphs_up_to_isomorphism(n)?);
    }
    let classes = graphs.len();
    let mut r = rng(2);
    for _ in 0..10_000 {
        let n = r.gen_range(1..=7);
        let p = r.gen_range(0.1..0.9);
        graphs.push(random_simple_graph(n, p, &mut r));
    }
    let mismatches: Vec<String> = graphs
        .par_iter()
        .filter_map(|g| match exact_partition(g, &h, Budget::DEFAULT) {
            Ok(p) if p == c(count_matchings(g) as f64, 0.0) => None,
            Ok(p) => Some(format!("{g}: engine {p}, oracle {}", count_matchings(g))),
            Err(e) => Some(format!("{g}: {e}")),
        })
        .collect();
    Ok((
        mismatches.is_empty(),
        format!(
            "{} graphs ({classes} isomorphism classes + 10000 sampled), {} mismatches{}",
            graphs.len(),
            mismatches.len(),
            mismatches.first().map(|m| format!("; first {m}")).unwrap_or_default()
        ),
    ))
}

fn derivative_formula() -> Outcome {
    let mut r = rng(3);
    let cases: Vec<_> = (0..50)
        .map(|i| {
            let k = 2 + i % 2;
            let n = r.gen_range(2..=8);
            let g = random_bounded_multigraph(n, r.gen_range(1..=12), 6, &mut r);
            let h = random_model_with_deviation(k, g.max_degree() as u32, 1.0, &mut r);
            (g, h)
        })
        .collect();
    let worst = cases
        .par_iter()
        .map(|(g, h)| -> Result<f64> {
            let poly = exact_poly_by_interpolation(g, h, Budget::DEFAULT)?;
            let mut worst: f64 = 0.0;
            let mut fact = 1.0;
            for m in 0..=g.n() {
                if m > 0 {
                    fact *= m as f64;
                }
                let d = q_derivative(g, h, m, Budget::DEFAULT)?;
                worst = worst.max(rel_diff(d, poly.coeff(m) * fact));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((worst <= 1e-7, format!("50 graphs, max relative difference {worst:.2e}")))
}

fn certified_approximation() -> Outcome {
    let mut r = rng(4);
    let cases: Vec<_> = (0..50)
        .map(|i| {
            let k = 2 + i % 2;
            let n = r.gen_range(3..=9);
            let m = if k == 2 { 16 } else { 11 };
            let g = random_bounded_multigraph(n, m, 4, &mut r);
            let h = random_model_with_deviation(k, 4, 0.05, &mut r);
            (g, h)
        })
        .collect();
    let results = cases
        .par_iter()
        .map(|(g, h)| -> Result<(f64, f64, bool)> {
            let exact = exact_partition(g, h, Budget::DEFAULT)?;
            let cert = approx_partition(g, h, 1e-3, Mode::Multiplicative, ApproxOptions::default())?;
            let ratio = cert.value / exact;
            let within_bound = (cert.log_value - exact.ln()).norm() <= cert.bound;
            Ok((ratio.norm().ln().abs(), ratio.arg().abs(), within_bound))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_mod = results.iter().map(|x| x.0).fold(0.0, f64::max);
    let max_arg = results.iter().map(|x| x.1).fold(0.0, f64::max);
    let bound_fail = results.iter().filter(|x| !x.2).count();
    Ok((
        max_mod <= 1e-3 && max_arg <= 1e-3 && bound_fail == 0,
        format!("50 pairs, max |ln|ratio|| {max_mod:.2e}, max |arg| {max_arg:.2e}, bound violations {bound_fail}"),
    ))
}

fn zero_free_falsification() -> Outcome {
    let theta = zero_free_constants().theta_star;
    let mut r = rng(5);
    let graphs: Vec<_> = (0..20)
        .map(|_| {
            let n = r.gen_range(3..=8);
            random_bounded_multigraph(n, 12, 4, &mut r)
        })
        .collect();
    let reports = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let params = RegionParams::for_degree(0.9, theta, g.max_degree())?;
            verify_zero_free(g, 2, &params, 100, 500 + i as u64, Budget::DEFAULT)
        })
        .collect::<Result<Vec<_>>>()?;
    let zeros: usize = reports.iter().map(|x| x.zero_violations).sum();
    let below: usize = reports.iter().map(|x| x.bound_violations).sum();
    let slack = reports
        .iter()
        .map(|x| x.min_abs / x.lower_bound)
        .fold(f64::INFINITY, f64::min);
    Ok((
        zeros == 0 && below == 0,
        format!("20 graphs x 100 samples, zero violations {zeros}, bound violations {below}, min |p|/bound {slack:.3}"),
    ))
}

fn root_radius() -> Outcome {
    let consts = zero_free_constants();
    let mut r = rng(6);
    let cases: Vec<_> = (0..40)
        .map(|i| {
            let k = 2 + i % 2;
            let n = r.gen_range(2..=8);
            let m = if k == 2 { 14 } else { 10 };
            let g = random_bounded_multigraph(n, m, r.gen_range(2..=5), &mut r);
            let dev = consts.deviation_threshold(g.max_degree()) / 1.01;
            let max = g.max_degree() as u32;
            let h = match i % 4 {
                0 | 1 => random_model_with_deviation(k, max, dev, &mut r),
                2 => EdgeColoringModel::from_fn(k, max, c(1.0, 0.0), |_| c(1.0 - dev, 0.0)).expect("k >= 2"),
                _ => EdgeColoringModel::from_fn(k, max, c(1.0, 0.0), |a| {
                    c(1.0 + if a[0] % 2 == 0 { dev } else { -dev }, 0.0)
                })
                .expect("k >= 2"),
            };
            (g, h)
        })
        .collect();
    let smallest = cases
        .par_iter()
        .map(|(g, h)| -> Result<f64> {
            let q = exact_poly_by_interpolation(g, h, Budget::DEFAULT)?;
            if q.degree().unwrap_or(0) == 0 {
                return Ok(f64::INFINITY);
            }
            Ok(poly_roots(&q)?.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok((
        smallest >= 1.01 - 1e-6,
        format!("40 graphs, smallest root modulus {smallest:.4}"),
    ))
}

fn tutte_pipeline() -> Outcome {
    let mut graphs = Vec::new();
    for n in 1..=6 {
        graphs.extend(simple_graphs_up_to_isomorphism(n)?.into_iter().filter(|g| g.is_connected()));
    }
    let vs = [c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 1.0)];
    let results = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| -> Result<(f64, bool)> {
            let mut r = rng(700 + i as u64);
            let mut worst: f64 = 0.0;
            for v in vs {
                let p = ComplexPoly::new(chi_k_coefficients(g, &ExpTypeSpec::tutte(v))?);
                for _ in 0..20 {
                    let q = c(r.gen_range(-4.0..4.0), r.gen_range(-4.0..4.0));
                    worst = worst.max(rel_diff(p.eval(q), tutte_direct(g, q, v)?));
                }
            }
            let mut chromatic_ok = true;
            for q in [2usize, 3] {
                let z = tutte_direct(g, c(q as f64, 0.0), c(-1.0, 0.0))?;
                chromatic_ok &= z == c(count_proper_colorings(g, q) as f64, 0.0);
            }
            Ok((worst, chromatic_ok))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = results.iter().map(|x| x.0).fold(0.0, f64::max);
    let chromatic_fail = results.iter().filter(|x| !x.1).count();
    Ok((
        worst <= 1e-8 && chromatic_fail == 0,
        format!(
            "{} connected graphs, max relative difference {worst:.2e}, chromatic mismatches {chromatic_fail}",
            graphs.len()
        ),
    ))
}

fn exp_type_evaluation() -> Outcome {
    let mut graphs = Vec::new();
    for n in 1..=6 {
        graphs.extend(simple_graphs_up_to_isomorphism(n)?);
    }
    let spec = ExpTypeSpec::tutte(c(1.0, 0.0));
    let radius = estimate_root_radius(&spec, 5, &graphs)?;
    let spec = spec.with_heuristic_radius(radius);
    let results = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| -> Result<(f64, bool)> {
            let mut r = rng(800 + i as u64);
            let x = Complex64::from_polar(4.0 * radius, r.gen_range(-PI..PI));
            let cert = eval_exp_type(g, &spec, x, 1e-3, Mode::Multiplicative, Budget::DEFAULT)?;
            let direct = tutte_direct(g, x, c(1.0, 0.0))?;
            let err = (cert.value / direct).ln().norm();
            Ok((err, err <= cert.bound))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = results.iter().map(|x| x.0).fold(0.0, f64::max);
    let outside = results.iter().filter(|x| !x.1).count();
    Ok((
        outside == 0 && worst <= 1e-3,
        format!(
            "{} graphs, root radius {radius:.3}, max |ln ratio| {worst:.2e}, bound violations {outside}",
            graphs.len()
        ),
    ))
}

fn transfer_matrix() -> Outcome {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let h = random_model_with_deviation(2 + i % 3, 2, 1.0, &mut r);
        for n in 3..=8 {
            let g = generate(&GraphFamilySpec::Cycle { n })?;
            worst = worst.max(rel_diff(cycle_transfer_pf(&h, n)?, exact_partition(&g, &h, Budget::DEFAULT)?));
        }
    }
    let dev = zero_free_constants().deviation_threshold(2) / 2.0;
    let h = perturbed_ones(3, 2, dev, 99)?;
    let c200 = generate(&GraphFamilySpec::Cycle { n: 200 })?;
    let density = normalized_pf(&c200, &h, PfEngine::Approx { eps: 1e-3 }, ApproxOptions::default())?;
    let lambda = dominant_eigenvalue(&h).norm().ln();
    let gap = (density - lambda).abs();
    Ok((
        worst <= 1e-10 && gap <= 0.05,
        format!("max relative difference {worst:.2e}; |n(C_200) - ln|lambda_max|| = {gap:.2e}"),
    ))
}

fn log_potential() -> Outcome {
    let consts = zero_free_constants();
    let mut r = rng(10);
    let cases: Vec<_> = (0..20)
        .map(|i| {
            let n = r.gen_range(2..=8);
            let g = random_bounded_multigraph(n, 12, 4, &mut r);
            let dev = 0.9 * consts.deviation_threshold(g.max_degree());
            let h = random_model_with_deviation(2 + i % 2, g.max_degree() as u32, dev, &mut r);
            (g, h)
        })
        .collect();
    let worst = cases
        .par_iter()
        .map(|(g, h)| log_potential_check(g, h, Budget::DEFAULT).map(|x| x.discrepancy))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((worst <= 1e-7, format!("20 instances, max discrepancy {worst:.2e}")))
}

fn orthogonal_invariance() -> Outcome {
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let k = 2 + i % 3;
        let n = r.gen_range(2..=7);
        let g = random_bounded_multigraph(n, 10, 6, &mut r);
        let h = random_model_with_deviation(k, g.max_degree() as u32, 1.0, &mut r);
        let o = random_orthogonal(k, r.gen());
        let gh = apply_orthogonal_model(&o, &h, g.max_degree() as u32);
        let a = exact_partition(&g, &h, Budget::DEFAULT)?;
        let b = exact_partition(&g, &gh, Budget::DEFAULT)?;
        worst = worst.max(rel_diff(a, b));
    }
    Ok((worst <= 1e-8, format!("20 triples, max relative discrepancy {worst:.2e}")))
}

fn scaling_smoke() -> Outcome {
    let g = generate(&GraphFamilySpec::RandomRegular { n: 200, d: 4, seed: 12 })?;
    let h = perturbed_ones(2, g.max_degree() as u32, 0.02, 12)?;
    let options = ApproxOptions {
        engine: DerivativeEngine::Clusters,
        ..ApproxOptions::default()
    };
    let cert = approx_partition(&g, &h, 1e-2, Mode::Multiplicative, options)?;
    Ok((
        cert.q0 < 0.2 && cert.n <= 8,
        format!(
            "|V|={} |E|={} Delta={}: M={:.3} q0={:.4} n={} bound={:.2e} ln p={:.6}",
            g.n(),
            g.m(),
            g.max_degree(),
            cert.radius,
            cert.q0,
            cert.n,
            cert.bound,
            cert.log_value
        ),
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "constants", limit: Duration::from_secs(1), run: constants },
        Criterion { id: 2, name: "matching oracle", limit: Duration::from_secs(300), run: matching_oracle },
        Criterion { id: 3, name: "derivative formula", limit: Duration::from_secs(600), run: derivative_formula },
        Criterion { id: 4, name: "certified approximation", limit: Duration::from_secs(900), run: certified_approximation },
        Criterion { id: 5, name: "zero-free falsification", limit: Duration::from_secs(600), run: zero_free_falsification },
        Criterion { id: 6, name: "root radius", limit: Duration::from_secs(300), run: root_radius },
        Criterion { id: 7, name: "tutte pipeline", limit: Duration::from_secs(600), run: tutte_pipeline },
        Criterion { id: 8, name: "exp-type evaluation", limit: Duration::from_secs(300), run: exp_type_evaluation },
        Criterion { id: 9, name: "transfer matrix", limit: Duration::from_secs(60), run: transfer_matrix },
        Criterion { id: 10, name: "log-potential identity", limit: Duration::from_secs(300), run: log_potential },
        Criterion { id: 11, name: "orthogonal invariance", limit: Duration::from_secs(120), run: orthogonal_invariance },
        Criterion { id: 12, name: "scaling smoke test", limit: Duration::from_secs(600), run: scaling_smoke },
    ];
    let mut failures = 0;
    for criterion in &criteria {
        let start = Instant::now();
        let outcome = (criterion.run)();
        let elapsed = start.elapsed();
        let (passed, detail) = match outcome {
            Ok((ok, detail)) if elapsed <= criterion.limit => (ok, detail),
            Ok((_, detail)) => (false, format!("{detail}; exceeded {:?}", criterion.limit)),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "{} [{:>2}] {} ({:.2}s): {}",
            if passed { "PASS" } else { "FAIL" },
            criterion.id,
            criterion.name,
            elapsed.as_secs_f64(),
            detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
