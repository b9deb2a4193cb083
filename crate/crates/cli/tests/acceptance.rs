//! End-to-end acceptance checks, one per reproduced result. Each check
//! prints a PASS/FAIL line with its measured numbers; the test fails if any
//! check fails.

#[path = "../../trefftz/tests/common/oracles.rs"]
#[allow(dead_code)]
mod oracles;

use std::io::Write;
use std::time::Instant;

use trefftz_vem::analysis::{fitted_rate, linear_fit, neumann_eig_probe, neumann_eigenvalue_k, ErrorRow, ErrorTable};
use trefftz_vem_cli::{registry, run, ExperimentConfig, RunContext, RunOutput};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn report(line: &str) {
    // bypasses the test harness capture so the summary is always shown
    let _ = writeln!(std::io::stderr(), "{line}");
}

fn run_table(cfg: &ExperimentConfig) -> ErrorTable {
    match run(cfg, &RunContext::default()).unwrap_or_else(|e| panic!("{}: {e}", cfg.name)) {
        RunOutput::Errors(t) | RunOutput::Scattering { table: t, .. } => t,
        _ => panic!("{} is not an error study", cfg.name),
    }
}

fn col<'a>(t: &ErrorTable, r: &'a ErrorRow, name: &str) -> &'a str {
    let i = t.extra_headers.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    &r.extra[i]
}

fn rows_where<'a>(t: &'a ErrorTable, keys: &[(&str, &str)]) -> Vec<&'a ErrorRow> {
    t.rows.iter().filter(|r| keys.iter().all(|(c, v)| col(t, r, c) == *v)).collect()
}

fn criterion_1() -> Outcome {
    let cases = oracles::randomized_local_matrices(50, 2024);
    let worst = cases.iter().map(|c| c.worst()).fold(0.0, f64::max);
    let g = cases.iter().map(|c| c.g).fold(0.0, f64::max);
    let b = cases.iter().map(|c| c.g_green).fold(0.0, f64::max);
    let d = cases.iter().map(|c| c.d).fold(0.0, f64::max);
    let g0 = cases.iter().map(|c| c.g0).fold(0.0, f64::max);
    outcome(
        worst <= 1e-11,
        format!("50 polygons, max rel. deviation G {g:.1e}, B·D {b:.1e}, D {d:.1e}, G0 {g0:.1e}"),
    )
}

fn criterion_2() -> Outcome {
    let t = run_table(&registry::lookup("patch-test").unwrap());
    let worst = t.rows.iter().map(|r| r.rel_l2).fold(0.0, f64::max);
    let finite = t.rows.iter().all(|r| r.rel_l2.is_finite());
    outcome(finite && worst <= 1e-8 && t.rows.len() == 28, format!("{} runs, max rel. L2 {worst:.2e}", t.rows.len()))
}

fn criterion_3() -> Outcome {
    let t = run_table(&registry::lookup("table1").unwrap());
    let orig: Vec<usize> = t.rows.iter().map(|r| r.ndof_orig.unwrap_or(0)).collect();
    let red: Vec<String> = t.rows.iter().map(|r| format!("{:.2}", r.reduction_pct().unwrap_or(f64::NAN))).collect();
    let published_h1 = [4.6885e-01, 1.3527e-01, 1.0540e-03, 6.1594e-06, 4.2394e-08];
    let factors: Vec<f64> = published_h1
        .iter()
        .zip(&t.rows)
        .map(|(p, r)| (r.rel_h1 / p).max(p / r.rel_h1))
        .collect();
    let h: Vec<f64> = t.rows[1..5].iter().map(|r| r.h).collect();
    let e1: Vec<f64> = t.rows[1..5].iter().map(|r| r.rel_h1).collect();
    let e0: Vec<f64> = t.rows[1..5].iter().map(|r| r.rel_l2).collect();
    let r1 = fitted_rate(&h, &e1).unwrap_or(f64::NAN);
    let r0 = fitted_rate(&h, &e0).unwrap_or(f64::NAN);
    let pass = orig == [48, 144, 480, 1728, 6528, 25344]
        && red == ["4.17", "16.67", "29.17", "41.67", "50.00", "58.33"]
        && factors.iter().all(|&f| f <= 5.0)
        && (r1 - 7.0).abs() <= 0.7
        && (r0 - 8.0).abs() <= 0.8;
    let worst = factors.iter().fold(0.0f64, |m, &f| m.max(f));
    outcome(
        pass,
        format!("orig ndof {orig:?}, reduction {red:?}, worst H1 factor {worst:.2}, rates H1 {r1:.2} L2 {r0:.2} (n=2..16)"),
    )
}

const ROUND_OFF_FLOOR: f64 = 1e-10;

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["instability-u0", "instability-u1"] {
        let t = run_table(&registry::lookup(name).unwrap());
        for q in ["3", "4"] {
            for basis in ["filtered", "orthonormal"] {
                let e: Vec<f64> = rows_where(&t, &[("q", q), ("basis", basis)])
                    .into_iter()
                    .filter(|r| col(&t, r, "level").parse::<usize>().unwrap() >= 4)
                    .map(|r| if r.rel_l2.is_finite() { r.rel_l2 } else { f64::INFINITY })
                    .collect();
                let (imin, min) = e.iter().enumerate().fold((0, f64::INFINITY), |a, (i, &v)| if v < a.1 { (i, v) } else { a });
                // u0 lies in the discrete space: errors at round-off level are not growth
                let growth = e[imin..].iter().fold(0.0f64, |m, &v| m.max(v)) / min.max(ROUND_OFF_FLOOR);
                let unstable = growth >= 10.0;
                pass &= unstable == (basis == "filtered");
                parts.push(format!("{}/q{q}/{basis}: {growth:.1e}", &name[12..]));
            }
        }
    }
    outcome(pass, format!("growth from minimum (floor 1e-10) on n>=4: {}", parts.join(", ")))
}

fn criterion_5() -> Outcome {
    let t = run_table(&registry::lookup("u3-cartesian").unwrap());
    let last = &t.rows[t.rows.len() - 4..];
    let h: Vec<f64> = last.iter().map(|r| r.h).collect();
    let r1 = fitted_rate(&h, &last.iter().map(|r| r.rel_h1).collect::<Vec<_>>()).unwrap_or(f64::NAN);
    let r0 = fitted_rate(&h, &last.iter().map(|r| r.rel_l2).collect::<Vec<_>>()).unwrap_or(f64::NAN);
    outcome(
        (r1 - 0.667).abs() <= 0.15 && (r0 - 1.667).abs() <= 0.2,
        format!("fitted over the last 3 refinements: H1 {r1:.3}, L2 {r0:.3}"),
    )
}

fn criterion_6() -> Outcome {
    let t = run_table(&registry::lookup("table5-sigma").unwrap());
    let sigma = |r: &&ErrorRow| col(&t, r, "sigma").parse::<f64>().unwrap();
    let loose: Vec<_> = t.rows.iter().filter(|r| sigma(r) < 1e-14).collect();
    let tight: Vec<_> = t.rows.iter().filter(|r| sigma(r) == 1e-13).collect();
    let mut pass = loose.len() == 7 && tight.len() == 7;
    let mut pairs = Vec::new();
    for (a, b) in loose.iter().zip(&tight) {
        let ratio = (a.rel_l2 / b.rel_l2).max(b.rel_l2 / a.rel_l2);
        pass &= b.ndof <= a.ndof && ratio <= 2.0;
        pairs.push(format!("{}/{}", a.ndof, b.ndof));
    }
    outcome(pass, format!("ndof 10eps/1e-13: {}", pairs.join(" ")))
}

fn criterion_7() -> Outcome {
    let cfg = registry::lookup("fig5-condition").unwrap();
    let RunOutput::Condition(rows) = run(&cfg, &RunContext::default()).unwrap() else { panic!("condition probe") };
    // samples with cond in [1e2, 1e13]: above round-off saturation, below the O(1) plateau
    let resolved = |c: f64| (1e2..=1e13).contains(&c);
    let mut pass = true;
    let mut notes = Vec::new();
    for q in [2, 3, 4] {
        let s: Vec<_> = rows.iter().filter(|r| r.q == q && resolved(r.cond)).collect();
        let mono = s.windows(2).all(|w| w[1].cond < w[0].cond);
        pass &= mono && s.len() >= 5;
        notes.push(format!("q{q}: {} pts hk {:.2}..{:.2}", s.len(), s[0].hk, s[s.len() - 1].hk));
    }
    let hks: Vec<f64> = rows.iter().filter(|r| r.q == 2).map(|r| r.hk).collect();
    let mut ordered = 0;
    for hk in hks {
        let c: Vec<f64> = [2, 3, 4].iter().map(|&q| rows.iter().find(|r| r.q == q && r.hk == hk).unwrap().cond).collect();
        if c.iter().all(|&v| resolved(v)) {
            pass &= c[0] < c[1] && c[1] < c[2];
            ordered += 1;
        }
    }
    pass &= ordered >= 5;
    outcome(pass, format!("decreasing in hk ({}); q-ordered at {ordered} common hk", notes.join(", ")))
}

fn min_eig_near(q: usize, k0: f64, half_width: f64, n: usize) -> f64 {
    let ks: Vec<f64> = (0..n).map(|i| k0 - half_width + 2.0 * half_width * i as f64 / (n - 1) as f64).collect();
    neumann_eig_probe::<f64>(q, &ks).unwrap().iter().map(|r| r.min_abs_eig).fold(f64::INFINITY, f64::min)
}

fn criterion_8() -> Outcome {
    let mut roots: Vec<f64> = (0..4).flat_map(|m| (0..4).map(move |n| neumann_eigenvalue_k(m, n))).collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mid = |k: f64| neumann_eig_probe::<f64>(4, &[k]).unwrap()[0].min_abs_eig;
    let mut pass = true;
    let mut notes = Vec::new();
    for (m, n) in [(1, 0), (1, 1), (2, 0)] {
        let k0 = neumann_eigenvalue_k(m, n);
        let i = roots.iter().position(|&r| (r - k0).abs() < 1e-12).unwrap();
        let dip = min_eig_near(4, k0, 0.02, 401);
        // midpoints inside the probe range k ∈ [3, 12]; below it every eigenvalue shrinks like k²
        let reference = [0.5 * (roots[i - 1] + roots[i]), 0.5 * (roots[i] + roots[i + 1])]
            .into_iter()
            .filter(|k| (3.0..=12.0).contains(k))
            .map(mid)
            .fold(f64::INFINITY, f64::min);
        let ratio = reference / dip;
        pass &= ratio >= 100.0;
        notes.push(format!("({m},{n}): {dip:.2e} vs {reference:.2e}, ratio {ratio:.0}"));
    }
    outcome(pass, notes.join("; "))
}

fn p_study(name: &str) -> ErrorTable {
    let mut cfg = registry::lookup(name).unwrap();
    cfg.k = vec![10.0];
    cfg.q.retain(|&q| q <= 20);
    run_table(&cfg)
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let t1 = p_study("fig13-p-u1");
    for mesh in ["p_mesh_a", "p_mesh_b"] {
        let e: Vec<f64> = rows_where(&t1, &[("mesh", mesh)]).iter().map(|r| r.rel_l2).collect();
        // pre-asymptotic plateau ends at the first error below 1/2; instability starts after the minimum
        let start = e.iter().position(|&v| v < 0.5).unwrap_or(e.len());
        let imin = (0..e.len()).min_by(|&a, &b| e[a].partial_cmp(&e[b]).unwrap()).unwrap();
        let mono = start < imin && e[start..=imin].windows(2).all(|w| w[1] < w[0]);
        let ok = mono && e[imin] <= 1e-6;
        pass &= ok;
        notes.push(format!("u1 {mesh}: decreasing q={}..{}, min {:.1e}", start + 1, imin + 1, e[imin]));
    }
    let t3 = p_study("fig14-p-u3");
    for mesh in ["p_mesh_a", "p_mesh_b"] {
        let rows = rows_where(&t3, &[("mesh", mesh)]);
        let q: Vec<f64> = rows.iter().map(|r| col(&t3, r, "q").parse().unwrap()).collect();
        let le: Vec<f64> = rows.iter().map(|r| r.rel_l2.ln()).collect();
        let start = le.iter().position(|&v| v < 0.5f64.ln()).unwrap_or(0);
        let lq: Vec<f64> = q.iter().map(|v| v.ln()).collect();
        let (_, _, r2_pow) = linear_fit(&lq[start..], &le[start..]).unwrap();
        let (_, _, r2_exp) = linear_fit(&q[start..], &le[start..]).unwrap();
        pass &= r2_pow > r2_exp;
        notes.push(format!("u3 {mesh}: R2 power {r2_pow:.3} vs exp {r2_exp:.3}"));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_10() -> Outcome {
    let t = run_table(&registry::lookup("fig18-hp").unwrap());
    let mut pass = true;
    let mut notes = Vec::new();
    for mu in ["0.500000", "0.333333"] {
        let rows = rows_where(&t, &[("mu", mu)]);
        let x: Vec<f64> = rows.iter().map(|r| (r.ndof as f64).sqrt()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.rel_l2.ln()).collect();
        let (slope, _, r2) = linear_fit(&x, &y).unwrap_or((f64::NAN, 0.0, f64::NAN));
        let (_, _, r2_late) = linear_fit(&x[2..], &y[2..]).unwrap_or((f64::NAN, 0.0, f64::NAN));
        pass &= rows.len() == 7 && slope < 0.0 && r2 >= 0.9;
        notes.push(format!("mu={mu}: slope {slope:.3}, R2 {r2:.3} (n>=2: {r2_late:.3})"));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_11() -> Outcome {
    let t = run_table(&registry::lookup("scattering").unwrap());
    let mut pass = true;
    let mut notes = Vec::new();
    for kind in ["soft", "hard"] {
        let rows = rows_where(&t, &[("kind", kind)]);
        // the last row is the reference itself; fit over the last three compared levels
        let cmp = &rows[rows.len() - 4..rows.len() - 1];
        let h: Vec<f64> = cmp.iter().map(|r| r.h).collect();
        let r1 = fitted_rate(&h, &cmp.iter().map(|r| r.rel_h1).collect::<Vec<_>>()).unwrap_or(f64::NAN);
        let r0 = fitted_rate(&h, &cmp.iter().map(|r| r.rel_l2).collect::<Vec<_>>()).unwrap_or(f64::NAN);
        pass &= (r1 - 1.5).abs() <= 0.4 && (r0 - 2.1).abs() <= 0.4;
        notes.push(format!("{kind}: H1 {r1:.2}, L2 {r0:.2}"));
    }
    outcome(pass, notes.join("; "))
}

#[test]
fn acceptance_criteria() {
    let checks: [(&str, fn() -> Outcome); 11] = [
        ("1 local matrices vs quadrature", criterion_1),
        ("2 patch test", criterion_2),
        ("3 Table 1", criterion_3),
        ("4 filtered instability", criterion_4),
        ("5 singular-solution rates", criterion_5),
        ("6 sigma study", criterion_6),
        ("7 edge mass condition", criterion_7),
        ("8 Neumann eigenvalue dips", criterion_8),
        ("9 p-version", criterion_9),
        ("10 hp-version", criterion_10),
        ("11 scattering", criterion_11),
    ];
    let mut failed = Vec::new();
    for (name, check) in checks {
        let t0 = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        report(&format!("criterion {name}: {verdict} [{:.1}s] {}", t0.elapsed().as_secs_f64(), o.detail));
        if !o.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
