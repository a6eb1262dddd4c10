//! Prints one PASS/FAIL line per acceptance criterion. Runtime limits are
//! part of each check. Lines marked `known defect` report claims that do not
//! hold as stated; they are printed but do not fail the run, and the corrected
//! variant next to them is enforced.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thickset_core::bounds::{constants, convex_gap_dim_bound, dim_lower_1d, intersection_bound, pattern_capacity};
use thickset_core::game::{AliceStrategy, GapTable, ThicknessStrategy};
use thickset_core::gap_lemma::{gap_lemma_decide, GapLemmaTag};
use thickset_core::geometry::distance;
use thickset_core::scaffold::{build_scaffold, check_projection_to_parent, child_count_lower_bound, Scaffold, ScaffoldNode, ScaffoldParams, DEFAULT_NODE_BUDGET};
use thickset_core::thickness::{sponge_thickness_closed_form, thickness_pruned};
use thickset_core::verify::{box_counting, brute_intersection, pattern_search, IntersectionVerdict, DEFAULT_CELL_BUDGET};
use thickset_core::{thickness, EnumerateOptions, SetDescriptor};

struct Line {
    name: String,
    pass: bool,
    enforced: bool,
    elapsed: Duration,
    detail: String,
}

fn check(name: &str, limit_secs: f64, enforced: bool, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let in_time = elapsed.as_secs_f64() < limit_secs;
    let detail = if in_time {
        detail
    } else {
        format!("{detail}; over the {limit_secs} s limit")
    };
    Line {
        name: name.to_string(),
        pass: ok && in_time,
        enforced,
        elapsed,
        detail,
    }
}

fn carpet_thickness() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, depth) in [(3u32, 3u32), (5, 2), (7, 2)] {
        let desc = SetDescriptor::sponge(&[n, n]);
        let got = thickness(&desc, &EnumerateOptions::depth(depth)).unwrap().value;
        let want = (n as f64 - 1.0) / (2.0 * 2f64.sqrt());
        let rel = ((got - want) / want).abs();
        ok &= rel <= 1e-12;
        parts.push(format!("n={n} depth={depth} tau={got:.15} rel={rel:.1e}"));
    }
    (ok, parts.join(", "))
}

fn mixed_sponge() -> (bool, String) {
    let grid = [3u32, 5];
    let limit = sponge_thickness_closed_form(&grid);
    let mut ok = limit == 0.0;
    let mut parts = vec![format!("closed form {limit}")];
    let mut prev = f64::INFINITY;
    for k in 3..=8u32 {
        let t = thickness_pruned(&SetDescriptor::sponge(&grid), k, 1_000_000).unwrap();
        let ratio = t.upper / (2.0 * 0.6f64.powi(k as i32));
        ok &= t.is_certified() && (ratio - 1.0).abs() <= 0.05 && t.upper < prev;
        prev = t.upper;
        parts.push(format!("k={k} ratio={ratio:.4}"));
    }
    (ok, parts.join(", "))
}

fn gap_lemma_vs_oracle() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = EnumerateOptions::depth(12);
    let (mut guaranteed, mut contradictions) = (0, 0);
    for _ in 0..200 {
        let a = SetDescriptor::central_cantor(0.0, 1.0, rng.gen_range(0.34..=0.45));
        let b = SetDescriptor::Translate {
            inner: Box::new(SetDescriptor::central_cantor(0.0, 1.0, rng.gen_range(0.34..=0.45))),
            offset: vec![rng.gen_range(-0.95..0.95)],
        };
        let v = gap_lemma_decide(&a, &b, &opts).unwrap();
        if v.tag == GapLemmaTag::IntersectGuaranteed {
            guaranteed += 1;
            let oracle = brute_intersection(&[a, b], 12, DEFAULT_CELL_BUDGET).unwrap();
            if !matches!(oracle, IntersectionVerdict::NonemptyWitness { .. }) {
                contradictions += 1;
            }
        }
    }
    (
        contradictions == 0 && guaranteed > 0,
        format!("{guaranteed}/200 guaranteed, {contradictions} contradictions"),
    )
}

fn chaser(table: &Arc<GapTable>, alpha_factor: f64) -> (bool, String) {
    let r = common::chaser_run(table, alpha_factor, 1000);
    (
        r.escaped == 0 && r.inequality_violations == 0,
        format!(
            "{} erased, {} in S, {} escaped; {} erasures, {} violate diam(G) <= diam(B)/(tau beta)",
            r.erased, r.in_s, r.escaped, r.erasures, r.inequality_violations
        ),
    )
}

fn bounds_positive() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut points, mut nonpositive) = (0, 0);
    let mut worst = f64::INFINITY;
    while points < 10_000 {
        let d = rng.gen_range(1..=3u32);
        let k = rng.gen_range(1..=3usize);
        let c = d as f64 * rng.gen_range(0.05..0.95);
        let beta: f64 = rng.gen_range(0.01..=0.25);
        let rhs = beta.powf(c) * (1.0 - beta.powf(d as f64 - c)) / constants(d).unwrap().k2;
        let tau_star = (k as f64 / rhs).powf(1.0 / c);
        let taus: Vec<f64> = (0..k).map(|_| tau_star * rng.gen_range(0.0..3.0f64).exp()).collect();
        if !taus.iter().all(|t| t.is_finite()) {
            continue;
        }
        let b = intersection_bound(&taus, 1.0, beta, d, c).unwrap();
        if !b.feasible || !b.value.is_finite() {
            continue;
        }
        points += 1;
        worst = worst.min(b.value / d as f64);
        if b.value <= 0.0 {
            nonpositive += 1;
        }
    }
    (
        nonpositive == 0,
        format!("{points} feasible points, {nonpositive} non-positive, smallest value/d {worst:.6}"),
    )
}

fn chain(literal: bool) -> (bool, String) {
    let s = common::appendix_chain_sweep(2000, 7);
    let holds = if literal { s.literal_holds } else { s.corrected_holds };
    (
        holds == s.points,
        format!(
            "{holds}/{} points; worst scaffold/literal deficit ratio {:.3}",
            s.points, s.worst_literal_ratio
        ),
    )
}

fn desk_params() -> ScaffoldParams {
    ScaffoldParams::new(1, 1e-7, 0.25, 0.9, 0.5, 2.5e-7)
        .unwrap()
        .with_center(vec![0.5])
        .unwrap()
}

fn leaf_paths(node: &ScaffoldNode, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if node.children.is_empty() {
        out.push(prefix.clone());
    }
    for (i, k) in node.children.iter().enumerate() {
        prefix.push(i);
        leaf_paths(k, prefix, out);
        prefix.pop();
    }
}

/// Problems found in an expanded scaffold, one string each.
fn audit_scaffold(s: &Scaffold, params: &ScaffoldParams) -> (usize, Vec<String>) {
    let lat = &s.lattice;
    let lower = child_count_lower_bound(params.d, params.beta, lat.blocks);
    let mut problems = Vec::new();
    let mut expanded = 0;
    let mut stack = vec![&s.root];
    while let Some(n) = stack.pop() {
        if n.block >= s.depth {
            continue;
        }
        expanded += 1;
        let proj = check_projection_to_parent(lat, &n.ball.index, n.block, DEFAULT_NODE_BUDGET).unwrap();
        if !proj.mismatches.is_empty() {
            problems.push(format!("{} projection mismatches under {:?}", proj.mismatches.len(), n.ball.index));
        }
        if (n.candidates.len() as f64) < lower {
            problems.push(format!("{} candidates < {lower}", n.candidates.len()));
        }
        let survivors = n.candidates.iter().filter(|c| c.survivor).count() as u64;
        if survivors < s.m || n.children.len() as u64 != s.m {
            problems.push(format!("{survivors} survivors, {} children, M = {}", n.children.len(), s.m));
        }
        for (i, a) in n.children.iter().enumerate() {
            if !lat.inside_half(&n.ball.index, &a.ball.index) {
                problems.push(format!("{:?} not inside half of {:?}", a.ball.index, n.ball.index));
            }
            for b in &n.children[i + 1..] {
                if !lat.disjoint(&a.ball, &b.ball) {
                    problems.push(format!("{:?} meets {:?}", a.ball.index, b.ball.index));
                }
            }
        }
        stack.extend(n.children.iter());
    }
    let mut paths = Vec::new();
    leaf_paths(&s.root, &mut Vec::new(), &mut paths);
    for path in &paths {
        let Some(p) = s.select_point(path) else {
            problems.push(format!("no point selected on {path:?}"));
            continue;
        };
        for node in s.descend(path).unwrap() {
            let ball = lat.to_ball(&node.ball);
            if distance(&ball.center, &p) > ball.radius {
                problems.push(format!("point on {path:?} leaves {:?}", node.ball.index));
            }
        }
        let erased = s.history(path).unwrap().iter().flat_map(|t| t.alice.clone()).any(|e| e.shape.contains_open(&p));
        if erased {
            problems.push(format!("point on {path:?} was erased"));
        }
    }
    (expanded, problems)
}

fn desk_scaffolds() -> (bool, String) {
    let params = desk_params();
    let table_for = |desc: SetDescriptor, depth: u32| {
        Arc::new(
            GapTable::new(
                &desc,
                &EnumerateOptions {
                    depth: Some(depth),
                    cap: 1_000_000,
                },
            )
            .unwrap(),
        )
    };
    let alices = [
        ("pass", AliceStrategy::Pass),
        (
            "middle-fifths",
            AliceStrategy::Thickness(ThicknessStrategy::new(0, params.alpha, table_for(SetDescriptor::central_cantor(0.0, 1.0, 0.4), 14))),
        ),
        (
            "very thick",
            AliceStrategy::Thickness(ThicknessStrategy::new(0, params.alpha, table_for(SetDescriptor::central_cantor(0.0, 1.0, 0.5 - 0.5e-8), 12))),
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, alice) in &alices {
        match build_scaffold(&params, alice, 3) {
            Ok(s) => {
                let (expanded, problems) = audit_scaffold(&s, &params);
                ok &= problems.is_empty();
                parts.push(format!("{name}: {} nodes, {expanded} expanded, {} problems", s.node_count(), problems.len()));
                if let Some(p) = problems.first() {
                    parts.push(format!("first: {p}"));
                }
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn dimension_cross_checks() -> (bool, String) {
    let carpet = SetDescriptor::sponge(&[3, 3]);
    let est = box_counting(&carpet, &[1, 2, 3, 4, 5, 6, 7], DEFAULT_CELL_BUDGET).unwrap();
    let exact = 8f64.ln() / 3f64.ln();
    let bound = convex_gap_dim_bound(std::f64::consts::FRAC_1_SQRT_2, 2).unwrap();
    let half = dim_lower_1d(0.5).unwrap();
    let one = dim_lower_1d(1.0).unwrap();
    let ok = (est.slope - exact).abs() <= 0.05
        && (bound - (1.0 + 2f64.ln() / (2.0 + 2f64.sqrt()).ln())).abs() <= 1e-12
        && bound <= est.slope
        && half == 0.5
        && (one - 2f64.ln() / 3f64.ln()).abs() <= 1e-12;
    (
        ok,
        format!(
            "box slope {:.6} vs {exact:.6}; convex-gap bound {bound:.6}; dim_lower_1d(1/2) = {half}; dim_lower_1d(1) = {one:.15}",
            est.slope
        ),
    )
}

/// Membership in the depth-`depth` carpet stage, accepting either side of a
/// ternary boundary.
fn in_carpet(p: [f64; 2], depth: u32) -> bool {
    const EPS: f64 = 1e-9;
    if p.iter().any(|x| *x < -EPS || *x > 1.0 + EPS) {
        return false;
    }
    if depth == 0 {
        return true;
    }
    let digits = |x: f64| {
        let s = 3.0 * x;
        let f = s.floor().clamp(0.0, 2.0);
        let mut ds = vec![f];
        if (s - s.round()).abs() < EPS * 3.0 {
            let r = s.round();
            for d in [r - 1.0, r] {
                if (0.0..=2.0).contains(&d) && !ds.contains(&d) {
                    ds.push(d);
                }
            }
        }
        ds
    };
    for dx in digits(p[0]) {
        for dy in digits(p[1]) {
            if dx == 1.0 && dy == 1.0 {
                continue;
            }
            if in_carpet([3.0 * p[0] - dx, 3.0 * p[1] - dy], depth - 1) {
                return true;
            }
        }
    }
    false
}

fn pattern_machinery() -> (bool, String) {
    let carpet = SetDescriptor::sponge(&[3, 3]);
    let level = 4;
    let mut ok = true;
    let mut parts = Vec::new();
    let patterns: [(&str, Vec<Vec<f64>>, f64); 2] = [
        ("2-point", vec![vec![0.0, 0.0], vec![1.0, 0.0]], 1.0 / 9.0),
        ("3-point", vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]], 1.0 / 3.0),
    ];
    for (name, pattern, lambda) in &patterns {
        let found = pattern_search(&carpet, pattern, *lambda, level, DEFAULT_CELL_BUDGET).unwrap();
        let bad = found
            .iter()
            .filter(|x| {
                !pattern
                    .iter()
                    .all(|a| in_carpet([x[0] + lambda * a[0], x[1] + lambda * a[1]], level))
            })
            .count();
        ok &= !found.is_empty() && bad == 0;
        parts.push(format!("{name}: {} translates, {bad} rejected", found.len()));
    }

    let grid: Vec<f64> = (0..=200).map(|i| (std::f64::consts::E.ln() + i as f64 * (1e6f64.ln() - 1.0) / 200.0).exp()).collect();
    let mut monotone = true;
    for d in 1..=3u32 {
        let counts: Vec<u64> = grid.iter().map(|t| pattern_capacity(*t, 1.0, 1.0, d).unwrap().count).collect();
        monotone &= counts.windows(2).all(|w| w[0] <= w[1]);
    }
    ok &= monotone;
    parts.push(format!("N(tau) monotone: {monotone}"));

    let fit = |lo: f64, hi: f64, floored: bool| {
        let pts: Vec<(f64, f64)> = (0..=30)
            .map(|i| (lo.ln() + i as f64 * (hi.ln() - lo.ln()) / 30.0).exp())
            .map(|n| {
                let cap = pattern_capacity((n - 1.0) / (2.0 * 2f64.sqrt()), 1.0, 1.0, 2).unwrap();
                let k = if floored { cap.count as f64 } else { cap.raw };
                (k.ln(), n.ln())
            })
            .collect();
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    let slope = fit(1e3, 1e6, false);
    let floored = fit(1e7, 1e10, true);
    ok &= (0.45..=0.55).contains(&slope) && (0.45..=0.55).contains(&floored);
    parts.push(format!("exponent of n in k {slope:.4} (n in [1e3,1e6], unfloored), {floored:.4} (n in [1e7,1e10], floored)"));
    (ok, parts.join("; "))
}

fn main() -> ExitCode {
    let table = common::fifths_table();
    let lines = vec![
        check("criterion 1 carpet thickness", 1.0, true, carpet_thickness),
        check("criterion 2 mixed sponge decay", 5.0, true, mixed_sponge),
        check("criterion 3 gap lemma vs brute force", 60.0, true, gap_lemma_vs_oracle),
        check("criterion 4 thickness strategy, alpha = 1/(tau beta) [known defect]", 30.0, false, || chaser(&table, 1.0)),
        check("criterion 4 thickness strategy, alpha = 2/(tau beta)", 30.0, true, || chaser(&table, 2.0)),
        check("criterion 5 bound positivity", 30.0, true, bounds_positive),
        check("criterion 5 scaffold chain, stated K1 [known defect]", 30.0, false, || chain(true)),
        check("criterion 5 scaffold chain, K1 (1 + 2 4^d)", 30.0, true, || chain(false)),
        check("criterion 6 desk scaffold lattice facts", 60.0, true, desk_scaffolds),
        check("criterion 7 dimension cross-checks", 30.0, true, dimension_cross_checks),
        check("criterion 8 pattern machinery", 60.0, true, pattern_machinery),
    ];
    let mut failed = false;
    for l in &lines {
        let verdict = if l.pass { "PASS" } else { "FAIL" };
        println!("{verdict} {} ({:.2} s): {}", l.name, l.elapsed.as_secs_f64(), l.detail);
        failed |= l.enforced && !l.pass;
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
