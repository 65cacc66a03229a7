//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! show.

mod common;

use std::f64::consts::{E, SQRT_2};
use std::fs;
use std::sync::Arc;
use std::thread;
use std::time::Instant;

use common::*;
use graphcalc::calculus::{CalculusConfig, FieldSymmetry, VectorField};
use graphcalc::constants::{cheeger_functional, cheeger_summary, cut_report};
use graphcalc::evolution::{dmf_run, transport_solve, Potential};
use graphcalc::graph::load_graph;
use graphcalc::harmonic::{
    dot, first_variation, harmonic_heat_flow, map_energy, norm, sphere_exp, SphereMap, SpherePoint,
};
use graphcalc::minimax::{bottleneck_level, classify_vertex, find_minimax, VertexKind};
use graphcalc::numerics::Lcg64;
use graphcalc::spectral::{
    barta_bound, eigensystem, BoundaryCondition, EigenSystem, HeatKernel, OperatorSpec, Reconstruction,
};
use graphcalc::{fixtures, Graph, SubgraphWindow, VertexFunction};
use nalgebra::DMatrix;
use serde_json::Value;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn fixture_graph(name: &str) -> Graph {
    load_graph(&fs::read_to_string(format!("{FIXTURES}/{name}.json")).unwrap()).unwrap()
}

fn whole_spec(g: Graph) -> OperatorSpec {
    let w = SubgraphWindow::whole(Arc::new(g)).unwrap();
    OperatorSpec::new(w, None, BoundaryCondition::None, CalculusConfig::default()).unwrap()
}

/// Interior = first half of the vertices, when that is a valid window with
/// a boundary.
fn half_window(g: &Graph) -> Option<SubgraphWindow> {
    let half: Vec<usize> = (0..g.len().div_ceil(2)).collect();
    SubgraphWindow::new(Arc::new(g.clone()), &half)
        .ok()
        .filter(|w| !w.boundary().is_empty())
}

/// Least-squares slope of log err against log h.
fn slope(hs: &[f64], errs: &[f64]) -> f64 {
    let n = hs.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

const IDENTITY_FIXTURES: [&str; 6] = ["p3", "p5", "c4", "k4", "octahedron", "grid4x4"];

fn identity_suite() -> Outcome {
    let required = [
        "divergence_theorem",
        "green_symmetric",
        "green_vectorfield",
        "product_rule_gradient",
        "product_rule_divergence",
    ];
    let mut worst = 0.0f64;
    for name in IDENTITY_FIXTURES {
        let o = run_args(&args(&format!("identities @F/{name}.json --seed 7 --trials 200")), None);
        ensure(o.code == 0, || format!("{name}: exit {} {}", o.code, o.stderr))?;
        let r = result_of(&o);
        ensure(r["trials"] == 200, || format!("{name}: trials {}", r["trials"]))?;
        for check in required {
            let c = r["checks"]
                .as_array()
                .unwrap()
                .iter()
                .find(|c| c["name"] == check)
                .ok_or_else(|| format!("{name}: missing {check}"))?;
            let res = c["max_abs_residual"].as_f64().unwrap();
            ensure(c["instances"].as_u64().unwrap() > 0, || format!("{name}/{check}: no instances"))?;
            ensure(res <= 1e-12, || format!("{name}/{check}: residual {res:e}"))?;
            worst = worst.max(res);
        }
    }
    Ok(format!("max residual {worst:.2e} over 6 fixtures x 200 trials"))
}

fn spectra() -> Outcome {
    let h = SQRT_2 / 2.0;
    let cases: [(&str, &str, Vec<f64>); 3] = [
        ("c4", "spectrum @F/c4.json --bc none", vec![0.0, 1.0, 1.0, 2.0]),
        ("k4", "spectrum @F/k4.json --bc none", vec![0.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0]),
        ("p5", "spectrum @F/p5.json --interior b,c,d --bc dirichlet", vec![1.0 - h, 1.0, 1.0 + h]),
    ];
    let mut worst_val = 0.0f64;
    let mut worst_orth = 0.0f64;
    for (name, cmd, expected) in cases {
        let o = run_args(&args(cmd), None);
        ensure(o.code == 0, || format!("{name}: {}", o.stderr))?;
        let r = result_of(&o);
        let values = floats(&r["values"]);
        ensure(values.len() == expected.len(), || format!("{name}: {values:?}"))?;
        for (a, b) in values.iter().zip(&expected) {
            worst_val = worst_val.max((a - b).abs());
        }
        // weighted orthonormality recomputed from the emitted functions
        let g = fixture_graph(name);
        let ids: Vec<&str> = r["vertices"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        let interior: Vec<&str> = match cmd.contains("--interior") {
            true => vec!["b", "c", "d"],
            false => ids.clone(),
        };
        let funcs: Vec<Vec<f64>> = r["functions"].as_array().unwrap().iter().map(floats).collect();
        for i in 0..funcs.len() {
            for j in 0..funcs.len() {
                let ip: f64 = ids
                    .iter()
                    .enumerate()
                    .filter(|(_, id)| interior.contains(id))
                    .map(|(k, id)| g.degree(g.index_of(id).unwrap()) as f64 * funcs[i][k] * funcs[j][k])
                    .sum();
                worst_orth = worst_orth.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    ensure(worst_val <= 1e-10, || format!("eigenvalue error {worst_val:e}"))?;
    ensure(worst_orth <= 1e-10, || format!("orthonormality residual {worst_orth:e}"))?;
    Ok(format!("eigenvalue error {worst_val:.2e}, orthonormality {worst_orth:.2e}"))
}

/// D^{1/2} L D^{-1/2} over the interior, assembled column by column from
/// the stencil.
fn symmetric_operator(s: &OperatorSpec) -> DMatrix<f64> {
    let w = s.window();
    let g = w.host();
    let m = w.interior().len();
    let d: Vec<f64> = w.interior().iter().map(|&x| g.degree(x) as f64).collect();
    let mut l = DMatrix::zeros(m, m);
    for j in 0..m {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        let col = s.apply(&s.extend(&e)).unwrap();
        for i in 0..m {
            l[(i, j)] = col[i] * d[i].sqrt() / d[j].sqrt();
        }
    }
    (&l + l.transpose()) * 0.5
}

/// Largest Rayleigh quotient over the column span of `b`.
fn max_rayleigh(m: &DMatrix<f64>, b: DMatrix<f64>) -> f64 {
    let q = b.qr().q();
    let proj = q.transpose() * m * &q;
    proj.symmetric_eigen().eigenvalues.max()
}

fn courant_fischer() -> Outcome {
    let mut rng = Lcg64::new(2024);
    let mut span_err = 0.0f64;
    let mut deficit = f64::INFINITY;
    let mut count = 0;
    for (name, g) in fixtures::all() {
        let spec = whole_spec(g);
        let es = eigensystem(&spec).unwrap();
        let m = symmetric_operator(&spec);
        let n = es.len();
        let host = spec.window().host();
        let interior = spec.window().interior();
        let sqrt_d: Vec<f64> = interior.iter().map(|&x| (host.degree(x) as f64).sqrt()).collect();
        for j in 1..=n {
            let lambda = es.values[j - 1];
            let span = DMatrix::from_fn(n, j, |i, k| sqrt_d[i] * es.functions[k].raw(interior[i]));
            let top = max_rayleigh(&m, span);
            span_err = span_err.max((top - lambda).abs());
            ensure((top - lambda).abs() <= 1e-9, || format!("{name} j={j}: span max {top} vs {lambda}"))?;
            for _ in 0..50 {
                let b = DMatrix::from_fn(n, j, |_, _| rng.uniform(-1.0, 1.0));
                let top = max_rayleigh(&m, b);
                deficit = deficit.min(top - lambda);
                ensure(top >= lambda - 1e-9, || format!("{name} j={j}: random subspace max {top} < {lambda}"))?;
                count += 1;
            }
        }
    }
    Ok(format!(
        "span error {span_err:.2e}; {count} random subspaces, min(max R - lambda_j) = {deficit:.2e}"
    ))
}

fn barta() -> Outcome {
    let cfg = CalculusConfig::default();
    let mut rng = Lcg64::new(77);
    let mut tight = 0.0f64;
    let mut windows = 0;
    for (name, g) in fixtures::all() {
        let Some(w) = half_window(&g) else { continue };
        windows += 1;
        let spec = OperatorSpec::new(w.clone(), None, BoundaryCondition::Dirichlet, cfg).unwrap();
        let es = eigensystem(&spec).unwrap();
        let mu1 = es.values[0];
        for _ in 0..100 {
            let mut u = VertexFunction::empty(g.len());
            for &x in w.interior() {
                u.set(x, rng.uniform(0.05, 2.0));
            }
            for &b in w.boundary() {
                u.set(b, rng.uniform(0.0, 1.0));
            }
            let bound = barta_bound(&w, None, &u, cfg).unwrap();
            ensure(bound <= mu1 + 1e-10, || format!("{name}: bound {bound} > mu1 {mu1}"))?;
        }
        let phi = es.functions[0].map(f64::abs);
        let bound = barta_bound(&w, None, &phi, cfg).unwrap();
        tight = tight.max((bound - mu1).abs());
        ensure((bound - mu1).abs() <= 1e-8, || format!("{name}: tight bound {bound} vs {mu1}"))?;
    }
    Ok(format!("{windows} windows x 100 test functions; tightness error {tight:.2e}"))
}

fn brute_cheeger(g: &Graph) -> (f64, f64) {
    let n = g.len();
    let total: usize = g.degrees().iter().sum();
    let (mut h, mut gv) = (f64::INFINITY, f64::INFINITY);
    for mask in 1u32..((1u32 << n) - 1) {
        let inside = |v: usize| mask & (1 << v) != 0;
        let vol: usize = (0..n).filter(|&v| inside(v)).map(|v| g.degree(v)).sum();
        let denom = vol.min(total - vol) as f64;
        let cut = (0..n)
            .filter(|&v| inside(v))
            .flat_map(|v| g.neighbors(v).iter().copied())
            .filter(|&y| !inside(y))
            .count();
        let vb = (0..n)
            .filter(|&y| !inside(y) && g.neighbors(y).iter().any(|&x| inside(x)))
            .count();
        h = h.min(cut as f64 / denom);
        gv = gv.min(vb as f64 / denom);
    }
    (h, gv)
}

fn cheeger() -> Outcome {
    let mut graphs = 0;
    let mut subsets = 0;
    for (name, g) in fixtures::all() {
        if g.len() > 12 {
            continue;
        }
        graphs += 1;
        let (h, gv) = brute_cheeger(&g);
        let s = cheeger_summary(&g).unwrap();
        ensure(s.h == h && s.g == gv, || format!("{name}: ({}, {}) vs ({h}, {gv})", s.h, s.g))?;
        let n = g.len();
        for mask in 1u32..((1u32 << n) - 1) {
            let members: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            let ind = VertexFunction::full((0..n).map(|v| if mask & (1 << v) != 0 { 1.0 } else { 0.0 }).collect());
            let set_ratio = cut_report(&g, &members).unwrap().h_value;
            let functional = cheeger_functional(&g, &ind).unwrap();
            ensure(functional == set_ratio, || format!("{name} {mask:b}: {functional} vs {set_ratio}"))?;
            subsets += 1;
        }
    }
    Ok(format!("{graphs} graphs enumerated, {subsets} indicator functionals exact"))
}

fn random_instance(rng: &mut Lcg64) -> (Graph, VertexFunction) {
    let n = 3 + rng.below(8);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.below(v), v));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if !edges.contains(&(a, b)) && rng.next_f64() < 0.3 {
                edges.push((a, b));
            }
        }
    }
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let g = Graph::new(ids, &edges).unwrap();
    let f = VertexFunction::full((0..n).map(|_| rng.below(6) as f64).collect());
    (g, f)
}

/// min over simple z0–z1 paths of the max of f, by depth-first enumeration.
fn brute_bottleneck(g: &Graph, f: &VertexFunction, z0: usize, z1: usize) -> f64 {
    fn walk(g: &Graph, f: &VertexFunction, v: usize, target: usize, seen: &mut Vec<bool>, top: f64, best: &mut f64) {
        let top = top.max(f.raw(v));
        if v == target {
            *best = best.min(top);
            return;
        }
        for &y in g.neighbors(v) {
            if !seen[y] {
                seen[y] = true;
                walk(g, f, y, target, seen, top, best);
                seen[y] = false;
            }
        }
    }
    let mut seen = vec![false; g.len()];
    seen[z0] = true;
    let mut best = f64::INFINITY;
    walk(g, f, z0, z1, &mut seen, f64::NEG_INFINITY, &mut best);
    best
}

fn minimax() -> Outcome {
    let mut rng = Lcg64::new(5);
    for trial in 0..100 {
        let (g, f) = random_instance(&mut rng);
        let (z0, z1) = (0, g.len() - 1);
        let (c, path) = bottleneck_level(&g, &f, z0, z1).unwrap();
        let brute = brute_bottleneck(&g, &f, z0, z1);
        ensure(c == brute, || format!("instance {trial}: level {c} vs enumeration {brute}"))?;
        let valid = path.first() == Some(&z0)
            && path.last() == Some(&z1)
            && path.windows(2).all(|p| g.adjacent(p[0], p[1]))
            && path.iter().map(|&v| f.raw(v)).fold(f64::NEG_INFINITY, f64::max) == c;
        ensure(valid, || format!("instance {trial}: bad path {path:?}"))?;
    }
    let g = fixtures::octahedron();
    let f = VertexFunction::full(vec![0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
    let s = find_minimax(&g, &f, 0, 1).unwrap();
    ensure(s.c == 1.0, || format!("octahedron level {}", s.c))?;
    ensure(s.classifier_minimax == Some(true), || format!("octahedron classifier {:?}", s.classifier_minimax))?;
    let z = g.index_of(&s.z).unwrap();
    ensure(classify_vertex(&g, &f, z).unwrap().is(VertexKind::MinimaxPoint), || "z not mini-max".into())?;
    Ok(format!("100 random instances match enumeration; octahedron c = 1 at {}", s.z))
}

fn heat_specs() -> Vec<(String, OperatorSpec)> {
    let mut out = Vec::new();
    for (name, g) in fixtures::all() {
        if let Some(w) = half_window(&g) {
            out.push((
                format!("{name}/dirichlet"),
                OperatorSpec::new(w, None, BoundaryCondition::Dirichlet, CalculusConfig::default()).unwrap(),
            ));
        }
        out.push((format!("{name}/none"), whole_spec(g)));
    }
    out
}

fn heat_kernel() -> Outcome {
    let mut s0 = 0.0f64;
    let mut semi = 0.0f64;
    for (name, spec) in heat_specs() {
        let es: EigenSystem = eigensystem(&spec).unwrap();
        let k = HeatKernel::new(&es);
        let w = spec.window();
        let mut rng = Lcg64::new(3);
        let mut f = VertexFunction::empty(w.host().len());
        for &x in w.interior() {
            f.set(x, rng.uniform(-2.0, 2.0));
        }
        let back = k.reconstruct(0.0, &f, Reconstruction::Weighted).unwrap();
        for &x in w.interior() {
            s0 = s0.max((back.raw(x) - f.raw(x)).abs());
        }
        for t in [0.1, 0.5, 1.0] {
            for s in [0.1, 0.5, 1.0] {
                semi = semi.max(k.semigroup_residual(t, s).unwrap());
            }
        }
        ensure(s0 <= 1e-12 && semi <= 1e-10, || format!("{name}: S0 {s0:e}, semigroup {semi:e}"))?;
    }
    let p3 = SubgraphWindow::new(Arc::new(fixtures::path(3)), &[1]).unwrap();
    let spec = OperatorSpec::new(p3, None, BoundaryCondition::Dirichlet, CalculusConfig::default()).unwrap();
    let es = eigensystem(&spec).unwrap();
    let k = HeatKernel::new(&es);
    let mut p3_err = 0.0f64;
    for t in [0.0, 0.1, 0.5, 1.0, 2.0] {
        p3_err = p3_err.max((k.eval(t, 1, 1).unwrap() - (-t).exp() / 2.0).abs());
    }
    ensure(p3_err <= 1e-12, || format!("P3 kernel error {p3_err:e}"))?;
    Ok(format!("S0 {s0:.2e}, semigroup {semi:.2e}, P3 e^-t/2 error {p3_err:.2e}"))
}

fn dmf() -> Outcome {
    let cfg = CalculusConfig::default();
    let p3 = SubgraphWindow::new(Arc::new(fixtures::path(3)), &[1]).unwrap();
    let data = VertexFunction::full(vec![0.0, 1.0, 0.0]);
    let ns = [4usize, 8, 16, 32, 64];
    let mut errs = Vec::new();
    let mut max_el = 0.0f64;
    for &n in &ns {
        let run = dmf_run(&data, &Potential::Constant(0.0), 1.0, n, &p3, cfg).unwrap();
        errs.push((run.final_state().raw(1) - 1.0 / E).abs());
        for e in &run.ledger {
            ensure(e.certified && e.f_at_new <= e.f_at_prev, || format!("N={n} step {} uncertified", e.n))?;
            max_el = max_el.max(e.el_residual);
        }
    }
    let hs: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
    let order = slope(&hs, &errs);
    ensure(order >= 0.9, || format!("order {order}"))?;
    ensure(max_el <= 1e-10, || format!("EL residual {max_el:e}"))?;

    // nonnegative data with λ ≤ 0 stays nonnegative
    let mut rng = Lcg64::new(9);
    let grid = Arc::new(fixtures::grid(4, 4));
    let windows = [
        SubgraphWindow::new(Arc::new(fixtures::path(5)), &[1, 2, 3]).unwrap(),
        SubgraphWindow::new(grid.clone(), &[5, 6, 9, 10]).unwrap(),
        SubgraphWindow::new(grid, &[0, 1, 2, 4, 5, 6, 8, 9]).unwrap(),
    ];
    let mut runs = 0;
    for w in &windows {
        let n = w.host().len();
        let q = VertexFunction::full((0..n).map(|_| rng.uniform(-3.0, 0.0)).collect());
        let potentials = [
            Potential::Constant(-1.0),
            Potential::Linear { a: 0.0, b: -2.0 },
            Potential::Vertex(q),
        ];
        for v in &potentials {
            for steps in [1, 4, 16] {
                let mut phi = VertexFunction::empty(n);
                for &x in w.closure() {
                    phi.set(x, if w.interior().contains(&x) { rng.uniform(0.0, 1.0) } else { 0.0 });
                }
                let run = dmf_run(&phi, v, 1.0, steps, w, cfg).unwrap();
                let neg = run.steps.iter().flat_map(|u| w.closure().iter().map(|&x| u.raw(x))).any(|y| y < 0.0);
                ensure(!neg, || format!("negative value with potential {v}"))?;
                runs += 1;
            }
        }
    }
    Ok(format!("order {order:.3}, max EL residual {max_el:.2e}, {runs} nonnegativity runs"))
}

fn transport() -> Outcome {
    let o = run_args(
        &args("transport @F/k2.json @F/k2_field.csv @F/k2_start.csv --T 1 --dt 0.01"),
        None,
    );
    ensure(o.code == 0, || o.stderr.clone())?;
    let fin = floats(&result_of(&o)["final"]);
    let err = (fin[0] - 1.0).abs().max((fin[1] - 2.0).abs());
    ensure(err <= 1e-10, || format!("K2 error {err:e}"))?;

    let g = fixtures::octahedron();
    let mut rng = Lcg64::new(4);
    let base = VectorField::antisymmetric_from_edges(&g, |_, _| rng.uniform(-1.0, 1.0));
    let f0 = VertexFunction::full(rng.vector(6, -1.0, 1.0));
    let field = |t: f64| Ok(base.combine(1.0 + t.sin(), &base, 0.0));
    let finals: Vec<Vec<f64>> = [10, 20, 40, 80]
        .iter()
        .map(|&n| {
            let tr = transport_solve(&g, field, &f0, 1.0, n).unwrap();
            let last = tr.states.last().unwrap();
            (0..6).map(|x| last.raw(x)).collect()
        })
        .collect();
    let diff = |a: &Vec<f64>, b: &Vec<f64>| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let e: Vec<f64> = finals.windows(2).map(|p| diff(&p[0], &p[1])).collect();
    let orders: Vec<f64> = e.windows(2).map(|p| (p[0] / p[1]).log2()).collect();
    let worst = orders.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(worst >= 3.8, || format!("self-convergence orders {orders:?}"))?;
    // the loader's antisymmetrization is what the closed form relies on
    let k2 = fixtures::complete(2);
    let w = VectorField::from_csv(&k2, "from,to,value\n1,2,1\n", FieldSymmetry::Antisymmetrize).unwrap();
    ensure(w.is_flagged_antisymmetric(), || "K2 field not antisymmetric".into())?;
    Ok(format!("K2 error {err:.2e}; self-convergence orders {orders:.3?}"))
}

fn sphere(c: [f64; 3]) -> SpherePoint {
    SpherePoint::new(c).unwrap()
}

fn cap_map(n: usize, rng: &mut Lcg64) -> SphereMap {
    let mut u = SphereMap::empty(n);
    for v in 0..n {
        u.set(v, sphere([rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(0.5, 1.5)]));
    }
    u
}

fn harmonic() -> Outcome {
    let p3 = SubgraphWindow::new(Arc::new(fixtures::path(3)), &[1]).unwrap();
    let mut u = SphereMap::empty(3);
    u.set(0, sphere([1.0, 0.0, 0.0]));
    u.set(1, sphere([0.3, 0.2, 0.9]));
    u.set(2, sphere([0.0, 1.0, 0.0]));
    let flow = harmonic_heat_flow(&u, &p3, 0.5, 100_000, 1e-12).unwrap();
    let mid = flow.map.get(1).unwrap().coords();
    let h = SQRT_2 / 2.0;
    let mid_err = [h, h, 0.0].iter().zip(mid).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(mid_err <= 1e-8, || format!("midpoint error {mid_err:e}"))?;

    let windows = [
        SubgraphWindow::new(Arc::new(fixtures::path(5)), &[1, 2, 3]).unwrap(),
        SubgraphWindow::new(Arc::new(fixtures::cycle(4)), &[0, 1]).unwrap(),
        SubgraphWindow::new(Arc::new(fixtures::grid(4, 4)), &[5, 6, 9, 10]).unwrap(),
        SubgraphWindow::new(Arc::new(fixtures::octahedron()), &[2, 4]).unwrap(),
    ];
    let mut rng = Lcg64::new(31);
    let mut worst_fd = 0.0f64;
    for w in &windows[..3] {
        for _ in 0..10 {
            let u = cap_map(w.host().len(), &mut rng);
            for &x in w.interior() {
                let p = u.get(x).unwrap();
                let grad = first_variation(&u, w, x).unwrap();
                for _ in 0..2 {
                    let t = p.project(&rng.vector(3, -1.0, 1.0).try_into().unwrap());
                    let eps = 1e-5;
                    let mut plus = u.clone();
                    plus.set(x, sphere_exp(&p, &t.map(|c| c * eps)));
                    let mut minus = u.clone();
                    minus.set(x, sphere_exp(&p, &t.map(|c| -c * eps)));
                    let fd = (map_energy(&plus, w).unwrap() - map_energy(&minus, w).unwrap()) / (2.0 * eps);
                    let rel = (fd - dot(&grad, &t)).abs() / (norm(&grad) * norm(&t)).max(1e-3);
                    worst_fd = worst_fd.max(rel);
                }
            }
        }
    }
    ensure(worst_fd <= 1e-5, || format!("finite-difference mismatch {worst_fd:e}"))?;

    let mut accepted = 0;
    for w in &windows {
        for tau in [0.05, 0.5, 2.0] {
            let u = cap_map(w.host().len(), &mut rng);
            let r = harmonic_heat_flow(&u, w, tau, 2000, 1e-10).unwrap();
            let mono = r.history.windows(2).all(|p| p[1].energy <= p[0].energy);
            ensure(mono, || "energy increased at an accepted step".into())?;
            accepted += r.steps;
        }
    }
    Ok(format!(
        "midpoint error {mid_err:.2e}; FD relative error {worst_fd:.2e}; {accepted} accepted steps nonincreasing"
    ))
}

fn determinism() -> Outcome {
    let all = cases();
    let mut compared = 0;
    for c in &all {
        let golden = fs::read_to_string(golden_path(c)).map_err(|e| format!("{}: {e}", c.name))?;
        for _ in 0..2 {
            let o = run_case(c);
            ensure(o.code == c.exit, || format!("{}: exit {}", c.name, o.code))?;
            ensure(primary_text(c, &o) == golden, || format!("{}: differs from golden", c.name))?;
            compared += 1;
        }
        for a in &c.artifacts {
            let got = fs::read(format!("{ARTIFACTS}/{a}")).unwrap();
            ensure(got == fs::read(golden_dir().join(a)).unwrap(), || format!("{}: artifact {a}", c.name))?;
        }
    }
    for threads in [1usize, 2, 4, 8] {
        let bad: Vec<&str> = thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let all = &all;
                    s.spawn(move || {
                        all.iter()
                            .skip(t)
                            .step_by(threads)
                            .filter(|c| {
                                let o = run_case(c);
                                fs::read_to_string(golden_path(c)).ok() != Some(primary_text(c, &o))
                            })
                            .map(|c| c.name)
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
        });
        ensure(bad.is_empty(), || format!("{threads} threads: {bad:?}"))?;
        compared += all.len();
    }
    Ok(format!("{} golden files, {compared} byte comparisons", all.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("identity suite", identity_suite),
        ("spectra", spectra),
        ("courant-fischer", courant_fischer),
        ("barta", barta),
        ("cheeger", cheeger),
        ("mini-max", minimax),
        ("heat kernel", heat_kernel),
        ("discrete morse flow", dmf),
        ("transport", transport),
        ("harmonic maps", harmonic),
        ("determinism", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({secs:.2}s)");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
