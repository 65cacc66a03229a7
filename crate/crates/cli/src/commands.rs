use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use graphcalc::calculus::suite::run_identity_suite;
use graphcalc::calculus::{integrate, CalculusConfig, FieldSymmetry, LaplacianScale, VectorField};
use graphcalc::constants::{cheeger_summary, poincare_dirichlet_constant, poincare_neumann_constant};
use graphcalc::evolution::{
    dmf_convergence_study, dmf_run, heat_identities_report, spectral_heat_solve, transport_solve, Potential,
    Trajectory, MAX_CHECK_STEP,
};
use graphcalc::graph::{load_function_csv, load_graph, monge_cost, Distance};
use graphcalc::harmonic::{ambient_residual, harmonic_heat_flow, seed_interior, FlowOutcome, SphereMap};
use graphcalc::minimax::{classify_vertex, find_minimax};
use graphcalc::spectral::{barta_bound, courant_fischer_check, eigensystem, BoundaryCondition, OperatorSpec};
use graphcalc::{Graph, SubgraphWindow, VertexFunction};
use serde_json::{json, Value};

use crate::format::{csv_number, to_json};
use crate::manifest::{sha256_hex, RunManifest};
use crate::{Cli, CliError, Command, GridArgs, WindowArgs};

type Res<T> = Result<T, CliError>;

/// Run the parsed command and return the JSON report.
pub fn dispatch(cli: &Cli, argv: &[String], env_scale: Option<&str>) -> Res<String> {
    let name = command_name(&cli.command);
    let mut m = RunManifest::new(name, argv);
    let (scale, source) = match (&cli.scale, env_scale) {
        (Some(s), _) => (s.parse::<LaplacianScale>()?, "flag"),
        (None, Some(s)) => (s.parse::<LaplacianScale>()?, "env"),
        (None, None) => (LaplacianScale::default(), "default"),
    };
    m.set("laplacian_scale", scale.to_string());
    m.set("laplacian_scale_source", source);
    let cfg = CalculusConfig::new(scale);
    let result = match &cli.command {
        Command::Graph { graph, window, distance } => graph_cmd(&mut m, graph, window, distance.as_deref())?,
        Command::Spectrum {
            graph,
            window,
            bc,
            potential,
            check,
            seed,
            barta,
        } => spectrum_cmd(
            &mut m,
            cfg,
            graph,
            window,
            bc.as_deref(),
            potential.as_deref(),
            check.then_some(*seed),
            barta.as_deref(),
        )?,
        Command::Cheeger { graph, window } => cheeger_cmd(&mut m, graph, window)?,
        Command::Minimax { graph, function, from, to } => minimax_cmd(&mut m, graph, function, from, to)?,
        Command::Heat {
            graph,
            function,
            window,
            bc,
            potential,
            t_end,
            grid,
            trajectory,
        } => heat_cmd(
            &mut m,
            cfg,
            graph,
            function,
            window,
            bc.as_deref(),
            potential.as_deref(),
            *t_end,
            grid,
            trajectory.as_deref(),
        )?,
        Command::Transport {
            graph,
            field,
            function,
            t_end,
            grid,
            symmetry,
            trajectory,
        } => transport_cmd(&mut m, graph, field, function, *t_end, grid, symmetry, trajectory.as_deref())?,
        Command::Dmf {
            graph,
            function,
            window,
            t_end,
            grid,
            potential,
            study,
            trajectory,
        } => dmf_cmd(
            &mut m,
            cfg,
            graph,
            function,
            window,
            *t_end,
            grid,
            potential,
            study.as_deref(),
            trajectory.as_deref(),
        )?,
        Command::Harmonic {
            graph,
            window,
            boundary,
            initial,
            tol,
            tau,
            max_steps,
            map,
            ledger,
        } => harmonic_cmd(
            &mut m,
            graph,
            window,
            boundary,
            initial.as_deref(),
            *tol,
            *tau,
            *max_steps,
            map.as_deref(),
            ledger.as_deref(),
        )?,
        Command::Identities { graph, seed, trials } => identities_cmd(&mut m, cfg, graph, *seed, *trials)?,
        Command::Monge { graph, from, to } => monge_cmd(&mut m, graph, from, to)?,
    };
    Ok(to_json(&json!({ "manifest": m, "result": result })))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Graph { .. } => "graph",
        Command::Spectrum { .. } => "spectrum",
        Command::Cheeger { .. } => "cheeger",
        Command::Minimax { .. } => "minimax",
        Command::Heat { .. } => "heat",
        Command::Transport { .. } => "transport",
        Command::Dmf { .. } => "dmf",
        Command::Harmonic { .. } => "harmonic",
        Command::Identities { .. } => "identities",
        Command::Monge { .. } => "monge",
    }
}

fn read_graph(m: &mut RunManifest, path: &str) -> Res<Arc<Graph>> {
    let text = m.read("graph", path)?;
    Ok(Arc::new(load_graph(&text)?))
}

fn read_function(m: &mut RunManifest, role: &str, g: &Graph, path: &str) -> Res<VertexFunction> {
    let text = m.read(role, path)?;
    Ok(load_function_csv(g, &text)?)
}

fn make_window(m: &mut RunManifest, g: &Arc<Graph>, args: &WindowArgs) -> Res<SubgraphWindow> {
    let w = match &args.interior {
        Some(ids) => SubgraphWindow::from_ids(g.clone(), ids)?,
        None => SubgraphWindow::whole(g.clone())?,
    };
    m.set("interior", ids_of(g, w.interior()));
    Ok(w)
}

fn resolve_bc(m: &mut RunManifest, w: &SubgraphWindow, bc: Option<&str>) -> Res<BoundaryCondition> {
    let bc = match bc {
        Some(s) => s.parse()?,
        None if w.boundary().is_empty() => BoundaryCondition::None,
        None => BoundaryCondition::Dirichlet,
    };
    m.set("bc", bc.to_string());
    Ok(bc)
}

fn ids_of(g: &Graph, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| g.id(v).to_string()).collect()
}

fn values_on(f: &VertexFunction, g: &Graph, vs: &[usize]) -> Res<Vec<f64>> {
    Ok(f.gather(g, vs)?)
}

/// A potential given as a CSV path, a built-in profile or a number.
fn read_potential(m: &mut RunManifest, g: &Graph, arg: &str) -> Res<Potential> {
    m.set("potential", arg);
    if Path::new(arg).is_file() {
        Ok(Potential::Vertex(read_function(m, "potential", g, arg)?))
    } else {
        Ok(arg.parse()?)
    }
}

fn step_count(m: &mut RunManifest, t_end: f64, grid: &GridArgs) -> Res<usize> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(CliError::validation("invalid_argument", format!("--T must be positive, got {t_end}")));
    }
    let n = match (grid.steps, grid.dt) {
        (Some(n), _) => n,
        (None, Some(dt)) => {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::validation("invalid_argument", format!("--dt must be positive, got {dt}")));
            }
            let n = (t_end / dt).round();
            if n < 1.0 || (n * dt - t_end).abs() > 1e-9 * t_end {
                return Err(CliError::validation(
                    "invalid_argument",
                    format!("T = {t_end} is not a whole number of steps of {dt}"),
                ));
            }
            n as usize
        }
        (None, None) => return Err(CliError::validation("usage", "one of --N or --dt is required")),
    };
    if n == 0 {
        return Err(CliError::validation("invalid_argument", "--N must be at least 1"));
    }
    m.set("T", t_end);
    m.set("N", n);
    Ok(n)
}

/// Write a derived file and describe it for the report.
fn write_artifact(path: &str, text: &str) -> Res<Value> {
    std::fs::write(path, text).map_err(|e| CliError::io(format!("cannot write {path:?}: {e}")))?;
    Ok(json!({ "path": path, "sha256": sha256_hex(text.as_bytes()) }))
}

fn trajectory_csv(g: &Graph, traj_times: &[f64], states: &[VertexFunction], vertices: &[usize]) -> Res<String> {
    let mut out = String::from("time,vertex,value\n");
    for (t, f) in traj_times.iter().zip(states) {
        for &v in vertices {
            let _ = writeln!(out, "{},{},{}", csv_number(*t), g.id(v), csv_number(f.at(g, v)?));
        }
    }
    Ok(out)
}

fn write_trajectory(g: &Graph, traj: &Trajectory, path: Option<&str>) -> Res<Value> {
    match path {
        Some(p) => write_artifact(p, &trajectory_csv(g, &traj.times, &traj.states, &traj.vertices)?),
        None => Ok(Value::Null),
    }
}

fn graph_cmd(m: &mut RunManifest, path: &str, window: &WindowArgs, distance: Option<&[String]>) -> Res<Value> {
    let g = read_graph(m, path)?;
    let mut out = json!({
        "vertices": g.ids(),
        "degrees": g.degrees(),
        "edge_count": g.edge_count(),
        "connected": g.is_connected(),
    });
    if window.interior.is_some() {
        let w = make_window(m, &g, window)?;
        out["window"] = json!({
            "interior": ids_of(&g, w.interior()),
            "boundary": ids_of(&g, w.boundary()),
            "closure": ids_of(&g, w.closure()),
            "interior_volume": g.volume(w.interior()),
        });
    }
    if let Some(pair) = distance {
        let [a, b] = pair else {
            return Err(CliError::validation("usage", "--distance takes exactly two vertex ids"));
        };
        let hops = match g.distance_by_id(a, b)? {
            Distance::Finite(d) => json!(d),
            Distance::Unreachable => Value::Null,
        };
        out["distance"] = json!({ "from": a, "to": b, "hops": hops });
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn spectrum_cmd(
    m: &mut RunManifest,
    cfg: CalculusConfig,
    path: &str,
    window: &WindowArgs,
    bc: Option<&str>,
    potential: Option<&str>,
    check_seed: Option<u64>,
    barta: Option<&str>,
) -> Res<Value> {
    let g = read_graph(m, path)?;
    let w = make_window(m, &g, window)?;
    let bc = resolve_bc(m, &w, bc)?;
    let q = match potential {
        Some(p) => Some(read_function(m, "potential", &g, p)?),
        None => None,
    };
    let spec = OperatorSpec::new(w.clone(), q.as_ref(), bc, cfg)?;
    let es = eigensystem(&spec)?;
    let closure = w.closure();
    let functions = es
        .functions
        .iter()
        .map(|f| values_on(f, &g, closure))
        .collect::<Res<Vec<_>>>()?;
    let mut out = json!({
        "vertices": ids_of(&g, closure),
        "values": es.values,
        "functions": functions,
        "max_residual": es.max_residual()?,
        "orthonormality_defect": es.orthonormality_defect(),
    });
    if let Some(seed) = check_seed {
        m.set("seed", seed);
        let reports = (1..=es.len())
            .map(|j| courant_fischer_check(&es, j, seed))
            .collect::<Result<Vec<_>, _>>()?;
        out["courant_fischer"] = serde_json::to_value(reports).expect("serializable");
    }
    if let Some(p) = barta {
        let u = read_function(m, "barta_test_function", &g, p)?;
        let bound = barta_bound(&w, q.as_ref(), &u, cfg)?;
        out["barta"] = json!({
            "bound": bound,
            "lambda_1": es.values[0],
            "bound_below_lambda_1": bound <= es.values[0] + 1e-10,
        });
    }
    Ok(out)
}

fn cheeger_cmd(m: &mut RunManifest, path: &str, window: &WindowArgs) -> Res<Value> {
    let g = read_graph(m, path)?;
    let mut out = serde_json::to_value(cheeger_summary(&g)?).expect("serializable");
    out["poincare_neumann"] = if g.len() >= 2 && g.is_connected() {
        json!(poincare_neumann_constant(&g)?)
    } else {
        Value::Null
    };
    if window.interior.is_some() {
        let w = make_window(m, &g, window)?;
        out["poincare_dirichlet"] = json!(poincare_dirichlet_constant(&w)?);
    }
    Ok(out)
}

fn minimax_cmd(m: &mut RunManifest, path: &str, function: &str, from: &str, to: &str) -> Res<Value> {
    let g = read_graph(m, path)?;
    let f = read_function(m, "function", &g, function)?;
    let (z0, z1) = (g.index_of(from)?, g.index_of(to)?);
    m.set("from", from);
    m.set("to", to);
    let search = find_minimax(&g, &f, z0, z1)?;
    let z = g.index_of(&search.z)?;
    let class = classify_vertex(&g, &f, z)?;
    let mut out = serde_json::to_value(&search).expect("serializable");
    out["classification"] = serde_json::to_value(class).expect("serializable");
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn heat_cmd(
    m: &mut RunManifest,
    cfg: CalculusConfig,
    path: &str,
    function: &str,
    window: &WindowArgs,
    bc: Option<&str>,
    potential: Option<&str>,
    t_end: f64,
    grid: &GridArgs,
    trajectory: Option<&str>,
) -> Res<Value> {
    let g = read_graph(m, path)?;
    let f = read_function(m, "function", &g, function)?;
    let w = make_window(m, &g, window)?;
    let bc = resolve_bc(m, &w, bc)?;
    let q = match potential {
        None => None,
        Some(arg) => match read_potential(m, &g, arg)? {
            Potential::Vertex(q) => Some(q),
            Potential::Constant(c) => Some(VertexFunction::constant(g.len(), c)),
            other => {
                return Err(CliError::validation(
                    "invalid_argument",
                    format!("heat needs a time-independent potential, got {other}"),
                ))
            }
        },
    };
    let n = step_count(m, t_end, grid)?;
    let spec = OperatorSpec::new(w.clone(), q.as_ref(), bc, cfg)?;
    let times = graphcalc::evolution::uniform_times(t_end, n);
    let traj = spectral_heat_solve(&spec, &f, &times)?;
    let mut warnings = Vec::new();
    let identities = if t_end / n as f64 <= MAX_CHECK_STEP && times.len() >= 5 {
        serde_json::to_value(heat_identities_report(&traj, &spec)?).expect("serializable")
    } else {
        warnings.push(format!(
            "identity checks skipped: need at least 4 steps of size at most {MAX_CHECK_STEP}"
        ));
        Value::Null
    };
    let last = traj.states.last().expect("t = 0 state");
    Ok(json!({
        "vertices": ids_of(&g, &traj.vertices),
        "samples": traj.times.len(),
        "final_time": traj.times.last(),
        "final": values_on(last, &g, &traj.vertices)?,
        "identities": identities,
        "trajectory": write_trajectory(&g, &traj, trajectory)?,
        "warnings": warnings,
    }))
}

#[allow(clippy::too_many_arguments)]
fn transport_cmd(
    m: &mut RunManifest,
    path: &str,
    field_path: &str,
    function: &str,
    t_end: f64,
    grid: &GridArgs,
    symmetry: &str,
    trajectory: Option<&str>,
) -> Res<Value> {
    let g = read_graph(m, path)?;
    let mode = match symmetry {
        "as-given" => FieldSymmetry::AsGiven,
        "symmetrize" => FieldSymmetry::Symmetrize,
        "antisymmetrize" => FieldSymmetry::Antisymmetrize,
        other => {
            return Err(CliError::validation(
                "invalid_argument",
                format!("--symmetry must be as-given, symmetrize or antisymmetrize, got {other:?}"),
            ))
        }
    };
    m.set("symmetry", symmetry);
    let text = m.read("field", field_path)?;
    let field = VectorField::from_csv(&g, &text, mode)?;
    let f0 = read_function(m, "function", &g, function)?;
    let n = step_count(m, t_end, grid)?;
    let traj = transport_solve(&g, |_| Ok(field.clone()), &f0, t_end, n)?;
    let all: Vec<usize> = (0..g.len()).collect();
    let first = &traj.states[0];
    let last = traj.states.last().expect("final state");
    Ok(json!({
        "scheme": traj.scheme,
        "dt": traj.step,
        "vertices": g.ids(),
        "final": values_on(last, &g, &all)?,
        "mass_initial": integrate(&g, first, &all)?,
        "mass_final": integrate(&g, last, &all)?,
        "trajectory": write_trajectory(&g, &traj, trajectory)?,
    }))
}

#[allow(clippy::too_many_arguments)]
fn dmf_cmd(
    m: &mut RunManifest,
    cfg: CalculusConfig,
    path: &str,
    function: &str,
    window: &WindowArgs,
    t_end: f64,
    grid: &GridArgs,
    potential: &str,
    study: Option<&[usize]>,
    trajectory: Option<&str>,
) -> Res<Value> {
    let g = read_graph(m, path)?;
    let phi = read_function(m, "function", &g, function)?;
    let w = make_window(m, &g, window)?;
    let v = read_potential(m, &g, potential)?;
    let n = step_count(m, t_end, grid)?;
    let run = dmf_run(&phi, &v, t_end, n, &w, cfg)?;
    let closure = w.closure();
    let convergence = match study {
        Some(ns) => {
            m.set("study", ns.to_vec());
            serde_json::to_value(dmf_convergence_study(&phi, &v, t_end, ns, &w, cfg)?).expect("serializable")
        }
        None => Value::Null,
    };
    let traj = match trajectory {
        Some(p) => write_artifact(p, &trajectory_csv(&g, &run.times, &run.steps, closure)?)?,
        None => Value::Null,
    };
    Ok(json!({
        "h": run.h,
        "mu1": run.mu1,
        "vertices": ids_of(&g, closure),
        "final": values_on(run.final_state(), &g, closure)?,
        "all_certified": run.ledger.iter().all(|e| e.certified),
        "max_el_residual": run.ledger.iter().map(|e| e.el_residual).fold(0.0, f64::max),
        "ledger": run.ledger,
        "bound": run.bound,
        "convergence": convergence,
        "trajectory": traj,
        "warnings": run.warnings,
    }))
}

#[allow(clippy::too_many_arguments)]
fn harmonic_cmd(
    m: &mut RunManifest,
    path: &str,
    window: &WindowArgs,
    boundary: &str,
    initial: Option<&str>,
    tol: f64,
    tau: f64,
    max_steps: usize,
    map_out: Option<&str>,
    ledger_out: Option<&str>,
) -> Res<Value> {
    let g = read_graph(m, path)?;
    let w = make_window(m, &g, window)?;
    m.set("tol", tol);
    m.set("tau", tau);
    m.set("max_steps", max_steps);
    let phi = SphereMap::from_csv(&g, &m.read("boundary", boundary)?)?;
    let u0 = match initial {
        None => seed_interior(&phi, &w)?,
        Some(p) => {
            let mut u = SphereMap::from_csv(&g, &m.read("initial", p)?)?;
            for &b in w.boundary() {
                u.set(b, phi.at(&g, b)?);
            }
            u
        }
    };
    let flow = harmonic_heat_flow(&u0, &w, tau, max_steps, tol)?;
    if flow.outcome == FlowOutcome::StepCapReached {
        return Err(CliError::numerical(
            "no_convergence",
            format!(
                "flow stopped after {} steps with max variation {:e} above tol {tol:e}",
                flow.steps, flow.max_variation
            ),
        ));
    }
    let closure = w.closure();
    let mut csv = String::from("vertex,x,y,z\n");
    let mut rows = Vec::new();
    for (id, [x, y, z]) in flow.map.rows(&g, closure) {
        let _ = writeln!(csv, "{id},{},{},{}", csv_number(x), csv_number(y), csv_number(z));
        rows.push(json!({ "vertex": id, "x": x, "y": y, "z": z }));
    }
    let ambient = w
        .interior()
        .iter()
        .map(|&x| ambient_residual(&flow.map, &w, x).map(|t| graphcalc::harmonic::norm(&t)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let ledger = match ledger_out {
        Some(p) => {
            let mut text = String::from("step,energy,tau,max_variation\n");
            for r in &flow.history {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    r.step,
                    csv_number(r.energy),
                    csv_number(r.tau),
                    csv_number(r.max_variation)
                );
            }
            write_artifact(p, &text)?
        }
        None => Value::Null,
    };
    Ok(json!({
        "outcome": flow.outcome,
        "steps": flow.steps,
        "tau_used": flow.tau_used,
        "initial_energy": flow.initial_energy,
        "final_energy": flow.final_energy,
        "max_variation": flow.max_variation,
        "max_ambient_residual": ambient,
        "energy_nonincreasing": flow.history.windows(2).all(|p| p[1].energy <= p[0].energy),
        "map": rows,
        "map_file": match map_out {
            Some(p) => write_artifact(p, &csv)?,
            None => Value::Null,
        },
        "ledger_file": ledger,
    }))
}

fn identities_cmd(m: &mut RunManifest, cfg: CalculusConfig, path: &str, seed: u64, trials: usize) -> Res<Value> {
    let g = read_graph(m, path)?;
    m.set("seed", seed);
    m.set("trials", trials);
    let report = run_identity_suite(&g, seed, trials, cfg)?;
    let mut out = serde_json::to_value(&report).expect("serializable");
    out["max_residual"] = json!(report.max_residual());
    Ok(out)
}

fn monge_cmd(m: &mut RunManifest, path: &str, from: &[String], to: &[String]) -> Res<Value> {
    let g = read_graph(m, path)?;
    m.set("from", from.to_vec());
    m.set("to", to.to_vec());
    let a = g.indices_of(from)?;
    let b = g.indices_of(to)?;
    let best = monge_cost(&g, &a, &b)?;
    let pairs: Vec<Value> = best
        .permutation
        .iter()
        .enumerate()
        .map(|(i, &j)| json!([from[i], to[j]]))
        .collect();
    Ok(json!({
        "cost": best.cost,
        "permutation": best.permutation,
        "pairs": pairs,
    }))
}
