#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

/// Fixture and artifact directories, relative to the crate root so that
/// the paths recorded in manifests do not depend on the checkout location.
pub const FIXTURES: &str = "../../fixtures";
pub const ARTIFACTS: &str = "../../target/cli-artifacts";

pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
    pub exit: i32,
    /// Files written next to the report, by file name under [`ARTIFACTS`].
    pub artifacts: Vec<String>,
}

fn case(name: &'static str, exit: i32, args: &str) -> Case {
    let mut artifacts = Vec::new();
    let args = args
        .split_whitespace()
        .map(|a| {
            if let Some(f) = a.strip_prefix("@F/") {
                format!("{FIXTURES}/{f}")
            } else if let Some(f) = a.strip_prefix("@A/") {
                artifacts.push(f.to_string());
                format!("{ARTIFACTS}/{f}")
            } else {
                a.to_string()
            }
        })
        .collect();
    Case {
        name,
        args,
        exit,
        artifacts,
    }
}

pub fn cases() -> Vec<Case> {
    let mut out = vec![
        case("graph_p5", 0, "graph @F/p5.json --interior b,c --distance a,e"),
        case("graph_octahedron", 0, "graph @F/octahedron.json --interior e1,e2 --distance e1,-e1"),
        case("spectrum_c4", 0, "spectrum @F/c4.json --bc none"),
        case("spectrum_k4", 0, "spectrum @F/k4.json"),
        case("spectrum_p5_dirichlet", 0, "spectrum @F/p5.json --interior b,c,d --bc dirichlet"),
        case("spectrum_p5_two_thirds", 0, "spectrum @F/p5.json --interior b,c,d --scale 2/3"),
        case("spectrum_c4_checks", 0, "spectrum @F/c4.json --check --seed 3 --barta @F/c4_barta.csv"),
        case(
            "spectrum_grid_neumann",
            0,
            "spectrum @F/grid4x4.json --interior g11,g12,g21,g22 --bc neumann --potential @F/grid_potential.csv",
        ),
        case("minimax_octahedron", 0, "minimax @F/octahedron.json @F/octahedron_height.csv --from e1 --to -e1"),
        case(
            "heat_p3",
            0,
            "heat @F/p3.json @F/p3_heat.csv --interior b --T 1 --N 200 --trajectory @A/heat_p3.csv",
        ),
        case("heat_c4_coarse", 0, "heat @F/c4.json @F/c4_spike.csv --T 2 --dt 0.5 --potential const:0.5"),
        case(
            "transport_k2",
            0,
            "transport @F/k2.json @F/k2_field.csv @F/k2_start.csv --T 1 --dt 0.01 --trajectory @A/transport_k2.csv",
        ),
        case("dmf_p3", 0, "dmf @F/p3.json @F/p3_heat.csv --interior b --T 1 --N 4 --study 4,8,16,32,64"),
        case(
            "dmf_p5_linear",
            0,
            "dmf @F/p5.json @F/p5_bump.csv --interior b,c,d --T 1 --N 8 --potential linear:0,0.5 --trajectory @A/dmf_p5.csv",
        ),
        case("harmonic_p3", 0, "harmonic @F/p3.json --interior b --boundary @F/p3_boundary.csv"),
        case(
            "harmonic_grid",
            0,
            "harmonic @F/grid4x4.json --interior g11,g12,g21,g22 --boundary @F/grid_boundary.csv --tol 1e-10 --map @A/harmonic_grid.csv --ledger @A/harmonic_grid_ledger.csv",
        ),
        case("identities_c4_empty", 0, "identities @F/c4.json --seed 7 --trials 0"),
        case("monge_c4", 0, "monge @F/c4.json --from 1,2 --to 3,4"),
        case("error_unknown_subcommand", 1, "frobnicate @F/c4.json"),
        case("error_missing_file", 1, "cheeger @F/absent.json"),
        case("error_dangling_endpoint", 1, "graph @F/bad_dangling.json"),
        case("error_bad_number", 1, "minimax @F/p3.json @F/bad_number.csv --from a --to c"),
        case("error_bad_scale", 1, "spectrum @F/c4.json --scale 3"),
        case("error_indefinite_step", 2, "dmf @F/p3.json @F/p3_heat.csv --interior b --T 1 --N 1 --potential const:100"),
        case("error_unknown_bc", 1, "spectrum @F/c4.json --interior 1 --bc sideways"),
    ];
    for name in ["k2", "p3", "p5", "c4", "k4", "star3", "octahedron", "grid4x4"] {
        out.push(Case {
            name: leak(format!("cheeger_{name}")),
            ..case("", 0, &format!("cheeger @F/{name}.json"))
        });
    }
    for name in ["p3", "p5", "c4", "k4", "octahedron", "grid4x4"] {
        out.push(Case {
            name: leak(format!("identities_{name}")),
            ..case("", 0, &format!("identities @F/{name}.json --seed 7 --trials 200"))
        });
    }
    out
}

fn leak(s: String) -> &'static str {
    Box::leak(s.into_boxed_str())
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Run one case in-process with no GRAPHCALC_SCALE in effect.
pub fn run_case(c: &Case) -> Output {
    run_args(&c.args, None)
}

pub fn run_args(args: &[String], env_scale: Option<&str>) -> Output {
    fs::create_dir_all(ARTIFACTS).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = graphcalc_cli::run(args, env_scale, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn golden_dir() -> PathBuf {
    Path::new("tests/golden").to_path_buf()
}

/// The golden text for a case: its report, or its error JSON on failure.
pub fn primary_text(c: &Case, o: &Output) -> String {
    if c.exit == 0 {
        o.stdout.clone()
    } else {
        o.stderr.clone()
    }
}

pub fn golden_path(c: &Case) -> PathBuf {
    let suffix = if c.exit == 0 { "json" } else { "err.json" };
    golden_dir().join(format!("{}.{suffix}", c.name))
}

pub fn args(s: &str) -> Vec<String> {
    s.split_whitespace()
        .map(|a| match a.strip_prefix("@F/") {
            Some(f) => format!("{FIXTURES}/{f}"),
            None => a.to_string(),
        })
        .collect()
}

pub fn result_of(o: &Output) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stderr));
    v["result"].clone()
}
