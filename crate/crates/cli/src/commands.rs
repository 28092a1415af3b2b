use std::fs;
use std::io::Write;

use serde_json::{json, Value};
use slicecalc::calculus::{apply_calculus, independence_report, CalculusKind};
use slicecalc::funcspec::parse_function;
use slicecalc::identities::{self, applicable, run_battery, Backend, BatteryConfig, IdentityOutcome};
use slicecalc::operator::TupleDocument;
use slicecalc::projectors::{completeness_residual, diagnostics, riesz_projector, ProjectorPair};
use slicecalc::report;
use slicecalc::spectrum::{compactness, compare_with_oracle, f_spectrum, full_contour, oracle_spectrum, separated_groups};
use slicecalc::{Algebra, Contour, Error, ImaginaryUnit, OperatorTuple, Side};

use crate::{AlgebraArg, CalculusArg, Cli, Command, Failure, Output, RunArgs, SideArg, EXIT_NON_COMMUTING, EXIT_VERIFY};

/// Agreement tolerance between companion and scan spectra.
const ORACLE_TOL: f64 = 1e-6;

pub fn run(cli: &Cli) -> Result<u8, Failure> {
    let run = &cli.run;
    if run.nodes < 4 || run.nodes % 2 != 0 {
        return Err(Failure::usage("--nodes must be an even number ≥ 4"));
    }
    if !(run.margin > 0.0) {
        return Err(Failure::usage("--margin must be positive"));
    }
    match &cli.command {
        Command::Spectrum { oracle, oracle_grid } => spectrum(run, *oracle, *oracle_grid),
        Command::Apply {
            calculus,
            function,
            side,
            check_independence,
        } => apply(run, *calculus, function, *side, *check_independence),
        Command::Project { subset } => project(run, subset.as_deref()),
        Command::Verify {
            only,
            m_max,
            samples,
            list,
        } => verify(run, only.as_deref(), *m_max, *samples, *list),
    }
}

fn emit(run: &RunArgs, json: Value, text: String) -> Result<(), Failure> {
    let out = match run.output {
        Output::Json => serde_json::to_string_pretty(&report::normalize(json)).map_err(|e| Failure::usage(e.to_string()))? + "\n",
        Output::Text => text,
    };
    match std::io::stdout().lock().write_all(out.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::usage(format!("cannot write output: {e}"))),
        _ => Ok(()),
    }
}

fn envelope(run: &RunArgs, command: &str, args: Value, body: Value) -> Value {
    let mut config = serde_json::to_value(run).expect("config serializes");
    config["command_args"] = args;
    let mut out = json!({ "schema": report::SCHEMA, "command": command, "config": config });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

fn load_tuple(run: &RunArgs) -> Result<OperatorTuple, Failure> {
    let path = run
        .input
        .as_ref()
        .ok_or_else(|| Failure::usage("this command needs --input <file>"))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut doc: TupleDocument = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    if let Some(a) = run.algebra {
        let name = match a {
            AlgebraArg::Clifford => "clifford",
            AlgebraArg::Quaternion => "quaternion",
        };
        match &doc.algebra {
            Some(existing) if existing != name => {
                return Err(Failure::usage(format!("--algebra {name} conflicts with '{existing}' in the input")));
            }
            _ => doc.algebra = Some(name.to_string()),
        }
    }
    if let Some(n) = run.n {
        if n != doc.n {
            return Err(Failure::usage(format!("--n {n} conflicts with n = {} in the input", doc.n)));
        }
    }
    match doc.into_tuple() {
        Ok(t) => Ok(t.with_cond_threshold(run.cond_threshold)),
        Err(Error::NonCommuting { max_norm, pair, tol }) => {
            let body = json!({ "commutator": { "max_norm": max_norm, "pair": [pair.0, pair.1], "tol": tol, "pass": false } });
            let text = format!("commutator check failed: ‖[T{}, T{}]‖ = {max_norm:.3e} > {tol:.3e}\n", pair.0, pair.1);
            emit(run, envelope(run, "load", Value::Null, body), text)?;
            Err(Failure {
                code: EXIT_NON_COMMUTING,
                message: Error::NonCommuting { max_norm, pair, tol }.to_string(),
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn plane(run: &RunArgs, alg: Algebra) -> Result<ImaginaryUnit, Failure> {
    match &run.plane {
        None => Ok(ImaginaryUnit::basis(alg, 1)),
        Some(v) if v.len() != alg.units() => Err(Failure::usage(format!(
            "--plane needs {} components, got {}",
            alg.units(),
            v.len()
        ))),
        Some(v) => ImaginaryUnit::normalized(alg, v.clone()).map_err(Failure::from),
    }
}

fn describe_tuple(t: &OperatorTuple) -> Value {
    json!({ "algebra": t.algebra().to_string(), "units": t.algebra().units(), "d": t.d() })
}

fn contour_json(c: &Contour) -> Value {
    json!({
        "plane": c.plane.components(),
        "nodes_per_circle": c.nodes_per_circle,
        "margin": c.margin,
        "circles": c.circles.iter().map(|k| json!({ "center": k.center, "radius": k.radius })).collect::<Vec<_>>(),
    })
}

fn text_matrix(m: &slicecalc::nalgebra::DMatrix<f64>) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:>24.16e}", m[(i, j)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

fn spectrum(run: &RunArgs, oracle: bool, grid: usize) -> Result<u8, Failure> {
    if oracle && grid < 5 {
        return Err(Failure::usage("--oracle-grid must be at least 5"));
    }
    let t = load_tuple(run)?;
    let pl = plane(run, t.algebra())?;
    let spec = f_spectrum(&t);
    let commutator = t.validate_commuting();
    let (max_modulus, bound) = compactness(&t, &spec);
    let holds = max_modulus <= bound * (1.0 + 1e-12) + 1e-12;
    let mut text = format!(
        "F-spectrum of {} with d = {} (max relative commutator {:.3e})\n  {:>3}  {:>24}  {:>24}  {:>4}\n",
        t.algebra(),
        t.d(),
        commutator.max_norm,
        "#",
        "s0",
        "r",
        "mult"
    );
    for (i, e) in spec.spheres.iter().enumerate() {
        text += &format!("  {i:>3}  {:>24.16e}  {:>24.16e}  {:>4}\n", e.sphere.center, e.sphere.radius, e.multiplicity);
    }
    text += &format!(
        "compactness: max sqrt(s0^2 + r^2) = {max_modulus:.6e} <= sum of norms = {bound:.6e}: {}\n",
        if holds { "ok" } else { "VIOLATED" }
    );
    let mut body = json!({
        "input": describe_tuple(&t),
        "commutator": commutator,
        "spheres": spec.spheres,
        "compactness": { "max_modulus": max_modulus, "bound": bound, "holds": holds },
    });
    if oracle {
        let sigma_tol = 1e-6 * bound.max(1.0);
        let minima = oracle_spectrum(&t, &pl, grid, sigma_tol);
        let cmp = compare_with_oracle(&spec, &minima, ORACLE_TOL);
        text += &format!(
            "oracle: {} scan minima, max distance {:.3e} (tol {:.0e}): {}\n",
            cmp.oracle_points,
            cmp.max_distance,
            cmp.tol,
            if cmp.agree { "agree" } else { "DISAGREE" }
        );
        body["oracle"] = json!({ "comparison": cmp, "minima": minima, "sigma_tol": sigma_tol });
    }
    let args = json!({ "oracle": oracle, "oracle_grid": grid });
    emit(run, envelope(run, "spectrum", args, body), text)?;
    Ok(0)
}

fn to_side(side: SideArg) -> Side {
    match side {
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
    }
}

fn apply(run: &RunArgs, calculus: CalculusArg, function: &str, side: SideArg, independence: bool) -> Result<u8, Failure> {
    let t = load_tuple(run)?;
    let f = parse_function(function, t.algebra())?;
    let pl = plane(run, t.algebra())?;
    let kind = match calculus {
        CalculusArg::Sc => CalculusKind::Sc,
        CalculusArg::F => CalculusKind::F,
    };
    let side = to_side(side);
    let spec = f_spectrum(&t);
    let contour = full_contour(&spec, run.margin, &pl, run.nodes)?;
    let result = apply_calculus(kind, side, &f, &t, &contour)?;
    let mut body = json!({
        "input": describe_tuple(&t),
        "contour": contour_json(&contour),
        "error_estimate": result.error_estimate,
        "value": report::matrix(&result.value),
    });
    let mut text = format!(
        "{kind}-calculus ({side}) of '{function}' on {} with d = {}\ncontour: {} circle(s), {} nodes each; quadrature error estimate {:.3e}\n",
        t.algebra(),
        t.d(),
        contour.circles.len(),
        contour.nodes_per_circle,
        result.error_estimate
    );
    text += &text_matrix(&result.value);
    if independence {
        let contours = identities::independence_contours(&t, run.margin, run.nodes)?;
        let planes = identities::independence_planes(t.algebra());
        let rep = independence_report(kind, side, &f, &t, &contours, &planes)?;
        text += &format!(
            "independence: {} contour/plane combinations, max difference {:.3e}\n",
            rep.combinations, rep.max_difference
        );
        body["independence"] = serde_json::to_value(&rep).expect("report serializes");
    }
    let args = json!({ "calculus": calculus, "function": function, "side": side, "check_independence": independence });
    emit(run, envelope(run, "apply", args, body), text)?;
    Ok(0)
}

fn parse_subset(text: &str, len: usize) -> Result<Vec<usize>, Failure> {
    if text.trim() == "all" {
        return Ok((0..len).collect());
    }
    let mut out = Vec::new();
    for part in text.split(',') {
        let i: usize = part
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("'{}' is not a sphere index", part.trim())))?;
        if i >= len {
            return Err(Failure::usage(format!("sphere index {i} out of range (spectrum has {len} spheres)")));
        }
        if !out.contains(&i) {
            out.push(i);
        }
    }
    if out.is_empty() {
        return Err(Failure::usage("empty subset"));
    }
    out.sort();
    Ok(out)
}

fn project(run: &RunArgs, subset: Option<&str>) -> Result<u8, Failure> {
    let t = load_tuple(run)?;
    let pl = plane(run, t.algebra())?;
    let spec = f_spectrum(&t);
    let parts: Vec<Vec<usize>> = match subset {
        Some(s) => {
            let chosen = parse_subset(s, spec.len())?;
            let rest: Vec<usize> = (0..spec.len()).filter(|i| !chosen.contains(i)).collect();
            if rest.is_empty() {
                vec![chosen]
            } else {
                vec![chosen, rest]
            }
        }
        None => separated_groups(&spec, 2.0 * run.margin),
    };
    let pairs = parts
        .iter()
        .map(|p| riesz_projector(&t, &spec, p, run.margin, &pl, run.nodes))
        .collect::<Result<Vec<ProjectorPair>, Error>>()?;
    let completeness = completeness_residual(&t, &pairs)?;
    let mut text = format!("projectors for {} with d = {}\n", t.algebra(), t.d());
    let mut items = Vec::new();
    for pair in &pairs {
        let d = diagnostics(&t, pair);
        text += &format!(
            "spheres {:?}: idempotence {:.3e}, T P - T' {:.3e}, P T - T' {:.3e}, [T, P] {:.3e}\n",
            pair.subset, d.idempotence, d.left_intertwining, d.right_intertwining, d.commutator
        );
        items.push(json!({
            "subset": pair.subset,
            "contour": contour_json(&pair.contour),
            "diagnostics": d,
            "projector": report::matrix(&pair.p),
            "restricted": report::matrix(&pair.t),
        }));
    }
    text += &format!("sum of projectors - I: {completeness:.3e}\n");
    let body = json!({ "input": describe_tuple(&t), "spectrum": spec.spheres, "projectors": items, "completeness": completeness });
    let args = json!({ "subset": subset });
    emit(run, envelope(run, "project", args, body), text)?;
    Ok(0)
}

fn verify(run: &RunArgs, only: Option<&str>, m_max: i64, samples: usize, list: bool) -> Result<u8, Failure> {
    let dims = match run.n {
        None => vec![3, 5],
        Some(n @ (3 | 5)) => vec![n],
        Some(n) => return Err(Failure::usage(format!("the battery covers n = 3 and n = 5, not {n}"))),
    };
    if samples == 0 {
        return Err(Failure::usage("--samples must be positive"));
    }
    if m_max < 0 {
        return Err(Failure::usage("--m-max must be non-negative"));
    }
    let cfg = BatteryConfig {
        seed: run.seed,
        samples,
        nodes: run.nodes,
        margin: run.margin,
        m_max,
        clifford_dims: dims,
        timings: run.timings,
    };
    let backend = run.algebra.map(|a| match a {
        AlgebraArg::Clifford => Backend::Clifford,
        AlgebraArg::Quaternion => Backend::Quaternion,
    });
    let entries: Vec<_> = identities::select(only)?
        .into_iter()
        .filter(|e| backend.is_none_or(|b| e.backend == b) && applicable(e, &cfg))
        .collect();
    if entries.is_empty() {
        return Err(Failure::usage("no catalog entries match the selection"));
    }
    if list {
        let text: String = entries
            .iter()
            .map(|e| format!("{:<16} {:<10} tol {:.0e}  {}\n", e.id, if e.asserted { "asserted" } else { "logged" }, e.tolerance, e.statement))
            .collect();
        emit(run, envelope(run, "verify", json!({ "list": true }), json!({ "catalog": entries })), text)?;
        return Ok(0);
    }
    let outcomes = run_battery(&entries, &cfg);
    let failed = outcomes.iter().filter(|o| o.asserted && !o.pass).count();
    let text = verify_table(&outcomes, failed);
    let args = json!({ "only": only, "m_max": m_max, "samples": samples });
    let body = json!({ "results": outcomes, "failed": failed, "all_pass": failed == 0 });
    emit(run, envelope(run, "verify", args, body), text)?;
    Ok(if failed == 0 { 0 } else { EXIT_VERIFY })
}

fn verify_table(outcomes: &[IdentityOutcome], failed: usize) -> String {
    let mut text = String::new();
    for o in outcomes {
        let status = match (o.pass, o.asserted) {
            (true, true) => "pass",
            (false, true) => "FAIL",
            (true, false) => "info",
            (false, false) => "info*",
        };
        text += &format!("{:<16} {:<5} residual {:>10.3e}  tol {:.0e}  samples {}", o.id, status, o.residual, o.tolerance, o.samples);
        if let Some(ms) = o.runtime_ms {
            text += &format!(" {ms:>9.1} ms");
        }
        if let Some(e) = &o.error {
            text += &format!("  ({e})");
        }
        text.push('\n');
    }
    text += &format!("{} cases, {failed} failed\n", outcomes.len());
    text
}
