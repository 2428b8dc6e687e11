use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use curvlab::bakry_emery::{
    be_curvatures, be_nonnegative, counterexample_search, default_catalog, BakryEmeryError, LocalForms,
};
use curvlab::graph::{generate, load_graph_file, to_json_string, Family, GraphError, LoadOptions, Weighting};
use curvlab::ollivier::{
    curvature_primal, curvature_sweep, long_range_mass, plan_to_json, CurvatureError, Method, PairSelector,
};
use curvlab::spectral_heat::{
    curvature_infimum, hypothesis_check, load_function, random_lipschitz_samples, ConcentrationChecker, DecayChecker,
    HeatError, HeatKernel, VertexFunction,
};
use curvlab::{Mode, Rational, Scalar, Vertex, WeightedGraph};

use crate::output::{csv_text, emit, json_text, num, opt_num};
use crate::{Common, Format, Samples};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) | CliError::Input(_) => 2,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CurvatureError> for CliError {
    fn from(e: CurvatureError) -> Self {
        match e {
            CurvatureError::SurgeryInvariant(_) => CliError::Failure(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<HeatError> for CliError {
    fn from(e: HeatError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BakryEmeryError> for CliError {
    fn from(e: BakryEmeryError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn load(path: &Path) -> Result<WeightedGraph, CliError> {
    load_graph_file(path, LoadOptions::default()).map_err(|e| match e {
        GraphError::Io(io) => CliError::io(path, io),
        other => CliError::Input(format!("{}: {other}", path.display())),
    })
}

fn parse_pair(g: &WeightedGraph, text: &str) -> Result<(Vertex, Vertex), CliError> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("pair must look like x,y, got {text:?}")))?;
    Ok((g.vertex(a.trim())?, g.vertex(b.trim())?))
}

fn parse_selector(g: &WeightedGraph, text: &str) -> Result<PairSelector, CliError> {
    match text.trim() {
        "edges" => Ok(PairSelector::Edges),
        "all" => Ok(PairSelector::AllPairs),
        list => {
            let pairs = list
                .split(|c: char| c == ';' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|p| parse_pair(g, p))
                .collect::<Result<Vec<_>, _>>()?;
            if pairs.is_empty() {
                return Err(CliError::Usage("empty pair list".into()));
            }
            Ok(PairSelector::List(pairs))
        }
    }
}

fn exact_or_null<T: Scalar>(v: &T) -> Value {
    if T::EXACT {
        json!(v.to_string())
    } else {
        Value::Null
    }
}

// ---------------------------------------------------------------- curvature

pub fn curvature(graph: &Path, pairs: &str, method: Method, format: Format, common: &Common) -> Result<bool, CliError> {
    let g = load(graph)?;
    let selector = parse_selector(&g, pairs)?;
    match common.mode {
        Mode::Float => curvature_impl::<f64>(&g, &selector, method, format, common),
        Mode::Exact => curvature_impl::<Rational>(&g, &selector, method, format, common),
    }
}

fn curvature_impl<T: Scalar>(
    g: &WeightedGraph,
    selector: &PairSelector,
    method: Method,
    format: Format,
    common: &Common,
) -> Result<bool, CliError> {
    let entries = curvature_sweep::<T>(g, selector, method);
    let gap_tolerance = if T::EXACT { 0.0 } else { 1e-7 };
    let mut ok = true;
    let mut csv_rows = Vec::new();
    let mut json_rows = Vec::new();
    for entry in &entries {
        let pair = format!("{},{}", g.id(entry.x0), g.id(entry.y0));
        match &entry.result {
            Ok(report) => {
                let primal = report.primal.as_ref().map(|p| &p.kappa);
                let dual = report.dual.as_ref().map(|d| &d.kappa);
                let gap = report.duality_gap();
                if let Some(gap) = &gap {
                    let bad = if T::EXACT { !gap.is_exact_zero() } else { gap.to_f64() > gap_tolerance };
                    if bad {
                        eprintln!("duality gap {gap} at pair {pair}");
                        ok = false;
                    }
                }
                csv_rows.push(vec![
                    pair,
                    report.distance.to_string(),
                    opt_num(primal.map(Scalar::to_f64)),
                    opt_num(dual.map(Scalar::to_f64)),
                    opt_num(gap.as_ref().map(Scalar::to_f64)),
                ]);
                let mut row = json!({
                    "pair": [g.id(entry.x0), g.id(entry.y0)],
                    "d": report.distance,
                    "kappa_primal": primal.map(Scalar::to_f64),
                    "kappa_dual": dual.map(Scalar::to_f64),
                    "gap": gap.as_ref().map(Scalar::to_f64),
                });
                if T::EXACT {
                    row["kappa_primal_exact"] = primal.map(exact_or_null).unwrap_or(Value::Null);
                    row["kappa_dual_exact"] = dual.map(exact_or_null).unwrap_or(Value::Null);
                }
                json_rows.push(row);
            }
            Err(e) => {
                eprintln!("pair {pair}: {e}");
                ok = false;
                csv_rows.push(vec![pair, String::new(), String::new(), String::new(), String::new()]);
                json_rows.push(json!({
                    "pair": [g.id(entry.x0), g.id(entry.y0)],
                    "error": e.to_string(),
                }));
            }
        }
    }
    let text = match format {
        Format::Csv => csv_text(&["pair", "d", "kappa_primal", "kappa_dual", "gap"], &csv_rows),
        Format::Json => json_text(&json!({
            "mode": if T::EXACT { "exact" } else { "float" },
            "rows": json_rows,
        })),
    };
    emit(common.out.as_deref(), &text)?;
    Ok(ok)
}

// ---------------------------------------------------------------- plans

pub fn plan(graph: &Path, pair: &str, common: &Common) -> Result<bool, CliError> {
    let g = load(graph)?;
    let (x0, y0) = parse_pair(&g, pair)?;
    let value = match common.mode {
        Mode::Float => plan_json::<f64>(&g, x0, y0)?,
        Mode::Exact => plan_json::<Rational>(&g, x0, y0)?,
    };
    emit(common.out.as_deref(), &json_text(&value))?;
    Ok(true)
}

fn plan_json<T: Scalar>(g: &WeightedGraph, x0: Vertex, y0: Vertex) -> Result<Value, CliError> {
    let (kappa, plan) = curvature_primal::<T>(g, x0, y0)?;
    let mut value = plan_to_json(g, &plan)?;
    value["kappa"] = json!(kappa.to_f64());
    if T::EXACT {
        value["kappa_exact"] = json!(kappa.to_string());
    }
    Ok(value)
}

pub fn surgery(graph: &Path, pair: &str, xprime: Option<&str>, common: &Common) -> Result<bool, CliError> {
    let g = load(graph)?;
    let (x0, y0) = parse_pair(&g, pair)?;
    let xprime = xprime.map(|id| g.vertex(id)).transpose()?;
    let (value, holds) = match common.mode {
        Mode::Float => surgery_json::<f64>(&g, x0, y0, xprime)?,
        Mode::Exact => surgery_json::<Rational>(&g, x0, y0, xprime)?,
    };
    emit(common.out.as_deref(), &json_text(&value))?;
    if !holds {
        eprintln!("long-range mass is below (q_min - ε)/2");
    }
    Ok(holds)
}

fn surgery_json<T: Scalar>(
    g: &WeightedGraph,
    x0: Vertex,
    y0: Vertex,
    xprime: Option<Vertex>,
) -> Result<(Value, bool), CliError> {
    let res = long_range_mass::<T>(g, x0, y0, xprime)?;
    let (_, before) = curvature_primal::<T>(g, x0, y0)?;
    let scalar = |v: &T| {
        if T::EXACT {
            json!({"value": v.to_f64(), "exact": v.to_string()})
        } else {
            json!(v.to_f64())
        }
    };
    let changes: Vec<Value> = res
        .surgery
        .cost_changes
        .iter()
        .map(|(x, y, c)| json!({"x": g.id(*x), "y": g.id(*y), "cost_change": scalar(c)}))
        .collect();
    let value = json!({
        "pair": [g.id(x0), g.id(y0)],
        "d": g.distance(x0, y0),
        "x_prime": g.id(res.surgery.x_prime),
        "kappa": scalar(&res.kappa),
        "epsilon": scalar(&res.epsilon),
        "q_min": scalar(&res.q_min),
        "value_before": scalar(&res.surgery.value_before),
        "value_after": scalar(&res.surgery.value_after),
        "mass_beyond": scalar(&res.mass_beyond),
        "bound": scalar(&res.bound),
        "holds": res.holds,
        "plan_before": plan_to_json(g, &before)?,
        "plan_after": plan_to_json(g, &res.surgery.plan)?,
        "cost_changes": changes,
    });
    Ok((value, res.holds))
}

// ---------------------------------------------------------------- Bakry-Emery

pub fn bakry_emery(graph: &Path, format: Format, dump_forms: bool, out: Option<&Path>) -> Result<bool, CliError> {
    let g = load(graph)?;
    let values = be_curvatures(&g)?;
    let text = match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = g.vertices().map(|x| vec![g.id(x).to_string(), num(values[x])]).collect();
            csv_text(&["vertex", "be_curvature"], &rows)
        }
        Format::Json => {
            let rows = g
                .vertices()
                .map(|x| {
                    let mut row = json!({
                        "vertex": g.id(x),
                        "be_curvature": values[x],
                        "nonnegative": be_nonnegative(&g, x)?,
                    });
                    if dump_forms {
                        row["forms"] = match LocalForms::<Rational>::new(&g, x) {
                            Ok(forms) => forms.to_json(&g),
                            Err(_) => LocalForms::<f64>::new(&g, x)?.to_json(&g),
                        };
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            json_text(&json!({ "vertices": rows }))
        }
    };
    emit(out, &text)?;
    Ok(true)
}

pub fn no_implication(max_vertices: usize, out: Option<&Path>) -> Result<bool, CliError> {
    if !(2..=7).contains(&max_vertices) {
        return Err(CliError::Usage(format!(
            "--max-vertices must be between 2 and 7, got {max_vertices}"
        )));
    }
    let catalog = default_catalog(max_vertices)?;
    let outcome = counterexample_search(&catalog)?;
    let report = json_text(&outcome.to_json());
    match out {
        None => emit(None, &report)?,
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            emit(Some(&dir.join("report.json")), &report)?;
            let witnesses = [
                ("be-negative.graph.json", &outcome.be_negative_kappa_nonnegative),
                ("kappa-negative.graph.json", &outcome.kappa_negative_be_nonnegative),
            ];
            for (name, witness) in witnesses {
                if let Some(w) = witness {
                    emit(Some(&dir.join(name)), &to_json_string(&w.graph))?;
                }
            }
        }
    }
    if outcome.exhausted() {
        eprintln!("search exhausted {} graphs without finding both witnesses", outcome.examined);
    }
    Ok(true)
}

// ---------------------------------------------------------------- heat

fn functions(g: &WeightedGraph, samples: &Samples, default_count: usize, centered: bool) -> Result<Vec<VertexFunction>, CliError> {
    match &samples.function {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
            let f = load_function(g, std::io::BufReader::new(file))?;
            if !f.is_total() {
                let missing = g.vertices().find(|&v| f.get(v).is_none()).unwrap_or(0);
                return Err(CliError::Input(format!(
                    "{}: no value for vertex {}",
                    path.display(),
                    g.id(missing)
                )));
            }
            Ok(vec![f])
        }
        None => Ok(random_lipschitz_samples(
            g,
            samples.seed,
            samples.count.unwrap_or(default_count),
            centered,
        )?),
    }
}

fn parse_k(g: &WeightedGraph, k: &str) -> Result<f64, CliError> {
    if k == "auto" {
        return Ok(curvature_infimum(g)?.kappa);
    }
    k.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("--K must be auto or a number, got {k:?}")))
}

pub fn heat(graph: &Path, samples: &Samples, t_grid: &[f64], out: Option<&Path>) -> Result<bool, CliError> {
    let g = load(graph)?;
    let kernel = HeatKernel::new(&g)?;
    let fs = functions(&g, samples, 1, false)?;
    let mean = |v: &[f64]| -> f64 { g.vertices().map(|x| g.measure(x) * v[x]).sum() };
    let results: Vec<(Value, bool)> = fs
        .par_iter()
        .map(|f| {
            let base = f.values_or_err()?;
            let lo = base.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = base.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut ok = true;
            let mut states = Vec::new();
            for &t in t_grid {
                let v = kernel.evolve(&base, t)?;
                let in_range = v.iter().all(|&x| x >= lo - 1e-12 && x <= hi + 1e-12);
                let conserved = (mean(&v) - mean(&base)).abs() <= 1e-10;
                ok &= in_range && conserved;
                states.push(json!({
                    "t": t,
                    "values": v,
                    "mean": mean(&v),
                    "maximum_principle": in_range,
                    "mean_conserved": conserved,
                }));
            }
            Ok((json!({"function": base, "states": states}), ok))
        })
        .collect::<Result<_, CliError>>()?;
    let pass = results.iter().all(|(_, ok)| *ok);
    let report = json!({
        "ids": g.ids(),
        "t_grid": t_grid,
        "samples": results.into_iter().map(|(v, _)| v).collect::<Vec<_>>(),
        "pass": pass,
    });
    emit(out, &json_text(&report))?;
    Ok(pass)
}

#[allow(clippy::too_many_arguments)]
pub fn decay(
    graph: &Path,
    samples: &Samples,
    k: &str,
    t_grid: &[f64],
    format: Format,
    plot: Option<&Path>,
    out: Option<&Path>,
) -> Result<bool, CliError> {
    let g = load(graph)?;
    let k = parse_k(&g, k)?;
    let checker = DecayChecker::new(&g, k)?;
    let fs = functions(&g, samples, 50, false)?;
    let tables = fs
        .par_iter()
        .map(|f| checker.check(f, t_grid))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = tables.iter().flatten().all(|r| r.pass);

    let text = match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = tables
                .iter()
                .enumerate()
                .flat_map(|(i, table)| {
                    table
                        .iter()
                        .map(move |r| vec![i.to_string(), num(r.t), num(r.ratio), num(r.bound), r.pass.to_string()])
                })
                .collect();
            csv_text(&["sample", "t", "ratio", "bound", "pass"], &rows)
        }
        Format::Json => json_text(&json!({
            "K": k,
            "curvature_infimum": checker.infimum().kappa,
            "infimum_pair": [g.id(checker.infimum().pair.0), g.id(checker.infimum().pair.1)],
            "samples": tables.iter().map(|table| table.iter().map(|r| json!({
                "t": r.t, "ratio": r.ratio, "bound": r.bound, "pass": r.pass,
            })).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "pass": pass,
        })),
    };
    emit(out, &text)?;
    if let Some(path) = plot {
        let mut data = String::new();
        for (j, &t) in t_grid.iter().enumerate() {
            let worst = tables.iter().map(|table| table[j].ratio).fold(0.0, f64::max);
            let _ = writeln!(data, "{} {}", num(t), num(worst));
        }
        emit(Some(path), &data)?;
    }
    Ok(pass)
}

#[allow(clippy::too_many_arguments)]
pub fn concentration(
    graph: &Path,
    samples: &Samples,
    k: &str,
    r_grid: &[f64],
    format: Format,
    plot: Option<&Path>,
    out: Option<&Path>,
) -> Result<bool, CliError> {
    let g = load(graph)?;
    let k = parse_k(&g, k)?;
    let checker = ConcentrationChecker::new(&g, k)?;
    let fs = functions(&g, samples, 100, true)?;
    let reports = fs
        .par_iter()
        .map(|f| r_grid.iter().map(|&r| checker.check(f, r)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let pass = reports.iter().flatten().all(|r| r.pass());

    let text = match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .enumerate()
                .flat_map(|(i, list)| {
                    list.iter().map(move |r| {
                        vec![
                            i.to_string(),
                            num(r.r),
                            num(r.lambda),
                            num(r.tail_mass),
                            num(r.tail_bound),
                            num(r.laplace_value),
                            num(r.laplace_bound),
                            num(r.chernoff_value),
                            r.pass_tail.to_string(),
                            r.pass_laplace.to_string(),
                            r.pass_chain.to_string(),
                        ]
                    })
                })
                .collect();
            csv_text(
                &[
                    "sample",
                    "r",
                    "lambda",
                    "tail_mass",
                    "tail_bound",
                    "laplace_value",
                    "laplace_bound",
                    "chernoff_value",
                    "pass_tail",
                    "pass_laplace",
                    "pass_chain",
                ],
                &rows,
            )
        }
        Format::Json => {
            let comparison = if k <= 1.0 {
                json!({
                    "applies": true,
                    "holds": k >= k * k,
                    "reason": "K r^2 >= K^2 r^2 for every r because 0 < K <= 1, so e^{-K r^2} <= e^{-K^2 r^2}",
                })
            } else {
                json!({"applies": false, "holds": Value::Null, "reason": "K > 1"})
            };
            json_text(&json!({
                "K": k,
                "curvature_infimum": checker.infimum(),
                "old_bound_comparison": comparison,
                "samples": reports,
                "pass": pass,
            }))
        }
    };
    emit(out, &text)?;
    if let Some(path) = plot {
        let mut data = String::new();
        for (j, &r) in r_grid.iter().enumerate() {
            let worst = reports.iter().map(|list| list[j].tail_mass).fold(0.0, f64::max);
            let _ = writeln!(data, "{} {}", num(r), num(worst));
        }
        emit(Some(path), &data)?;
    }
    Ok(pass)
}

// ---------------------------------------------------------------- graphs

pub fn gen(family: &str, weighting: &str, out: Option<&Path>) -> Result<bool, CliError> {
    let family: Family = family.parse().map_err(|e: GraphError| CliError::Usage(e.to_string()))?;
    let weighting: Weighting = weighting.parse().map_err(|e: GraphError| CliError::Usage(e.to_string()))?;
    let g = generate(&family, weighting).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(out, &to_json_string(&g))?;
    Ok(true)
}

fn read_csv(path: &Path) -> Result<Vec<csv::StringRecord>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    reader
        .records()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn dot_id(id: &str) -> String {
    format!("\"{}\"", id.replace('"', "\\\""))
}

pub fn export_dot(graph: &Path, curvature: Option<&Path>, be: Option<&Path>, out: Option<&Path>) -> Result<bool, CliError> {
    let g = load(graph)?;
    let mut edge_labels: Vec<Option<String>> = vec![None; 0];
    let edges: Vec<(Vertex, Vertex)> = g.edges().map(|(u, v, _)| (u, v)).collect();
    edge_labels.resize(edges.len(), None);
    match curvature {
        Some(path) => {
            for rec in read_csv(path)? {
                let (Some(pair), Some(primal)) = (rec.get(0), rec.get(2)) else { continue };
                let value = if primal.is_empty() { rec.get(3).unwrap_or("") } else { primal };
                if value.is_empty() {
                    continue;
                }
                let (u, v) = parse_pair(&g, pair)?;
                let (u, v) = (u.min(v), u.max(v));
                if let Some(i) = edges.iter().position(|&e| e == (u, v)) {
                    edge_labels[i] = Some(value.to_string());
                }
            }
        }
        None => {
            for (i, entry) in curvature_sweep::<f64>(&g, &PairSelector::Edges, Method::Primal).iter().enumerate() {
                if let Ok(report) = &entry.result {
                    edge_labels[i] = Some(num(*report.kappa()));
                }
            }
        }
    }
    let vertex_labels: Vec<Option<String>> = match be {
        Some(path) => {
            let mut labels = vec![None; g.num_vertices()];
            for rec in read_csv(path)? {
                let (Some(id), Some(value)) = (rec.get(0), rec.get(1)) else { continue };
                labels[g.vertex(id)?] = Some(value.to_string());
            }
            labels
        }
        None => g
            .vertices()
            .map(|x| curvlab::bakry_emery::be_curvature(&g, x).ok().map(num))
            .collect(),
    };

    let mut dot = String::from("graph curvature {\n");
    for x in g.vertices() {
        let label = match &vertex_labels[x] {
            Some(v) => format!("{}\\nBE={v}", g.id(x)),
            None => g.id(x).to_string(),
        };
        let _ = writeln!(dot, "  {} [label={}];", dot_id(g.id(x)), dot_id(&label));
    }
    for (i, &(u, v)) in edges.iter().enumerate() {
        match &edge_labels[i] {
            Some(k) => {
                let _ = writeln!(dot, "  {} -- {} [label={}];", dot_id(g.id(u)), dot_id(g.id(v)), dot_id(k));
            }
            None => {
                let _ = writeln!(dot, "  {} -- {};", dot_id(g.id(u)), dot_id(g.id(v)));
            }
        }
    }
    dot.push_str("}\n");
    emit(out, &dot)?;
    Ok(true)
}

pub fn check_hypotheses(graph: &Path, out: Option<&Path>) -> Result<bool, CliError> {
    let g = load(graph)?;
    let report = hypothesis_check(&g);
    let mut value = serde_json::to_value(&report).expect("report serializes");
    value["min_pair"] = match report.min_pair {
        Some((x, y)) => json!([g.id(x), g.id(y)]),
        None => Value::Null,
    };
    emit(out, &json_text(&value))?;
    Ok(true)
}
