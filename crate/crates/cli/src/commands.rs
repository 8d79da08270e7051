use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context};
use negtype::affine::affine_independence;
use negtype::generators::GeneratorSpec;
use negtype::io::{point_set_to_json, read_matrix_csv, read_point_set, read_simplex, simplex_to_value, write_text, MatrixFile};
use negtype::measure::translate_to_zero_beta;
use negtype::negtype::{gap_sampler_crosscheck, RoundnessSource, SamplerConfig};
use negtype::numerics::format_rational;
use negtype::simplex::{alpha_beta_gap_identity, two_valued_gap_identity};
use negtype::{
    generalized_roundness, negative_type_check, powered_distance_matrix, simplex_gap, CheckOptions, DistanceMatrix,
    FunctionSet, RoundnessOptions, Simplex, ValueClass,
};
use num_traits::Zero;
use serde_json::{json, Map, Value};

pub const VERBOSITY_VAR: &str = "NEGTYPE_VERBOSITY";

/// How much of the computation a report carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verbosity {
    /// verdicts, eigenvalue extremes and the extremal vector
    Brief,
    /// adds boundary vectors and certificates
    Normal,
    /// adds the full reduced spectrum and the bisection trace
    Full,
}

impl Verbosity {
    pub fn from_env() -> anyhow::Result<Self> {
        match std::env::var(VERBOSITY_VAR).as_deref() {
            Err(_) | Ok("") | Ok("normal") => Ok(Verbosity::Normal),
            Ok("brief") => Ok(Verbosity::Brief),
            Ok("full") => Ok(Verbosity::Full),
            Ok(other) => bail!("{VERBOSITY_VAR} must be brief, normal or full, got {other:?}"),
        }
    }
}

enum Input {
    Points(Arc<FunctionSet>),
    Matrix(MatrixFile),
}

fn load(path: &Path) -> anyhow::Result<Input> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok(if is_csv {
        Input::Matrix(read_matrix_csv(path)?)
    } else {
        Input::Points(Arc::new(read_point_set(path)?))
    })
}

fn load_points(path: &Path, command: &str) -> anyhow::Result<Arc<FunctionSet>> {
    match load(path)? {
        Input::Points(set) => Ok(set),
        Input::Matrix(_) => bail!("{command} needs coordinates; pass a point-set JSON file instead of a distance matrix"),
    }
}

/// Prints `fields` with the common envelope and returns the exit code.
fn emit(command: &str, verdict: &str, code: u8, fields: Value) -> u8 {
    let mut report = Map::new();
    report.insert("command".into(), command.into());
    report.insert("verdict".into(), verdict.into());
    report.insert("exit_code".into(), code.into());
    if let Value::Object(rest) = fields {
        report.extend(rest);
    }
    let text = serde_json::to_string_pretty(&Value::Object(report)).expect("reports serialize");
    say(&format!("{text}\n"));
    code
}

/// Writes to stdout, ignoring a closed pipe (`negtype ... | head`).
fn say(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn quadratic_form(m: &DistanceMatrix, zeta: &[f64]) -> f64 {
    let n = m.order();
    (0..n)
        .map(|i| (0..n).map(|j| m.get_f64(i, j) * zeta[i] * zeta[j]).sum::<f64>())
        .sum()
}

fn labeled_rationals(set: &FunctionSet, coefficients: &[negtype::Rational]) -> Value {
    coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| json!({ "point": set.labels()[i], "coefficient": format_rational(c) }))
        .collect()
}

pub fn check(input: &Path, p: f64, strict: bool, as_json: bool, verbosity: Verbosity) -> anyhow::Result<u8> {
    let loaded = load(input)?;
    let m = match &loaded {
        Input::Points(set) => powered_distance_matrix(set, p)?,
        Input::Matrix(file) => file.powered_at(p)?,
    };
    let v = negative_type_check(&m, &CheckOptions { strict, ..Default::default() })?;
    let ok = if strict { v.strict } else { v.holds };
    let code = u8::from(!ok);

    // a failed strict check on coordinates is explained by an affine dependency
    let mut witness = Value::Null;
    let mut extremal = v.extremal_vector.clone().map(|z| (z, "eigen"));
    if let (Input::Points(set), true, true) = (&loaded, strict && !v.strict, v.holds) {
        let cert = affine_independence(set)?;
        if let (Some(lambda), Some(w)) = (&cert.dependency, &cert.witness) {
            let gap = simplex_gap(w, p, &m)?;
            let zeta: Vec<f64> = lambda.iter().map(negtype::numerics::rational::to_f64).collect();
            if gap.is_zero_within(v.tolerance) {
                extremal = Some((zeta, "affine_witness"));
            }
            witness = json!({
                "dependency": labeled_rationals(set, lambda),
                "simplex": simplex_to_value(w),
                "gap": gap,
            });
        }
    }
    if extremal.is_none() && strict && !v.strict {
        extremal = v.boundary_vector.clone().map(|z| (z, "eigen_boundary"));
    }
    let extremal_value = extremal.as_ref().map(|(z, _)| quadratic_form(&m, z));

    if !as_json {
        let kind = if strict { "strict " } else { "" };
        let status = if ok { "holds" } else { "fails" };
        let mut text = format!("{}: {kind}{p}-negative type {status}\n", input.display());
        text += &format!("  points: {}\n", m.order());
        text += &format!(
            "  reduced eigenvalues: min {:.6e}, max {:.6e} (tolerance {:.1e})\n",
            v.min_reduced_eigenvalue, v.max_reduced_eigenvalue, v.tolerance
        );
        if let Some((z, source)) = &extremal {
            let entries: Vec<String> = m.labels().iter().zip(z).map(|(l, x)| format!("{l}: {x:.6}")).collect();
            text += &format!("  extremal vector ({source}): {}\n", entries.join(", "));
            text += &format!("  quadratic form: {:.6e}\n", extremal_value.unwrap_or(0.0));
        }
        say(&text);
        return Ok(code);
    }

    let mut fields = json!({
        "input": input.display().to_string(),
        "p": p,
        "strict_requested": strict,
        "holds": v.holds,
        "strict": v.strict,
        "points": m.order(),
        "labels": m.labels(),
        "tolerance": v.tolerance,
        "min_reduced_eigenvalue": v.min_reduced_eigenvalue,
        "max_reduced_eigenvalue": v.max_reduced_eigenvalue,
        "extremal_vector": extremal.as_ref().map(|(z, _)| z),
        "extremal_source": extremal.as_ref().map(|(_, s)| s),
        "extremal_value": extremal_value,
    });
    if verbosity >= Verbosity::Normal {
        fields["boundary_vector"] = json!(v.boundary_vector);
        fields["affine_witness"] = witness;
    }
    if verbosity >= Verbosity::Full {
        fields["reduced_eigenvalues"] = json!(v.reduced_eigenvalues);
    }
    Ok(emit("check", if ok { "holds" } else { "fails" }, code, fields))
}

pub fn roundness(input: &Path, tol: f64, cap: f64, p: f64, verbosity: Verbosity) -> anyhow::Result<u8> {
    let opts = RoundnessOptions { tolerance: tol, cap, ..Default::default() };
    let loaded = load(input)?;
    let (result, construction) = match &loaded {
        Input::Points(set) => {
            let r = generalized_roundness(&RoundnessSource::Coordinates { set, metric_p: p }, &opts)?;
            (r, Some(p))
        }
        Input::Matrix(file) => {
            if let Some(d) = file.unpowered()? {
                (generalized_roundness(&RoundnessSource::Unpowered(&d), &opts)?, None)
            } else {
                let q = file.sidecar.as_ref().and_then(|s| s.p).unwrap_or(1.0);
                let m = file.powered_at(q)?;
                if !m.is_p_independent() {
                    bail!(
                        "{}: roundness needs coordinates or plain distances, but this matrix holds powered \
                         distances; pass the point-set JSON, or a CSV whose sidecar says {{\"powered\": false}}",
                        input.display()
                    );
                }
                (generalized_roundness(&RoundnessSource::Powered(&m), &opts)?, None)
            }
        }
    };
    let summary = if result.exceeded_cap {
        format!("exceeds cap {}", result.cap)
    } else if result.below_floor {
        format!("below floor {}", result.upper)
    } else {
        format!("[{}, {}]", result.lower, result.upper)
    };
    let mut fields = json!({
        "input": input.display().to_string(),
        "construction_exponent": construction,
        "tolerance": tol,
        "cap": result.cap,
        "lower": result.lower,
        "upper": finite_or_null(result.upper),
        "width": finite_or_null(result.width()),
        "exceeded_cap": result.exceeded_cap,
        "below_floor": result.below_floor,
        "probes": result.trace.len(),
        "monotone": result.is_monotone(),
        "summary": summary,
    });
    if verbosity >= Verbosity::Full {
        fields["trace"] = json!(result.trace);
    }
    Ok(emit("roundness", "computed", 0, fields))
}

fn translated(d: &Simplex) -> anyhow::Result<Simplex> {
    let set = translate_to_zero_beta(d.points())?;
    Ok(Simplex::new(Arc::new(set), d.left().to_vec(), d.right().to_vec())?)
}

pub fn gap(path: &Path, p: f64, exact: bool) -> anyhow::Result<u8> {
    let d = read_simplex(path)?;
    let m = powered_distance_matrix(d.points(), p)?;
    let g = simplex_gap(&d, p, &m)?;
    let mut fields = json!({
        "simplex": path.display().to_string(),
        "p": p,
        "gap": g,
        "gap_is_exact": g.is_exact(),
        "value_class": d.points().value_class().to_string(),
        "total_weight": format_rational(&d.total_weight()),
        "balanced": d.is_balanced(),
        "degenerate": d.is_degenerate(),
        "virtually_degenerate": d.is_virtually_degenerate(),
    });
    if !exact {
        return Ok(emit("gap", "computed", 0, fields));
    }
    let identity = match d.points().value_class() {
        ValueClass::TwoValued => {
            let id = two_valued_gap_identity(&d, p)?;
            json!({
                "gap": format_rational(&id.gap),
                "rhs": format_rational(&id.l2),
                "comparison": "exact",
                "translated": false,
                "equal": id.equal,
            })
        }
        ValueClass::AlphaBeta { alpha, .. } => {
            let shifted = !alpha.is_zero();
            let d = if shifted { translated(&d)? } else { d.clone() };
            let id = alpha_beta_gap_identity(&d, p)?;
            let exact_both = id.gap.is_exact() && id.scaled_l2.is_exact();
            json!({
                "gap": id.gap,
                "rhs": id.scaled_l2,
                "comparison": if exact_both { "exact" } else { "relative" },
                "translated": shifted,
                "equal": id.equal,
            })
        }
        ValueClass::General => bail!(
            "{}: --exact needs a {{0, beta}}- or {{alpha, beta}}-valued point set, found a general one",
            path.display()
        ),
    };
    let equal = identity["equal"].as_bool().unwrap_or(false);
    fields["identity"] = identity;
    let (verdict, code) = if equal { ("identity_holds", 0) } else { ("identity_fails", 1) };
    Ok(emit("gap", verdict, code, fields))
}

pub fn affine(input: &Path) -> anyhow::Result<u8> {
    let set = load_points(input, "affine")?;
    let cert = affine_independence(&set)?;
    let independent = cert.is_independent();
    let fields = json!({
        "input": input.display().to_string(),
        "points": set.len(),
        "atoms": set.atoms(),
        "value_class": set.value_class().to_string(),
        "rank": cert.rank,
        "dependency": cert.dependency.as_ref().map(|l| labeled_rationals(&set, l)),
        "witness": cert.witness.as_ref().map(simplex_to_value),
    });
    let (verdict, code) = if independent { ("independent", 0) } else { ("dependent", 1) };
    Ok(emit("affine", verdict, code, fields))
}

pub fn gen(spec: &GeneratorSpec, out: Option<&Path>) -> anyhow::Result<u8> {
    let set = spec.build()?;
    let text = point_set_to_json(&set);
    let Some(out) = out else {
        say(&text);
        return Ok(0);
    };
    write_text(out, &text)?;
    let fields = json!({
        "generator": spec,
        "points": set.len(),
        "atoms": set.atoms(),
        "out": out.display().to_string(),
    });
    Ok(emit("gen", "written", 0, fields))
}

pub fn crosscheck(input: &Path, p: f64, trials: usize, seed: u64) -> anyhow::Result<u8> {
    let set = load_points(input, "crosscheck")?;
    let report = gap_sampler_crosscheck(&set, p, &SamplerConfig::new(trials, seed))?;
    let consistent = report.consistent();
    let mut fields = serde_json::to_value(&report).context("serializing the crosscheck report")?;
    fields["input"] = input.display().to_string().into();
    let (verdict, code) = if consistent { ("consistent", 0) } else { ("inconsistent", 1) };
    Ok(emit("crosscheck", verdict, code, fields))
}
