use std::collections::HashSet;
use std::path::Path;

use margulis_core::currents::CurrentFile;
use margulis_core::{
    build_halfspaces, cone_report, conj_class, convergence_report, cross_section,
    enumerate_classes, opposite_sign_certificate, psi, quadrature_check, zero_current, ConeStatus,
    DeformationSpace, SchottkyGroup, Word,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::{write_atomic, Cache};
use crate::input::{build_group, load_cocycle, load_group_file, parse_json, preset, GroupFile};
use crate::{CliError, GroupArgs, OutArgs};

pub const EVEN_R_NOTE: &str = "even r: no proper actions in this dimension";
pub const RADIANT_NOTE: &str = "radiant (α ≡ 0)";
/// Largest word length accepted on the command line.
pub const MAX_L: usize = 12;

fn load(args: &GroupArgs) -> Result<(SchottkyGroup, usize), CliError> {
    let (group, file_r) = match (&args.group, &args.preset) {
        (Some(path), _) => {
            let file: GroupFile = load_group_file(path)?;
            let r = file.r;
            (build_group(file)?, r)
        }
        (None, Some(name)) => {
            let params = match &args.params {
                Some(text) => Some(parse_json::<Value>(text, "--params")?),
                None => None,
            };
            (preset(name, params)?, None)
        }
        (None, None) => {
            return Err(CliError::Parse(
                "one of --group or --preset is required".into(),
            ))
        }
    };
    let r = args.r.or(file_r).unwrap_or(1);
    if r == 0 {
        return Err(CliError::Parse("r must be at least 1".into()));
    }
    Ok((group, r))
}

fn space(args: &GroupArgs) -> Result<(DeformationSpace, Vec<String>), CliError> {
    let (group, r) = load(args)?;
    let mut notes = Vec::new();
    if r % 2 == 0 {
        eprintln!("note: {EVEN_R_NOTE}");
        notes.push(EVEN_R_NOTE.to_string());
    }
    Ok((DeformationSpace::new(group, r)?, notes))
}

fn check_len(max_len: usize) -> Result<(), CliError> {
    if !(1..=MAX_L).contains(&max_len) {
        return Err(CliError::Parse(format!(
            "--L must be in 1..={MAX_L}, got {max_len}"
        )));
    }
    Ok(())
}

fn emit(out: &OutArgs, text: &str) -> Result<(), CliError> {
    match &out.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: &OutArgs, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    emit(out, &text)
}

pub fn group(args: &GroupArgs, out: &OutArgs) -> Result<u8, CliError> {
    let (g, r) = load(args)?;
    let lengths = g
        .generators()
        .iter()
        .map(|m| m.translation_length())
        .collect::<Result<Vec<_>, _>>()?;
    let mut boundary = Vec::new();
    for w in g.boundary_words() {
        boundary.push(json!({ "word": w, "ell": g.element(w)?.translation_length()? }));
    }
    let mut notes = Vec::new();
    if r % 2 == 0 {
        eprintln!("note: {EVEN_R_NOTE}");
        notes.push(EVEN_R_NOTE);
    }
    emit_json(
        out,
        &json!({
            "certified": true,
            "name": g.name(),
            "rank": g.rank(),
            "r": r,
            "generators": g.generators(),
            "translation_lengths": lengths,
            "boundary": boundary,
            "margin": g.margin(),
            "arc_gap": g.arc_gap(),
            "contraction_rate": g.contraction_rate(),
            "arcs": g.arcs(),
            "notes": notes,
        }),
    )?;
    Ok(0)
}

#[derive(Serialize)]
struct InvariantRecord {
    word: Word,
    length: usize,
    ell: f64,
    alpha: f64,
    alpha_over_ell: f64,
}

pub fn invariants(
    args: &GroupArgs,
    cocycle: &Path,
    max_len: usize,
    fold_inverses: bool,
    cache_dir: Option<&Path>,
    out: &OutArgs,
) -> Result<u8, CliError> {
    check_len(max_len)?;
    let (space, _) = space(args)?;
    let u = load_cocycle(&space, cocycle)?;
    let stacked = u.stacked();
    let odd = space.rep().r() % 2 == 1;
    if fold_inverses && !odd {
        eprintln!("note: --fold-inverses ignored for even r (α(γ⁻¹) = -α(γ))");
    }
    let mut cache = Cache::open(cache_dir, &space)?;
    let mut seen = HashSet::new();
    let mut text = String::new();
    for class in enumerate_classes(space.rank(), max_len) {
        if fold_inverses && odd && seen.contains(&class.inverse()) {
            continue;
        }
        let rec = cache.get_or_compute(&space, &class)?;
        let alpha: f64 = rec
            .coefficients
            .iter()
            .zip(stacked.iter())
            .map(|(c, v)| c * v)
            .sum();
        let line = InvariantRecord {
            length: class.len(),
            word: class.rep().clone(),
            ell: rec.ell,
            alpha,
            alpha_over_ell: alpha / rec.ell,
        };
        text.push_str(&serde_json::to_string(&line).expect("serializable"));
        text.push('\n');
        seen.insert(class);
    }
    cache.save()?;
    if cache_dir.is_some() {
        eprintln!("cache: {} functionals", cache.len());
    }
    emit(out, &text)?;
    Ok(0)
}

pub fn cone(
    args: &GroupArgs,
    max_len: usize,
    fold_inverses: bool,
    section: Option<&Path>,
    plane: usize,
    out: &OutArgs,
) -> Result<u8, CliError> {
    check_len(max_len)?;
    let (space, mut notes) = space(args)?;
    let h = build_halfspaces(&space, max_len, fold_inverses)?;
    let report = cone_report(&h)?;
    if matches!(
        report.status,
        ConeStatus::PositiveFeasible | ConeStatus::NegativeFeasible | ConeStatus::BothFeasible
    ) {
        notes.push(format!(
            "feasible at L = {max_len}: consistent with proper deformations, not a proof of properness"
        ));
    }
    if let Some(path) = section {
        let cs = cross_section(&h, plane)?;
        let mut text = serde_json::to_string_pretty(&cs).expect("serializable");
        text.push('\n');
        write_atomic(path, text.as_bytes())?;
    }
    emit_json(
        out,
        &json!({
            "L": max_len,
            "r": space.rep().r(),
            "count": h.len(),
            "raw_count": h.raw_count,
            "folded": h.folded,
            "status": report.status,
            "t_plus": report.plus.margin,
            "t_minus": report.minus.margin,
            "witness_plus": report.plus.witness.as_slice(),
            "witness_minus": report.minus.witness.as_slice(),
            "notes": notes,
        }),
    )?;
    Ok(0)
}

pub fn certify(
    args: &GroupArgs,
    cocycle: &Path,
    max_len: usize,
    out: &OutArgs,
) -> Result<u8, CliError> {
    check_len(max_len)?;
    let (space, mut notes) = space(args)?;
    let u = load_cocycle(&space, cocycle)?;
    let coords = space.cohomology_coords(&u)?.coords;
    if coords.amax() <= 1e-8 * u.max_norm().max(1.0) {
        eprintln!("note: {RADIANT_NOTE}");
        notes.push(RADIANT_NOTE.to_string());
        emit_json(
            out,
            &json!({ "L": max_len, "certificate": null, "notes": notes }),
        )?;
        return Ok(1);
    }
    let Some(cert) = opposite_sign_certificate(&space, &u, max_len)? else {
        notes.push(format!(
            "no opposite-sign pair among classes of length <= {max_len}"
        ));
        emit_json(
            out,
            &json!({ "L": max_len, "certificate": null, "notes": notes }),
        )?;
        return Ok(1);
    };
    let mu = zero_current(&space, &u, &cert.negative, &cert.positive)?;
    let psi_mu = psi(&space, &u, &mu)?;
    let side = |c: &margulis_core::ConjClass, alpha: f64| -> Result<Value, CliError> {
        let ell = space.length(c.rep())?;
        Ok(json!({ "word": c.rep(), "alpha": alpha, "ell": ell, "alpha_over_ell": alpha / ell }))
    };
    emit_json(
        out,
        &json!({
            "L": max_len,
            "certificate": {
                "negative": side(&cert.negative, cert.alpha_negative)?,
                "positive": side(&cert.positive, cert.alpha_positive)?,
            },
            "zero_current": CurrentFile::from(&mu),
            "psi": psi_mu,
            "notes": notes,
        }),
    )?;
    Ok(0)
}

pub fn quadrature(
    args: &GroupArgs,
    cocycle: &Path,
    word: &str,
    steps: usize,
    seed: u64,
    out: &OutArgs,
) -> Result<u8, CliError> {
    let (space, notes) = space(args)?;
    let u = load_cocycle(&space, cocycle)?;
    let w: Word = word
        .parse()
        .map_err(|e| CliError::Parse(format!("--word: {e}")))?;
    // a conjugacy class check rejects the identity and reports bad letters
    conj_class(&w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = DVector::from_fn(space.dim(), |_, _| rng.gen_range(-1.0..1.0));
    let q = quadrature_check(&space, &u, &w, steps, &p)?;
    emit_json(
        out,
        &json!({
            "word": w,
            "steps": steps,
            "seed": seed,
            "ell": space.length(&w)?,
            "numeric": q.numeric,
            "exact": q.exact,
            "abs_err": q.abs_err,
            "notes": notes,
        }),
    )?;
    Ok(0)
}

#[derive(Serialize)]
struct CsvRow {
    #[serde(rename = "L")]
    max_len: usize,
    count: usize,
    t_plus: f64,
    t_minus: f64,
    area: Option<f64>,
}

pub fn report(
    args: &GroupArgs,
    max_len: usize,
    fold_inverses: bool,
    out: &OutArgs,
) -> Result<u8, CliError> {
    check_len(max_len)?;
    let (space, _) = space(args)?;
    let rows = convergence_report(&space, max_len, fold_inverses)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(CsvRow {
            max_len: row.max_len,
            count: row.count,
            t_plus: row.t_plus,
            t_minus: row.t_minus,
            area: row.area,
        })
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    emit(out, &String::from_utf8(bytes).expect("csv output is utf-8"))?;
    Ok(0)
}
