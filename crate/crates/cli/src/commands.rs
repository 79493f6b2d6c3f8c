use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use expresso::expressiveness::{aspects_from_outputs, correlation_trends, linear_fit, TrendSample};
use expresso::format::sig9;
use expresso::perceptron::{train, Sample, TrainConfig};
use expresso::svm::{self, label_by_median, SvmTrainSet};
use expresso::synth::{extreme_injection, generate, GenSpec, MIN_INJECTION_BASE};
use expresso::{
    serialize_drawing, Analysis, Aspect, DrawingF64, GeometryConfigF64, PerceptronModelF64,
    SvmModelF64,
};
use rayon::prelude::*;

use crate::load::{load_drawings, load_set, read_text, InputError};
use crate::output::{Cell, Format, Table};

type Analyzed = (DrawingF64, Analysis<f64>);

/// Analyses every drawing in parallel, keeping input order.
fn analyze_all(drawings: Vec<DrawingF64>, geo: &GeometryConfigF64) -> Result<Vec<Analyzed>> {
    drawings
        .into_par_iter()
        .map(|d| {
            let a = expresso::analyze(&d, geo).with_context(|| format!("drawing '{}'", d.id()))?;
            Ok((d, a))
        })
        .collect()
}

fn emit(table: &Table, format: Format) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    table.write(format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn vector_names(prefix: char, n: usize) -> impl Iterator<Item = String> {
    (1..=n).map(move |i| format!("{prefix}{i}"))
}

pub fn analyze(paths: &[PathBuf], geo: &GeometryConfigF64, format: Format) -> Result<()> {
    let rows = analyze_all(load_drawings(paths)?, geo)?;
    let mut header: Vec<String> = [
        "id",
        "n_points",
        "n_ends_bends",
        "n_ends",
        "n_soft",
        "n_corner",
        "n_intersections",
        "pct_soft",
        "pct_corner",
        "largest",
        "smallest",
        "main_form",
        "lseg",
    ]
    .map(String::from)
    .to_vec();
    header.extend(vector_names('v', 12));
    header.extend(vector_names('t', 5));
    header.extend(["a", "b", "c"].map(String::from));
    let mut table = Table::new(header);
    for (d, a) in &rows {
        let ea = &a.extraction.aspects;
        let mut row: Vec<Cell> = vec![
            d.id().into(),
            ea.n_points.into(),
            ea.n_ends_bends.into(),
            ea.n_ends.into(),
            ea.n_soft.into(),
            ea.n_corner.into(),
            ea.n_intersections.into(),
            ea.pct_soft.into(),
            ea.pct_corner.into(),
            ea.largest.into(),
            ea.smallest.into(),
            ea.main_form.into(),
            ea.lseg.into(),
        ];
        row.extend(a.input.values().iter().map(|v| Cell::Num(*v)));
        row.extend(a.target.values().iter().map(|v| Cell::Num(*v)));
        row.extend([a.aspects.a, a.aspects.b, a.aspects.c].map(Cell::Num));
        table.push(row);
    }
    emit(&table, format)
}

pub struct GenArgs {
    pub seed: u64,
    pub count: usize,
    pub trend_mode: bool,
    pub inject_extremes: Option<usize>,
    pub min_crossings: usize,
    pub soft_fraction: Option<f64>,
}

pub fn gen_corpus(args: GenArgs, out: &Path, geo: &GeometryConfigF64) -> Result<()> {
    let mut spec = GenSpec {
        seed: args.seed,
        count: args.count,
        trend_mode: args.trend_mode,
        min_crossings: args.min_crossings,
        resample_step_mm: geo.resample_step_mm,
        ..GenSpec::default()
    };
    if let Some(p) = args.soft_fraction {
        spec.soft_fraction = (p, p);
    }
    spec.validate()?;
    if let Some(k) = args.inject_extremes {
        if k == 0 {
            bail!("--inject-extremes must be at least 1");
        }
        if args.count < MIN_INJECTION_BASE {
            bail!("--inject-extremes needs --count of at least {MIN_INJECTION_BASE}");
        }
    }

    let corpus = generate::<f64>(&spec)?;
    let (drawings, tags) = match args.inject_extremes {
        None => (corpus.drawings, Vec::new()),
        Some(k) => {
            let inj = extreme_injection(&corpus.drawings, k, geo)?;
            let mut tags = Vec::new();
            for (list, tag) in [
                (&inj.high_a, "a_high"),
                (&inj.low_a, "a_low"),
                (&inj.high_b, "b_high"),
                (&inj.low_b, "b_low"),
            ] {
                tags.extend(list.iter().map(|id| (id.clone(), tag)));
            }
            (inj.drawings, tags)
        }
    };

    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    for d in &drawings {
        write_file(&out.join(format!("{}.drw", d.id())), &serialize_drawing(d))?;
    }
    let mut w = csv::Writer::from_path(out.join("manifest.csv"))
        .with_context(|| format!("cannot write manifest in {}", out.display()))?;
    w.write_record([
        "id",
        "polylines",
        "corners",
        "soft_curves",
        "crossings",
        "zigzags",
        "latent",
        "injected",
    ])?;
    for m in &corpus.meta {
        w.write_record([
            m.id.clone(),
            m.polylines.to_string(),
            m.corners.to_string(),
            m.soft_curves.to_string(),
            m.crossings.to_string(),
            m.zigzags.to_string(),
            sig9(m.latent),
            String::new(),
        ])?;
    }
    for (id, tag) in &tags {
        let mut rec = vec![id.clone()];
        rec.extend(std::iter::repeat_n(String::new(), 6));
        rec.push(tag.to_string());
        w.write_record(rec)?;
    }
    w.flush()?;
    eprintln!("wrote {} drawings to {}", drawings.len(), out.display());
    Ok(())
}

fn samples(rows: &[Analyzed]) -> Vec<Sample<f64>> {
    rows.iter().map(|(_, a)| (a.input, a.target)).collect()
}

pub fn train_perceptron(
    dir: &Path,
    cfg: &TrainConfig<f64>,
    out: &Path,
    geo: &GeometryConfigF64,
    format: Format,
) -> Result<()> {
    let rows = analyze_all(load_set(dir, 1)?, geo)?;
    let report = train(&samples(&rows), cfg)?;
    write_file(out, &report.model.to_text())?;
    let mut table = Table::new(["drawings", "epochs", "first_deviation", "final_deviation"]);
    table.push(vec![
        rows.len().into(),
        report.deviations.len().into(),
        report.first_deviation().into(),
        report.final_deviation().into(),
    ]);
    emit(&table, format)
}

enum Model {
    Perceptron(PerceptronModelF64),
    Svm(SvmModelF64),
}

/// Model kind is told apart by the first token of the file.
fn load_model(path: &Path) -> Result<Model> {
    let text = read_text(path)?;
    let bad = |e: expresso::Error| InputError(format!("{}: {e}", path.display()));
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .and_then(|l| l.split_whitespace().next());
    match first {
        Some("perceptron") => Ok(Model::Perceptron(
            PerceptronModelF64::from_text(&text).map_err(bad)?,
        )),
        Some("svm") => Ok(Model::Svm(SvmModelF64::from_text(&text).map_err(bad)?)),
        _ => Err(InputError(format!(
            "{}: not a model file (expected 'perceptron' or 'svm' header)",
            path.display()
        ))
        .into()),
    }
}

pub fn predict(
    model: &Path,
    paths: &[PathBuf],
    geo: &GeometryConfigF64,
    format: Format,
) -> Result<()> {
    let Model::Perceptron(m) = load_model(model)? else {
        bail!(
            "{} is an SVM model; predict needs a perceptron",
            model.display()
        );
    };
    let rows = analyze_all(load_drawings(paths)?, geo)?;
    let mut header = vec!["id".to_string()];
    header.extend(vector_names('t', 5));
    header.extend(["P(a)", "P(b)", "P(c)"].map(String::from));
    let mut table = Table::new(header);
    for (d, a) in &rows {
        let out = m.predict(&a.input);
        let p = aspects_from_outputs(&a.input, &out)
            .with_context(|| format!("drawing '{}'", d.id()))?;
        let mut row: Vec<Cell> = vec![d.id().into()];
        row.extend(out.values().iter().map(|v| Cell::Num(*v)));
        row.extend([p.a, p.b, p.c].map(Cell::Num));
        table.push(row);
    }
    emit(&table, format)
}

pub fn train_svm(
    dir: &Path,
    aspect: Aspect,
    c: f64,
    out: &Path,
    geo: &GeometryConfigF64,
    format: Format,
) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        bail!("--C must be positive and finite, got {c}");
    }
    let rows = analyze_all(load_set(dir, 2)?, geo)?;
    let values: Vec<f64> = rows.iter().map(|(_, a)| a.aspects.get(aspect)).collect();
    let labels = label_by_median(&values)?;
    let set = SvmTrainSet::new(
        rows.iter()
            .zip(labels)
            .map(|((_, a), y)| (a.input, y))
            .collect(),
    )?;
    let model = svm::train_svm(&set, aspect, c)?;
    write_file(out, &model.to_text())?;
    let mut table = Table::new(["term", "value"]);
    for (name, w) in vector_names('w', 12).zip(model.w) {
        table.push(vec![name.into(), w.into()]);
    }
    table.push(vec!["b".into(), model.b.into()]);
    emit(&table, format)
}

pub fn svm_score(
    model: &Path,
    paths: &[PathBuf],
    geo: &GeometryConfigF64,
    format: Format,
) -> Result<()> {
    let Model::Svm(m) = load_model(model)? else {
        bail!(
            "{} is a perceptron model; svm-score needs an SVM",
            model.display()
        );
    };
    let rows = analyze_all(load_drawings(paths)?, geo)?;
    let mut table = Table::new(["id", "decision", "class"]);
    for (d, a) in &rows {
        let class = if m.classify(&a.input) > 0 { "+1" } else { "-1" };
        table.push(vec![
            d.id().into(),
            m.decision(&a.input).into(),
            class.into(),
        ]);
    }
    emit(&table, format)
}

pub fn correlate(dir: &Path, geo: &GeometryConfigF64, format: Format) -> Result<()> {
    let rows = analyze_all(load_drawings(&[dir.to_path_buf()])?, geo)?;
    let trend: Vec<TrendSample<f64>> = rows
        .iter()
        .map(|(_, a)| TrendSample {
            aspects: a.extraction.aspects,
            values: a.aspects,
        })
        .collect();
    let report = correlation_trends(&trend)?;
    let mut table = Table::new(["pair", "rho", "n"]);
    for e in &report.entries {
        table.push(vec![e.pair.into(), e.rho.into(), e.n.into()]);
    }
    emit(&table, format)
}

/// Always CSV: `id,hand,predicted` rows then a `#` row with the fitted line.
pub fn plot_data(model: &Path, dir: &Path, aspect: Aspect, geo: &GeometryConfigF64) -> Result<()> {
    let model = load_model(model)?;
    if let Model::Svm(m) = &model {
        if m.aspect != aspect {
            bail!(
                "SVM model discriminates aspect {}, not aspect {aspect}",
                m.aspect
            );
        }
    }
    let rows = analyze_all(load_set(dir, 2)?, geo)?;
    let mut table = Table::new(["id", "hand", "predicted"]);
    let (mut hand, mut predicted) = (Vec::new(), Vec::new());
    for (d, a) in &rows {
        let h = a.aspects.get(aspect);
        let p = match &model {
            Model::Perceptron(m) => aspects_from_outputs(&a.input, &m.predict(&a.input))
                .with_context(|| format!("drawing '{}'", d.id()))?
                .get(aspect),
            Model::Svm(m) => m.decision(&a.input),
        };
        table.push(vec![d.id().into(), h.into(), p.into()]);
        hand.push(h);
        predicted.push(p);
    }
    let fit = linear_fit(&hand, &predicted)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    table.write_csv(&mut out)?;
    writeln!(
        out,
        "# slope={},intercept={},r2={}",
        sig9(fit.slope),
        sig9(fit.intercept),
        sig9(fit.r_squared)
    )?;
    out.flush()?;
    Ok(())
}
