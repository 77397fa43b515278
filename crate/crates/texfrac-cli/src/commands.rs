use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use texfrac::eval;
use texfrac::features;
use texfrac::statmodel::{self, MeasureKind};

use crate::config::RunConfig;

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read config {}", p.display()))?;
            RunConfig::parse(&text).with_context(|| format!("in config {}", p.display()))
        }
    }
}

/// `extract`: manifest -> feature CSV.
pub fn cmd_extract(config: &Option<PathBuf>, manifest: &Path, out: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let manifest = eval::load_manifest(manifest)?;
    let table = features::extract_batch(&manifest.entries, &cfg.extract_config()?)?;
    let csv = features::write_feature_csv(&table)?;
    fs::write(out, csv).with_context(|| format!("cannot write {}", out.display()))?;
    eprintln!(
        "extracted {} rows x {} features -> {}",
        table.rows(),
        table.schema.len(),
        out.display()
    );
    Ok(())
}

/// `classify`: feature CSV + manifest -> results and confusion files.
pub fn cmd_classify(
    config: &Option<PathBuf>,
    features_csv: &Path,
    manifest: &Path,
    out_dir: &Path,
    seed: Option<u64>,
    save_models: bool,
) -> Result<()> {
    let cfg = load_config(config)?;
    let manifest = eval::load_manifest(manifest)?;
    let text = fs::read_to_string(features_csv)
        .with_context(|| format!("cannot read {}", features_csv.display()))?;
    let table = features::read_feature_csv(&text)?;

    // features must cover every manifest entry; align rows to manifest order
    let mut order = Vec::with_capacity(manifest.entries.len());
    for entry in &manifest.entries {
        let row = table
            .paths
            .iter()
            .position(|p| p == &entry.path)
            .with_context(|| format!("no feature row for {}", entry.path))?;
        order.push(row);
    }
    let aligned = features::FeatureTable {
        schema: table.schema.clone(),
        paths: order.iter().map(|&i| table.paths[i].clone()).collect(),
        labels: order.iter().map(|&i| table.labels[i].clone()).collect(),
        groups: order.iter().map(|&i| table.groups[i].clone()).collect(),
        values: texfrac::Matrix::from_rows(
            &order
                .iter()
                .map(|&i| table.values.row(i).to_vec())
                .collect::<Vec<_>>(),
        ),
    };

    let splits = eval::make_splits(&manifest, &cfg.split_protocol(seed))?;
    let result = eval::evaluate(&aligned, &splits, &cfg.ml_config())?;
    let written = eval::report(&result, out_dir)?;
    // record the effective configuration next to the results
    fs::write(out_dir.join("run.cfg"), cfg.to_text())?;

    if save_models {
        let models_dir = out_dir.join("models");
        fs::create_dir_all(&models_dir)?;
        for (i, split) in splits.iter().enumerate() {
            let rows: Vec<Vec<f64>> = split
                .train
                .iter()
                .map(|&r| aligned.values.row(r).to_vec())
                .collect();
            let labels: Vec<String> = split
                .train
                .iter()
                .map(|&r| aligned.labels[r].clone())
                .collect();
            let (pca, lda) =
                eval::fit_pipeline(&texfrac::Matrix::from_rows(&rows), &labels, &cfg.ml_config())?;
            texfrac::mlkit::save_model(
                &texfrac::mlkit::TrainedModel { pca, lda },
                models_dir.join(format!("split_{i}.model")),
            )?;
        }
    }

    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    println!(
        "mean accuracy {:.2} +- {:.2} over {} splits",
        result.mean_accuracy,
        result.std_deviation,
        result.split_accuracies.len()
    );
    Ok(())
}

/// `simulate-model`: alpha/beta curves of the coverage model as CSV.
pub fn cmd_simulate_model(
    kind: &str,
    ds_list: &[f64],
    np_list: &[f64],
    scale_count: usize,
    scale_lo: f64,
    scale_hi: f64,
    out: Option<&Path>,
) -> Result<()> {
    let kinds: Vec<MeasureKind> = match kind {
        "boxes" => vec![MeasureKind::Boxes],
        "length" => vec![MeasureKind::Length],
        "length-bounded" => vec![MeasureKind::LengthBounded],
        "both" => vec![MeasureKind::Boxes, MeasureKind::Length],
        other => bail!("unknown kind {other:?} (expected boxes, length, length-bounded, both)"),
    };
    let scales = statmodel::log_spaced_scales::<f64>(scale_lo, scale_hi, scale_count);
    let csv = statmodel::model_sweep_csv(&kinds, ds_list, np_list, &scales)?;
    match out {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

type CheckFn = fn() -> std::result::Result<(), String>;

/// `selftest`: analytic fixtures; exit nonzero on any failure.
pub fn cmd_selftest() -> Result<()> {
    let checks: Vec<(&str, CheckFn)> = vec![
        ("box-dimension-fixtures", selftest::box_fixtures),
        ("edt-exactness", selftest::edt_oracle),
        ("dilation-volumes", selftest::dilation_oracle),
        ("lacunarity-closed-forms", selftest::lacunarity_forms),
        ("multifractal-identities", selftest::multifractal_identities),
        ("coverage-model-montecarlo", selftest::statmodel_agreement),
        ("pca-lda-sanity", selftest::mlkit_sanity),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        bail!("{failed} selftest check(s) failed");
    }
    Ok(())
}

mod selftest {
    use texfrac::fractal::{
        box_dimension, default_lacunarity_deltas, dilation_volumes_brute, edt_squared,
        edt_squared_brute, lacunarity_curve, minkowski_curve, multifractal_spectrum,
    };
    use texfrac::mlkit::{lda_fit, pca_fit, LdaConfig, Matrix};
    use texfrac::statmodel::{
        expected_boxes, expected_covered_length, montecarlo_boxes, montecarlo_length,
    };
    use texfrac::synth;
    use texfrac::BinaryImage;

    type Check = std::result::Result<(), String>;

    fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
        if ok {
            Ok(())
        } else {
            Err(msg())
        }
    }

    pub fn box_fixtures() -> Check {
        let carpet = synth::sierpinski_carpet(5);
        let (dim, _) = box_dimension::<f64>(&carpet, &[3, 9, 27, 81]).map_err(|e| e.to_string())?;
        let expected = eight_ln_over_3();
        ensure((dim - expected).abs() < 1e-9, || {
            format!("carpet dim {dim} vs {expected}")
        })?;
        let (dim, _) = box_dimension::<f64>(&BinaryImage::filled(64, 64), &[2, 4, 8, 16])
            .map_err(|e| e.to_string())?;
        ensure((dim - 2.0).abs() < 1e-12, || format!("square dim {dim}"))?;
        let (dim, _) = box_dimension::<f64>(&synth::horizontal_line(64, 64, 9), &[2, 4, 8, 16])
            .map_err(|e| e.to_string())?;
        ensure((dim - 1.0).abs() < 1e-12, || format!("line dim {dim}"))
    }

    fn eight_ln_over_3() -> f64 {
        8.0f64.ln() / 3.0f64.ln()
    }

    pub fn edt_oracle() -> Check {
        for seed in 0..100 {
            let img = synth::random_binary(24, 24, 0.08, seed);
            let fast = edt_squared(&img).map_err(|e| e.to_string())?;
            let brute = edt_squared_brute(&img).map_err(|e| e.to_string())?;
            ensure(fast == brute, || format!("edt mismatch at seed {seed}"))?;
        }
        Ok(())
    }

    pub fn dilation_oracle() -> Check {
        for seed in 0..20 {
            let img = synth::random_binary(24, 24, 0.05, seed);
            let curve = minkowski_curve::<f64>(&img, 9.0).map_err(|e| e.to_string())?;
            let brute = dilation_volumes_brute(&img, 9.0).map_err(|e| e.to_string())?;
            let brute_volumes: Vec<u64> = brute.iter().map(|&(_, v)| v).collect();
            ensure(curve.volumes == brute_volumes, || {
                format!("dilation mismatch at seed {seed}")
            })?;
        }
        Ok(())
    }

    pub fn lacunarity_forms() -> Check {
        let filled = lacunarity_curve::<f64>(&BinaryImage::filled(32, 32), &default_lacunarity_deltas())
            .map_err(|e| e.to_string())?;
        ensure(filled.lambdas.iter().all(|&l| l == 1.0), || {
            "filled image lambda != 1".to_string()
        })?;
        let single = lacunarity_curve::<f64>(&synth::single_point(4, 4, 1, 1), &[2])
            .map_err(|e| e.to_string())?;
        ensure(single.lambdas[0] == 2.25, || {
            format!("single pixel lambda {} != 9/4", single.lambdas[0])
        })
    }

    pub fn multifractal_identities() -> Check {
        let carpet = synth::sierpinski_carpet(5);
        let qs: Vec<f64> = (-5..=5).map(|k| (2 * k) as f64).collect();
        let spec =
            multifractal_spectrum(&carpet, &qs, &[3, 9, 27, 81]).map_err(|e| e.to_string())?;
        let expected = eight_ln_over_3();
        for (&q, &f) in spec.qs.iter().zip(&spec.fvals) {
            ensure((f - expected).abs() < 0.02, || {
                format!("carpet f({q}) = {f}, expected {expected}")
            })?;
        }
        let img = synth::bernoulli(64, 64, 0.3, 17);
        let spec = multifractal_spectrum(&img, &[0.0], &[2, 4, 8, 16]).map_err(|e| e.to_string())?;
        let (dim, _) = box_dimension::<f64>(&img, &[2, 4, 8, 16]).map_err(|e| e.to_string())?;
        ensure((spec.fvals[0] - dim).abs() < 1e-9, || {
            format!("f(0) {} != box dim {dim}", spec.fvals[0])
        })
    }

    pub fn statmodel_agreement() -> Check {
        let (mean, se) = montecarlo_boxes(0.1, 15.0, 2000, 0);
        let analytic = expected_boxes(0.1, 15.0, 1.0).map_err(|e| e.to_string())?;
        ensure((mean - analytic).abs() <= 3.0 * se + 1e-9, || {
            format!("boxes mc {mean} vs analytic {analytic} (se {se})")
        })?;
        let (mean, se) = montecarlo_length(0.05, 200.0, 2000, 0);
        let analytic = expected_covered_length(0.05, 200.0, 1.0).map_err(|e| e.to_string())?;
        ensure((mean - analytic).abs() <= 3.0 * se + 1e-9, || {
            format!("length mc {mean} vs analytic {analytic} (se {se})")
        })?;
        let exact = expected_covered_length(2e-6, 1e6, 1.0).map_err(|e| e.to_string())?;
        let limit = 1.0 - (-2.0f64).exp();
        ensure((exact - limit).abs() < 1e-3, || {
            format!("exponential limit deviation {}", (exact - limit).abs())
        })
    }

    pub fn mlkit_sanity() -> Check {
        let rows: Vec<Vec<f64>> = (0..20).map(|t| vec![t as f64, 2.0 * t as f64]).collect();
        let pca = pca_fit(&Matrix::from_rows(&rows), 0.99).map_err(|e| e.to_string())?;
        ensure(pca.retained() == 1, || {
            format!("line data retained {} components", pca.retained())
        })?;
        let rows = vec![
            vec![-1.0, 0.1],
            vec![-0.9, -0.1],
            vec![1.0, 0.1],
            vec![0.9, -0.1],
        ];
        let labels: Vec<String> = ["a", "a", "b", "b"].iter().map(|s| s.to_string()).collect();
        let lda = lda_fit(&Matrix::from_rows(&rows), &labels, &LdaConfig::default())
            .map_err(|e| e.to_string())?;
        ensure(
            lda.predict_label(&[-2.0, 0.0]).map_err(|e| e.to_string())? == "a"
                && lda.predict_label(&[2.0, 0.0]).map_err(|e| e.to_string())? == "b",
            || "blob classification failed".to_string(),
        )
    }

}
