//! Run configuration: flat `key = value` records under `[sections]`.
//!
//! Unknown sections or keys are rejected with their line number, and
//! `to_text` writes the canonical form, so a config survives a
//! parse/write round trip unchanged.

use anyhow::{anyhow, bail, Result};
use texfrac::eval::{MlConfig, SplitProtocol};
use texfrac::features::{EstimatorKind, ExtractConfig};
use texfrac::lbp::LbpParams;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lbp_neighbors: u32,
    pub lbp_radius: f64,
    /// Threshold levels; empty means "derive from LBP parameters".
    pub levels: Vec<u32>,
    /// Estimator codes in schema order.
    pub kinds: Vec<String>,
    /// Box-counting sizes; `None` = per-image powers of two.
    pub bc_deltas: Option<Vec<usize>>,
    pub bm_max_radius: f64,
    pub lacunarity_deltas: Vec<usize>,
    pub mf_exponents: Vec<f64>,
    pub mf_cell_sizes: Vec<usize>,
    pub pca_retention: f64,
    pub lda_shrinkage: f64,
    pub protocol_kind: String,
    pub train_per_class: usize,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let lbp = LbpParams::default();
        RunConfig {
            lbp_neighbors: lbp.neighbors,
            lbp_radius: lbp.radius,
            levels: lbp.default_levels(),
            kinds: vec!["BC".to_string()],
            bc_deltas: None,
            bm_max_radius: texfrac::fractal::DEFAULT_MAX_RADIUS,
            lacunarity_deltas: texfrac::fractal::default_lacunarity_deltas(),
            mf_exponents: texfrac::fractal::default_exponents(),
            mf_cell_sizes: texfrac::fractal::default_cell_sizes(),
            pca_retention: 0.99,
            lda_shrinkage: 1e-4,
            protocol_kind: "random-per-class".to_string(),
            train_per_class: 15,
            repetitions: 10,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut levels_set = false;
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| anyhow!("line {lineno}: unterminated section header"))?;
                section = name.trim().to_string();
                match section.as_str() {
                    "lbp" | "levels" | "estimators" | "pca" | "lda" | "protocol" => {}
                    other => bail!("line {lineno}: unknown section [{other}]"),
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {lineno}: expected key = value"))?;
            let key = key.trim();
            let value = value.trim();
            let fail = |what: &str| anyhow!("line {lineno}: bad {what} value {value:?}");
            match (section.as_str(), key) {
                ("lbp", "neighbors") => {
                    cfg.lbp_neighbors = value.parse().map_err(|_| fail("neighbors"))?
                }
                ("lbp", "radius") => cfg.lbp_radius = value.parse().map_err(|_| fail("radius"))?,
                ("levels", "values") => {
                    cfg.levels = parse_list(value).map_err(|_| fail("levels"))?;
                    levels_set = true;
                }
                ("estimators", "kinds") => {
                    cfg.kinds = value.split(',').map(|s| s.trim().to_string()).collect()
                }
                ("estimators", "bc_deltas") => {
                    cfg.bc_deltas = if value == "auto" {
                        None
                    } else {
                        Some(parse_list(value).map_err(|_| fail("bc_deltas"))?)
                    }
                }
                ("estimators", "bm_max_radius") => {
                    cfg.bm_max_radius = value.parse().map_err(|_| fail("bm_max_radius"))?
                }
                ("estimators", "lacunarity_deltas") => {
                    cfg.lacunarity_deltas = parse_list(value).map_err(|_| fail("lacunarity_deltas"))?
                }
                ("estimators", "mf_exponents") => {
                    cfg.mf_exponents = parse_list(value).map_err(|_| fail("mf_exponents"))?
                }
                ("estimators", "mf_cell_sizes") => {
                    cfg.mf_cell_sizes = parse_list(value).map_err(|_| fail("mf_cell_sizes"))?
                }
                ("pca", "retention") => {
                    cfg.pca_retention = value.parse().map_err(|_| fail("retention"))?
                }
                ("lda", "shrinkage") => {
                    cfg.lda_shrinkage = value.parse().map_err(|_| fail("shrinkage"))?
                }
                ("protocol", "kind") => {
                    match value {
                        "random-per-class" | "group-holdout" => {}
                        other => bail!("line {lineno}: unknown protocol kind {other:?}"),
                    }
                    cfg.protocol_kind = value.to_string();
                }
                ("protocol", "train_per_class") => {
                    cfg.train_per_class = value.parse().map_err(|_| fail("train_per_class"))?
                }
                ("protocol", "repetitions") => {
                    cfg.repetitions = value.parse().map_err(|_| fail("repetitions"))?
                }
                ("protocol", "seed") => cfg.seed = value.parse().map_err(|_| fail("seed"))?,
                (sec, key) => bail!("line {lineno}: unknown key {key:?} in section [{sec}]"),
            }
        }
        if !levels_set {
            let lbp = LbpParams::new(cfg.lbp_neighbors, cfg.lbp_radius)
                .map_err(|e| anyhow!("invalid lbp parameters: {e}"))?;
            cfg.levels = lbp.default_levels();
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[lbp]\n");
        out.push_str(&format!("neighbors = {}\n", self.lbp_neighbors));
        out.push_str(&format!("radius = {:?}\n", self.lbp_radius));
        out.push_str("\n[levels]\n");
        out.push_str(&format!("values = {}\n", join(&self.levels)));
        out.push_str("\n[estimators]\n");
        out.push_str(&format!("kinds = {}\n", self.kinds.join(",")));
        match &self.bc_deltas {
            None => out.push_str("bc_deltas = auto\n"),
            Some(d) => out.push_str(&format!("bc_deltas = {}\n", join(d))),
        }
        out.push_str(&format!("bm_max_radius = {:?}\n", self.bm_max_radius));
        out.push_str(&format!(
            "lacunarity_deltas = {}\n",
            join(&self.lacunarity_deltas)
        ));
        out.push_str(&format!(
            "mf_exponents = {}\n",
            self.mf_exponents
                .iter()
                .map(|q| format!("{q:?}"))
                .collect::<Vec<_>>()
                .join(",")
        ));
        out.push_str(&format!("mf_cell_sizes = {}\n", join(&self.mf_cell_sizes)));
        out.push_str("\n[pca]\n");
        out.push_str(&format!("retention = {:?}\n", self.pca_retention));
        out.push_str("\n[lda]\n");
        out.push_str(&format!("shrinkage = {:?}\n", self.lda_shrinkage));
        out.push_str("\n[protocol]\n");
        out.push_str(&format!("kind = {}\n", self.protocol_kind));
        out.push_str(&format!("train_per_class = {}\n", self.train_per_class));
        out.push_str(&format!("repetitions = {}\n", self.repetitions));
        out.push_str(&format!("seed = {}\n", self.seed));
        out
    }

    pub fn extract_config(&self) -> Result<ExtractConfig> {
        let lbp = LbpParams::new(self.lbp_neighbors, self.lbp_radius)?;
        let kinds = self
            .kinds
            .iter()
            .map(|code| {
                Ok(match EstimatorKind::from_code(code)? {
                    EstimatorKind::BoxCounting { .. } => EstimatorKind::BoxCounting {
                        deltas: self.bc_deltas.clone(),
                    },
                    EstimatorKind::Minkowski { .. } => EstimatorKind::Minkowski {
                        max_radius: self.bm_max_radius,
                    },
                    EstimatorKind::Lacunarity { .. } => EstimatorKind::Lacunarity {
                        deltas: self.lacunarity_deltas.clone(),
                    },
                    EstimatorKind::Multifractal { .. } => EstimatorKind::Multifractal {
                        exponents: self.mf_exponents.clone(),
                        cell_sizes: self.mf_cell_sizes.clone(),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtractConfig {
            lbp,
            levels: self.levels.clone(),
            kinds,
        }
        .validated()?)
    }

    pub fn ml_config(&self) -> MlConfig {
        MlConfig {
            pca_retention: self.pca_retention,
            lda_shrinkage: self.lda_shrinkage,
        }
    }

    pub fn split_protocol(&self, seed_override: Option<u64>) -> SplitProtocol {
        match self.protocol_kind.as_str() {
            "group-holdout" => SplitProtocol::GroupHoldout,
            _ => SplitProtocol::RandomPerClass {
                train_per_class: self.train_per_class,
                repetitions: self.repetitions,
                seed: seed_override.unwrap_or(self.seed),
            },
        }
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, ()> {
    value
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| ()))
        .collect()
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
