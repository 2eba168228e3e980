//! JSON model configuration. Complex numbers are `[re, im]` pairs and
//! matrices are arrays of rows.

use std::path::Path;

use ncxft_core::collision::EnumerationOptions;
use ncxft_core::commutant::Interaction;
use ncxft_core::gibbs::{check_compatible, Bath, Charge};
use ncxft_core::matlin::CMatrix;
use ncxft_core::qubit::{swap_interaction, EvalOptions};
use ncxft_core::statistics::Tolerances;
use ncxft_core::{Complex64, Error};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub baths: RawBaths,
    pub interaction: RawInteraction,
    #[serde(default)]
    pub options: RawOptions,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawBaths {
    #[serde(rename = "A")]
    pub a: RawBath,
    #[serde(rename = "B")]
    pub b: RawBath,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawBath {
    pub dim: usize,
    pub charges: Vec<RawCharge>,
    pub affinities: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawCharge {
    pub label: String,
    pub matrix: RawMatrix,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RawInteraction {
    GeneralizedSwap { alpha: f64 },
    Hamiltonian { matrix: RawMatrix, tau: f64 },
    Unitary { matrix: RawMatrix },
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawOptions {
    pub quantization_eps: Option<f64>,
    pub support_threshold: Option<f64>,
    #[serde(default)]
    pub tolerances: RawTolerances,
    pub zetas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawTolerances {
    pub detailed_ft: Option<f64>,
    pub integral_ft: Option<f64>,
    pub second_law: Option<f64>,
    pub relative_entropy: Option<f64>,
    pub tur: Option<f64>,
    pub tail_bound: Option<f64>,
}

/// Interaction as written in the config. Unitarity of a supplied `U` is a
/// validation question, so it is not checked while parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum InteractionSpec {
    GeneralizedSwap { alpha: f64 },
    Hamiltonian { matrix: CMatrix, tau: f64 },
    Unitary { matrix: CMatrix },
}

impl InteractionSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            InteractionSpec::GeneralizedSwap { .. } => "generalized_swap",
            InteractionSpec::Hamiltonian { .. } => "hamiltonian",
            InteractionSpec::Unitary { .. } => "unitary",
        }
    }

    pub fn build(&self) -> Result<Interaction, Error> {
        match self {
            InteractionSpec::GeneralizedSwap { alpha } => Ok(swap_interaction(*alpha)),
            InteractionSpec::Hamiltonian { matrix, tau } => {
                ncxft_core::commutant::unitary_from_interaction(matrix, *tau)
            }
            InteractionSpec::Unitary { matrix } => Interaction::from_unitary(matrix.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub bath_a: Bath,
    pub bath_b: Bath,
    pub interaction: InteractionSpec,
    pub eval: EvalOptions,
}

fn config_err(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn positive(path: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(config_err(
            path,
            format!("must be a positive finite number, got {x}"),
        ))
    }
}

pub fn parse_matrix(raw: &RawMatrix, path: &str) -> Result<CMatrix, CliError> {
    let d = raw.len();
    if d == 0 {
        return Err(config_err(path, "matrix is empty"));
    }
    let mut rows = Vec::with_capacity(d);
    for (i, row) in raw.iter().enumerate() {
        if row.len() != d {
            return Err(config_err(
                format!("{path}[{i}]"),
                format!("row has {} entries, expected {d}", row.len()),
            ));
        }
        let mut out = Vec::with_capacity(d);
        for (j, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(config_err(
                    format!("{path}[{i}][{j}]"),
                    "entry is not finite",
                ));
            }
            out.push(Complex64::new(*re, *im));
        }
        rows.push(out);
    }
    CMatrix::from_rows(&rows).map_err(|e| config_err(path, e.to_string()))
}

pub fn matrix_to_raw(m: &CMatrix) -> RawMatrix {
    m.rows()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn parse_bath(raw: &RawBath, side: &str) -> Result<Bath, CliError> {
    let base = format!("baths.{side}");
    if raw.dim == 0 {
        return Err(config_err(
            format!("{base}.dim"),
            "dimension must be positive",
        ));
    }
    if raw.charges.is_empty() {
        return Err(config_err(
            format!("{base}.charges"),
            "at least one charge is required",
        ));
    }
    if raw.affinities.len() != raw.charges.len() {
        return Err(config_err(
            format!("{base}.affinities"),
            format!(
                "{} affinities for {} charges",
                raw.affinities.len(),
                raw.charges.len()
            ),
        ));
    }
    for (k, a) in raw.affinities.iter().enumerate() {
        if !a.is_finite() {
            return Err(config_err(format!("{base}.affinities[{k}]"), "not finite"));
        }
    }
    let mut charges = Vec::with_capacity(raw.charges.len());
    for (k, c) in raw.charges.iter().enumerate() {
        let path = format!("{base}.charges[{k}].matrix");
        let m = parse_matrix(&c.matrix, &path)?;
        if m.dim() != raw.dim {
            return Err(config_err(
                path,
                format!(
                    "matrix is {0}x{0} but the bath dimension is {1}",
                    m.dim(),
                    raw.dim
                ),
            ));
        }
        m.check_hermitian()
            .map_err(|e| config_err(&path, e.to_string()))?;
        charges.push(Charge::new(c.label.clone(), m));
    }
    Bath::new(charges, raw.affinities.clone()).map_err(|e| config_err(base, e.to_string()))
}

fn parse_interaction(raw: &RawInteraction, d: usize) -> Result<InteractionSpec, CliError> {
    let check_dim = |m: &CMatrix| {
        if m.dim() == d {
            Ok(())
        } else {
            Err(config_err(
                "interaction.matrix",
                format!("matrix is {0}x{0} but dim(A)·dim(B) = {d}", m.dim()),
            ))
        }
    };
    match raw {
        RawInteraction::GeneralizedSwap { alpha } => {
            if !alpha.is_finite() {
                return Err(config_err("interaction.alpha", "not finite"));
            }
            if d != 4 {
                return Err(config_err(
                    "interaction.type",
                    "generalized_swap needs two qubit baths",
                ));
            }
            Ok(InteractionSpec::GeneralizedSwap { alpha: *alpha })
        }
        RawInteraction::Hamiltonian { matrix, tau } => {
            if !tau.is_finite() {
                return Err(config_err("interaction.tau", "not finite"));
            }
            let m = parse_matrix(matrix, "interaction.matrix")?;
            check_dim(&m)?;
            m.check_hermitian()
                .map_err(|e| config_err("interaction.matrix", e.to_string()))?;
            Ok(InteractionSpec::Hamiltonian {
                matrix: m,
                tau: *tau,
            })
        }
        RawInteraction::Unitary { matrix } => {
            let m = parse_matrix(matrix, "interaction.matrix")?;
            check_dim(&m)?;
            Ok(InteractionSpec::Unitary { matrix: m })
        }
    }
}

fn parse_options(raw: &RawOptions) -> Result<EvalOptions, CliError> {
    let mut eval = EvalOptions::default();
    if let Some(x) = raw.quantization_eps {
        eval.eps = positive("options.quantization_eps", x)?;
    }
    if let Some(x) = raw.support_threshold {
        let x = positive("options.support_threshold", x)?;
        eval.enumeration = EnumerationOptions {
            support_threshold: x,
            ..eval.enumeration
        };
        eval.tolerances.support = x;
    }
    if let Some(z) = &raw.zetas {
        for (k, x) in z.iter().enumerate() {
            if !x.is_finite() || *x < 0.0 {
                return Err(config_err(
                    format!("options.zetas[{k}]"),
                    "must be a nonnegative finite number",
                ));
            }
        }
        eval.zetas = z.clone();
    }
    let t = &raw.tolerances;
    let tol: &mut Tolerances = &mut eval.tolerances;
    for (slot, value, name) in [
        (&mut tol.detailed_ft, t.detailed_ft, "detailed_ft"),
        (&mut tol.integral_ft, t.integral_ft, "integral_ft"),
        (&mut tol.second_law, t.second_law, "second_law"),
        (
            &mut tol.relative_entropy,
            t.relative_entropy,
            "relative_entropy",
        ),
        (&mut tol.tur, t.tur, "tur"),
        (&mut tol.tail_bound, t.tail_bound, "tail_bound"),
    ] {
        if let Some(x) = value {
            *slot = positive(&format!("options.tolerances.{name}"), x)?;
        }
    }
    Ok(eval)
}

impl ModelConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let bath_a = parse_bath(&raw.baths.a, "A")?;
        let bath_b = parse_bath(&raw.baths.b, "B")?;
        check_compatible(&bath_a, &bath_b)
            .map_err(|e| config_err("baths.B.charges", e.to_string()))?;
        let interaction = parse_interaction(&raw.interaction, bath_a.dim() * bath_b.dim())?;
        let eval = parse_options(&raw.options)?;
        Ok(ModelConfig {
            bath_a,
            bath_b,
            interaction,
            eval,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(
                if path == "." { String::new() } else { path },
                e.into_inner().to_string(),
            )
        })?;
        ModelConfig::from_raw(&raw)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        ModelConfig::from_json(&text)
    }
}
