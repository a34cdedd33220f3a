use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::simulator::MeasurementSettings;

/// Shot count as given on the command line or in a config file.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ShotSpec {
    Count(u64),
    Text(String),
}

impl std::str::FromStr for ShotSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(ShotSpec::Text(s.to_string()))
    }
}

impl ShotSpec {
    pub fn settings(&self, seed: u64) -> Result<MeasurementSettings> {
        let count = match self {
            ShotSpec::Count(n) => *n,
            ShotSpec::Text(t) if t == "exact" => return Ok(MeasurementSettings::exact()),
            ShotSpec::Text(t) => t
                .parse()
                .map_err(|_| Error::arg(format!("shots must be 'exact' or a count, got '{t}'")))?,
        };
        MeasurementSettings::sampled(count, seed)
    }
}

/// Options shared by every command. Flags override values from `--config`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// JSON file with any of these options
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub fcidump: Option<PathBuf>,
    /// Vibronic model JSON
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Directory with plane.json and point_I_J.fcidump files
    #[arg(long)]
    pub fcidump_dir: Option<PathBuf>,
    /// Model coordinates, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub geometry: Option<Vec<f64>>,
    /// exact, cqe, vqd (scan and meci also take model)
    #[arg(long)]
    pub solver: Option<String>,
    /// jw or parity-tapered
    #[arg(long)]
    pub mapping: Option<String>,
    /// VQD optimizer: cobyla or rotosolve
    #[arg(long)]
    pub optimizer: Option<String>,
    #[arg(long)]
    pub states: Option<usize>,
    /// exact or a shot count
    #[arg(long)]
    pub shots: Option<ShotSpec>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CQE variance tolerance, or the MECI gap tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// VQD evaluations per state
    #[arg(long)]
    pub budget: Option<usize>,
    /// VQD penalty weight
    #[arg(long)]
    pub beta: Option<f64>,
    /// CQE excited-state start: singlet or determinant
    #[arg(long)]
    pub guess: Option<String>,
    /// Drop small CQE generator terms
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub truncate: Option<bool>,
    /// Scan grid as NxM
    #[arg(long)]
    pub grid: Option<String>,
    /// Scan half widths as A,B
    #[arg(long, value_delimiter = ',')]
    pub halfwidth: Option<Vec<f64>>,
    /// Coordinates the MECI search may move, comma separated
    #[arg(long, value_delimiter = ',')]
    pub active: Option<Vec<usize>>,
    /// Frozen coordinates as I=VALUE, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub freeze: Option<Vec<String>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($field:ident),*) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field.take(); } )*
    };
}

impl RunConfig {
    /// Fills unset flags from the `--config` file, if any.
    pub fn resolve(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let mut file: RunConfig = serde_json::from_str(&text)?;
        overlay!(
            self,
            file,
            fcidump,
            model,
            fcidump_dir,
            geometry,
            solver,
            mapping,
            optimizer,
            guess,
            states,
            shots,
            seed,
            tol,
            max_iter,
            budget,
            beta,
            truncate,
            grid,
            halfwidth,
            active,
            freeze,
            out
        );
        Ok(self)
    }

    pub fn measurement(&self) -> Result<MeasurementSettings> {
        self.shots
            .clone()
            .unwrap_or(ShotSpec::Text("exact".into()))
            .settings(self.seed.unwrap_or(0))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn grid(&self) -> Result<(usize, usize)> {
        let Some(spec) = &self.grid else {
            return Ok((11, 11));
        };
        let parsed = spec
            .split_once(['x', 'X'])
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
        parsed.ok_or_else(|| Error::arg(format!("grid must look like 11x11, got '{spec}'")))
    }

    pub fn half_widths(&self) -> Result<(f64, f64)> {
        match self.halfwidth.as_deref() {
            None => Ok((0.1, 0.1)),
            Some([a, b]) => Ok((*a, *b)),
            Some(other) => Err(Error::arg(format!(
                "halfwidth takes two values, got {}",
                other.len()
            ))),
        }
    }

    pub fn freeze(&self) -> Result<Vec<(usize, f64)>> {
        self.freeze
            .iter()
            .flatten()
            .map(|item| {
                item.split_once('=')
                    .and_then(|(i, v)| Some((i.trim().parse().ok()?, v.trim().parse().ok()?)))
                    .ok_or_else(|| {
                        Error::arg(format!("freeze entries look like 3=-0.1, got '{item}'"))
                    })
            })
            .collect()
    }
}
