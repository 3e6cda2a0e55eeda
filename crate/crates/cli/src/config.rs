use serde::{Deserialize, Serialize};

use indsys::batching::GraspConfig;
use indsys::drago::{Criterion, DragoOptions, Metric, Packer};
use indsys::phase1::EaConfig;

use crate::commands::CliError;
use crate::{EaArgs, TransportArgs};

/// Everything a run depends on; written next to its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ea: Option<EaConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transport: Option<TransportConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportConfig {
    pub products: u64,
    pub takt_h: f64,
    pub criterion: String,
    pub weights: Option<String>,
    pub packer: Packer,
    pub route_exact: bool,
    pub packing_seed: u64,
    pub grasp: GraspConfig,
}

impl EaArgs {
    pub fn to_config(&self) -> Result<EaConfig, CliError> {
        let config = EaConfig {
            population_size: self.pop_size,
            max_generations: self.generations,
            tournament_size: self.tournament,
            crossover_rate: self.pc,
            mutation_rate: self.pm,
            seed: self.seed,
            mode: self.sourcing,
            fal_count: self.fal_count,
            ..EaConfig::default()
        };
        config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(config)
    }
}

impl TransportArgs {
    pub fn to_config(&self, default_seed: u64) -> Result<TransportConfig, CliError> {
        if self.products == 0 {
            return Err(CliError::Usage("--products must be at least 1".into()));
        }
        if !(self.takt_h > 0.0 && self.takt_h.is_finite()) {
            return Err(CliError::Usage(format!(
                "--takt-h must be positive, got {}",
                self.takt_h
            )));
        }
        let config = TransportConfig {
            products: self.products,
            takt_h: self.takt_h,
            criterion: self.criterion.clone(),
            weights: self.weights.clone(),
            packer: self.packer,
            route_exact: self.route_exact,
            packing_seed: self.packing_seed.unwrap_or(default_seed),
            grasp: DragoOptions::default().grasp,
        };
        config.criteria()?;
        Ok(config)
    }
}

impl TransportConfig {
    /// The criteria to run, with the file-name tag of each.
    pub fn criteria(&self) -> Result<Vec<(String, Criterion<f64>)>, CliError> {
        if self.criterion == "all" {
            return Ok(Metric::ALL
                .iter()
                .map(|&m| (m.to_string(), Criterion::Metric(m)))
                .collect());
        }
        let c =
            Criterion::parse(&self.criterion, self.weights.as_deref()).map_err(|e| CliError::Usage(e.to_string()))?;
        let tag = match &c {
            Criterion::Metric(m) => m.to_string(),
            Criterion::Tradeoff(_) => "tradeoff".to_string(),
        };
        Ok(vec![(tag, c)])
    }

    pub fn drago_options(&self) -> DragoOptions {
        DragoOptions {
            route_exact: self.route_exact,
            packer: self.packer,
            grasp: self.grasp,
            seed: self.packing_seed,
        }
    }
}
