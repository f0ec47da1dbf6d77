use std::path::PathBuf;

use clap::ValueEnum;
use hankel_core::asymptotics::PredictionVariant;
use hankel_core::moments::WeightParams;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum OutFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub t: f64,
    pub n_list: Vec<u64>,
    pub bits_override: Option<usize>,
    pub variant: PredictionVariant,
    pub out_format: OutFormat,
    pub cache_dir: Option<PathBuf>,
    pub threads: usize,
}

impl RunConfig {
    pub fn new(alpha: f64, t: f64, n_list: Vec<u64>) -> Self {
        RunConfig {
            alpha,
            t,
            n_list,
            bits_override: None,
            variant: PredictionVariant::Proof,
            out_format: OutFormat::Json,
            cache_dir: None,
            threads: 1,
        }
    }

    pub fn validate(&self) -> Result<WeightParams, CliError> {
        if self.n_list.is_empty() {
            return Err(CliError::Config("--n needs at least one order".into()));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("--n must be strictly increasing".into()));
        }
        if self.threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        if let Some(b) = self.bits_override {
            if b < hankel_core::PrecisionContext::MIN_BITS {
                return Err(CliError::Config(format!(
                    "--bits must be at least {}",
                    hankel_core::PrecisionContext::MIN_BITS
                )));
            }
        }
        WeightParams::new(self.alpha, self.t).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn max_n(&self) -> u64 {
        self.n_list.iter().copied().max().unwrap_or(0)
    }
}

pub fn parse_n_list(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|e| format!("bad order {p:?}: {e}")))
        .collect()
}

pub fn parse_variant(s: &str) -> Result<PredictionVariant, String> {
    s.parse().map_err(|e: hankel_core::asymptotics::AsymptoticsError| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_list_parsing() {
        assert_eq!(parse_n_list("20,40, 60").unwrap(), vec![20, 40, 60]);
        assert_eq!(parse_n_list("7").unwrap(), vec![7]);
        assert!(parse_n_list("3,x").is_err());
    }

    #[test]
    fn validation() {
        assert!(RunConfig::new(0.0, 0.0, vec![1, 2]).validate().is_ok());
        assert!(matches!(RunConfig::new(-1.5, 0.0, vec![1]).validate(), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::new(0.0, -1.0, vec![1]).validate(), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::new(0.0, 0.0, vec![3, 2]).validate(), Err(CliError::Config(_))));
        let mut c = RunConfig::new(0.0, 0.0, vec![1]);
        c.threads = 0;
        assert!(c.validate().is_err());
    }
}
