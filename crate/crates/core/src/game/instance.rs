use std::path::Path;

use serde::{Deserialize, Serialize};

use super::market::SingleMarketCournotSpec;
use super::network::CournotNetworkSpec;
use crate::error::{Error, Result};

/// Instance file contents: a game plus the seed it was generated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_seed: Option<u64>,
    #[serde(flatten)]
    pub game: InstanceGame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceGame {
    Network(CournotNetworkSpec),
    SingleMarket(SingleMarketCournotSpec),
}

impl Instance {
    pub fn network(spec: CournotNetworkSpec, seed: Option<u64>) -> Self {
        Self { generator_seed: seed, game: InstanceGame::Network(spec) }
    }

    pub fn single_market(spec: SingleMarketCournotSpec, seed: Option<u64>) -> Self {
        Self { generator_seed: seed, game: InstanceGame::SingleMarket(spec) }
    }

    pub fn network_spec(&self) -> Result<&CournotNetworkSpec> {
        match &self.game {
            InstanceGame::Network(n) => Ok(n),
            InstanceGame::SingleMarket(_) => {
                Err(Error::InvalidModel("instance is a single market, not a network".into()))
            }
        }
    }

    pub fn market_spec(&self) -> Result<&SingleMarketCournotSpec> {
        match &self.game {
            InstanceGame::SingleMarket(s) => Ok(s),
            InstanceGame::Network(_) => Err(Error::InvalidModel("instance is a network, not a single market".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.game {
            InstanceGame::Network(n) => n.validate(),
            InstanceGame::SingleMarket(s) => s.validate(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
