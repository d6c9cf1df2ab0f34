//! Resolving a bundle id or path to a residual-checked solution.

use std::collections::BTreeMap;
use std::path::Path;

use oae_core::spectral::PotentialTower;
use oae_core::{residual_oae, residual_wdvv, Error as CoreError, Polynomial, ResidualTensor};
use sha2::{Digest, Sha256};

use crate::bundled;
use crate::format::{parse_solution, FormatError, Kind, Solution};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {source}")]
    Parse {
        origin: String,
        #[source]
        source: FormatError,
    },
    #[error("{origin} is not a solution: residual entry {index:?} = {value}")]
    Rejected {
        origin: String,
        index: Vec<usize>,
        value: Polynomial,
    },
}

pub struct SolutionBundle {
    pub id: String,
    pub solution: Solution,
    /// Hex SHA-256 of the source text.
    pub digest: String,
    pub trusted: bool,
    towers: BTreeMap<usize, PotentialTower>,
}

impl SolutionBundle {
    pub fn kind(&self) -> Kind {
        self.solution.kind()
    }

    pub fn dim(&self) -> usize {
        self.solution.dim()
    }

    /// `residual_oae` or `residual_wdvv`, according to the kind.
    pub fn residual(&self) -> ResidualTensor {
        match &self.solution {
            Solution::Oae(k) => residual_oae(k),
            Solution::Wdvv(f) => residual_wdvv(f),
        }
    }

    /// Marks the bundle trusted when its residual vanishes.
    pub fn verify(&mut self) -> ResidualTensor {
        let r = self.residual();
        self.trusted = r.is_zero();
        r
    }

    /// Potential towers of the displacement, built once per order.
    pub fn tower(&mut self, order: usize) -> Result<&PotentialTower, CoreError> {
        if !self.towers.contains_key(&order) {
            let t = PotentialTower::build(&self.solution.displacement(), order)?;
            self.towers.insert(order, t);
        }
        Ok(&self.towers[&order])
    }
}

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Parses without checking the residual. Bundle ids win over paths.
pub fn read_solution(input: &str) -> Result<SolutionBundle, LoadError> {
    let (id, text) = match bundled::lookup(input) {
        Some(b) => (b.id.to_string(), b.text.to_string()),
        None => {
            let path = Path::new(input);
            let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
                path: input.to_string(),
                source,
            })?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| input.to_string());
            (id, text)
        }
    };
    let solution = parse_solution(&text).map_err(|source| LoadError::Parse {
        origin: input.to_string(),
        source,
    })?;
    Ok(SolutionBundle {
        id,
        solution,
        digest: digest(&text),
        trusted: false,
        towers: BTreeMap::new(),
    })
}

/// Parses and rejects anything whose residual is not exactly zero.
pub fn load_solution(input: &str) -> Result<SolutionBundle, LoadError> {
    let mut bundle = read_solution(input)?;
    let r = bundle.verify();
    if let Some(index) = r.witness() {
        return Err(LoadError::Rejected {
            origin: input.to_string(),
            index: index.to_vec(),
            value: r
                .witness_value()
                .cloned()
                .unwrap_or_else(|| Polynomial::zero(bundle.dim())),
        });
    }
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_solutions_are_trusted() {
        for b in bundled::solutions() {
            assert!(load_solution(b.id).unwrap().trusted, "{}", b.id);
        }
    }

    #[test]
    fn counterexample_is_rejected_with_witness() {
        match load_solution("bad-wdvv") {
            Err(LoadError::Rejected { index, value, .. }) => {
                assert_eq!(index.len(), 4);
                assert!(!value.is_zero());
            }
            other => panic!("{:?}", other.map(|b| b.id)),
        }
    }

    #[test]
    fn missing_file() {
        assert!(matches!(read_solution("/nonexistent/x.sol"), Err(LoadError::Io { .. })));
    }

    #[test]
    fn towers_are_cached() {
        let mut b = load_solution("algebra-n2").unwrap();
        let p = b.tower(3).unwrap() as *const PotentialTower;
        assert_eq!(p, b.tower(3).unwrap() as *const PotentialTower);
    }
}
