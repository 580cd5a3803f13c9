//! The boolean SOC x POC compatibility table.

use super::{Family, LabelRegistry, TtmError};

/// Which processes of change are commonly used at which stage.
///
/// Rows are POC, columns SOC, both in registry order. Loaded from a plain
/// text file (`poc-name: soc1, soc2, ...`) so a corrected transcription
/// drops in without a rebuild.
#[derive(Debug, Clone)]
pub struct CompatibilityMatrix {
    socs: Vec<String>,
    pocs: Vec<String>,
    cells: Vec<bool>, // poc-major
}

const DEFAULT_MATRIX: &str = include_str!("../../data/matrix.txt");

impl CompatibilityMatrix {
    /// The shipped default table.
    pub fn default_matrix(registry: &LabelRegistry) -> CompatibilityMatrix {
        CompatibilityMatrix::load(DEFAULT_MATRIX, registry)
            .expect("shipped matrix file is valid")
    }

    /// Parse a matrix file. Every POC in the registry needs a row; names
    /// resolve through the registry (aliases allowed).
    pub fn load(text: &str, registry: &LabelRegistry) -> Result<CompatibilityMatrix, TtmError> {
        let socs: Vec<String> = registry
            .family_labels(Family::Soc)
            .map(|d| d.name.clone())
            .collect();
        let pocs: Vec<String> = registry
            .family_labels(Family::Poc)
            .map(|d| d.name.clone())
            .collect();
        let mut cells = vec![false; socs.len() * pocs.len()];
        let mut seen = vec![false; pocs.len()];

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, rest) = line
                .split_once(':')
                .ok_or(TtmError::BadMatrixLine { line: lineno + 1 })?;
            let def = registry
                .resolve(name)
                .ok_or_else(|| TtmError::UnknownLabel(name.trim().to_string()))?;
            if def.family != Family::Poc {
                return Err(TtmError::NotAProcess(def.name.clone()));
            }
            let row = pocs.iter().position(|p| *p == def.name).unwrap();
            seen[row] = true;
            for soc_name in rest.split(',') {
                let soc_name = soc_name.trim();
                if soc_name.is_empty() {
                    continue;
                }
                let soc = registry
                    .resolve(soc_name)
                    .ok_or_else(|| TtmError::UnknownLabel(soc_name.to_string()))?;
                if soc.family != Family::Soc {
                    return Err(TtmError::NotAStage(soc.name.clone()));
                }
                let col = socs.iter().position(|s| *s == soc.name).unwrap();
                cells[row * socs.len() + col] = true;
            }
        }

        if let Some(row) = seen.iter().position(|s| !s) {
            return Err(TtmError::MissingRow(pocs[row].clone()));
        }
        let matrix = CompatibilityMatrix { socs, pocs, cells };
        matrix.check_nonempty()?;
        Ok(matrix)
    }

    fn check_nonempty(&self) -> Result<(), TtmError> {
        for (row, poc) in self.pocs.iter().enumerate() {
            if !self.cells[row * self.socs.len()..(row + 1) * self.socs.len()]
                .iter()
                .any(|&c| c)
            {
                return Err(TtmError::EmptyProcess(poc.clone()));
            }
        }
        for (col, soc) in self.socs.iter().enumerate() {
            if !(0..self.pocs.len()).any(|row| self.cells[row * self.socs.len() + col]) {
                return Err(TtmError::EmptyStage(soc.clone()));
            }
        }
        Ok(())
    }

    /// True when the process is commonly used at the stage. Unknown names
    /// are never compatible.
    pub fn compatible(&self, soc: &str, poc: &str) -> bool {
        let (Some(col), Some(row)) = (
            self.socs.iter().position(|s| s == soc),
            self.pocs.iter().position(|p| p == poc),
        ) else {
            return false;
        };
        self.cells[row * self.socs.len() + col]
    }

    pub fn stages(&self) -> &[String] {
        &self.socs
    }

    pub fn processes(&self) -> &[String] {
        &self.pocs
    }
}
