//! Problem files: `A` and named operators as nested `[re, im]` rows.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::error::Error;
use crate::inequalities::Operands;
use crate::linalg::ComplexMatrix;
use crate::semihilbert::SemiHilbertContext;

/// Operator names a problem file may use.
pub const OPERATOR_NAMES: [&str; 3] = ["T", "S", "X"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: ComplexMatrix,
    pub operators: BTreeMap<String, ComplexMatrix>,
}

/// A validated problem with its context.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub ctx: SemiHilbertContext,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    /// Checks names and shapes and builds the context, which rejects a
    /// non-PSD `A`.
    pub fn validate(self, rank_tol: Option<f64>) -> Result<Problem, HarnessError> {
        if self.n == 0 {
            return Err(Error::InvalidOptions("n must be positive".into()).into());
        }
        self.a.ensure_order(self.n)?;
        if !self.operators.contains_key("T") {
            return Err(Error::InvalidOptions("problem file must define operator T".into()).into());
        }
        for (name, m) in &self.operators {
            if !OPERATOR_NAMES.contains(&name.as_str()) {
                return Err(Error::UnknownKind(name.clone()).into());
            }
            m.ensure_order(self.n)?;
        }
        let ctx = SemiHilbertContext::new(&self.a, rank_tol)?;
        Ok(Problem { file: self, ctx })
    }
}

impl Problem {
    pub fn operator(&self, name: &str) -> Result<&ComplexMatrix, HarnessError> {
        self.file
            .operators
            .get(name)
            .ok_or_else(|| Error::InvalidOptions(format!("problem file has no operator {name}")).into())
    }

    /// Operators in `T, S, X` order.
    pub fn named(&self) -> Vec<(&'static str, &ComplexMatrix)> {
        OPERATOR_NAMES.iter().filter_map(|&k| self.file.operators.get(k).map(|m| (k, m))).collect()
    }

    pub fn operands(&self) -> Operands {
        let get = |k: &str| self.file.operators.get(k).cloned();
        Operands { t: self.file.operators["T"].clone(), s: get("S"), x: get("X") }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const JORDAN: &str = r#"{"n": 2, "A": [[[1,0],[0,0]],[[0,0],[1,0]]],
        "operators": {"T": [[[0,0],[1,0]],[[0,0],[0,0]]]}}"#;

    #[test]
    fn parses_and_validates() {
        let p = ProblemFile::from_json(JORDAN).unwrap().validate(None).unwrap();
        assert_eq!(p.ctx.rank(), 2);
        assert_eq!(p.named().len(), 1);
        assert!(p.operands().s.is_none());
    }

    #[test]
    fn rejects_bad_files() {
        let not_psd = JORDAN.replace("[[[1,0],[0,0]],[[0,0],[1,0]]]", "[[[1,0],[0,0]],[[0,0],[-1,0]]]");
        let e = ProblemFile::from_json(&not_psd).unwrap().validate(None).unwrap_err();
        assert!(matches!(e, HarnessError::Core(Error::NotPsd { .. })));
        let no_t = JORDAN.replace("\"T\"", "\"S\"");
        assert!(ProblemFile::from_json(&no_t).unwrap().validate(None).is_err());
        let bad_name = JORDAN.replace("\"T\"", "\"T\": [[[1,0],[0,0]],[[0,0],[1,0]]], \"Q\"");
        assert!(matches!(
            ProblemFile::from_json(&bad_name).unwrap().validate(None),
            Err(HarnessError::Core(Error::UnknownKind(_)))
        ));
        let wrong_n = JORDAN.replace("\"n\": 2", "\"n\": 3");
        assert!(ProblemFile::from_json(&wrong_n).unwrap().validate(None).is_err());
        assert!(matches!(ProblemFile::from_json("{"), Err(HarnessError::Parse(_))));
    }
}
