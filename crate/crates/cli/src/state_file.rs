//! Plain-text state files.
//!
//! ```text
//! dims 2 2
//! 0.7071067811865476 0
//! 0 0
//! 0 0
//! 0.7071067811865476 0
//! ```
//!
//! A pure state lists `d_A d_B` amplitudes as `re im`, A-major. A mixed state puts
//! `densematrix` on the second line and lists `(d_A d_B)²` entries row by row.
//! Blank lines and lines starting with `#` are skipped.

use eurbound::{CMatrix, CVector, DensityOperator, PureStateVector, C64};

use crate::CliError;

const NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub enum StateFile {
    Pure(PureStateVector),
    Mixed(DensityOperator),
}

impl StateFile {
    pub fn density(&self) -> DensityOperator {
        match self {
            StateFile::Pure(psi) => DensityOperator::from_pure(psi),
            StateFile::Mixed(rho) => rho.clone(),
        }
    }

    pub fn dims(&self) -> [usize; 2] {
        let d = match self {
            StateFile::Pure(psi) => psi.dims().to_vec(),
            StateFile::Mixed(rho) => rho.dims().to_vec(),
        };
        [d[0], d[1]]
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_state(text: &str) -> Result<StateFile, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, header) = lines.next().ok_or_else(|| config("state file is empty"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    if words.len() != 3 || words[0] != "dims" {
        return Err(config(format!("line {ln}: expected `dims d_A d_B`")));
    }
    let parse_dim = |s: &str| -> Result<usize, CliError> {
        match s.parse::<usize>() {
            Ok(d) if d >= 1 => Ok(d),
            _ => Err(config(format!("line {ln}: bad dimension {s:?}"))),
        }
    };
    let (da, db) = (parse_dim(words[1])?, parse_dim(words[2])?);
    let d = da.checked_mul(db).ok_or_else(|| config("dimension overflow"))?;

    let mut rest: Vec<(usize, &str)> = lines.collect();
    let dense = matches!(rest.first(), Some((_, "densematrix")));
    if dense {
        rest.remove(0);
    }
    let expected = if dense { d * d } else { d };
    if rest.len() != expected {
        return Err(config(format!("expected {expected} entries, found {}", rest.len())));
    }
    let mut values = Vec::with_capacity(expected);
    for (ln, line) in rest {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(config(format!("line {ln}: expected `re im`")));
        }
        let num = |s: &str| -> Result<f64, CliError> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| config(format!("line {ln}: bad number {s:?}")))
        };
        values.push(C64::new(num(parts[0])?, num(parts[1])?));
    }

    if dense {
        let m = CMatrix::from_row_slice(d, d, &values);
        let rho = DensityOperator::new(m, vec![da, db]).map_err(|e| config(format!("invalid density matrix: {e}")))?;
        Ok(StateFile::Mixed(rho))
    } else {
        let v = CVector::from_vec(values);
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(config(format!("amplitudes have norm {norm}, expected 1")));
        }
        let psi = PureStateVector::normalized(v, vec![da, db]).map_err(|e| config(e.to_string()))?;
        Ok(StateFile::Pure(psi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_and_mixed() {
        let s = parse_state("# bell\ndims 2 2\n0.7071067811865476 0\n0 0\n0 0\n0.7071067811865476 0\n").unwrap();
        assert!(matches!(s, StateFile::Pure(_)));
        assert_eq!(s.dims(), [2, 2]);

        let mut text = String::from("dims 1 2\ndensematrix\n");
        for e in ["0.5 0", "0 0", "0 0", "0.5 0"] {
            text.push_str(e);
            text.push('\n');
        }
        let s = parse_state(&text).unwrap();
        assert!(matches!(s, StateFile::Mixed(_)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_state("").is_err());
        assert!(parse_state("dims 2\n1 0\n0 0\n").is_err());
        assert!(parse_state("dims 1 2\n1 0\n").is_err());
        assert!(parse_state("dims 1 2\n1 0\n1 0\n").is_err());
        assert!(parse_state("dims 1 2\n1 0\nx 0\n").is_err());
        assert!(parse_state("dims 1 2\ndensematrix\n1 0\n0 0\n0 0\n1 0\n").is_err());
    }
}
