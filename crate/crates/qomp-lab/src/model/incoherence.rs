use super::linalg::inner;
use super::{Dictionary, ModelError};
use crate::exec::{self, Execution};

/// `max_{i != j} |<d_i|d_j>|`.
pub fn mutual_incoherence(d: &Dictionary, execution: Execution) -> Result<f64, ModelError> {
    let m = d.m();
    if m < 2 {
        return Err(ModelError::TooFewAtoms);
    }
    let row_max = exec::map_indexed(execution, m, |i| {
        ((i + 1)..m).map(|j| inner(d.atom(i), d.atom(j)).norm()).fold(0.0_f64, f64::max)
    });
    Ok(row_max.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CMatrix, C64};

    #[test]
    fn orthonormal_basis_has_zero_coherence() {
        let d = Dictionary::new(CMatrix::identity(5, 5)).unwrap();
        assert_eq!(mutual_incoherence(&d, Execution::Sequential).unwrap(), 0.0);
    }

    #[test]
    fn duplicate_atoms_have_unit_coherence() {
        let m = CMatrix::from_fn(3, 2, |i, _| C64::new(i as f64 + 1.0, 0.0));
        let d = Dictionary::new(m).unwrap();
        assert!((mutual_incoherence(&d, Execution::Parallel).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_atom_is_rejected() {
        let d = Dictionary::new(CMatrix::identity(3, 1)).unwrap();
        assert_eq!(mutual_incoherence(&d, Execution::Sequential), Err(ModelError::TooFewAtoms));
    }
}
