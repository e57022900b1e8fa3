use serde::{Deserialize, Serialize};

use super::{CMatrix, Dictionary, ModelError, Signal, C64};

/// JSON form of a complex matrix: dimensions plus row-major real and
/// imaginary parts. Signals use `m = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub n: usize,
    pub m: usize,
    pub real: Vec<f64>,
    pub imag: Vec<f64>,
}

impl MatrixRecord {
    pub fn from_matrix(a: &CMatrix) -> Self {
        let (n, m) = a.shape();
        let mut real = Vec::with_capacity(n * m);
        let mut imag = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                real.push(a[(i, j)].re);
                imag.push(a[(i, j)].im);
            }
        }
        Self { n, m, real, imag }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, ModelError> {
        let len = self.n * self.m;
        for got in [self.real.len(), self.imag.len()] {
            if got != len {
                return Err(ModelError::DimensionMismatch { expected: len, got });
            }
        }
        Ok(CMatrix::from_fn(self.n, self.m, |i, j| C64::new(self.real[i * self.m + j], self.imag[i * self.m + j])))
    }

    pub fn from_dictionary(d: &Dictionary) -> Self {
        Self::from_matrix(d.matrix())
    }

    pub fn to_dictionary(&self) -> Result<Dictionary, ModelError> {
        Dictionary::new(self.to_matrix()?)
    }

    pub fn from_signal(s: &Signal) -> Self {
        Self {
            n: s.len(),
            m: 1,
            real: s.as_slice().iter().map(|z| z.re).collect(),
            imag: s.as_slice().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_signal(&self) -> Result<Signal, ModelError> {
        if self.m != 1 {
            return Err(ModelError::DimensionMismatch { expected: 1, got: self.m });
        }
        let a = self.to_matrix()?;
        Ok(Signal::from_slice(a.as_slice()))
    }
}

/// Reads a real dictionary from headerless CSV: one matrix row per line.
pub fn read_dictionary_csv<R: std::io::Read>(reader: R) -> Result<Dictionary, ModelError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| ModelError::Parse(e.to_string()))?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| ModelError::Parse(format!("{f:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(ModelError::DimensionMismatch { expected: m, got: bad.len() });
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Dictionary::from_real(n, m, &flat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_dictionary() {
        let text = "1, 0\n0, 2\n";
        let d = read_dictionary_csv(text.as_bytes()).unwrap();
        assert_eq!((d.n(), d.m()), (2, 2));
        assert_eq!(d.atom(1)[1], C64::new(1.0, 0.0));
    }

    #[test]
    fn ragged_csv_rejected() {
        assert!(read_dictionary_csv("1,2\n3\n".as_bytes()).is_err());
    }

    #[test]
    fn record_length_checked() {
        let r = MatrixRecord { n: 2, m: 2, real: vec![1.0; 4], imag: vec![0.0; 3] };
        assert!(r.to_matrix().is_err());
    }
}
