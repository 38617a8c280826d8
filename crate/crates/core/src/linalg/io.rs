//! Matrix JSON format: `{"n": int, "re": [[row-major reals]], "im": [[...]]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{LinalgError, Matrix};

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Matrix {
    pub fn from_json(text: &str) -> Result<Self, LinalgError> {
        let parsed: MatrixJson =
            serde_json::from_str(text).map_err(|e| LinalgError::Json(e.to_string()))?;
        if parsed.n == 0 {
            return Err(LinalgError::Json("dimension n must be positive".into()));
        }
        for (name, grid) in [("re", &parsed.re), ("im", &parsed.im)] {
            if grid.len() != parsed.n {
                return Err(LinalgError::Json(format!(
                    "field '{name}': expected {} rows, found {}",
                    parsed.n,
                    grid.len()
                )));
            }
            for (i, row) in grid.iter().enumerate() {
                if row.len() != parsed.n {
                    return Err(LinalgError::Json(format!(
                        "field '{name}', row {i}: expected {} columns, found {}",
                        parsed.n,
                        row.len()
                    )));
                }
                for (j, &x) in row.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(LinalgError::Json(format!(
                            "field '{name}', row {i}, column {j}: entry is not finite"
                        )));
                    }
                }
            }
        }
        Ok(Matrix::from_fn(parsed.n, |i, j| Complex64::new(parsed.re[i][j], parsed.im[i][j])))
    }

    pub fn to_json(&self) -> String {
        let n = self.dim();
        let re: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self[(i, j)].re).collect()).collect();
        let im: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self[(i, j)].im).collect()).collect();
        serde_json::to_string(&MatrixJson { n, re, im }).expect("matrix serialization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let a = Matrix::from_rows(&[
            vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(3.25, 4.5)],
        ]);
        let b = Matrix::from_json(&a.to_json()).unwrap();
        assert!(a.sub(&b).max_abs() == 0.0);
    }

    #[test]
    fn reports_row_and_column() {
        let bad = r#"{"n": 2, "re": [[1.0, 2.0], [3.0]], "im": [[0,0],[0,0]]}"#;
        let err = Matrix::from_json(bad).unwrap_err().to_string();
        assert!(err.contains("row 1"), "{err}");
        assert!(err.contains("columns"), "{err}");
    }

    #[test]
    fn rejects_malformed_json() {
        assert!(Matrix::from_json("{not json").is_err());
    }
}
