use std::fmt;

use super::error::ExecError;

/// Hard cap on the number of elements a single value may hold.
pub const MAX_ELEMENTS: usize = 1 << 24;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Scalar,
    Vector,
    Matrix,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Scalar => "scalar",
            Shape::Vector => "vector",
            Shape::Matrix => "matrix",
        })
    }
}

/// Runtime value of the heuristic language.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Matrix),
}

impl Value {
    pub fn shape(&self) -> Shape {
        match self {
            Value::Scalar(_) => Shape::Scalar,
            Value::Vector(_) => Shape::Vector,
            Value::Matrix(_) => Shape::Matrix,
        }
    }

    pub fn elements(&self) -> &[f64] {
        match self {
            Value::Scalar(x) => std::slice::from_ref(x),
            Value::Vector(v) => v,
            Value::Matrix(m) => m.data(),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Value::Scalar(x) => Some(*x),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.elements().iter().all(|x| x.is_finite())
    }

    pub fn describe(&self) -> String {
        match self {
            Value::Scalar(_) => "scalar".to_string(),
            Value::Vector(v) => format!("vector[{}]", v.len()),
            Value::Matrix(m) => format!("matrix[{}x{}]", m.rows(), m.cols()),
        }
    }

    /// Applies `f` to every element.
    pub fn map(self, f: impl Fn(f64) -> f64) -> Value {
        match self {
            Value::Scalar(x) => Value::Scalar(f(x)),
            Value::Vector(mut v) => {
                v.iter_mut().for_each(|x| *x = f(*x));
                Value::Vector(v)
            }
            Value::Matrix(mut m) => {
                m.data.iter_mut().for_each(|x| *x = f(*x));
                Value::Matrix(m)
            }
        }
    }

    /// Elementwise combination with scalar broadcasting on either side.
    pub fn zip_with(self, other: Value, op: &str, f: impl Fn(f64, f64) -> f64) -> Result<Value, ExecError> {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(f(a, b))),
            (Value::Scalar(a), rhs) => Ok(rhs.map(|b| f(a, b))),
            (lhs, Value::Scalar(b)) => Ok(lhs.map(|a| f(a, b))),
            (Value::Vector(mut a), Value::Vector(b)) => {
                if a.len() != b.len() {
                    return Err(ExecError::Shape(format!(
                        "`{op}` on vectors of length {} and {}",
                        a.len(),
                        b.len()
                    )));
                }
                a.iter_mut().zip(&b).for_each(|(x, y)| *x = f(*x, *y));
                Ok(Value::Vector(a))
            }
            (Value::Matrix(mut a), Value::Matrix(b)) => {
                if a.rows != b.rows || a.cols != b.cols {
                    return Err(ExecError::Shape(format!(
                        "`{op}` on matrices {}x{} and {}x{}",
                        a.rows, a.cols, b.rows, b.cols
                    )));
                }
                a.data.iter_mut().zip(&b.data).for_each(|(x, y)| *x = f(*x, *y));
                Ok(Value::Matrix(a))
            }
            (a, b) => Err(ExecError::Shape(format!(
                "`{op}` between {} and {}",
                a.describe(),
                b.describe()
            ))),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Scalar(x)
    }
}

impl From<Vec<f64>> for Value {
    fn from(v: Vec<f64>) -> Self {
        Value::Vector(v)
    }
}

impl From<Matrix> for Value {
    fn from(m: Matrix) -> Self {
        Value::Matrix(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broadcast_scalar_both_sides() {
        let v = Value::Scalar(4.0)
            .zip_with(Value::Vector(vec![10.0, 5.0, 7.0]), "-", |a, b| a - b)
            .unwrap();
        assert_eq!(v, Value::Vector(vec![-6.0, -1.0, -3.0]));
        let w = Value::Vector(vec![1.0, 2.0])
            .zip_with(Value::Scalar(2.0), "*", |a, b| a * b)
            .unwrap();
        assert_eq!(w, Value::Vector(vec![2.0, 4.0]));
    }

    #[test]
    fn mismatched_shapes_fail() {
        let err = Value::Vector(vec![1.0])
            .zip_with(Value::Vector(vec![1.0, 2.0]), "+", |a, b| a + b)
            .unwrap_err();
        assert!(matches!(err, ExecError::Shape(_)));
        let err = Value::Vector(vec![1.0])
            .zip_with(Value::Matrix(Matrix::zeros(1, 1)), "+", |a, b| a + b)
            .unwrap_err();
        assert!(matches!(err, ExecError::Shape(_)));
    }
}
